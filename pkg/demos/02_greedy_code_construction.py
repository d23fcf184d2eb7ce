"""
Building a good code one entry at a time
========================================

A random m x k generator matrix is very likely to have minimum distance at
least delta * m when the rate sits below the Gilbert-Varshamov curve. The
construction here removes the luck: it fills the matrix entry by entry and
each letter it picks keeps the expected number of light codewords from
growing. That number starts below one and finishes at zero.
"""

from fractions import Fraction

import numpy as np

from gtscheme import CodeParams, derandomized_construct, minimal_length, random_code, verify_distance
from gtscheme.gvcode import Construction, goal

q, k, delta = 5, 3, Fraction(2, 3)
m = minimal_length(q, k, delta)
params = CodeParams(q=q, m=m, k=k, delta=delta)
print(params, "threshold", params.threshold)

# how often does a random matrix of this shape fall short?
light = [goal(random_code(params, seed)) for seed in range(200)]
print("random matrices with a light codeword:", sum(x > 0 for x in light), "of 200")

# follow the expected count of light codewords while the matrix fills in
state = Construction(params, mode="exact")
trace = [state.expected_goal()]
while not state.done:
    state.advance()
    trace.append(state.expected_goal())
print("expected light codewords at the start: %.4f" % float(trace[0]))
print("never increases:", all(b <= a for a, b in zip(trace, trace[1:])))
print("every %d-th value:" % (len(trace) // 8), [round(float(x), 4) for x in trace[:: len(trace) // 8]])

g = state.matrix()
print("minimum distance", verify_distance(g), ">= threshold", params.threshold)

# the float mode reaches the same matrix here and is what larger codes use
fast = derandomized_construct(params, mode="fast")
print("fast mode agrees:", np.array_equal(fast.entries, g.entries), "verified:", fast.verified)
