"""
Finding five defectives among ten thousand items
================================================

Pool the items according to a (n, r+1)-selective family and every set of
at most r defectives can be read back from which pools come up positive.
"""

import math

import numpy as np

from gtscheme import build_gt_scheme, decode, derive_params, outcomes

n, r = 10_000, 5
params = derive_params(n, r + 1)
print("code behind the scheme:", params.code)

s = build_gt_scheme(n, r)
print(f"{s.t} pooled tests instead of {n} individual ones")
print(f"t / (r^2 ln n) = {s.t / (r * r * math.log(n)):.2f}")

rng = np.random.default_rng(7)
hidden = tuple(sorted((rng.choice(n, size=r, replace=False) + 1).tolist()))
o = outcomes(s, hidden)
print(f"hidden defectives {hidden}: {o.sum()} positive tests")

# an item is cleared as soon as one of its tests is negative
print("recovered:", decode(s, o, r))

# noisy readings that no small set could produce are reported, not guessed at
flipped = o.copy()
flipped[np.flatnonzero(~o)[:3]] = True
try:
    decode(s, flipped, r)
except ValueError as exc:
    print("corrupted outcomes:", exc)
