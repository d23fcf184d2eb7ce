"""
From a small Reed-Solomon code to a selective family
=====================================================

A linear code over F_3 with two message symbols has nine codewords. Reading
each coordinate of each codeword as a (position, letter) label turns the
code into nine tests over nine items.
"""

import numpy as np

from gtscheme import reduce_code, reed_solomon, verify_ssf
from gtscheme.gvcode import all_messages

# evaluation code at the points 0, 1, 2: three rows, two columns
g = reed_solomon(3, 2)
print("generator matrix:\n", g.entries)

# every message y gives the codeword G y; coordinate 0 of y is least significant
words = (all_messages(3, 2) @ g.entries.T) % 3
for item, w in enumerate(words, start=1):
    print(f"item {item}: codeword {''.join(map(str, w))}")

# test (p, v) collects the items whose codeword has letter v at position p
s = reduce_code(g, 9)
for test in s.tests:
    print("test", test)

# any two codewords agree in at most one position, which is what lets a test
# isolate each member of a three-item set
check = verify_ssf(s, 3)
print(f"(9, 3)-selective: {check.verdict} after {check.checked} subsets")

# one more item than the code can separate breaks it
print("(9, 4)-selective:", verify_ssf(s, 4).verdict, verify_ssf(s, 4).counterexample)

incidence = s.incidence()[1:].astype(int)
print("incidence (items x tests):\n", incidence)
print("tests per item:", np.unique(incidence.sum(axis=1)))
