"""Strongly-selective families from codes, and brute-force verification."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .gvcode import GeneratorMatrix, row_values

DEFAULT_SSF_BUDGET = 10**9


@dataclass(frozen=True)
class Scheme:
    """A family of tests over items 1..n, claimed selective of strength r."""

    n: int
    r: int
    tests: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        tests = tuple(tuple(sorted(int(x) for x in t)) for t in self.tests)
        for t in tests:
            if t and (t[0] < 1 or t[-1] > self.n):
                raise ValueError(f"test {t} has items outside [1, {self.n}]")
            if len(set(t)) != len(t):
                raise ValueError(f"test {t} repeats an item")
        object.__setattr__(self, "tests", tests)

    @property
    def t(self) -> int:
        return len(self.tests)

    @property
    def total_incidence(self) -> int:
        return sum(len(t) for t in self.tests)

    @cached_property
    def flat(self) -> Tuple[np.ndarray, np.ndarray]:
        """Parallel arrays (items, test ids) listing every incidence."""
        sizes = [len(t) for t in self.tests]
        items = np.fromiter(itertools.chain.from_iterable(self.tests), dtype=np.int64, count=sum(sizes))
        ids = np.repeat(np.arange(self.t, dtype=np.int64), sizes)
        return items, ids

    @cached_property
    def item_tests(self) -> Tuple[np.ndarray, np.ndarray]:
        """CSR index: tests of item x are ``ids[ptr[x]:ptr[x + 1]]``."""
        items, ids = self.flat
        order = np.argsort(items, kind="stable")
        ptr = np.searchsorted(items[order], np.arange(self.n + 2))
        return ptr, ids[order]

    def incidence(self) -> np.ndarray:
        """Boolean ``(n + 1, t)`` matrix; row x marks the tests containing item x."""
        inc = np.zeros((self.n + 1, self.t), dtype=bool)
        for col, test in enumerate(self.tests):
            inc[list(test), col] = True
        return inc


def singleton_scheme(n: int, r: Optional[int] = None) -> Scheme:
    return Scheme(n=n, r=n if r is None else r, tests=tuple((i,) for i in range(1, n + 1)))


def selective_strength(delta) -> int:
    """ceil(1 / (1 - delta)): strength of the family built from a code of relative distance delta."""
    delta = Fraction(delta)
    if delta >= 1:
        raise ValueError("relative distance must be below 1")
    return math.ceil(1 / (1 - delta))


def reduce_code(g: GeneratorMatrix, n: int) -> Scheme:
    """Tests ``s[p, v] = {i : w_i[p] = v}`` ordered by (p, v), empty ones dropped.

    Item i (1-based) gets the codeword of the (i-1)-th message in
    lexicographic order.
    """
    q, m, k = g.params.q, g.params.m, g.params.k
    if n < 1 or n > q**k:
        raise ValueError(f"n={n} must lie in [1, q^k={q**k}]")
    tests = []
    for p in range(m):
        letters = row_values(g.entries[p], q)[:n]
        order = np.argsort(letters, kind="stable")
        bounds = np.searchsorted(letters[order], np.arange(q + 1))
        for v in range(q):
            members = order[bounds[v] : bounds[v + 1]]
            if members.size:
                tests.append(tuple((members + 1).tolist()))
    return Scheme(n=n, r=selective_strength(g.params.delta), tests=tuple(tests))


@dataclass(frozen=True)
class SSFCheck:
    """Outcome of a selectivity check.

    ``ok`` is True/False for a decided check and None when the check was
    skipped because it would exceed the budget. ``counterexample`` is
    ``(A, x)``: a set A and an element x in it that no test selects.
    """

    ok: Optional[bool]
    counterexample: Optional[Tuple[Tuple[int, ...], int]] = None
    checked: int = 0

    def __bool__(self):
        return self.ok is True

    @property
    def verdict(self) -> str:
        return {True: "pass", False: "fail", None: "unverified"}[self.ok]


def _first_unselected(inc: np.ndarray, sets: np.ndarray):
    """Return (row, position) of the first (set, element) pair that is not selected, else None."""
    rows = inc[sets]                       # (batch, size, t)
    hits = rows.sum(axis=1, dtype=np.int32)  # how many set members each test holds
    lonely = hits == 1
    selected = (rows & lonely[:, None, :]).any(axis=2)  # (batch, size)
    bad = np.argwhere(~selected)
    if bad.size:
        return int(bad[0, 0]), int(bad[0, 1])
    return None


def verify_ssf(s: Scheme, r: int, budget: int = DEFAULT_SSF_BUDGET, chunk: int = 4096) -> SSFCheck:
    """Exhaustively check that every x in every A with |A| <= r is selected.

    Only sets of size ``min(r, n)`` are enumerated: a test selecting x out
    of A also selects x out of every subset of A containing x.
    """
    size = min(r, s.n)
    if size <= 0:
        return SSFCheck(ok=True)
    work = math.comb(s.n, size) * size * max(s.t, 1)
    if work > budget:
        return SSFCheck(ok=None)
    inc = s.incidence()
    combos = itertools.combinations(range(1, s.n + 1), size)
    checked = 0
    while True:
        batch = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64)
        if batch.size == 0:
            break
        miss = _first_unselected(inc, batch)
        if miss is not None:
            a, pos = miss
            subset = tuple(batch[a].tolist())
            return SSFCheck(ok=False, counterexample=(subset, subset[pos]), checked=checked + a)
        checked += len(batch)
    return SSFCheck(ok=True, checked=checked)


def verify_ssf_sampled(s: Scheme, r: int, trials: int, seed: int = 0) -> SSFCheck:
    """Check ``trials`` random sets of size min(r, n); sound only for rejection."""
    size = min(r, s.n)
    if size <= 0 or trials <= 0:
        return SSFCheck(ok=True)
    rng = np.random.default_rng(seed)
    ptr, ids = s.item_tests
    for n_done in range(trials):
        subset = np.sort(rng.choice(s.n, size=size, replace=False) + 1)
        member_tests = [ids[ptr[x] : ptr[x + 1]] for x in subset]
        hits = np.bincount(np.concatenate(member_tests), minlength=s.t)
        for x, tests in zip(subset.tolist(), member_tests):
            if not np.any(hits[tests] == 1):
                return SSFCheck(ok=False, counterexample=(tuple(subset.tolist()), x), checked=n_done)
    return SSFCheck(ok=True, checked=trials)
