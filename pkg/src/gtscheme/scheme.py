"""End-to-end group-testing schemes: build, run tests, decode, simulate."""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .gvcode import DEFAULT_BUDGET, GeneratorMatrix, derandomized_construct
from .params import SchemeParams, derive_params
from .ssf import Scheme, reduce_code, singleton_scheme


class InconsistentOutcomes(ValueError):
    """Outcomes that no defective set of the allowed size explains."""


@dataclass(frozen=True)
class Build:
    scheme: Scheme
    params: SchemeParams
    code: Optional[GeneratorMatrix] = None


def build(n: int, r: int, mode: str = "fast", budget: int = DEFAULT_BUDGET) -> Build:
    """Build an (n, r)-SSF together with the parameters and code behind it."""
    params = derive_params(n, r)
    if params.trivial:
        return Build(singleton_scheme(n, r), params)
    code = derandomized_construct(params.code, mode=mode, budget=budget)
    return Build(reduce_code(code, n), params, code)


def build_scheme(n: int, r: int, mode: str = "fast", budget: int = DEFAULT_BUDGET) -> Scheme:
    """An (n, r)-strongly-selective family with O(min(r^2 ln n, n)) tests."""
    return build(n, r, mode, budget).scheme


def build_gt_scheme(n: int, r: int, mode: str = "fast", budget: int = DEFAULT_BUDGET) -> Scheme:
    """Non-adaptive tests that identify any set of at most r defectives.

    An (n, r+1)-SSF separates every item outside a set of size r from that
    set, which is what the cover decoder needs.
    """
    if r < 0 or r + 1 > n:
        raise ValueError(f"need 0 <= r < n, got r={r} n={n}")
    return build_scheme(n, r + 1, mode, budget)


def _check_items(s: Scheme, d: Iterable[int]) -> np.ndarray:
    items = np.unique(np.asarray(list(d), dtype=np.int64))
    if items.size and (items[0] < 1 or items[-1] > s.n):
        raise ValueError(f"defective items must lie in [1, {s.n}]")
    return items


def outcomes(s: Scheme, d: Iterable[int]) -> np.ndarray:
    """Boolean vector: test j is positive iff it contains a defective item."""
    items = _check_items(s, d)
    ptr, ids = s.item_tests
    o = np.zeros(s.t, dtype=bool)
    for x in items.tolist():
        o[ids[ptr[x] : ptr[x + 1]]] = True
    return o


def decode(s: Scheme, o, r: int) -> Tuple[int, ...]:
    """Cover decoder: items all of whose tests came back positive.

    Exact when s is an (n, r+1)-SSF and at most r items are defective.
    Anything else that gets noticed (too many candidates, or candidates that
    would not reproduce ``o``) raises InconsistentOutcomes.
    """
    o = np.asarray(o, dtype=bool)
    if o.shape != (s.t,):
        raise ValueError(f"expected {s.t} outcomes, got {o.shape[0] if o.ndim else 0}")
    flat_items, ids = s.flat
    cleared = np.zeros(s.n + 1, dtype=bool)
    cleared[flat_items[~o[ids]]] = True
    found = tuple((np.flatnonzero(~cleared[1:]) + 1).tolist())
    if len(found) > r:
        raise InconsistentOutcomes(f"{len(found)} candidates exceed the bound r={r}")
    if not np.array_equal(outcomes(s, found), o):
        raise InconsistentOutcomes("decoded set does not reproduce the outcomes")
    return found


@dataclass
class SimulationReport:
    n: int
    r: int
    t: int
    trivial: bool
    q: Optional[int]
    k: Optional[int]
    m: Optional[int]
    delta: Optional[str]
    trials: int
    build_seconds: float
    decode_seconds: float
    failures: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def recovered(self) -> int:
        return self.trials - len(self.failures)


def _all_small_sets(n: int, r: int):
    for size in range(r + 1):
        yield from itertools.combinations(range(1, n + 1), size)


def _random_sets(n: int, r: int, trials: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        size = int(rng.integers(0, min(r, n) + 1))
        yield tuple(np.sort(rng.choice(n, size=size, replace=False) + 1).tolist())


def _round_trip(s: Scheme, r: int, sets) -> List[Tuple[int, ...]]:
    bad = []
    for d in sets:
        try:
            ok = decode(s, outcomes(s, d), r) == d
        except InconsistentOutcomes:
            ok = False
        if not ok:
            bad.append(d)
    return bad


def simulate(
    n: int,
    r: int,
    trials: Optional[int] = 1000,
    seed: int = 0,
    mode: str = "fast",
    workers: int = 1,
) -> SimulationReport:
    """Build a strength-r GT scheme and round-trip random defective sets through it.

    ``trials=None`` enumerates every defective set of size at most r.
    """
    start = time.perf_counter()
    b = build(n, r + 1, mode)
    built = time.perf_counter()
    if trials is None:
        sets = list(_all_small_sets(n, r))
    else:
        sets = list(_random_sets(n, r, trials, seed))
    chunks = [sets[i::workers] for i in range(workers)] if workers > 1 else [sets]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        failures = sorted(itertools.chain.from_iterable(pool.map(lambda c: _round_trip(b.scheme, r, c), chunks)))
    done = time.perf_counter()
    code = b.params.code
    return SimulationReport(
        n=n,
        r=r,
        t=b.scheme.t,
        trivial=b.params.trivial,
        q=code.q if code else None,
        k=code.k if code else None,
        m=code.m if code else None,
        delta=f"{code.delta.numerator}/{code.delta.denominator}" if code else None,
        trials=len(sets),
        build_seconds=built - start,
        decode_seconds=done - built,
        failures=failures,
    )
