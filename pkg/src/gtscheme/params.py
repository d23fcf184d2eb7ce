"""Entropy, parameter derivation and the binomial kernels used by the construction.

All thresholds are kept as exact rationals. Float comparisons that land
within a relative ``1e-9`` of the boundary are redone with mpmath at high
precision so that boundary parameters never slip past the GV inequality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np

from .field import is_prime, smallest_prime_in

_CLOSE = 1e-9
_MP_DPS = 80
_MP_TIE = mpmath.mpf(10) ** -60


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def entropy_q(q: int, p) -> float:
    """q-ary entropy H_q(p), with H_q(0) = 0 by continuity."""
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"entropy argument {p} outside [0, 1]")
    if p == 0:
        return 0.0
    lq = math.log(q)
    pf = float(p)
    h = pf * math.log(q - 1) - pf * math.log(pf)
    if p < 1:
        h -= (1 - pf) * math.log1p(-pf)
    return h / lq


def _entropy_mp(q: int, p: Fraction):
    with mpmath.workdps(_MP_DPS):
        if p == 0:
            return mpmath.mpf(0)
        pm = mpmath.mpf(p.numerator) / p.denominator
        h = pm * mpmath.log(q - 1) - pm * mpmath.log(pm)
        if p < 1:
            h -= (1 - pm) * mpmath.log(1 - pm)
        return h / mpmath.log(q)


def gv_satisfied(q: int, m: int, k: int, delta) -> bool:
    """Decide ``k <= (1 - H_q(delta)) * m`` robustly."""
    delta = as_fraction(delta)
    if delta == 0:
        return k <= m
    if q == 2 and delta == Fraction(1, 2):
        return k <= 0
    rhs = (1.0 - entropy_q(q, delta)) * m
    if abs(rhs - k) >= _CLOSE * max(abs(rhs), 1.0):
        return k <= rhs
    with mpmath.workdps(_MP_DPS):
        slack = (1 - _entropy_mp(q, delta)) * m - k
        return slack >= -_MP_TIE


def trivial_branch(n: int, r: int) -> bool:
    """True when ``r^2 ln n >= n``: the singleton tests are already small enough."""
    lhs = r * r * math.log(n)
    if abs(lhs - n) >= _CLOSE * n:
        return lhs >= n
    with mpmath.workdps(_MP_DPS):
        return r * r * mpmath.log(n) - n >= -_MP_TIE


@dataclass(frozen=True)
class CodeParams:
    """Parameters of a q-ary linear code of length m and dimension k.

    ``delta`` is the target relative distance, stored as an exact rational;
    a codeword is bad when its weight is below ``delta * m``.
    """

    q: int
    m: int
    k: int
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if not is_prime(self.q):
            raise ValueError(f"q={self.q} must be prime")
        if not 1 <= self.k <= self.m:
            raise ValueError(f"need 1 <= k <= m, got k={self.k} m={self.m}")
        if not 0 <= self.delta <= 1 - Fraction(1, self.q):
            raise ValueError(f"delta={self.delta} outside [0, 1 - 1/q]")

    @property
    def threshold(self) -> int:
        """Smallest acceptable codeword weight, i.e. ceil(delta * m)."""
        d = self.delta * self.m
        return -(-d.numerator // d.denominator)

    @property
    def meets_gv(self) -> bool:
        return gv_satisfied(self.q, self.m, self.k, self.delta)

    @property
    def size(self) -> int:
        return self.q**self.k

    def __str__(self):
        return f"q={self.q} m={self.m} k={self.k} delta={self.delta.numerator}/{self.delta.denominator}"


@dataclass(frozen=True)
class SchemeParams:
    n: int
    r: int
    trivial: bool
    code: Optional[CodeParams] = None

    @property
    def t_bound(self) -> int:
        if self.trivial:
            return self.n
        return self.code.m * self.code.q


def minimal_length(q: int, k: int, delta) -> int:
    """Smallest m with ``k <= (1 - H_q(delta)) m``."""
    delta = as_fraction(delta)
    rate = 1.0 - entropy_q(q, delta)
    if delta >= 1 - Fraction(1, q) or rate <= 0:
        raise ValueError(f"no code length satisfies the GV bound for q={q}, delta={delta}")
    m = max(k, math.ceil(k / rate))
    while m > k and gv_satisfied(q, m - 1, k, delta):
        m -= 1
    while not gv_satisfied(q, m, k, delta):
        m += 1
    return m


def derive_params(n: int, r: int) -> SchemeParams:
    """Choose code parameters for an (n, r)-strongly-selective family.

    Uses delta = (r-1)/r, the smallest prime q in [2r, 4r), the smallest k
    with q^k >= n and the smallest m meeting the GV inequality. When
    ``r^2 ln n >= n`` the singleton scheme is at least as small and
    ``trivial`` is set instead.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r} n={n}")
    if trivial_branch(n, r):
        return SchemeParams(n=n, r=r, trivial=True)
    delta = Fraction(r - 1, r)
    q = smallest_prime_in(2 * r, 4 * r)
    k = 1
    while q**k < n:
        k += 1
    m = minimal_length(q, k, delta)
    return SchemeParams(n=n, r=r, trivial=False, code=CodeParams(q=q, m=m, k=k, delta=delta))


def bad_event_log_bound(params: CodeParams) -> float:
    """Upper bound on log_q of the probability that a random codeword is bad."""
    return -params.m * (1.0 - entropy_q(params.q, params.delta))


@lru_cache(maxsize=32)
def _ln_factorials(size: int) -> np.ndarray:
    return np.array([math.lgamma(a + 1) for a in range(size + 1)], dtype=np.float64)


class LogPmfTable:
    """Natural logs of binomial coefficients C(a, b) for 0 <= b <= a <= size.

    Stored as ln-factorials so lookups are O(1) and memory is O(size).
    """

    def __init__(self, size: int, q: int):
        self.size = size
        self.q = q
        self.ln_fact = _ln_factorials(size)
        self.ln_p = math.log1p(-1.0 / q)  # ln(1 - 1/q): a random letter is nonzero
        self.ln_1mp = -math.log(q)        # ln(1/q): a random letter vanishes

    def __getitem__(self, ab):
        a, b = ab
        return self.ln_choose(a, b)

    def ln_choose(self, a, b):
        lf = self.ln_fact
        return lf[a] - lf[b] - lf[np.subtract(a, b)]

    def ln_pmf(self, trials, x):
        """ln Pr(B(trials, 1 - 1/q) = x)."""
        return self.ln_choose(trials, x) + np.multiply(x, self.ln_p) + np.multiply(np.subtract(trials, x), self.ln_1mp)


def _tail_index(threshold) -> int:
    # largest integer x with x < threshold
    t = as_fraction(threshold)
    return -(-t.numerator // t.denominator) - 1


def binom_tail_lt(trials: int, success_p, threshold, table: Optional[LogPmfTable] = None) -> float:
    """Pr(X < threshold) for X ~ Binomial(trials, success_p), summed in log space."""
    p = as_fraction(success_p)
    if not 0 <= p <= 1:
        raise ValueError(f"success probability {p} outside [0, 1]")
    top = min(_tail_index(threshold), trials)
    if top < 0:
        return 0.0
    if top >= trials:
        return 1.0
    if p == 0:
        return 1.0
    if p == 1:
        return 0.0
    if table is not None and table.size >= trials and as_fraction(1 - Fraction(1, table.q)) == p:
        ln_p, ln_1mp, lf = table.ln_p, table.ln_1mp, table.ln_fact
    else:
        ln_p, ln_1mp = math.log(p), math.log1p(-float(p))
        lf = _ln_factorials(trials)
    x = np.arange(top + 1)
    terms = lf[trials] - lf[x] - lf[trials - x] + x * ln_p + (trials - x) * ln_1mp
    hi = terms.max()
    return float(math.exp(hi) * np.exp(terms - hi).sum())


def binom_tail_lt_exact(trials: int, success_p, threshold) -> Fraction:
    """Exact rational Pr(X < threshold) for X ~ Binomial(trials, success_p)."""
    p = as_fraction(success_p)
    top = min(_tail_index(threshold), trials)
    if top < 0:
        return Fraction(0)
    total = Fraction(0)
    for x in range(top + 1):
        total += math.comb(trials, x) * p**x * (1 - p) ** (trials - x)
    return total
