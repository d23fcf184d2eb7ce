"""Linear codes on the Gilbert-Varshamov bound by conditional expectations.

Messages y in F_q^k are indexed lexicographically with coordinate 0 least
significant, ``index(y) = sum(y[t] * q**t)``. Block ``j`` is the set of
messages whose last nonzero coordinate is ``j``; it occupies the index range
``[q**j, q**(j+1))``. When the construction fixes entry ``(i, j)`` of the
generator matrix, only messages in block ``j`` get their row-``i`` letter
decided, so each step touches exactly one block.

A codeword is *bad* when its weight is below ``delta * m``, i.e. below the
integer threshold ``T = ceil(delta * m)``. If a codeword has ``c`` nonzero
letters among its determined rows and ``N`` undetermined rows remain, its
conditional probability of being bad is ``Pr(c + B(N, 1 - 1/q) < T)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .field import FieldElement, PrimeField
from .params import CodeParams, LogPmfTable, as_fraction

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 1 << 24
_LOW_BLOCK = 4096


class BudgetExceeded(RuntimeError):
    """The requested enumeration is larger than the configured budget."""


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """An m x k generator matrix over F_q, stored as canonical integers.

    ``verified`` is True when the minimum distance was checked by
    enumeration, None when nobody checked (or it was too large to check).
    """

    entries: np.ndarray
    params: CodeParams
    verified: Optional[bool] = None

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)
        p = self.params
        if arr.shape != (p.m, p.k):
            raise ValueError(f"expected a {p.m}x{p.k} matrix, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= p.q):
            raise ValueError(f"entries must lie in [0, {p.q})")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __eq__(self, other):
        if not isinstance(other, GeneratorMatrix):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.params, self.entries.tobytes()))

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.params.q)

    def element(self, i: int, j: int) -> FieldElement:
        return self.field(int(self.entries[i, j]))


def message(index: int, q: int, k: int) -> np.ndarray:
    """The ``index``-th message of F_q^k in lexicographic order."""
    out = np.zeros(k, dtype=np.int64)
    for t in range(k):
        index, out[t] = divmod(index, q)
    return out


def message_index(y: Sequence[int], q: int) -> int:
    return sum(int(v) * q**t for t, v in enumerate(y))


def all_messages(q: int, k: int) -> np.ndarray:
    """Every message of F_q^k as a ``(q**k, k)`` array in index order."""
    idx = np.arange(q**k)
    return np.stack([(idx // q**t) % q for t in range(k)], axis=1)


def row_values(row: Sequence[int], q: int) -> np.ndarray:
    """Dot products ``row . y`` mod q for every message y, in index order.

    Built coordinate by coordinate: the values for block ``j`` are the values
    of the lower blocks shifted by ``a * row[j]``, which is the same
    incremental update the construction performs one step at a time.
    """
    vals = np.zeros(1, dtype=np.int64)
    for g in row:
        g = int(g)
        vals = np.concatenate([(vals + a * g) % q for a in range(q)])
    return vals


def random_code(params: CodeParams, seed: int = 0) -> GeneratorMatrix:
    """Uniform i.i.d. entries. No distance guarantee; verify and retry."""
    rng = np.random.default_rng(seed)
    return GeneratorMatrix(rng.integers(0, params.q, size=(params.m, params.k)), params)


def encode(g: GeneratorMatrix, y) -> np.ndarray:
    q, k = g.params.q, g.params.k
    if len(y) != k:
        raise ValueError(f"message has length {len(y)}, expected {k}")
    vals = []
    for v in y:
        if isinstance(v, FieldElement):
            if v.field.q != q:
                raise ValueError(f"message letter from GF({v.field.q}), code is over GF({q})")
            v = v.value
        vals.append(int(v) % q)
    return (g.entries @ np.array(vals, dtype=np.int64)) % q


def modular_gray_code(q: int, k: int) -> Iterator[int]:
    """Coordinates to bump (by +1 mod q) to walk all of F_q^k from zero.

    Step ``s`` increments coordinate ``v_q(s)``, the q-adic valuation of the
    step counter, so consecutive vectors differ in exactly one coordinate.
    Yields ``q**k - 1`` coordinates.
    """
    for s in range(1, q**k):
        t = 0
        while s % q == 0:
            s //= q
            t += 1
        yield t


def _weight_chunks(g: GeneratorMatrix, budget: int) -> Iterator[np.ndarray]:
    """Yield codeword weights of every message, the zero message first.

    The lowest ``b`` coordinates are handled as a precomputed table of
    codewords; the remaining ones are walked in Gray-code order, each step
    adding one generator column to the running base codeword.
    """
    q, m, k = g.params.q, g.params.m, g.params.k
    if q**k > budget:
        raise BudgetExceeded(f"q^k = {q**k} messages exceeds the enumeration budget {budget}")
    b = 1
    while b < k and q ** (b + 1) <= _LOW_BLOCK:
        b += 1
    low = np.stack([row_values(g.entries[i, :b], q) for i in range(m)], axis=1)
    base = np.zeros(m, dtype=np.int64)
    yield np.count_nonzero(low, axis=1)
    for t in modular_gray_code(q, k - b):
        base = (base + g.entries[:, b + t]) % q
        yield np.count_nonzero((low + base) % q, axis=1)


def verify_distance(g: GeneratorMatrix, budget: int = DEFAULT_BUDGET) -> int:
    """Minimum weight over the nonzero codewords, i.e. the minimum distance.

    Raises BudgetExceeded rather than returning an unchecked value.
    """
    best = g.params.m
    for n, w in enumerate(_weight_chunks(g, budget)):
        if n == 0:
            w = w[1:]
        if w.size:
            best = min(best, int(w.min()))
    return best


def goal(g: GeneratorMatrix, budget: int = DEFAULT_BUDGET) -> int:
    """Number of nonzero messages whose codeword weight is below delta * m."""
    threshold = g.params.threshold
    bad = 0
    for n, w in enumerate(_weight_chunks(g, budget)):
        if n == 0:
            w = w[1:]
        bad += int(np.count_nonzero(w < threshold))
    return bad


def dif(i: int, c: int, params: CodeParams, table: Optional[LogPmfTable] = None) -> float:
    """Increase in a codeword's bad-event probability if row ``i`` vanishes.

    ``i`` is the 1-based index of the row being filled (``m - i`` rows stay
    free afterwards) and ``c`` the count of nonzero letters in rows before
    it. The difference of the two conditional tails collapses to a single
    binomial pmf term at ``T - 1 - c``.
    """
    rest = params.m - i
    x = params.threshold - 1 - c
    if x < 0 or x > rest:
        return 0.0
    if table is None:
        table = LogPmfTable(params.m, params.q)
    return float(math.exp(table.ln_pmf(rest, x)))


def dif_exact(i: int, c: int, params: CodeParams) -> Fraction:
    rest = params.m - i
    x = params.threshold - 1 - c
    if x < 0 or x > rest:
        return Fraction(0)
    q = params.q
    return Fraction(math.comb(rest, x) * (q - 1) ** x, q**rest)


def _tail_numerator(rest: int, top: int, q: int) -> int:
    # q**rest * Pr(B(rest, 1 - 1/q) <= top)
    if top < 0:
        return 0
    return sum(math.comb(rest, x) * (q - 1) ** x for x in range(min(top, rest) + 1))


class Construction:
    """Mutable state of the derandomized construction.

    The entry about to be chosen is ``(row, col)`` (0-based). ``vanish[l]``
    counts the determined rows at which codeword ``l`` is zero: rows
    ``0..row`` for messages in blocks below ``col``, rows ``0..row-1``
    otherwise. Index 0 (the zero message) is never read.
    """

    def __init__(self, params: CodeParams, mode: str = "fast"):
        if mode not in ("fast", "exact"):
            raise ValueError(f"unknown mode {mode!r}")
        self.params = params
        self.mode = mode
        q, m, k = params.q, params.m, params.k
        self.entries = np.full((m, k), -1, dtype=np.int64)
        self.vanish = np.zeros(q**k, dtype=np.int64)
        self.row = 0
        self.col = 0
        # row-`row` letters of the messages below the current block
        self.row_vals = np.zeros(q**k, dtype=np.int64)
        self._inv = PrimeField(q).inverse_table
        self._table = LogPmfTable(m, q)
        self._last_coord = None

    @property
    def done(self) -> bool:
        return self.row >= self.params.m

    @property
    def step(self) -> tuple:
        return (self.row, self.col)

    def _block(self):
        q, j = self.params.q, self.col
        lo = q**j
        a = np.arange(1, q)
        s = self.row_vals[:lo]
        # letter v that makes the row vanish: a * v + s = 0
        vanishing = ((-self._inv[a])[:, None] * s[None, :]) % q
        return lo, a, s, vanishing.ravel()

    def _counts(self, vanishing: np.ndarray, lo: int):
        """counts[v, c]: block messages with vanishing letter v and c nonzeros so far."""
        q, i = self.params.q, self.row
        nonzero = i - self.vanish[lo : lo * q]
        counts = np.bincount(vanishing * (i + 1) + nonzero, minlength=q * (i + 1))
        return counts.reshape(q, i + 1)

    def _window(self):
        """Nonzero counts c for which the vanish/not-vanish choice matters."""
        rest = self.params.m - self.row - 1
        top = self.params.threshold - 1
        return max(0, top - rest), min(top, self.row)

    def weights(self, mode: Optional[str] = None):
        """The W array for the current step: ``-sum Dif`` per candidate letter.

        Picking the argmax minimizes the conditional expectation of the
        number of bad codewords. Fast mode returns floats scaled by a common
        positive factor; exact mode returns Fractions.
        """
        mode = mode or self.mode
        w = self._weights(mode)
        if mode == "exact":
            den = self.params.q ** (self.params.m - self.row - 1)
            return [Fraction(x, den) for x in w]
        return w

    def _weights(self, mode: str):
        q = self.params.q
        lo, _, _, vanishing = self._block()
        c_lo, c_hi = self._window()
        if c_lo > c_hi:
            return np.zeros(q) if mode == "fast" else [0] * q
        counts = self._counts(vanishing, lo)[:, c_lo : c_hi + 1]
        rest = self.params.m - self.row - 1
        xs = self.params.threshold - 1 - np.arange(c_lo, c_hi + 1)
        if mode == "fast":
            ln_d = self._table.ln_pmf(rest, xs)
            d = np.exp(ln_d - ln_d.max())
            return -(counts @ d)
        used = np.flatnonzero(counts.any(axis=0))
        d = [math.comb(rest, int(xs[c])) * (q - 1) ** int(xs[c]) for c in used]
        sub = counts[:, used].tolist()
        return [-sum(n * dc for n, dc in zip(sub[v], d) if n) for v in range(q)]

    def advance(self) -> int:
        """Fix the current entry to the argmax of W (ties -> smallest letter)."""
        if self.done:
            raise RuntimeError("construction already finished")
        q = self.params.q
        w = self._weights(self.mode)
        if self.mode == "fast":
            letter = int(np.argmax(w))
        else:
            best = max(w)
            letter = w.index(best)
        lo, a, s, _ = self._block()
        vals = ((s[None, :] + a[:, None] * letter) % q).ravel()
        self.row_vals[lo : lo * q] = vals
        self.vanish[lo : lo * q] += vals == 0
        self.entries[self.row, self.col] = letter
        self.col += 1
        if self.col == self.params.k:
            self.col = 0
            self.row += 1
        return letter

    def last_coordinate(self) -> np.ndarray:
        """Block number of every message index (entry 0 is -1)."""
        if self._last_coord is None:
            q, k = self.params.q, self.params.k
            out = np.full(q**k, -1, dtype=np.int64)
            for j in range(k):
                out[q**j : q ** (j + 1)] = j
            self._last_coord = out
        return self._last_coord

    def determined_rows(self) -> np.ndarray:
        last = self.last_coordinate()
        return np.where(last < self.col, self.row + 1, self.row)

    def expected_goal(self, budget: int = DEFAULT_BUDGET) -> Fraction:
        """Exact E(goal | fixed entries): sum of conditional bad probabilities."""
        q, m = self.params.q, self.params.m
        if q**self.params.k > budget:
            raise BudgetExceeded("expected_goal needs one pass over all messages")
        top = self.params.threshold - 1
        d = self.determined_rows()[1:]
        c = d - self.vanish[1:]
        keys, counts = np.unique(d * (m + 1) + c, return_counts=True)
        total = Fraction(0)
        for key, cnt in zip(keys.tolist(), counts.tolist()):
            rows, nz = divmod(key, m + 1)
            rest = m - rows
            total += Fraction(cnt * _tail_numerator(rest, top - nz, q), q**rest)
        return total

    def matrix(self) -> GeneratorMatrix:
        if not self.done:
            raise RuntimeError("construction not finished")
        return GeneratorMatrix(self.entries, self.params)


def derandomized_construct(
    params: CodeParams,
    mode: str = "fast",
    verify: bool = True,
    budget: int = DEFAULT_BUDGET,
) -> GeneratorMatrix:
    """Deterministically build an [m, k, delta*m]_q generator matrix.

    Requires ``k <= (1 - H_q(delta)) m``. Each entry, row by row, takes the
    letter minimizing the conditional expected number of bad codewords;
    since that expectation starts below 1 and never increases, the final
    matrix has no bad codeword.

    When ``verify`` is set and q^k is within ``budget`` the minimum distance
    is checked by enumeration; a fast-mode result that fails is rebuilt in
    exact mode. Results above the budget come back with ``verified=None``.
    """
    if not params.meets_gv:
        raise ValueError(f"parameters {params} violate k <= (1 - H_q(delta)) m")
    state = Construction(params, mode)
    while not state.done:
        state.advance()
    g = state.matrix()
    if not verify:
        return g
    if params.size > budget:
        log.info("q^k=%d above budget %d; returning unverified code", params.size, budget)
        return g
    if verify_distance(g, budget) >= params.threshold:
        return GeneratorMatrix(g.entries, params, verified=True)
    if mode == "exact":
        raise RuntimeError(f"exact construction produced a bad codeword for {params}")
    log.warning("fast construction for %s failed verification; rerunning in exact mode", params)
    return derandomized_construct(params, "exact", verify=True, budget=budget)


def reed_solomon(q: int, k: int, points: Optional[Sequence[int]] = None, delta=None) -> GeneratorMatrix:
    """Generator of the Reed-Solomon code evaluating degree < k polynomials.

    Row p is ``(1, a_p, a_p^2, ..., a_p^(k-1))`` for evaluation point a_p
    (all of F_q by default), so the distance is ``m - k + 1``.
    """
    points = list(range(q)) if points is None else [int(a) % q for a in points]
    m = len(points)
    if delta is None:
        delta = Fraction(m - k + 1, m)
    rows = [[pow(a, e, q) for e in range(k)] for a in points]
    return GeneratorMatrix(np.array(rows), CodeParams(q=q, m=m, k=k, delta=as_fraction(delta)))
