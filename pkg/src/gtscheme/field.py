"""Prime-field arithmetic and prime search."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

_INV_TABLE_LIMIT = 1 << 16
_MAX_MODULUS = 1 << 31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def smallest_prime_in(lo: int, hi: int) -> int:
    """Return the smallest prime p with ``lo <= p < hi``.

    Raises LookupError when the interval holds no prime; callers should widen
    it. For ``hi >= 2 * lo`` Bertrand's postulate makes this impossible.
    """
    if lo < 2 or hi <= lo:
        raise ValueError(f"need 2 <= lo < hi, got lo={lo} hi={hi}")
    for p in range(lo, hi):
        if is_prime(p):
            return p
    raise LookupError(f"no prime in [{lo}, {hi})")


def _egcd_inverse(a: int, q: int) -> int:
    r0, r1 = q, a % q
    s0, s1 = 0, 1
    while r1:
        quot = r0 // r1
        r0, r1 = r1, r0 - quot * r1
        s0, s1 = s1, s0 - quot * s1
    if r0 != 1:
        raise ZeroDivisionError(f"{a} has no inverse mod {q}")
    return s0 % q


@dataclass(frozen=True)
class PrimeField:
    """The field F_q of integers modulo a prime q."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or isinstance(self.q, bool):
            raise TypeError("field modulus must be an integer")
        object.__setattr__(self, "q", int(self.q))
        if self.q >= _MAX_MODULUS:
            raise ValueError(f"modulus {self.q} exceeds 2^31")
        if not is_prime(self.q):
            raise ValueError(f"{self.q} is not prime")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.q, self)

    @property
    def zero(self) -> "FieldElement":
        return self(0)

    @property
    def one(self) -> "FieldElement":
        return self(1)

    def elements(self):
        return [self(v) for v in range(self.q)]

    @cached_property
    def inverse_table(self) -> np.ndarray:
        """``table[a]`` is the inverse of a (entry 0 is unused and left 0)."""
        if self.q > _INV_TABLE_LIMIT:
            raise ValueError("inverse table only built for q <= 2^16")
        table = np.zeros(self.q, dtype=np.int64)
        for a in range(1, self.q):
            if table[a] == 0:
                b = _egcd_inverse(a, self.q)
                table[a] = b
                table[b] = a
        return table

    def inv_value(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        if self.q <= _INV_TABLE_LIMIT:
            return int(self.inverse_table[a])
        return _egcd_inverse(a, self.q)

    def _check(self, a: "FieldElement", b: "FieldElement"):
        if a.field != self or b.field != self:
            raise ValueError(
                f"operands from different fields: GF({a.field.q}) and GF({b.field.q})"
            )

    def add(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._check(a, b)
        return FieldElement((a.value + b.value) % self.q, self)

    def sub(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._check(a, b)
        return FieldElement((a.value - b.value) % self.q, self)

    def mul(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._check(a, b)
        return FieldElement((a.value * b.value) % self.q, self)

    def neg(self, a: "FieldElement") -> "FieldElement":
        return FieldElement((-a.value) % self.q, self)

    def inv(self, a: "FieldElement") -> "FieldElement":
        if a.field != self:
            raise ValueError("operand from a different field")
        return FieldElement(self.inv_value(a.value), self)

    def __repr__(self):
        return f"GF({self.q})"


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not a canonical element of {self.field!r}")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, np.integer)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.field.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.field.sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.field.sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.field.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.field.mul(self, self.field.inv(other))

    def __neg__(self):
        return self.field.neg(self)

    def inverse(self) -> "FieldElement":
        return self.field.inv(self)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.q})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a.field.add(a, b)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a.field.mul(a, b)


def inv(a: FieldElement) -> FieldElement:
    return a.field.inv(a)
