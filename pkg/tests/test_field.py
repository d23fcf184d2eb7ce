import itertools

import pytest

from gtscheme.field import PrimeField, add, inv, is_prime, mul, smallest_prime_in

SMALL_PRIMES = [p for p in range(2, 32) if is_prime(p)]


@pytest.mark.parametrize("q,a,b,expected", [(5, 2, 4, 1), (2, 1, 1, 0), (7, 0, 3, 3)])
def test_add(q, a, b, expected):
    F = PrimeField(q)
    assert add(F(a), F(b)) == F(expected)


@pytest.mark.parametrize("q,a,b,expected", [(5, 3, 4, 2), (3, 2, 2, 1), (11, 1, 7, 7)])
def test_mul(q, a, b, expected):
    F = PrimeField(q)
    assert mul(F(a), F(b)) == F(expected)


@pytest.mark.parametrize("q,a,expected", [(5, 2, 3), (7, 1, 1), (3, 2, 2)])
def test_inv(q, a, expected):
    F = PrimeField(q)
    assert inv(F(a)) == F(expected)


def test_inv_zero_is_domain_error():
    with pytest.raises(ZeroDivisionError):
        inv(PrimeField(7)(0))


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        add(PrimeField(5)(1), PrimeField(7)(1))
    with pytest.raises(ValueError):
        PrimeField(5)(2) * PrimeField(3)(2)


def test_non_prime_modulus_rejected():
    with pytest.raises(ValueError):
        PrimeField(9)
    with pytest.raises(ValueError):
        PrimeField(1)


def test_elements_are_canonical():
    F = PrimeField(7)
    assert F(-1).value == 6
    assert F(15).value == 1
    with pytest.raises(ValueError):
        type(F(0))(7, F)


def test_operators_match_functions():
    F = PrimeField(13)
    a, b = F(5), F(9)
    assert a + b == add(a, b)
    assert a * b == mul(a, b)
    assert (a - b) + b == a
    assert (a / b) * b == a
    assert -a + a == F.zero
    assert 3 * a == a + a + a


@pytest.mark.parametrize("q", SMALL_PRIMES)
def test_field_axioms_exhaustive(q):
    F = PrimeField(q)
    els = F.elements()
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
    for a in els[1:]:
        assert a * a.inverse() == F.one


def test_inverse_table_matches_euclid():
    F = PrimeField(101)
    table = F.inverse_table
    for a in range(1, 101):
        assert (a * int(table[a])) % 101 == 1


@pytest.mark.parametrize("lo,hi,expected", [(4, 8, 5), (2, 4, 2), (6, 12, 7), (24, 29, None)])
def test_smallest_prime_in(lo, hi, expected):
    if expected is None:
        with pytest.raises(LookupError):
            smallest_prime_in(lo, hi)
    else:
        assert smallest_prime_in(lo, hi) == expected


def test_bertrand_interval_always_has_a_prime():
    for r in range(1, 10_001):
        p = smallest_prime_in(2 * r, 4 * r)
        assert 2 * r <= p < 4 * r
