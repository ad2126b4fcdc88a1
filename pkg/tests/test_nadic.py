from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bsgroups.nadic import (
    BaseMismatch,
    LeavesRing,
    NAdic,
    coprime_part,
    nadic_add,
    nadic_divides,
    nadic_from_fraction,
    nadic_make,
    nadic_mul_ratio,
    nadic_neg,
    prime_dim,
    quotient_order,
    solve_ratio_power,
)


def in_ring(q: Fraction, base: int, max_j: int = 64) -> bool:
    """q lies in Z[1/base] iff q * base**j is an integer for some j."""
    return any((q * base**j).denominator == 1 for j in range(max_j))


def coset_count(base: int, k: int, max_exp: int = 4) -> int:
    """Count cosets of k Z[1/B] met by num / B^e, |num| <= 8|k|, e <= max_exp."""
    values = {Fraction(num, base**e) for e in range(max_exp + 1) for num in range(-8 * abs(k), 8 * abs(k) + 1)}
    reps: list[Fraction] = []
    for v in sorted(values, key=lambda f: (abs(f), f)):
        if not any(in_ring((v - r) / k, base) for r in reps):
            reps.append(v)
    return len(reps)


@pytest.mark.parametrize(
    "base,num,exp,expected",
    [(2, 4, 1, (2, 0)), (4, 2, 1, (2, 1)), (6, 36, 3, (1, 1))],
)
def test_make_examples(base, num, exp, expected):
    x = nadic_make(base, num, exp)
    assert (x.num, x.exp) == expected
    assert x.to_fraction() == Fraction(num, base**exp)


def test_make_rejects_small_base():
    with pytest.raises(ValueError):
        nadic_make(1, 3, 0)
    with pytest.raises(ValueError):
        NAdic(2, 4, 1)


def test_add_examples():
    half = nadic_make(2, 1, 1)
    assert nadic_add(half, half) == nadic_make(2, 1)
    assert nadic_add(nadic_make(2, 3, 2), nadic_make(2, 1, 2)) == nadic_make(2, 1)
    sixth = nadic_make(6, 1, 1)
    s = nadic_add(sixth, sixth)
    assert (s.num, s.exp) == (2, 1)
    assert s.to_fraction() == Fraction(1, 3)


def test_add_base_mismatch():
    with pytest.raises(BaseMismatch):
        nadic_add(nadic_make(2, 1), nadic_make(3, 1))


def test_mul_ratio_examples():
    x = nadic_mul_ratio(nadic_make(6, 1), 2, 3)
    assert (x.num, x.exp) == (4, 1)
    assert nadic_mul_ratio(nadic_make(2, 3), 2, 1) == nadic_make(2, 6)
    with pytest.raises(LeavesRing):
        nadic_mul_ratio(nadic_make(2, 1), 1, 3)


def test_divides_examples():
    # 3/8 = 3 / 2^3 lies in Z[1/2]
    assert in_ring(Fraction(3, 8), 2)
    assert nadic_divides(8, nadic_make(2, 3))
    assert nadic_divides(8, nadic_make(2, 1, 1))
    assert nadic_divides(5, nadic_make(6, 10))
    assert not nadic_divides(3, nadic_make(2, 1))
    assert not nadic_divides(12, nadic_make(2, 1))


def test_quotient_order_examples():
    assert coset_count(2, 12) == 3
    assert quotient_order(2, 12) == 3
    assert coset_count(6, 35) == 35
    assert quotient_order(6, 35) == 35
    for n in (2, 3, 10):
        assert quotient_order(n, 1) == 1


def test_prime_dim_examples():
    assert prime_dim(2, 2) == 0
    assert prime_dim(2, 3) == 1
    assert prime_dim(6, 5) == 1
    with pytest.raises(ValueError):
        prime_dim(6, 4)


def brute_ratio_power(num, den, target, bound=40):
    hits = [t for t in range(-bound, bound + 1) if Fraction(num, den) ** t == target]
    return hits


def test_solve_ratio_power_examples():
    assert brute_ratio_power(6, 1, 6) == [1]
    assert solve_ratio_power(6, 1, 6) == 1
    assert brute_ratio_power(3, 2, 6) == []
    assert solve_ratio_power(3, 2, 6) is None
    assert brute_ratio_power(2, 1, 8) == [3]
    assert solve_ratio_power(2, 1, 8) == 3


@pytest.mark.parametrize("num,den", [(2, 3), (-2, 3), (3, -2), (4, 2), (-1, 1), (1, 1), (9, 1), (1, 6), (-5, 10)])
def test_solve_ratio_power_matches_scan(num, den):
    for target in [1, -1, 2, -2, 3, 6, 8, -8, 9, Fraction(1, 4), Fraction(4, 9), Fraction(-3, 2), Fraction(27, 8)]:
        hits = brute_ratio_power(num, den, target)
        got = solve_ratio_power(num, den, target)
        if hits:
            assert got in hits
            assert Fraction(num, den) ** got == target
        else:
            assert got is None


bases = st.integers(2, 12)


@st.composite
def same_base(draw, count=2):
    b = draw(bases)
    return [nadic_make(b, draw(st.integers(-10**6, 10**6)), draw(st.integers(0, 6))) for _ in range(count)] + [b]


@given(same_base(count=3))
def test_group_laws(data):
    x, y, z, b = data
    assert nadic_add(nadic_add(x, y), z) == nadic_add(x, nadic_add(y, z))
    assert nadic_add(x, y) == nadic_add(y, x)
    assert nadic_add(x, nadic_neg(x)) == NAdic(b, 0, 0)
    assert nadic_add(x, NAdic(b, 0, 0)) == x
    s = nadic_add(x, y)
    assert nadic_make(b, s.num, s.exp) == s
    assert s.to_fraction() == x.to_fraction() + y.to_fraction()


@given(bases, st.integers(-10**4, 10**4), st.integers(0, 5), st.integers(0, 5))
def test_canonical_uniqueness(b, num, e, shift):
    x = nadic_make(b, num, e)
    y = nadic_make(b, num * b**shift, e + shift)
    assert x == y
    assert (x.num, x.exp) == (y.num, y.exp)


@given(st.integers(-12, 12).filter(bool), st.integers(-12, 12).filter(bool), st.integers(-10**4, 10**4), st.integers(0, 4))
def test_ratio_closure(k, l, num, e):
    b = abs(k * l)
    if b < 2:
        return
    x = nadic_make(b, num, e)
    y = nadic_mul_ratio(x, k, l)
    assert y.to_fraction() == x.to_fraction() * Fraction(k, l)
    assert nadic_mul_ratio(y, l, k) == x


@given(bases, st.integers(-10**5, 10**5).filter(bool))
def test_quotient_order_times_smooth_part(b, k):
    q = quotient_order(b, k)
    smooth = abs(k) // q
    assert q * smooth == abs(k)
    assert coprime_part(smooth, b) == 1
    from math import gcd

    assert gcd(q, b) == 1


@given(bases, st.fractions(max_denominator=10**4))
def test_from_fraction(b, q):
    if in_ring(q, b):
        assert nadic_from_fraction(b, q).to_fraction() == q
    else:
        with pytest.raises(LeavesRing):
            nadic_from_fraction(b, q)


@given(st.integers(-30, 30).filter(bool), st.integers(-30, 30).filter(bool), st.integers(-(10**6), 10**6).filter(bool))
def test_solve_ratio_power_exact(num, den, target):
    t = solve_ratio_power(num, den, target)
    if t is not None:
        assert Fraction(num, den) ** t == target
