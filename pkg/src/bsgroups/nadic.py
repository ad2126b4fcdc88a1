"""Exact arithmetic in the additive group Z[1/B] of B-adic rationals.

A value is stored as ``num / base**exp`` in minimal-exponent form, so two
values with the same base are equal iff their fields are equal.  Z[1/n] and
Z[1/|n|] coincide as sets; callers pass ``base = |n|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from sympy import factorint, isprime


class BaseMismatch(ValueError):
    pass


class LeavesRing(ValueError):
    """Raised when a result is not an element of Z[1/B]."""


@dataclass(frozen=True, slots=True)
class NAdic:
    base: int
    num: int
    exp: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.exp < 0:
            raise ValueError("exponent must be non-negative")
        if self.exp and self.num % self.base == 0:
            raise ValueError("non-canonical NAdic; use nadic_make")

    def __add__(self, other: NAdic) -> NAdic:
        return nadic_add(self, other)

    def __neg__(self) -> NAdic:
        return nadic_neg(self)

    def __sub__(self, other: NAdic) -> NAdic:
        return nadic_add(self, nadic_neg(other))

    def __bool__(self) -> bool:
        return self.num != 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.base**self.exp)

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{self.base}^{self.exp}"


def nadic_make(base: int, num: int, exp: int = 0) -> NAdic:
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    if num == 0:
        return NAdic(base, 0, 0)
    while exp > 0 and num % base == 0:
        num //= base
        exp -= 1
    return NAdic(base, num, exp)


def nadic_zero(base: int) -> NAdic:
    return NAdic(base, 0, 0)


def nadic_add(x: NAdic, y: NAdic) -> NAdic:
    if x.base != y.base:
        raise BaseMismatch(f"bases differ: {x.base} vs {y.base}")
    b = x.base
    if x.exp >= y.exp:
        return nadic_make(b, x.num + y.num * b ** (x.exp - y.exp), x.exp)
    return nadic_make(b, x.num * b ** (y.exp - x.exp) + y.num, y.exp)


def nadic_neg(x: NAdic) -> NAdic:
    return NAdic(x.base, -x.num, x.exp)


def coprime_part(k: int, base: int) -> int:
    """Largest positive divisor of |k| coprime to ``base``."""
    k = abs(k)
    g = gcd(k, base)
    while g > 1:
        k //= g
        g = gcd(k, base)
    return k


@lru_cache(maxsize=4096)
def _smooth_exponent(base: int, s: int) -> int:
    # least j with s | base**j; s must be base-smooth
    j, p = 0, 1
    while p % s:
        p *= base
        j += 1
    return j


def nadic_from_fraction(base: int, value: Fraction | int) -> NAdic:
    """Return ``value`` as an element of Z[1/base], or raise LeavesRing."""
    value = Fraction(value)
    p, q = value.numerator, value.denominator
    c = coprime_part(q, base)
    if c != 1:
        raise LeavesRing(f"{value} is not in Z[1/{base}]")
    j = _smooth_exponent(base, q)
    return nadic_make(base, p * (base**j // q), j)


def nadic_mul_ratio(x: NAdic, k: int, l: int) -> NAdic:
    """Exact product ``x * k / l``."""
    if k == 0 or l == 0:
        raise ValueError("ratio terms must be nonzero")
    if l < 0:
        k, l = -k, -l
    b = x.base
    num = x.num * k
    c = coprime_part(l, b)
    if c != 1:
        if num % c:
            raise LeavesRing(f"multiplication by {k}/{l} leaves Z[1/{b}]")
        num //= c
        l //= c
    j = _smooth_exponent(b, l)
    return nadic_make(b, num * (b**j // l), x.exp + j)


def nadic_divides(k: int, x: NAdic) -> bool:
    """True iff x / k lies in Z[1/B]."""
    if k == 0:
        raise ValueError("k must be nonzero")
    return x.num % coprime_part(k, x.base) == 0


def quotient_order(base: int, k: int) -> int:
    """Order of the finite group Z[1/B] / k Z[1/B]."""
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if k == 0:
        raise ValueError("k must be nonzero")
    return coprime_part(k, base)


def prime_dim(base: int, p: int) -> int:
    """Dimension of Z[1/B] / p Z[1/B] over the field with p elements."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    return 0 if base % p == 0 else 1


def valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def solve_ratio_power(num: int, den: int, target: Fraction | int) -> int | None:
    """Integer t with (num/den)**t == target, or None.

    ``target`` may be a rational; when |num/den| == 1 and both 0 and 1 are
    solutions, 0 is returned.
    """
    if num == 0 or den == 0 or target == 0:
        raise ValueError("arguments must be nonzero")
    ratio = Fraction(num, den)
    target = Fraction(target)
    primes = set()
    for v in (ratio.numerator, ratio.denominator, target.numerator, target.denominator):
        primes.update(factorint(abs(v)))

    t = None
    for p in sorted(primes):
        d = _fraction_valuation(ratio, p)
        v = _fraction_valuation(target, p)
        if d == 0:
            if v != 0:
                return None
            continue
        if v % d:
            return None
        if t is None:
            t = v // d
        elif t != v // d:
            return None

    if t is None:
        # |ratio| == |target| == 1
        if target == 1:
            return 0
        return 1 if ratio == -1 else None
    return t if ratio**t == target else None


def _fraction_valuation(x: Fraction, p: int) -> int:
    v = 0
    if x.numerator % p == 0:
        v += valuation(x.numerator, p)
    if x.denominator % p == 0:
        v -= valuation(x.denominator, p)
    return v


def prime_support(base: int) -> frozenset[int]:
    return frozenset(factorint(base))
