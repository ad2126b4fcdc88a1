"""The affine model M(k, l) = Z[1/|kl|] x| Z.

Elements are pairs (u, t) with product

    (u1, t1) * (u2, t2) = (u1 + rho^-t1 * u2, t1 + t2),   rho = l / k,

so that a -> (0, 1), b -> (1, 0) satisfies a^-1 b^k a = b^l.  M(1, n) is
BS(1, n); for coprime |k|, |l| >= 2 it is the metabelian group G_{k,l}.
Conjugating a fibre element by anything with Z-coordinate s scales it by
rho^s.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .nadic import (
    LeavesRing,
    NAdic,
    nadic_add,
    nadic_divides,
    nadic_from_fraction,
    nadic_make,
    nadic_mul_ratio,
    nadic_neg,
    solve_ratio_power,
)
from .words import Word


@dataclass(frozen=True, slots=True)
class ModelParams:
    k: int
    l: int

    def __post_init__(self):
        if self.k == 0 or self.l == 0:
            raise ValueError("M(k, l) needs k, l != 0")
        if abs(self.k * self.l) < 2:
            raise ValueError("|kl| = 1 is the abelian/Klein case, not modelled here")
        if abs(self.k) == abs(self.l):
            # rho = +-1: fibre elements would have non-cyclic centralizers
            raise ValueError("M(k, l) needs |k| != |l|")

    @property
    def base(self) -> int:
        return abs(self.k * self.l)

    @property
    def rho(self) -> Fraction:
        return Fraction(self.l, self.k)

    def is_gkl(self) -> bool:
        """True when these parameters describe G_{k,l} rather than BS(1, n)."""
        return abs(self.k) >= 2 and abs(self.l) >= 2 and gcd(self.k, self.l) == 1

    def __str__(self) -> str:
        return f"M({self.k},{self.l})"


@dataclass(frozen=True, slots=True)
class ModelElement:
    params: ModelParams
    u: NAdic
    t: int

    def __post_init__(self):
        if self.u.base != self.params.base:
            raise ValueError("fibre coordinate has the wrong base")

    def __mul__(self, other: ModelElement) -> ModelElement:
        return m_mul(self, other)

    def __str__(self) -> str:
        return f"({self.u}, {self.t})"

    def to_json(self) -> dict:
        return {
            "k": self.params.k,
            "l": self.params.l,
            "u_num": self.u.num,
            "u_exp": self.u.exp,
            "t": self.t,
        }

    @classmethod
    def from_json(cls, data: dict) -> ModelElement:
        p = ModelParams(data["k"], data["l"])
        return cls(p, nadic_make(p.base, data["u_num"], data["u_exp"]), data["t"])


def element(p: ModelParams, u: Fraction | int, t: int = 0) -> ModelElement:
    return ModelElement(p, nadic_from_fraction(p.base, u), t)


def identity(p: ModelParams) -> ModelElement:
    return ModelElement(p, NAdic(p.base, 0, 0), 0)


def gen_a(p: ModelParams) -> ModelElement:
    return ModelElement(p, NAdic(p.base, 0, 0), 1)


def gen_b(p: ModelParams) -> ModelElement:
    return ModelElement(p, NAdic(p.base, 1, 0), 0)


def scale(u: NAdic, p: ModelParams, s: int) -> NAdic:
    """rho**s * u."""
    if s == 0 or not u:
        return u
    if s > 0:
        return nadic_mul_ratio(u, p.l**s, p.k**s)
    return nadic_mul_ratio(u, p.k ** (-s), p.l ** (-s))


def _same(x: ModelElement, y: ModelElement) -> ModelParams:
    if x.params != y.params:
        raise ValueError(f"parameter mismatch: {x.params} vs {y.params}")
    return x.params


def m_mul(x: ModelElement, y: ModelElement) -> ModelElement:
    p = _same(x, y)
    return ModelElement(p, nadic_add(x.u, scale(y.u, p, -x.t)), x.t + y.t)


def m_inv(x: ModelElement) -> ModelElement:
    return ModelElement(x.params, nadic_neg(scale(x.u, x.params, x.t)), -x.t)


def m_pow(x: ModelElement, e: int) -> ModelElement:
    if e < 0:
        x, e = m_inv(x), -e
    result = identity(x.params)
    while e:
        if e & 1:
            result = m_mul(result, x)
        x = m_mul(x, x)
        e >>= 1
    return result


def eval_word(w: Word, p: ModelParams) -> ModelElement:
    """Image of w under a -> (0, 1), b -> (1, 0)."""
    x = identity(p)
    for gen, e in w.syllables:
        if gen == "a":
            x = ModelElement(p, x.u, x.t + e)
        else:
            x = m_mul(x, ModelElement(p, nadic_make(p.base, e), 0))
    return x


def conj_scale(x: ModelElement, by_t: int) -> ModelElement:
    """y^-1 x y for any y whose Z-coordinate is ``by_t``; x must lie in the fibre."""
    if x.t != 0:
        raise ValueError("conj_scale needs a fibre element (t = 0)")
    return ModelElement(x.params, scale(x.u, x.params, by_t), 0)


class Centralizer(enum.Enum):
    WHOLE_GROUP = "WholeGroup"
    FIBRE_A = "FibreA"
    CYCLIC = "Cyclic"


def centralizer_class(x: ModelElement) -> Centralizer:
    if x.t != 0:
        return Centralizer.CYCLIC
    if x.u:
        return Centralizer.FIBRE_A
    return Centralizer.WHOLE_GROUP


def fibre_divisible(p: ModelParams, n: int) -> bool:
    """Whether the fibre Z[1/|kl|] is n-divisible."""
    return nadic_divides(n, NAdic(p.base, 1, 0))


def decide_psi(x: ModelElement, n: int) -> bool:
    """Truth value of Psi_n(x) in M(k, l): x is a nontrivial fibre element and the fibre is n-divisible."""
    if n == 0:
        raise ValueError("n must be nonzero")
    return centralizer_class(x) is Centralizer.FIBRE_A and fibre_divisible(x.params, n)


def nth_root(x: ModelElement, r: int) -> ModelElement | None:
    """Some z with z**r == x, or None."""
    if r < 1:
        raise ValueError("r must be positive")
    if x.t % r:
        return None
    p = x.params
    s = x.t // r
    step = p.rho ** (-s)
    total = sum(step**j for j in range(r))
    u = x.u.to_fraction()
    if total == 0:
        return identity(p) if u == 0 else None
    try:
        w = nadic_from_fraction(p.base, u / total)
    except LeavesRing:
        return None
    return ModelElement(p, w, s)


def decide_phi(p: ModelParams, n: int) -> bool:
    """Truth value of Phi_n in M(k, l).

    Phi_n asks that every Psi_n-element x admit y with x^y = x^n.  Conjugation
    multiplies the fibre by rho**t, so this holds iff rho**t == n for some t.
    If the fibre is not n-divisible the Psi_n truth set is empty and Phi_n
    holds vacuously.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    if not fibre_divisible(p, n):
        return True
    return phi_exponent(p, n) is not None


def phi_exponent(p: ModelParams, n: int) -> int | None:
    """The t with rho**t == n, if any."""
    return solve_ratio_power(p.l, p.k, n)
