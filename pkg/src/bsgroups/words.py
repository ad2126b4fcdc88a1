"""Words over {a, b} and the word problem in BS(m, n) = <a, b | a^-1 b^m a = b^n>.

Reduction removes pinches (a^-1 b^(mi) a -> b^(ni), a b^(ni) a^-1 -> b^(mi))
with a single left-to-right stack pass.  Normal forms then push b-exponents
rightwards so that every b-power sitting before an ``a`` is a residue mod |m|
and every one before an ``a^-1`` is a residue mod |n|.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .nadic import solve_ratio_power

DEFAULT_RADIUS_CAP = int(os.environ.get("BSGROUPS_MAX_RADIUS", "10"))
DEFAULT_ORBIT_CAP = 64


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class BSParams:
    m: int
    n: int

    def __post_init__(self):
        if self.m == 0 or self.n == 0:
            raise ValueError("BS(m, n) needs m, n != 0")

    def __str__(self) -> str:
        return f"BS({self.m},{self.n})"

    @property
    def solvable(self) -> bool:
        return abs(self.m) == 1 or abs(self.n) == 1


Syllable = tuple[str, int]


@dataclass(frozen=True, slots=True)
class Word:
    """Freely reduced word stored as syllables ``(generator, exponent)``."""

    syllables: tuple[Syllable, ...] = ()

    def __post_init__(self):
        prev = None
        for gen, e in self.syllables:
            if gen not in ("a", "b") or e == 0 or gen == prev:
                raise ValueError(f"not a freely reduced syllable sequence: {self.syllables}")
            prev = gen

    @classmethod
    def from_syllables(cls, syllables: Iterable[Syllable]) -> Word:
        out: list[list] = []
        for gen, e in syllables:
            if e == 0:
                continue
            if out and out[-1][0] == gen:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append([gen, e])
        return cls(tuple((g, e) for g, e in out))

    def __mul__(self, other: Word) -> Word:
        return word_mul(self, other)

    def __invert__(self) -> Word:
        return word_inv(self)

    def __len__(self) -> int:
        return len(self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __str__(self) -> str:
        return render_word(self)

    def letter_length(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def a_syllables(self) -> int:
        return sum(1 for g, _ in self.syllables if g == "a")

    def sort_key(self):
        return (self.letter_length(), len(self.syllables), self.syllables)


IDENTITY = Word()
A = Word((("a", 1),))
B = Word((("b", 1),))


def a_pow(e: int) -> Word:
    return Word.from_syllables([("a", e)])


def b_pow(e: int) -> Word:
    return Word.from_syllables([("b", e)])


_TOKEN = re.compile(r"\s*(?:([aAbB])(?:\s*\^\s*([+-]?\d+))?|(1|e)(?![\w^]))")


def parse_word(text: str) -> Word:
    """Parse compact (``A b b a``, uppercase = inverse) or caret (``a^-1 b^3 a``) text."""
    pos = 0
    syllables = []
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise WordSyntaxError(f"unexpected character {text[at]!r}", at)
        letter, exp, unit = match.groups()
        if letter is not None:
            e = int(exp) if exp is not None else 1
            if letter.isupper():
                e = -e
            syllables.append((letter.lower(), e))
        pos = match.end()
    return Word.from_syllables(syllables)


def render_word(w: Word, compact: bool = False) -> str:
    if compact:
        parts = []
        for gen, e in w.syllables:
            letter = gen if e > 0 else gen.upper()
            parts.append(" ".join([letter] * abs(e)))
        return " ".join(parts)
    return " ".join(gen if e == 1 else f"{gen}^{e}" for gen, e in w.syllables)


def word_mul(w1: Word, w2: Word) -> Word:
    return Word.from_syllables(w1.syllables + w2.syllables)


def word_inv(w: Word) -> Word:
    return Word(tuple((g, -e) for g, e in reversed(w.syllables)))


def word_pow(w: Word, e: int) -> Word:
    if e < 0:
        w, e = word_inv(w), -e
    return Word.from_syllables(w.syllables * e)


def relator(g: BSParams) -> Word:
    """a^-1 b^m a b^-n, trivial in BS(m, n)."""
    return Word.from_syllables([("a", -1), ("b", g.m), ("a", 1), ("b", -g.n)])


def britton_reduce(w: Word, g: BSParams) -> Word:
    m, n = g.m, g.n
    stack: list[list] = []

    def push_b(p: int) -> None:
        if stack and stack[-1][0] == "b":
            stack[-1][1] += p
            if stack[-1][1] == 0:
                stack.pop()
        elif p:
            stack.append(["b", p])

    for gen, e in w.syllables:
        if gen == "b":
            push_b(e)
            continue
        step = 1 if e > 0 else -1
        while e:
            if stack and stack[-1][0] == "b":
                p = stack[-1][1]
                below = stack[-2] if len(stack) > 1 else None
            else:
                p = 0
                below = stack[-1] if stack else None
            if below is not None and (below[1] > 0) != (step > 0):
                s = below[1]
                if s < 0 and p % m == 0:
                    new_p = p // m * n
                elif s > 0 and p % n == 0:
                    new_p = p // n * m
                else:
                    new_p = None
                if new_p is not None:
                    if p:
                        stack.pop()
                    below[1] += step
                    if below[1] == 0:
                        stack.pop()
                    push_b(new_p)
                    e -= step
                    continue
            if not p and stack and stack[-1][0] == "a":
                stack[-1][1] += e
            else:
                stack.append(["a", e])
            break
    return Word(tuple((gen, e) for gen, e in stack))


def has_pinch(w: Word, g: BSParams) -> bool:
    syl = w.syllables
    for i, (gen, e) in enumerate(syl):
        if gen != "a":
            continue
        # a-syllable followed directly by an opposite a-letter cannot occur in a free word,
        # so a pinch always has a b-syllable in between
        if i + 2 < len(syl) and syl[i + 1][0] == "b":
            p = syl[i + 1][1]
            nxt = syl[i + 2][1]
            if e < 0 < nxt and p % g.m == 0:
                return True
            if e > 0 > nxt and p % g.n == 0:
                return True
    return False


def words_equal(w1: Word, w2: Word, g: BSParams) -> bool:
    return not britton_reduce(word_mul(w1, word_inv(w2)), g)


def canonical_form(w: Word, g: BSParams) -> Word:
    reduced = britton_reduce(w, g)
    abs_m, abs_n = abs(g.m), abs(g.n)
    sm = 1 if g.m > 0 else -1
    sn = 1 if g.n > 0 else -1
    out: list[Syllable] = []
    carry = 0
    for gen, e in reduced.syllables:
        if gen == "b":
            carry += e
            continue
        step = 1 if e > 0 else -1
        for _ in range(abs(e)):
            if step > 0:
                q, r = divmod(carry, abs_m)
                carry = q * sm * g.n
            else:
                q, r = divmod(carry, abs_n)
                carry = q * sn * g.m
            out.append(("b", r))
            out.append(("a", step))
    out.append(("b", carry))
    return Word.from_syllables(out)


class _BallCache:
    """Canonical-form BFS layers per group, grown on demand."""

    def __init__(self, g: BSParams):
        self.g = g
        self.layers: list[list[Word]] = [[IDENTITY]]
        self.seen: set[Word] = {IDENTITY}

    def grow(self, radius: int) -> None:
        gens = (A, word_inv(A), B, word_inv(B))
        while len(self.layers) <= radius:
            nxt = []
            for w in self.layers[-1]:
                for s in gens:
                    c = canonical_form(word_mul(w, s), self.g)
                    if c not in self.seen:
                        self.seen.add(c)
                        nxt.append(c)
            nxt.sort(key=Word.sort_key)
            self.layers.append(nxt)


@lru_cache(maxsize=64)
def _ball_cache(g: BSParams) -> _BallCache:
    return _BallCache(g)


def check_radius(radius: int, cap: int | None) -> None:
    cap = DEFAULT_RADIUS_CAP if cap is None else cap
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius > cap:
        raise CapExceeded(f"radius {radius} exceeds cap {cap}")


def ball_layers(g: BSParams, radius: int, cap: int | None = None) -> list[list[Word]]:
    """Spheres 0..radius of the Cayley graph, each sorted."""
    check_radius(radius, cap)
    cache = _ball_cache(g)
    cache.grow(radius)
    return cache.layers[: radius + 1]


def iter_ball(g: BSParams, radius: int, cap: int | None = None) -> Iterator[Word]:
    """Ball elements sphere by sphere (BFS order)."""
    for layer in ball_layers(g, radius, cap):
        yield from layer


def ball(g: BSParams, radius: int, cap: int | None = None) -> list[Word]:
    """Distinct elements of word length <= radius as canonical forms, sorted."""
    return sorted(iter_ball(g, radius, cap), key=Word.sort_key)


def down_orbit(g: BSParams, p: int, cap: int = DEFAULT_ORBIT_CAP) -> set[int]:
    """Integers reachable from p by q -> q*n/m (allowed while m | q).

    Raises CapExceeded when the orbit is longer than ``cap`` (it is infinite
    whenever gcd(m, n) > 1 and the chain keeps divisibility).
    """
    orbit = {p}
    q = p
    while q % g.m == 0:
        q = q // g.m * g.n
        if q in orbit:
            break
        orbit.add(q)
        if len(orbit) > cap:
            raise CapExceeded(f"orbit of {p} exceeds {cap} elements")
    return orbit


def _forward_reaches(g: BSParams, p: int, q: int) -> bool:
    # is q = p (n/m)^j for some j >= 0 with every intermediate divisible by m?
    if p == q:
        return True
    if p == 0 or q == 0:
        return False
    if abs(g.m) == abs(g.n):
        return g.m == -g.n and q == -p and p % g.m == 0
    j = solve_ratio_power(g.n, g.m, Fraction(q, p))
    if j is None or j < 0:
        return False
    x = p
    for _ in range(j):
        if x % g.m:
            return False
        x = x // g.m * g.n
    return x == q


def conj_powers(g: BSParams, p: int, q: int, one_step: bool = False) -> bool:
    """Decide whether b^p and b^q are conjugate in BS(m, n).

    With ``one_step`` the literal one-step criterion is used instead: p = m i
    and q = n i, or p = n i and q = m i, for some integer i.
    """
    if one_step:
        return _one_step(g.m, g.n, p, q) or _one_step(g.n, g.m, p, q)
    return _forward_reaches(g, p, q) or _forward_reaches(g, q, p)


def _one_step(m: int, n: int, p: int, q: int) -> bool:
    return p % m == 0 and q == p // m * n


def find_conjugator(
    g: BSParams, p: int, q: int, radius: int, cap: int | None = None
) -> Word | None:
    """Some y in the ball with y^-1 b^p y = b^q, searched in BFS order."""
    target = canonical_form(b_pow(q), g)
    bp = b_pow(p)
    for y in iter_ball(g, radius, cap):
        if canonical_form(word_inv(y) * bp * y, g) == target:
            return y
    return None
