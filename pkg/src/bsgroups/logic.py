"""First-order formulas over the language of groups, evaluated soundly on balls.

Bounded evaluation is three-valued: ``certain`` is set only when the verdict
transfers to the whole group (an existential settled by a witness, a
universal settled by a counterexample, or an exact atom).  Elements are
interned as integers inside a :class:`Structure`, and products are memoised
there, so repeated quantifier sweeps over the same ball stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

from .model import ModelElement, ModelParams, eval_word, gen_a, gen_b, identity, m_inv, m_mul
from .nadic import prime_dim, prime_support
from .words import (
    A,
    B,
    IDENTITY,
    BSParams,
    Word,
    b_pow,
    canonical_form,
    conj_powers,
    iter_ball,
    word_inv,
    word_mul,
    check_radius,
)
from sympy import primerange


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str  # "a" or "b"


@dataclass(frozen=True)
class Inv:
    arg: "Term"


@dataclass(frozen=True)
class Pow:
    arg: "Term"
    exp: int


@dataclass(frozen=True)
class Mul:
    args: tuple["Term", ...]


@dataclass(frozen=True)
class Comm:
    """[x, y] = x^-1 y^-1 x y."""

    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Conj:
    """x^y = y^-1 x y."""

    arg: "Term"
    by: "Term"


Term = Union[Var, Const, Inv, Pow, Mul, Comm, Conj]

ONE = Mul(())


def mul(*args: Term) -> Mul:
    return Mul(tuple(args))


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    premise: "Formula"
    conclusion: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Eq, Not, And, Or, Implies, Exists, Forall]


def conj(*args: Formula) -> And:
    return And(tuple(args))


def disj(*args: Formula) -> Or:
    return Or(tuple(args))


def neq(lhs: Term, rhs: Term) -> Not:
    return Not(Eq(lhs, rhs))


@dataclass(frozen=True)
class EvalResult:
    value: bool
    certain: bool


# ---------------------------------------------------------------- builders


def mk_upsilon(m: int, n: int, x: str = "x", y: str = "y") -> Formula:
    """Upsilon_{m,n}(x): x^m is conjugate to x^n (with a non-commuting conjugator when m = n)."""
    if m == 0 or n == 0:
        raise ValueError("m, n must be nonzero")
    X, Y = Var(x), Var(y)
    if m != n:
        return Exists(y, Eq(mul(Inv(Y), Pow(X, m), Y), Pow(X, n)))
    return Exists(y, conj(neq(Comm(Y, X), ONE), Eq(mul(Inv(Y), Pow(X, n), Y), Pow(X, n))))


def psi_clauses(n: int, x: str = "x", y: str = "y", z: str = "z") -> tuple[Formula, ...]:
    X, Y, Z = Var(x), Var(y), Var(z)
    commutes_yx = Eq(Comm(Y, X), ONE)
    commutes_zx = Eq(Comm(Z, X), ONE)
    return (
        # centralizer of x is n-divisible
        Forall(y, Implies(commutes_yx, Exists(z, Eq(Y, Pow(Z, n))))),
        # centralizer contains the commutator subgroup
        Forall(y, Forall(z, Eq(Comm(X, Comm(Y, Z)), ONE))),
        # centralizer is normal
        Forall(y, Forall(z, Implies(commutes_yx, Eq(Comm(Conj(Y, Z), X), ONE)))),
        # centralizer is abelian
        Forall(y, Forall(z, Implies(conj(commutes_yx, commutes_zx), Eq(Comm(Z, Y), ONE)))),
    )


def mk_psi(n: int, x: str = "x") -> And:
    if n == 0:
        raise ValueError("n must be nonzero")
    return And(psi_clauses(n, x=x))


def mk_phi(n: int) -> Forall:
    """Phi_n with the quotient quantifier replaced by a quantifier over the group."""
    if n == 0:
        raise ValueError("n must be nonzero")
    X, Y = Var("x"), Var("y")
    return Forall("x", Implies(mk_psi(n), Exists("y", Eq(Conj(X, Y), Pow(X, n)))))


def upsilon_params(f: Formula) -> tuple[int, int]:
    """Recover (m, n) from a formula built by :func:`mk_upsilon`."""
    match f:
        case Exists(_, Eq(Mul((Inv(), Pow(_, m), _)), Pow(_, n))):
            return m, n
        case Exists(_, And((Not(Eq(Comm(), _)), Eq(_, Pow(_, n))))):
            return n, n
    raise ValueError("not an Upsilon formula")


def separating_sentence(k: int, l: int, m: int, n: int) -> Exists:
    """There is x with Upsilon_{k,l}(x) and not Upsilon_{m,n}(x)."""
    return Exists("x", conj(mk_upsilon(k, l), Not(mk_upsilon(m, n))))


# ---------------------------------------------------------------- syntax utilities


def free_vars(f: Formula | Term) -> frozenset[str]:
    match f:
        case Var(name):
            return frozenset({name})
        case Const():
            return frozenset()
        case Inv(arg) | Pow(arg, _):
            return free_vars(arg)
        case Mul(args):
            return frozenset().union(*map(free_vars, args))
        case Comm(a, b) | Conj(a, b) | Eq(a, b) | Implies(a, b):
            return free_vars(a) | free_vars(b)
        case Not(arg):
            return free_vars(arg)
        case And(args) | Or(args):
            return frozenset().union(*map(free_vars, args))
        case Exists(v, body) | Forall(v, body):
            return free_vars(body) - {v}
    raise TypeError(f"not a formula or term: {f!r}")


def rename_bound(f: Formula, old: str, new: str) -> Formula:
    """Alpha-rename every quantifier binding ``old`` to ``new``.

    ``new`` must not occur in ``f``.
    """

    def term(t: Term) -> Term:
        match t:
            case Var(name):
                return Var(new) if name == old else t
            case Const():
                return t
            case Inv(arg):
                return Inv(term(arg))
            case Pow(arg, e):
                return Pow(term(arg), e)
            case Mul(args):
                return Mul(tuple(map(term, args)))
            case Comm(a, b):
                return Comm(term(a), term(b))
            case Conj(a, b):
                return Conj(term(a), term(b))

    def form(g: Formula, bound: bool) -> Formula:
        match g:
            case Eq(a, b):
                return Eq(term(a), term(b)) if bound else g
            case Not(arg):
                return Not(form(arg, bound))
            case And(args):
                return And(tuple(form(a, bound) for a in args))
            case Or(args):
                return Or(tuple(form(a, bound) for a in args))
            case Implies(a, b):
                return Implies(form(a, bound), form(b, bound))
            case Exists(v, body) | Forall(v, body):
                if v == old:
                    return type(g)(new, form(body, True))
                return type(g)(v, form(body, bound))

    return form(f, False)


def _paren(t: Term) -> str:
    s = term_str(t)
    return s if isinstance(t, (Var, Const, Comm)) else f"({s})"


def term_str(t: Term) -> str:
    match t:
        case Var(name) | Const(name):
            return name
        case Inv(arg):
            return f"{_paren(arg)}^-1"
        case Pow(arg, 1):
            return term_str(arg)
        case Pow(arg, e):
            return f"{_paren(arg)}^{e}"
        case Mul(args):
            return " ".join(term_str(a) for a in args) if args else "1"
        case Comm(a, b):
            return f"[{term_str(a)},{term_str(b)}]"
        case Conj(a, b):
            return f"{_paren(a)}^{_paren(b)}"
    raise TypeError(f"not a term: {t!r}")


def formula_str(f: Formula) -> str:
    """Conventional mathematical rendering, e.g. ``∃y (y^-1 x^2 y = x^3)``."""

    def sub(g: Formula) -> str:
        s = formula_str(g)
        atomic = (Eq, Exists, Forall)
        if isinstance(g, atomic) or (isinstance(g, Not) and isinstance(g.arg, atomic)):
            return s
        return f"({s})"

    match f:
        case Eq(a, b):
            return f"{term_str(a)} = {term_str(b)}"
        case Not(Eq(a, b)):
            return f"{term_str(a)} ≠ {term_str(b)}"
        case Not(arg):
            return f"¬{sub(arg)}"
        case And(args):
            return " ∧ ".join(sub(a) for a in args)
        case Or(args):
            return " ∨ ".join(sub(a) for a in args)
        case Implies(a, b):
            return f"{sub(a)} → {sub(b)}"
        case Exists(v, body):
            return f"∃{v} ({formula_str(body)})"
        case Forall(v, body):
            return f"∀{v} ({formula_str(body)})"
    raise TypeError(f"not a formula: {f!r}")


def to_json(f: Formula | Term) -> dict:
    match f:
        case Var(name):
            return {"var": name}
        case Const(name):
            return {"const": name}
        case Inv(arg):
            return {"op": "inv", "arg": to_json(arg)}
        case Pow(arg, e):
            return {"op": "pow", "arg": to_json(arg), "exp": e}
        case Mul(args):
            return {"op": "mul", "args": [to_json(a) for a in args]}
        case Comm(a, b):
            return {"op": "comm", "args": [to_json(a), to_json(b)]}
        case Conj(a, b):
            return {"op": "conj", "args": [to_json(a), to_json(b)]}
        case Eq(a, b):
            return {"op": "eq", "args": [to_json(a), to_json(b)]}
        case Not(arg):
            return {"op": "not", "arg": to_json(arg)}
        case And(args):
            return {"op": "and", "args": [to_json(a) for a in args]}
        case Or(args):
            return {"op": "or", "args": [to_json(a) for a in args]}
        case Implies(a, b):
            return {"op": "implies", "args": [to_json(a), to_json(b)]}
        case Exists(v, body):
            return {"op": "exists", "var": v, "body": to_json(body)}
        case Forall(v, body):
            return {"op": "forall", "var": v, "body": to_json(body)}
    raise TypeError(f"cannot serialise {f!r}")


_BINARY = {"comm": Comm, "conj": Conj, "eq": Eq, "implies": Implies}
_NARY = {"mul": Mul, "and": And, "or": Or}


def from_json(data: dict) -> Formula | Term:
    if "var" in data and "op" not in data:
        return Var(data["var"])
    if "const" in data:
        return Const(data["const"])
    op = data["op"]
    if op == "inv":
        return Inv(from_json(data["arg"]))
    if op == "pow":
        return Pow(from_json(data["arg"]), data["exp"])
    if op == "not":
        return Not(from_json(data["arg"]))
    if op in _BINARY:
        a, b = data["args"]
        return _BINARY[op](from_json(a), from_json(b))
    if op in _NARY:
        return _NARY[op](tuple(from_json(a) for a in data["args"]))
    if op == "exists":
        return Exists(data["var"], from_json(data["body"]))
    if op == "forall":
        return Forall(data["var"], from_json(data["body"]))
    raise ValueError(f"unknown formula node {op!r}")


# ---------------------------------------------------------------- structures


class Structure:
    """A group presented to the evaluator: elements are interned as ints."""

    def __init__(self):
        self._elems: list = []
        self._index: dict = {}
        self._mul: dict[tuple[int, int], int] = {}
        self._inv: dict[int, int] = {}
        self.one = self.intern(self._identity())
        self.consts = {"a": self.intern(self._gen("a")), "b": self.intern(self._gen("b"))}

    def intern(self, x) -> int:
        i = self._index.get(x)
        if i is None:
            i = len(self._elems)
            self._elems.append(x)
            self._index[x] = i
        return i

    def element(self, i: int):
        return self._elems[i]

    def mul(self, i: int, j: int) -> int:
        if i == self.one:
            return j
        if j == self.one:
            return i
        key = (i, j)
        r = self._mul.get(key)
        if r is None:
            r = self.intern(self._raw_mul(self._elems[i], self._elems[j]))
            self._mul[key] = r
        return r

    def inv(self, i: int) -> int:
        r = self._inv.get(i)
        if r is None:
            r = self.intern(self._raw_inv(self._elems[i]))
            self._inv[i] = r
            self._inv[r] = i
        return r

    def pow(self, i: int, e: int) -> int:
        if e < 0:
            i, e = self.inv(i), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, i)
            i = self.mul(i, i)
            e >>= 1
        return result

    def ball(self, radius: int) -> list[int]:
        raise NotImplementedError

    def convert(self, value) -> int:
        raise NotImplementedError


class BSStructure(Structure):
    def __init__(self, g: BSParams):
        self.g = g
        super().__init__()

    def _identity(self):
        return IDENTITY

    def _gen(self, name):
        return A if name == "a" else B

    def _raw_mul(self, x: Word, y: Word) -> Word:
        return canonical_form(word_mul(x, y), self.g)

    def _raw_inv(self, x: Word) -> Word:
        return canonical_form(word_inv(x), self.g)

    def ball(self, radius: int, cap: int | None = None) -> list[int]:
        return [self.intern(w) for w in iter_ball(self.g, radius, cap)]

    def convert(self, value: Word) -> int:
        return self.intern(canonical_form(value, self.g))

    def __repr__(self) -> str:
        return f"BSStructure({self.g})"


class ModelStructure(Structure):
    def __init__(self, p: ModelParams):
        self.p = p
        self._layers: list[list[int]] | None = None
        super().__init__()

    def _identity(self):
        return identity(self.p)

    def _gen(self, name):
        return gen_a(self.p) if name == "a" else gen_b(self.p)

    def _raw_mul(self, x, y):
        return m_mul(x, y)

    def _raw_inv(self, x):
        return m_inv(x)

    def ball(self, radius: int, cap: int | None = None) -> list[int]:
        check_radius(radius, cap)
        if self._layers is None:
            self._layers = [[self.one]]
            self._seen = {self.one}
        gens = [self.consts["a"], self.inv(self.consts["a"]), self.consts["b"], self.inv(self.consts["b"])]
        while len(self._layers) <= radius:
            nxt = []
            for i in self._layers[-1]:
                for s in gens:
                    j = self.mul(i, s)
                    if j not in self._seen:
                        self._seen.add(j)
                        nxt.append(j)
            self._layers.append(nxt)
        return [i for layer in self._layers[: radius + 1] for i in layer]

    def convert(self, value) -> int:
        if isinstance(value, Word):
            value = eval_word(value, self.p)
        return self.intern(value)

    def __repr__(self) -> str:
        return f"ModelStructure({self.p})"


@lru_cache(maxsize=32)
def structure_for(g: BSParams | ModelParams) -> Structure:
    if isinstance(g, BSParams):
        return BSStructure(g)
    return ModelStructure(g)


# ---------------------------------------------------------------- evaluation

_TC = (True, True)
_FC = (False, True)
_MISSING = object()


def _compile_term(t: Term, S: Structure) -> Callable[[dict], int]:
    match t:
        case Var(name):
            return lambda env: env[name]
        case Const(name):
            c = S.consts[name]
            return lambda env: c
        case Inv(arg):
            f = _compile_term(arg, S)
            return lambda env: S.inv(f(env))
        case Pow(arg, e):
            f = _compile_term(arg, S)
            return lambda env: S.pow(f(env), e)
        case Mul(args):
            fs = [_compile_term(a, S) for a in args]
            one = S.one

            def run(env):
                r = one
                for f in fs:
                    r = S.mul(r, f(env))
                return r

            return run
        case Comm(a, b):
            fa, fb = _compile_term(a, S), _compile_term(b, S)

            def run(env):
                x, y = fa(env), fb(env)
                return S.mul(S.mul(S.inv(x), S.inv(y)), S.mul(x, y))

            return run
        case Conj(a, b):
            fa, fb = _compile_term(a, S), _compile_term(b, S)

            def run(env):
                y = fb(env)
                return S.mul(S.mul(S.inv(y), fa(env)), y)

            return run
    raise TypeError(f"not a term: {t!r}")


def _compile(f: Formula, S: Structure, domain: list[int]) -> Callable[[dict], tuple[bool, bool]]:
    match f:
        case Eq(lhs, rhs):
            fl, fr = _compile_term(lhs, S), _compile_term(rhs, S)
            return lambda env: _TC if fl(env) == fr(env) else _FC
        case Not(arg):
            g = _compile(arg, S, domain)

            def run(env):
                v, c = g(env)
                return (not v, c)

            return run
        case And(args):
            gs = [_compile(a, S, domain) for a in args]

            def run(env):
                all_true = all_certain = True
                for g in gs:
                    v, c = g(env)
                    if not v:
                        if c:
                            return _FC
                        all_true = False
                    all_certain = all_certain and c
                return (True, all_certain) if all_true else (False, False)

            return run
        case Or(args):
            gs = [_compile(a, S, domain) for a in args]

            def run(env):
                any_true = False
                all_certain = True
                for g in gs:
                    v, c = g(env)
                    if v:
                        if c:
                            return _TC
                        any_true = True
                    all_certain = all_certain and c
                return (True, False) if any_true else (False, all_certain)

            return run
        case Implies(premise, conclusion):
            return _compile(Or((Not(premise), conclusion)), S, domain)
        case Exists(var, body) | Forall(var, body):
            g = _compile(body, S, domain)
            want = isinstance(f, Exists)

            def run(env):
                saved = env.get(var, _MISSING)
                try:
                    for y in domain:
                        env[var] = y
                        v, c = g(env)
                        if c and v == want:
                            return (want, True)
                finally:
                    if saved is _MISSING:
                        env.pop(var, None)
                    else:
                        env[var] = saved
                return (not want, False)

            return run
    raise TypeError(f"not a formula: {f!r}")


def eval_bounded(
    f: Formula,
    assignment: dict,
    g: BSParams | ModelParams | Structure,
    radius: int,
    cap: int | None = None,
) -> EvalResult:
    """Evaluate ``f`` with quantifiers ranging over the ball of the given radius.

    ``assignment`` maps each free variable to a Word (or, for a model, a Word
    or ModelElement).  Certain verdicts hold in the whole group.
    """
    S = g if isinstance(g, Structure) else structure_for(g)
    missing = free_vars(f) - set(assignment)
    if missing:
        raise ValueError(f"unassigned free variables: {sorted(missing)}")
    domain = S.ball(radius, cap)
    env = {v: S.convert(w) for v, w in assignment.items()}
    value, certain = _compile(f, S, domain)(env)
    return EvalResult(value, certain)


# ---------------------------------------------------------------- exact deciders


def decide_upsilon_at_bpow(ambient: BSParams, k: int, l: int, p: int) -> bool | None:
    """Exact truth value of Upsilon_{k,l}(b^p) in ``ambient``, or None when undecided.

    For k != l this is conjugacy of b^(pk) and b^(pl).  For k = l it is
    decided only in BS(N, N), where b^q is central iff N | q, and in the
    solvable groups, where b^p and b^(pk) have the same centralizer.
    """
    if k != l:
        return conj_powers(ambient, p * k, p * l)
    if p == 0:
        return False
    if ambient.m == ambient.n:
        N = ambient.n
        return (p * k) % N == 0 and p % N != 0
    if ambient.solvable:
        return False
    return None


def exists_upsilon_witness(ambient: BSParams, k: int, l: int, p_range: int) -> int | None:
    """Smallest |p| in 1..p_range (positive first) with Upsilon_{k,l}(b^p); p = 0 is skipped."""
    if p_range < 1:
        raise ValueError("p_range must be >= 1")
    for q in range(1, p_range + 1):
        for p in (q, -q):
            if decide_upsilon_at_bpow(ambient, k, l, p):
                return p
    return None


def find_upsilon_witness(
    g: BSParams, k: int, l: int, p: int, radius: int, cap: int | None = None
) -> Word | None:
    """A conjugator y in the ball making Upsilon_{k,l}(b^p) true, searched in BFS order."""
    S = structure_for(g)
    x = S.convert(b_pow(p))
    xk, xl = S.pow(x, k), S.pow(x, l)
    for w in iter_ball(g, radius, cap):
        y = S.convert(w)
        if S.mul(S.mul(S.inv(y), xk), y) != xl:
            continue
        if k == l and S.mul(y, x) == S.mul(x, y):
            continue
        return w
    return None


def szmielew_same_invariants(base1: int, base2: int, prime_bound: int) -> bool:
    """Do Z[1/base1] and Z[1/base2] have the same dim(A/pA) for every prime p <= bound?"""
    return szmielew_mismatch(base1, base2, prime_bound) is None


def szmielew_mismatch(base1: int, base2: int, prime_bound: int) -> int | None:
    """First prime p <= bound where the two quotient dimensions differ."""
    if base1 < 2 or base2 < 2 or prime_bound < 2:
        raise ValueError("bases and bound must be >= 2")
    for p in primerange(2, prime_bound + 1):
        if prime_dim(base1, p) != prime_dim(base2, p):
            return int(p)
    return None


def same_prime_support(base1: int, base2: int) -> bool:
    """Exact criterion: Z[1/base1] == Z[1/base2] iff the bases have the same prime divisors."""
    return prime_support(base1) == prime_support(base2)
