"""Isomorphism classes of BS(m, n), separation certificates, and the extension cases of BS(1, n)."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from sympy import divisors

from .logic import (
    And,
    Exists,
    Formula,
    Not,
    decide_upsilon_at_bpow,
    find_upsilon_witness,
    formula_str,
    from_json,
    mk_phi,
    separating_sentence,
    structure_for,
    to_json,
    upsilon_params,
)
from .model import ModelParams, decide_phi, phi_exponent
from .words import BSParams, b_pow, parse_word, render_word

DEFAULT_SEARCH_RADIUS = 4
DEFAULT_P_RANGE = 32


class DegenerateGroup(ValueError):
    """BS(1, 1) and BS(1, -1) are outside the certificate machinery."""


class Conclusion(str, enum.Enum):
    ISOMORPHIC = "Isomorphic"
    SEPARATED_EXISTENTIALLY = "SeparatedExistentially"
    SEPARATED_BY_PHI = "SeparatedByPhi"
    UNDECIDED = "Undecided"


def canonical_pair(m: int, n: int) -> tuple[int, int]:
    """Representative of {(m,n), (n,m), (-m,-n), (-n,-m)} with |m'| >= |n'| and n' > 0."""
    if m == 0 or n == 0:
        raise ValueError("BS(m, n) needs m, n != 0")
    candidates = [
        (e * x, e * y)
        for e in (1, -1)
        for x, y in ((m, n), (n, m))
        if abs(x) >= abs(y) and e * y > 0
    ]
    return max(candidates)


def are_isomorphic(m: int, n: int, k: int, l: int) -> bool:
    return canonical_pair(m, n) == canonical_pair(k, l)


def is_degenerate(m: int, n: int) -> bool:
    return abs(m) == 1 and abs(n) == 1


@dataclass(frozen=True)
class Verdict:
    value: bool
    justification: dict

    def to_json(self) -> dict:
        return {"value": self.value, "justification": self.justification}


@dataclass(frozen=True)
class Certificate:
    left: tuple[int, int]
    right: tuple[int, int]
    conclusion: Conclusion
    sentence: Formula | None = None
    witness_power: int | None = None
    left_verdict: Verdict | None = None
    right_verdict: Verdict | None = None
    budget: dict = field(default_factory=dict)

    @property
    def separated(self) -> bool:
        return self.conclusion in (Conclusion.SEPARATED_EXISTENTIALLY, Conclusion.SEPARATED_BY_PHI)

    def to_json(self) -> dict:
        return {
            "left": list(self.left),
            "right": list(self.right),
            "sentence": None if self.sentence is None else to_json(self.sentence),
            "witness_power": self.witness_power,
            "verdicts": [
                None if v is None else v.to_json() for v in (self.left_verdict, self.right_verdict)
            ],
            "conclusion": self.conclusion.value,
            "budget": self.budget,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), ensure_ascii=False)

    @classmethod
    def from_json(cls, data: dict) -> Certificate:
        verdicts = [None if v is None else Verdict(v["value"], v["justification"]) for v in data["verdicts"]]
        return cls(
            left=tuple(data["left"]),
            right=tuple(data["right"]),
            conclusion=Conclusion(data["conclusion"]),
            sentence=None if data["sentence"] is None else from_json(data["sentence"]),
            witness_power=data["witness_power"],
            left_verdict=verdicts[0],
            right_verdict=verdicts[1],
            budget=data.get("budget", {}),
        )

    @classmethod
    def loads(cls, text: str) -> Certificate:
        return cls.from_json(json.loads(text))

    def describe(self) -> str:
        (m, n), (k, l) = self.left, self.right
        head = f"BS({m},{n}) vs BS({k},{l}): {self.conclusion.value}"
        if self.sentence is None:
            return head
        return f"{head}\n  sentence: {formula_str(self.sentence)}\n  witness power: {self.witness_power}"


# ---------------------------------------------------------------- Upsilon separation


def _refutes(R: BSParams, wit: tuple[int, int], own: tuple[int, int], p_range: int) -> bool | None:
    """Does R satisfy Upsilon_wit(b^p) -> Upsilon_own(b^p) for every |p| <= p_range?

    Every element satisfying an Upsilon formula is conjugate to a power of b,
    so this settles the negation of the separating sentence in R.
    """
    for p in range(-p_range, p_range + 1):
        if decide_upsilon_at_bpow(R, *own, p):
            continue
        lhs = decide_upsilon_at_bpow(R, *wit, p)
        if lhs is None:
            return None
        if lhs:
            return False
    return True


def _witness(W: BSParams, wit: tuple[int, int], other: tuple[int, int], p_range: int, radius: int):
    """First p with Upsilon_wit(b^p) and not Upsilon_other(b^p) in W, with a ball conjugator."""
    undecided = False
    for q in range(1, p_range + 1):
        for p in (q, -q):
            holds = decide_upsilon_at_bpow(W, *wit, p)
            if not holds:
                undecided |= holds is None
                continue
            blocked = decide_upsilon_at_bpow(W, *other, p)
            if blocked is None:
                undecided = True
                continue
            if blocked:
                continue
            y = find_upsilon_witness(W, *wit, p, radius)
            if y is None:
                undecided = True
                continue
            return p, y
    return None, undecided


def separation_certificate(
    m: int,
    n: int,
    k: int,
    l: int,
    search_radius: int = DEFAULT_SEARCH_RADIUS,
    p_range: int = DEFAULT_P_RANGE,
) -> Certificate:
    """Certificate that BS(m, n) and BS(k, l) are isomorphic or differ on an existential sentence.

    The sentence has the form  exists x (Upsilon_wit(x) and not Upsilon_own(x)),
    true in the witness side via some b^p and false in the other side.  The
    left side is tried as witness first.  Returns conclusion Undecided (never a
    guess) when the exact deciders or the search budget do not settle it.
    """
    left, right = (m, n), (k, l)
    if are_isomorphic(m, n, k, l):
        return Certificate(left, right, Conclusion.ISOMORPHIC)
    for side in (left, right):
        if is_degenerate(*side):
            raise DegenerateGroup(f"BS({side[0]},{side[1]}) is abelian or the Klein bottle group; not certified here")
    budget = {"search_radius": search_radius, "p_range": p_range}

    for wit_side, ref_side in ((left, right), (right, left)):
        W, R = BSParams(*wit_side), BSParams(*ref_side)
        wit, own = wit_side, ref_side
        if not _refutes(R, wit, own, p_range):
            continue
        p, y = _witness(W, wit, own, p_range, search_radius)
        if p is None:
            continue
        wit_verdict = Verdict(
            True,
            {
                "kind": "BallWitness",
                "conjugator": render_word(y),
                "power": p,
                "radius": search_radius,
            },
        )
        ref_verdict = Verdict(False, {"kind": "ExactConjugacyCriterion", "p_range": p_range})
        left_v, right_v = (wit_verdict, ref_verdict) if wit_side == left else (ref_verdict, wit_verdict)
        cert = Certificate(
            left,
            right,
            Conclusion.SEPARATED_EXISTENTIALLY,
            sentence=separating_sentence(*wit, *own),
            witness_power=p,
            left_verdict=left_v,
            right_verdict=right_v,
            budget=budget,
        )
        if not check_justifications(cert):
            raise AssertionError(f"certificate failed re-verification: {cert.dumps()}")
        return cert
    return Certificate(left, right, Conclusion.UNDECIDED, budget=budget)


def _sentence_params(sentence: Formula) -> tuple[tuple[int, int], tuple[int, int]]:
    match sentence:
        case Exists(_, And((first, Not(second)))):
            return upsilon_params(first), upsilon_params(second)
    raise ValueError("not a separating sentence")


def check_justifications(cert: Certificate) -> bool:
    """Re-run every justification stored in ``cert`` from scratch."""
    if cert.conclusion is Conclusion.ISOMORPHIC:
        return are_isomorphic(*cert.left, *cert.right)
    if cert.conclusion is Conclusion.UNDECIDED:
        return False
    if cert.conclusion is Conclusion.SEPARATED_BY_PHI:
        return _check_phi(cert)
    wit, own = _sentence_params(cert.sentence)
    verdicts = ((cert.left, cert.left_verdict), (cert.right, cert.right_verdict))
    if cert.left_verdict.value == cert.right_verdict.value:
        return False
    for side, verdict in verdicts:
        g = BSParams(*side)
        just = verdict.justification
        if just["kind"] == "BallWitness":
            p = just["power"]
            if not verdict.value or p != cert.witness_power:
                return False
            S = structure_for(g)
            x, y = S.convert(b_pow(p)), S.convert(parse_word(just["conjugator"]))
            lhs = S.mul(S.mul(S.inv(y), S.pow(x, wit[0])), y)
            if lhs != S.pow(x, wit[1]):
                return False
            if wit[0] == wit[1] and S.mul(x, y) == S.mul(y, x):
                return False
            if decide_upsilon_at_bpow(g, *own, p) is not False:
                return False
        elif just["kind"] == "ExactConjugacyCriterion":
            if verdict.value or not _refutes(g, wit, own, just["p_range"]):
                return False
        else:
            return False
    return True


def verify_certificate(cert: Certificate) -> bool:
    """Justifications re-verify and a fresh computation reproduces ``cert`` exactly."""
    if not check_justifications(cert):
        return False
    if cert.conclusion is Conclusion.SEPARATED_BY_PHI:
        (_, n), (k, l) = cert.left, cert.right
        fresh = phi_certificate(n, k, l)
    elif cert.conclusion is Conclusion.ISOMORPHIC:
        fresh = separation_certificate(*cert.left, *cert.right)
    else:
        fresh = separation_certificate(*cert.left, *cert.right, **cert.budget)
    return fresh.dumps() == cert.dumps()


# ---------------------------------------------------------------- Phi separation


def phi_certificate(n: int, k: int, l: int) -> Certificate:
    """BS(1, n) satisfies Phi_n while G_{k,l} does not.

    ``right`` holds (k, l) and is read as the model M(k, l), not BS(k, l).
    """
    p = ModelParams(k, l)
    if not p.is_gkl():
        raise ValueError(f"M({k},{l}) is not a G_(k,l) group")
    left = _phi_verdict(ModelParams(1, n), n)
    right = _phi_verdict(p, n)
    conclusion = Conclusion.SEPARATED_BY_PHI if left.value != right.value else Conclusion.UNDECIDED
    return Certificate((1, n), (k, l), conclusion, sentence=mk_phi(n), left_verdict=left, right_verdict=right)


def _phi_verdict(p: ModelParams, n: int) -> Verdict:
    return Verdict(
        decide_phi(p, n),
        {"kind": "RatioPowerSolver", "model": [p.k, p.l], "n": n, "exponent": phi_exponent(p, n)},
    )


def _check_phi(cert: Certificate) -> bool:
    for verdict in (cert.left_verdict, cert.right_verdict):
        just = verdict.justification
        if just["kind"] != "RatioPowerSolver":
            return False
        p = ModelParams(*just["model"])
        n = just["n"]
        t = phi_exponent(p, n)
        if t != just["exponent"] or decide_phi(p, n) != verdict.value:
            return False
        if t is not None and p.rho**t != n:
            return False
    return cert.left_verdict.value and not cert.right_verdict.value


# ---------------------------------------------------------------- extension cases


class GroupClass(str, enum.Enum):
    ISO_BS1N = "IsoBS1n"
    ISO_BS1NEGN = "IsoBS1negn"
    GKL = "Gkl"


@dataclass(frozen=True)
class ExtensionCase:
    n: int
    action: Fraction
    group_class: GroupClass
    kl: tuple[int, int] | None = None
    separator: Formula | None = None

    @property
    def bs_params(self) -> tuple[int, int] | None:
        if self.group_class is GroupClass.ISO_BS1N:
            return (1, self.n)
        if self.group_class is GroupClass.ISO_BS1NEGN:
            return (1, -self.n)
        return None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "action": str(self.action),
            "class": self.group_class.value,
            "kl": None if self.kl is None else list(self.kl),
            "separator": None if self.separator is None else to_json(self.separator),
        }


def _signed_divisors(n: int) -> list[int]:
    pos = divisors(abs(n))
    return [-d for d in reversed(pos)] + list(pos)


def enumerate_extension_cases(n: int) -> list[ExtensionCase]:
    """Every way a generator of Z can act on Z[1/n] for a group elementarily equivalent to BS(1, n)."""
    if abs(n) <= 1:
        raise ValueError("need |n| >= 2")
    minus = separation_certificate(1, n, 1, -n)
    cases = [
        ExtensionCase(n, Fraction(n), GroupClass.ISO_BS1N),
        ExtensionCase(n, Fraction(-n), GroupClass.ISO_BS1NEGN, separator=minus.sentence),
        ExtensionCase(n, Fraction(1, n), GroupClass.ISO_BS1N),
        ExtensionCase(n, Fraction(-1, n), GroupClass.ISO_BS1NEGN, separator=minus.sentence),
    ]
    phi = mk_phi(n)
    if not decide_phi(ModelParams(1, n), n):
        raise AssertionError(f"Phi_{n} fails in BS(1,{n})")
    for k in _signed_divisors(n):
        l = n // k
        if abs(k) < 2 or abs(l) < 2 or gcd(k, l) != 1:
            continue
        if decide_phi(ModelParams(k, l), n):
            raise AssertionError(f"Phi_{n} unexpectedly holds in G_({k},{l})")
        cases.append(ExtensionCase(n, Fraction(k, l), GroupClass.GKL, (k, l), phi))
    return cases


def excluded_splittings(n: int) -> list[tuple[int, int, str]]:
    """Splittings n = kl with |k|, |l| >= 2 that are dropped because gcd(k, l) > 1."""
    out = []
    for k in _signed_divisors(n):
        l = n // k
        if abs(k) >= 2 and abs(l) >= 2 and gcd(k, l) != 1:
            if k == l:
                reason = "action k/l = 1 gives an abelian extension"
            elif k == -l:
                reason = "action k/l = -1 gives a virtually abelian extension"
            else:
                reason = f"Z[1/{abs(k * l)}] collapses to a solvable BS(1, .) case"
            out.append((k, l, reason))
    return out
