import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from _util import random_word
from bsgroups.model import (
    Centralizer,
    ModelElement,
    ModelParams,
    centralizer_class,
    conj_scale,
    decide_phi,
    decide_psi,
    element,
    eval_word,
    gen_a,
    gen_b,
    identity,
    m_inv,
    m_mul,
    m_pow,
    nth_root,
    phi_exponent,
)
from bsgroups.words import BSParams, parse_word, relator, word_inv, words_equal

M12 = ModelParams(1, 2)
M23 = ModelParams(2, 3)

params_st = st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(
    lambda t: t[0] and t[1] and abs(t[0]) != abs(t[1])
).map(lambda t: ModelParams(*t))


@st.composite
def elements(draw, p=None):
    p = p or draw(params_st)
    num = draw(st.integers(-200, 200))
    e = draw(st.integers(0, 4))
    return element(p, Fraction(num, p.base**e), draw(st.integers(-4, 4)))


@st.composite
def triples(draw):
    p = draw(params_st)
    return draw(elements(p)), draw(elements(p)), draw(elements(p))


def test_params_validation():
    for k, l in [(0, 2), (1, 1), (-1, 1), (2, 2), (3, -3)]:
        with pytest.raises(ValueError):
            ModelParams(k, l)
    assert ModelParams(2, 3).is_gkl()
    assert not ModelParams(2, 4).is_gkl()
    assert not ModelParams(1, 6).is_gkl()
    assert str(M23) == "M(2,3)"


def test_multiplication_example():
    x = element(M12, 1, 1)
    y = element(M12, 1, 0)
    # (1, 1)(1, 0) = (1 + 2^-1, 1)
    assert m_mul(x, y) == element(M12, Fraction(3, 2), 1)


@pytest.mark.parametrize("k,l", [(1, 2), (2, 3), (-2, 3), (3, -2), (2, 4), (1, -5), (4, 6)])
def test_relator_is_identity(k, l):
    p = ModelParams(k, l)
    assert eval_word(relator(BSParams(k, l)), p) == identity(p)
    a, b = gen_a(p), gen_b(p)
    assert m_mul(m_mul(m_inv(a), m_pow(b, k)), a) == m_pow(b, l)


@given(triples())
def test_group_axioms(t):
    x, y, z = t
    e = identity(x.params)
    assert m_mul(m_mul(x, y), z) == m_mul(x, m_mul(y, z))
    assert m_mul(x, e) == x == m_mul(e, x)
    assert m_mul(x, m_inv(x)) == e
    assert m_mul(m_inv(x), x) == e


@given(elements(), st.integers(-6, 6), st.integers(-6, 6))
def test_power_laws(x, i, j):
    assert m_mul(m_pow(x, i), m_pow(x, j)) == m_pow(x, i + j)
    naive = identity(x.params)
    for _ in range(abs(i)):
        naive = m_mul(naive, x if i > 0 else m_inv(x))
    assert m_pow(x, i) == naive


@given(params_st, st.integers(0, 2**32))
def test_eval_is_homomorphism(p, seed):
    rng = random.Random(seed)
    u, v = random_word(rng, 10), random_word(rng, 10)
    assert eval_word(u * v, p) == m_mul(eval_word(u, p), eval_word(v, p))
    assert eval_word(word_inv(u), p) == m_inv(eval_word(u, p))


@pytest.mark.parametrize("n", [2, 3, -2, 5])
def test_faithful_for_bs1n(n):
    g, p = BSParams(1, n), ModelParams(1, n)
    rng = random.Random(n)
    for _ in range(400):
        w = random_word(rng, 14)
        assert words_equal(w, parse_word("1"), g) == (eval_word(w, p) == identity(p))


@given(elements(), elements())
def test_conjugation_scales_fibre(x, y):
    if x.params != y.params:
        return
    fibre = ModelElement(x.params, x.u, 0)
    conj = m_mul(m_mul(m_inv(y), fibre), y)
    assert conj == conj_scale(fibre, y.t)
    assert conj.u.to_fraction() == fibre.u.to_fraction() * x.params.rho ** y.t


def test_conj_scale_rejects_non_fibre():
    with pytest.raises(ValueError):
        conj_scale(element(M12, 1, 1), 1)


def test_centralizer_classes():
    assert centralizer_class(identity(M12)) is Centralizer.WHOLE_GROUP
    assert centralizer_class(gen_b(M12)) is Centralizer.FIBRE_A
    assert centralizer_class(gen_a(M12)) is Centralizer.CYCLIC


def test_psi_examples():
    assert decide_psi(gen_b(M12), 2)
    assert not decide_psi(gen_b(M12), 3)
    assert not decide_psi(identity(M12), 2)
    assert not decide_psi(gen_a(M12), 2)
    assert decide_psi(gen_b(M23), 6)


@given(elements(), st.integers(1, 6))
def test_nth_root_sound(x, r):
    z = nth_root(x, r)
    if z is not None:
        assert m_pow(z, r) == x


def test_nth_root_complete_small():
    # brute force: every z = (num / B^e, s) with small coordinates
    p = M12
    candidates = [element(p, Fraction(num, 2**e), s) for num in range(-12, 13) for e in range(3) for s in range(-2, 3)]
    for z, r in product(candidates, (1, 2, 3)):
        x = m_pow(z, r)
        root = nth_root(x, r)
        assert root is not None and m_pow(root, r) == x
    assert nth_root(element(p, 1, 0), 2) == element(p, Fraction(1, 2), 0)
    assert nth_root(element(p, 0, 1), 2) is None
    assert nth_root(element(p, 1, 0), 3) is None


def test_phi_examples():
    assert not decide_phi(M23, 6)
    assert phi_exponent(ModelParams(1, 6), 6) == 1
    assert decide_phi(ModelParams(1, 6), 6)
    # rho = -6 never reaches 6
    assert not decide_phi(ModelParams(-1, 6), 6)
    assert decide_phi(ModelParams(2, 4), 8)
    assert phi_exponent(ModelParams(2, 4), 8) == 3
    assert decide_phi(ModelParams(-2, -3), 6) is False


def test_phi_vacuous_when_not_divisible():
    # Z[1/6] is not 5-divisible, so no element satisfies Psi_5
    assert decide_phi(M23, 5)


@given(elements())
def test_json_round_trip(x):
    assert ModelElement.from_json(x.to_json()) == x
