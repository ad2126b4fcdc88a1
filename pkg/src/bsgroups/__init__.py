"""Exact decision procedures for Baumslag-Solitar groups BS(m, n) and their metabelian relatives."""

from .classify import (
    Certificate,
    Conclusion,
    ExtensionCase,
    are_isomorphic,
    canonical_pair,
    enumerate_extension_cases,
    separation_certificate,
    verify_certificate,
)
from .logic import EvalResult, eval_bounded, mk_phi, mk_psi, mk_upsilon
from .model import ModelElement, ModelParams, decide_phi, decide_psi, eval_word, nth_root
from .nadic import NAdic, nadic_make, quotient_order, solve_ratio_power
from .words import BSParams, Word, canonical_form, conj_powers, parse_word, words_equal

__version__ = "0.1.0"
