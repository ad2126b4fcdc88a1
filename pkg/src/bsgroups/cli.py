"""Command-line front end.

Exit codes: 0 answered, 2 usage or parse error, 3 undecided within budget.
JSON output is compact and key-ordered, so identical flags give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import classify, logic, nadic, words
from .model import ModelParams, decide_phi, phi_exponent

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNDECIDED = 3

MAX_RADIUS = int(os.environ.get("BSGROUPS_MAX_RADIUS", "10"))
MAX_P_RANGE = int(os.environ.get("BSGROUPS_MAX_P_RANGE", str(10**6)))


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _emit(args, payload: dict, text: str) -> None:
    print(_dump(payload) if args.json else text)


def _radius_cap(args) -> int:
    return max(args.radius, MAX_RADIUS) if args.override_caps else MAX_RADIUS


def _check_caps(args) -> None:
    if args.override_caps:
        return
    radius = getattr(args, "radius", None)
    if radius is not None and radius > MAX_RADIUS:
        raise UsageError(f"radius {radius} exceeds cap {MAX_RADIUS} (use --override-caps)")
    p_range = getattr(args, "p_range", None)
    if p_range is not None and p_range > MAX_P_RANGE:
        raise UsageError(f"p-range {p_range} exceeds cap {MAX_P_RANGE} (use --override-caps)")


def _group(args) -> words.BSParams:
    try:
        return words.BSParams(args.m, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _render(args, w: words.Word) -> str:
    return words.render_word(w, compact=args.compact)


def _word_inputs(args):
    if args.word == "-":
        for line in sys.stdin:
            line = line.strip()
            if line:
                yield line
    else:
        yield args.word


def cmd_normalize(args) -> int:
    g = _group(args)
    for text in _word_inputs(args):
        nf = words.canonical_form(words.parse_word(text), g)
        _emit(args, {"input": text, "normal_form": _render(args, nf)}, _render(args, nf))
    return EXIT_OK


def cmd_eq(args) -> int:
    g = _group(args)
    equal = words.words_equal(words.parse_word(args.w1), words.parse_word(args.w2), g)
    _emit(args, {"equal": equal}, "equal" if equal else "not equal")
    return EXIT_OK


def cmd_conj(args) -> int:
    g = _group(args)
    conjugate = words.conj_powers(g, args.p, args.q, one_step=args.one_step)
    payload = {"conjugate": conjugate}
    witness = None
    if conjugate:
        witness = words.find_conjugator(g, args.p, args.q, args.radius, cap=_radius_cap(args))
        payload["witness"] = None if witness is None else _render(args, witness)
        if witness is None:
            payload["witness_budget"] = {"radius": args.radius}
    else:
        payload["witness"] = None
    if conjugate:
        found = "none within radius %d" % args.radius if witness is None else _render(args, witness) or "1"
        text = f"b^{args.p} ~ b^{args.q} in {g}; conjugator: {found}"
    else:
        text = f"b^{args.p} and b^{args.q} are not conjugate in {g}"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_sep(args) -> int:
    try:
        cert = classify.separation_certificate(
            args.m, args.n, args.k, args.l, search_radius=args.radius, p_range=args.p_range
        )
    except classify.DegenerateGroup as exc:
        raise UsageError(str(exc)) from exc
    _emit(args, cert.to_json(), cert.describe())
    return EXIT_UNDECIDED if cert.conclusion is classify.Conclusion.UNDECIDED else EXIT_OK


def cmd_phi(args) -> int:
    try:
        p = ModelParams(args.k, args.l)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    holds = decide_phi(p, args.n)
    t = phi_exponent(p, args.n)
    how = f"conjugation by a^{t} multiplies the fibre by {args.n}" if t is not None else "no power of the action equals n"
    _emit(args, {"phi_holds": holds}, f"Phi_{args.n} {'holds' if holds else 'fails'} in {p}: {how}")
    return EXIT_OK


def cmd_ball(args) -> int:
    g = _group(args)
    layers = words.ball_layers(g, args.radius, cap=_radius_cap(args))
    sizes = []
    total = 0
    for layer in layers:
        total += len(layer)
        sizes.append(total)
    payload = {"group": [g.m, g.n], "radius": args.radius, "sizes": sizes}
    if args.list:
        payload["elements"] = [_render(args, w) for w in words.ball(g, args.radius, cap=_radius_cap(args))]
    lines = [f"radius {r}: {s}" for r, s in enumerate(sizes)]
    if args.list:
        lines += [e or "1" for e in payload["elements"]]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_szmielew(args) -> int:
    for b in args.bases:
        if b < 2:
            raise UsageError("bases must be >= 2")
    if len(args.bases) == 1:
        base = args.bases[0]
        orders = {str(k): nadic.quotient_order(base, k) for k in args.k}
        dims = {str(p): nadic.prime_dim(base, p) for p in logic.primerange(2, args.bound + 1)}
        payload = {"base": base, "quotient_orders": orders, "prime_dims": dims}
        text = "\n".join(
            [f"|Z[1/{base}] / {k} Z[1/{base}]| = {v}" for k, v in orders.items()]
            + [f"dim A/{p}A = {d}" for p, d in dims.items()]
        )
    elif len(args.bases) == 2:
        b1, b2 = args.bases
        mismatch = logic.szmielew_mismatch(b1, b2, args.bound)
        same_support = logic.same_prime_support(b1, b2)
        payload = {
            "bases": [b1, b2],
            "bound": args.bound,
            "same_invariants": mismatch is None,
            "first_mismatch": mismatch,
            "same_prime_support": same_support,
        }
        text = (
            f"Z[1/{b1}] and Z[1/{b2}]: "
            + ("same dim(A/pA)" if mismatch is None else f"differ at p = {mismatch}")
            + f" for primes <= {args.bound}; equal as groups: {same_support}"
        )
    else:
        raise UsageError("szmielew takes one or two bases")
    _emit(args, payload, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--compact", action="store_true", help="render words as a/A/b/B letters")
    common.add_argument("--override-caps", action="store_true", help="lift radius and p-range caps")

    group = argparse.ArgumentParser(add_help=False)
    group.add_argument("-m", type=int, required=True)
    group.add_argument("-n", type=int, required=True)

    parser = argparse.ArgumentParser(prog="bsgroups", description="Decision procedures for Baumslag-Solitar groups")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", parents=[common, group], help="normal form of a word")
    p.add_argument("word", help="word text, or - to read one word per line from stdin")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("eq", parents=[common, group], help="word problem")
    p.add_argument("w1")
    p.add_argument("w2")
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("conj", parents=[common, group], help="conjugacy of b^p and b^q")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-q", type=int, required=True)
    p.add_argument("--radius", type=int, default=8, help="witness search radius")
    p.add_argument("--one-step", action="store_true", help="use the literal one-step criterion")
    p.set_defaults(func=cmd_conj)

    p = sub.add_parser("sep", parents=[common], help="separation certificate for BS(m,n) vs BS(k,l)")
    for name in ("m", "n", "k", "l"):
        p.add_argument(name, type=int)
    p.add_argument("--radius", type=int, default=classify.DEFAULT_SEARCH_RADIUS)
    p.add_argument("--p-range", type=int, default=classify.DEFAULT_P_RANGE)
    p.set_defaults(func=cmd_sep)

    p = sub.add_parser("phi", parents=[common], help="decide Phi_n in the model M(k,l)")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-l", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("ball", parents=[common, group], help="Cayley ball sizes")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--list", action="store_true", help="also list the elements")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("szmielew", parents=[common], help="quotient invariants of Z[1/B]")
    p.add_argument("bases", type=int, nargs="+")
    p.add_argument("--bound", type=int, default=100, help="largest prime checked")
    p.add_argument("-k", type=int, action="append", default=[], help="report |A/kA| (repeatable)")
    p.set_defaults(func=cmd_szmielew)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_caps(args)
        return args.func(args)
    except (UsageError, words.WordSyntaxError, words.CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
