"""Command-line front end.

Exit codes: 0 success, 1 property refuted (not equivalent, not a member,
isolation refuted, ...), 2 malformed input or validation failure.  Numeric
output is printed with 12 significant digits.
"""
from __future__ import annotations

import argparse
import sys

from . import io as pio
from .dfa import Dfa, dfa_to_dot
from .generalpa import GeneralPA, reaction, reduce as reduce_general, equivalent
from .languages import (
    POSITIVE_WORD_STABLE,
    STABLE_ALL,
    definite_rep,
    enumerate_members,
    ergodic_test,
    extract_dfa,
    extraction_state_bound,
    isolation_scan,
    member,
    shift_cutpoint,
    stability_check,
)
from .linauto import (
    LinearAutomaton,
    StringFunctionTable,
    e_f_dimension,
    la_combine,
    la_equivalent,
    la_language_pa,
    la_reaction,
    la_to_pa_affine,
    la_to_rational_expr,
    la_unary,
    realize,
    to_sexpr,
)
from .moorepa import MoorePA, avg_equivalent, avg_reaction, reduce_avg
from .sequences import MarkovChain, RandomSequence, mc_function, transform
from .tolerances import Tolerances, get_default, set_default


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def fmt_word(u) -> str:
    if not u:
        return "ε"
    if all(len(s) == 1 for s in u):
        return "".join(u)
    return " ".join(u)


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _load(path: str):
    try:
        return pio.load(path)
    except FileNotFoundError:
        raise CliError(f"{path}: no such file") from None
    except pio.SchemaError as exc:
        raise CliError(str(exc)) from None
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def _expect(obj, kinds, path: str):
    names = {
        GeneralPA: "general_pa",
        MoorePA: "moore_pa",
        LinearAutomaton: "linear_automaton",
        MarkovChain: "markov_chain",
        Dfa: "dfa",
        StringFunctionTable: "string_function",
        RandomSequence: "random_sequence",
    }
    if not isinstance(obj, kinds):
        wanted = ", ".join(names[k] for k in (kinds if isinstance(kinds, tuple) else (kinds,)))
        raise CliError(f"{path}: expected kind {wanted}, got {names[type(obj)]}")
    return obj


def _word(obj, text: str):
    if isinstance(obj, (GeneralPA, MoorePA, LinearAutomaton)):
        alphabet = obj.inputs
    elif isinstance(obj, MarkovChain):
        alphabet = obj.signals
    else:
        alphabet = obj.alphabet
    try:
        return pio.parse_word(text, alphabet)
    except pio.SchemaError as exc:
        raise CliError(str(exc)) from None


def cmd_validate(args) -> int:
    obj = _load(args.file)
    doc = pio.to_document(obj)
    detail = ""
    if isinstance(obj, (GeneralPA, MoorePA, LinearAutomaton)):
        detail = f" states={obj.initial.size}"
    elif isinstance(obj, (MarkovChain,)):
        detail = f" states={obj.n_states}"
    elif isinstance(obj, Dfa):
        detail = f" states={obj.n_states}"
    print(f"ok: kind={doc['kind']}{detail}")
    return 0


def cmd_react(args) -> int:
    obj = _expect(_load(args.file), (GeneralPA, MoorePA, LinearAutomaton), args.file)
    u = _word(obj, args.input)
    if isinstance(obj, GeneralPA):
        if args.output is None:
            raise CliError("general_pa reactions need --output")
        v = tuple(pio.parse_word(args.output, obj.outputs))
        print(fmt(reaction(obj, u, v)))
    elif isinstance(obj, MoorePA):
        print(fmt(avg_reaction(obj, u)))
    else:
        print(fmt(la_reaction(obj, u)))
    return 0


def cmd_reduce(args) -> int:
    obj = _expect(_load(args.file), (GeneralPA, MoorePA), args.file)
    before = obj.initial.size
    reduced = reduce_general(obj) if isinstance(obj, GeneralPA) else reduce_avg(obj)
    pio.save(reduced, args.output)
    print(f"states: {before} -> {reduced.initial.size}")
    return 0


def cmd_equiv(args) -> int:
    a = _load(args.a)
    b = _load(args.b)
    if type(a) is not type(b):
        raise CliError("cannot compare automata of different kinds")
    if isinstance(a, GeneralPA):
        same = equivalent(a, b)
    elif isinstance(a, MoorePA):
        same = avg_equivalent(a, b)
    elif isinstance(a, LinearAutomaton):
        same = la_equivalent(a, b)
    else:
        raise CliError("equiv supports general_pa, moore_pa and linear_automaton")
    print("equivalent" if same else "not equivalent")
    return 0 if same else 1


def cmd_lang_member(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    u = _word(a, args.input)
    hit = member(a, args.cutpoint, u)
    print("member" if hit else "not member")
    return 0 if hit else 1


def cmd_lang_enum(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    for u in enumerate_members(a, args.cutpoint, args.max_len):
        print(fmt_word(u))
    return 0


def cmd_lang_shift(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    shifted = shift_cutpoint(a, args.src_cut, args.dst_cut)
    pio.save(shifted, args.output)
    print(f"cutpoint: {fmt(args.src_cut)} -> {fmt(args.dst_cut)}; states: "
          f"{a.n_states} -> {shifted.n_states}")
    return 0


def cmd_isolate(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    try:
        report = isolation_scan(a, args.cutpoint, args.delta, args.max_len)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if report.refuted:
        print(f"refuted: u={fmt_word(report.witness)} f={fmt(report.witness_value)}")
        return 1
    print(f"clear up to {report.max_len} (delta={fmt(report.delta)})")
    return 0


def cmd_extract_dfa(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    raw = extract_dfa(a, args.cutpoint, args.delta, minimize=False)
    minimized = extract_dfa(a, args.cutpoint, args.delta)
    bound = extraction_state_bound(a.n_states, args.delta)
    print(f"states: raw={raw.n_states} minimized={minimized.n_states} bound={fmt(bound)}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dfa_to_dot(minimized))
    if args.output:
        pio.save(minimized, args.output)
    return 0


def cmd_ergodic(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    ok, witness = ergodic_test(a)
    if ok:
        print("ergodic")
        return 0
    print(f"not ergodic (witness: {witness})")
    return 1


def cmd_stable(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    report = stability_check(a)
    if report.status == STABLE_ALL:
        print("stable (all letter matrices contract)")
        return 0
    if report.status == POSITIVE_WORD_STABLE:
        print(f"stable (positive words, l={report.word_length})")
        return 0
    print("unknown")
    return 1


def cmd_definite(args) -> int:
    a = _expect(_load(args.file), MoorePA, args.file)
    rep = definite_rep(a, args.cutpoint, args.delta)
    if rep is None:
        print("not derivable (needs positive matrices or ergodicity)")
        return 1
    accepting = sum(1 for v in rep.suffix_table.values() if v)
    print(f"definite k={rep.k} suffix-classes={len(rep.suffix_table)} accepting={accepting}")
    return 0


LA_BINARY = {"sum": "sum", "prod": "product", "conv": "convolution"}
LA_UNARY = {"scale": "scale", "rev": "reverse", "iter": "iterate"}


def cmd_la_op(args) -> int:
    a = _expect(_load(args.a), LinearAutomaton, args.a)
    if args.op in LA_BINARY:
        if args.b is None:
            raise CliError(f"la op {args.op} needs two operands")
        b = _expect(_load(args.b), LinearAutomaton, args.b)
        out = la_combine(LA_BINARY[args.op], a, b)
    else:
        if args.op == "scale" and args.scalar is None:
            raise CliError("la op scale needs --scalar")
        try:
            out = la_unary(LA_UNARY[args.op], a, a=args.scalar)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    pio.save(out, args.output)
    print(f"dim: {out.dim}")
    return 0


def cmd_la_realize(args) -> int:
    table = _expect(_load(args.file), StringFunctionTable, args.file)
    try:
        out = realize(table)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    pio.save(out, args.output)
    print(f"dim: {out.dim}")
    return 0


def cmd_la_rank(args) -> int:
    table = _expect(_load(args.file), StringFunctionTable, args.file)
    print(e_f_dimension(table))
    return 0


def cmd_la_expr(args) -> int:
    a = _expect(_load(args.file), LinearAutomaton, args.file)
    print(to_sexpr(la_to_rational_expr(a)))
    return 0


def cmd_la_embed_pa(args) -> int:
    a = _expect(_load(args.file), LinearAutomaton, args.file)
    pa, scale = la_to_pa_affine(a)
    pio.save(pa, args.output)
    print(f"states: {pa.n_states} scale: {fmt(scale)} offset: {fmt(1.0 / (a.dim + 2))}")
    return 0


def cmd_la_lang_pa(args) -> int:
    a = _expect(_load(args.file), LinearAutomaton, args.file)
    pa, cut = la_language_pa(a, args.cutpoint)
    pio.save(pa, args.output)
    print(f"states: {pa.n_states} cutpoint: {fmt(cut)}")
    return 0


def cmd_mc_eval(args) -> int:
    chain = _expect(_load(args.file), MarkovChain, args.file)
    u = _word(chain, args.input)
    print(fmt(mc_function(chain, u)))
    return 0


def cmd_rs_transform(args) -> int:
    zeta = _expect(_load(args.seq), RandomSequence, args.seq)
    a = _expect(_load(args.pa), GeneralPA, args.pa)
    try:
        image = transform(zeta, a)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    pio.save(image, args.output)
    print(f"depth: {image.depth}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probautomata",
        description="Probabilistic, weighted and cut-point automata toolkit",
    )
    parser.add_argument(
        "--tolerance", type=float, default=None, metavar="EPS",
        help="override every numeric tolerance with EPS",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a JSON automaton file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("react", help="evaluate a reaction")
    p.add_argument("file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_react)

    p = sub.add_parser("reduce", help="equivalent automaton with fewer states")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("equiv", help="decide equality of reactions")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_equiv)

    lang = sub.add_parser("lang", help="cut-point languages").add_subparsers(
        dest="lang_command", required=True
    )
    p = lang.add_parser("member")
    p.add_argument("file")
    p.add_argument("--cutpoint", type=float, required=True)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_lang_member)
    p = lang.add_parser("enum")
    p.add_argument("file")
    p.add_argument("--cutpoint", type=float, required=True)
    p.add_argument("--max-len", type=int, default=4)
    p.set_defaults(func=cmd_lang_enum)
    p = lang.add_parser("shift")
    p.add_argument("file")
    p.add_argument("--from", dest="src_cut", type=float, required=True)
    p.add_argument("--to", dest="dst_cut", type=float, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_lang_shift)

    p = sub.add_parser("isolate", help="bounded isolation scan")
    p.add_argument("file")
    p.add_argument("--cutpoint", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(func=cmd_isolate)

    p = sub.add_parser("extract-dfa", help="regular language under isolation")
    p.add_argument("file")
    p.add_argument("--cutpoint", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--dot", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_extract_dfa)

    p = sub.add_parser("ergodic", help="ergodicity criterion")
    p.add_argument("file")
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("stable", help="stability of isolated cut points")
    p.add_argument("file")
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("definite", help="suffix-determined representation")
    p.add_argument("file")
    p.add_argument("--cutpoint", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_definite)

    la = sub.add_parser("la", help="linear automata").add_subparsers(
        dest="la_command", required=True
    )
    p = la.add_parser("op")
    p.add_argument("op", choices=sorted(LA_BINARY) + sorted(LA_UNARY))
    p.add_argument("a")
    p.add_argument("b", nargs="?", default=None)
    p.add_argument("--scalar", type=float, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_la_op)
    p = la.add_parser("realize")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_la_realize)
    p = la.add_parser("rank")
    p.add_argument("file")
    p.set_defaults(func=cmd_la_rank)
    p = la.add_parser("expr")
    p.add_argument("file")
    p.set_defaults(func=cmd_la_expr)
    p = la.add_parser("embed-pa")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_la_embed_pa)
    p = la.add_parser("lang-pa")
    p.add_argument("file")
    p.add_argument("--cutpoint", type=float, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_la_lang_pa)

    mc = sub.add_parser("mc", help="Markov chains").add_subparsers(
        dest="mc_command", required=True
    )
    p = mc.add_parser("eval")
    p.add_argument("file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_mc_eval)

    rs = sub.add_parser("rs", help="random sequences").add_subparsers(
        dest="rs_command", required=True
    )
    p = rs.add_parser("transform")
    p.add_argument("seq")
    p.add_argument("pa")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_rs_transform)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    previous = get_default()
    if args.tolerance is not None:
        if args.tolerance <= 0:
            print("tolerance must be positive", file=sys.stderr)
            return 2
        eps = args.tolerance
        set_default(Tolerances(zero=eps, sum=eps, nonneg=eps, rank=eps, lp=eps))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    finally:
        set_default(previous)


if __name__ == "__main__":
    sys.exit(main())
