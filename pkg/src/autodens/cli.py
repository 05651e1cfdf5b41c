"""Command line interface: autodens {info,decompose,density,extremal,verify}.

Exit codes: 0 success, 1 domain error (or a failed verification), 2 input
error.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .density import frac_str, logdensity_set
from .dfao import load_dfao, serialize_dfao, symbol_token
from .errors import AutodensError, DomainError, InputError
from .extremal import build_problem, lower_density, upper_density
from .mullner import cycle_notation, mullner_decompose
from .structure import analyze, decompose, generators
from .subseq import SubsequenceKind, density_reports
from .verify import compare, empirical_density

PREVIEW_DEPTH = 6


def _word(w):
    return "".join(str(d) for d in w) or "(empty)"


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _along(text):
    try:
        return SubsequenceKind.parse(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(exc.args[0])


# ---------------------------------------------------------------------------
# Commands. Each returns (json-able dict, text, exit code).


def cmd_info(args):
    a = load_dfao(args.file)
    rep = analyze(a)
    name = {q: symbol_token(q) for q in a.states}
    out = {"base": a.base, "states": len(a.states), "prolongable": a.is_prolongable(),
           "symbols": [symbol_token(s) for s in sorted({a.output[q] for q in a.states}, key=str)],
           "primitive": rep.primitive, "zero_cycle_lcm": rep.exponent,
           "sccs": [{"states": [name[q] for q in c], "final": f}
                    for c, f in zip(rep.sccs, rep.final)],
           "final_components": [{"states": [name[q] for q in c.states],
                                 "column_number": c.column_number,
                                 "family": [[name[q] for q in s] for s in c.family],
                                 "minimizing_word": _word(c.minimizing_word),
                                 "primitive": c.primitive} for c in rep.components]}
    lines = [f"base {a.base}, {len(a.states)} states, symbols {' '.join(out['symbols'])}",
             f"prolongable: {out['prolongable']}, primitive: {rep.primitive}, "
             f"0-cycle lcm: {rep.exponent}"]
    for i, c in enumerate(out["final_components"], 1):
        lines.append(f"final component {i}: {{{', '.join(c['states'])}}} "
                     f"column number {c['column_number']}, minimizing word {c['minimizing_word']}")
    out["structure"] = []
    for c in decompose(a).components:
        md = mullner_decompose(c.dfao)
        item = {"component": c.index, "rebased": md.base, "column": md.column,
                "family_size": len(md.family), "sets": len(md.sets),
                "group_order": len(md.group),
                "generators": [cycle_notation(g) for g in md.generators],
                "period": md.d, "coset_sizes": [len(md.cosets[j]) for j in range(md.d)],
                "i0": md.i0 + 1, "synchronizing": md.synchronizing}
        out["structure"].append(item)
        lines.append(f"component {c.index}: base {md.base}, c = {md.column}, |X| = {len(md.family)}, "
                     f"|G| = {len(md.group)} generated by {', '.join(item['generators'])}, "
                     f"d = {md.d}, cosets {item['coset_sizes']}, i0 = {md.i0 + 1}, "
                     f"synchronizing: {md.synchronizing}")
    return out, "\n".join(lines), 0


def cmd_decompose(args):
    a = load_dfao(args.file)
    dec = decompose(a)
    outdir = Path(args.outdir) if args.outdir else Path(args.file).parent
    outdir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.file).stem
    comps = []
    lines = [f"base {dec.original_base}, read in base {dec.base} (exponent {dec.exponent}); "
             f"{len(dec.components)} component(s)"]
    for c in dec.components:
        bpath = outdir / f"{stem}.b{c.index}"
        mpath = outdir / f"{stem}.m{c.index}"
        bpath.write_text(serialize_dfao(c.dfao))
        mpath.write_text(serialize_dfao(c.indicator))
        gen = generators(c.indicator, args.depth)
        dlog = logdensity_set(c.indicator)
        comps.append({"index": c.index, "final_component": c.final_index + 1,
                      "start": symbol_token(c.start), "states": len(c.dfao.states),
                      "b_file": str(bpath), "m_file": str(mpath),
                      "generators": gen.elements, "generators_finite": gen.finite,
                      "generator_counts": gen.s_counts, "pending_counts": gen.pending_counts,
                      "log_density": dlog.to_json()})
        more = "" if gen.finite else " ..."
        lines.append(f"component {c.index}: {len(c.dfao.states)} states, "
                     f"generators {gen.elements}{more}, d_log(M) = {dlog}")
        lines.append(f"  wrote {bpath} and {mpath}")
    flags = {"residual_certified": dec.residual_certified,
             "residual_growth": dec.residual_growth}
    lines.append(f"residual set thin: {dec.residual_certified} "
                 f"(growth {dec.residual_growth:.4g} < {dec.base})")
    out = {"base": dec.original_base, "working_base": dec.base, "exponent": dec.exponent,
           "components": comps, "flags": flags, "notes": dec.notes}
    return out, "\n".join(lines), 0


def cmd_density(args):
    a = load_dfao(args.file)
    natural, log = density_reports(a, args.along, args.eps)
    nat_json, log_json = natural.to_json(), log.to_json()
    if args.log:
        out = dict(log_json)
        out["natural"] = {"exists": natural.exists, "values": nat_json["values"]}
        if "witness" in nat_json:
            out["natural"]["witness"] = nat_json["witness"]
    else:
        out = dict(nat_json)
        out["log"] = log_json["values"]
    lines = [f"along {args.along}:"]
    if natural.exists:
        lines.append("natural density: " + ", ".join(
            f"{s} -> {frac_str(natural.values[s])}" for s in natural.symbols))
    else:
        sym, i, vi, j, vj = natural.witness
        lines.append(f"natural density does not exist: components {i} and {j} give "
                     f"{sym} densities {frac_str(vi)} and {frac_str(vj)}")
    lines.append("logarithmic density:")
    for s, v in log.values.items():
        lines.append(f"  {s} -> {v}  [{float(v.lo):.12f}, {float(v.hi):.12f}]")
    return out, "\n".join(lines), 0


def cmd_extremal(args):
    a = load_dfao(args.file)
    prob = build_problem(a, args.along, args.alpha)
    up = upper_density(prob)
    lo = lower_density(prob)

    def cert(r):
        return {"preperiod": _word(r.preperiod), "period": _word(r.period),
                "inner_optimum": frac_str(r.inner_optimum), "certified": r.certified}

    out = {"along": str(args.along), "alpha": args.alpha, "upper": frac_str(up.value),
           "lower": frac_str(lo.value), "certificate": {"upper": cert(up), "lower": cert(lo)}}
    text = (f"along {args.along}, symbol {args.alpha}: upper {frac_str(up.value)} "
            f"(string {_word(up.preperiod)}({_word(up.period)})*), lower {frac_str(lo.value)} "
            f"(string {_word(lo.preperiod)}({_word(lo.period)})*)")
    return out, text, 0


def cmd_verify(args):
    a = load_dfao(args.file)
    natural, log = density_reports(a, args.along)
    mode = "logarithmic" if args.log else "natural"
    emp = empirical_density(a, args.along, args.limit, mode, args.by)
    cmp = compare(log if args.log else natural, emp, args.tol)
    out = {"comparison": cmp.to_json(), "empirical": emp.to_json()}
    text = (f"{mode} density along {args.along}, {emp.total} samples "
            f"({args.by} bound {args.limit}, {emp.seconds:.2f}s)\n" + cmp.text())
    return out, text, 0 if cmp.passed else 1


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="automaton file")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="autodens",
                                     description="Densities of automatic sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="structure of an automaton")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("decompose", parents=[common], help="primitive components")
    p.add_argument("--outdir", help="directory for the .bN/.mN files (default: next to input)")
    p.add_argument("--depth", type=int, default=PREVIEW_DEPTH, help="generator preview depth")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("density", parents=[common], help="exact densities")
    p.add_argument("--along", type=_along, default=SubsequenceKind("naturals"))
    p.add_argument("--log", action="store_true", help="report logarithmic densities first")
    p.add_argument("--eps", type=_fraction, default=None, help="enclosure width target")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("extremal", parents=[common], help="upper and lower densities")
    p.add_argument("--along", type=_along, default=SubsequenceKind("primes"))
    p.add_argument("--alpha", required=True, help="output symbol")
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("verify", parents=[common], help="compare with brute force")
    p.add_argument("--along", type=_along, default=SubsequenceKind("naturals"))
    p.add_argument("--limit", type=int, default=10**5)
    p.add_argument("--by", choices=("index", "value"), default="index")
    p.add_argument("--tol", type=_fraction, default=Fraction(1, 100))
    p.add_argument("--log", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "eps", None) is not None and args.eps <= 0:
        parser.error("--eps must be positive")
    if getattr(args, "limit", 1) < 1:
        parser.error("--limit must be positive")
    if getattr(args, "depth", 0) < 0:
        parser.error("--depth must be nonnegative")
    try:
        out, text, code = args.func(args)
    except OSError as exc:
        print(f"autodens: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except DomainError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except AutodensError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    if args.format == "json":
        print(json.dumps(out, indent=2))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
