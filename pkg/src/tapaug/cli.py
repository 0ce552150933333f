"""Command-line interface: ``tapaug <command> ...``.

Exit codes: 0 ok, 1 invariant or certificate failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .audit import audit_ledger
from .contraction import InvariantViolation, solve, trace_to_jsonl
from .generate import MODES, GenSpec, generate
from .instance import InstanceError, format_instance, parse_instance, shadow_completion
from .leafcover import LeafWeightConfig, link_weight, min_weight_exact_cover
from .lpbound import build_cut_model, build_pi_model, solve_lp
from .oracle import exact_opt
from .stress import dumps, fraction_str, run_stress

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def rho_arg(text: str) -> Fraction:
    value = parse_fraction(text)
    if value < Fraction(3, 2):
        raise argparse.ArgumentTypeError("rho must be at least 3/2")
    return value


def _links(links) -> list[list[int]]:
    return [list(l) for l in sorted(links)]


def _fmt_links(links) -> str:
    return " ".join(f"{u}-{v}" for u, v in sorted(links)) or "(none)"


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _load(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_instance(text)


def cmd_gen(args) -> int:
    spec = GenSpec(args.n, args.density, args.seed, args.mode)
    sys.stdout.write(format_instance(generate(spec)))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    snapshots: list[str] = []

    def keep_dot(state) -> None:
        snapshots.append(state.to_dot())

    result = solve(inst, args.rho, snapshot=keep_dot if args.emit_dot else None)
    if args.emit_dot:
        out = Path(args.emit_dot)
        out.mkdir(parents=True, exist_ok=True)
        for i, dot in enumerate(snapshots):
            (out / f"step{i:03d}.dot").write_text(dot, encoding="utf-8")
    if args.trace:
        Path(args.trace).write_text(trace_to_jsonl(result.trace, result.instance), encoding="utf-8")
    payload = {"size": len(result.solution), "links": _links(result.solution),
               "steps": [r.kind for r in result.trace.records]}
    lines = [f"size {len(result.solution)}", f"links {_fmt_links(result.solution)}"]
    code = EXIT_OK
    if getattr(args, "audit", False):
        closed = result.instance
        lp = solve_lp(build_pi_model(closed), closed)
        report = audit_ledger(result, lp)
        payload.update({"tau": fraction_str(lp.tau), "bound": fraction_str(report.rhs),
                        "audit_ok": report.ok, "failures": report.failures,
                        "steps_audit": [{"kind": s.kind, "tokens": fraction_str(s.tokens),
                                         "tokens_alt": fraction_str(s.tokens_alt),
                                         "slack": fraction_str(s.slack)} for s in report.steps]})
        lines.append(f"tau {fraction_str(lp.tau)}  bound {fraction_str(report.rhs)}  "
                     f"rho*tau {fraction_str(args.rho * lp.tau)}")
        for s in report.steps:
            lines.append(f"  step {s.index} {s.kind}: tokens {fraction_str(s.tokens)} "
                         f"(alt {fraction_str(s.tokens_alt)}) links {s.links} "
                         f"slack {fraction_str(s.slack)}")
        lines.append("audit ok" if report.ok else "audit FAILED: " + "; ".join(report.failures))
        code = EXIT_OK if report.ok else EXIT_FAIL
    _emit(args, payload, "\n".join(lines))
    return code


def cmd_audit(args) -> int:
    args.audit = True
    return cmd_solve(args)


def cmd_leafcover(args) -> int:
    inst = shadow_completion(_load(args.instance))
    cfg = LeafWeightConfig(args.rho)
    cover = min_weight_exact_cover(cfg, inst)
    weights = {l: link_weight(cfg, inst, l) for l in cover.links}
    payload = {"weight": fraction_str(cover.weight),
               "links": [[u, v, fraction_str(weights[(u, v)])] for u, v in sorted(cover.links)],
               "matching": _links(cover.matching_part)}
    text = "\n".join([f"weight {fraction_str(cover.weight)}"]
                     + [f"link {u} {v} {fraction_str(weights[(u, v)])}" for u, v in sorted(cover.links)])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_bound(args) -> int:
    inst = shadow_completion(_load(args.instance))
    model = build_pi_model(inst)
    if args.lp_format == "text":
        sys.stdout.write(model.text())
        return EXIT_OK
    lp = solve_lp(model, inst)
    cut = solve_lp(build_cut_model(inst), inst)
    payload = {"tau": fraction_str(lp.tau), "cut": fraction_str(cut.tau),
               "x": {f"{u}-{v}": fraction_str(q) for (u, v), q in sorted(lp.x.items())}}
    text = "\n".join([f"tau {fraction_str(lp.tau)}", f"cut {fraction_str(cut.tau)}"]
                     + [f"x {u} {v} {fraction_str(q)}" for (u, v), q in sorted(lp.x.items())])
    _emit(args, payload, text)
    return EXIT_OK


def cmd_exact(args) -> int:
    inst = _load(args.instance)
    res = exact_opt(inst)
    witness = sorted(res.witnesses[0]) if res.witnesses else []
    # always JSON: the output is meant for scripts
    print(json.dumps({"opt": res.opt_size, "witness": [list(l) for l in witness]}, sort_keys=True))
    return EXIT_OK


def cmd_stress(args) -> int:
    report = run_stress(args.count, args.n_min, args.n_max, args.seed, args.rho, args.workers)
    if args.json:
        print(dumps(report))
    else:
        print(f"instances {report.instances}")
        print(f"max |ALG|/OPT {fraction_str(report.max_ratio_opt)}")
        print(f"max |ALG|/tau {fraction_str(report.max_ratio_tau)}")
        for f in report.failures:
            print(f"FAIL seed {f['seed']} {f['check']}: {f['detail']}")
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommand copies must not reset values given before the subcommand
        default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        flags = argparse.ArgumentParser(add_help=False)
        flags.add_argument("--json", action="store_true", default=default(False),
                           help="machine-readable output")
        flags.add_argument("--emit-dot", metavar="DIR", default=default(None),
                           help="write T/I snapshots as DOT files")
        flags.add_argument("--rho", type=rho_arg, default=default(Fraction(7, 4)),
                           help="weight parameter p/q, at least 3/2")
        return flags

    parser = argparse.ArgumentParser(prog="tapaug", parents=[global_flags(False)],
                                     description="Tree augmentation with an LP-certified 7/4 bound.")
    common = global_flags(True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a random feasible instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=parse_fraction, default=Fraction(1, 4))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="random-tree")
    p.set_defaults(func=cmd_gen)

    for name, func, help_ in (("solve", cmd_solve, "run the approximation algorithm"),
                              ("audit", cmd_audit, "solve and audit the token ledger")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("instance", help="instance file, or - for stdin")
        p.add_argument("--trace", metavar="FILE", help="write the contraction trace as JSON lines")
        if name == "solve":
            p.add_argument("--audit", action="store_true", help="also solve the LP and audit")
        p.set_defaults(func=func)

    p = sub.add_parser("leafcover", parents=[common], help="minimum-weight exact leaf cover")
    p.add_argument("instance")
    p.set_defaults(func=cmd_leafcover)

    p = sub.add_parser("bound", parents=[common], help="LP value, cut-LP value and x")
    p.add_argument("instance")
    p.add_argument("--lp-format", choices=("text",), help="dump the LP rows instead of solving")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("exact", parents=[common], help="brute-force optimum")
    p.add_argument("instance")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("stress", parents=[common], help="randomised guarantee sweep")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_stress)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantViolation, AssertionError) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())


def main_entry() -> None:
    sys.exit(main())
