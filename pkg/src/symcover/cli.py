"""Command-line interface.

Subcommands: solve (full pipeline), backbones, cover, matrix, reduce,
verify, partial, canonical.  Exit codes: 0 success, 1 verification
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .backbones import DEFAULT_BOUND, find_backbones_iterative, find_backbones_sat
from .breaks import BreakSpec, redundancy_ratio, verify_break
from .graphs import canonical_graph_ids, count_canonical
from .patterns import enumerate_instances, instance_count, patterns_of
from .perms import (
    non_identity_permutations,
    parse_permutation,
    transpositions,
)
from .pipeline import PipelineConfig, RunReport, run_pipeline
from .setcover import (
    build_matrix,
    dump_matrix,
    export_opb,
    load_matrix,
    reduce_matrix,
    solve_exact,
)

COVER_ID_PRINT_LIMIT = 1 << 16


def _cmd_solve(args: argparse.Namespace) -> int:
    cfg = PipelineConfig(
        n=args.n,
        bound=args.bound,
        skip_iterative=True if args.skip_iterative else (False if args.iterative else None),
        out_path=args.out,
        report_path=args.report or (args.out + ".report.json" if args.out else None),
        state_path=args.state,
        long_run=args.long_run,
    )
    spec, report = run_pipeline(cfg, log=lambda msg: print(msg, file=sys.stderr))
    line = (
        f"order {report.order}: opt={report.opt} bb1={report.bb1} bb2={report.bb2} "
        f"rows={report.rows} cols={report.cols} sets={report.cover_min}-{report.cover_max} "
        f"enc_size={report.enc_clauses} rounds={report.rounds}"
    )
    print(line)
    for phase, seconds in report.timings.items():
        print(f"  time[{phase}] = {seconds:.1f}s", file=sys.stderr)
    if cfg.out_path:
        print(f"break file: {cfg.out_path}")
        print(f"report file: {cfg.report_path}")
    else:
        sys.stdout.write(spec.to_json())
    if report.verified is False:
        return 1
    return 0


def _cmd_backbones(args: argparse.Namespace) -> int:
    results = {}
    if args.method in ("iter", "both"):
        state = find_backbones_iterative(args.n, bound=args.bound)
        results["iter"] = list(state.beta)
        print(f"iterative: {len(state.beta)} backbones ({state.stats.as_dict()})")
    if args.method in ("sat", "both"):
        universe = non_identity_permutations(args.n)
        seed = results.get("iter", ())
        sat_bb = find_backbones_sat(universe, seed=seed)
        results["sat"] = sat_bb
        print(f"sat: {len(sat_bb)} backbones")
    for name, perms in results.items():
        for pi in perms:
            print(f"{name} {pi}")
    return 0


def _cmd_cover(args: argparse.Namespace) -> int:
    pi = parse_permutation(args.perm)
    if pi.degree != args.n:
        print(f"permutation degree {pi.degree} != order {args.n}", file=sys.stderr)
        return 2
    if pi.is_identity():
        print("identity permutation covers nothing")
        return 0
    pats = patterns_of(pi)
    total = 0
    for p in pats:
        count = instance_count(p)
        total += count
        print(f"pattern i={p.first_diff}: {p.text()} (instances {count})")
    print(f"cover size {total}")
    if total <= COVER_ID_PRINT_LIMIT:
        ids = sorted(g.graph_id for p in pats for g in enumerate_instances(p))
        print("ids: " + ",".join(str(i) for i in ids))
    return 0


def _cmd_matrix(args: argparse.Namespace) -> int:
    beta = []
    if args.beta:
        beta = list(BreakSpec.load(args.beta).permutations)
    rows = [p for p in non_identity_permutations(args.n) if p not in set(beta)]
    mat = build_matrix(rows, beta, order=args.n, method=args.method)
    lo, hi = mat.weight_range()
    print(f"matrix {mat.shape[0]}x{mat.shape[1]}, row weights {lo}-{hi}")
    if args.dump:
        with open(args.dump, "w") as fh:
            dump_matrix(mat, fh)
        print(f"dump: {args.dump}")
    if args.opb:
        with open(args.opb, "w") as fh:
            export_opb(mat, fh)
        print(f"opb: {args.opb}")
    return 0


def _cmd_reduce(args: argparse.Namespace) -> int:
    with open(args.matrix) as fh:
        mat = load_matrix(fh)
    red = reduce_matrix(mat)
    print(
        f"reduced {mat.shape[0]}x{mat.shape[1]} -> {red.shape[0]}x{red.shape[1]}, "
        f"forced {len(red.forced) - len(mat.forced)} rows"
    )
    for pi in red.forced:
        print(f"forced {pi}")
    if args.solve:
        sol = solve_exact(mat)
        print(f"optimal cover: {len(sol.chosen)} rows")
        for pi in sol.chosen:
            print(f"chosen {pi}")
    if args.dump:
        with open(args.dump, "w") as fh:
            dump_matrix(red, fh)
        print(f"dump: {args.dump}")
    if args.opb:
        with open(args.opb, "w") as fh:
            export_opb(red, fh)
        print(f"opb: {args.opb}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    spec = BreakSpec.load(args.break_file)
    solutions = verify_break(spec, long_run=args.long_run)
    if args.expected is not None:
        expected = args.expected
    else:
        expected = count_canonical(spec.order, max_order=8 if args.long_run else 7)
    status = "OK" if solutions == expected else "MISMATCH"
    print(f"{solutions} solutions, expected {expected}, {status}")
    return 0 if status == "OK" else 1


def _cmd_partial(args: argparse.Namespace) -> int:
    if args.mode == "trns":
        perms = transpositions(args.n)
    else:
        perms = list(find_backbones_iterative(args.n, bound=args.bound).beta)
    ratio = redundancy_ratio(perms, args.n)
    print(f"{len(perms)} permutations, rho = {float(ratio):.2f} ({float(ratio):.6f})")
    return 0


def _cmd_canonical(args: argparse.Namespace) -> int:
    count = count_canonical(args.n)
    print(f"canonical graphs of order {args.n}: {count}")
    if args.list:
        ids = canonical_graph_ids(args.n)
        print("ids: " + ",".join(str(i) for i in ids))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symcover",
        description="Minimum-cardinality complete symmetry breaks for simple graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the full pipeline for one order")
    p.add_argument("-n", type=int, required=True, help="graph order")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="huge-cover bound B")
    p.add_argument("--out", help="write the break JSON here")
    p.add_argument("--report", help="write the run report here")
    p.add_argument("--state", help="checkpoint file for resumable runs")
    p.add_argument("--skip-iterative", action="store_true", help="skip the graph sweep")
    p.add_argument("--iterative", action="store_true", help="force the graph sweep")
    p.add_argument("--long-run", action="store_true", help="allow orders above 8")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("backbones", help="find backbone permutations")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--method", choices=["iter", "sat", "both"], default="iter")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(func=_cmd_backbones)

    p = sub.add_parser("cover", help="patterns and covered graphs of one permutation")
    p.add_argument("--perm", required=True, help='image notation, e.g. "[1,2,4,3]"')
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=_cmd_cover)

    p = sub.add_parser("matrix", help="build the explicit cover matrix")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--beta", help="break JSON whose permutations are excluded")
    p.add_argument("--method", choices=["auto", "sweep", "sat"], default="auto")
    p.add_argument("--dump", help="write the matrix dump here")
    p.add_argument("--opb", help="write the pseudo-Boolean instance here")
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("reduce", help="reduce a dumped matrix")
    p.add_argument("--matrix", required=True, help="matrix dump file")
    p.add_argument("--solve", action="store_true", help="also solve to optimality")
    p.add_argument("--dump", help="write the reduced matrix here")
    p.add_argument("--opb", help="write the reduced pseudo-Boolean instance here")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("verify", help="count the solutions of a break file")
    p.add_argument("--break", dest="break_file", required=True)
    p.add_argument("--long-run", action="store_true", help="allow order 8 sweeps")
    p.add_argument("--expected", type=int, help="override the expected count")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("partial", help="partial-break size and redundancy ratio")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--mode", choices=["trns", "backbones"], required=True)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(func=_cmd_partial)

    p = sub.add_parser("canonical", help="count or list canonical graphs")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=_cmd_canonical)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OverflowError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
