"""meshplace command-line interface.

Subcommands: gen (synthetic topology), validate (invariant check),
place (run one strategy), compare (multi-run strategy comparison),
stats (centrality / ECDF / asymmetry / exponential fit).

Exit codes: 0 success, 1 runtime failure (bad data, I/O, budget refusal),
2 usage error (bad flags or parameter values). All file outputs are
written atomically, and all randomness is seed-controlled, so identical
invocations produce byte-identical files. Timing is volatile and is
therefore left out of output files unless --with-timing is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from meshplace.baselines import (
    OracleBudget,
    OracleBudgetError,
    brute_force_optimal,
    naive_kmeans_placement,
    random_placement,
)
from meshplace.harness import ExperimentSpec, improvement, run_experiment
from meshplace.netgraph import (
    GraphFormatError,
    NetworkGraph,
    _atomic_write_text,
    load_graph_json,
    save_graph_json,
    validate,
)
from meshplace.netstats import centrality, ecdf, fit_exponential, link_asymmetry
from meshplace.placement import Placement, basp
from meshplace.synthgen import GenerationError, TopologyProfile, generate


class UsageError(Exception):
    """Flag-level misuse that should exit with code 2."""


def _load_valid_graph(path: str) -> NetworkGraph:
    g = load_graph_json(path)
    violations = validate(g)
    if violations:
        raise GraphFormatError(
            f"{path}: graph fails validation:\n  " + "\n  ".join(violations)
        )
    return g


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        _atomic_write_text(path, text)


def _profile_from_args(args: argparse.Namespace) -> TopologyProfile:
    fields: dict = {}
    if args.profile:
        try:
            with open(args.profile) as fh:
                fields.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read profile file: {exc}") from exc
    overrides = {
        "n": args.n,
        "area_m": args.area,
        "bw_mean_mbps": args.bw_mean,
        "unidirectional_share": args.uni_share,
        "target_mean_degree": args.mean_degree,
        "seed": args.seed,
    }
    fields.update({key: val for key, val in overrides.items() if val is not None})
    try:
        profile = TopologyProfile.from_dict(fields)
        profile.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return profile


def cmd_gen(args: argparse.Namespace) -> int:
    profile = _profile_from_args(args)
    g = generate(profile)
    save_graph_json(g, args.output)
    stats = link_asymmetry(g, 0.3)
    mean_bw = sum(link.bandwidth for link in g.links) / len(g.links)
    print(
        f"wrote {args.output}: n={g.n} links={len(g.links)} "
        f"unidirectional_share={stats.unidirectional_share:.3f} "
        f"mean_bw={mean_bw:.2f} Mbps"
    )
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    g = load_graph_json(args.graph)
    violations = validate(g)
    if violations:
        for violation in violations:
            print(violation)
        print(f"{args.graph}: {len(violations)} violation(s)", file=sys.stderr)
        return 1
    print(f"{args.graph}: ok (n={g.n}, links={len(g.links)})")
    return 0


def cmd_place(args: argparse.Namespace) -> int:
    if args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    if args.reps < 1:
        raise UsageError(f"--reps must be >= 1, got {args.reps}")
    g = _load_valid_graph(args.graph)
    if args.algo == "basp":
        report = basp(g, args.k, args.seed, args.reps)
    elif args.algo == "naive":
        report = naive_kmeans_placement(g, args.k, args.seed, args.reps)
    elif args.algo == "random":
        report = random_placement(g, args.k, args.seed, args.random_assignment)
    else:
        budget = OracleBudget(
            max_combinations=args.budget_combinations, max_seconds=args.budget_seconds
        )
        report = brute_force_optimal(g, args.k, budget)
    if args.dump_partition:
        partition = report.extras.get("partition")
        if partition is None:
            raise UsageError(f"strategy {args.algo!r} has no k-means partition to dump")
        _write_output(args.dump_partition, json.dumps(partition, indent=2, sort_keys=True) + "\n")
    _write_output(args.output, report.to_json(timing=args.with_timing))
    if args.output and args.output != "-":
        print(
            f"{args.algo} k={report.placement.k}: objective={report.objective:.2f} Mbps, "
            f"mean bw to head={report.mean_bw_to_head:.3f} Mbps "
            f"({report.runtime:.3f}s) -> {args.output}"
        )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    sources = sum(1 for x in (args.graph, args.profile) if x)
    if sources != 1:
        raise UsageError("exactly one graph source required: a graph file or --profile")
    try:
        ks = tuple(int(part) for part in args.k.split(","))
        strategies = tuple(part.strip() for part in args.strategies.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"bad list flag: {exc}") from exc
    profile = None
    if args.profile:
        try:
            with open(args.profile) as fh:
                profile = TopologyProfile.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise UsageError(f"cannot read profile file: {exc}") from exc
    graph = _load_valid_graph(args.graph) if args.graph else None
    try:
        spec = ExperimentSpec(
            ks=ks,
            strategies=strategies,
            runs=args.runs,
            repetitions=args.reps,
            base_seed=args.seed,
            graph=graph,
            profile=profile,
            budget=OracleBudget(
                max_combinations=args.budget_combinations, max_seconds=args.budget_seconds
            ),
            timeout_seconds=args.timeout,
            random_assignment=args.random_assignment,
        )
        spec.validate_spec()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    table = run_experiment(spec)
    if all(cell.absent for cell in table.cells):
        print("error: no strategy produced a successful run", file=sys.stderr)
        return 1
    for cell in table.cells:
        if cell.absent:
            print(f"warning: cell ({cell.strategy}, k={cell.k}) is absent", file=sys.stderr)
    if args.format == "json":
        text = table.to_json(timing=args.with_timing)
    elif args.format == "csv":
        text = table.to_csv(timing=args.with_timing)
    else:
        text = table.to_text(timing=args.with_timing)
        present = list(dict.fromkeys(c.strategy for c in table.cells if not c.absent))
        if "basp" in present:
            for other in present:
                if other == "basp":
                    continue
                gains = improvement(table, other, "basp")
                rendered = ", ".join(
                    f"k={k}: " + (f"{val:+.1f}%" if val is not None else "absent")
                    for k, val in gains.items()
                )
                text += f"basp vs {other}: {rendered}\n"
    _write_output(args.output, text)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    g = _load_valid_graph(args.graph)
    fmt = args.format
    if args.metric == "asymmetry":
        if not 0 < args.threshold < 1:
            raise UsageError(f"--threshold must be in (0, 1), got {args.threshold}")
        stats = link_asymmetry(g, args.threshold)
        if fmt == "csv":
            text = (
                "threshold,asymmetric_fraction,unidirectional_share,bidirectional_pairs,unidirectional_pairs\n"
                f"{stats.threshold},{stats.asymmetric_fraction:.6g},{stats.unidirectional_share:.6g},"
                f"{stats.bidirectional_pairs},{stats.unidirectional_pairs}\n"
            )
        else:
            text = stats.to_json()
    elif args.metric == "ecdf":
        if args.field != "bw":
            raise UsageError(f"unknown ecdf field {args.field!r} (supported: bw)")
        if not g.links:
            raise GraphFormatError(f"{args.graph}: no links to build an ECDF from")
        table = ecdf([link.bandwidth for link in g.links])
        if fmt == "json":
            text = json.dumps(
                {"values": list(table.values), "cum_fractions": list(table.fractions)},
                indent=2,
                sort_keys=True,
            ) + "\n"
        else:
            text = table.to_csv()
    elif args.metric == "fit":
        samples = [link.bandwidth for link in g.links if link.bandwidth > 0]
        if not samples:
            raise GraphFormatError(f"{args.graph}: no positive bandwidths to fit")
        mean = fit_exponential(samples)
        if fmt == "csv":
            text = f"distribution,mean_mbps,n_samples\nexponential,{mean:.6g},{len(samples)}\n"
        else:
            text = json.dumps(
                {"distribution": "exponential", "mean_mbps": mean, "n_samples": len(samples)},
                indent=2,
                sort_keys=True,
            ) + "\n"
    else:  # centrality
        if not args.placement:
            raise UsageError("--metric centrality requires --placement")
        try:
            with open(args.placement) as fh:
                placement = Placement.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read placement file: {exc}") from exc
        report = centrality(g, placement)
        if fmt == "json":
            text = json.dumps(report.head_rows(), indent=2, sort_keys=True) + "\n"
        else:
            text = report.to_csv()
    _write_output(args.output, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshplace",
        description="Bandwidth-aware service placement for wireless community mesh networks.",
        epilog="Exit codes: 0 success, 1 runtime failure, 2 usage error. "
        "MESHPLACE_THREADS caps internal worker threads (0 = auto).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a calibrated synthetic topology")
    gen.add_argument("--n", type=int, default=None, help="node count (default 54)")
    gen.add_argument("--area", type=float, default=None, help="square side in meters (default 2000)")
    gen.add_argument("--bw-mean", type=float, default=None, help="mean link bandwidth in Mbps (default 21.8)")
    gen.add_argument("--uni-share", type=float, default=None, help="unidirectional pair share (default 0.56)")
    gen.add_argument("--mean-degree", type=float, default=None, help="target mean degree (default 5)")
    gen.add_argument("--seed", type=int, default=None, help="generator seed (default 0)")
    gen.add_argument("--profile", help="JSON profile file; explicit flags override its fields")
    gen.add_argument("-o", "--output", required=True, help="output graph JSON path")
    gen.set_defaults(func=cmd_gen)

    val = sub.add_parser("validate", help="check graph invariants")
    val.add_argument("graph", help="graph JSON path")
    val.set_defaults(func=cmd_validate)

    place = sub.add_parser("place", help="run one placement strategy")
    place.add_argument("graph", help="graph JSON path")
    place.add_argument("--algo", choices=("basp", "naive", "random", "optimal"), default="basp")
    place.add_argument("--k", type=int, required=True, help="number of clusters / services")
    place.add_argument("--seed", type=int, default=0)
    place.add_argument("--reps", type=int, default=15, help="repetitions inside basp/naive (default 15)")
    place.add_argument("--random-assignment", choices=("bandwidth", "geo"), default="bandwidth",
                       help="assignment rule for --algo random (default bandwidth)")
    place.add_argument("--budget-combinations", type=int, default=10_000_000,
                       help="oracle head-set budget (default 1e7)")
    place.add_argument("--budget-seconds", type=float, default=600.0,
                       help="oracle wall-clock budget (default 600)")
    place.add_argument("--dump-partition", metavar="PATH",
                       help="also write the winning k-means partition as JSON")
    place.add_argument("--with-timing", action="store_true",
                       help="include volatile runtime fields in the output file")
    place.add_argument("-o", "--output", default=None, help="report JSON path (default stdout)")
    place.set_defaults(func=cmd_place)

    compare = sub.add_parser("compare", help="multi-run strategy comparison")
    compare.add_argument("graph", nargs="?", help="graph JSON path (or use --profile)")
    compare.add_argument("--profile", help="JSON topology profile to generate the graph from")
    compare.add_argument("--k", required=True, help="comma-separated k values, e.g. 1,2,3")
    compare.add_argument("--strategies", default="basp,naive,random",
                         help="comma-separated subset of basp,naive,random,optimal")
    compare.add_argument("--runs", type=int, default=5)
    compare.add_argument("--reps", type=int, default=15)
    compare.add_argument("--seed", type=int, default=0, help="base seed")
    compare.add_argument("--timeout", type=float, default=300.0, help="per-run timeout in seconds")
    compare.add_argument("--random-assignment", choices=("bandwidth", "geo"), default="bandwidth")
    compare.add_argument("--budget-combinations", type=int, default=10_000_000)
    compare.add_argument("--budget-seconds", type=float, default=600.0)
    compare.add_argument("--format", choices=("table", "json", "csv"), default="table")
    compare.add_argument("--with-timing", action="store_true",
                         help="include volatile runtime fields in the output")
    compare.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    compare.set_defaults(func=cmd_compare)

    stats = sub.add_parser(
        "stats",
        help="snapshot statistics",
        epilog="CSV columns: centrality -> cluster,head,head_degree,"
        "neighborhood_connectivity,diameter; ecdf -> value,cum_fraction; "
        "asymmetry -> threshold,asymmetric_fraction,unidirectional_share,"
        "bidirectional_pairs,unidirectional_pairs; fit -> distribution,mean_mbps,n_samples.",
    )
    stats.add_argument("graph", help="graph JSON path")
    stats.add_argument("--metric", choices=("centrality", "ecdf", "asymmetry", "fit"), required=True)
    stats.add_argument("--threshold", type=float, default=0.3,
                       help="asymmetry deviation threshold (default 0.3)")
    stats.add_argument("--field", default="bw", help="ecdf field (supported: bw)")
    stats.add_argument("--placement", help="placement JSON (required for centrality)")
    stats.add_argument("--format", choices=("csv", "json"), default=None,
                       help="output format (default: csv for centrality/ecdf, json for asymmetry/fit)")
    stats.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "format", "x") is None:
        args.format = "json" if args.metric in ("asymmetry", "fit") else "csv"
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GraphFormatError, OracleBudgetError, GenerationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
