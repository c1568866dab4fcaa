"""Command line front end.

Subcommands: emd, embed, distortion, sweep, nn, calibrate.  All file output
is byte-reproducible for identical flags; wall-clock timing goes to stderr
only.  Exit codes: 0 success, 2 configuration/input error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import bench, embedding, measures, transport
from .measures import DomainSpec, ProbabilityMeasure, Topology


def _metric_for(domain: DomainSpec, flag) -> transport.GroundMetric:
    if flag is None:
        return transport.GroundMetric(domain)
    return transport.GroundMetric(DomainSpec(domain.n, Topology(flag)))


def _load_probability(path) -> ProbabilityMeasure:
    return ProbabilityMeasure(measures.read_measure(path))


def _write_text(path, text) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_emd(args) -> int:
    mu = _load_probability(args.fileA)
    nu = _load_probability(args.fileB)
    if mu.domain != nu.domain:
        raise ValueError("input measures live on different domains")
    metric = _metric_for(mu.domain, args.metric)
    if metric.domain != mu.domain:
        mu = ProbabilityMeasure(measures.from_dense(metric.domain, mu.mass))
        nu = ProbabilityMeasure(measures.from_dense(metric.domain, nu.mass))
    cost, plan = transport.emd(mu, nu, metric)
    if args.plan:
        lines = [
            f"{p[0]} {p[1]} {q[0]} {q[1]} {m!r}" for p, q, m in plan.entries
        ]
        lines.append(f"cost {cost!r}")
        _write_text(args.plan, "\n".join(lines) + "\n")
    print(f"cost {cost!r}")
    return 0


def _cmd_embed(args) -> int:
    mu = _load_probability(args.measure_file)
    vec = embedding.embed(mu)
    lines = [f"n {vec.domain.n} embedded"]
    for part in (vec.partA, vec.partB):
        for x in part.ravel(order="C"):
            lines.append(repr(float(x)))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _parse_mix(n: int) -> tuple:
    # SparseK needs k <= n^2; keep the default mix once it fits
    if n * n >= 8:
        return bench.DEFAULT_MIX
    return ((measures.DiracPair(), 0.5), (measures.DenseDirichlet(), 0.5))


def _cmd_distortion(args) -> int:
    cfg = bench.ExperimentConfig(
        n=args.n,
        pair_count=args.pairs,
        seed=args.seed,
        mix=_parse_mix(args.n),
        topology=Topology(args.metric),
        variant=args.variant,
    )
    t0 = time.perf_counter()
    report = bench.run_distortion_experiment(cfg)
    _stopwatch(t0)
    text = bench.report_to_json(report)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args) -> int:
    ns = [int(x) for x in args.ns.split(",") if x]
    if not ns:
        raise ValueError("--ns must list at least one side length")
    t0 = time.perf_counter()
    reports = bench.run_scaling_sweep(
        ns,
        pair_count=args.pairs,
        seed=args.seed,
        mix=_parse_mix(min(ns)),
        topology=Topology(args.metric),
        variant=args.variant,
    )
    _stopwatch(t0)
    text = bench.sweep_to_csv(reports)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_nn(args) -> int:
    cfg = bench.ExperimentConfig(
        n=args.n,
        pair_count=1,
        seed=args.seed,
        mix=_parse_mix(args.n),
        topology=Topology(args.metric),
        variant=args.variant,
    )
    t0 = time.perf_counter()
    report = bench.run_nn_experiment(cfg, args.dataset, args.queries)
    _stopwatch(t0)
    text = bench.report_to_json(report)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_calibrate(args) -> int:
    t0 = time.perf_counter()
    kappa = bench.calibrate(
        args.n, args.seed, args.samples, args.variant, Topology(args.metric),
        _parse_mix(args.n),
    )
    _stopwatch(t0)
    print(f"kappa {kappa!r}")
    return 0


def _stopwatch(t0) -> None:
    print(f"elapsed {1000.0 * (time.perf_counter() - t0):.1f} ms", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planar-emd",
        description="Exact planar earthmover distances and their L1 embedding",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emd", help="exact transport distance between two measures")
    p.add_argument("fileA")
    p.add_argument("fileB")
    p.add_argument("--metric", choices=["grid", "torus"], default=None)
    p.add_argument("--plan", metavar="OUT", default=None)
    p.set_defaults(func=_cmd_emd)

    p = sub.add_parser("embed", help="embed a torus measure into L1 + L1")
    p.add_argument("measure_file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("distortion", help="measure empirical distortion")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--variant", choices=list(bench.VARIANTS), default="ab")
    p.add_argument("--metric", choices=["grid", "torus"], default="torus")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_distortion)

    p = sub.add_parser("sweep", help="distortion across several side lengths")
    p.add_argument("--ns", required=True, help="comma-separated side lengths")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--variant", choices=list(bench.VARIANTS), default="ab")
    p.add_argument("--metric", choices=["grid", "torus"], default="torus")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("nn", help="nearest-neighbor recall of the embedding")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dataset", type=int, required=True)
    p.add_argument("--queries", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--variant", choices=list(bench.VARIANTS), default="ab")
    p.add_argument("--metric", choices=["grid", "torus"], default="torus")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_nn)

    p = sub.add_parser("calibrate", help="estimate the embedding scale kappa")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--variant", choices=list(bench.VARIANTS), default="ab")
    p.add_argument("--metric", choices=["grid", "torus"], default="torus")
    p.set_defaults(func=_cmd_calibrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except transport.SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
