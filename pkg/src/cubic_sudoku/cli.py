"""Command-line entry point.

Subcommands: gen, pipeline, verify, min-sudoku, chain, sweep, trajectory,
probe.  Structured artifacts are JSON, time series are CSV; every
subcommand prints a one-line JSON summary to stdout.  Exit codes: 0 on
success, 1 on verification-negative results, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import experiments as ex
from . import graph_core as gc
from . import pipeline as pl
from . import type_chain as tc
from . import verification as vf
from .plots import svg_line_plot
from .rng import DeterministicRandomSource


def _summary(payload: dict):
    print(json.dumps(payload, sort_keys=True))


def _load_any_graph(path: str) -> vf.Graph:
    with open(path) as f:
        data = json.load(f)
    version = data.get("version")
    if version == gc.GRAPH_FORMAT:
        return vf.graph_from_cubic(gc.graph_from_json_dict(data))
    if version == vf.ADJ_FORMAT:
        return vf.Graph(data["n"], [(int(a), int(b)) for a, b in data["edges"]])
    raise ValueError(f"unsupported graph format: {version!r}")


def _cmd_gen(args) -> int:
    graph = gc.generate_graph(args.n, args.seed)
    if args.out:
        gc.write_graph(graph, args.out)
    _summary({"command": "gen", "n": args.n, "seed": args.seed,
              "simple": gc.is_simple(graph), "out": args.out})
    return 0


def _pipeline_config(args) -> pl.PipelineConfig:
    return pl.PipelineConfig(n=args.n, i0=args.i0, tail=args.tail, seed=args.seed,
                             sample_every=args.sample_every)


def _cmd_pipeline(args) -> int:
    config = _pipeline_config(args)
    result = pl.full_pipeline(config)
    bc, buc, bud = result.counts
    payload = {
        "command": "pipeline",
        "n": config.n,
        "seed": config.seed,
        "i0": config.i0,
        "tail": config.tail,
        "completed": result.completed,
        "completion_mode": result.completion_mode,
        "sudoku_size": result.s_size,
        "s_ratio": result.s_size / config.n,
        "counts": {"bc": bc, "buc": buc, "bud": bud},
        "burn_in_discrepancy": result.discrepancy,
    }
    if args.out:
        with open(args.out, "w") as f:
            json.dump(payload, f, sort_keys=True)
            f.write("\n")
    if args.graph:
        gc.write_graph(result.graph, args.graph)
    if args.colouring:
        pl.write_colouring(result.colouring, config.n, args.colouring)
    if args.set:
        pl.write_vertex_set(result.sudoku_set, args.set)
    if args.trajectory:
        pl.write_trajectory_csv(result.trajectory, args.trajectory)
    _summary(payload)
    return 0


def _cmd_verify(args) -> int:
    graph = _load_any_graph(args.graph)
    colouring = pl.load_colouring(args.colouring)
    subset = pl.load_vertex_set(args.set)
    k = args.colours
    if len(colouring) != graph.n + 1:
        raise ValueError("colouring length does not match the graph")
    proper = vf.check_proper(graph, colouring, k)
    if not proper:
        _summary({"command": "verify", "status": "ImproperColouring"})
        return 1
    res = vf.is_sudoku_set(graph, colouring, subset, k)
    payload = {"command": "verify", "status": res.status,
               "set_size": len(subset), "n": graph.n}
    if res.count is not None:
        payload["count"] = res.count
    if res.forced_order is not None:
        payload["forced"] = len(res.forced_order)
    _summary(payload)
    return 0 if res.unique else 1


def _cmd_min_sudoku(args) -> int:
    graph = _load_any_graph(args.graph)
    size, (subset, partial) = vf.min_sudoku_exact(graph, args.colours)
    _summary({"command": "min-sudoku", "n": graph.n, "colours": args.colours,
              "size": size, "set": subset,
              "partial": [partial[v] for v in subset]})
    return 0


def _cmd_chain(args) -> int:
    params = tc.ChainParams(args.q1, args.q2, args.q3)
    matrix = tc.build_q(params)
    irreducible, aperiodic = tc.structure_check(matrix)
    payload = {
        "command": "chain",
        "params": {"q1": args.q1, "q2": args.q2, "q3": args.q3},
        "irreducible": irreducible,
        "aperiodic": aperiodic,
    }
    if irreducible and aperiodic:
        pi = tc.stationary(matrix)
        stats = tc.hitting_stats(matrix, pi)
        alpha, _ = tc.minorization_alpha(matrix, args.power)
        payload.update({
            "pi": [round(float(p), 12) for p in pi],
            "t_mix": tc.mixing_time(matrix, args.eps),
            "eps": args.eps,
            "alpha": alpha,
            "power": args.power,
            "kappa": stats.kappa,
            "c_cond": stats.c_cond_estimate,
        })
    _summary(payload)
    return 0


def _cmd_sweep(args) -> int:
    ns = [int(x) for x in args.ns.split(",") if x]
    rows = ex.sweep(ns, args.trials, seed=args.seed, jobs=args.jobs)
    if args.out:
        ex.write_sweep_csv(rows, args.out)
    _summary({"command": "sweep", "ns": ns, "trials": args.trials,
              "out": args.out,
              "s_ratio_mean": [row["s_ratio_mean"] for row in rows]})
    return 0


def _trajectory_trial(packed):
    n, i0, tail, sample_every, seed, trial = packed
    config = pl.PipelineConfig(n=n, i0=i0, tail=tail, seed=seed,
                               sample_every=sample_every)
    return ex.trajectory_run(config, rng=ex.trial_rng(seed, trial))


def _cmd_trajectory(args) -> int:
    config = _pipeline_config(args)
    packed = [(config.n, config.i0, config.tail, config.sample_every,
               config.seed, t) for t in range(args.trials)]
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_trajectory_trial, packed))
    else:
        records = [_trajectory_trial(p) for p in packed]
    n = config.n
    if args.out:
        pl.write_trajectory_csv(records[0], args.out)
        base = args.out.rsplit(".", 1)[0]
        steps = [row[0] for row in records[0].samples]
        svg_line_plot(
            base + ".svg", steps,
            {"X(i)": [row[1] for row in records[0].samples],
             "n*t(1-t)": [n * (s / n) * (1 - s / n) for s in steps]},
            title=f"unsaturated trajectory, n={n}",
            xlabel="step", ylabel="count")
        if len(records) >= 10:
            bins = ex.bad_density_bins(records, n)
            svg_line_plot(
                base + "-density.svg", [b[0] for b in bins],
                {"bad fraction": [b[1] for b in bins],
                 "1 - 2t/3": [b[2] for b in bins]},
                title=f"conventional-bad density, n={n}, {len(records)} trials",
                xlabel="t", ylabel="fraction")
    spec = ex.EnvelopeSpec(n, tc.estimate_c_cond())
    reports = [ex.envelope_check(rec, spec) for rec in records]
    _summary({"command": "trajectory", "n": n, "seed": config.seed,
              "trials": args.trials, "samples": len(records[0].samples),
              "out": args.out,
              "max_dev_x": max(r.max_dev_x for r in reports),
              "max_dev_balance": max(r.max_dev_balance for r in reports),
              "formal_envelope_holds": all(r.formal_envelope_holds for r in reports),
              "envelope_vacuous": all(r.vacuous for r in reports)})
    return 0


def _cmd_probe(args) -> int:
    res = ex.conjecture_probe(args.n, args.trials, args.budget, seed=args.seed)
    payload = {"command": "probe", "n": args.n, "trials": args.trials,
               "attempts": res.attempts, "budget_exhausted": res.budget_exhausted,
               "best_size": res.best_size, "best_ratio": res.best_ratio}
    _summary(payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubic-sudoku")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pipeline_flags(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--i0", type=int, default=None)
        p.add_argument("--tail", type=int, default=None)
        p.add_argument("--sample-every", dest="sample_every", type=int, default=None)

    p = sub.add_parser("gen", help="generate a random cubic multigraph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("pipeline", help="run the full colouring pipeline")
    add_pipeline_flags(p)
    p.add_argument("--out", default=None)
    p.add_argument("--graph", default=None)
    p.add_argument("--colouring", default=None)
    p.add_argument("--set", default=None)
    p.add_argument("--trajectory", default=None)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("verify", help="verify a colouring and sudoku set")
    p.add_argument("--graph", required=True)
    p.add_argument("--colouring", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--colours", type=int, default=3)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("min-sudoku", help="exact minimum sudoku set (small n)")
    p.add_argument("--graph", required=True)
    p.add_argument("--colours", type=int, default=3)
    p.set_defaults(func=_cmd_min_sudoku)

    p = sub.add_parser("chain", help="type-chain diagnostics")
    p.add_argument("--q1", type=float, required=True)
    p.add_argument("--q2", type=float, required=True)
    p.add_argument("--q3", type=float, required=True)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--power", type=int, default=6)
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("sweep", help="pipeline statistics across sizes")
    p.add_argument("--ns", required=True, help="comma-separated sizes")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("trajectory", help="seeded trajectories with envelope report")
    add_pipeline_flags(p)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("probe", help="decycling-seeded search for short sudoku sets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, vf.GuardExceeded) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
