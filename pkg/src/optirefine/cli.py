"""Command line entry point: ``solve``, ``bench``, ``sbm`` and ``ratio-curve``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time

import numpy as np

from .bench import (MetricsRecord, algorithms_for, jaccard, relative_increase, run_experiment, solve, write_csv,
                    ExperimentSpec)
from .graph import RefinementInstance, cut_value, density
from .io import load_communities, load_edge_list, load_vertex_set, write_communities, write_edge_list
from .ratio import approx_ratio_curve
from .rng import derive_seed
from .sbm import PRESETS, generate_sbm, preset


def _tau_grid(tokens: list[str]) -> list[float]:
    if len(tokens) == 1 and tokens[0].count(":") == 2:
        lo, hi, step = (float(t) for t in tokens[0].split(":"))
        return [round(t, 12) for t in np.arange(lo, hi + step / 2, step)]
    return [float(t) for t in tokens]


def cmd_solve(args) -> int:
    g = load_edge_list(args.graph)
    if args.initial_community is not None:
        U = load_communities(args.initial, g)[args.initial_community]
    else:
        U = load_vertex_set(args.initial, g)
    if args.algo not in algorithms_for(args.objective):
        raise SystemExit(f"algorithm {args.algo!r} is not available for objective {args.objective!r}; "
                         f"choose from {', '.join(algorithms_for(args.objective))}")
    inst = RefinementInstance(g, U, args.k)
    value = density if args.objective == "density" else cut_value
    before = value(g, U)
    records, sets = [], []
    for r in range(args.repeats):
        seed = derive_seed(args.seed, args.algo, args.k, r)
        t0 = time.perf_counter()
        chosen, after, flags = solve(inst, args.objective, args.algo, seed)
        records.append(MetricsRecord(args.graph, args.algo, args.objective, args.k, seed, before, after,
                                     relative_increase(before, after), None, time.perf_counter() - t0,
                                     tuple(flags), chosen))
        sets.append([g.label_of(v) for v in chosen])
        print(f"repeat {r}: {args.objective} {before:.6g} -> {after:.6g}  C = {sets[-1]}")
    if args.out:
        write_csv(records, args.out)
    if args.sets:
        with open(args.sets, "w") as fh:
            for rec, labels in zip(records, sets):
                fh.write(json.dumps({"seed": rec.seed, "chosen": labels}) + "\n")
    return 0


def cmd_bench(args) -> int:
    spec = ExperimentSpec.from_file(args.spec)
    if args.out:
        spec.output = args.out
    records = run_experiment(spec)
    for rec in records:
        print(",".join(rec.row()))
    return 0


def cmd_sbm(args) -> int:
    g, comms = generate_sbm(preset(args.preset, seed=args.seed, size=args.size))
    write_edge_list(g, args.out_graph)
    if args.out_communities:
        write_communities(g, comms, args.out_communities)
    print(f"n={g.n} m={g.m}")
    return 0


def cmd_ratio(args) -> int:
    pinned = (args.gamma, args.eta) if args.gamma is not None else None
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["tau", "ratio", "gamma", "eta"])
    for p in approx_ratio_curve(args.problem, _tau_grid(args.tau_grid), pinned=pinned):
        w.writerow([f"{p.tau:.6g}", f"{p.ratio:.6f}", f"{p.gamma:.6g}", f"{p.eta:.6g}"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="optirefine", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="refine one initial set")
    s.add_argument("--graph", required=True)
    s.add_argument("--initial", required=True, help="vertex-set file, or communities file with --initial-community")
    s.add_argument("--initial-community", type=int, default=None)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--algo", required=True,
                   choices=sorted(set(algorithms_for("density")) | set(algorithms_for("cut"))))
    s.add_argument("--objective", choices=["density", "cut"], default="density")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--repeats", type=int, default=1)
    s.add_argument("--out", help="CSV of metrics")
    s.add_argument("--sets", help="JSON lines with the chosen set of every repeat")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run an experiment spec (JSON)")
    b.add_argument("--spec", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("sbm", help="generate a planted-community graph")
    g.add_argument("--preset", choices=sorted(PRESETS), default="balanced")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--size", type=int, default=250, help="vertices per community")
    g.add_argument("--out-graph", required=True)
    g.add_argument("--out-communities")
    g.set_defaults(func=cmd_sbm)

    r = sub.add_parser("ratio-curve", help="worst-case ratio against tau = k/n")
    r.add_argument("--problem", choices=["dskr", "maxcutkr"], required=True)
    r.add_argument("--tau-grid", nargs="+", default=["0.05:0.5:0.05"], help="values or start:stop:step")
    r.add_argument("--gamma", type=float)
    r.add_argument("--eta", type=float)
    r.set_defaults(func=cmd_ratio)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "ratio-curve" and (args.gamma is None) != (args.eta is None):
        raise SystemExit("--gamma and --eta must be given together")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
