"""Seed-averaged planted-community and random-start runs at the published sizes.

    python3 scripts/desk_reproduction.py [--sdp]

``--sdp`` adds the relaxation-based algorithms (n = 1000; several minutes).
"""
import argparse

from optirefine.bench import ExperimentSpec, run_experiment, summarize

ap = argparse.ArgumentParser()
ap.add_argument("--sdp", action="store_true")
ap.add_argument("--seed", type=int, default=1)
args = ap.parse_args()

density_algos = ["greedy", "blackbox-peel", "random"] + (["sdp"] if args.sdp else [])
cut_algos = ["greedy", "blackbox-greedy", "blackbox-local", "random"] + (["sdp"] if args.sdp else [])
runs = {
    "dense, U = community 0": dict(dataset="sbm-dense", initial="community:0", k=[25], algorithms=density_algos),
    "dense, 25 members removed": dict(dataset="sbm-dense", initial="community:0", k=[25], perturb="remove",
                                      algorithms=density_algos),
    "sparse, U = community 0": dict(dataset="sbm-sparse", initial="community:0", k=[25], algorithms=density_algos),
    "balanced, random partition": dict(dataset="sbm-balanced", initial="random", objective="cut", k=[50],
                                       algorithms=cut_algos),
}
for title, kw in runs.items():
    res = summarize(run_experiment(ExperimentSpec(repeats=5, seed=args.seed, **kw)))
    print(title)
    for (algo, k), v in res.items():
        print(f"  {algo:16s} k={k:3d}  relative increase {v:+.4f}")
