"""Experiment protocols, metrics and CSV output.

A run expands an ``ExperimentSpec`` into rows ``(repeat, k, algorithm)`` in a
fixed order.  Each row gets its own seed derived from the experiment seed, so the
CSV (minus the wall-time column) is a function of the ExperimentSpec alone.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from .densest import dks_via_dskr, dskr_blackbox, greedy_dskr, peel_dks, sdp_dskr
from .graph import Graph, RefinementInstance, VertexSet, cut_value, density
from .io import load_communities, load_edge_list, load_vertex_set
from .maxcut import (greedy_local_solver, greedy_maxcut, greedy_maxcutkr, gw_solver, maxcutkr_blackbox,
                     sdp_maxcutkr)
from .measures import KDENSIFY, MAXCUT_KR
from .rng import derive_seed, stream
from .sbm import generate_sbm, preset

log = logging.getLogger(__name__)

CSV_HEADER = ["dataset", "algorithm", "objective", "k", "seed", "before", "after",
              "relative_increase", "jaccard", "wall_time_s", "flags"]
UNDEFINED = "undefined"
RANDOM_DRAWS = 5


def perturb_remove(U: VertexSet, k: int, seed) -> tuple[VertexSet, VertexSet]:
    """Drop ``k`` uniformly chosen members of ``U``; returns the rest and the dropped set."""
    if not 0 <= k <= len(U):
        raise ValueError(f"cannot remove {k} of {len(U)} vertices")
    members = np.array(U.sorted(), dtype=np.int64)
    removed = stream(seed, "perturb").choice(members, size=k, replace=False) if k else []
    gone = VertexSet.of(removed, U.n)
    return U - gone, gone


def relative_increase(before: float, after: float) -> float:
    """``(after - before) / before``; NaN when ``before <= 0``."""
    if before <= 0:
        return math.nan
    return (after - before) / before


def jaccard(a: VertexSet, b: VertexSet) -> float:
    union = len(a | b)
    return 1.0 if union == 0 else len(a & b) / union


def jaccard_matrix(sets: list[VertexSet]) -> np.ndarray:
    m = len(sets)
    out = np.ones((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = jaccard(sets[i], sets[j])
    return out


# --- algorithms -----------------------------------------------------------

def _dks_by_sdp(seed):
    def solve(g: Graph, k: int) -> VertexSet:
        return dks_via_dskr(g, k, partial(sdp_dskr, seed=seed))
    return solve


def _random_choice(inst: RefinementInstance, seed, draw: int) -> VertexSet:
    picked = stream(seed, "random", draw).choice(inst.n, size=inst.k, replace=False)
    return VertexSet.of(picked, inst.n)


def _run_algorithm(objective: str, name: str, inst: RefinementInstance, seed):
    """Returns ``(chosen, after, flags)``."""
    g, U = inst.graph, inst.initial_set
    value = density if objective == "density" else cut_value
    if name == "random":
        draws = [_random_choice(inst, seed, d) for d in range(RANDOM_DRAWS)]
        after = float(np.mean([value(g, U ^ c) for c in draws]))
        return draws[0], after, ("mean-of-5",)
    if objective == "density":
        algos = {
            "greedy": greedy_dskr,
            "blackbox-peel": partial(dskr_blackbox, dks_solver=peel_dks, name="blackbox-peel"),
            "blackbox-sdp": partial(dskr_blackbox, dks_solver=_dks_by_sdp(seed), name="blackbox-sdp"),
            "sdp": partial(sdp_dskr, seed=seed),
        }
        inst = RefinementInstance(g, U, inst.k, KDENSIFY)
    else:
        algos = {
            "greedy": greedy_maxcutkr,
            "blackbox-greedy": partial(maxcutkr_blackbox, maxcut_solver=greedy_maxcut, name="blackbox-greedy"),
            "blackbox-local": partial(maxcutkr_blackbox, maxcut_solver=greedy_local_solver, name="blackbox-local"),
            "blackbox-sdp": partial(maxcutkr_blackbox, maxcut_solver=gw_solver(20, seed), name="blackbox-sdp"),
            "sdp": partial(sdp_maxcutkr, seed=seed),
        }
        inst = RefinementInstance(g, U, inst.k, MAXCUT_KR)
    if name not in algos:
        raise ValueError(f"algorithm {name!r} is not available for objective {objective!r}")
    res = algos[name](inst)
    after = res.density_after if objective == "density" else res.cut_after
    return res.chosen, after, res.flags


DENSITY_ALGORITHMS = ("greedy", "blackbox-peel", "blackbox-sdp", "sdp", "random")
CUT_ALGORITHMS = ("greedy", "blackbox-greedy", "blackbox-local", "blackbox-sdp", "sdp", "random")
SDP_ALGORITHMS = ("sdp", "blackbox-sdp")


def algorithms_for(objective: str) -> tuple[str, ...]:
    if objective == "density":
        return DENSITY_ALGORITHMS
    if objective == "cut":
        return CUT_ALGORITHMS
    raise ValueError(f"objective must be 'density' or 'cut', got {objective!r}")


def solve(inst: RefinementInstance, objective: str, algorithm: str, seed=0):
    """Run one named algorithm; returns ``(C, value after, flags)``."""
    return _run_algorithm(objective, algorithm, inst, seed)


# --- experiment specs -----------------------------------------------------

@dataclass
class ExperimentSpec:
    """One experiment.

    ``dataset`` is an SBM preset (``sbm-balanced``, ``sbm-dense``,
    ``sbm-sparse``) or an edge-list path.  ``initial`` is ``community:I``,
    ``file:PATH``, ``empty`` or ``random``.  Give either ``k`` (absolute
    budgets) or ``k_percent`` (percent of ``|U|``, rounded, at least 1).
    With ``perturb="remove"`` each budget first removes ``k`` random members
    of ``U`` and the algorithms try to recover them.
    """

    dataset: str = "sbm-balanced"
    initial: str = "community:0"
    perturb: str = "none"
    k: list[int] = field(default_factory=list)
    k_percent: list[float] = field(default_factory=list)
    algorithms: list[str] = field(default_factory=list)
    objective: str = "density"
    repeats: int = 1
    seed: int = 0
    output: str | None = None
    communities: str | None = None  # two-column 'vertex community' file for file datasets
    sbm_size: int = 250
    sdp_max_n: int = 3000
    workers: int = 1

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls(**json.load(fh))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass
class MetricsRecord:
    dataset: str
    algorithm: str
    objective: str
    k: int
    seed: int
    before: float
    after: float
    relative_increase: float
    jaccard: float | None
    wall_time_s: float
    flags: tuple = ()
    chosen: VertexSet | None = field(default=None, repr=False)

    def row(self) -> list[str]:
        def num(x):
            return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))

        rel = UNDEFINED if math.isnan(self.relative_increase) else repr(float(self.relative_increase))
        return [self.dataset, self.algorithm, self.objective, str(self.k), str(self.seed), num(self.before),
                num(self.after), rel, num(self.jaccard), f"{self.wall_time_s:.6f}", ";".join(self.flags)]


def _load_dataset(spec: ExperimentSpec, repeat: int) -> tuple[Graph, list[VertexSet] | None]:
    if spec.dataset.startswith("sbm-"):
        cfg = preset(spec.dataset[4:], seed=derive_seed(spec.seed, "graph", repeat), size=spec.sbm_size)
        return generate_sbm(cfg)
    g = load_edge_list(spec.dataset)
    comms = None
    if spec.communities:
        comms = load_communities(spec.communities, g)
    return g, comms


def _initial_set(spec: ExperimentSpec, g: Graph, comms, repeat: int) -> VertexSet:
    rule = spec.initial
    if rule == "empty":
        return VertexSet.empty(g.n)
    if rule == "random":
        rng = stream(spec.seed, "initial", repeat)
        return VertexSet.from_mask(rng.random(g.n) < 0.5)
    if rule.startswith("community:"):
        if comms is None:
            raise ValueError("dataset has no communities")
        return comms[int(rule.split(":", 1)[1])]
    if rule.startswith("file:"):
        return load_vertex_set(rule.split(":", 1)[1], g)
    raise ValueError(f"unknown initial-set rule {rule!r}")


def k_schedule(spec: ExperimentSpec, U: VertexSet, n: int) -> list[int]:
    ks = list(spec.k) + [max(1, int(math.floor(p / 100 * len(U) + 0.5))) for p in spec.k_percent]
    for k in ks:
        if not 1 <= k <= n:
            raise ValueError(f"budget {k} invalid for n={n}")
        if spec.perturb == "remove" and k > len(U):
            raise ValueError(f"cannot remove {k} vertices from |U|={len(U)}")
    return ks


def _row(spec, g, U, reference, k, algorithm, seed) -> MetricsRecord:
    value = density if spec.objective == "density" else cut_value
    before = value(g, U)
    if algorithm in SDP_ALGORITHMS and g.n > spec.sdp_max_n:
        return MetricsRecord(spec.dataset, algorithm, spec.objective, k, seed, before, math.nan, math.nan,
                             None, 0.0, (f"skipped-n>{spec.sdp_max_n}",))
    t0 = time.perf_counter()
    try:
        inst = RefinementInstance(g, U, k)
        chosen, after, flags = _run_algorithm(spec.objective, algorithm, inst, seed)
        if len(chosen) != k:
            raise RuntimeError(f"{algorithm} returned |C|={len(chosen)} for k={k}")
    except Exception as exc:  # a failed row is reported, the batch goes on
        log.warning("%s k=%d seed=%d failed: %s", algorithm, k, seed, exc)
        return MetricsRecord(spec.dataset, algorithm, spec.objective, k, seed, before, math.nan, math.nan,
                             None, time.perf_counter() - t0, (f"error:{type(exc).__name__}",))
    wall = time.perf_counter() - t0
    jac = jaccard(U ^ chosen, reference) if reference is not None else None
    return MetricsRecord(spec.dataset, algorithm, spec.objective, k, seed, before, after,
                         relative_increase(before, after), jac, wall, tuple(flags), chosen)


def run_experiment(spec: ExperimentSpec) -> list[MetricsRecord]:
    """Run every (repeat, k, algorithm) row and write the CSV if ``spec.output`` is set."""
    for a in spec.algorithms:
        if a not in algorithms_for(spec.objective):
            raise ValueError(f"algorithm {a!r} is not available for objective {spec.objective!r}")
    tasks = []
    for repeat in range(spec.repeats):
        if not spec.algorithms:
            break
        g, comms = _load_dataset(spec, repeat)
        U0 = _initial_set(spec, g, comms, repeat)
        for k in k_schedule(spec, U0, g.n):
            if spec.perturb == "remove":
                U, _ = perturb_remove(U0, k, derive_seed(spec.seed, "perturb", k, repeat))
                reference = U0
            elif spec.perturb == "none":
                U, reference = U0, None
            else:
                raise ValueError(f"unknown perturbation {spec.perturb!r}")
            for a in spec.algorithms:
                tasks.append((g, U, reference, k, a, derive_seed(spec.seed, a, k, repeat)))
    run = lambda t: _row(spec, *t)  # noqa: E731
    if spec.workers > 1:
        # map() yields in submission order, so the CSV order does not depend on scheduling
        with ThreadPoolExecutor(spec.workers) as pool:
            records = list(pool.map(run, tasks))
    else:
        records = [run(t) for t in tasks]
    if spec.output:
        write_csv(records, spec.output)
    return records


def write_csv(records: list[MetricsRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.row())


def summarize(records: list[MetricsRecord]) -> dict:
    """Mean relative increase per (algorithm, k)."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.algorithm, r.k), []).append(r.relative_increase)
    return {key: float(np.nanmean(v)) if not all(map(math.isnan, v)) else math.nan for key, v in groups.items()}
