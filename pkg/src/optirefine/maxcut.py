"""Max-cut refinement: flip exactly ``k`` vertices of ``U`` to maximize ``cut(U xor C)``.

Flipping ``u`` changes the cut by ``deg[u] - 2 * cross[u]`` where ``cross[u]`` is
the weight from ``u`` to the other side; every routine keeps ``cross`` up to
date instead of recomputing the cut.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .graph import Assignment, Graph, RefinementInstance, VertexSet, as_mask, cut_value, degrees_into
from .measures import MAXCUT_KR
from .rng import stream
from .sdp import round_vectors, random_unit_vector, build_gpkc_sdp, default_repetitions, gw_maxcut, rounding_driver, solve_sdp

MaxCutSolver = Callable[[Graph], object]


@dataclass(frozen=True)
class CutResult:
    chosen: VertexSet
    final_set: VertexSet
    cut_before: float
    cut_after: float
    algorithm: str
    wall_time: float = 0.0
    flags: tuple = ()

    @property
    def k(self) -> int:
        return len(self.chosen)

    def to_record(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "k": self.k,
            "chosen": self.chosen.sorted(),
            "cut_before": self.cut_before,
            "cut_after": self.cut_after,
            "wall_time": self.wall_time,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _result(inst: RefinementInstance, chosen: VertexSet, algorithm: str, t0: float, flags=()) -> CutResult:
    if len(chosen) != inst.k:
        raise RuntimeError(f"{algorithm}: |C|={len(chosen)} but k={inst.k}")
    g, U = inst.graph, inst.initial_set
    final = U ^ chosen
    return CutResult(chosen, final, cut_value(g, U), cut_value(g, final), algorithm,
                     time.perf_counter() - t0, tuple(flags))


def _cross_weights(g: Graph, side: np.ndarray) -> np.ndarray:
    into = degrees_into(g, side)
    return np.where(side, g.degree - into, into)


def _flip(g: Graph, side: np.ndarray, cross: np.ndarray, u: int) -> None:
    nbr, wt = g.neighbors(u)
    same = side[nbr] == side[u]
    # neighbours on u's old side now see u across the cut
    cross[nbr] += np.where(same, wt, -wt)
    cross[u] = g.degree[u] - cross[u]
    side[u] = not side[u]


def greedy_fix_cut(g: Graph, U: VertexSet, k: int, C0: VertexSet, trace: list | None = None) -> VertexSet:
    """Grow or shrink ``C0`` to size ``k``, one best-cut flip at a time.

    With ``trace`` given, each removal step appends ``(cut, |C|, cut_after)``.
    """
    if not 0 <= k <= g.n:
        raise ValueError(f"k must be in [0, {g.n}]")
    C = C0.mask().copy()
    side = U.mask() ^ C
    cross = _cross_weights(g, side)
    cut = float(cross.sum()) / 2
    size = int(C.sum())
    while size != k:
        adding = size < k
        gain = g.degree - 2 * cross
        pool = ~C if adding else C
        u = int(np.argmax(np.where(pool, gain, -np.inf)))
        new_cut = cut + float(gain[u])
        if trace is not None and not adding:
            trace.append((cut, size, new_cut))
        _flip(g, side, cross, u)
        C[u] = adding
        size += 1 if adding else -1
        cut = new_cut
    return VertexSet.from_mask(C)


def _as_side(g: Graph, t) -> VertexSet:
    return VertexSet.from_mask(as_mask(t, g.n))


def greedy_maxcut(g: Graph) -> Assignment:
    """Place vertices in id order on the side cutting more placed weight; ties go to side -1."""
    x = np.zeros(g.n, dtype=np.int8)
    for v in range(g.n):
        nbr, wt = g.neighbors(v)
        placed = x[nbr]
        plus = float(wt[placed == 1].sum())
        minus = float(wt[placed == -1].sum())
        x[v] = 1 if minus > plus else -1
    return Assignment(x)


def local_search_maxcut(g: Graph, init, eps: float = 1e-12, shuffle_seed=None) -> Assignment:
    """Single-vertex flips until no flip gains more than ``eps``.

    Sweeps visit vertices in id order, or in a seeded random order per sweep
    when ``shuffle_seed`` is given.
    """
    side = as_mask(init, g.n).copy()
    cross = _cross_weights(g, side)
    deg = g.degree
    rng = stream(shuffle_seed, "local-search") if shuffle_seed is not None else None
    improved = True
    while improved:
        improved = False
        order = rng.permutation(g.n) if rng is not None else range(g.n)
        for v in order:
            if deg[v] - 2 * cross[v] > eps:
                _flip(g, side, cross, int(v))
                improved = True
    return Assignment(np.where(side, 1, -1).astype(np.int8))


def gw_cut(g: Graph, roundings: int = 20, seed=0, local: bool = False, tol: float = 1e-4) -> Assignment:
    """Best of ``roundings`` hyperplane roundings of the max-cut relaxation, optionally polished by local search."""
    if g.n == 0:
        return Assignment(np.zeros(0, dtype=np.int8))
    sol = gw_maxcut(g, tol=tol, seed=0 if seed is None else seed)
    best, best_cut = None, -np.inf
    for i in range(roundings):
        x = round_vectors(sol.vectors, random_unit_vector(stream(seed, "gw", i), sol.rank))
        if local:
            x = local_search_maxcut(g, x == 1).values
        c = cut_value(g, x == 1)
        if c > best_cut:
            best, best_cut = x, c
    return Assignment(best)


def gw_solver(roundings: int = 20, seed=0) -> MaxCutSolver:
    def solve(g: Graph):
        return gw_cut(g, roundings=roundings, seed=seed)
    return solve


def greedy_local_solver(g: Graph) -> Assignment:
    return local_search_maxcut(g, greedy_maxcut(g))


def maxcutkr_blackbox(inst: RefinementInstance, maxcut_solver: MaxCutSolver | None = None,
                      name: str = "blackbox") -> CutResult:
    """Refinement through an unconstrained max-cut solver.

    The solver's cut ``(T, V - T)`` gives ``C0`` as the smaller of ``T xor U``
    and its complement, which greedy fixing brings to size ``k``.  Budgets
    above ``n/2`` are solved as ``n - k`` and complemented, which leaves the
    cut unchanged.
    """
    t0 = time.perf_counter()
    g, U, k = inst.graph, inst.initial_set, inst.k
    solver = maxcut_solver or gw_solver()
    if 2 * k > g.n:
        kk = g.n - k
        side = _as_side(g, solver(g))
        chosen = _blackbox_fix(g, U, kk, side).complement()
    else:
        chosen = _blackbox_fix(g, U, k, _as_side(g, solver(g)))
    return _result(inst, chosen, name, t0)


def _blackbox_fix(g: Graph, U: VertexSet, k: int, T: VertexSet) -> VertexSet:
    a = T ^ U
    b = a.complement()
    c0 = a if len(a) <= len(b) else b
    return greedy_fix_cut(g, U, k, c0)


def sdp_maxcutkr(inst: RefinementInstance, N: int | None = None, seed: int = 0, tol: float = 1e-4,
                 max_iters: int = 2000) -> CutResult:
    """Cardinality-constrained relaxation, hyperplane rounding and greedy fixing; best cut over ``N`` roundings."""
    t0 = time.perf_counter()
    if inst.measure is not None and inst.measure != MAXCUT_KR:
        raise ValueError("sdp_maxcutkr needs the MaxCutKR measure")
    inst = replace(inst, measure=MAXCUT_KR)
    g, U, k = inst.graph, inst.initial_set, inst.k
    sol = solve_sdp(build_gpkc_sdp(inst), tol=tol, max_iters=max_iters, seed=seed)
    N = default_repetitions(g.n) if N is None else N

    def fixer(outcome):
        return greedy_fix_cut(g, U, k, outcome.changed_set)

    chosen = rounding_driver(inst, sol, N, fixer, seed, objective=lambda s: cut_value(g, s))
    return _result(inst, chosen, "sdp", t0, sol.flags)


def greedy_maxcutkr(inst: RefinementInstance) -> CutResult:
    """``k`` rounds of flipping the unflipped vertex that gives the largest cut."""
    t0 = time.perf_counter()
    chosen = greedy_fix_cut(inst.graph, inst.initial_set, inst.k, VertexSet.empty(inst.n))
    return _result(inst, chosen, "greedy", t0)


def maxcutcc_via_maxcutkr(g: Graph, k: int, solver: Callable[[RefinementInstance], CutResult]) -> VertexSet:
    """Max cut with one side of exactly ``k`` vertices, from a refinement solver started at the empty set."""
    res = solver(RefinementInstance(g, VertexSet.empty(g.n), k, MAXCUT_KR))
    return res.final_set
