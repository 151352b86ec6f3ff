"""Densest-subgraph refinement: pick ``k`` vertices ``C`` so that ``U xor C`` is dense.

All greedy choices break ties toward the smallest vertex id.
"""
from __future__ import annotations

import heapq
import json
import logging
import time
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .graph import Graph, RefinementInstance, VertexSet, degrees_into, density
from .measures import KDENSIFY
from .sdp import RoundingOutcome, build_gpkc_sdp, default_repetitions, rounding_driver, solve_sdp

log = logging.getLogger(__name__)

DksSolver = Callable[[Graph, int], VertexSet]


@dataclass(frozen=True)
class DensestResult:
    chosen: VertexSet
    final_set: VertexSet
    density_before: float
    density_after: float
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
            "density_before": self.density_before,
            "density_after": self.density_after,
            "wall_time": self.wall_time,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _result(inst: RefinementInstance, chosen: VertexSet, algorithm: str, t0: float, flags=()) -> DensestResult:
    if len(chosen) != inst.k:
        raise RuntimeError(f"{algorithm}: |C|={len(chosen)} but k={inst.k}")
    g, U = inst.graph, inst.initial_set
    final = U ^ chosen
    return DensestResult(
        chosen=chosen,
        final_set=final,
        density_before=density(g, U),
        density_after=density(g, final),
        algorithm=algorithm,
        wall_time=time.perf_counter() - t0,
        flags=tuple(flags),
    )


def greedy_dskr(inst: RefinementInstance) -> DensestResult:
    """Flip, ``k`` times, the vertex whose flip gives the densest ``U xor C``."""
    t0 = time.perf_counter()
    g = inst.graph
    n = g.n
    S = inst.initial_set.mask().copy()
    in_c = np.zeros(n, dtype=bool)
    deg_s = degrees_into(g, S)
    w = float(g.weight[S[g.src] & S[g.dst]].sum())
    size = int(S.sum())
    for _ in range(inst.k):
        sign = np.where(S, -1.0, 1.0)
        new_w = w + sign * deg_s
        new_size = size + sign
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = np.where(new_size > 0, new_w / np.maximum(new_size, 1), 0.0)
        cand[in_c] = -np.inf
        u = int(np.argmax(cand))
        in_c[u] = True
        w = float(new_w[u])
        size = int(new_size[u])
        nbr, wt = g.neighbors(u)
        deg_s[nbr] += sign[u] * wt
        S[u] = not S[u]
    return _result(inst, VertexSet.from_mask(in_c), "greedy", t0)


def peel_dks(g: Graph, k: int) -> VertexSet:
    """Repeatedly delete a minimum weighted-degree vertex until ``k`` remain.

    Lazy-deletion heap keyed on ``(degree, id)``; O((n + m) log n).
    """
    n = g.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    deg = g.degree.tolist()
    indptr = g.indptr.tolist()
    indices = g.indices.tolist()
    data = g.data.tolist()
    alive = [True] * n
    heap = list(zip(deg, range(n)))
    heapq.heapify(heap)
    remaining = n
    pop, push = heapq.heappop, heapq.heappush
    while remaining > k:
        d, v = pop(heap)
        if not alive[v] or d != deg[v]:
            continue
        alive[v] = False
        remaining -= 1
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if alive[u]:
                du = deg[u] - data[j]
                deg[u] = du
                push(heap, (du, u))
    return VertexSet.from_mask(np.array(alive, dtype=bool))


def contract(g: Graph, U: VertexSet) -> tuple[Graph, np.ndarray]:
    """Merge ``U`` into one supernode.

    Vertices outside ``U`` keep their relative order as ``0..n-|U|-1``; the
    supernode is the last id.  Edges into ``U`` merge by summing weights and
    edges inside ``U`` are dropped.  Returns the graph and the array mapping
    contracted ids back to original ids (-1 for the supernode).
    """
    in_u = U.mask()
    outside = np.flatnonzero(~in_u)
    n2 = len(outside) + 1
    star = n2 - 1
    new_id = np.full(g.n, star, dtype=np.int64)
    new_id[outside] = np.arange(len(outside))
    a, b = new_id[g.src], new_id[g.dst]
    keep = a != b
    h = Graph.from_arrays(n2, a[keep], b[keep], g.weight[keep])
    back = np.append(outside, -1)
    return h, back


def kdensify_via_dks(g: Graph, U: VertexSet, k: int, dks_solver: DksSolver) -> VertexSet:
    """Choose ``k`` vertices outside ``U`` through a densest-(k+1)-subgraph call on the contracted graph."""
    if len(U) < 1:
        raise ValueError("initial set must be nonempty")
    if not 1 <= k <= g.n - len(U):
        raise ValueError(f"k must be in [1, n-|U|={g.n - len(U)}]")
    h, back = contract(g, U)
    star = h.n - 1
    sol = dks_solver(h, k + 1)
    if len(sol) != k + 1:
        raise RuntimeError(f"DkS solver returned {len(sol)} vertices, expected {k + 1}")
    picked = sol.sorted()
    if star in sol:
        chosen = [int(back[v]) for v in picked if v != star]
    else:
        orig = [int(back[v]) for v in picked]
        mask = U.mask()
        mask[orig] = True
        deg_in = degrees_into(g, mask)
        # drop the weakest member of U' inside G[U + U']; min over sorted ids keeps the smallest on ties
        drop = min(orig, key=lambda v: (deg_in[v], v))
        chosen = [v for v in orig if v != drop]
    return VertexSet.of(chosen, g.n)


def _peel_inside_u(g: Graph, U: VertexSet, j: int) -> list[int]:
    """Remove ``j`` members of ``U`` from ``V``, each time the one with least degree into the current set."""
    deg = g.degree.copy()
    cand = U.mask().copy()
    out = []
    for _ in range(j):
        scores = np.where(cand, deg, np.inf)
        v = int(np.argmin(scores))
        out.append(v)
        cand[v] = False
        nbr, wt = g.neighbors(v)
        deg[nbr] -= wt
    return out


def dskr_blackbox(inst: RefinementInstance, dks_solver: DksSolver = peel_dks, name: str = "blackbox") -> DensestResult:
    """Densest-subgraph refinement through a densest-k-subgraph black box.

    Only adds vertices when ``k <= n - |U|``.  Larger budgets add everything
    outside ``U`` and peel the remainder from ``U``; such runs are tagged
    ``out-of-regime`` like runs with ``k > |U|``.
    """
    t0 = time.perf_counter()
    g, U, k = inst.graph, inst.initial_set, inst.k
    if len(U) == 0:
        raise ValueError("empty initial set; use dks_via_dskr for plain densest-k-subgraph")
    flags = []
    c = k / len(U)
    if k > len(U) or k > g.n - len(U):
        warnings.warn(f"budget k={k} outside the analysed regime (k/|U| = {c:.3g})", stacklevel=2)
        flags.append("out-of-regime")
    room = g.n - len(U)
    if k <= room:
        chosen = kdensify_via_dks(g, U, k, dks_solver)
    else:
        removed = _peel_inside_u(g, U, k - room)
        chosen = VertexSet.of(list(U.complement()) + removed, g.n)
    return _result(inst, chosen, name, t0, flags)


def fix_c_dense(g: Graph, U: VertexSet, k: int, outcome: RoundingOutcome, removal: str = "subgraph") -> VertexSet:
    """Repair a rounded change set to exactly ``k`` vertices.

    Too small: add outside vertices with the most weight into ``T = U xor C``.
    Too large: first undo removals from ``U`` (most weight into ``T`` first),
    then drop added vertices of least degree inside ``G[C & T]``.  With
    ``removal="temp"`` the last step instead uses the degree into the current
    ``U xor C``, which is what bounds the loss per removal.
    """
    if removal not in ("subgraph", "temp"):
        raise ValueError(f"removal must be 'subgraph' or 'temp', got {removal!r}")
    C = outcome.changed_set.mask().copy()
    T = U.mask() ^ C
    size = int(C.sum())
    if size < k:
        free = ~(C | T)
        deg_t = degrees_into(g, T)
        while size < k:
            if free.any():
                v = int(np.argmax(np.where(free, deg_t, -np.inf)))
                free[v] = False
                T[v] = True
                sign = 1.0
            else:
                # no untouched outside vertex left: drop a remaining U member instead
                pool = T & ~C
                v = int(np.argmin(np.where(pool, deg_t, np.inf)))
                T[v] = False
                sign = -1.0
            C[v] = True
            size += 1
            nbr, wt = g.neighbors(v)
            deg_t[nbr] += sign * wt
    elif size > k:
        removed_u = C & ~T
        deg_t = degrees_into(g, T)
        while size > k and removed_u.any():
            v = int(np.argmax(np.where(removed_u, deg_t, -np.inf)))
            removed_u[v] = False
            C[v] = False
            T[v] = True
            size -= 1
            nbr, wt = g.neighbors(v)
            deg_t[nbr] += wt
        added = C & T
        # degrees are kept current as vertices leave
        deg_a = degrees_into(g, added if removal == "subgraph" else T)
        while size > k:
            v = int(np.argmin(np.where(added, deg_a, np.inf)))
            added[v] = False
            C[v] = False
            T[v] = False
            size -= 1
            nbr, wt = g.neighbors(v)
            deg_a[nbr] -= wt
    return VertexSet.from_mask(C)


def sdp_dskr(inst: RefinementInstance, N: int | None = None, seed: int = 0, tol: float = 1e-4,
             max_iters: int = 2000, removal: str = "subgraph") -> DensestResult:
    """Vector relaxation, hyperplane rounding and ``fix_c_dense``; best density over ``N`` roundings."""
    t0 = time.perf_counter()
    if inst.measure is not None and inst.measure != KDENSIFY:
        raise ValueError("sdp_dskr needs the KDensify measure")
    inst = replace(inst, measure=KDENSIFY)
    g, U, k = inst.graph, inst.initial_set, inst.k
    sol = solve_sdp(build_gpkc_sdp(inst), tol=tol, max_iters=max_iters, seed=seed)
    N = default_repetitions(g.n) if N is None else N

    def fixer(outcome):
        return fix_c_dense(g, U, k, outcome, removal)

    chosen = rounding_driver(inst, sol, N, fixer, seed, objective=lambda s: density(g, s))
    return _result(inst, chosen, "sdp", t0, sol.flags)


def dks_via_dskr(g: Graph, k: int, dskr_solver: Callable[[RefinementInstance], DensestResult]) -> VertexSet:
    """Densest-k-subgraph from a refinement solver started at the empty set."""
    res = dskr_solver(RefinementInstance(g, VertexSet.empty(g.n), k, KDENSIFY))
    return res.final_set


def sweep_k(inst: RefinementInstance, k_max: int, solver: Callable[[RefinementInstance], DensestResult]) -> DensestResult:
    """Best result over budgets ``1..k_max``; ties keep the smaller budget."""
    if not 1 <= k_max <= inst.n:
        raise ValueError(f"k_max must be in [1, {inst.n}]")
    best = None
    for k in range(1, k_max + 1):
        res = solver(replace(inst, k=k))
        if best is None or res.density_after > best.density_after:
            best = res
    return best
