"""Vector relaxation of refinement-constrained graph partitioning.

The relaxation replaces ``x_i`` by ``v_i . v_0`` and ``x_i x_j`` by ``v_i . v_j``
for unit vectors ``v_0, ..., v_n``.  It is solved with a low-rank factorization
(rows of ``V`` on the unit sphere) and an augmented Lagrangian for the two
cardinality constraints

    sum_i x0_i v_i . v_0           = n - 2k
    sum_ij x0_i x0_j v_i . v_j     = (2k - n)^2

The solver is a local method: values are feasible to tolerance, not certified
optimal.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .graph import Assignment, Graph, RefinementInstance, VertexSet
from .measures import MAXCUT_KR, PartitionMeasure
from .rng import stream

log = logging.getLogger(__name__)


def _gw_ratio(theta):
    return (2 / np.pi) * theta / (1 - np.cos(theta))


def _three_vector_ratio(theta):
    return (2 / np.pi) * (2 * np.pi - 3 * theta) / (1 + 3 * np.cos(theta))


def _grid_then_refine(fn, lo, hi) -> float:
    grid = np.linspace(lo, hi, 20001)
    vals = fn(grid)
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(fn, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
    return float(min(res.fun, vals[i]))


# min over theta in (0, pi] of (2/pi) theta / (1 - cos theta)
GW_ALPHA = _grid_then_refine(_gw_ratio, 1e-6, np.pi)
# min over theta in [0, arccos(-1/3)) of (2/pi)(2pi - 3 theta)/(1 + 3 cos theta)
GW_BETA = _grid_then_refine(_three_vector_ratio, 0.0, np.arccos(-1 / 3) - 1e-9)
GW_ALPHA_LOWER = 0.87856
GW_BETA_LOWER = 0.79607


@dataclass(eq=False)
class GpkcSdp:
    """Relaxation data for one instance; ``k=None`` drops both constraints."""

    graph: Graph
    measure: PartitionMeasure
    x0: Assignment
    k: int | None = None

    def __post_init__(self):
        g = self.graph
        c0, c1, c2, c3 = self.measure.coefficients
        # linear coefficient of v_0 . v_i collected over edges
        lin = np.zeros(g.n)
        np.add.at(lin, g.src, c1 * g.weight)
        np.add.at(lin, g.dst, c2 * g.weight)
        self._lin = lin
        self._const = c0 * g.total_weight
        self._c3 = c3
        adj = g.adjacency()
        # dense products are much cheaper than sparse ones at small n
        self._adj = adj.toarray() if g.n <= 256 else adj
        self._x0 = self.x0.values.astype(float)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def constrained(self) -> bool:
        return self.k is not None

    @property
    def rhs_linear(self) -> float:
        return float(self.n - 2 * self.k)

    @property
    def rhs_quadratic(self) -> float:
        return float((2 * self.k - self.n) ** 2)

    def objective(self, V: np.ndarray) -> float:
        v0, X = V[0], V[1:]
        val = self._const + float(v0 @ (self._lin @ X))
        if self._c3 and self.n:
            val += 0.5 * self._c3 * float(np.sum(X * (self._adj @ X)))
        return val

    def edge_terms(self, V: np.ndarray) -> np.ndarray:
        """Per-edge relaxed contribution ``w (c0 + c1 v0.vi + c2 v0.vj + c3 vi.vj)``."""
        g = self.graph
        c0, c1, c2, c3 = self.measure.coefficients
        v0, X = V[0], V[1:]
        xi, xj = X[g.src] @ v0, X[g.dst] @ v0
        xij = np.sum(X[g.src] * X[g.dst], axis=1)
        return g.weight * (c0 + c1 * xi + c2 * xj + c3 * xij)

    def objective_grad(self, V: np.ndarray) -> np.ndarray:
        v0, X = V[0], V[1:]
        G = np.empty_like(V)
        G[0] = self._lin @ X
        G[1:] = np.outer(self._lin, v0)
        if self._c3 and self.n:
            G[1:] += self._c3 * (self._adj @ X)
        return G

    def residuals(self, V: np.ndarray) -> tuple[float, float]:
        if not self.constrained:
            return 0.0, 0.0
        s = self._x0 @ V[1:]
        return float(V[0] @ s) - self.rhs_linear, float(s @ s) - self.rhs_quadratic

    def residual_grads(self, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        v0, X = V[0], V[1:]
        s = self._x0 @ X
        g1 = np.empty_like(V)
        g1[0] = s
        g1[1:] = np.outer(self._x0, v0)
        g2 = np.zeros_like(V)
        g2[1:] = 2.0 * np.outer(self._x0, s)
        return g1, g2


def build_gpkc_sdp(inst: RefinementInstance, constrained: bool = True) -> GpkcSdp:
    measure = inst.measure if inst.measure is not None else MAXCUT_KR
    return GpkcSdp(inst.graph, measure, inst.x0(), inst.k if constrained else None)


@dataclass(eq=False)
class VectorSolution:
    vectors: np.ndarray
    objective_value: float
    residual_linear: float
    residual_quadratic: float
    converged: bool
    iterations: int
    problem: GpkcSdp | None = field(default=None, repr=False)
    history: list = field(default_factory=list, repr=False)

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    @property
    def flags(self) -> list[str]:
        return [] if self.converged else ["unconverged"]

    def relaxed_x(self) -> np.ndarray:
        return self.vectors[1:] @ self.vectors[0]

    def save(self, path) -> None:
        """Text dump: header ``n r`` then ``n+1`` rows of ``r`` floats (row 0 is v_0)."""
        V = self.vectors
        with open(path, "w") as fh:
            fh.write(f"{V.shape[0] - 1} {V.shape[1]}\n")
            np.savetxt(fh, V, fmt="%.17g")

    @staticmethod
    def load_vectors(path) -> np.ndarray:
        with open(path) as fh:
            n, r = (int(t) for t in fh.readline().split())
            V = np.loadtxt(fh, ndmin=2)
        if V.shape != (n + 1, r):
            raise ValueError(f"expected {(n + 1, r)} matrix, found {V.shape}")
        return V


def default_rank(n: int) -> int:
    return max(2, min(40, math.ceil(math.sqrt(2 * (n + 1)))))


def _normalize_rows(V: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(V, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return V / norms


def _tangent(V: np.ndarray, G: np.ndarray) -> np.ndarray:
    return G - np.sum(G * V, axis=1, keepdims=True) * V


_MAX_PENALTY = 1e8


class _Lagrangian:
    """Scaled augmented Lagrangian (minimization form).

    The two scalar constraints hold together iff ``s = (n - 2k) v_0`` with
    ``s = sum_i x0_i v_i``, because ``|s - c v_0|^2 = |s|^2 - 2c s.v_0 + c^2``.
    Penalizing this r-dimensional residual avoids the vanishing gradient of
    ``|s|^2`` at ``s = 0`` (the k = n/2 case).
    """

    def __init__(self, p: GpkcSdp, rank: int):
        self.p = p
        self.fscale = max(p.graph.total_weight, 1.0)
        self.scale = max(p.n, 1)
        self.c = p.rhs_linear if p.constrained else 0.0
        self.lam = np.zeros(rank)
        self.rho = 1.0

    def vector_residual(self, V) -> np.ndarray:
        return (self.p._x0 @ V[1:] - self.c * V[0]) / self.scale

    def value(self, V) -> float:
        val = -self.p.objective(V) / self.fscale
        if self.p.constrained:
            h = self.vector_residual(V)
            val += float(-self.lam @ h + 0.5 * self.rho * h @ h)
        return val

    def grad(self, V) -> np.ndarray:
        G = -self.p.objective_grad(V) / self.fscale
        if self.p.constrained:
            q = (-self.lam + self.rho * self.vector_residual(V)) / self.scale
            G[1:] += np.outer(self.p._x0, q)
            G[0] -= self.c * q
        return G


def _inner_solve(L: _Lagrangian, V: np.ndarray, max_iters: int, gtol: float, step: float):
    """Projected gradient descent on the product of spheres with Armijo backtracking."""
    val = L.value(V)
    G = _tangent(V, L.grad(V))
    gnorm = float(np.linalg.norm(G))
    prev_V = prev_G = None
    it = 0
    for it in range(1, max_iters + 1):
        if gnorm <= gtol:
            break
        if prev_V is not None:
            sv = V - prev_V
            yv = G - prev_G
            sy = float(np.sum(sv * yv))
            if sy > 0:
                step = min(max(float(np.sum(sv * sv)) / sy, 1e-8), 1e4)
        t = step
        gg = gnorm * gnorm
        while True:
            cand = _normalize_rows(V - t * G)
            cval = L.value(cand)
            if cval <= val - 1e-4 * t * gg or t < 1e-14:
                break
            t *= 0.5
        prev_V, prev_G = V, G
        V, val = cand, cval
        G = _tangent(V, L.grad(V))
        gnorm = float(np.linalg.norm(G))
        step = t
    return V, gnorm, step, it


def solve_sdp(
    p: GpkcSdp,
    tol: float = 1e-4,
    max_iters: int = 2000,
    inner_iters: int = 200,
    rank: int | None = None,
    seed: int = 0,
    init: np.ndarray | None = None,
) -> VectorSolution:
    """Solve the relaxation; see module docstring.

    Postconditions: rows have unit norm; ``|res_lin| <= tol * n`` and
    ``|res_quad| <= tol * n^2`` when converged.  ``history`` holds the best
    objective among tolerance-feasible outer iterates, so it never decreases.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = p.n
    r = rank or default_rank(n)
    if init is not None:
        V = _normalize_rows(np.array(init, dtype=float))
    else:
        V = _normalize_rows(stream(seed, "sdp-init").standard_normal((n + 1, r)))
    L = _Lagrangian(p, r)
    gtol = tol * 1.0 * math.sqrt(n + 1)
    step = 1.0
    prev_h = np.inf
    best = None
    history: list[float] = []
    converged = False
    outer = 0
    for outer in range(1, max_iters + 1):
        V, gnorm, step, _ = _inner_solve(L, V, inner_iters, gtol, step)
        r1, r2 = p.residuals(V)
        feasible = abs(r1) <= tol * max(n, 1) and abs(r2) <= tol * max(n, 1) ** 2
        obj = p.objective(V)
        if feasible and (best is None or obj > best[0]):
            best = (obj, V.copy(), r1, r2)
        history.append(best[0] if best is not None else float("nan"))
        if feasible and gnorm <= gtol:
            converged = True
            break
        if p.constrained:
            h = L.vector_residual(V)
            hn = float(np.linalg.norm(h))
            L.lam -= L.rho * h
            if not feasible and hn > 0.5 * prev_h:
                L.rho = min(2.0 * L.rho, _MAX_PENALTY)
            prev_h = hn
    if not converged:
        log.warning("SDP solver stopped after %d outer iterations without converging", outer)
    if best is None:
        r1, r2 = p.residuals(V)
        best = (p.objective(V), V, r1, r2)
    obj, Vb, r1, r2 = best
    return VectorSolution(
        vectors=Vb,
        objective_value=float(obj),
        residual_linear=float(r1),
        residual_quadratic=float(r2),
        converged=converged,
        iterations=outer,
        problem=p,
        history=history,
    )


def gw_maxcut(g: Graph, tol: float = 1e-4, max_iters: int = 2000, seed: int = 0) -> VectorSolution:
    """Unconstrained max-cut relaxation (no cardinality constraints)."""
    p = GpkcSdp(g, MAXCUT_KR, Assignment(-np.ones(g.n, dtype=np.int8)), None)
    return solve_sdp(p, tol=tol, max_iters=max_iters, seed=seed)


@dataclass(eq=False)
class RoundingOutcome:
    assignment: Assignment
    changed_set: VertexSet
    objective_before_fix: float

    @property
    def temp_set(self) -> VertexSet:
        """Vertices with x = +1 after rounding."""
        return self.assignment.to_set()


def random_unit_vector(rng: np.random.Generator, r: int) -> np.ndarray:
    while True:
        vec = rng.standard_normal(r)
        norm = np.linalg.norm(vec)
        if norm > 0:
            return vec / norm


def round_vectors(V: np.ndarray, direction: np.ndarray) -> np.ndarray:
    proj = V @ direction
    return np.where(proj[0] * proj[1:] >= 0, 1, -1).astype(np.int8)


def hyperplane_round(sol: VectorSolution, x0: Assignment, rng_seed, measure: PartitionMeasure | None = None,
                     graph: Graph | None = None) -> RoundingOutcome:
    """Random-hyperplane rounding: ``x_i = +1`` iff ``(r.v0)(r.vi) >= 0``."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else stream(rng_seed, "round")
    xbar = round_vectors(sol.vectors, random_unit_vector(rng, sol.rank))
    return _outcome(xbar, x0, sol, measure, graph)


def _outcome(xbar, x0, sol, measure, graph) -> RoundingOutcome:
    changed = VertexSet.from_mask(xbar != x0.values)
    p = sol.problem
    measure = measure or (p.measure if p is not None else None)
    graph = graph or (p.graph if p is not None else None)
    before = measure.value_x(graph, xbar.astype(float)) if (measure is not None and graph is not None) else float("nan")
    return RoundingOutcome(Assignment(xbar), changed, before)


def default_repetitions(n: int) -> int:
    return int(min(5000, max(100, math.ceil(n * math.log(max(n, 2))))))


def rounding_driver(
    inst: RefinementInstance,
    sol: VectorSolution,
    N: int,
    fixer: Callable[[RoundingOutcome], VertexSet],
    rng_seed,
    objective: Callable[[VertexSet], float] | None = None,
) -> VertexSet:
    """Best fixed refinement over ``N`` independent roundings.

    ``objective`` scores the refined set ``U xor C``; it defaults to the
    instance's measure.  Ties go to the lexicographically smallest ``C``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    g, U = inst.graph, inst.initial_set
    x0 = inst.x0()
    if objective is None:
        measure = inst.measure

        def objective(s):
            return measure.value(g, s)

    cache: dict[bytes, VertexSet] = {}
    best_val, best_key, best_c = -np.inf, None, None
    for i in range(N):
        xbar = round_vectors(sol.vectors, random_unit_vector(stream(rng_seed, "round", i), sol.rank))
        key = xbar.tobytes()
        if key in cache:
            continue
        outcome = _outcome(xbar, x0, sol, inst.measure, g)
        c = fixer(outcome)
        cache[key] = c
        if len(c) != inst.k:
            raise RuntimeError(f"fixer returned |C|={len(c)}, expected {inst.k}")
        val = objective(U ^ c)
        ckey = tuple(c.sorted())
        if val > best_val or (val == best_val and ckey < best_key):
            best_val, best_key, best_c = val, ckey, c
    return best_c
