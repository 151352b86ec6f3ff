"""Exhaustive solvers for tiny instances, used as test oracles.

Enumeration is capped at ``n <= 12`` and at most 10^6 candidates; larger
inputs raise ``ValueError`` instead of sampling.  Ties go to the first
candidate in lexicographic order.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .graph import Graph, RefinementInstance, VertexSet

MAX_N = 12
MAX_CANDIDATES = 10**6


def _check(n: int, count: int):
    if n > MAX_N or count > MAX_CANDIDATES:
        raise ValueError(f"exhaustive search refused: n={n}, {count} candidates")


def _subsets(pool: list[int], k: int, n: int) -> np.ndarray:
    _check(n, math.comb(len(pool), k))
    combos = list(itertools.combinations(pool, k))
    M = np.zeros((len(combos), n), dtype=bool)
    for row, c in enumerate(combos):
        M[row, list(c)] = True
    return M


def _induced(g: Graph, M: np.ndarray) -> np.ndarray:
    return (M[:, g.src] & M[:, g.dst]).astype(float) @ g.weight


def _cut(g: Graph, M: np.ndarray) -> np.ndarray:
    return (M[:, g.src] != M[:, g.dst]).astype(float) @ g.weight


def _density(g: Graph, M: np.ndarray) -> np.ndarray:
    size = M.sum(axis=1)
    return np.where(size > 0, _induced(g, M) / np.maximum(size, 1), 0.0)


def _best(M: np.ndarray, vals: np.ndarray) -> tuple[VertexSet, float]:
    i = int(np.argmax(vals))
    return VertexSet.from_mask(M[i]), float(vals[i])


def brute_force_dskr(inst: RefinementInstance) -> tuple[VertexSet, float]:
    """Best ``C`` with ``|C| = k`` for the density of ``U xor C``."""
    g = inst.graph
    C = _subsets(list(range(g.n)), inst.k, g.n)
    return _best(C, _density(g, C ^ inst.initial_set.mask()))


def brute_force_maxcutkr(inst: RefinementInstance) -> tuple[VertexSet, float]:
    g = inst.graph
    C = _subsets(list(range(g.n)), inst.k, g.n)
    return _best(C, _cut(g, C ^ inst.initial_set.mask()))


def brute_force_measure(inst: RefinementInstance) -> tuple[VertexSet, float]:
    """Best ``C`` for the instance's partition measure."""
    g = inst.graph
    C = _subsets(list(range(g.n)), inst.k, g.n)
    X = np.where(C ^ inst.initial_set.mask(), 1.0, -1.0)
    c0, c1, c2, c3 = inst.measure.coefficients
    xi, xj = X[:, g.src], X[:, g.dst]
    vals = (c0 + c1 * xi + c2 * xj + c3 * xi * xj) @ g.weight
    return _best(C, vals)


def brute_force_kdensify(g: Graph, U: VertexSet, k: int) -> tuple[VertexSet, float]:
    """Best ``C`` outside ``U`` with ``|C| = k`` for ``w(E[U + C])``."""
    pool = [v for v in range(g.n) if v not in U]
    C = _subsets(pool, k, g.n)
    return _best(C, _induced(g, C | U.mask()))


def brute_force_dks(g: Graph, k: int) -> tuple[VertexSet, float]:
    """Heaviest induced subgraph on exactly ``k`` vertices."""
    S = _subsets(list(range(g.n)), k, g.n)
    return _best(S, _induced(g, S))


def exhaustive_dks_solver(g: Graph, k: int) -> VertexSet:
    return brute_force_dks(g, k)[0]


def brute_force_maxcut(g: Graph) -> tuple[VertexSet, float]:
    _check(g.n, 2**g.n)
    idx = np.arange(2**g.n)[:, None]
    M = ((idx >> np.arange(g.n)) & 1).astype(bool)
    return _best(M, _cut(g, M))


def exhaustive_maxcut_solver(g: Graph) -> VertexSet:
    return brute_force_maxcut(g)[0]


def brute_force_maxcutcc(g: Graph, k: int) -> tuple[VertexSet, float]:
    """Max cut with one side of exactly ``k`` vertices."""
    S = _subsets(list(range(g.n)), k, g.n)
    return _best(S, _cut(g, S))
