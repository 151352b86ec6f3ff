"""Weighted undirected graphs, vertex sets and the basic partition objectives."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on vertices ``0..n-1`` with nonnegative weights.

    Edges are stored once with ``src < dst``.  ``indptr/indices/data`` hold the
    symmetric adjacency in CSR form.  ``labels`` maps internal ids back to the
    ids used in the input file (if any).
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    total_weight: float
    labels: tuple | None = None
    _degree: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges, weights=None, labels: Sequence | None = None) -> "Graph":
        """Build a graph from ``(u, v)`` or ``(u, v, w)`` pairs.

        Duplicate pairs are merged by summing their weights; self-loops and
        negative weights raise ``ValueError``.
        """
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        arr = np.asarray(edges, dtype=float) if len(edges) else np.zeros((0, 2))
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise ValueError("edges must be (u, v) or (u, v, w) rows")
        u = arr[:, 0].astype(np.int64)
        v = arr[:, 1].astype(np.int64)
        if weights is not None:
            w = np.asarray(weights, dtype=float)
        elif arr.shape[1] == 3:
            w = arr[:, 2].copy()
        else:
            w = np.ones(len(u))
        return cls.from_arrays(n, u, v, w, labels=labels)

    @classmethod
    def from_arrays(cls, n: int, u, v, w=None, labels: Sequence | None = None) -> "Graph":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.ones(len(u)) if w is None else np.asarray(w, dtype=float)
        if not (len(u) == len(v) == len(w)):
            raise ValueError("edge arrays differ in length")
        if len(u):
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise ValueError("edge endpoint outside 0..n-1")
            if np.any(u == v):
                bad = int(u[np.argmax(u == v)])
                raise ValueError(f"self-loop at vertex {bad}")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("edge weights must be finite and nonnegative")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        # merge duplicates by summing weights
        upper = sp.coo_matrix((w, (lo, hi)), shape=(n, n)).tocsr()
        upper.sum_duplicates()
        coo = upper.tocoo()
        src, dst, wt = coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data.astype(float)
        order = np.lexsort((dst, src))
        src, dst, wt = src[order], dst[order], wt[order]
        sym = sp.csr_matrix(
            (np.concatenate([wt, wt]), (np.concatenate([src, dst]), np.concatenate([dst, src]))),
            shape=(n, n),
        )
        sym.sort_indices()
        degree = np.asarray(sym.sum(axis=1)).ravel() if n else np.zeros(0)
        return cls(
            n=int(n),
            src=src,
            dst=dst,
            weight=wt,
            indptr=sym.indptr.astype(np.int64),
            indices=sym.indices.astype(np.int64),
            data=sym.data.astype(float),
            total_weight=float(wt.sum()),
            labels=tuple(labels) if labels is not None else None,
            _degree=degree,
        )

    @property
    def m(self) -> int:
        return len(self.src)

    @property
    def degree(self) -> np.ndarray:
        """Weighted degree of every vertex."""
        return self._degree

    def adjacency(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def edges(self):
        return [(int(a), int(b), float(c)) for a, b, c in zip(self.src, self.dst, self.weight)]

    def relabel(self, perm) -> "Graph":
        """Graph with vertex ``i`` renamed to ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph.from_arrays(self.n, perm[self.src], perm[self.dst], self.weight)

    def scaled(self, factor: float) -> "Graph":
        return Graph.from_arrays(self.n, self.src, self.dst, self.weight * factor, labels=self.labels)

    def label_of(self, v: int):
        return self.labels[v] if self.labels is not None else v


@dataclass(frozen=True)
class VertexSet:
    """A subset of ``{0, ..., n-1}``."""

    members: frozenset
    n: int

    def __post_init__(self):
        if any((not 0 <= v < self.n) for v in self.members):
            raise ValueError(f"vertex set has members outside 0..{self.n - 1}")

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> "VertexSet":
        return cls(frozenset(int(v) for v in members), int(n))

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(frozenset(), int(n))

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(frozenset(range(n)), int(n))

    @classmethod
    def from_mask(cls, mask) -> "VertexSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(frozenset(np.flatnonzero(mask).tolist()), len(mask))

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        if self.members:
            out[np.fromiter(self.members, dtype=np.int64, count=len(self.members))] = True
        return out

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def complement(self) -> "VertexSet":
        return VertexSet(frozenset(range(self.n)) - self.members, self.n)

    def to_assignment(self) -> "Assignment":
        return Assignment(np.where(self.mask(), 1, -1).astype(np.int8))

    def _check(self, other: "VertexSet"):
        if not isinstance(other, VertexSet):
            raise TypeError("expected a VertexSet")
        if other.n != self.n:
            raise ValueError(f"universe mismatch: {self.n} vs {other.n}")

    def __or__(self, other):
        self._check(other)
        return VertexSet(self.members | other.members, self.n)

    def __and__(self, other):
        self._check(other)
        return VertexSet(self.members & other.members, self.n)

    def __sub__(self, other):
        self._check(other)
        return VertexSet(self.members - other.members, self.n)

    def __xor__(self, other):
        self._check(other)
        return VertexSet(self.members ^ other.members, self.n)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, v):
        return v in self.members

    def __repr__(self):
        return f"VertexSet({self.sorted()}, n={self.n})"


@dataclass(frozen=True, eq=False)
class Assignment:
    """A vector in {-1, +1}^n; +1 marks membership."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1 or not np.all((vals == 1) | (vals == -1)):
            raise ValueError("assignment entries must be +1 or -1")
        object.__setattr__(self, "values", vals.astype(np.int8))

    @property
    def n(self) -> int:
        return len(self.values)

    def to_set(self) -> VertexSet:
        return VertexSet.from_mask(self.values == 1)

    def __eq__(self, other):
        return isinstance(other, Assignment) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def as_mask(s, n: int) -> np.ndarray:
    """Boolean membership mask for a VertexSet, a mask, or an iterable of ids."""
    if isinstance(s, VertexSet):
        if s.n != n:
            raise ValueError(f"universe mismatch: set over {s.n}, graph has {n}")
        return s.mask()
    if isinstance(s, Assignment):
        return s.values == 1
    if isinstance(s, np.ndarray) and s.dtype == bool:
        if s.shape != (n,):
            raise ValueError("mask length does not match the graph")
        return s
    out = np.zeros(n, dtype=bool)
    idx = np.fromiter((int(v) for v in s), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= n):
        raise ValueError("vertex id outside the graph")
    out[idx] = True
    return out


def induced_weight(g: Graph, s) -> float:
    """Total weight of edges with both endpoints in ``s``."""
    mask = as_mask(s, g.n)
    return float(g.weight[mask[g.src] & mask[g.dst]].sum())


def density(g: Graph, s) -> float:
    """``w(E[s]) / |s|``; the empty set has density 0."""
    mask = as_mask(s, g.n)
    size = int(mask.sum())
    if size == 0:
        return 0.0
    return float(g.weight[mask[g.src] & mask[g.dst]].sum()) / size


def cut_value(g: Graph, s) -> float:
    """Weight of edges with exactly one endpoint in ``s``."""
    mask = as_mask(s, g.n)
    return float(g.weight[mask[g.src] != mask[g.dst]].sum())


def sym_diff(a: VertexSet, b: VertexSet) -> VertexSet:
    return a ^ b


def weighted_degree_in(g: Graph, v: int, s) -> float:
    """Weight of edges from ``v`` to the other members of ``s`` (``v`` must be in ``s``)."""
    mask = as_mask(s, g.n)
    if not mask[v]:
        raise ValueError(f"vertex {v} is not in the set")
    nbr, w = g.neighbors(v)
    return float(w[mask[nbr]].sum())


def cut_contribution(g: Graph, v: int, s) -> float:
    """Weight of the edges at ``v`` that cross the cut ``(s, V \\ s)``."""
    mask = as_mask(s, g.n)
    nbr, w = g.neighbors(v)
    return float(w[mask[nbr] != mask[v]].sum())


def degrees_into(g: Graph, mask: np.ndarray) -> np.ndarray:
    """For every vertex, the weight of its edges into ``mask``."""
    if g.n == 0:
        return np.zeros(0)
    return g.adjacency() @ mask.astype(float)


@dataclass(frozen=True)
class RefinementInstance:
    """A graph, an initial set ``U``, a refinement budget ``k`` and a measure."""

    graph: Graph
    initial_set: VertexSet
    k: int
    measure: object = None

    def __post_init__(self):
        if self.initial_set.n != self.graph.n:
            raise ValueError("initial set lives on a different universe than the graph")
        if not 1 <= self.k <= self.graph.n:
            raise ValueError(f"k must be in [1, n={self.graph.n}], got {self.k}")

    @property
    def n(self) -> int:
        return self.graph.n

    def x0(self) -> Assignment:
        return self.initial_set.to_assignment()
