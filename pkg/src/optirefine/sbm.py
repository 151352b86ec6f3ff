"""Stochastic block model graphs with planted communities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, VertexSet
from .rng import stream


@dataclass
class SbmConfig:
    community_sizes: list[int] = field(default_factory=lambda: [250] * 4)
    intra_p: list[float] = field(default_factory=lambda: [0.3] * 4)
    inter_p: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if len(self.community_sizes) != len(self.intra_p):
            raise ValueError("one intra-community probability per community")
        if any(s <= 0 for s in self.community_sizes):
            raise ValueError("community sizes must be positive")
        if any(not 0 <= p <= 1 for p in [*self.intra_p, self.inter_p]):
            raise ValueError("probabilities must lie in [0, 1]")


# community 0 is the one the preset is named after
PRESETS = {
    "balanced": dict(intra_p=[0.3, 0.3, 0.3, 0.3], inter_p=0.1),
    "dense": dict(intra_p=[0.8, 0.2, 0.2, 0.2], inter_p=0.1),
    "sparse": dict(intra_p=[0.2, 0.8, 0.2, 0.2], inter_p=0.1),
}


def preset(name: str, seed: int = 0, size: int = 250) -> SbmConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return SbmConfig(community_sizes=[size] * 4, seed=seed, **PRESETS[name])


def generate_sbm(cfg: SbmConfig) -> tuple[Graph, list[VertexSet]]:
    """Sample every vertex pair independently; returns the graph and its communities."""
    sizes = np.asarray(cfg.community_sizes)
    n = int(sizes.sum())
    block = np.repeat(np.arange(len(sizes)), sizes)
    P = np.full((len(sizes), len(sizes)), cfg.inter_p)
    np.fill_diagonal(P, cfg.intra_p)
    rng = stream(cfg.seed, "sbm")
    us, vs = [], []
    # row by row keeps memory at O(n) for large graphs
    for u in range(n - 1):
        p = P[block[u], block[u + 1:]]
        hit = np.flatnonzero(rng.random(n - 1 - u) < p)
        us.append(np.full(len(hit), u))
        vs.append(hit + u + 1)
    u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    g = Graph.from_arrays(n, u, v)
    starts = np.concatenate([[0], np.cumsum(sizes)])
    comms = [VertexSet.of(range(starts[i], starts[i + 1]), n) for i in range(len(sizes))]
    return g, comms
