"""Plain-text graph, vertex-set and partition files."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .graph import Graph, VertexSet, as_mask


def _read_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def _ordered_ids(ids: list[str]) -> list[str]:
    # integer ids keep numeric order so "0..n-1" files map onto themselves
    try:
        return sorted(ids, key=int)
    except ValueError:
        return ids


def load_edge_list(path) -> Graph:
    """Read ``u v [w]`` lines; a line with a single id declares an isolated vertex.

    Ids may be arbitrary tokens and are kept as ``Graph.labels``.  Duplicate
    edges are summed; self-loops, bad weights and malformed lines raise
    ``ValueError`` naming the line.
    """
    seen: dict[str, None] = {}
    rows = []
    for lineno, line in _read_lines(path):
        parts = line.split()
        if len(parts) == 1:
            seen.setdefault(parts[0])
            continue
        if len(parts) not in (2, 3):
            raise ValueError(f"{path}:{lineno}: expected 'u v [w]', got {line!r}")
        a, b = parts[0], parts[1]
        if a == b:
            raise ValueError(f"{path}:{lineno}: self-loop at {a!r}")
        try:
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ValueError(f"{path}:{lineno}: weight {parts[2]!r} is not a number") from None
        if not np.isfinite(w) or w < 0:
            raise ValueError(f"{path}:{lineno}: weight must be finite and nonnegative, got {w}")
        seen.setdefault(a)
        seen.setdefault(b)
        rows.append((a, b, w))
    labels = _ordered_ids(list(seen))
    index = {lab: i for i, lab in enumerate(labels)}
    u = np.array([index[a] for a, _, _ in rows], dtype=np.int64)
    v = np.array([index[b] for _, b, _ in rows], dtype=np.int64)
    w = np.array([r[2] for r in rows], dtype=float)
    return Graph.from_arrays(len(labels), u, v, w, labels=labels)


def id_map_of(g: Graph) -> dict:
    if g.labels is None:
        return {str(i): i for i in range(g.n)}
    return {str(lab): i for i, lab in enumerate(g.labels)}


def load_vertex_set(path, id_map) -> VertexSet:
    """One id per line, resolved through ``id_map`` (a dict or a Graph)."""
    if isinstance(id_map, Graph):
        n, id_map = id_map.n, id_map_of(id_map)
    else:
        n = len(id_map)
    members = []
    for lineno, line in _read_lines(path):
        tok = line.split()[0]
        if tok not in id_map:
            raise ValueError(f"{path}:{lineno}: unknown vertex id {tok!r}")
        members.append(id_map[tok])
    return VertexSet.of(members, n)


def load_communities(path, g: Graph) -> list[VertexSet]:
    """Two columns ``vertex community``; communities are numbered ``0..c-1``."""
    id_map = id_map_of(g)
    groups: dict[int, list[int]] = {}
    for lineno, line in _read_lines(path):
        parts = line.split()
        if len(parts) != 2 or parts[0] not in id_map:
            raise ValueError(f"{path}:{lineno}: expected 'vertex community' with a known vertex, got {line!r}")
        try:
            c = int(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: community {parts[1]!r} is not an integer") from None
        groups.setdefault(c, []).append(id_map[parts[0]])
    return [VertexSet.of(groups.get(c, []), g.n) for c in range(max(groups) + 1 if groups else 0)]


def write_communities(g: Graph, comms: list[VertexSet], path) -> None:
    with open(path, "w") as fh:
        for c, s in enumerate(comms):
            for v in s:
                fh.write(f"{g.label_of(v)} {c}\n")


def write_edge_list(g: Graph, path) -> None:
    """Inverse of ``load_edge_list``; isolated vertices get a line of their own."""
    with open(path, "w") as fh:
        for v in np.flatnonzero(g.degree == 0):
            fh.write(f"{g.label_of(int(v))}\n")
        for a, b, w in zip(g.src, g.dst, g.weight):
            fh.write(f"{g.label_of(int(a))} {g.label_of(int(b))} {w:.17g}\n")


def write_vertex_set(s: VertexSet, path, g: Graph | None = None) -> None:
    with open(path, "w") as fh:
        for v in s:
            fh.write(f"{g.label_of(v) if g is not None else v}\n")


def write_partition(g: Graph, side, path) -> None:
    """Two columns ``vertex side`` with side +1 for members and -1 otherwise."""
    mask = as_mask(side, g.n)
    with open(path, "w") as fh:
        for v in range(g.n):
            fh.write(f"{g.label_of(v)} {1 if mask[v] else -1}\n")


def ensure_parent(path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p
