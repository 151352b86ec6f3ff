import itertools

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from optirefine.graph import Graph, VertexSet
from optirefine.rng import stream

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

_REPORT: list[str] = []


def gnp(n: int, p: float, seed, weighted: bool = False) -> Graph:
    rng = stream(seed, "gnp")
    edges = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    w = rng.uniform(0.5, 3.0, len(edges)) if weighted else None
    return Graph.from_edges(n, edges, weights=w)


def random_subset(n: int, seed, nonempty=False, proper=False) -> VertexSet:
    rng = stream(seed, "subset")
    mask = rng.random(n) < 0.5
    if nonempty and not mask.any():
        mask[rng.integers(n)] = True
    if proper and mask.all():
        mask[rng.integers(n)] = False
    return VertexSet.from_mask(mask)


@st.composite
def graphs(draw, min_n=2, max_n=9, weighted=True):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [pr for pr, k in zip(pairs, keep) if k]
    if weighted:
        w = draw(st.lists(st.integers(1, 5), min_size=len(edges), max_size=len(edges)))
    else:
        w = [1] * len(edges)
    return Graph.from_edges(n, edges, weights=np.array(w, dtype=float) if edges else None)


@st.composite
def subsets(draw, n):
    bits = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return VertexSet.from_mask(np.array(bits, dtype=bool))


@pytest.fixture
def report():
    """Collects one summary line per acceptance criterion."""
    def add(name: str, ok: bool, detail: str = ""):
        _REPORT.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok
    return add


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)
