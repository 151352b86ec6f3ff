import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import gnp, graphs, random_subset, subsets
from optirefine.graph import Assignment, Graph, RefinementInstance, VertexSet, cut_value, induced_weight
from optirefine.maxcut import greedy_fix_cut, gw_cut
from optirefine.measures import KDENSIFY, MAXCUT_KR, MAXUNCUT_KC, VC_KC, MeasureKind, PartitionMeasure
from optirefine.rng import stream
from optirefine.oracles import brute_force_maxcut, brute_force_maxcutkr, brute_force_measure
from optirefine.sdp import (GW_ALPHA, GW_ALPHA_LOWER, GW_BETA, GW_BETA_LOWER, GpkcSdp, VectorSolution,
                            build_gpkc_sdp, default_rank, default_repetitions, gw_maxcut, hyperplane_round,
                            rounding_driver, solve_sdp)

EDGE = Graph.from_edges(2, [(0, 1)])
C5 = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
K4 = Graph.from_edges(4, list(itertools.combinations(range(4), 2)))


def integral_vectors(x):
    """Rank-one embedding of a +-1 vector: v_0 = e_1, v_i = x_i e_1."""
    V = np.zeros((len(x) + 1, 2))
    V[0, 0] = 1
    V[1:, 0] = x
    return V


def test_coefficients_exact():
    F = Fraction
    assert (KDENSIFY.c0, KDENSIFY.c1, KDENSIFY.c2, KDENSIFY.c3) == (F(1, 4),) * 4
    assert (MAXCUT_KR.c0, MAXCUT_KR.c1, MAXCUT_KR.c2, MAXCUT_KR.c3) == (F(1, 2), 0, 0, F(-1, 2))
    assert (MAXUNCUT_KC.c0, MAXUNCUT_KC.c1, MAXUNCUT_KC.c2, MAXUNCUT_KC.c3) == (F(1, 2), 0, 0, F(1, 2))
    assert (VC_KC.c0, VC_KC.c1, VC_KC.c2, VC_KC.c3) == (F(3, 4), F(1, 4), F(1, 4), F(-1, 4))
    assert PartitionMeasure.of("VcKC") == VC_KC
    assert MeasureKind("MaxCutKR") is MeasureKind.MAXCUT_KR


@given(st.data())
def test_measures_match_set_functions(data):
    g = data.draw(graphs())
    s = data.draw(subsets(g.n))
    cover = sum(w for a, b, w in g.edges() if a in s or b in s)
    assert KDENSIFY.value(g, s) == pytest.approx(induced_weight(g, s))
    assert MAXCUT_KR.value(g, s) == pytest.approx(cut_value(g, s))
    assert MAXUNCUT_KC.value(g, s) == pytest.approx(g.total_weight - cut_value(g, s))
    assert VC_KC.value(g, s) == pytest.approx(cover)


def test_per_edge_terms():
    inst = RefinementInstance(EDGE, VertexSet.empty(2), 1, MAXCUT_KR)
    p = build_gpkc_sdp(inst)
    V = np.array([[1.0, 0.0], [0.6, 0.8], [0.0, 1.0]])
    assert p.edge_terms(V)[0] == pytest.approx(0.5 - 0.5 * 0.8)
    q = build_gpkc_sdp(RefinementInstance(EDGE, VertexSet.empty(2), 1, KDENSIFY))
    same = np.array([[1.0, 0.0]] * 3)
    assert q.edge_terms(same)[0] == pytest.approx(1.0)


def test_rhs_derived_from_k():
    g = gnp(7, 0.5, 0)
    p = build_gpkc_sdp(RefinementInstance(g, VertexSet.of([0, 1], 7), 2, KDENSIFY))
    assert p.rhs_linear == 3 and p.rhs_quadratic == 9


@pytest.mark.parametrize("measure", [KDENSIFY, MAXCUT_KR, MAXUNCUT_KC, VC_KC])
@pytest.mark.parametrize("seed", range(3))
def test_integral_points_are_feasible_with_matching_value(measure, seed):
    n, k = 7, 3
    g = gnp(n, 0.5, seed, weighted=True)
    U = random_subset(n, seed)
    p = build_gpkc_sdp(RefinementInstance(g, U, k, measure))
    for C in itertools.combinations(range(n), k):
        S = U ^ VertexSet.of(C, n)
        V = integral_vectors(S.to_assignment().values.astype(float))
        assert p.residuals(V) == (0.0, 0.0)
        assert p.objective(V) == pytest.approx(measure.value(g, S))
        assert p.edge_terms(V).sum() == pytest.approx(p.objective(V))


def test_gradient_matches_finite_differences():
    g = gnp(6, 0.6, 3, weighted=True)
    p = build_gpkc_sdp(RefinementInstance(g, random_subset(6, 3), 2, VC_KC))
    V = np.random.default_rng(0).standard_normal((7, 3))
    G = p.objective_grad(V)
    h = 1e-6
    for i, j in [(0, 0), (2, 1), (6, 2)]:
        E = np.zeros_like(V)
        E[i, j] = h
        assert G[i, j] == pytest.approx((p.objective(V + E) - p.objective(V - E)) / (2 * h), rel=1e-5, abs=1e-7)


def test_single_edge_and_empty_graph():
    sol = gw_maxcut(EDGE)
    assert sol.objective_value == pytest.approx(1.0, abs=1e-6)
    v = sol.vectors
    assert v[1] @ v[2] == pytest.approx(-1.0, abs=1e-4)
    empty = gw_maxcut(Graph.from_edges(4, []))
    assert empty.objective_value == 0.0


def test_k4_and_c5_bounds():
    tol = 1e-4
    k4 = gw_maxcut(K4, tol=tol)
    assert k4.objective_value + tol * K4.total_weight >= brute_force_maxcut(K4)[1] == 4.0
    c5 = gw_maxcut(C5, tol=tol)
    assert c5.objective_value == pytest.approx(5 * (1 - np.cos(4 * np.pi / 5)) / 2, abs=1e-3)
    assert c5.objective_value >= brute_force_maxcut(C5)[1] == 4.0


def test_bipartite_best_of_20_is_exact():
    k23 = Graph.from_edges(5, [(a, b) for a in range(2) for b in range(2, 5)])
    x = gw_cut(k23, roundings=20, seed=0)
    assert cut_value(k23, x) == 6.0


@pytest.mark.parametrize("measure", [KDENSIFY, MAXCUT_KR, MAXUNCUT_KC, VC_KC])
def test_relaxation_dominates_integral_optimum(measure):
    tol = 1e-4
    for seed in range(4):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 9))
        g = gnp(n, 0.5, seed + 10, weighted=True)
        inst = RefinementInstance(g, random_subset(n, seed), int(rng.integers(1, n)), measure)
        sol = solve_sdp(build_gpkc_sdp(inst), tol=tol)
        assert sol.converged
        assert sol.objective_value + tol * g.total_weight >= brute_force_measure(inst)[1]


def test_solution_invariants():
    g = gnp(9, 0.5, 4)
    inst = RefinementInstance(g, random_subset(9, 4), 3, KDENSIFY)
    sol = solve_sdp(build_gpkc_sdp(inst), tol=1e-4)
    norms = np.linalg.norm(sol.vectors, axis=1)
    assert np.max(np.abs(norms - 1)) <= 1e-6
    assert sol.rank == default_rank(9)
    assert abs(sol.residual_linear) <= 1e-4 * 9
    assert abs(sol.residual_quadratic) <= 1e-4 * 81
    h = [v for v in sol.history if not np.isnan(v)]
    assert all(b >= a for a, b in zip(h, h[1:]))


def test_unconverged_is_flagged():
    g = gnp(9, 0.5, 4)
    inst = RefinementInstance(g, random_subset(9, 4), 3, VC_KC)
    sol = solve_sdp(build_gpkc_sdp(inst), tol=1e-12, max_iters=2, inner_iters=3)
    assert not sol.converged and sol.flags == ["unconverged"]


def test_defaults():
    assert default_rank(1000) == 40
    assert default_rank(10) == 5
    assert default_repetitions(10) == 100
    assert default_repetitions(200) == 1060
    assert default_repetitions(1000) == 5000
    assert default_repetitions(10**5) == 5000


def test_constants():
    assert GW_ALPHA > GW_ALPHA_LOWER and GW_ALPHA == pytest.approx(0.878567, abs=1e-6)
    assert GW_BETA > GW_BETA_LOWER and GW_BETA == pytest.approx(0.796070, abs=1e-6)


def _fake_solution(V, n):
    return VectorSolution(V, 0.0, 0.0, 0.0, True, 0)


def test_rounding_of_aligned_and_antipodal_vectors():
    n = 6
    x0 = Assignment(np.array([1, -1, 1, -1, 1, -1]))
    same = _fake_solution(np.tile([1.0, 0.0, 0.0], (n + 1, 1)), n)
    for seed in range(5):
        out = hyperplane_round(same, x0, seed)
        assert np.all(out.assignment.values == 1)
    V = np.tile([0.0, 1.0, 0.0], (n + 1, 1))
    V[1:] *= -1
    for seed in range(5):
        out = hyperplane_round(_fake_solution(V, n), x0, seed)
        assert np.all(out.assignment.values == -1)


def test_rounding_changed_set_and_replay():
    g = gnp(8, 0.5, 2)
    inst = RefinementInstance(g, random_subset(8, 2), 3, MAXCUT_KR)
    sol = solve_sdp(build_gpkc_sdp(inst))
    x0 = inst.x0()
    a = [hyperplane_round(sol, x0, s) for s in range(10)]
    b = [hyperplane_round(sol, x0, s) for s in range(10)]
    for oa, ob in zip(a, b):
        assert oa.assignment == ob.assignment
        assert oa.changed_set == VertexSet.from_mask(oa.assignment.values != x0.values)
        assert oa.temp_set == inst.initial_set ^ oa.changed_set
        assert oa.objective_before_fix == pytest.approx(cut_value(g, oa.temp_set))


def test_same_seed_gives_same_solution():
    g = gnp(8, 0.5, 2)
    inst = RefinementInstance(g, random_subset(8, 2), 3, MAXCUT_KR)
    a = solve_sdp(build_gpkc_sdp(inst), seed=5)
    b = solve_sdp(build_gpkc_sdp(inst), seed=5)
    assert np.array_equal(a.vectors, b.vectors)


def _cut_fixer(inst):
    g, U, k = inst.graph, inst.initial_set, inst.k
    return lambda out: greedy_fix_cut(g, U, k, out.changed_set)


def test_driver_single_round_and_best_of():
    g = gnp(9, 0.5, 8)
    inst = RefinementInstance(g, random_subset(9, 8), 4, MAXCUT_KR)
    sol = solve_sdp(build_gpkc_sdp(inst))
    fixer = _cut_fixer(inst)
    one = rounding_driver(inst, sol, 1, fixer, 3)
    # the driver's i-th rounding uses the stream keyed by (seed, "round", i)
    assert one == fixer(hyperplane_round(sol, inst.x0(), stream(3, "round", 0)))
    many = rounding_driver(inst, sol, 50, fixer, 3)
    U = inst.initial_set
    assert cut_value(g, U ^ many) >= cut_value(g, U ^ one)


def test_driver_finds_optimum_on_small_instances():
    hits = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 9))
        g = gnp(n, 0.5, seed + 100)
        inst = RefinementInstance(g, random_subset(n, seed + 100), int(rng.integers(1, n)), MAXCUT_KR)
        sol = solve_sdp(build_gpkc_sdp(inst), seed=seed)
        C = rounding_driver(inst, sol, 200, _cut_fixer(inst), seed)
        hits += cut_value(g, inst.initial_set ^ C) >= brute_force_maxcutkr(inst)[1] - 1e-9
    assert hits >= 45


def test_vector_dump_roundtrip(tmp_path):
    sol = gw_maxcut(C5)
    path = tmp_path / "v.txt"
    sol.save(path)
    assert path.read_text().splitlines()[0] == f"5 {sol.rank}"
    assert np.array_equal(VectorSolution.load_vectors(path), sol.vectors)
