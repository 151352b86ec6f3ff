import numpy as np
import pytest

from optirefine.ratio import _quad_min, approx_ratio_curve, large_side_bound, small_side_bound
from optirefine.sdp import GW_ALPHA, GW_BETA


def test_gw_constants():
    theta = np.linspace(1e-4, np.pi, 200_001)
    assert GW_ALPHA == pytest.approx(np.min(2 / np.pi * theta / (1 - np.cos(theta))), abs=1e-6)
    assert 0.878 < GW_ALPHA < 0.879
    assert 0.796 < GW_BETA < 0.797


@pytest.mark.parametrize("A, B, gamma, lo, hi", [(1.0, -3.0, 0.5, 0.2, 1.0), (-1.0, 2.0, 1.0, 0.3, 1.0),
                                                 (2.0, 0.0, 0.1, 0.5, 1.0), (0.5, 0.5, 0.0, 0.1, 0.9)])
def test_quadratic_minimum_against_grid(A, B, gamma, lo, hi):
    grid = np.linspace(lo, hi, 200_001)
    brute = np.min(0.7 * (A / grid**2 + B / grid + gamma))
    assert float(_quad_min(0.7, A, B, gamma, lo, hi)) == pytest.approx(brute, abs=1e-6)


@pytest.mark.parametrize("problem, tau", [("dskr", 0.5), ("dskr", 0.25), ("maxcutkr", 0.4)])
def test_curve_beats_plain_grid_search(problem, tau):
    lam = GW_BETA if problem == "dskr" else GW_ALPHA
    G, E = np.meshgrid(np.linspace(0.1, 5, 60), np.geomspace((1 - GW_ALPHA + 0.01) / GW_ALPHA, 10, 120))
    vals = large_side_bound(tau, lam, G, E)
    if problem == "maxcutkr":
        vals = np.minimum(vals, small_side_bound(tau, lam, G, E))
    point = approx_ratio_curve(problem, [tau])[0]
    assert point.ratio >= vals.max() - 1e-9
    # the reported parameters reproduce the reported ratio
    assert approx_ratio_curve(problem, [tau], pinned=(point.gamma, point.eta))[0].ratio == pytest.approx(point.ratio)


def test_dskr_curve_values():
    assert approx_ratio_curve("dskr", [0.5])[0].ratio == pytest.approx(0.5835, abs=2e-3)
    assert approx_ratio_curve("dskr", [0.5], pinned=(0.92, 1.65))[0].ratio > 0.58
    assert approx_ratio_curve("dskr", [0.5], pinned=(3.87, 0.65 / 3.87))[0].ratio == pytest.approx(0.517, abs=5e-3)


def test_maxcut_curve_value():
    assert 0.63 <= approx_ratio_curve("maxcutkr", [0.5])[0].ratio <= 0.66


@pytest.mark.parametrize("problem", ["dskr", "maxcutkr"])
def test_curve_is_monotone_up_to_half(problem):
    taus = np.arange(0.05, 0.501, 0.05)
    ratios = [p.ratio for p in approx_ratio_curve(problem, taus)]
    assert all(b >= a - 1e-6 for a, b in zip(ratios, ratios[1:]))
    assert all(0 < r < 1 for r in ratios)


def test_curve_parameters_are_in_range():
    for p in approx_ratio_curve("dskr", [0.2, 0.4]):
        assert 0.1 <= p.gamma <= 5 and (1 - GW_ALPHA + 0.01) / GW_ALPHA <= p.eta <= 10


def test_curve_rejects_bad_input():
    with pytest.raises(ValueError):
        approx_ratio_curve("dskr", [0.0])
    with pytest.raises(ValueError):
        approx_ratio_curve("vc", [0.5])
