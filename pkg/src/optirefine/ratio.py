"""Worst-case approximation ratios of the rounding algorithms as a function of ``tau = k/n``.

For fixed analysis parameters ``(gamma, eta)`` the guarantee is the minimum of
a one-dimensional function over the normalized size ``mu`` of the rounded
set; after substitution it has the shape ``s^2 (A/u^2 + B/u + gamma)``, whose
minimum over an interval sits at an endpoint or at the stationary point
``u0 = -2A/B``.  The reported ratio is the best guarantee over a
``(gamma, eta)`` grid, polished by a local search.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .sdp import GW_ALPHA, GW_BETA

GAMMA_RANGE = (0.1, 5.0)
ETA_RANGE = ((1 - GW_ALPHA + 0.01) / GW_ALPHA, 10.0)


@dataclass(frozen=True)
class RatioPoint:
    tau: float
    ratio: float
    gamma: float
    eta: float


def _quad_min(scale, A, B, gamma, lo, hi):
    """min over u in [lo, hi] of scale * (A/u^2 + B/u + gamma)."""
    A, B, gamma = np.broadcast_arrays(np.asarray(A, float), np.asarray(B, float), np.asarray(gamma, float))

    def f(u):
        return scale * (A / u**2 + B / u + gamma)

    best = np.minimum(f(lo), f(hi))
    with np.errstate(divide="ignore", invalid="ignore"):
        u0 = -2 * A / B
    inside = np.isfinite(u0) & (u0 > lo) & (u0 < hi)
    best = np.where(inside, np.minimum(best, f(np.where(inside, u0, lo))), best)
    degenerate = B == 0
    if np.any(degenerate):
        grid = np.arange(lo, hi + 1e-12, 1e-3)
        vals = scale * (A[..., None] / grid**2 + B[..., None] / grid + gamma[..., None])
        best = np.where(degenerate, vals.min(axis=-1), best)
    return best


def _base(tau, lam_bar, gamma, eta):
    return lam_bar + gamma * eta * GW_ALPHA + gamma * (GW_ALPHA * (1 - tau) ** 2 - 1 + 2 * tau)


def large_side_bound(tau, lam_bar, gamma, eta):
    """Guarantee when the rounded set is at least as large as the target (``mu`` in ``[tau, 1]``)."""
    K = _base(tau, lam_bar, gamma, eta)
    A = K - gamma * eta / (1 - tau)
    B = gamma * eta / (1 - tau) - 2 * gamma * tau
    return _quad_min(tau**2, A, B, gamma, tau, 1.0)


def small_side_bound(tau, lam_bar, gamma, eta):
    """Guarantee when the rounded set is smaller than the target (``mu`` in ``(0, tau]``), via ``nu = 1 - mu``."""
    K = _base(tau, lam_bar, gamma, eta)
    A = K - gamma * eta / tau - gamma * (2 * tau - 1)
    B = gamma * eta / tau - 2 * gamma * (1 - tau)
    return _quad_min((1 - tau) ** 2, A, B, gamma, 1 - tau, 1.0)


def _maximize(fn, gamma_steps=99, eta_steps=400) -> tuple[float, float, float]:
    g = np.linspace(*GAMMA_RANGE, gamma_steps)
    e = np.linspace(*ETA_RANGE, eta_steps)
    G, E = np.meshgrid(g, e, indexing="ij")
    vals = fn(G, E)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = (float(vals[i, j]), float(G[i, j]), float(E[i, j]))

    def neg(p):
        gam, eta = p
        if not (GAMMA_RANGE[0] <= gam <= GAMMA_RANGE[1] and ETA_RANGE[0] <= eta <= ETA_RANGE[1]):
            return np.inf
        return -float(fn(np.array(gam), np.array(eta)))

    res = minimize(neg, x0=[best[1], best[2]], method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-10})
    if np.isfinite(res.fun) and -res.fun > best[0]:
        best = (float(-res.fun), float(res.x[0]), float(res.x[1]))
    return best


def approx_ratio_curve(problem: str, taus, pinned: tuple[float, float] | None = None) -> list[RatioPoint]:
    """Worst-case ratio for each ``tau`` in ``taus``.

    ``problem`` is ``"dskr"`` or ``"maxcutkr"``.  With ``pinned=(gamma, eta)``
    the parameters are fixed instead of optimized.  For max-cut the two size
    regimes are optimized separately and the smaller guarantee is reported
    (its ``gamma, eta`` are those of the binding regime).
    """
    problem = problem.lower().replace("-", "")
    out = []
    for tau in taus:
        tau = float(tau)
        if not 0 < tau < 1:
            raise ValueError("tau must lie in (0, 1)")
        if problem == "dskr":
            parts = [lambda G, E, t=tau: large_side_bound(t, GW_BETA, G, E)]
        elif problem == "maxcutkr":
            parts = [
                lambda G, E, t=tau: large_side_bound(t, GW_ALPHA, G, E),
                lambda G, E, t=tau: small_side_bound(t, GW_ALPHA, G, E),
            ]
        else:
            raise ValueError(f"unknown problem {problem!r}")
        if pinned is not None:
            gam, eta = pinned
            vals = [float(fn(np.array(gam), np.array(eta))) for fn in parts]
            out.append(RatioPoint(tau, min(vals), gam, eta))
        else:
            best = min((_maximize(fn) for fn in parts), key=lambda b: b[0])
            out.append(RatioPoint(tau, *best))
    return out
