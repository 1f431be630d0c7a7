"""Named process presets used by configs, the harness and the test suite.

The closing-example preset is the log-suppressed-positive-tail process:
negative jumps with a stable power tail, positive jumps damped by
1/log(x + 1/x)^{1+q}.  Its creeping and large-scale linearity integrals
both converge (the pieces decay like 1/k^{1+q} on dyadic scales), so the
ascending renewal function is comparable to the identity on all scales
even though the process has unbounded variation and no Gaussian part.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate

from .model import (
    CGMY,
    BrownianPlusCompoundPoisson,
    LevyMeasure,
    LevyTriplet,
    ProcessSpec,
    RawTriplet,
    Stable,
    SpectrallyOneSided,
    brownian,
)

__all__ = ["preset", "PRESETS", "closing_example", "acceptance_presets"]


def _interp_loglog(x, y):
    from scipy.interpolate import PchipInterpolator
    lx, ly = np.log(x), np.log(np.maximum(y, 1e-300))
    pch = PchipInterpolator(lx, ly, extrapolate=True)

    def f(r):
        r = np.asarray(r, dtype=float)
        return np.exp(pch(np.log(np.clip(r, x[0], x[-1]))))

    return f


@lru_cache(maxsize=8)
def closing_example(alpha: float = 1.5, log_q: float = 1.0) -> RawTriplet:
    """nu_-(dx) = |x|^{-1-alpha}, nu_+(dx) = x^{-1-alpha} / ln(x + 1/x)^{1+log_q}."""

    def dens_pos(x):
        x = np.asarray(x, dtype=float)
        return x ** (-1.0 - alpha) / np.log(x + 1.0 / x) ** (1.0 + log_q)

    def density(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", over="ignore"):
            pos = np.where(x > 0, dens_pos(np.where(x > 0, ax, 1.0)), 0.0)
            neg = np.where(x < 0, ax ** (-1.0 - alpha), 0.0)
        return pos + neg

    # positive-side tail, first absolute moment and truncated second moment
    # are tabulated once on a wide log grid (the log factor has no closed
    # form); 80 points/decade keeps the pchip error below the 1e-6 tail
    # consistency tolerance
    grid = np.geomspace(1e-10, 1e10, 1601)
    tail_pieces = [
        integrate.quad(dens_pos, a, b, limit=200)[0]
        for a, b in zip(grid[:-1], grid[1:])
    ]
    # remainder beyond the grid from the local power slope (~ -1-alpha)
    rem = float(dens_pos(grid[-1])) * grid[-1] / alpha
    upper = np.concatenate([(np.cumsum(tail_pieces[::-1])[::-1] + rem), [rem]])
    upper_f = _interp_loglog(grid, upper)

    x1_pieces = [
        integrate.quad(lambda u: u * dens_pos(u), a, b, limit=200)[0]
        for a, b in zip(grid[:-1], grid[1:])
    ]
    rem1 = float(dens_pos(grid[-1])) * grid[-1] ** 2 / (alpha - 1.0)
    upper_x1 = np.concatenate([(np.cumsum(x1_pieces[::-1])[::-1] + rem1), [rem1]])
    upper_x1_f = _interp_loglog(grid, upper_x1)

    x2_pieces = [
        integrate.quad(lambda u: u * u * dens_pos(u), a, b, limit=200)[0]
        for a, b in zip(grid[:-1], grid[1:])
    ]
    inner_x2_pos = np.concatenate([[0.0], np.cumsum(x2_pieces)])
    inner_x2_f = _interp_loglog(grid, np.maximum(inner_x2_pos, inner_x2_pos[1] * 1e-12))

    def upper_tail(r):
        return upper_f(r)

    def lower_tail(r):
        return np.asarray(r, dtype=float) ** (-alpha) / alpha

    def inner_x2(r):
        r = np.asarray(r, dtype=float)
        return inner_x2_f(r) + r ** (2.0 - alpha) / (2.0 - alpha)

    def outer_x1(r):
        r = np.asarray(r, dtype=float)
        return upper_x1_f(r) - r ** (1.0 - alpha) / (alpha - 1.0)

    measure = LevyMeasure(density=density, upper_tail=upper_tail,
                          lower_tail=lower_tail, inner_x2=inner_x2,
                          outer_x1=outer_x1)
    gamma = -float(outer_x1(1.0))   # E X_1 = 0
    trip = LevyTriplet(0.0, gamma, measure)
    return RawTriplet(trip, alpha_hint=alpha, symmetric=False,
                      name="closing_example")


PRESETS = {
    "brownian": lambda: brownian(1.0),
    "stable15-sym": lambda: Stable(1.5),
    "stable15-asym": lambda: Stable(1.5, 0.5),
    "stable18-asym": lambda: Stable(1.8, 0.5),
    "stable08": lambda: Stable(0.8),
    "cgmy-sym": lambda: CGMY.zero_mean(1.0, 1.0, 3.0, 3.0, 1.4),
    "cgmy-asym": lambda: CGMY.zero_mean(0.7, 1.3, 2.0, 4.0, 1.4),
    "bm-poisson": lambda: BrownianPlusCompoundPoisson.zero_mean(
        0.7, rate=1.0, jump_mean=0.0, jump_std=1.0),
    "spectrally-negative": lambda: SpectrallyOneSided(1.0, 2.0, 1.5, "negative"),
    "closing-example": lambda: closing_example(),
}


@lru_cache(maxsize=32)
def preset(name: str) -> ProcessSpec:
    """One shared instance per preset name (evaluator caches key on identity)."""
    try:
        builder = PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return builder()


def acceptance_presets() -> dict:
    """The zero-mean WLSC(alpha > 1) specs the acceptance bounds run over."""
    names = ("brownian", "stable15-sym", "stable15-asym", "cgmy-sym", "cgmy-asym")
    return {n: preset(n) for n in names}
