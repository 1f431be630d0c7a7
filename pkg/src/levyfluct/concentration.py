"""Concentration function h, truncated drift b_r and the inverse of h.

    h(r)  = sigma^2 / r^2 + integral (1 ^ x^2/r^2) nu(dx)
    b_r   = gamma + integral x (1_{(-r,r)}(x) - 1_{(-1,1)}(x)) nu(dx)

h is non-increasing with lambda^2 h(lambda r) <= h(r) for lambda <= 1, and
is sandwiched by sup_{|x| <= 1/r} Re psi(x) within the factors [1/24, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import RangeError
from .model import ProcessSpec, Stable, psi
from .gridquad import log_grid

__all__ = [
    "h",
    "b_r",
    "h_inv",
    "sup_re_psi",
    "ConcentrationProfile",
    "profile",
]


def _h_scalar(spec: ProcessSpec, r: float) -> float:
    if r <= 0:
        raise ValueError(f"r must be > 0, got {r}")
    if isinstance(spec, Stable) and spec.alpha < 2:
        a = spec.alpha
        return spec.scale / spec.tail_intensity * r ** (-a) * (1.0 / (2.0 - a) + 1.0 / a)
    trip = spec.triplet()
    out = trip.sigma ** 2 / r ** 2
    m = trip.measure
    if m.inner_x2 is not None:
        inner = float(m.inner_x2(r))
    else:
        # x^2 nu(dx) has an integrable singularity at 0: log panels toward 0
        n = m.density
        edges = np.geomspace(r * 1e-10, r, 44)
        inner = sum(
            integrate.quad(lambda u: u * u * (n(u) + n(-u)), a_, b_, limit=100)[0]
            for a_, b_ in zip(edges[:-1], edges[1:])
        )
    return out + inner / r ** 2 + float(m.tail_mass(r))


def h(spec: ProcessSpec, r):
    """Concentration function h(r); closed form where the family has one."""
    if np.ndim(r):
        return np.array([_h_scalar(spec, float(x)) for x in np.asarray(r, dtype=float)])
    return _h_scalar(spec, float(r))


def b_r(spec: ProcessSpec, r):
    """Truncated drift b_r; exactly gamma at r = 1 and for symmetric nu."""
    if np.ndim(r):
        return np.array([b_r(spec, float(x)) for x in np.asarray(r, dtype=float)])
    r = float(r)
    if r <= 0:
        raise ValueError(f"r must be > 0, got {r}")
    trip = spec.triplet()
    if r == 1.0 or spec.is_symmetric():
        return trip.gamma
    m = trip.measure
    if m.outer_x1 is not None:
        # b_r = gamma + outer_x1(1) - outer_x1(r) for any r (telescoping annulus)
        return trip.gamma + float(m.outer_x1(1.0)) - float(m.outer_x1(r))
    lo, hi = min(r, 1.0), max(r, 1.0)
    sign = 1.0 if r > 1.0 else -1.0
    n = m.density
    val, _ = integrate.quad(lambda u: u * (n(u) - n(-u)), lo, hi, limit=400)
    return trip.gamma + sign * val


def h_inv(spec: ProcessSpec, u, rtol: float = 1e-8):
    """Solve h(r) = u for r by bracketing bisection on the log axis.

    Raises RangeError when u is outside the achievable range of h (e.g. a
    finite-activity measure with sigma = 0 has bounded h).
    """
    if np.ndim(u):
        return np.array([h_inv(spec, float(x), rtol) for x in np.asarray(u, dtype=float)])
    u = float(u)
    if u <= 0:
        raise ValueError(f"u must be > 0, got {u}")
    lo = hi = 1.0
    f_lo = f_hi = _h_scalar(spec, 1.0)
    for _ in range(64):
        if f_lo >= u:
            break
        lo /= 8.0
        f_lo = _h_scalar(spec, lo)
    for _ in range(64):
        if f_hi <= u:
            break
        hi *= 8.0
        f_hi = _h_scalar(spec, hi)
    if f_lo < u or f_hi > u:
        raise RangeError(
            f"u={u:g} outside the range of h", achievable=(f_hi, f_lo))
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if _h_scalar(spec, mid) >= u:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * lo:
            break
    return math.sqrt(lo * hi)


def sup_re_psi(spec: ProcessSpec, r: float, n_grid: int = 512) -> float:
    """sup over |x| <= 1/r of Re psi(x) by dense log grid plus local refinement.

    Re psi can be non-monotone under signed compensation, so an endpoint
    evaluation alone would be unsound.
    """
    top = 1.0 / r
    grid = np.geomspace(top * 1e-6, top, n_grid)
    vals = np.real(psi(spec, grid))
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, n_grid - 1)]
    # golden-section refinement on the log axis
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(lo), math.log(hi)
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc = float(np.real(psi(spec, math.exp(c))))
    fd = float(np.real(psi(spec, math.exp(d))))
    for _ in range(40):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = float(np.real(psi(spec, math.exp(d))))
        else:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = float(np.real(psi(spec, math.exp(c))))
        if b - a < 1e-10:
            break
    return max(float(vals[k]), fc, fd)


@dataclass(frozen=True)
class ConcentrationProfile:
    """Bundled evaluators for h, b_r and h^{-1} with tolerance metadata."""

    h: Callable
    b: Callable
    h_inv: Callable
    rtol: float = 1e-8


def profile(spec: ProcessSpec, rtol: float = 1e-8) -> ConcentrationProfile:
    return ConcentrationProfile(
        h=lambda r: h(spec, r),
        b=lambda r: b_r(spec, r),
        h_inv=lambda u: h_inv(spec, u, rtol),
        rtol=rtol,
    )


def concentration_table(spec: ProcessSpec, r_grid) -> np.ndarray:
    """Columns (r, h(r), b_r, sup Re psi) -- the fixed CSV emission order."""
    r_grid = np.asarray(r_grid, dtype=float)
    return np.column_stack([
        r_grid,
        h(spec, r_grid),
        b_r(spec, r_grid),
        [sup_re_psi(spec, float(r)) for r in r_grid],
    ])
