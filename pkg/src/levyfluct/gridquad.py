"""Grid construction and fixed-order panel quadrature helpers.

The heavy integrals in this package (Fourier inversion, ladder exponents)
are evaluated on fixed log-spaced Gauss-Legendre panel grids so that the
numerical error varies smoothly with the outer parameters.  scipy's
adaptive routines are used where a one-off scalar integral is enough.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "log_grid",
    "gl_panels",
    "gl_log_panels",
    "panel_integrate",
    "fourier_tail",
]


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n log-spaced points on [lo, hi]."""
    if not (0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got ({lo}, {hi})")
    return np.geomspace(lo, hi, int(n))


def gl_panels(edges: np.ndarray, order: int = 12):
    """Gauss-Legendre nodes and weights on the panels defined by ``edges``.

    Returns flat arrays (nodes, weights); integrating f amounts to
    ``weights @ f(nodes)``.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1], edges[1:]
    mid = (a + b) / 2.0
    half = (b - a) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights

def gl_log_panels(lo: float, hi: float, per_decade: int = 10, order: int = 12):
    """Panel nodes/weights with log-spaced panel edges on [lo, hi]."""
    n_panels = max(1, int(np.ceil(np.log10(hi / lo) * per_decade)))
    edges = np.geomspace(lo, hi, n_panels + 1)
    return gl_panels(edges, order)


def panel_integrate(f, edges: np.ndarray, order: int = 12) -> float:
    """Integrate a vectorized callable over panels; plain GL, no adaptivity."""
    nodes, weights = gl_panels(np.asarray(edges, dtype=float), order)
    return float(weights @ f(nodes))


def _repeated_average(partials: np.ndarray) -> float:
    arr = np.asarray(partials[-16:], dtype=float)
    while arr.size > 1:
        arr = (arr[1:] + arr[:-1]) / 2.0
    return float(arr[0])


def fourier_tail(f, a: float, omega: float, trig: str = "cos",
                 rtol: float = 1e-10, max_chunks: int = 60,
                 per_chunk: int = 32, order: int = 12) -> float:
    """integral_a^inf trig(omega x) f(x) dx for decaying monotone-ish f.

    Half-period panels aligned to the sign changes of the trig factor give
    an alternating series of panel integrals; repeated averaging of the
    partial sums (Euler transform) accelerates even slowly decaying
    power-law envelopes.  f must be vectorized; panels are evaluated in
    chunks to keep the call count low.
    """
    if omega <= 0:
        raise ValueError("omega must be > 0")
    half = np.pi / omega
    offset = 0.0 if trig == "sin" else 0.5     # zeros: sin at k pi, cos at (k+1/2) pi
    trig_fn = np.sin if trig == "sin" else np.cos
    k0 = int(np.ceil(a / half - offset - 1e-12))
    node0 = (k0 + offset) * half
    glx, glw = np.polynomial.legendre.leggauss(order)
    total = 0.0
    if node0 > a:
        # below one half-period there is no oscillation to resolve, but f
        # may decay over many scales: log-split the head panel
        n_sub = max(1, int(np.ceil(np.log10(node0 / a) * 8)))
        nodes, w = gl_panels(np.geomspace(a, node0, n_sub + 1), order)
        total += float(w @ (trig_fn(omega * nodes) * f(nodes)))
    running = total
    partials: list = []
    acc_prev = None
    scale = abs(total)
    for c in range(max_chunks):
        ks = k0 + c * per_chunk + np.arange(per_chunk)
        lo = (ks + offset) * half
        mid = lo + half / 2.0
        nodes = (mid[:, None] + (half / 2.0) * glx[None, :])
        vals = trig_fn(omega * nodes) * f(nodes.ravel()).reshape(nodes.shape)
        pieces = (half / 2.0) * (vals @ glw)
        for p in pieces:
            running += float(p)
            partials.append(running)
        scale = max(scale, float(np.max(np.abs(pieces))) * 2.0)
        acc = _repeated_average(partials)
        if acc_prev is not None and abs(acc - acc_prev) <= rtol * (scale + 1e-300):
            return acc
        acc_prev = acc
    from .errors import QuadratureError
    raise QuadratureError("Fourier tail did not settle within budget",
                          requested=rtol)
