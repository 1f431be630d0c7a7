"""Levy process specifications and the characteristic exponent.

A process is described by its generating triplet (sigma, gamma, nu) under
the convention

    E exp(i xi X_t) = exp(-t psi(xi)),
    psi(xi) = sigma^2 xi^2 - i gamma xi
              - integral( e^{i xi x} - 1 - i x xi 1_{(-1,1)}(x) ) nu(dx).

Note the Gaussian part enters as sigma^2 xi^2 (no 1/2), so Brownian motion
with sigma = 1 has Var X_t = 2 t.  All closed forms and oracles in the
package use this convention consistently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc, gammaincc
from scipy.stats import norm

from .errors import QuadratureError, SpecError
from .gridquad import fourier_tail, gl_panels, log_grid

__all__ = [
    "LevyMeasure",
    "LevyTriplet",
    "ProcessSpec",
    "Stable",
    "CGMY",
    "BrownianPlusCompoundPoisson",
    "SpectrallyOneSided",
    "RawTriplet",
    "brownian",
    "ScalingCertificate",
    "psi",
    "psi_quadrature",
    "mean_x1",
    "check_wlsc",
    "upper_gamma",
    "validate_spec",
]


# ---------------------------------------------------------------------------
# Special-function helpers
# ---------------------------------------------------------------------------

def upper_gamma(a: float, x):
    """Upper incomplete gamma Gamma(a, x) for any real a and x > 0.

    scipy only exposes the regularized version for a > 0; negative orders
    are reached through Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a.
    """
    x = np.asarray(x, dtype=float)
    if a > 0:
        return gamma_fn(a) * gammaincc(a, x)
    return (upper_gamma(a + 1.0, x) - x ** a * np.exp(-x)) / a


def lower_gamma(a: float, x):
    """Lower incomplete gamma for a > 0."""
    return gamma_fn(a) * gammainc(a, np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# Levy measure and triplet
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevyMeasure:
    """Jump measure given by a density plus its one-sided tails.

    density(x) is the nu-density at x != 0 (vectorized); upper_tail(r) is
    nu(r, inf) and lower_tail(r) is nu(-inf, -r) for r > 0, both
    non-increasing.  Optional closed-form truncated moments speed up the
    concentration function:

      inner_x2(r) = integral_{|x|<r} x^2 nu(dx)
      outer_x1(r) = integral_{|x|>=r} x nu(dx)   (None when divergent)
    """

    density: Callable
    upper_tail: Callable
    lower_tail: Callable
    inner_x2: Optional[Callable] = None
    outer_x1: Optional[Callable] = None

    def tail_mass(self, r):
        """nu({|x| >= r})."""
        return self.upper_tail(r) + self.lower_tail(r)


ZERO_MEASURE = LevyMeasure(
    density=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    upper_tail=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    lower_tail=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    inner_x2=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    outer_x1=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
)


@dataclass(frozen=True)
class LevyTriplet:
    """Generating triplet (sigma, gamma, measure)."""

    sigma: float
    gamma: float
    measure: LevyMeasure

    def __post_init__(self):
        if self.sigma < 0:
            raise SpecError(f"sigma must be >= 0, got {self.sigma}")


def _small_mean(measure: LevyMeasure) -> float:
    """integral_{|x|<1} x nu(dx) for a finite-activity measure."""
    pos, _ = integrate.quad(lambda x: x * measure.density(x), 0.0, 1.0, limit=200)
    neg, _ = integrate.quad(lambda x: x * measure.density(x), -1.0, 0.0, limit=200)
    return pos + neg


def reject_compound_poisson(triplet: LevyTriplet) -> None:
    """Raise SpecError for compound-Poisson triplets (the excluded case)."""
    if triplet.sigma > 0:
        return
    mass_outer = float(triplet.measure.tail_mass(1e-6))
    mass_inner = float(triplet.measure.tail_mass(1e-12))
    if not np.isfinite(mass_inner) or mass_inner > mass_outer * 1.001 + 1e-12:
        return  # infinite activity: mass still growing toward 0
    drift = triplet.gamma - _small_mean(triplet.measure)
    if abs(drift) < 1e-12:
        raise SpecError(
            "compound Poisson process (sigma = 0, finite jump mass, zero drift) "
            "is outside the supported class"
        )


# ---------------------------------------------------------------------------
# Process specifications
# ---------------------------------------------------------------------------

class ProcessSpec:
    """Base class: a family tag plus numeric parameters.

    Subclasses are frozen dataclasses, hence immutable, hashable and safe
    to share across workers.  Every family exposes its triplet; families
    with a known characteristic exponent also provide the closed form.
    """

    label = "process"

    def triplet(self) -> LevyTriplet:
        raise NotImplementedError

    def psi_closed(self, xi):
        """Closed-form psi(xi), or None when the family has none."""
        return None

    def scaling_alpha(self) -> float:
        """Natural candidate exponent for the WLSC check on Re psi."""
        raise NotImplementedError

    def is_symmetric(self) -> bool:
        return False

    def dual(self) -> "ProcessSpec":
        """Spec of the reflected process -X."""
        raise NotImplementedError


@dataclass(frozen=True)
class Stable(ProcessSpec):
    """Strictly stable process with psi(xi) = scale |xi|^a (1 - i b tan(pi a/2) sgn xi).

    beta = +1 puts all jump mass on the positive half-line.  alpha = 2 is
    Brownian motion with sigma = sqrt(scale).  The asymmetric Cauchy case
    (alpha = 1, beta != 0) is not strictly stable without a logarithmic
    drift and is rejected.
    """

    alpha: float
    beta: float = 0.0
    scale: float = 1.0
    label = "stable"

    def __post_init__(self):
        if not (0 < self.alpha <= 2):
            raise SpecError(f"alpha must be in (0, 2], got {self.alpha}")
        if not (-1 <= self.beta <= 1):
            raise SpecError(f"beta must be in [-1, 1], got {self.beta}")
        if self.scale <= 0:
            raise SpecError(f"scale must be > 0, got {self.scale}")
        if self.alpha == 1 and self.beta != 0:
            raise SpecError("asymmetric Cauchy (alpha=1, beta!=0) is not supported")
        if self.alpha == 2 and self.beta != 0:
            raise SpecError("alpha=2 requires beta=0")

    @property
    def tail_intensity(self) -> float:
        """Prefactor A with scale = (c_+ + c_-) A for the power-law tails."""
        a = self.alpha
        return math.pi / (2.0 * math.sin(math.pi * a / 2.0) * gamma_fn(1.0 + a))

    @property
    def c_plus(self) -> float:
        if self.alpha == 2:
            return 0.0
        return self.scale * (1.0 + self.beta) / (2.0 * self.tail_intensity)

    @property
    def c_minus(self) -> float:
        if self.alpha == 2:
            return 0.0
        return self.scale * (1.0 - self.beta) / (2.0 * self.tail_intensity)

    @property
    def positivity(self) -> float:
        """rho = P(X_t > 0), constant in t for strictly stable processes."""
        a, b = self.alpha, self.beta
        if a == 2:
            return 0.5
        return 0.5 + math.atan(b * math.tan(math.pi * a / 2.0)) / (math.pi * a)

    def triplet(self) -> LevyTriplet:
        a = self.alpha
        if a == 2:
            return LevyTriplet(math.sqrt(self.scale), 0.0, ZERO_MEASURE)
        cp, cm = self.c_plus, self.c_minus

        def density(x):
            x = np.asarray(x, dtype=float)
            c = np.where(x > 0, cp, cm)
            return c * np.abs(x) ** (-1.0 - a)

        measure = LevyMeasure(
            density=density,
            upper_tail=lambda r: cp * np.asarray(r, dtype=float) ** (-a) / a,
            lower_tail=lambda r: cm * np.asarray(r, dtype=float) ** (-a) / a,
            inner_x2=lambda r: (cp + cm) * np.asarray(r, dtype=float) ** (2.0 - a) / (2.0 - a),
            outer_x1=(
                (lambda r: (cp - cm) * np.asarray(r, dtype=float) ** (1.0 - a) / (a - 1.0))
                if a > 1 else None
            ),
        )
        if a > 1:
            gam = -(cp - cm) / (a - 1.0)       # E X_1 = 0
        elif a < 1:
            gam = (cp - cm) / (1.0 - a)        # no drift: psi has no linear term
        else:
            gam = 0.0                          # symmetric Cauchy
        return LevyTriplet(0.0, gam, measure)

    def psi_closed(self, xi):
        xi = np.asarray(xi, dtype=float)
        a = self.alpha
        if a == 2:
            return self.scale * xi ** 2 + 0j
        skew = self.beta * math.tan(math.pi * a / 2.0) if a != 1 else 0.0
        return self.scale * np.abs(xi) ** a * (1.0 - 1j * skew * np.sign(xi))

    def scaling_alpha(self) -> float:
        return self.alpha

    def is_symmetric(self) -> bool:
        return self.beta == 0.0

    def dual(self) -> "Stable":
        return replace(self, beta=-self.beta)


def brownian(sigma: float = 1.0) -> "BrownianPlusCompoundPoisson":
    """Pure Brownian motion with psi = sigma^2 xi^2."""
    return BrownianPlusCompoundPoisson(sigma=sigma, rate=0.0)


@dataclass(frozen=True)
class BrownianPlusCompoundPoisson(ProcessSpec):
    """Gaussian part plus finite-activity Gaussian jumps.

    nu(dx) = rate * N(jump_mean, jump_std^2) density; rate = 0 gives plain
    Brownian motion.
    """

    sigma: float
    rate: float = 0.0
    jump_mean: float = 0.0
    jump_std: float = 1.0
    gamma: float = 0.0
    label = "bm_poisson"

    def __post_init__(self):
        if self.sigma <= 0:
            raise SpecError("sigma must be > 0 for this family")
        if self.rate < 0 or self.jump_std <= 0:
            raise SpecError("need rate >= 0 and jump_std > 0")

    def triplet(self) -> LevyTriplet:
        if self.rate == 0:
            return LevyTriplet(self.sigma, self.gamma, ZERO_MEASURE)
        rate, mu, sd = self.rate, self.jump_mean, self.jump_std

        def inner_x2(r):
            r = np.asarray(r, dtype=float)
            a, b = (-r - mu) / sd, (r - mu) / sd
            # E[J^2; |J| < r] for J ~ N(mu, sd^2); the closed form loses all
            # digits to cancellation once r << sd, where the x^2-weighted
            # mass is (2/3) r^3 * density(0) to O((r/sd)^2)
            second = ((mu ** 2 + sd ** 2) * (norm.cdf(b) - norm.cdf(a))
                      + sd * ((mu - r) * norm.pdf(b) - (mu + r) * norm.pdf(a)))
            series = (2.0 / 3.0) * r ** 3 * norm.pdf(0.0, mu, sd)
            return rate * np.where(r < 1e-3 * sd, series, second)

        def outer_x1(r):
            r = np.asarray(r, dtype=float)
            a, b = (-r - mu) / sd, (r - mu) / sd
            upper = mu * norm.sf(b) + sd * norm.pdf(b)
            lower = mu * norm.cdf(a) - sd * norm.pdf(a)
            return rate * (upper + lower)

        measure = LevyMeasure(
            density=lambda x: rate * norm.pdf(np.asarray(x, dtype=float), mu, sd),
            upper_tail=lambda r: rate * norm.sf((np.asarray(r, dtype=float) - mu) / sd),
            lower_tail=lambda r: rate * norm.cdf((-np.asarray(r, dtype=float) - mu) / sd),
            inner_x2=inner_x2,
            outer_x1=outer_x1,
        )
        return LevyTriplet(self.sigma, self.gamma, measure)

    def psi_closed(self, xi):
        xi = np.asarray(xi, dtype=float)
        base = self.sigma ** 2 * xi ** 2 - 1j * self.gamma * xi
        if self.rate == 0:
            return base + 0j
        mu, sd = self.jump_mean, self.jump_std
        jump_cf = np.exp(1j * mu * xi - 0.5 * (sd * xi) ** 2)
        compensator = 1j * xi * self._small_jump_mean()
        return base - self.rate * (jump_cf - 1.0) + self.rate * compensator

    def _small_jump_mean(self) -> float:
        # E[J; |J| < 1]
        mu, sd = self.jump_mean, self.jump_std
        a, b = (-1 - mu) / sd, (1 - mu) / sd
        return mu * (norm.cdf(b) - norm.cdf(a)) - sd * (norm.pdf(b) - norm.pdf(a))

    def scaling_alpha(self) -> float:
        return 2.0

    def is_symmetric(self) -> bool:
        return self.jump_mean == 0.0 and self.gamma == 0.0

    def dual(self) -> "BrownianPlusCompoundPoisson":
        return replace(self, jump_mean=-self.jump_mean, gamma=-self.gamma)

    @classmethod
    def zero_mean(cls, sigma, rate, jump_mean=0.0, jump_std=1.0):
        probe = cls(sigma=sigma, rate=rate, jump_mean=jump_mean, jump_std=jump_std)
        if rate == 0:
            return probe
        out = probe.triplet().measure.outer_x1(1.0)
        return replace(probe, gamma=-float(out))


@dataclass(frozen=True)
class CGMY(ProcessSpec):
    """Tempered-stable jump process with density C e^{-M x} x^{-1-Y} (x > 0)
    and C_- e^{-G |x|} |x|^{-1-Y} (x < 0)."""

    c_plus: float
    c_minus: float
    g: float
    m: float
    y: float
    gamma: float = 0.0
    label = "cgmy"

    def __post_init__(self):
        if self.c_plus < 0 or self.c_minus < 0 or self.c_plus + self.c_minus == 0:
            raise SpecError("need C+ , C- >= 0 with C+ + C- > 0")
        if self.g <= 0 or self.m <= 0:
            raise SpecError("need G, M > 0")
        if not (0 < self.y < 2) or self.y == 1:
            raise SpecError(f"Y must be in (0,2) \\ {{1}}, got {self.y}")

    def triplet(self) -> LevyTriplet:
        cp, cm, g, m, y = self.c_plus, self.c_minus, self.g, self.m, self.y

        def density(x):
            x = np.asarray(x, dtype=float)
            ax = np.abs(x)
            c = np.where(x > 0, cp, cm)
            lam = np.where(x > 0, m, g)
            return c * np.exp(-lam * ax) * ax ** (-1.0 - y)

        measure = LevyMeasure(
            density=density,
            upper_tail=lambda r: cp * m ** y * upper_gamma(-y, m * np.asarray(r, dtype=float)),
            lower_tail=lambda r: cm * g ** y * upper_gamma(-y, g * np.asarray(r, dtype=float)),
            inner_x2=lambda r: (cp * m ** (y - 2.0) * lower_gamma(2.0 - y, m * np.asarray(r, dtype=float))
                                + cm * g ** (y - 2.0) * lower_gamma(2.0 - y, g * np.asarray(r, dtype=float))),
            outer_x1=lambda r: (cp * m ** (y - 1.0) * upper_gamma(1.0 - y, m * np.asarray(r, dtype=float))
                                - cm * g ** (y - 1.0) * upper_gamma(1.0 - y, g * np.asarray(r, dtype=float))),
        )
        return LevyTriplet(0.0, self.gamma, measure)

    def mean(self) -> float:
        tm = self.triplet().measure
        return self.gamma + float(tm.outer_x1(1.0))

    def psi_closed(self, xi):
        xi = np.asarray(xi, dtype=complex)
        cp, cm, g, m, y = self.c_plus, self.c_minus, self.g, self.m, self.y
        gy = gamma_fn(-y)
        jump = gy * (cp * ((m - 1j * xi) ** y - m ** y + 1j * xi * y * m ** (y - 1.0))
                     + cm * ((g + 1j * xi) ** y - g ** y - 1j * xi * y * g ** (y - 1.0)))
        return -1j * self.mean() * xi - jump

    def scaling_alpha(self) -> float:
        return self.y

    def is_symmetric(self) -> bool:
        return self.c_plus == self.c_minus and self.g == self.m and self.gamma == 0.0

    def dual(self) -> "CGMY":
        return CGMY(self.c_minus, self.c_plus, self.m, self.g, self.y, -self.gamma)

    @classmethod
    def zero_mean(cls, c_plus, c_minus, g, m, y) -> "CGMY":
        """Choose gamma so that E X_1 = 0."""
        probe = cls(c_plus, c_minus, g, m, y)
        return replace(probe, gamma=-float(probe.triplet().measure.outer_x1(1.0)))


@dataclass(frozen=True)
class SpectrallyOneSided(ProcessSpec):
    """Gaussian part plus finite-activity exponential jumps on one side.

    side="negative" puts nu on (-inf, 0): nu(dx) = rate * b e^{b x} dx for
    x < 0 with b = tail_decay.  gamma defaults to the zero-mean choice.
    """

    sigma: float
    rate: float
    tail_decay: float
    side: str = "negative"
    gamma: Optional[float] = None
    label = "one_sided"

    def __post_init__(self):
        if self.sigma <= 0 or self.rate <= 0 or self.tail_decay <= 0:
            raise SpecError("need sigma, rate, tail_decay > 0")
        if self.side not in ("negative", "positive"):
            raise SpecError(f"side must be 'negative' or 'positive', got {self.side!r}")

    def _sign(self) -> float:
        return -1.0 if self.side == "negative" else 1.0

    def _gamma(self) -> float:
        if self.gamma is not None:
            return self.gamma
        b = self.tail_decay
        # -integral_{|x|>=1} x nu(dx) = -sign * rate * (1 + 1/b) e^{-b}
        return -self._sign() * self.rate * (1.0 + 1.0 / b) * math.exp(-b)

    def triplet(self) -> LevyTriplet:
        rate, b, sgn = self.rate, self.tail_decay, self._sign()

        def density(x):
            x = np.asarray(x, dtype=float)
            on_side = (x * sgn) > 0
            return np.where(on_side, rate * b * np.exp(-b * np.abs(x)), 0.0)

        def one_tail(r):
            return rate * np.exp(-b * np.asarray(r, dtype=float))

        zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))

        def inner_x2(r):
            r = np.asarray(r, dtype=float)
            # closed form cancels for b r << 1; the series head is b r^3 / 3
            closed = (2.0 - (b * b * r * r + 2.0 * b * r + 2.0) * np.exp(-b * r)) / (b * b)
            return rate * np.where(b * r < 1e-3, b * r ** 3 / 3.0, closed)

        def outer_x1(r):
            r = np.asarray(r, dtype=float)
            return sgn * rate * (r + 1.0 / b) * np.exp(-b * r)

        measure = LevyMeasure(
            density=density,
            upper_tail=one_tail if sgn > 0 else zero,
            lower_tail=one_tail if sgn < 0 else zero,
            inner_x2=inner_x2,
            outer_x1=outer_x1,
        )
        return LevyTriplet(self.sigma, self._gamma(), measure)

    def psi_closed(self, xi):
        xi = np.asarray(xi, dtype=complex)
        b, sgn = self.tail_decay, self._sign()
        jump_cf = b / (b - 1j * sgn * xi)   # E e^{i xi J}, J exponential on the side
        small_x1 = sgn * self.rate * (1.0 - (1.0 + b) * math.exp(-b)) / b
        return (self.sigma ** 2 * xi ** 2 - 1j * self._gamma() * xi
                - self.rate * (jump_cf - 1.0) + 1j * xi * small_x1)

    def scaling_alpha(self) -> float:
        return 2.0

    def dual(self) -> "SpectrallyOneSided":
        flip = "positive" if self.side == "negative" else "negative"
        g = None if self.gamma is None else -self.gamma
        return replace(self, side=flip, gamma=g)


@dataclass(frozen=True)
class RawTriplet(ProcessSpec):
    """A process given directly by its triplet; psi comes from quadrature."""

    data: LevyTriplet
    alpha_hint: Optional[float] = None
    symmetric: bool = False
    name: str = "raw"
    label = "raw"

    def __post_init__(self):
        reject_compound_poisson(self.data)

    def triplet(self) -> LevyTriplet:
        return self.data

    def scaling_alpha(self) -> float:
        if self.alpha_hint is None:
            raise SpecError("RawTriplet needs alpha_hint for scaling-gated operations")
        return self.alpha_hint

    def is_symmetric(self) -> bool:
        return self.symmetric

    def dual(self) -> "RawTriplet":
        m = self.data.measure

        def refl(f):
            return lambda x: f(-np.asarray(x, dtype=float))

        dual_measure = LevyMeasure(
            density=refl(m.density),
            upper_tail=m.lower_tail,
            lower_tail=m.upper_tail,
            inner_x2=m.inner_x2,
            outer_x1=(lambda r: -m.outer_x1(r)) if m.outer_x1 is not None else None,
        )
        dual_triplet = LevyTriplet(self.data.sigma, -self.data.gamma, dual_measure)
        return RawTriplet(dual_triplet, self.alpha_hint, self.symmetric, self.name + "_dual")


# ---------------------------------------------------------------------------
# Characteristic exponent
# ---------------------------------------------------------------------------

def _head_panels(lo: float, hi: float):
    """Log panels on [lo, hi] resolving an integrable endpoint singularity."""
    edges = np.geomspace(lo, hi, max(12, int(np.ceil(np.log10(hi / lo) * 6)) + 1))
    return gl_panels(edges, order=10)


def _re_psi_quad(triplet: LevyTriplet, xi: float) -> float:
    """sigma^2 xi^2 + integral (1 - cos(xi x)) nu(dx) via the tail identity.

    Integrating by parts against T(x) = nu(x, inf) + nu(-inf, -x) turns
    the jump part into xi int_0^inf sin(xi x) T(x) dx: a Fourier integral
    of a smooth decaying function, summed over half-periods with Euler
    acceleration at any frequency.  Tails must be vectorized.  The head
    truncation at 1e-20/|xi| limits tail indices to alpha <~ 1.95.
    """
    if xi == 0:
        return 0.0
    axi = abs(xi)
    m = triplet.measure
    total = triplet.sigma ** 2 * xi ** 2
    if float(m.tail_mass(1.0)) == 0.0 and float(m.tail_mass(1e-9)) == 0.0:
        return total

    def tails(u):
        return np.asarray(m.upper_tail(u), dtype=float) + \
            np.asarray(m.lower_tail(u), dtype=float)

    a = min(math.pi / axi, 1.0)
    nodes, w = _head_panels(a * 1e-20, a)
    head = float(w @ (np.sin(axi * nodes) * tails(nodes)))
    osc = fourier_tail(tails, a, axi, "sin", rtol=1e-11)
    return total + axi * (head + osc)


def _im_psi_quad(triplet: LevyTriplet, xi: float) -> float:
    """-gamma xi - integral (sin(xi x) - xi x 1_{(-1,1)}) nu(dx), by parts.

    Per half-line with tail T the jump term reduces to
    xi [ T(1) + int_0^a (cos(xi x) - 1) T dx - int_a^1 T dx
         + int_a^inf cos(xi x) T dx ],  a = min(pi/|xi|, 1),
    entering with opposite signs for the two sides.
    """
    if xi == 0:
        return 0.0
    m = triplet.measure
    sgn = math.copysign(1.0, xi)
    axi = abs(xi)

    def side_term(tail_fn) -> float:
        if float(tail_fn(1.0)) == 0.0 and float(tail_fn(1e-9)) == 0.0:
            return 0.0

        def tf(u):
            return np.asarray(tail_fn(u), dtype=float)

        a = min(math.pi / axi, 1.0)
        nodes, w = _head_panels(a * 1e-20, a)
        head = float(w @ ((np.cos(axi * nodes) - 1.0) * tf(nodes)))
        flat = 0.0
        if a < 1.0:
            nodes, w = _head_panels(a, 1.0)
            flat = float(w @ tf(nodes))
        osc = fourier_tail(tf, a, axi, "cos", rtol=1e-11)
        return axi * (float(tail_fn(1.0)) + head - flat + osc)

    jump = side_term(m.upper_tail) - side_term(m.lower_tail)
    return -triplet.gamma * xi - sgn * jump


def psi_quadrature(spec: ProcessSpec, xi):
    """psi from the triplet by adaptive quadrature (closed form ignored)."""
    trip = spec.triplet()
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.array([
        _re_psi_quad(trip, float(x)) + 1j * _im_psi_quad(trip, float(x))
        for x in xi_arr
    ])
    return out if np.ndim(xi) else complex(out[0])


def psi(spec: ProcessSpec, xi):
    """Characteristic exponent psi(xi); closed form when the family has one."""
    closed = spec.psi_closed(xi)
    if closed is not None:
        return closed
    return psi_quadrature(spec, xi)


def re_psi(spec: ProcessSpec, xi):
    return np.real(psi(spec, xi))


def mean_x1(spec: ProcessSpec):
    """E X_1 = gamma + integral_{|x|>=1} x nu(dx), or None when divergent."""
    if isinstance(spec, Stable):
        return 0.0 if spec.alpha > 1 else None
    trip = spec.triplet()
    out = trip.measure.outer_x1
    if out is not None:
        return trip.gamma + float(out(1.0))
    # probe absolute integrability of x against the tails
    n = trip.measure.density
    absint = 0.0
    hi = 1.0
    last = np.inf
    for _ in range(12):
        val, _err = integrate.quad(lambda u: u * (n(u) + n(-u)), hi, hi * 4.0, limit=100)
        absint += val
        hi *= 4.0
        if val < 1e-12 * (1.0 + absint):
            break
        if val > 0.9 * last:
            return None
        last = val
    pos, _ = integrate.quad(lambda u: u * n(u), 1.0, hi, limit=400)
    neg, _ = integrate.quad(lambda u: u * n(-u), 1.0, hi, limit=400)
    return trip.gamma + pos - neg


# ---------------------------------------------------------------------------
# Weak lower scaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingCertificate:
    """Empirical weak-lower-scaling certificate for f on a log grid.

    worst_ratio is the minimum of f(lam x) / (lam^alpha f(x)) over grid
    pairs with lam >= 1; the certificate claims theta = worst_ratio.
    """

    alpha: float
    theta: float
    range: tuple
    worst_ratio: float

    @property
    def holds(self) -> bool:
        return self.alpha > 0 and self.theta > 0


def check_wlsc(f: Callable, alpha: float, grid) -> ScalingCertificate:
    """Scan f(lam x) >= theta lam^alpha f(x) over all grid pairs, lam >= 1."""
    x = np.asarray(grid, dtype=float)
    vals = np.asarray(f(x), dtype=float)
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("f must be positive and finite on the grid")
    # ratio[i, j] = f(x_j) / ((x_j/x_i)^alpha f(x_i)) for x_j >= x_i
    lam = x[None, :] / x[:, None]
    ratio = vals[None, :] / (lam ** alpha * vals[:, None])
    ratio = np.where(lam >= 1.0, ratio, np.inf)
    worst = float(ratio.min())
    return ScalingCertificate(alpha=alpha, theta=worst,
                              range=(float(x.min()), float(x.max())),
                              worst_ratio=worst)


@lru_cache(maxsize=None)
def wlsc_certificate(spec: ProcessSpec) -> ScalingCertificate:
    """Certificate for Re psi at the family's natural exponent."""
    grid = log_grid(1e-4, 1e4, 97)
    return check_wlsc(lambda x: np.real(psi(spec, x)), spec.scaling_alpha(), grid)


# ---------------------------------------------------------------------------
# Spec validation (numerical invariants)
# ---------------------------------------------------------------------------

def validate_spec(spec: ProcessSpec, rtol: float = 1e-6, n_check: int = 7) -> None:
    """Check measure integrability, tail consistency and closed-form psi.

    Raises SpecError on violation.  Used by tests and by the harness before
    a verification run; construction itself stays cheap.
    """
    trip = spec.triplet()
    m = trip.measure
    if float(m.tail_mass(1e-8)) == 0.0 and trip.sigma == 0.0:
        raise SpecError("degenerate spec: no Gaussian part and no jumps")

    # integral (1 ^ x^2) nu(dx) < infinity
    inner = (float(m.inner_x2(1.0)) if m.inner_x2 is not None else
             integrate.quad(lambda u: u * u * (m.density(u) + m.density(-u)),
                            0.0, 1.0, limit=400)[0])
    total = inner + float(m.tail_mass(1.0))
    if not np.isfinite(total):
        raise SpecError("integral (1 ^ x^2) nu(dx) diverges")

    # tails consistent with the density and non-increasing
    for r in np.geomspace(0.1, 10.0, n_check):
        for tail, dens in ((m.upper_tail, lambda u: m.density(u)),
                           (m.lower_tail, lambda u: m.density(-u))):
            t0 = float(tail(r))
            if t0 < 0 or float(tail(2.0 * r)) > t0 * (1 + 1e-12) + 1e-300:
                raise SpecError("tail is negative or increasing")
            if t0 == 0.0:
                continue
            ref = t0 - float(tail(8.0 * r))
            got, _ = integrate.quad(dens, r, 8.0 * r, limit=400,
                                    epsabs=0.01 * rtol * max(ref, 1e-300), epsrel=1e-8)
            if abs(got - ref) > rtol * max(abs(ref), 1e-300):
                raise SpecError(
                    f"tail inconsistent with density at r={r:g}: {got} vs {ref}")

    # closed-form psi vs triplet quadrature
    if spec.psi_closed(1.0) is not None:
        for x in np.geomspace(0.05, 20.0, n_check):
            a = complex(spec.psi_closed(x))
            b = complex(psi_quadrature(spec, x))
            if abs(a - b) > rtol * (1.0 + abs(a)):
                raise SpecError(f"closed-form psi mismatch at xi={x:g}: {a} vs {b}")
