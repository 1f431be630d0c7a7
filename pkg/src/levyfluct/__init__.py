"""Fluctuation-theory numerics for one-dimensional Levy processes.

Analytic objects (characteristic exponent, concentration function, ladder
exponents, renewal functions) plus quadrature and Monte Carlo machinery
to verify two-sided estimates for mean interval exit times and for the
distribution functions of running extrema.
"""

from .model import (
    CGMY,
    BrownianPlusCompoundPoisson,
    LevyMeasure,
    LevyTriplet,
    ProcessSpec,
    RawTriplet,
    ScalingCertificate,
    SpectrallyOneSided,
    Stable,
    brownian,
    check_wlsc,
    mean_x1,
    psi,
)
from .concentration import ConcentrationProfile, b_r, h, h_inv
from .fluctuation import (
    LadderExponent,
    RenewalFunction,
    kappa_space,
    kappa_time,
    renewal_V,
    renewal_V_hat,
)
from .montecarlo import MCEstimate, SimPlan, exit_time, inf_cdf, sup_cdf
from .reporting import BoundReport
from .spectral import PositivityCurve, cdf, density, positivity

__all__ = [
    "BoundReport",
    "BrownianPlusCompoundPoisson",
    "CGMY",
    "ConcentrationProfile",
    "LadderExponent",
    "LevyMeasure",
    "LevyTriplet",
    "MCEstimate",
    "PositivityCurve",
    "ProcessSpec",
    "RawTriplet",
    "RenewalFunction",
    "ScalingCertificate",
    "SimPlan",
    "SpectrallyOneSided",
    "Stable",
    "brownian",
    "b_r",
    "cdf",
    "check_wlsc",
    "density",
    "exit_time",
    "h",
    "h_inv",
    "inf_cdf",
    "kappa_space",
    "kappa_time",
    "mean_x1",
    "positivity",
    "psi",
    "renewal_V",
    "renewal_V_hat",
    "sup_cdf",
]

__version__ = "0.1.0"
