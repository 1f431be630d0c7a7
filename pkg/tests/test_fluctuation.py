import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from levyfluct import fluctuation as F
from levyfluct import model as M
from levyfluct.errors import PreconditionError

BM = M.brownian(1.0)
S15 = M.Stable(1.5)
SB = M.Stable(1.5, 0.5)
CGS = M.CGMY.zero_mean(1.0, 1.0, 3.0, 3.0, 1.4)
CGA = M.CGMY.zero_mean(0.7, 1.3, 2.0, 4.0, 1.4)
SOS = M.SpectrallyOneSided(1.0, 2.0, 1.5)


# -- kappa time axis ---------------------------------------------------------

def test_kappa_time_normalization():
    for spec in (S15, SB, CGA):
        assert F.kappa_time_quad(spec, 1.0) == 1.0
        assert F.kappa_time(spec, 1.0) == 1.0


def test_kappa_time_stable_power_law():
    for spec in (S15, SB):
        rho = spec.positivity
        for z in (1e-2, 0.3, 1.0, 7.0, 1e2):
            assert F.kappa_time_quad(spec, z) == pytest.approx(z ** rho, rel=1e-8)


def test_kappa_time_symmetric_sqrt():
    for z in (1e-2, 1.0, 1e2):
        assert F.kappa_time_quad(CGS, z) == pytest.approx(math.sqrt(z), rel=1e-6)


def test_kappa_time_monotone():
    zs = np.geomspace(1e-2, 1e2, 9)
    vals = [F.kappa_time_quad(CGA, z) for z in zs]
    assert np.all(np.diff(vals) > 0)


def test_kappa_identity_report():
    for spec in (SB, CGA):
        rep = F.kappa_identity_report(spec, np.array([1e-3, 1e-1, 1.0, 1e1, 1e3]))
        assert rep.verdict
        assert np.max(np.abs(rep.ratio - 1.0)) < 1e-3


# -- kappa space axis --------------------------------------------------------

def test_kappa_space_symmetric_stable_exact():
    # unit scale: kappa(0, lam) = lam^{alpha/2}
    for lam in (0.01, 1.0, 100.0):
        assert F.kappa_space_quad(S15, lam) == pytest.approx(lam ** 0.75, rel=2e-5)
        assert F.kappa_space(S15, lam) == pytest.approx(lam ** 0.75, rel=1e-12)


def test_kappa_space_brownian_linear():
    for lam in (0.05, 1.0, 40.0):
        assert F.kappa_space_quad(BM, lam) == pytest.approx(lam, rel=2e-4)
        assert F.kappa_space(BM, lam) == pytest.approx(lam, rel=1e-12)


def test_kappa_space_asymmetric_slope():
    lams = np.array([1.0, 10.0, 100.0])
    vals = np.array([F.kappa_space_quad(SB, lam) for lam in lams])
    slopes = np.diff(np.log(vals)) / np.diff(np.log(lams))
    assert np.all(np.abs(slopes - 1.5 * SB.positivity) < 0.01)


def test_kappa_space_monotone():
    lams = np.geomspace(0.1, 100.0, 7)
    vals = [F.kappa_space_quad(CGA, lam) for lam in lams]
    assert np.all(np.diff(vals) > 0)


def test_ladder_exponent_bundle():
    le = F.ladder_exponent(SB)
    le_hat = F.ladder_exponent(SB, dual=True)
    z = 4.0
    assert le.kappa_time(z) * le_hat.kappa_time(z) == pytest.approx(z, rel=1e-6)
    assert le.normalization == 1.0


# -- renewal function --------------------------------------------------------

def test_renewal_stable_closed_form():
    V = F.renewal_V(S15)
    exact = V.x ** 0.75 / gamma(1.75)
    assert np.max(np.abs(V.values / exact - 1)) < 1e-10
    assert V.method == "stable-closed-form"


def test_renewal_inversion_route_matches_stable():
    V = F.renewal_V(S15, np.geomspace(1e-2, 1e2, 17), method="laplace-inversion")
    exact = V.x ** 0.75 / gamma(1.75)
    assert np.max(np.abs(V.values / exact - 1)) < 1e-4


def test_renewal_brownian_linear():
    V = F.renewal_V(BM)
    assert np.max(np.abs(V.values / V.x - 1)) < 1e-10
    sig = M.brownian(2.0)
    V2 = F.renewal_V(sig)
    assert np.max(np.abs(V2.values / (V2.x / 2.0) - 1)) < 1e-10


def test_renewal_cgmy_shape_invariants():
    V = F.renewal_V(CGS, np.geomspace(1e-2, 1e2, 21))
    worst = V.check_shape()
    assert worst["monotone"] <= 1e-12
    assert worst["subadditive"] <= 1e-6
    assert worst["two_lambda"] <= 1e-6
    assert V.tolerance <= 1e-3


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=1e-2, max_value=50.0),
       st.floats(min_value=1e-2, max_value=50.0))
def test_renewal_subadditive_hypothesis(x, y):
    V = F.renewal_V(S15)
    assert float(V(x + y)) <= float(V(x)) + float(V(y)) + 1e-9


def test_renewal_dual_symmetric_equal():
    V = F.renewal_V(CGS)
    Vh = F.renewal_V_hat(CGS)
    assert np.max(np.abs(V.values / Vh.values - 1)) < 1e-6
    assert Vh.is_dual


def test_renewal_stable_asym_slopes():
    rho = SB.positivity
    V = F.renewal_V(SB)
    Vh = F.renewal_V_hat(SB)
    assert V.loglog_slope(1e-2, 1e2) == pytest.approx(1.5 * rho, abs=1e-6)
    assert Vh.loglog_slope(1e-2, 1e2) == pytest.approx(1.5 * (1 - rho), abs=1e-6)


def test_renewal_symmetric_sqrt_h_comparability():
    V = F.renewal_V(CGS, np.geomspace(1e-2, 1e2, 21))
    Vs = F.renewal_V(CGS, np.geomspace(1e-2, 1e2, 21), method="symmetric-sqrt-h")
    q = V.values / Vs.values
    assert q.max() / q.min() < 2.0


def test_renewal_call_extrapolates_and_zero():
    V = F.renewal_V(S15)
    assert float(V(0.0)) == 0.0
    assert float(V(1e-3)) == pytest.approx(1e-3 ** 0.75 / gamma(1.75), rel=1e-3)


# -- reports ------------------------------------------------------------------

def test_product_bound_stable_constant():
    V = F.renewal_V(S15)
    rep = F.product_bound_report(S15, V, V)
    assert rep.verdict
    assert rep.spread < 1.02
    # h V Vhat = h_const / Gamma(1.75)^2 exactly
    expect = (S15.scale / S15.tail_intensity * (1 / 0.5 + 1 / 1.5)) / gamma(1.75) ** 2
    assert rep.ratio[0] == pytest.approx(expect, rel=1e-9)


def test_product_bound_brownian_constant():
    V = F.renewal_V(BM)
    rep = F.product_bound_report(BM, V, V)
    assert rep.verdict and rep.spread < 1.001


def test_product_bound_cgmy_band():
    V = F.renewal_V(CGA)
    Vh = F.renewal_V_hat(CGA)
    rep = F.product_bound_report(CGA, V, Vh)
    assert rep.verdict
    assert rep.spread < 50.0


def test_kappa_est_report():
    for spec in (S15, BM):
        rep = F.kappa_est_report(spec, F.renewal_V(spec))
        assert rep.verdict
        assert rep.spread < 1.05


def test_v_scaling_report():
    repb = F.V_scaling_report(BM, F.renewal_V(BM), 2.0)
    assert repb.verdict
    assert repb.extras["min_ratio"] == pytest.approx(1.0, abs=1e-9)
    reps = F.V_scaling_report(S15, F.renewal_V(S15), 1.5)
    assert reps.verdict and reps.extras["min_ratio"] >= 1.0 - 1e-9
    repc = F.V_scaling_report(CGA, F.renewal_V(CGA), 1.4)
    assert repc.verdict and repc.extras["min_ratio"] > 0.02


def test_kappa_scaling_reports():
    rep = F.kappa_scaling_report(S15)
    assert rep.verdict
    assert rep.extras["rho"] == pytest.approx(0.5)
    assert rep.extras["smallest_c"] == pytest.approx(1.0, abs=1e-6)
    rep = F.kappa_scaling_report(SB)
    assert rep.verdict
    assert rep.extras["smallest_c"] == pytest.approx(1.0, abs=1e-4)
    rep = F.kappa_scaling_report(CGA)
    assert rep.verdict and np.isfinite(rep.extras["smallest_c"])


# -- Vigon consistency ---------------------------------------------------------

def test_vigon_symmetric_stable():
    rep = F.ladder_levy_consistency(S15)
    assert rep.verdict
    assert 0.9 <= rep.min_ratio and rep.max_ratio <= 1.1


def test_vigon_brownian_drift_only():
    rep = F.ladder_levy_consistency(BM)
    assert rep.verdict
    assert rep.extras["drift"] == pytest.approx(1.0, rel=1e-4)


def test_vigon_spectrally_negative_linear():
    V = F.renewal_V(SOS, np.geomspace(1e-2, 1e2, 17))
    assert abs(V.loglog_slope(1e-2, 1e2) - 1.0) < 1e-3
    rep = F.ladder_levy_consistency(SOS)
    assert rep.verdict


def test_vigon_skips_pure_jump_one_sided():
    # spectrally negative without a Gaussian part: both routes degenerate
    spec = M.CGMY.zero_mean(0.0, 1.0, 2.0, 4.0, 1.4)
    with pytest.raises(PreconditionError):
        F.ladder_levy_consistency(spec)


# -- integral conditions --------------------------------------------------------

def test_creeping_brownian_plus_jumps():
    spec = M.BrownianPlusCompoundPoisson.zero_mean(0.7, rate=1.0)
    V = F.renewal_V(spec)
    verdict = F.creeping_condition(spec, V)
    assert verdict.status == "holds"
    assert abs(verdict.v_slope - 1.0) <= 0.05


def test_creeping_stable_fails_with_power_slope():
    verdict = F.creeping_condition(S15, F.renewal_V(S15))
    assert verdict.status == "fails"
    assert abs(verdict.v_slope - 0.75) <= 0.05


def test_creeping_spectrally_negative_trivial():
    verdict = F.creeping_condition(SOS, F.renewal_V(SOS))
    assert verdict.status == "holds"
    assert abs(verdict.v_slope - 1.0) <= 0.05


def test_linearity_large_conditions():
    v_cgmy = F.linearity_large_condition(CGS, F.renewal_V(CGS))
    assert v_cgmy.status == "holds"
    assert abs(v_cgmy.v_slope - 1.0) <= 0.1
    v_stable = F.linearity_large_condition(S15, F.renewal_V(S15))
    assert v_stable.status == "fails"
    assert abs(v_stable.v_slope - 0.75) <= 0.05
    v_sos = F.linearity_large_condition(SOS, F.renewal_V(SOS))
    assert v_sos.status == "holds"
