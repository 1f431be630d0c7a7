import math

import numpy as np
import pytest
from scipy.special import gamma

from levyfluct import fluctuation as F
from levyfluct import model as M
from levyfluct import montecarlo as MC
from levyfluct import spectral as S
from levyfluct.errors import SpecError

BM = M.brownian(1.0)
S15 = M.Stable(1.5)
SB = M.Stable(1.5, 0.5)
CGA = M.CGMY.zero_mean(0.7, 1.3, 2.0, 4.0, 1.4)

FAST = MC.SimPlan(dt=1e-3, eps=2e-3, n_paths=8_000, seed=101)


def test_plan_validation():
    with pytest.raises(SpecError):
        MC.SimPlan(dt=0.0)
    with pytest.raises(SpecError):
        MC.SimPlan(n_paths=0)
    with pytest.raises(SpecError):
        MC.SimPlan(refine_zone=0.7)
    with pytest.raises(SpecError):
        MC.exit_time_samples(S15, 0.5, 1.0, MC.SimPlan(eps=0.5))


def test_eps_must_sit_below_interval_scale():
    with pytest.raises(SpecError):
        MC.exit_time(S15, 0.5, 1.0, MC.SimPlan(eps=0.02))


@pytest.mark.parametrize("spec,name", [(SB, "stable"), (CGA, "cgmy")])
def test_empirical_characteristic_function(spec, name):
    dt = 0.05
    inc = MC.simulate_increments(spec, dt, 150_000, FAST)
    for xi in (0.5, 1.0, 2.0, 5.0, 10.0):
        z = np.exp(1j * xi * inc)
        ecf = complex(np.mean(z))
        se = math.hypot(float(np.std(z.real, ddof=1)),
                        float(np.std(z.imag, ddof=1))) / math.sqrt(inc.size)
        target = complex(np.exp(-dt * complex(M.psi(spec, xi))))
        assert abs(ecf - target) <= 4.0 * se


def test_brownian_increment_law():
    inc = MC.simulate_increments(BM, 0.25, 120_000, FAST)
    # psi = xi^2 means Var(X_dt) = 2 dt
    assert np.var(inc) == pytest.approx(0.5, rel=0.02)
    assert abs(np.mean(inc)) < 4.0 * math.sqrt(0.5 / inc.size)


def test_eps_refinement_stability():
    # halving eps changes the mean increment size within MC noise
    a = MC.simulate_increments(CGA, 0.02, 100_000, MC.SimPlan(eps=4e-3, seed=7))
    b = MC.simulate_increments(CGA, 0.02, 100_000, MC.SimPlan(eps=2e-3, seed=8))
    se = math.hypot(np.std(np.abs(a)) / math.sqrt(a.size),
                    np.std(np.abs(b)) / math.sqrt(b.size))
    assert abs(np.mean(np.abs(a)) - np.mean(np.abs(b))) <= 2.5 * se


def test_block_substreams_are_worker_independent():
    plan = MC.SimPlan(dt=2e-3, eps=2e-3, n_paths=MC.BLOCK + 1000, seed=55)
    tau_all, cens_all = MC.exit_time_samples(S15, 0.4, 1.0, plan)
    # the first block must be reproducible from a run of exactly one block
    plan_one = MC.SimPlan(dt=2e-3, eps=2e-3, n_paths=MC.BLOCK, seed=55)
    tau_one, _ = MC.exit_time_samples(S15, 0.4, 1.0, plan_one)
    assert np.array_equal(tau_all[:MC.BLOCK], tau_one)
    # and identical reruns are bit-identical
    tau_again, _ = MC.exit_time_samples(S15, 0.4, 1.0, plan)
    assert np.array_equal(tau_all, tau_again)


def test_exit_time_brownian_quadratic_profile():
    plan = MC.SimPlan(dt=5e-4, eps=1e-3, n_paths=20_000, seed=3)
    for x in (0.3, 0.5):
        est = MC.exit_time(BM, x, 1.0, plan)
        exact = x * (1 - x) / 2.0
        assert est.mean == pytest.approx(exact, rel=0.03)
        assert est.censored_fraction == 0.0


def test_exit_time_stable_formula():
    plan = MC.SimPlan(dt=1e-3, eps=1e-3, n_paths=30_000, seed=5)
    est = MC.exit_time(S15, 0.5, 1.0, plan)
    exact = 0.25 ** 0.75 / gamma(2.5)
    assert est.mean == pytest.approx(exact, rel=0.03)


def test_exit_time_vanishes_at_boundary():
    plan = MC.SimPlan(dt=1e-3, eps=1e-3, n_paths=4_000, seed=9)
    small = MC.exit_time(S15, 0.01, 1.0, plan).mean
    mid = MC.exit_time(S15, 0.5, 1.0, plan).mean
    assert small < 0.2 * mid


def test_exit_censoring_flag():
    plan = MC.SimPlan(dt=1e-3, eps=1e-3, n_paths=2_000, seed=11, horizon=0.02)
    est = MC.exit_time(S15, 0.5, 1.0, plan)
    assert est.censored_fraction > 0.01
    assert "biased-low" in est.flags


def test_dt_eps_halving_bias_control():
    # halving dt and eps together moves the estimate by < 2 combined SEs
    base = MC.SimPlan(dt=2e-3, eps=2e-3, n_paths=10_000, seed=13)
    half = MC.SimPlan(dt=1e-3, eps=1e-3, n_paths=10_000, seed=14)
    for spec in (S15, CGA):
        a = MC.exit_time(spec, 0.5, 1.0, base)
        b = MC.exit_time(spec, 0.5, 1.0, half)
        combined = math.hypot(a.std_error, b.std_error)
        assert abs(a.mean - b.mean) <= 2.0 * combined


def test_sup_cdf_brownian_reflection():
    plan = MC.SimPlan(dt=2e-4, eps=1e-3, n_paths=20_000, seed=17)
    for t, x in ((0.5, 1.0), (0.25, 0.5)):
        est = MC.sup_cdf(BM, t, x, plan)
        exact = math.erf(x / (2.0 * math.sqrt(t)))
        assert est.mean == pytest.approx(exact, abs=4 * est.std_error + 0.01)


def test_sup_inf_symmetric_consistency():
    plan = MC.SimPlan(dt=1e-3, eps=2e-3, n_paths=12_000, seed=19)
    sup_est = MC.sup_cdf(S15, 0.3, 0.8, plan)
    inf_est = MC.inf_cdf(S15, 0.3, 0.8, plan)
    se = math.hypot(sup_est.std_error, inf_est.std_error)
    assert abs(sup_est.mean - inf_est.mean) <= 4.0 * se + 1e-3


def test_sign_frequency_matches_gil_pelaez():
    plan = MC.SimPlan(dt=2e-3, eps=2e-3, n_paths=25_000, seed=23)
    for spec, t in ((SB, 1.0), (CGA, 0.7)):
        est = MC.sign_frequency(spec, t, plan)
        rho = S.positivity(spec, t)
        assert abs(est.mean - rho) <= 4.0 * est.std_error + 0.005


def test_pruitt_report_bounded():
    rep = MC.pruitt_report(S15, MC.SimPlan(dt=2e-3, eps=2e-3, n_paths=4_000, seed=29))
    assert rep.verdict
    assert rep.extras["smallest_c"] < 50.0


def test_exit_upper_report():
    plan = MC.SimPlan(dt=1e-3, eps=1e-3, n_paths=6_000, seed=31)
    for spec in (BM, S15, M.Stable(1.5, 1.0)):
        V = F.renewal_V(spec)
        Vh = F.renewal_V_hat(spec)
        rep = MC.exit_upper_report(spec, V, Vh, 1.0, (0.2, 0.5, 0.8), plan)
        assert rep.verdict, f"{spec}: {rep.ratio}"
