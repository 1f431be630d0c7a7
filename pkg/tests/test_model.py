import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyfluct import model as M
from levyfluct.errors import SpecError

SPECS = {
    "stable_sym": M.Stable(1.5),
    "stable_asym": M.Stable(1.5, 0.5),
    "stable_heavy": M.Stable(0.8, -0.3),
    "brownian": M.brownian(1.0),
    "bmcp": M.BrownianPlusCompoundPoisson.zero_mean(0.5, rate=1.0, jump_mean=0.3),
    "cgmy_sym": M.CGMY.zero_mean(1.0, 1.0, 3.0, 3.0, 1.4),
    "cgmy_asym": M.CGMY.zero_mean(0.7, 1.3, 2.0, 4.0, 1.4),
    "one_sided": M.SpectrallyOneSided(1.0, 2.0, 1.5),
}


@pytest.mark.parametrize("name", sorted(SPECS))
def test_specs_validate(name):
    M.validate_spec(SPECS[name])


@pytest.mark.parametrize("name", sorted(SPECS))
def test_closed_form_psi_matches_quadrature(name):
    spec = SPECS[name]
    for xi in (0.02, 0.7, 5.0, 80.0, 1e4):
        a = complex(spec.psi_closed(xi))
        b = complex(M.psi_quadrature(spec, xi))
        assert abs(a - b) <= 1e-6 * (1.0 + abs(a))


def test_psi_at_zero_and_brownian():
    assert M.psi(M.brownian(1.0), 0.0) == 0.0
    xi = np.array([-2.0, 0.5, 3.0])
    assert np.allclose(M.psi(M.brownian(1.0), xi), xi ** 2)


def test_stable_scale_prefactor():
    s = M.Stable(1.5, scale=2.5)
    assert complex(M.psi(s, 2.0)) == pytest.approx(2.5 * 2.0 ** 1.5)


def test_psi_symmetries_on_grid():
    spec = SPECS["cgmy_asym"]
    xi = np.geomspace(1e-3, 1e3, 31)
    plus = np.asarray(M.psi(spec, xi))
    minus = np.asarray(M.psi(spec, -xi))
    assert np.all(plus.real >= 0)
    assert np.allclose(minus.real, plus.real, rtol=1e-12)
    assert np.allclose(minus.imag, -plus.imag, rtol=1e-12)


def test_symmetric_psi_is_real():
    spec = SPECS["cgmy_sym"]
    xi = np.geomspace(1e-3, 1e3, 31)
    vals = np.asarray(M.psi(spec, xi))
    assert np.all(np.abs(vals.imag) < 1e-8 * (1.0 + vals.real))


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-50.0, max_value=50.0))
def test_psi_conjugate_symmetry_hypothesis(xi):
    spec = SPECS["stable_asym"]
    a = complex(M.psi(spec, xi))
    b = complex(M.psi(spec, -xi))
    assert a.real >= 0
    assert b == pytest.approx(a.conjugate(), rel=1e-12, abs=1e-12)


def test_mean_x1():
    assert M.mean_x1(SPECS["stable_sym"]) == 0.0
    assert M.mean_x1(M.Stable(0.5)) is None
    assert M.mean_x1(SPECS["cgmy_asym"]) == pytest.approx(0.0, abs=1e-8)
    assert M.mean_x1(SPECS["one_sided"]) == pytest.approx(0.0, abs=1e-10)
    shifted = M.CGMY(0.7, 1.3, 2.0, 4.0, 1.4, gamma=0.3)
    base = M.CGMY(0.7, 1.3, 2.0, 4.0, 1.4, gamma=0.0)
    assert M.mean_x1(shifted) - M.mean_x1(base) == pytest.approx(0.3)


def test_cgmy_zero_mean_by_independent_quadrature():
    from scipy.integrate import quad
    spec = SPECS["cgmy_asym"]
    n = spec.triplet().measure.density
    pos, _ = quad(lambda u: u * n(u), 1.0, 60.0, limit=300)
    neg, _ = quad(lambda u: u * n(-u), 1.0, 60.0, limit=300)
    assert spec.gamma + pos - neg == pytest.approx(0.0, abs=1e-8)


def test_wlsc_certificates():
    grid = np.geomspace(1e-3, 1e3, 61)
    cert = M.check_wlsc(lambda x: x ** 2, 2.0, grid)
    assert cert.theta == pytest.approx(1.0, abs=1e-9)
    cert = M.check_wlsc(lambda x: np.real(M.psi(M.Stable(1.5), x)), 1.5, grid)
    assert cert.theta == pytest.approx(1.0, abs=1e-9)
    cert = M.wlsc_certificate(SPECS["cgmy_asym"])
    assert cert.alpha == pytest.approx(1.4)
    assert 0.0 < cert.theta <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        M.check_wlsc(lambda x: x - 1.0, 1.0, grid)


def test_compound_poisson_rejected():
    from levyfluct.model import LevyTriplet, RawTriplet
    jumps = M.BrownianPlusCompoundPoisson(1.0, rate=2.0).triplet().measure
    with pytest.raises(SpecError):
        RawTriplet(LevyTriplet(0.0, 0.0, jumps))
    # drift rescues it
    RawTriplet(LevyTriplet(0.0, 1.0, jumps))


def test_stable_parameter_validation():
    with pytest.raises(SpecError):
        M.Stable(2.5)
    with pytest.raises(SpecError):
        M.Stable(1.0, 0.5)
    with pytest.raises(SpecError):
        M.Stable(1.5, 1.5)
    with pytest.raises(SpecError):
        M.CGMY(1.0, 1.0, 3.0, 3.0, 1.0)


def test_dual_roundtrip():
    for name in ("stable_asym", "cgmy_asym", "one_sided"):
        spec = SPECS[name]
        dd = spec.dual().dual()
        for xi in (0.3, 2.0, 11.0):
            assert complex(M.psi(dd, xi)) == pytest.approx(
                complex(M.psi(spec, xi)), rel=1e-9)
        # the dual's exponent is the conjugate
        assert complex(M.psi(spec.dual(), 2.0)) == pytest.approx(
            complex(M.psi(spec, 2.0)).conjugate(), rel=1e-9)


def test_raw_triplet_matches_family():
    s = M.Stable(1.5, 0.5)
    raw = M.RawTriplet(s.triplet(), alpha_hint=1.5)
    for xi in (0.4, 3.0):
        assert complex(M.psi(raw, xi)) == pytest.approx(
            complex(M.psi(s, xi)), rel=1e-6)


def test_stable_positivity_values():
    assert M.Stable(1.5, 1.0).positivity == pytest.approx(1.0 / 3.0)
    assert M.Stable(1.5, -1.0).positivity == pytest.approx(2.0 / 3.0)
    assert M.Stable(1.5).positivity == 0.5
    rho = M.Stable(1.5, 0.5).positivity
    assert rho == pytest.approx(0.5 + math.atan(0.5 * math.tan(0.75 * math.pi))
                                / (1.5 * math.pi))
