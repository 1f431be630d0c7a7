import math

import numpy as np
import pytest
from scipy.special import gamma

from levyfluct.errors import InversionError
from levyfluct.invlaplace import gaver_stehfest, invert_checked, stehfest_coefficients


def test_coefficients_reproduce_constants():
    # F(lam) = 1/lam inverts to f = 1 exactly: sum zeta_k / k = 1
    for n in (8, 12, 14):
        zeta = stehfest_coefficients(n)
        k = np.arange(1, n + 1)
        assert np.sum(zeta / k) == pytest.approx(1.0, abs=1e-8)


def test_coefficients_reject_odd_order():
    with pytest.raises(ValueError):
        stehfest_coefficients(7)


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
def test_power_law_pairs(alpha):
    nu = alpha / 2.0
    fhat = lambda lam: lam ** (-1.0 - nu)
    for t in (1e-2, 1.0, 1e2):
        exact = t ** nu / gamma(1.0 + nu)
        assert gaver_stehfest(fhat, t, 14) == pytest.approx(exact, rel=1e-6)


def test_exponential_pair():
    # accuracy degrades as f decays below the scheme's dynamic range
    fhat = lambda lam: 1.0 / (lam + 1.0)
    for t, rel in ((0.2, 1e-6), (1.0, 1e-4), (3.0, 5e-3)):
        assert gaver_stehfest(fhat, t, 14) == pytest.approx(math.exp(-t), rel=rel)


def test_invert_checked_reports_discrepancy():
    vals, achieved = invert_checked(lambda lam: lam ** -1.75, np.geomspace(0.1, 10, 7))
    exact = np.geomspace(0.1, 10, 7) ** 0.75 / gamma(1.75)
    assert np.max(np.abs(vals / exact - 1)) < 1e-5
    assert achieved <= 1e-4


def test_invert_checked_aborts_on_rough_transform():
    rng = np.random.default_rng(0)

    def noisy(lam):
        return lam ** -1.75 * (1.0 + 1e-3 * rng.standard_normal())

    with pytest.raises(InversionError) as exc:
        invert_checked(noisy, np.geomspace(0.1, 10, 5))
    assert exc.value.estimates is not None
