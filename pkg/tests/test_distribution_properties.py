"""Structural invariants of the analytic laws: normalization,
pdf/ccdf consistency, the change-of-variables identity behind the
harmonic laws, tail-slope asymptotics, and scale bookkeeping."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import photonstats as ps

LIGHT_TAILED = [
    ps.thermal(1.33e5),
    ps.thermal(7.0),
    ps.superbunched(7.6e4),
    ps.thermal(2e3, modes=5),
    ps.superbunched(1e4, modes=4),
    ps.thermal_harmonic(2, 1150.0),
    ps.thermal_harmonic(3, 50.0),
    ps.superbunched_harmonic(2, 1590.0),
    ps.superbunched_harmonic(3, 1080.0),
]

HEAVY_TAILED = [
    ps.fwm_thermal(0.5),
    ps.fwm_thermal(2.5, modes=3),
    ps.fwm_superbunched(2.5),
    ps.fwm_superbunched(4.0, modes=5),
]


@pytest.mark.parametrize("spec", LIGHT_TAILED,
                         ids=lambda s: s.canonical_json())
def test_normalization_by_quadrature(spec):
    hi = float(ps.quantile(spec, 1 - 1e-8))
    total = quad(lambda x: float(ps.pdf(spec, x)), 0.0, hi,
                 points=[float(ps.quantile(spec, q))
                         for q in (0.25, 0.5, 0.9, 0.999)],
                 limit=500)[0]
    assert 1 - 1e-6 <= total <= 1 + 1e-6


@pytest.mark.parametrize("spec", HEAVY_TAILED,
                         ids=lambda s: s.canonical_json())
def test_heavy_tail_quadrature_matches_ccdf(spec):
    cut = float(ps.quantile(spec, 0.7))
    total = quad(lambda x: float(ps.pdf(spec, x)), 0.0, cut,
                 points=[float(ps.quantile(spec, q))
                         for q in (0.25, 0.5)], limit=500)[0]
    assert total == pytest.approx(1.0 - float(ps.ccdf(spec, cut)),
                                  abs=1e-6)


@pytest.mark.parametrize("spec", LIGHT_TAILED + HEAVY_TAILED,
                         ids=lambda s: s.canonical_json())
def test_pdf_is_minus_ccdf_derivative(spec):
    probes = ps.quantile(spec, np.array([0.05, 0.3, 0.5, 0.9, 0.999,
                                         0.999999]))
    for x in np.asarray(probes, dtype=float):
        h = 1e-5 * x
        derivative = (ps.ccdf(spec, x - h) - ps.ccdf(spec, x + h)) / (2 * h)
        assert derivative == pytest.approx(float(ps.pdf(spec, x)),
                                           rel=1e-6)


def test_harmonic_change_of_variables_identity():
    # harmonic density == source density carried through N = K * y^n
    for order, source, hmean in [(2, "thermal", 1150.0),
                                 (3, "thermal", 50.0),
                                 (2, "superbunched", 1590.0),
                                 (3, "superbunched", 1080.0)]:
        if source == "thermal":
            harmonic = ps.thermal_harmonic(order, hmean)
            fundamental = ps.thermal(1.0)
            conversion = hmean / math.factorial(order)
        else:
            harmonic = ps.superbunched_harmonic(order, hmean)
            fundamental = ps.superbunched(1.0)
            conversion = hmean / math.prod(range(2 * order - 1, 0, -2))
        grid = np.asarray(ps.quantile(
            harmonic, np.array([0.05, 0.3, 0.6, 0.9, 0.999])), dtype=float)
        y = (grid / conversion) ** (1.0 / order)
        jacobian = y / (order * grid)
        expected = np.array([float(ps.pdf(fundamental, yy)) for yy in y])
        actual = np.array([float(ps.pdf(harmonic, x)) for x in grid])
        assert np.allclose(actual, expected * jacobian, rtol=1e-9)


def test_fwm_ccdf_equals_pump_exceedance():
    # sinh^2 gain is monotone: P(N > x) must equal the pump's
    # P(N_p > arcsinh(sqrt x)/kappa), here for a 5-mode pump
    spec = ps.fwm_superbunched(2.5, modes=5)
    pump = ps.superbunched(1.0, modes=5)
    for x in (1.0, 1e3, 1e8):
        y = math.asinh(math.sqrt(x)) / 2.5
        assert float(ps.ccdf(spec, x)) == pytest.approx(
            float(ps.ccdf(pump, y)), rel=1e-12)


def test_tail_slope_matches_exponent_thermal_pump():
    # single-mode thermal pump: no slowly varying prefactor, the slope
    # locks onto -k already at 1e8..1e10
    for kappa in (0.5, 2.5):
        spec = ps.fwm_thermal(kappa)
        k = ps.analytic_tail_exponent(spec)
        grid = np.geomspace(1e8, 1e10, 60)
        slope = np.polyfit(np.log(grid), ps.log_ccdf(spec, grid), 1)[0]
        assert -slope == pytest.approx(k, rel=0.05)


@pytest.mark.parametrize("spec", HEAVY_TAILED,
                         ids=lambda s: s.canonical_json())
def test_tail_slope_converges_to_exponent(spec):
    # families with Erfc/incomplete-Gamma prefactors converge only
    # logarithmically; probe deep enough that the slowly varying factor
    # has died off
    k = ps.analytic_tail_exponent(spec)
    grid = np.geomspace(1e250, 1e300, 60)
    slope = np.polyfit(np.log(grid), ps.log_ccdf(spec, grid), 1)[0]
    assert -slope == pytest.approx(k, rel=0.05)
    # and the slowly varying prefactor dies off monotonically (skip
    # families whose slope is exact from the start)
    windows = [(1e8, 1e10), (1e40, 1e50), (1e250, 1e300)]
    deviations = []
    for lo, hi in windows:
        g = np.geomspace(lo, hi, 40)
        s = np.polyfit(np.log(g), ps.log_ccdf(spec, g), 1)[0]
        deviations.append(abs(-s - k))
    if deviations[0] > 1e-6:
        assert deviations[0] > deviations[1] > deviations[2]


def test_ccdf_slope_approaches_half_for_five_mode_supercontinuum():
    spec = ps.fwm_superbunched(2.5, modes=5)
    grid_lo = np.geomspace(1e4, 1e5, 30)
    grid_hi = np.geomspace(1e5, 1e6, 30)
    slope_lo = -np.polyfit(np.log(grid_lo),
                           np.log(ps.ccdf(spec, grid_lo)), 1)[0]
    slope_hi = -np.polyfit(np.log(grid_hi),
                           np.log(ps.ccdf(spec, grid_hi)), 1)[0]
    assert slope_lo < slope_hi < 0.5


def test_multimode_mean_independent_of_modes():
    for modes in (1, 2, 5, 50):
        assert ps.analytic_mean(ps.thermal(123.0, modes=modes)) == 123.0
        assert ps.analytic_mean(ps.superbunched(9.0, modes=modes)) == 9.0


def test_gamma_special_functions_relative_error():
    # Erfc / regularized upper incomplete Gamma against mpmath across
    # the supported range (survival down to 1e-10 and far below)
    import mpmath as mp
    spec_sb = ps.superbunched(1.0)
    for x in np.geomspace(0.01, 60.0, 25):
        want = float(mp.erfc(mp.sqrt(mp.mpf(x) / 2)))
        assert float(ps.ccdf(spec_sb, x)) == pytest.approx(want,
                                                           rel=1e-10)
    spec_mm = ps.thermal(1.0, modes=5)
    for x in np.geomspace(0.01, 12.0, 25):
        want = float(mp.gammainc(5, 5 * mp.mpf(x), mp.inf,
                                 regularized=True))
        assert float(ps.ccdf(spec_mm, x)) == pytest.approx(want,
                                                           rel=1e-10)
