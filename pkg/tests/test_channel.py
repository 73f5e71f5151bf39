import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbsplan.channel import (AccessParams, CoverageSaturatedWarning, FsoParams, NoCoverageError,
                             atmospheric_loss, beam_width, capture_fraction, coverage_indicator,
                             coverage_radius, distance_2d, distance_3d, expected_path_loss,
                             fso_rate, fspl_db, gml, p_los, pairwise_3d, params_from_mapping,
                             params_to_mapping, path_loss_at, spectral_efficiency)

coord = st.floats(-1e4, 1e4, allow_nan=False)


def test_distances_small_triangles():
    assert distance_2d((0, 0), (3, 4)) == 5
    assert distance_2d((7.5, -2), (7.5, -2)) == 0
    assert distance_3d((0, 0, 0), (0, 0, 60)) == 60
    assert distance_3d((0, 0, 0), (3, 4, 0)) == 5
    assert distance_3d((0, 0, 0), (3, 4, 12)) == 13


@given(coord, coord, coord, coord)
def test_distance_symmetry(a, b, c, d):
    assert distance_2d((a, b), (c, d)) == distance_2d((c, d), (a, b))
    assert distance_2d((a, b), (c, d)) >= 0


def test_p_los_at_45_degrees():
    # h = d_2d gives 45 degrees of elevation
    expect = 1 / (1 + 9.61 * math.exp(-0.16 * (45 - 9.61)))
    assert p_los(AccessParams(), 60.0) == pytest.approx(expect, rel=1e-12)
    assert p_los(AccessParams(), 60.0) == pytest.approx(0.968, abs=5e-4)


def test_p_los_overhead_and_far_limit():
    p = AccessParams()
    assert p_los(p, 0.0) == pytest.approx(1 / (1 + 9.61 * math.exp(-0.16 * (90 - 9.61))))
    far = 1 / (1 + 9.61 * math.exp(0.16 * 9.61))
    assert p_los(p, 1e9) == pytest.approx(far, rel=1e-6)


def test_fspl_reference_value():
    # the 78.46 dB reference uses c = 3e8
    p = AccessParams(c=3e8)
    assert fspl_db(p, 100.0) == pytest.approx(20 * math.log10(4 * math.pi * 2e9 * 100 / 3e8))
    assert fspl_db(p, 100.0) == pytest.approx(78.46, abs=5e-3)


def test_fspl_rejects_zero_distance():
    with pytest.raises(ValueError):
        fspl_db(AccessParams(), 0.0)


def test_expected_loss_overhead_limit():
    p = AccessParams()
    pl0 = path_loss_at(p, 0.0)
    plos = p_los(p, 0.0)
    assert pl0 == pytest.approx(fspl_db(p, p.h) + plos * 1 + (1 - plos) * 20)
    assert abs(pl0 - (fspl_db(p, p.h) + 1.0)) < 0.1


def test_expected_loss_uses_both_excess_terms():
    p = AccessParams()
    d = 800.0
    plos = p_los(p, d)
    got = expected_path_loss(p, math.hypot(d, p.h), d)
    assert got == pytest.approx(fspl_db(p, math.hypot(d, p.h)) + plos + 20 * (1 - plos))
    assert path_loss_at(p, 500.0) < path_loss_at(p, 2000.0)


def test_coverage_radius_residual_and_monotone():
    p = AccessParams()
    r = coverage_radius(p)
    assert abs(path_loss_at(p, r) - p.pl_max) <= 1e-6
    r2 = coverage_radius(AccessParams(pl_max=115))
    assert r2 >= r


def test_coverage_radius_boundaries():
    p = AccessParams()
    pl0 = float(path_loss_at(p, 0.0))
    assert coverage_radius(AccessParams(pl_max=pl0 + 1e-6)) < 1.0
    with pytest.raises(NoCoverageError):
        coverage_radius(AccessParams(pl_max=pl0 - 1))
    with pytest.warns(CoverageSaturatedWarning):
        r = coverage_radius(AccessParams(pl_max=500))
    assert r == pytest.approx(10_000 * math.sqrt(2))


def test_coverage_indicator_strict():
    assert coverage_indicator(100.0, 100.0) == 0
    assert coverage_indicator(0.0, 100.0) == 1
    assert np.all(coverage_indicator(np.array([0, 1e6, 1e12]), math.inf) == 1)


def test_atmospheric_loss_spot_value():
    assert atmospheric_loss(4.3e-4, 1000) == pytest.approx(10 ** -0.043, rel=1e-12)
    assert atmospheric_loss(4.3e-4, 1000) == pytest.approx(0.9057, abs=1e-4)


def test_beam_width_matches_hand_formula():
    f = FsoParams()
    d = 1500.0
    k = 2 * math.pi / f.wavelength
    cn2 = f.c0_sq * math.exp(-f.height / 100)
    rho = (0.55 * cn2 * k * k * d) ** (-0.6)
    eps = (f.wavelength * d / (math.pi * f.beam_waist ** 2)) ** 2
    w = f.beam_waist * math.sqrt(1 + (1 + 2 * f.beam_waist ** 2 / rho ** 2) * eps)
    assert beam_width(f, d) == pytest.approx(w, rel=1e-12)


def test_capture_fraction_bounds():
    f = FsoParams()
    a0 = capture_fraction(f, np.linspace(1, 5000, 200))
    # erf saturates to exactly 1.0 in double precision at short range
    assert np.all((a0 > 0) & (a0 <= 1))
    assert np.all(np.diff(a0) <= 0)
    # for v1 > 3 nearly all power is captured
    big = FsoParams(lens_radius=1.0)
    wd = beam_width(big, 10.0)
    assert big.lens_radius / wd * math.sqrt(math.pi / 2) > 3
    assert capture_fraction(big, 10.0) > 0.999


def test_gml_below_capture_fraction():
    f = FsoParams()
    d = np.linspace(10, 4000, 50)
    assert np.all(gml(f, d) <= capture_fraction(f, d))


def test_fso_rate_gate_and_clamp():
    f = FsoParams(d_max=2000)
    assert fso_rate(f, 2000.0) == 0.0
    assert fso_rate(f, 2500.0) == 0.0
    assert fso_rate(f, 0.0) == 0.0
    assert fso_rate(f, 1999.0) > 0
    # heavy jitter drives the unclamped rate negative; the rate clamps to 0
    noisy = FsoParams(sigma_y=0.1, sigma_z=0.1, sigma_theta=1e-3, sigma_phi=1e-3)
    assert spectral_efficiency(noisy, 1000.0) < 0
    assert fso_rate(noisy, 1000.0) == 0.0


def test_fso_rate_monotone_grid():
    f = FsoParams(d_max=1e5)
    d = np.linspace(1.0, 20_000, 1000)
    r = fso_rate(f, d)
    assert np.all(r >= 0)
    assert np.all(np.diff(r) <= 1e-9)


def test_fso_rate_symmetric_matrix():
    pts = np.random.default_rng(0).uniform(0, 3000, size=(8, 3))
    r = fso_rate(FsoParams(), pairwise_3d(pts))
    assert np.array_equal(r, r.T)
    assert np.all(np.diag(r) == 0)


def test_params_validation():
    with pytest.raises(ValueError):
        AccessParams(h=0)
    with pytest.raises(ValueError):
        AccessParams(eta_los=30, eta_nlos=20)
    with pytest.raises(ValueError):
        FsoParams(sigma_y=-1)
    with pytest.raises(ValueError):
        FsoParams(zeta_low=3, zeta_high=2)


def test_parameter_mapping_units_round_trip():
    access, fso = params_from_mapping({"f_c": 2, "omega_0": 0.25, "P_FSO": 50, "lambda": 1550,
                                       "sigma_n2": -60.1, "h": 80})
    assert access.f_c == pytest.approx(2e9)
    assert fso.beam_waist == pytest.approx(0.0025)
    assert fso.tx_power == pytest.approx(0.05)
    assert fso.wavelength == pytest.approx(1550e-9)
    assert fso.noise_power == pytest.approx(10 ** (-6.01) / 1000)
    assert fso.height == 80
    back = params_to_mapping(access, fso)
    assert back["sigma_n2"] == pytest.approx(-60.1)
    assert back["omega_0"] == pytest.approx(0.25)
