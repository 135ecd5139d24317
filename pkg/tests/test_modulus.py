"""Discrete modulus, geometric quasiconformality and measure checks."""

import numpy as np
import pytest

from almqr.covers import identity_map, planar_power, precomposed, preimage_measure_check, minv
from almqr.modulus import (
    CurveFamily,
    ahlfors_sampler,
    area_formula_check,
    build_family,
    circle_family,
    discrete_modulus,
    energy_bound_check,
    metric_qc_check,
    pushforward_modulus_check,
    radial_family,
    ring_modulus_exact,
    upper_gradient_check,
)
from almqr.regions import Annulus, Box

ANN = Annulus(np.zeros(2), 1.0, np.e)


def test_ring_modulus_converges():
    vals = {}
    for grid, M in [(64, 256), (128, 512)]:
        res = discrete_modulus(radial_family(ANN, M), ANN, grid=grid)
        vals[grid] = res.value
        assert res.gap < 1e-3 * res.value  # duality certificate
    exact = ring_modulus_exact(1.0, np.e)
    assert abs(vals[128] - exact) / exact < 0.05
    # stabilization between the two finest grids
    assert abs(vals[128] - vals[64]) / exact < 0.05


def test_circle_family_conjugate_value():
    # separating circles: continuum modulus log(R) / (2 pi)
    res = discrete_modulus(circle_family(ANN, 128), ANN, grid=128)
    exact = np.log(np.e) / (2 * np.pi)
    assert abs(res.value - exact) / exact < 0.05


def test_modulus_monotone_in_family():
    fam_small = radial_family(ANN, 64)
    fam_big = CurveFamily(fam_small.polylines + radial_family(ANN, 128).polylines)
    a = discrete_modulus(fam_small, ANN, grid=64)
    b = discrete_modulus(fam_big, ANN, grid=64)
    assert b.value >= a.value - 1e-6 * a.value


def test_single_segment_tube_modulus():
    # one straight segment: the optimal density is the tube around it,
    # value ~ h / len under refinement
    box = Box([0.0, 0.0], [1.0, 1.0])
    seg = CurveFamily([np.array([[0.1, 0.5], [0.9, 0.5]])])
    prev = None
    for grid in (32, 64, 128):
        res = discrete_modulus(seg, box, grid=grid)
        h = 1.0 / grid
        hand = h / 0.8
        assert res.value == pytest.approx(hand, rel=0.2)
        if prev is not None:
            assert res.value < prev
        prev = res.value


def test_zero_length_curve_rejected():
    with pytest.raises(ValueError):
        CurveFamily([np.array([[0.5, 0.5], [0.5, 0.5]])])


def test_family_dsl():
    fam = build_family({"family": "radial", "count": 32}, ANN)
    assert len(fam) == 32
    fam2 = build_family("circles", ANN)
    assert fam2.name == "circles"
    fam3 = build_family({"family": "polylines", "paths": [[[1.0, 0.0], [2.0, 0.0]]]}, ANN)
    assert len(fam3) == 1
    with pytest.raises(ValueError):
        build_family({"family": "bogus"}, ANN)


def test_pushforward_modulus_identity_and_square():
    rep = pushforward_modulus_check(identity_map(), radial_family(ANN, 256), ANN, grid=96, lift_steps=64)
    assert abs(rep["ratio"] - 1.0) < 0.05
    rep2 = pushforward_modulus_check(planar_power(2), radial_family(ANN, 256), ANN, grid=96, lift_steps=64)
    assert rep2["pass"]
    assert abs(rep2["ratio"] - 1.0) < 0.05


def test_pushforward_modulus_affine_band():
    lam = 1.3
    f = precomposed(np.array([[lam, 0.0], [0.0, 1.0 / lam]]), planar_power(2))
    rep = pushforward_modulus_check(f, radial_family(ANN, 256), ANN, grid=96, lift_steps=64)
    K = rep["K_I_K_O"]
    assert K == pytest.approx(lam**4)
    assert rep["pass"]


def test_upper_gradient_conformal_and_distorted():
    fam = radial_family(Annulus(np.zeros(2), 0.5, 1.5), 8)
    for f in (identity_map(), planar_power(2), planar_power(3)):
        rep = upper_gradient_check(f, fam, samples_per_curve=32)
        assert rep["pass"]
        assert rep["violation_fraction"] == 0.0
    f = precomposed(np.array([[1.4, 0.1], [0.0, 0.75]]), planar_power(2))
    rep = upper_gradient_check(f, fam, samples_per_curve=32)
    assert rep["pass"]


def test_area_formula_and_energy():
    E = Annulus(np.zeros(2), 1.0, 4.0)
    for d in (2, 3):
        f = planar_power(d)
        pre = Annulus(np.zeros(2), 1.0 ** (1 / d), 4.0 ** (1 / d))
        rep = area_formula_check(f, lambda x: 1.0, E, pre, orders=(16, 32))
        assert rep["rel_discrepancy"] < 1e-6
        rep2 = area_formula_check(f, lambda x: float(x @ x), E, pre, orders=(16, 32))
        assert rep2["rel_discrepancy"] < 1e-6
    eb = energy_bound_check(planar_power(2), E, Annulus(np.zeros(2), 1.0, 2.0), order=32)
    assert eb["pass"]
    # the conformal case is sharp: the bound is attained up to quadrature error
    assert abs(eb["slack"]) < 1e-6 * eb["bound"]


def test_area_formula_identity_exact():
    E = Annulus(np.zeros(2), 0.5, 1.5)
    rep = area_formula_check(identity_map(), lambda x: float(x[0] ** 2 + 1.0), E, E, orders=(8, 16))
    assert rep["rel_discrepancy"] < 1e-12


def test_area_formula_indicator_fallback():
    E = Annulus(np.zeros(2), 1.0, 2.0)
    rep = area_formula_check(planar_power(2), lambda x: 1.0, E, None, orders=(24,))
    assert rep["indicator_fallback"]
    assert rep["rel_discrepancy"] < 0.05  # indicator integrand: first-order accuracy only


def test_ahlfors_identity_and_square():
    outs = ahlfors_sampler(identity_map(), [np.array([0.6, 0.1])], [0.05, 0.1], n_samples=20000, seed=0)
    for s in outs:
        # d = 1: the measure is exactly pi r^2, the ratio exactly 1 in expectation
        assert s.ratio == pytest.approx(1.0, abs=4 * s.ratio_ci / 3 + 1e-3)
    outs2 = ahlfors_sampler(planar_power(2), [np.array([1.0, 0.0])], [0.05], n_samples=20000, seed=1)
    for s in outs2:
        assert s.ratio <= 1.0 + s.ratio_ci
        assert s.boundary_fraction == 0.0


def test_metric_qc_rows():
    rep = metric_qc_check(planar_power(2), np.array([1.0, 0.0]), [0.1, 0.05, 0.02])
    assert rep["pass"]
    hs = [row["H_minv_sq"] for row in rep["rows"]]
    # conformal branches: distortion tends to 1 as r shrinks
    assert hs[-1] < hs[0]
    assert hs[-1] == pytest.approx(1.0, abs=0.05)
    rid = metric_qc_check(planar_power(1), np.array([0.3, 0.2]), [0.1])
    assert rid["rows"][0]["H_minv_sq"] == pytest.approx(1.0, abs=1e-6)


def test_metric_qc_radius_guard():
    from almqr.covers import CoverError

    with pytest.raises(CoverError):
        metric_qc_check(planar_power(2), np.array([0.1, 0.0]), [0.5])


def test_preimage_measure_identity_and_square():
    f1 = identity_map()
    z = minv(f1, np.array([0.5, 0.0]))
    rep = preimage_measure_check(
        f1, z, 0.3, Box([-1.5, -1.5], [1.5, 1.5]), Box([-1.5, -1.5], [1.5, 1.5]), n_samples=20000, seed=0
    )
    assert rep["ok"]
    assert rep["ratio"] == pytest.approx(1.0, abs=3 * rep["ratio_sd"] + 0.02)
    f2 = planar_power(2)
    z2 = minv(f2, np.array([1.0, 0.0]))
    rep2 = preimage_measure_check(
        f2, z2, 0.3, Box([-2.0, -2.0], [2.0, 2.0]), Box([0.2, -0.8], [1.8, 0.8]), n_samples=20000, seed=1
    )
    assert rep2["ok"]
    assert rep2["ratio"] <= 2 * (1 + 3 * rep2["ratio_sd"])


def test_preimage_measure_small_budget_flagged():
    f1 = identity_map()
    z = minv(f1, np.array([0.5, 0.0]))
    rep = preimage_measure_check(f1, z, 0.3, Box([-1, -1], [1, 1]), Box([-1, -1], [1, 1]), n_samples=10)
    assert not rep["ok"]


def test_density_field_admissibility():
    res = discrete_modulus(radial_family(ANN, 128), ANN, grid=64)
    rho = res.density
    assert rho is not None
    assert np.all(rho.values >= 0)
    # rescaled density is exactly admissible: every curve integral >= 1
    assert rho.admissibility_residual <= 1e-12
    assert rho.curve_integrals.min() == pytest.approx(1.0, abs=1e-12)
    # mass recomputed from the field matches the reported value
    centers = rho.grid.centers(rho.cells)
    V = rho.grid.cell_volume()
    assert (V * rho.values**rho.exponent).sum() == pytest.approx(res.value, rel=1e-12)
