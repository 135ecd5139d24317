"""Catalog branched covers: fibers, indices, push-forward, distortion."""

import numpy as np
import pytest

from almqr.almgren import AlmgrenPoint, distance_value
from almqr.covers import (
    CoverError,
    NumericalError,
    build_map,
    complex_polynomial,
    h_function,
    identity_map,
    local_index,
    min_singular,
    minv,
    minv_metric_jacobian,
    op_norm,
    planar_power,
    precomposed,
    push_forward,
    winding_map_3d,
)


def test_minv_square_examples():
    f = planar_power(2)
    p = minv(f, [1.0, 0.0])
    assert p.d == 2
    assert np.allclose(sorted(p.locations[:, 0]), [-1.0, 1.0], atol=1e-12)
    p0 = minv(f, [0.0, 0.0])
    assert p0.weights.tolist() == [2]
    assert np.allclose(p0.locations, 0.0)


def test_minv_shifted_square():
    g = complex_polynomial([-1, 0, 1])  # z^2 - 1
    q = minv(g, [0.0, 0.0])
    assert sorted(np.round(q.locations[:, 0], 10).tolist()) == [-1.0, 1.0]


def test_minv_outside_image_rejected():
    w = winding_map_3d(2, r_max=1.0, z_half=0.5)
    with pytest.raises(CoverError):
        minv(w, [5.0, 0.0, 0.0])


def test_degree_sum_invariant_random():
    rng = np.random.default_rng(0)
    maps = [
        planar_power(3),
        complex_polynomial([0.3, -1.0, 0.5, 1.0]),
        precomposed(np.array([[1.2, 0.1], [0.0, 0.9]]), planar_power(2)),
    ]
    for f in maps:
        for _ in range(300):
            y = rng.normal(scale=1.5, size=2)
            p = minv(f, y)
            assert p.d == f.degree
            # fiber points map back to y
            for loc in p.locations:
                assert np.linalg.norm(f.evaluate(loc) - y) < 1e-9 * (1 + np.linalg.norm(y))


def test_local_index_examples():
    f = planar_power(3)
    assert local_index(f, [0.0, 0.0]) == 3
    assert local_index(f, [0.5, 0.2]) == 1
    w = winding_map_3d(4)
    assert local_index(w, [0.0, 0.0, 0.3]) == 4
    assert local_index(w, [0.5, 0.0, 0.3]) == 1


def test_push_forward():
    f = planar_power(2)
    y = np.array([0.5, 0.2])
    assert push_forward(f, lambda x: 1.0, y) == pytest.approx(2.0)
    assert push_forward(f, lambda x: float(x @ x), y) == pytest.approx(2 * np.hypot(*y))
    rng = np.random.default_rng(1)
    for _ in range(20):
        yy = rng.normal(size=2)
        assert push_forward(f, lambda x: abs(x[0]) + 1e-3, yy) > 0


def test_h_function_values():
    f = planar_power(2)
    assert h_function(f, [1.0, 0.0]) == pytest.approx(1 / np.sqrt(2))
    for d in (2, 3, 4):
        g = planar_power(d)
        r = 1.37
        expect = np.sqrt(r ** (-2 * (d - 1) / d) / d)
        assert h_function(g, [r, 0.0]) == pytest.approx(expect, rel=1e-12)
    assert h_function(identity_map(), [0.3, -0.4]) == pytest.approx(1.0)


def test_h_function_singular_fiber():
    f = planar_power(2)
    with pytest.raises(NumericalError):
        h_function(f, [0.0, 0.0])


def test_metric_jacobian_conformal_equals_H_squared():
    f = planar_power(3)
    rng = np.random.default_rng(2)
    for _ in range(30):
        y = rng.normal(size=2)
        if np.hypot(*y) < 0.1:
            continue
        assert minv_metric_jacobian(f, y) == pytest.approx(h_function(f, y) ** 2, rel=1e-10)


def test_catalog_distortion_invariants():
    rng = np.random.default_rng(3)
    # holomorphic maps: conformal off the branch set
    f = complex_polynomial([0.0, -0.5, 0.0, 1.0])
    for _ in range(100):
        x = rng.normal(size=2)
        D = f.differential(x)
        J = f.jacobian(x)
        if J < 1e-12:
            continue
        assert op_norm(D) ** 2 <= f.K_O * J * (1 + 1e-9)
        assert J <= f.K_I * min_singular(D) ** 2 * (1 + 1e-9)
    # affine precomposition carries the affine distortion exactly
    A = np.array([[2.0, 0.3], [0.0, 0.7]])
    sv = np.linalg.svd(A, compute_uv=False)
    lam = sv[0] / sv[1]
    g = precomposed(A, planar_power(2))
    assert g.K_I == pytest.approx(lam)
    assert g.K_O == pytest.approx(lam)
    for _ in range(100):
        x = rng.normal(size=2)
        D = g.differential(x)
        J = g.jacobian(x)
        if J < 1e-12:
            continue
        assert op_norm(D) ** 2 <= g.K_O * J * (1 + 1e-9)
        assert J <= g.K_I * min_singular(D) ** 2 * (1 + 1e-9)
    # the winding map: singular values (1, k, 1)
    w = winding_map_3d(3)
    for _ in range(50):
        x = rng.normal(size=3)
        if np.hypot(x[0], x[1]) < 0.1:
            continue
        D = w.differential(x)
        assert op_norm(D) == pytest.approx(3.0, rel=1e-10)
        assert min_singular(D) == pytest.approx(1.0, rel=1e-10)
        assert op_norm(D) ** 3 <= w.K_O * w.jacobian(x) * (1 + 1e-12)
        assert w.jacobian(x) <= w.K_I * min_singular(D) ** 3 * (1 + 1e-12)


def test_minv_sampled_continuity():
    # shrinking radii: fiber distance decreases to zero, bounded by the
    # square-root modulus of continuity of the power map
    f = planar_power(2)
    y0 = np.array([0.09, 0.0])  # near-ish the branch value at 0
    p0 = minv(f, y0)
    radii = 0.05 * 2.0 ** -np.arange(10)
    prev = np.inf
    for r in radii:
        worst = 0.0
        for phi in np.linspace(0, 2 * np.pi, 16, endpoint=False):
            y = y0 + r * np.array([np.cos(phi), np.sin(phi)])
            worst = max(worst, distance_value(minv(f, y), p0))
        assert worst <= prev * (1 + 1e-9)
        prev = worst
        # explicit normal-neighborhood bound for z^2: diam U(x, r) bound
        assert worst**2 <= 2 * (np.sqrt(2) * np.sqrt(r)) ** 2 * (1 + 1e-6)
    assert prev < 1e-3


def test_pseudomonotone_spot_check():
    # diam F(B(y, r)) <= sqrt(d) diam dF(B(y, r)) via boundary sampling
    f = planar_power(2)
    rng = np.random.default_rng(4)
    for _ in range(10):
        y0 = rng.normal(size=2)
        if np.hypot(*y0) < 0.3:
            continue
        r = 0.2 * np.hypot(*y0)
        ring = [minv(f, y0 + r * np.array([np.cos(t), np.sin(t)])) for t in np.linspace(0, 2 * np.pi, 48, endpoint=False)]
        disk = ring + [minv(f, y0 + u * r * np.array([np.cos(t), np.sin(t)])) for u in (0.3, 0.7) for t in np.linspace(0, 2 * np.pi, 16, endpoint=False)] + [minv(f, y0)]
        diam_boundary = max(distance_value(a, b) for a in ring for b in ring)
        diam_full = max(distance_value(a, b) for a in disk for b in disk)
        assert diam_full <= np.sqrt(2) * diam_boundary + 1e-9


def test_build_map_dsl_and_errors():
    m = build_map({"map": "poly", "coeffs": [[-1.0, 0.0], 0, 1]})
    assert m.degree == 2
    m2 = build_map({"map": "precompose", "affine": [[2, 0], [0, 0.5]], "base": {"map": "power", "k": 3}})
    assert m2.degree == 3
    with pytest.raises(CoverError):
        build_map({"map": "nope"})
    with pytest.raises(CoverError):
        build_map({"map": "poly"})
    with pytest.raises(CoverError):
        build_map({"coeffs": [1, 2]})
    with pytest.raises(CoverError):
        build_map({"map": "poly", "coeffs": [3.0]})  # constant
    with pytest.raises(CoverError):
        build_map({"map": "precompose", "affine": [[1, 0], [0, -1]], "base": {"map": "power", "k": 2}})


def test_fiber_batch_matches_scalar():
    f = planar_power(3)
    rng = np.random.default_rng(5)
    ys = rng.normal(size=(50, 2))
    batch = f.fiber_batch(ys)
    for y, fib in zip(ys, batch):
        expect = minv(f, y).expand()
        got = fib[np.lexsort(fib.T[::-1])]
        assert np.allclose(got, expect, atol=1e-12)


def test_branch_diff_batch_matches_differential():
    f = planar_power(2)
    rng = np.random.default_rng(6)
    ys = rng.normal(size=(20, 2))
    L = f.branch_diff_batch(ys)
    for y, Ls in zip(ys, L):
        roots = f.fiber_batch(y[None])[0]
        for root, Lj in zip(roots, Ls):
            D = f.differential(root)
            assert np.allclose(Lj, np.linalg.inv(D), atol=1e-10)


def test_jacobian_positive_off_branch_set():
    rng = np.random.default_rng(7)
    for f in (planar_power(2), complex_polynomial([1.0, -2.0, 0.0, 1.0]), winding_map_3d(3)):
        for _ in range(200):
            if f.n == 3:
                x = np.array([*rng.normal(scale=0.6, size=2), rng.uniform(-0.9, 0.9)])
                if np.hypot(x[0], x[1]) > 1.9:
                    continue
            else:
                x = rng.normal(size=2)
            # x is off the branch set iff its fiber point has index 1
            if local_index(f, x) == 1:
                assert f.jacobian(x) > 0.0
