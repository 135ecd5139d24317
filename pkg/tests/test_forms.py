"""Exterior algebra: wedge, trace, symmetrization, comass, exterior derivative."""

import numpy as np
import pytest

from almqr.forms import (
    ComassSettings,
    GroupAction,
    KCovector,
    KForm,
    MultiPoly,
    comass,
    exterior_derivative,
    natural_volume_form,
    polynomial_one_form,
    symmetrize,
    tensor_product,
    trace_form,
    volume_covector,
    wedge,
)


def cov_gap(a, b):
    keys = set(a.coeffs) | set(b.coeffs)
    return max((abs(a.coeffs.get(k, 0.0) - b.coeffs.get(k, 0.0)) for k in keys), default=0.0)


def rand_covector(rng, dim, k, terms=4):
    import itertools

    pool = list(itertools.combinations(range(dim), k))
    coeffs = {}
    for idx in rng.choice(len(pool), size=min(terms, len(pool)), replace=False):
        coeffs[pool[idx]] = float(rng.normal())
    return KCovector(dim, k, coeffs)


# -- covectors and wedge -------------------------------------------------------


def test_elementary_wedge_unit():
    c1 = KCovector(4, 1, {(0,): 1.0})
    c2 = KCovector(4, 1, {(1,): 1.0})
    V = np.zeros((2, 4))
    V[0, 0] = 1.0
    V[1, 1] = 1.0
    assert c1.wedge(c2)(V) == 1.0
    # antisymmetry in arguments
    assert c1.wedge(c2)(V[::-1]) == -1.0


def test_wedge_self_vanishes_odd_degree():
    rng = np.random.default_rng(0)
    w = rand_covector(rng, 5, 1)
    ww = w.wedge(w)
    for _ in range(10):
        V = rng.normal(size=(2, 5))
        assert ww(V) == pytest.approx(0.0, abs=1e-12)


def test_wedge_associative_numerically():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = rand_covector(rng, 6, 1)
        b = rand_covector(rng, 6, 1)
        c = rand_covector(rng, 6, 2)
        lhs = a.wedge(b).wedge(c)
        rhs = a.wedge(b.wedge(c))
        assert cov_gap(lhs, rhs) < 1e-12


def test_wedge_degree_overflow():
    a = KCovector(2, 2, {(0, 1): 1.0})
    with pytest.raises(ValueError):
        a.wedge(KCovector(2, 1, {(0,): 1.0}))


def test_alternating_multilinear_eval():
    rng = np.random.default_rng(2)
    w = rand_covector(rng, 5, 3)
    V = rng.normal(size=(3, 5))
    swapped = V[[1, 0, 2]]
    assert w(swapped) == pytest.approx(-w(V), rel=1e-12, abs=1e-12)
    scaled = V.copy()
    scaled[1] *= 2.5
    assert w(scaled) == pytest.approx(2.5 * w(V), rel=1e-12, abs=1e-12)


# -- trace forms ---------------------------------------------------------------


def test_trace_of_volume_is_blockwise():
    om = natural_volume_form(2, 3)
    cov = om.at(np.zeros(6))
    assert cov.coeffs == {(0, 1): 1.0, (2, 3): 1.0, (4, 5): 1.0}


def test_trace_d1_is_identity():
    alpha = polynomial_one_form(2, [MultiPoly(2, {(0, 1): 2.0}), MultiPoly(2, {(1, 0): -1.0})])
    tr = trace_form(alpha, 1)
    x = np.array([0.3, 0.7])
    assert cov_gap(tr.at(x), alpha.at(x)) == 0.0


def test_trace_on_single_block_vectors():
    om = natural_volume_form(2, 3)
    x = np.zeros(6)
    V = np.zeros((2, 6))
    V[0, 2] = 1.0
    V[1, 3] = 1.0  # block 1 only
    assert om(x, V) == 1.0


# -- symmetrization ------------------------------------------------------------


def test_projection_fixes_invariant_form():
    G = GroupAction.full(2, 2)
    om = natural_volume_form(2, 2)
    P = symmetrize(om, G)
    assert cov_gap(P.at(np.array([1.0, 2.0, 3.0, 4.0])), om.at(np.zeros(4))) < 1e-12


def test_projection_idempotent_and_linear():
    rng = np.random.default_rng(3)
    G = GroupAction.full(2, 2)

    def rand_form():
        cov = rand_covector(rng, 4, 2)
        return KForm.constant(cov, 2, 2)

    w1, w2 = rand_form(), rand_form()
    P1 = symmetrize(w1, G)
    PP1 = symmetrize(P1, G)
    x = rng.normal(size=4)
    assert cov_gap(P1.at(x), PP1.at(x)) < 1e-14
    a, b = 1.7, -0.3
    lhs = symmetrize(w1.scaled(a).add(w2, b), G)
    rhs = symmetrize(w1, G).scaled(a).add(symmetrize(w2, G), b)
    assert cov_gap(lhs.at(x), rhs.at(x)) < 1e-14


def test_projection_invariance_sampled():
    rng = np.random.default_rng(4)
    G = GroupAction.full(2, 3)
    w = KForm.constant(rand_covector(rng, 6, 2), 2, 3)
    P = symmetrize(w, G)
    for _ in range(100):
        x = rng.normal(size=6)
        V = rng.normal(size=(2, 6))
        g = G.gathers[rng.integers(len(G.gathers))]
        lhs = P.at(x)(V)
        rhs = P.at(x[g])(V[:, g])
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_projection_nonexpansive_l2():
    rng = np.random.default_rng(5)
    G = GroupAction.full(2, 2)
    for _ in range(50):
        w = KForm.constant(rand_covector(rng, 4, 1), 2, 2)
        P = symmetrize(w, G)
        x = np.zeros(4)
        # for 1-forms the l2 coefficient norm IS the comass
        assert P.at(x).l2() <= w.at(x).l2() * (1 + 1e-12)


def test_split_projection_of_tensor_product():
    # projecting a tensor product equals the tensor product of the projections
    rng = np.random.default_rng(6)
    n, d0, d1 = 2, 2, 1
    w0 = KForm.constant(rand_covector(rng, n * d0, 1), n, d0)
    w1 = KForm.constant(rand_covector(rng, n * d1, 1), n, d1)
    lhs = symmetrize(tensor_product(w0, w1), GroupAction.split(n, d0, d1))
    rhs = tensor_product(symmetrize(w0, GroupAction.full(n, d0)), symmetrize(w1, GroupAction.full(n, d1)))
    x = rng.normal(size=n * (d0 + d1))
    assert cov_gap(lhs.at(x), rhs.at(x)) < 1e-12


def test_tensor_product_degree_and_zero():
    w0 = natural_volume_form(2, 1)
    z = KForm.zero(2, 2, 1)
    tp = tensor_product(w0, z)
    assert tp.degree == 4
    assert tp.at(np.zeros(4)).coeffs == {}


# -- comass ---------------------------------------------------------------------


def test_comass_of_natural_form_is_one():
    rng = np.random.default_rng(7)
    for n, d in [(2, 2), (2, 3), (3, 2)]:
        om = natural_volume_form(n, d)
        x = rng.normal(size=n * d)
        res = comass(om, x, ComassSettings(n_starts=32))
        assert res.value == pytest.approx(1.0, abs=1e-9)
        assert res.converged


def test_comass_witness_frame():
    n, d = 2, 2
    om = natural_volume_form(n, d)
    V = np.zeros((n, n * d))
    for ell in range(n):
        V[ell, ell] = 1.0  # (e_l, 0, ..., 0)
    assert om(np.zeros(n * d), V) == 1.0


def test_comass_homogeneity():
    om = natural_volume_form(2, 2)
    scaled = om.scaled(-3.0)
    x = np.zeros(4)
    a = comass(om, x, ComassSettings(n_starts=16)).value
    b = comass(scaled, x, ComassSettings(n_starts=16)).value
    assert b == pytest.approx(3.0 * a, rel=1e-9)


def test_comass_k1_closed_form():
    rng = np.random.default_rng(8)
    w = KForm.constant(rand_covector(rng, 4, 1), 2, 2)
    res = comass(w, np.zeros(4))
    assert res.value == pytest.approx(w.at(np.zeros(4)).l2(), rel=1e-12)


def test_comass_is_upper_bound_on_frames():
    rng = np.random.default_rng(9)
    om = natural_volume_form(2, 2)
    x = rng.normal(size=4)
    val = comass(om, x).value
    for _ in range(200):
        V = rng.normal(size=(2, 4))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        assert om(x, V) <= val + 1e-9


# -- exterior derivative ---------------------------------------------------------


def test_d_of_constant_form_is_zero():
    om = natural_volume_form(2, 2)
    dom = exterior_derivative(om)
    assert dom.at(np.array([1.0, 2.0, 3.0, 4.0])).coeffs == {}


def test_d_of_linear_trace_form():
    # tr(x1 dx2) on (R^2)^2; d = tr(dx1 ^ dx2)
    alpha = polynomial_one_form(2, [MultiPoly(2, {}), MultiPoly(2, {(1, 0): 1.0})])
    tr = trace_form(alpha, 2)
    x = np.array([0.1, -0.2, 0.5, 0.7])
    for form in (tr, KForm(degree=1, n=2, d=2, coeff_fn=tr.coeff_fn)):  # analytic and FD routes
        dcov = exterior_derivative(form, fd_step=1e-5).at(x)
        assert dcov.coeffs.get((0, 1), 0.0) == pytest.approx(1.0, abs=1e-8)
        assert dcov.coeffs.get((2, 3), 0.0) == pytest.approx(1.0, abs=1e-8)
        others = {k: v for k, v in dcov.coeffs.items() if k not in {(0, 1), (2, 3)}}
        assert all(abs(v) < 1e-8 for v in others.values())


def test_dd_zero_on_polynomial_form():
    rng = np.random.default_rng(10)
    comps = [MultiPoly(3, {(2, 0, 0): 0.5, (0, 1, 1): -1.0}), MultiPoly(3, {(1, 1, 0): 2.0}), MultiPoly(3, {(0, 0, 2): 1.0})]
    alpha = polynomial_one_form(3, comps)
    # strip the analytic derivative to exercise the FD route twice
    f = KForm(degree=1, n=3, d=1, coeff_fn=alpha.coeff_fn)
    df = exterior_derivative(f, fd_step=1e-4)
    ddf = exterior_derivative(df, fd_step=1e-3)
    x = rng.normal(size=3)
    assert all(abs(v) < 1e-6 for v in ddf.at(x).coeffs.values())


def test_d_commutes_with_projection():
    rng = np.random.default_rng(11)
    G = GroupAction.full(2, 2)
    comps = [MultiPoly(4, {(1, 0, 0, 0): 1.0, (0, 2, 0, 0): 0.3}) for _ in range(4)]
    base = polynomial_one_form(4, comps)
    w = KForm(degree=1, n=2, d=2, coeff_fn=base.coeff_fn)
    dP = exterior_derivative(symmetrize(w, G), fd_step=1e-4)
    Pd = symmetrize(exterior_derivative(w, fd_step=1e-4), G)
    for _ in range(5):
        x = rng.normal(size=4)
        assert cov_gap(dP.at(x), Pd.at(x)) < 1e-6


def test_trace_form_invariance_sampled():
    rng = np.random.default_rng(12)
    n, d = 2, 3
    alpha = polynomial_one_form(n, [MultiPoly(n, {(1, 0): 1.0, (0, 2): -0.5}), MultiPoly(n, {(1, 1): 2.0})])
    tr = trace_form(alpha, d)
    G = GroupAction.full(n, d)
    assert tr.invariance == "full"
    for _ in range(100):
        x = rng.normal(size=n * d)
        V = rng.normal(size=(1, n * d))
        g = G.gathers[rng.integers(len(G.gathers))]
        assert tr.at(x)(V) == pytest.approx(tr.at(x[g])(V[:, g]), rel=1e-10, abs=1e-10)
