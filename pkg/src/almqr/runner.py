"""Named verification checks with pinned thresholds.

Each check maps a config dict to a ReportRecord; the CLI subcommands and the
suite manifest both dispatch here.  Claim ids name the mathematical
statement a check exercises, forming the coverage matrix of the suite.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .almgren import (
    AlmgrenPoint,
    barycenter,
    distance,
    distance_bruteforce,
    distance_to_diagonal,
    distance_value,
)
from .covers import build_map, lift_path, minv, planar_power
from .dsl import build_form, build_testform
from .forms import (
    ComassSettings,
    GroupAction,
    KForm,
    MultiPoly,
    comass,
    exterior_derivative,
    natural_volume_form,
    polynomial_one_form,
    symmetrize,
    trace_form,
)
from .modulus import (
    ahlfors_sampler,
    area_formula_check,
    build_family,
    discrete_modulus,
    energy_bound_check,
    metric_qc_check,
    pushforward_modulus_check,
    ring_modulus_exact,
    upper_gradient_check,
)
from .mv import (
    BumpTestForm,
    MultiValuedMap,
    MultiValuedPair,
    from_affine_branches,
    from_cover,
    generalized_inverse,
    interpolate_feps,
    pullback,
    qr_curve_check,
    weak_stokes_check,
)
from .regions import Annulus, Box, parse_region
from .reports import ReportRecord, timed
from .util import seeded_rng


def _random_point(rng, d, n, spread=2.0) -> AlmgrenPoint:
    return AlmgrenPoint.from_points(rng.normal(scale=spread, size=(d, n)))


# ---------------------------------------------------------------------------
# tuple-space checks


def _check_metric_oracle(config, seed):
    n_samples = int(config.get("samples", 10_000))
    rng = seeded_rng(seed, 1)
    worst = 0.0
    for _ in range(n_samples):
        d = int(rng.integers(2, 7))
        n = int(rng.integers(1, 5))
        p = _random_point(rng, d, n)
        q = _random_point(rng, d, n)
        a = distance(p, q).value
        b = distance_bruteforce(p, q).value
        worst = max(worst, abs(a - b))
        if worst != 0.0:
            break
    passed = worst == 0.0
    return passed, {"n_samples": n_samples, "worst_abs_gap": worst}, {"exact": 0.0}, 0


def _check_metric_axioms(config, seed):
    n_samples = int(config.get("samples", 10_000))
    tol = float(config.get("tol", 1e-12))
    rng = seeded_rng(seed, 2)
    worst_tri = -np.inf
    worst_sym = 0.0
    for _ in range(n_samples):
        d = int(rng.integers(2, 7))
        n = int(rng.integers(1, 5))
        p, q, r = (_random_point(rng, d, n) for _ in range(3))
        dpq = distance_value(p, q)
        dqr = distance_value(q, r)
        dpr = distance_value(p, r)
        worst_tri = max(worst_tri, dpr - (dpq + dqr))
        worst_sym = max(worst_sym, abs(dpq - distance_value(q, p)))
    # identity of indiscernibles on shuffled multisets
    ident_ok = True
    for _ in range(200):
        d = int(rng.integers(2, 6))
        n = int(rng.integers(1, 4))
        pts = rng.normal(size=(d, n))
        p = AlmgrenPoint.from_points(pts)
        q = AlmgrenPoint.from_points(pts[rng.permutation(d)])
        ident_ok = ident_ok and p == q and distance_value(p, q) == 0.0
    passed = worst_tri <= tol and worst_sym == 0.0 and ident_ok
    metrics = {
        "n_samples": n_samples,
        "worst_triangle_excess": float(worst_tri),
        "worst_symmetry_gap": worst_sym,
        "indiscernible_ok": ident_ok,
    }
    return passed, metrics, {"triangle_tol": tol}, 0


def _check_barycenter_lipschitz(config, seed):
    n_samples = int(config.get("samples", 10_000))
    tol = float(config.get("tol", 1e-12))
    rng = seeded_rng(seed, 3)
    worst = 0.0
    for _ in range(n_samples):
        d = int(rng.integers(2, 7))
        n = int(rng.integers(1, 5))
        p = _random_point(rng, d, n)
        q = _random_point(rng, d, n)
        dv = distance_value(p, q)
        if dv == 0:
            continue
        ratio = np.sqrt(d) * np.linalg.norm(barycenter(p) - barycenter(q)) / dv
        worst = max(worst, ratio)
    # equality witness on diagonal pairs
    eq_gap = 0.0
    for _ in range(100):
        d = int(rng.integers(2, 7))
        n = int(rng.integers(1, 5))
        a, b = rng.normal(size=(2, n))
        p = AlmgrenPoint.diagonal(a, d)
        q = AlmgrenPoint.diagonal(b, d)
        ratio = np.sqrt(d) * np.linalg.norm(barycenter(p) - barycenter(q)) / distance_value(p, q)
        eq_gap = max(eq_gap, abs(ratio - 1.0))
    passed = worst <= 1.0 + tol and eq_gap <= tol
    metrics = {"n_samples": n_samples, "max_ratio": float(worst), "diagonal_equality_gap": eq_gap}
    return passed, metrics, {"ratio_bound": 1.0 + tol}, 0


# ---------------------------------------------------------------------------
# form checks


def _check_comass(config, seed):
    tol = float(config.get("tol", 1e-6))
    ns = config.get("ns", [2, 3])
    ds = config.get("ds", [2, 3])
    n_points = int(config.get("points", 10))
    expected = float(config.get("expected", 1.0))
    rng = seeded_rng(seed, 4)
    worst = 0.0
    values = []
    for n in ns:
        for d in ds:
            form = build_form(config["form"]) if "form" in config else natural_volume_form(n, d)
            for _ in range(n_points):
                x = rng.normal(size=n * d)
                res = comass(form, x, ComassSettings(seed=seed))
                values.append(res.value)
                worst = max(worst, abs(res.value - expected))
    passed = worst <= tol
    metrics = {"max_abs_error": worst, "min_value": min(values), "max_value": max(values)}
    return passed, metrics, {"expected": expected, "tol": tol}, 0


def _rand_poly(rng, n, deg=2) -> MultiPoly:
    terms = {}
    for _ in range(3):
        exps = tuple(int(rng.integers(0, deg + 1)) for _ in range(n))
        terms[exps] = float(rng.normal())
    return MultiPoly(n, terms)


def _poly_kform(rng, n: int, d: int) -> KForm:
    """Random polynomial-coefficient 1-form living on (R^n)^d."""
    N = n * d
    base = polynomial_one_form(N, [_rand_poly(rng, N) for _ in range(N)])
    return KForm(
        degree=1,
        n=n,
        d=d,
        coeff_fn=base.coeff_fn,
        analytic_derivative=base.analytic_derivative,
        invariance="none",
    )


def _check_invariant_projection(config, seed):
    tol_ratio = float(config.get("tol_ratio", 1e-12))
    tol_fd = float(config.get("tol_fd", 1e-6))
    rng = seeded_rng(seed, 5)
    n, d = 2, 2
    G = GroupAction.full(n, d)
    N = n * d

    # idempotence and linearity on random polynomial-coefficient 1-forms
    base0 = _poly_kform(rng, n, d)
    base1 = _poly_kform(rng, n, d)
    P0 = symmetrize(base0, G)
    PP0 = symmetrize(P0, G)
    a, b = 0.7, -1.3
    lin_lhs = symmetrize(base0.add(base1, b).scaled(a), G)
    xs = rng.normal(size=(50, N))
    idem = max(
        max(
            (abs(P0.at(x).coeffs.get(k, 0.0) - PP0.at(x).coeffs.get(k, 0.0))
             for k in set(P0.at(x).coeffs) | set(PP0.at(x).coeffs)),
            default=0.0,
        )
        for x in xs
    )
    lin = 0.0
    for x in xs:
        lhs = lin_lhs.at(x)
        rhs = symmetrize(base0, G).at(x).add(symmetrize(base1, G).at(x), b).scaled(a)
        keys = set(lhs.coeffs) | set(rhs.coeffs)
        lin = max(lin, max((abs(lhs.coeffs.get(k, 0) - rhs.coeffs.get(k, 0)) for k in keys), default=0.0))

    # sup-norm non-expansion via the exact closed-form comass of 1-forms
    nonexp = 0.0
    for x in xs[:20]:
        val_p = P0.at(x).l2()
        orbit_max = max(base0.at(x[g]).l2() for g in G.gathers)
        if orbit_max > 0:
            nonexp = max(nonexp, val_p / orbit_max)
    # trace of the volume form is fixed by the projection (already invariant)
    om = natural_volume_form(n, d)
    Pom = symmetrize(om, G)
    x0 = rng.normal(size=N)
    fixed = max(
        (abs(om.at(x0).coeffs.get(k, 0.0) - Pom.at(x0).coeffs.get(k, 0.0))
         for k in set(om.at(x0).coeffs) | set(Pom.at(x0).coeffs)),
        default=0.0,
    )

    # d commutes with the projection (finite differences)
    dP = exterior_derivative(symmetrize(base0, G), fd_step=1e-4)
    Pd = symmetrize(exterior_derivative(base0, fd_step=1e-4), G)
    comm = 0.0
    for x in xs[:10]:
        ka = dP.at(x)
        kb = Pd.at(x)
        keys = set(ka.coeffs) | set(kb.coeffs)
        comm = max(comm, max((abs(ka.coeffs.get(k, 0) - kb.coeffs.get(k, 0)) for k in keys), default=0.0))

    passed = (
        idem <= 1e-10 and lin <= 1e-10 and nonexp <= 1.0 + tol_ratio and fixed <= 1e-12 and comm <= tol_fd
    )
    metrics = {
        "idempotence_gap": idem,
        "linearity_gap": lin,
        "nonexpansion_ratio": nonexp,
        "fixed_point_gap": fixed,
        "d_commutation_gap": comm,
    }
    return passed, metrics, {"ratio_bound": 1.0 + tol_ratio, "fd_tol": tol_fd}, 0


def _check_split_pullback(config, seed):
    n_points = int(config.get("points", 1000))
    tol = float(config.get("tol", 1e-9))
    rng = seeded_rng(seed, 6)
    box = Box([-1.5, -1.5], [1.5, 1.5])
    worst = 0.0
    shapes = config.get("shapes", [[1, 1], [2, 1], [2, 2]])
    per = max(1, n_points // len(shapes))
    for d0, d1 in shapes:
        f0 = from_affine_branches(
            [(rng.normal(size=(2, 2)), rng.normal(size=2)) for _ in range(d0)], box, m=2
        )
        f1 = from_affine_branches(
            [(rng.normal(size=(2, 2)), rng.normal(size=2)) for _ in range(d1)], box, m=2
        )
        w0 = symmetrize(
            trace_form(polynomial_one_form(2, [_rand_poly(rng, 2, 1), _rand_poly(rng, 2, 1)]), d0),
            GroupAction.full(2, d0),
        )
        w1 = symmetrize(
            trace_form(polynomial_one_form(2, [_rand_poly(rng, 2, 1), _rand_poly(rng, 2, 1)]), d1),
            GroupAction.full(2, d1),
        )
        from .forms import tensor_product

        tp = tensor_product(w0, w1)
        pair = MultiValuedPair(f0, f1)
        for x in box.sample(seeded_rng(seed, 6, d0, d1), per):
            lhs = pair.pullback(tp, x, verify_relabelings=0).covector
            rhs = pullback(f0, w0, x, verify_relabelings=0).covector.wedge(
                pullback(f1, w1, x, verify_relabelings=0).covector
            )
            keys = set(lhs.coeffs) | set(rhs.coeffs)
            worst = max(
                worst, max((abs(lhs.coeffs.get(k, 0) - rhs.coeffs.get(k, 0)) for k in keys), default=0.0)
            )
    passed = worst <= tol
    return passed, {"n_points": n_points, "max_deviation": worst}, {"tol": tol}, 0


# ---------------------------------------------------------------------------
# cover / mv checks


def _map_from_config(config) -> tuple:
    spec = config.get("map", {"map": "power", "k": 2})
    return build_map(spec)


def _region_from_config(config, default="annulus:0.3,1.5"):
    return parse_region(config.get("region", default))


def _check_qr_curve(config, seed):
    f = _map_from_config(config)
    region = _region_from_config(config)
    n_samples = int(config.get("samples", 10_000))
    tol = float(config.get("tol", 1e-9 if f.K_I == 1.0 else 1e-6))
    rep = qr_curve_check(f, region, n_samples=n_samples, seed=seed, tol=tol)
    sharp = bool(config.get("sharp", f.K_I == 1.0))
    passed = rep["pass"]
    if sharp:
        passed = passed and rep["min_ratio"] >= 1.0 - tol
    metrics = {k: rep[k] for k in ("max_ratio", "min_ratio", "mean_ratio", "n_used", "constant")}
    metrics["histogram"] = rep["histogram"]
    return passed, metrics, {"upper": 1.0 + tol, "lower_if_sharp": 1.0 - tol if sharp else None}, rep["excluded"]


def _check_stokes(config, seed):
    f = _map_from_config(config)
    F = from_cover(f, Box([0.4, 0.4], [1.8, 1.8]))
    n_forms = int(config.get("forms", 5))
    n_tests = int(config.get("testforms", 5))
    orders = tuple(config.get("orders", (16, 32, 64)))
    tol = float(config.get("tol", 1e-3))
    rng = seeded_rng(seed, 8)
    worst = 0.0
    all_decreasing = True
    rows = []
    cache: dict = {}  # branch differentials are form-independent, share across forms
    for i in range(n_forms):
        if "form" in config:
            omega = build_form(config["form"])
        else:
            omega = symmetrize(
                trace_form(polynomial_one_form(2, [_rand_poly(rng, 2), _rand_poly(rng, 2)]), f.degree),
                GroupAction.full(2, f.degree),
            )
        for j in range(n_tests):
            if "testform" in config:
                alpha = build_testform(config["testform"])
            else:
                c = rng.uniform(0.7, 1.3, size=2)
                w = rng.uniform(0.25, 0.55, size=2)
                alpha = BumpTestForm(lo=c - w, hi=c + w, q=3, amp=float(rng.uniform(0.5, 2.0)))
            rep = weak_stokes_check(F, omega, alpha, orders=orders, differential_cache=cache)
            worst = max(worst, rep["rel_discrepancy"])
            all_decreasing = all_decreasing and rep["decreasing"]
            rows.append(
                {"form": i, "testform": j, "rel": rep["rel_discrepancy"], "decreasing": rep["decreasing"]}
            )
    passed = worst <= tol and all_decreasing
    metrics = {"worst_rel_discrepancy": worst, "decreasing": all_decreasing, "rows": rows}
    return passed, metrics, {"tol": tol}, 0


def _check_upper_gradient(config, seed):
    f = _map_from_config(config)
    region = _region_from_config(config, "annulus:0.5,1.5")
    fam = build_family(config.get("family", {"family": "radial", "count": 16}), region)
    rep = upper_gradient_check(
        f,
        fam,
        samples_per_curve=int(config.get("samples_per_curve", 64)),
        tol=float(config.get("tol", 1e-6)),
    )
    metrics = {k: rep[k] for k in ("violation_fraction", "worst_low_gap", "worst_high_gap", "n_samples", "K_factor")}
    return rep["pass"], metrics, {"tol": rep["tol"]}, rep["excluded"]


def _check_area(config, seed):
    f = _map_from_config(config)
    d = f.degree
    E = Annulus(np.zeros(2), *config.get("image_annulus", (1.0, 4.0)))
    pre = Annulus(np.zeros(2), E.r_in ** (1.0 / d), E.r_out ** (1.0 / d))
    tol = float(config.get("tol", 1e-3))
    gs = {
        "one": lambda x: 1.0,
        "sq_norm": lambda x: float(x @ x),
        "inv_grad_sq": lambda x: 1.0 / max(np.hypot(x[0], x[1]) ** (2 * (d - 1)) * d * d, 1e-300),
    }
    worst = 0.0
    rows = {}
    for name, g in gs.items():
        rep = area_formula_check(f, g, E, pre, orders=tuple(config.get("orders", (32, 64))))
        rows[name] = rep["rel_discrepancy"]
        worst = max(worst, rep["rel_discrepancy"])
    passed = worst <= tol
    return passed, {"rel_discrepancy": rows, "worst": worst}, {"tol": tol}, 0


def _check_energy(config, seed):
    f = _map_from_config(config)
    d = f.degree
    E = Annulus(np.zeros(2), *config.get("image_annulus", (1.0, 4.0)))
    pre = Annulus(np.zeros(2), E.r_in ** (1.0 / d), E.r_out ** (1.0 / d))
    rep = energy_bound_check(f, E, pre, order=int(config.get("order", 64)))
    return rep["pass"], {"energy": rep["energy"], "bound": rep["bound"], "slack": rep["slack"]}, {
        "bound_slack": 1e-9
    }, 0


def _check_gen_inverse(config, seed):
    degrees = config.get("degrees", [2, 3, 4])
    n_samples = int(config.get("samples", 10_000))
    tol = float(config.get("tol", 1e-8))
    region = Annulus(np.zeros(2), 0.2, 2.0)
    worst = 0.0
    for ix, d in enumerate(degrees):
        f = planar_power(int(d)) if config.get("use_power", False) else build_map(
            {"map": "poly", "coeffs": [0.0] * int(d) + [1.0]}
        )
        rng = seeded_rng(seed, 9, ix)
        for y in region.sample(rng, n_samples):
            worst = max(worst, float(np.linalg.norm(generalized_inverse(f, y))))
    passed = worst <= tol
    return passed, {"max_norm": worst, "n_samples": n_samples, "degrees": degrees}, {"tol": tol}, 0


def _check_modulus(config, seed):
    region = _region_from_config(config, "annulus:1,2.718281828459045")
    fam = build_family(config.get("family", {"family": "radial", "count": 1024}), region)
    grid = int(config.get("grid", 256))
    res = discrete_modulus(fam, region, grid=grid, n=float(config.get("n", 2)))
    exact = ring_modulus_exact(region.r_in, region.r_out)
    rel = abs(res.value - exact) / exact
    tol = float(config.get("tol", 0.05))
    passed = rel <= tol
    metrics = {"value": res.value, "exact": exact, "rel_error": rel, **res.to_json()}
    return passed, metrics, {"rel_tol": tol}, 0


def _check_geom_qc(config, seed):
    f = _map_from_config(config)
    region = _region_from_config(config, "annulus:1,2.718281828459045")
    fam = build_family(config.get("family", {"family": "radial", "count": 512}), region)
    rep = pushforward_modulus_check(
        f,
        fam,
        region,
        grid=int(config.get("grid", 256)),
        slack=float(config.get("slack", 0.05)),
        lift_steps=int(config.get("lift_steps", 128)),
    )
    metrics = {k: rep[k] for k in ("mod_base", "mod_image", "ratio", "K_I_K_O", "bound_lo", "bound_hi")}
    return rep["pass"], metrics, {"slack": config.get("slack", 0.05)}, rep["lift_failures"]


def _check_ahlfors(config, seed):
    f = _map_from_config(config)
    N = int(config.get("samples", 100_000))
    if "center_points" in config:
        centers = [np.asarray(c, dtype=float) for c in config["center_points"]]
    else:
        n_centers = int(config.get("centers", 10))
        rng = seeded_rng(seed, 10)
        angles = 2 * np.pi * rng.uniform(size=n_centers)
        mags = rng.uniform(0.6, 1.4, size=n_centers)
        centers = [np.array([m * np.cos(a), m * np.sin(a)]) for m, a in zip(mags, angles)]
    if "radii_list" in config:
        radii = [float(r) for r in config["radii_list"]]
    else:
        radii = np.linspace(0.02, 0.2, int(config.get("radii", 10)))
    samples = ahlfors_sampler(f, centers, radii, n_samples=N, seed=seed)
    worst = max(s.ratio for s in samples)
    margin = max(s.ratio - (1.0 + s.ratio_ci) for s in samples)
    passed = all(s.ratio <= 1.0 + s.ratio_ci for s in samples)
    metrics = {
        "n_balls": len(samples),
        "max_ratio": worst,
        "worst_margin": margin,
        "rows": [s.to_json() for s in samples],
    }
    return passed, metrics, {"bound": "1 + 3 sigma"}, 0


def _synthetic_map(d: int, rho: float = 0.5) -> MultiValuedMap:
    box = Box([-1.0, -1.0], [1.0, 1.0])
    if d == 2:
        dirs = [np.array([1.0, 0.0]), np.array([-1.0, 0.0])]
    else:
        dirs = [np.array([np.cos(2 * np.pi * j / d), np.sin(2 * np.pi * j / d)]) for j in range(d)]

    def ev(x):
        c = np.array([x[0], 0.5 * x[1]])
        s = max(0.0, float(x @ x) - rho**2)
        return AlmgrenPoint.from_points([c + s * u for u in dirs])

    return MultiValuedMap(domain=box, m=2, n=2, d=d, evaluate=ev)


def _check_interp(config, seed):
    ds = config.get("ds", [2, 3])
    eps = float(config.get("eps", 0.1))
    n_pairs = int(config.get("pairs", 10_000))
    tol = float(config.get("tol", 1e-6))
    rng = seeded_rng(seed, 11)
    rows = []
    passed = True
    for d in ds:
        F = _synthetic_map(int(d))
        X = F.domain.sample(rng, n_pairs)
        Y = F.domain.sample(rng, n_pairs)
        lips = [
            distance_value(F(a), F(b)) / np.linalg.norm(a - b)
            for a, b in zip(X, Y)
            if np.linalg.norm(a - b) > 1e-12
        ]
        L = float(max(lips)) * 1.05
        F.lipschitz_bound = L
        G, info = interpolate_feps(F, eps, cloud_size=int(config.get("cloud", 10_000)), seed=seed)
        lip_eps = max(
            distance_value(G(a), G(b)) / np.linalg.norm(a - b)
            for a, b in zip(X, Y)
            if np.linalg.norm(a - b) > 1e-12
        )
        dev = max(distance_value(G(x), F(x)) for x in X)
        ok_lip = lip_eps <= (3 + 2 * d) * L * (1 + tol)
        ok_dev = dev <= 2 * L * eps * (1 + tol)
        # on the coincidence set the interpolated map is purely diagonal
        members = [x for x in X[:2000] if distance_to_diagonal(F(x)) < eps]
        ok_diag = all(len(G(x).weights) == 1 for x in members[:200])
        rows.append(
            {
                "d": d,
                "L": L,
                "lip_feps": float(lip_eps),
                "lip_bound": (3 + 2 * d) * L,
                "sup_dev": float(dev),
                "dev_bound": 2 * L * eps,
                "member_fraction": info["member_fraction"],
                "diagonal_on_members": ok_diag,
            }
        )
        passed = passed and ok_lip and ok_dev and ok_diag
    return passed, {"rows": rows, "eps": eps}, {"lip_factor": "3+2d", "dev_factor": "2L*eps", "tol": tol}, 0


def _check_preimage_measure(config, seed):
    from .covers import preimage_measure_check

    f = _map_from_config(config)
    y0 = np.asarray(config.get("center_y", [1.0, 0.0]), dtype=float)
    r = float(config.get("radius", 0.3))
    z = minv(f, y0)
    dom = Box(*config.get("domain_box", ([-2.0, -2.0], [2.0, 2.0])))
    img = Box(*config.get("image_box", ([0.2, -0.8], [1.8, 0.8])))
    rep = preimage_measure_check(
        f, z, r, dom, img, n_samples=int(config.get("samples", 100_000)), seed=seed
    )
    if not rep.get("ok", False):
        return False, rep, {}, 0
    passed = rep["ratio"] <= f.degree + 3.0 * rep["ratio_sd"]
    metrics = {k: rep[k] for k in ("lhs_measure", "rhs_measure", "ratio", "ratio_sd")}
    return passed, metrics, {"bound": f.degree, "ci": "3 sigma"}, 0


def _check_monodromy(config, seed):
    f = _map_from_config({"map": config.get("map", {"map": "power", "k": 2})})

    def gamma(t):
        return np.array([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)])

    lp = lift_path(f, gamma, initial_steps=int(config.get("steps", 256)))
    perm = lp.monodromy()
    closed_gap = distance_value(minv(f, gamma(0.0)), minv(f, gamma(1.0)))
    nontrivial = perm is not None and not np.array_equal(perm, np.arange(f.degree))
    passed = nontrivial and closed_gap <= 1e-12
    metrics = {
        "permutation": None if perm is None else perm.tolist(),
        "closed_loop_gap": closed_gap,
        "max_jump": lp.max_jump,
        "steps": int(len(lp.ts)),
    }
    return passed, metrics, {"closed_gap_tol": 1e-12}, 0


def _check_metric_qc(config, seed):
    f = _map_from_config(config)
    y0 = np.asarray(config.get("y", [1.0, 0.0]), dtype=float)
    radii = config.get("radii", [0.1, 0.05, 0.02])
    rep = metric_qc_check(f, y0, radii)
    return rep["pass"], {"rows": rep["rows"]}, {"slack": 1e-9}, 0


# ---------------------------------------------------------------------------
# registry


CHECKS = {
    "metric-oracle": ("assignment-metric-oracle", _check_metric_oracle),
    "metric-axioms": ("assignment-metric-axioms", _check_metric_axioms),
    "barycenter-lipschitz": ("barycenter-lipschitz", _check_barycenter_lipschitz),
    "comass": ("natural-form-comass", _check_comass),
    "invariant-projection": ("invariant-projection", _check_invariant_projection),
    "split-pullback": ("split-pullback-product", _check_split_pullback),
    "qr-curve": ("qr-curve-bound", _check_qr_curve),
    "stokes": ("weak-stokes", _check_stokes),
    "upper-gradient": ("upper-gradient-sandwich", _check_upper_gradient),
    "area": ("area-formula", _check_area),
    "energy": ("inverse-energy-bound", _check_energy),
    "gen-inverse": ("generalized-inverse-root-sum", _check_gen_inverse),
    "modulus": ("ring-modulus", _check_modulus),
    "geom-qc": ("modulus-two-sided", _check_geom_qc),
    "ahlfors": ("ahlfors-upper-bound", _check_ahlfors),
    "interp": ("lipschitz-interpolation", _check_interp),
    "preimage-measure": ("preimage-measure-bound", _check_preimage_measure),
    "monodromy": ("monodromy-loop", _check_monodromy),
    "metric-qc": ("metric-qc-bound", _check_metric_qc),
}


def run_check(name: str, config: dict, seed: int = 0) -> ReportRecord:
    """Run a named check and wrap the outcome in a report record."""
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; known: {sorted(CHECKS)}")
    claim_id, fn = CHECKS[name]
    (passed, metrics, thresholds, excluded), timing = timed(fn, config, seed)
    return ReportRecord(
        check=name,
        claim_id=claim_id,
        config=config,
        seed=seed,
        passed=bool(passed),
        metrics=metrics,
        thresholds=thresholds,
        excluded=int(excluded),
        timing=timing,
    )
