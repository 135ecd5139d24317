"""Explicit proper branched covers with exact oracles and their multi-valued inverses.

The catalog: complex polynomials (roots via companion-matrix eigenvalues),
planar power maps z -> z^k, the 3D winding map (r, theta, z) -> (r, k theta, z),
and affine precompositions of these.  Every catalog map carries evaluation,
differential, Jacobian, fiber (with local indices) and exact distortion
constants, which is what the verifiers consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .almgren import AlmgrenPoint


class CoverError(ValueError):
    """Bad query against a branched-cover oracle (e.g. point outside the image)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (root solving, singular fiber, step underflow)."""


class LiftError(NumericalError):
    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


# ---------------------------------------------------------------------------
# small matrix helpers


def op_norm(M: np.ndarray) -> float:
    """Operator (spectral) norm; closed form for 2x2."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (2, 2):
        a = M[0, 0] ** 2 + M[1, 0] ** 2
        c = M[0, 1] ** 2 + M[1, 1] ** 2
        b = M[0, 0] * M[0, 1] + M[1, 0] * M[1, 1]
        disc = np.sqrt(max(((a - c) / 2) ** 2 + b * b, 0.0))
        return float(np.sqrt(max((a + c) / 2 + disc, 0.0)))
    return float(np.linalg.svd(M, compute_uv=False)[0])


def min_singular(M: np.ndarray) -> float:
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (2, 2):
        a = M[0, 0] ** 2 + M[1, 0] ** 2
        c = M[0, 1] ** 2 + M[1, 1] ** 2
        b = M[0, 0] * M[0, 1] + M[1, 0] * M[1, 1]
        disc = np.sqrt(max(((a - c) / 2) ** 2 + b * b, 0.0))
        return float(np.sqrt(max((a + c) / 2 - disc, 0.0)))
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def _conformal_matrix(w: complex) -> np.ndarray:
    """The real 2x2 matrix of multiplication by w."""
    return np.array([[w.real, -w.imag], [w.imag, w.real]])


# ---------------------------------------------------------------------------
# the cover description and its oracles


@dataclass
class BranchedCoverSpec:
    """A proper branched cover f with point oracles.

    ``fiber(y)`` returns (locations (m, n), weights (m,)) with local indices
    as weights; properness and the stated degree are guaranteed by
    construction of the catalog maps, not re-checked.
    """

    name: str
    n: int
    degree: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    differential: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], float]
    fiber: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    K_I: float
    K_O: float
    branch_value_distance: Callable[[np.ndarray], float]
    contains_image: Callable[[np.ndarray], bool]
    spec: dict = field(default_factory=dict)
    # optional fast paths / extras
    fiber_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    branch_diff_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    normal_neighborhood_boundary: Optional[Callable] = None

    def __post_init__(self):
        if self.degree < 1:
            raise CoverError("degree must be >= 1")


def minv(f: BranchedCoverSpec, y) -> AlmgrenPoint:
    """The fiber over y counted with local indices, as an unordered tuple."""
    y = np.asarray(y, dtype=np.float64).reshape(f.n)
    if not f.contains_image(y):
        raise CoverError(f"{y.tolist()} is outside the image of {f.name}")
    locs, ws = f.fiber(y)
    p = AlmgrenPoint.from_points(locs, ws)
    if p.d != f.degree:
        raise NumericalError(
            f"fiber weights sum to {p.d}, expected degree {f.degree} (root clustering failed)"
        )
    return p


def local_index(f: BranchedCoverSpec, x) -> int:
    """Multiplicity with which f covers near x (1 off the branch set)."""
    x = np.asarray(x, dtype=np.float64).reshape(f.n)
    y = f.evaluate(x)
    locs, ws = f.fiber(y)
    diff = locs - x
    i = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
    return int(ws[i])


def push_forward(f: BranchedCoverSpec, g: Callable[[np.ndarray], float], y) -> float:
    """Index-weighted sum of g over the fiber."""
    p = minv(f, y)
    return float(sum(int(w) * g(loc) for loc, w in zip(p.locations, p.weights)))


def h_function(f: BranchedCoverSpec, y) -> float:
    """sqrt of the index-weighted sum of ||Df||^-2 over the fiber."""
    p = minv(f, y)
    total = 0.0
    for loc, w in zip(p.locations, p.weights):
        s = op_norm(f.differential(loc))
        if s <= 1e-13:
            raise NumericalError(f"fiber of {f.name} at {np.asarray(y).tolist()} meets a critical point")
        total += int(w) / (s * s)
    return float(np.sqrt(total))


def branch_differentials(f: BranchedCoverSpec, y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Expanded fiber locations, their local indices, and the branch differentials.

    Returns (X (d, n), idx (d,), L (d, n, n)) where X = the expanded fiber,
    idx[j] = local index of the cluster X[j] belongs to, and
    L[j] = Df(X[j])^{-1} is the differential of the local inverse branch
    through X[j] (inverse function theorem).  Rows are repeated at fiber
    points of index > 1 so frame sums always have d terms; only meaningful
    off the branch set.
    """
    p = minv(f, y)
    X = p.expand()  # np.repeat of the lex-sorted merged locations
    L = np.empty((p.d, f.n, f.n))
    idx = np.repeat(p.weights, p.weights)
    j = 0
    for loc, w in zip(p.locations, p.weights):
        D = f.differential(loc)
        det = np.linalg.det(D)
        if abs(det) <= 1e-13:
            raise NumericalError(f"branch differential singular at fiber point {loc.tolist()}")
        Dinv = np.linalg.inv(D)
        for _ in range(int(w)):
            L[j] = Dinv
            j += 1
    return X, idx, L


def minv_metric_jacobian(f: BranchedCoverSpec, y) -> float:
    """Metric Jacobian of the multi-valued inverse at y.

    sqrt of the Gram determinant of the stacked branch differentials, i.e.
    sqrt(det(sum_j L_j^T L_j)).  For conformal branches this equals
    sum_j |g_j'|^2 = H(y)^2.
    """
    X, _, L = branch_differentials(f, y)
    G = np.einsum("jki,jkl->il", L, L)
    det = float(np.linalg.det(G))
    return float(np.sqrt(max(det, 0.0)))


# ---------------------------------------------------------------------------
# catalog maps


def _poly_eval(coeffs: np.ndarray, z: complex) -> complex:
    out = 0j
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def _poly_der(coeffs: np.ndarray) -> np.ndarray:
    return np.array([k * coeffs[k] for k in range(1, len(coeffs))], dtype=np.complex128)


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of sum_k coeffs[k] z^k via companion-matrix eigenvalues."""
    c = np.asarray(coeffs, dtype=np.complex128)
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    m = len(c) - 1
    if m < 1:
        raise NumericalError("constant polynomial has no roots")
    monic = c / c[-1]
    C = np.zeros((m, m), dtype=np.complex128)
    if m > 1:
        C[1:, :-1] = np.eye(m - 1)
    C[:, -1] = -monic[:-1]
    return np.linalg.eigvals(C)


def _cluster_roots(roots: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Union-find clustering of near-coincident roots; returns (centers, sizes)."""
    m = len(roots)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(roots[i] - roots[j]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    centers = np.array([roots[idx].mean() for idx in groups.values()])
    sizes = np.array([len(idx) for idx in groups.values()], dtype=np.int64)
    return centers, sizes


def complex_polynomial(coeffs) -> BranchedCoverSpec:
    """z -> sum coeffs[k] z^k as a proper cover of the plane, degree = deg."""
    c = np.array(
        [complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in coeffs],
        dtype=np.complex128,
    )
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    deg = len(c) - 1
    if deg < 1:
        raise CoverError("polynomial must be nonconstant")
    dc = _poly_der(c)

    # critical values: p at roots of p'
    if len(dc) > 1 or (len(dc) == 1 and deg > 1):
        crit = _companion_roots(dc) if deg > 1 else np.array([], dtype=np.complex128)
    else:
        crit = np.array([], dtype=np.complex128)
    crit_values = np.array([_poly_eval(c, z) for z in crit]) if len(crit) else crit

    def evaluate(x):
        z = complex(x[0], x[1])
        w = _poly_eval(c, z)
        return np.array([w.real, w.imag])

    def differential(x):
        z = complex(x[0], x[1])
        return _conformal_matrix(_poly_eval(dc, z))

    def jacobian(x):
        z = complex(x[0], x[1])
        return abs(_poly_eval(dc, z)) ** 2

    def fiber(y):
        w = complex(y[0], y[1])
        shifted = c.copy()
        shifted[0] -= w
        roots = _companion_roots(shifted)
        # Newton polish for well-separated roots
        for _ in range(2):
            pv = np.array([_poly_eval(shifted, z) for z in roots])
            dv = np.array([_poly_eval(dc, z) for z in roots])
            ok = np.abs(dv) > 1e-8 * (1 + np.abs(roots))
            roots[ok] = roots[ok] - pv[ok] / dv[ok]
        centers, sizes = _cluster_roots(roots, 1e-7 * (1.0 + abs(w)))
        locs = np.stack([centers.real, centers.imag], axis=1)
        return locs, sizes

    def branch_dist(y):
        if len(crit_values) == 0:
            return np.inf
        w = complex(y[0], y[1])
        return float(np.min(np.abs(crit_values - w)))

    return BranchedCoverSpec(
        name=f"poly(deg={deg})",
        n=2,
        degree=deg,
        evaluate=evaluate,
        differential=differential,
        jacobian=jacobian,
        fiber=fiber,
        K_I=1.0,
        K_O=1.0,
        branch_value_distance=branch_dist,
        contains_image=lambda y: True,
        spec={"map": "poly", "coeffs": [[v.real, v.imag] for v in c]},
    )


def planar_power(k: int) -> BranchedCoverSpec:
    """z -> z^k with explicit k-th-root fibers and normal neighborhoods."""
    if k < 1:
        raise CoverError("power must be >= 1")

    def evaluate(x):
        z = complex(x[0], x[1]) ** k
        return np.array([z.real, z.imag])

    def differential(x):
        z = complex(x[0], x[1])
        return _conformal_matrix(k * z ** (k - 1))

    def jacobian(x):
        z = complex(x[0], x[1])
        return (k * abs(z) ** (k - 1)) ** 2

    def fiber(y):
        w = complex(y[0], y[1])
        if w == 0:
            return np.zeros((1, 2)), np.array([k], dtype=np.int64)
        r = abs(w) ** (1.0 / k)
        t0 = np.angle(w) / k
        ang = t0 + 2 * np.pi * np.arange(k) / k
        locs = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
        return locs, np.ones(k, dtype=np.int64)

    def fiber_batch(ys):
        """Vectorized fibers for points avoiding the branch value 0: (m, k, 2)."""
        w = ys[:, 0] + 1j * ys[:, 1]
        r = np.abs(w) ** (1.0 / k)
        t0 = np.angle(w) / k
        ang = t0[:, None] + 2 * np.pi * np.arange(k)[None, :] / k
        return np.stack([r[:, None] * np.cos(ang), r[:, None] * np.sin(ang)], axis=2)

    def branch_diff_batch(ys):
        """Vectorized branch differentials (m, k, 2, 2) off the branch value."""
        roots = fiber_batch(ys)
        z = roots[..., 0] + 1j * roots[..., 1]
        g = 1.0 / (k * z ** (k - 1))
        out = np.empty(roots.shape[:2] + (2, 2))
        out[..., 0, 0] = g.real
        out[..., 0, 1] = -g.imag
        out[..., 1, 0] = g.imag
        out[..., 1, 1] = g.real
        return out

    def nn_boundary(x, r, samples=256):
        """Boundary polyline of the normal neighborhood U(x, r), r < |x|^k."""
        z = complex(x[0], x[1])
        y0 = z**k
        if abs(y0) <= r:
            raise CoverError("normal neighborhood requires r < |f(x)|")
        phi = np.linspace(0, 2 * np.pi, samples, endpoint=False)
        ys = y0 + r * np.exp(1j * phi)
        # continuous branch of the k-th root through z
        w = np.abs(ys) ** (1.0 / k) * np.exp(1j * np.angle(ys) / k)
        rot = np.exp(2j * np.pi * np.arange(k) / k)
        cand = w[:, None] * rot[None, :]
        pick = np.argmin(np.abs(cand - z), axis=1)
        sel = cand[np.arange(samples), pick]
        return np.stack([sel.real, sel.imag], axis=1)

    return BranchedCoverSpec(
        name=f"power(k={k})",
        n=2,
        degree=k,
        evaluate=evaluate,
        differential=differential,
        jacobian=jacobian,
        fiber=fiber,
        K_I=1.0,
        K_O=1.0,
        branch_value_distance=lambda y: float(np.hypot(y[0], y[1])) if k > 1 else np.inf,
        contains_image=lambda y: True,
        spec={"map": "power", "k": k},
        fiber_batch=fiber_batch,
        branch_diff_batch=branch_diff_batch,
        normal_neighborhood_boundary=nn_boundary,
    )


def winding_map_3d(k: int, r_max: float = 2.0, z_half: float = 1.0) -> BranchedCoverSpec:
    """(r, theta, z) -> (r, k theta, z) on a solid cylinder; degree k, branch set = axis."""
    if k < 1:
        raise CoverError("winding number must be >= 1")

    def evaluate(x):
        w = complex(x[0], x[1])
        r = abs(w)
        if r == 0:
            return np.array([0.0, 0.0, x[2]])
        out = w**k / r ** (k - 1)
        return np.array([out.real, out.imag, x[2]])

    def differential(x):
        w = complex(x[0], x[1])
        r = abs(w)
        if r == 0:
            raise NumericalError("differential undefined on the branch axis")
        t = np.angle(w)
        ct, st = np.cos(t), np.sin(t)
        ckt, skt = np.cos(k * t), np.sin(k * t)
        Rk = np.array([[ckt, -skt], [skt, ckt]])
        Rt = np.array([[ct, st], [-st, ct]])
        M = Rk @ np.diag([1.0, float(k)]) @ Rt
        out = np.eye(3)
        out[:2, :2] = M
        return out

    def jacobian(x):
        return float(k)

    def fiber(y):
        w = complex(y[0], y[1])
        if w == 0:
            return np.array([[0.0, 0.0, y[2]]]), np.array([k], dtype=np.int64)
        r = abs(w)
        ang = np.angle(w) / k + 2 * np.pi * np.arange(k) / k
        locs = np.stack([r * np.cos(ang), r * np.sin(ang), np.full(k, y[2])], axis=1)
        return locs, np.ones(k, dtype=np.int64)

    def contains_image(y):
        r = np.hypot(y[0], y[1])
        return bool(r <= r_max and abs(y[2]) <= z_half)

    return BranchedCoverSpec(
        name=f"wind3(k={k})",
        n=3,
        degree=k,
        evaluate=evaluate,
        differential=differential,
        jacobian=jacobian,
        fiber=fiber,
        K_I=float(k),
        K_O=float(k) ** 2,
        branch_value_distance=lambda y: float(np.hypot(y[0], y[1])) if k > 1 else np.inf,
        contains_image=contains_image,
        spec={"map": "wind3", "k": k},
    )


def precomposed(affine: np.ndarray, base: BranchedCoverSpec, shift=None) -> BranchedCoverSpec:
    """base(A x + b): same degree; distortion of A times that of the base.

    The stored K_I/K_O are exact when the base is conformal in the plane
    (the catalog polynomials and powers) and multiplicative upper bounds
    otherwise.
    """
    A = np.asarray(affine, dtype=np.float64)
    n = base.n
    if A.shape != (n, n):
        raise CoverError("affine matrix must match the base dimension")
    if np.linalg.det(A) <= 0:
        raise CoverError("affine part must be orientation-preserving and invertible")
    b = np.zeros(n) if shift is None else np.asarray(shift, dtype=np.float64)
    Ainv = np.linalg.inv(A)
    sv = np.linalg.svd(A, compute_uv=False)
    lam = float(sv[0] / sv[-1])

    def evaluate(x):
        return base.evaluate(A @ np.asarray(x, dtype=np.float64) + b)

    def differential(x):
        return base.differential(A @ np.asarray(x, dtype=np.float64) + b) @ A

    def jacobian(x):
        return float(base.jacobian(A @ np.asarray(x, dtype=np.float64) + b) * np.linalg.det(A))

    def fiber(y):
        locs, ws = base.fiber(y)
        return (locs - b) @ Ainv.T, ws

    return BranchedCoverSpec(
        name=f"precomposed({base.name}, lambda={lam:.3g})",
        n=n,
        degree=base.degree,
        evaluate=evaluate,
        differential=differential,
        jacobian=jacobian,
        fiber=fiber,
        K_I=base.K_I * lam,
        K_O=base.K_O * lam,
        branch_value_distance=base.branch_value_distance,
        contains_image=base.contains_image,
        spec={"map": "precompose", "affine": A.tolist(), "shift": b.tolist(), "base": base.spec},
    )


def identity_map() -> BranchedCoverSpec:
    return planar_power(1)


def build_map(spec: dict) -> BranchedCoverSpec:
    """Construct a catalog map from its JSON description."""
    if not isinstance(spec, dict) or "map" not in spec:
        raise CoverError(f"malformed map spec: {spec!r}")
    kind = spec["map"]
    try:
        if kind == "poly":
            return complex_polynomial(spec["coeffs"])
        if kind == "power":
            return planar_power(int(spec["k"]))
        if kind == "wind3":
            return winding_map_3d(
                int(spec["k"]),
                r_max=float(spec.get("r_max", 2.0)),
                z_half=float(spec.get("z_half", 1.0)),
            )
        if kind == "precompose":
            base = build_map(spec["base"])
            return precomposed(np.array(spec["affine"], dtype=float), base, spec.get("shift"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CoverError):
            raise
        raise CoverError(f"malformed map spec {spec!r}: {exc}") from exc
    raise CoverError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------
# path lifting


@dataclass
class LiftedPath:
    """Total lifts of a sampled base path, with multiplicity-consistent labels."""

    ts: np.ndarray  # (m,)
    base: np.ndarray  # (m, n)
    lifts: np.ndarray  # (m, d, n); row labels are continuation-consistent
    max_jump: float
    branch_crossings: list[float]

    def monodromy(self, tol: float = 1e-9) -> Optional[np.ndarray]:
        """Permutation matching final lift labels to initial ones for closed loops."""
        if np.linalg.norm(self.base[-1] - self.base[0]) > tol:
            return None
        start, end = self.lifts[0], self.lifts[-1]
        diff = end[:, None, :] - start[None, :, :]
        cost = np.einsum("ijk,ijk->ij", diff, diff)
        _, perm = kernels.solve_assignment(cost)
        return perm


def _distinct_gap(X: np.ndarray, merge_tol: float) -> float:
    """Min pairwise distance among cluster representatives; inf if one cluster."""
    d = len(X)
    dists = []
    for i in range(d):
        for j in range(i + 1, d):
            r = float(np.linalg.norm(X[i] - X[j]))
            if r > merge_tol:
                dists.append(r)
    return min(dists) if dists else np.inf


def lift_path(
    f: BranchedCoverSpec,
    gamma: Callable[[float], np.ndarray],
    t0: float = 0.0,
    t1: float = 1.0,
    initial_steps: int = 128,
    jump_factor: float = 0.5,
    h_min: float = 1e-8,
    merge_tol: float = 1e-6,
) -> LiftedPath:
    """Track the d total lifts of a path by predictor-corrector continuation.

    At each step the fiber of the new base point is matched to the current
    lift positions by optimal assignment; the step is halved when the
    matched jump exceeds ``jump_factor`` times the smallest distinct fiber
    gap.  When the fiber collapses below ``merge_tol`` the matching is done
    on merged clusters and the passage is recorded as a branch crossing.
    """
    base_h = (t1 - t0) / initial_steps
    t = t0
    y = np.asarray(gamma(t0), dtype=np.float64)
    X = minv(f, y).expand()
    ts = [t0]
    base_pts = [y]
    traj = [X]
    max_jump = 0.0
    crossings: list[float] = []

    h = base_h
    while t < t1 - 1e-15:
        h_try = min(h, t1 - t)
        while True:
            t_new = t + h_try
            y_new = np.asarray(gamma(t_new), dtype=np.float64)
            F = minv(f, y_new).expand()
            diff = X[:, None, :] - F[None, :, :]
            cost = np.einsum("ijk,ijk->ij", diff, diff)
            _, perm = kernels.solve_assignment(cost)
            jumps = np.linalg.norm(X - F[perm], axis=1)
            gap = _distinct_gap(X, merge_tol)
            if np.max(jumps) <= jump_factor * gap:
                break
            if h_try > h_min:
                h_try *= 0.5
                continue
            # merged passage through a near-collision of lifts
            gap_new = _distinct_gap(F, merge_tol)
            scale = max(np.max(np.linalg.norm(X, axis=1)), 1.0)
            if min(gap, gap_new) <= merge_tol * scale * 10 or np.max(jumps) <= max(gap, gap_new):
                crossings.append(t_new)
                break
            raise LiftError(
                f"step underflow lifting through t={t_new:.6g} (fiber collision)", t_new
            )
        X = F[perm]
        max_jump = max(max_jump, float(np.max(jumps)))
        t = t_new
        ts.append(t)
        base_pts.append(y_new)
        traj.append(X)
        h = min(h * 2.0, base_h) if h_try == h else h_try

    return LiftedPath(
        ts=np.array(ts),
        base=np.array(base_pts),
        lifts=np.array(traj),
        max_jump=max_jump,
        branch_crossings=crossings,
    )


def polyline(points: np.ndarray) -> Callable[[float], np.ndarray]:
    """Arclength-ish parametrization of a polyline as a callable on [0, 1]."""
    pts = np.asarray(points, dtype=np.float64)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0:
        return lambda t: pts[0]

    def gamma(t: float) -> np.ndarray:
        s = np.clip(t, 0.0, 1.0) * total
        i = int(np.searchsorted(cum, s, side="right")) - 1
        i = min(max(i, 0), len(seg) - 1)
        u = (s - cum[i]) / seg[i] if seg[i] > 0 else 0.0
        return pts[i] * (1 - u) + pts[i + 1] * u

    return gamma


# ---------------------------------------------------------------------------
# preimage measure comparison


def preimage_measure_check(
    f: BranchedCoverSpec,
    center: AlmgrenPoint,
    radius: float,
    domain_region,
    image_region,
    n_samples: int = 100_000,
    seed: int = 0,
) -> dict:
    """Monte Carlo comparison of |(minv o f)^{-1} E| against the Hausdorff
    measure of the metric ball E in the image of the multi-valued inverse.

    The Hausdorff side is computed through the area formula (density =
    metric Jacobian of the inverse).  Returns both estimates, their CIs and
    the ratio.
    """
    if n_samples < 100:
        return {"ok": False, "reason": "sample budget too small", "n_samples": n_samples}
    rng = np.random.default_rng(np.random.SeedSequence([seed, 101]))
    zC = center.expand()

    # LHS: Lebesgue measure of {x in domain : d_A(minv(f(x)), z) < r}
    xs = domain_region.sample(rng, n_samples)
    fibers = np.empty((n_samples, f.degree, f.n))
    for i, x in enumerate(xs):
        fibers[i] = minv(f, f.evaluate(x)).expand()
    ind = kernels.dist_sq_one_to_many(zC, fibers) < radius**2
    vol = domain_region.volume()
    p_hat = ind.mean()
    lhs = vol * p_hat
    lhs_sd = vol * float(np.sqrt(max(p_hat * (1 - p_hat), 0.0) / n_samples))

    # RHS: integral of the indicator times the metric Jacobian over the image
    ys = image_region.sample(rng, n_samples)
    vals = np.zeros(n_samples)
    for i, y in enumerate(ys):
        fib = minv(f, y)
        if kernels.dist_sq(fib.expand(), zC) < radius**2:
            vals[i] = minv_metric_jacobian(f, y)
    rhs = image_region.volume() * float(vals.mean())
    rhs_sd = image_region.volume() * float(vals.std(ddof=1) / np.sqrt(n_samples))

    ratio = lhs / rhs if rhs > 0 else np.inf
    rel_sd = (
        abs(ratio) * np.sqrt((lhs_sd / lhs) ** 2 + (rhs_sd / rhs) ** 2)
        if lhs > 0 and rhs > 0
        else np.inf
    )
    return {
        "ok": True,
        "lhs_measure": lhs,
        "lhs_sd": lhs_sd,
        "rhs_measure": rhs,
        "rhs_sd": rhs_sd,
        "ratio": ratio,
        "ratio_sd": rel_sd,
        "degree": f.degree,
        "n_samples": n_samples,
    }
