"""Calculus of multi-valued maps into the unordered-tuple space.

Differentials are per-branch linear maps obtained either exactly (inverse
function theorem for inverses of covers, stored matrices for synthetic
affine maps) or by matching-based central differences.  The frame norm
|Df|^2 = sum_j ||L_j||^2 is the quantity used throughout the verifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .almgren import AlmgrenPoint, distance_to_diagonal, distance_value
from .covers import BranchedCoverSpec, NumericalError, branch_differentials, minv, op_norm
from .forms import KCovector, KForm


class PullbackError(ValueError):
    """Form/map mismatch: e.g. a non-invariant form against an undecomposed map."""


# ---------------------------------------------------------------------------
# multi-valued maps


@dataclass
class MultiValuedMap:
    """A map from an open region of R^m into the space of unordered d-tuples."""

    domain: object
    m: int
    n: int
    d: int
    evaluate: Callable[[np.ndarray], AlmgrenPoint]
    provenance: str = "synthetic-lipschitz"
    exact_branches: Optional[Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]] = None
    lipschitz_bound: Optional[float] = None
    cover: Optional[BranchedCoverSpec] = None
    info: dict = field(default_factory=dict)

    def __call__(self, x) -> AlmgrenPoint:
        return self.evaluate(np.asarray(x, dtype=np.float64).reshape(self.m))


def from_cover(f: BranchedCoverSpec, domain) -> MultiValuedMap:
    """The multi-valued inverse of a catalog cover as a map on image coordinates."""

    def branches(y: np.ndarray):
        X, _, L = branch_differentials(f, y)
        return X, L

    return MultiValuedMap(
        domain=domain,
        m=f.n,
        n=f.n,
        d=f.degree,
        evaluate=lambda y: minv(f, y),
        provenance="inverse-of-cover",
        exact_branches=branches,
        cover=f,
    )


def from_affine_branches(branches: list[tuple[np.ndarray, np.ndarray]], domain, m: int) -> MultiValuedMap:
    """[[A_1 x + b_1, ..., A_d x + b_d]] with exact constant branch differentials."""
    As = [np.asarray(A, dtype=np.float64) for A, _ in branches]
    bs = [np.asarray(b, dtype=np.float64) for _, b in branches]
    n = As[0].shape[0]
    if any(A.shape != (n, m) for A in As) or any(b.shape != (n,) for b in bs):
        raise ValueError("inconsistent branch shapes")
    L = np.stack(As)
    lip = float(np.sqrt(sum(op_norm(A) ** 2 for A in As)))

    def ev(x: np.ndarray) -> AlmgrenPoint:
        return AlmgrenPoint.from_points([A @ x + b for A, b in zip(As, bs)])

    def branches_fn(x: np.ndarray):
        vals = np.stack([A @ x + b for A, b in zip(As, bs)])
        return vals, L.copy()

    return MultiValuedMap(
        domain=domain,
        m=m,
        n=n,
        d=len(As),
        evaluate=ev,
        provenance="synthetic-lipschitz",
        exact_branches=branches_fn,
        lipschitz_bound=lip,
    )


@dataclass
class MVDifferential:
    """Branch values and branch linear maps at a base point."""

    x0: np.ndarray
    values: np.ndarray  # (d, n)
    L: np.ndarray  # (d, n, m)
    ambiguous_matching: bool = False
    on_singular_set: bool = False

    @property
    def frame_norm(self) -> float:
        """|Df| = sqrt(sum of squared branch operator norms)."""
        return float(np.sqrt(sum(op_norm(Lj) ** 2 for Lj in self.L)))

    def stacked(self) -> np.ndarray:
        """The (d*n, m) matrix sending v to the tuple of branch images."""
        d, n, m = self.L.shape
        return self.L.reshape(d * n, m)

    def metric_jacobian(self) -> float:
        """sqrt of the Gram determinant of the stacked frame (m = n case)."""
        T = self.stacked()
        G = T.T @ T
        return float(np.sqrt(max(np.linalg.det(G), 0.0)))


def _group_coincident(values: np.ndarray, tol: float) -> list[list[int]]:
    d = len(values)
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            if np.linalg.norm(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _enforce_shared_differentials(values: np.ndarray, L: np.ndarray, tol: float) -> bool:
    """Average the L's over coincident branches (differentiability condition (ii))."""
    touched = False
    for grp in _group_coincident(values, tol):
        if len(grp) > 1:
            L[grp] = L[grp].mean(axis=0)
            touched = True
    return touched


def _match(base: np.ndarray, other: np.ndarray) -> tuple[np.ndarray, float]:
    diff = base[:, None, :] - other[None, :, :]
    cost = np.einsum("ijk,ijk->ij", diff, diff)
    total, perm = kernels.solve_assignment(cost)
    # two-swap slack as an optimality-ambiguity proxy
    d = len(base)
    slack = np.inf
    for i in range(d):
        for j in range(i + 1, d):
            delta = (
                cost[i, perm[j]] + cost[j, perm[i]] - cost[i, perm[i]] - cost[j, perm[j]]
            )
            slack = min(slack, delta)
    return perm, float(slack)


def differential(F: MultiValuedMap, x, h: float = 1e-5) -> MVDifferential:
    """Branch differentials at x: exact when available, else matched central FD."""
    x = np.asarray(x, dtype=np.float64).reshape(F.m)
    scale = 1.0
    if F.exact_branches is not None:
        values, L = F.exact_branches(x)
        values = np.asarray(values, dtype=np.float64)
        L = np.asarray(L, dtype=np.float64).copy()
        tol = 1e-8 * (1.0 + float(np.max(np.abs(values))))
        on_sing = _enforce_shared_differentials(values, L, tol)
        return MVDifferential(x0=x, values=values, L=L, on_singular_set=on_sing)

    X = F(x).expand()
    d, n = X.shape
    L = np.zeros((d, n, F.m))
    ambiguous = False
    for i in range(F.m):
        e = np.zeros(F.m)
        e[i] = h
        Xp = F(x + e).expand()
        Xm = F(x - e).expand()
        pp, sp = _match(X, Xp)
        pm, sm = _match(X, Xm)
        if min(sp, sm) < 1e-12:
            ambiguous = True
        L[:, :, i] = (Xp[pp] - Xm[pm]) / (2.0 * h)
    tol = 1e-8 * (1.0 + float(np.max(np.abs(X))))
    on_sing = _enforce_shared_differentials(X, L, tol)
    return MVDifferential(
        x0=x, values=X, L=L, ambiguous_matching=ambiguous, on_singular_set=on_sing
    )


# ---------------------------------------------------------------------------
# pull-backs


@dataclass
class PullbackSample:
    x: np.ndarray
    covector: KCovector
    relabeling_deviation: float = 0.0


def _pullback_at(omega: KForm, values: np.ndarray, L: np.ndarray) -> KCovector:
    flat = values.reshape(-1)
    T = L.reshape(len(values) * values.shape[1], L.shape[2])
    return omega.at(flat).pullback_linear(T)


def _cov_max_dev(a: KCovector, b: KCovector) -> float:
    keys = set(a.coeffs) | set(b.coeffs)
    return max((abs(a.coeffs.get(k, 0.0) - b.coeffs.get(k, 0.0)) for k in keys), default=0.0)


def pullback(
    F: MultiValuedMap,
    omega: KForm,
    x,
    h: float = 1e-5,
    verify_relabelings: int = 2,
    rng: Optional[np.random.Generator] = None,
) -> PullbackSample:
    """(F*omega)_x = omega_{F(x)} o D_x F, well-defined by invariance.

    The computation picks an arbitrary branch labeling; with
    ``verify_relabelings`` > 0 it recomputes under random relabelings and
    records the maximum deviation (which must be at rounding level for
    invariant forms).
    """
    if omega.invariance != "full":
        raise PullbackError(
            "only fully invariant forms can be pulled back by an undecomposed map; "
            "split-invariant forms need an explicit pair"
        )
    if omega.n != F.n or omega.d != F.d:
        raise PullbackError("form and map have incompatible shapes")
    x = np.asarray(x, dtype=np.float64).reshape(F.m)
    diff = differential(F, x, h=h)
    cov = _pullback_at(omega, diff.values, diff.L)
    dev = 0.0
    if verify_relabelings > 0:
        rng = rng or np.random.default_rng(0)
        for _ in range(verify_relabelings):
            perm = rng.permutation(F.d)
            cov2 = _pullback_at(omega, diff.values[perm], diff.L[perm])
            dev = max(dev, _cov_max_dev(cov, cov2))
        if dev > 1e-10 * (1.0 + max(abs(c) for c in cov.coeffs.values()) if cov.coeffs else 1.0):
            raise NumericalError(f"pullback not labeling-invariant (deviation {dev:.3e})")
    return PullbackSample(x=x, covector=cov, relabeling_deviation=dev)


@dataclass
class MultiValuedPair:
    """An explicitly decomposed map [[f0, f1]], supporting split-invariant pullbacks."""

    f0: MultiValuedMap
    f1: MultiValuedMap

    def __post_init__(self):
        if self.f0.m != self.f1.m or self.f0.n != self.f1.n:
            raise ValueError("pair components live on different spaces")

    @property
    def d(self) -> int:
        return self.f0.d + self.f1.d

    def combined(self) -> MultiValuedMap:
        f0, f1 = self.f0, self.f1

        def ev(x: np.ndarray) -> AlmgrenPoint:
            p0, p1 = f0(x), f1(x)
            locs = np.concatenate([p0.expand(), p1.expand()])
            return AlmgrenPoint.from_points(locs)

        branches = None
        if f0.exact_branches is not None and f1.exact_branches is not None:

            def branches(x: np.ndarray):
                v0, L0 = f0.exact_branches(x)
                v1, L1 = f1.exact_branches(x)
                return np.concatenate([v0, v1]), np.concatenate([L0, L1])

        return MultiValuedMap(
            domain=f0.domain,
            m=f0.m,
            n=f0.n,
            d=self.d,
            evaluate=ev,
            provenance="synthetic-lipschitz",
            exact_branches=branches,
        )

    def pullback(
        self,
        omega: KForm,
        x,
        h: float = 1e-5,
        verify_relabelings: int = 2,
        rng: Optional[np.random.Generator] = None,
    ) -> PullbackSample:
        """Pull back a split-invariant (or fully invariant) form by the pair."""
        d0, d1 = self.f0.d, self.f1.d
        if omega.invariance not in ("full", ("split", d0, d1)):
            raise PullbackError(f"form invariance {omega.invariance!r} incompatible with pair ({d0},{d1})")
        x = np.asarray(x, dtype=np.float64).reshape(self.f0.m)
        D0 = differential(self.f0, x, h=h)
        D1 = differential(self.f1, x, h=h)
        values = np.concatenate([D0.values, D1.values])
        L = np.concatenate([D0.L, D1.L])
        cov = _pullback_at(omega, values, L)
        dev = 0.0
        if verify_relabelings > 0:
            rng = rng or np.random.default_rng(0)
            for _ in range(verify_relabelings):
                p0 = rng.permutation(d0)
                p1 = d0 + rng.permutation(d1)
                perm = np.concatenate([p0, p1])
                cov2 = _pullback_at(omega, values[perm], L[perm])
                dev = max(dev, _cov_max_dev(cov, cov2))
        return PullbackSample(x=x, covector=cov, relabeling_deviation=dev)


def hodge_star_top(alpha: KCovector) -> float:
    """Coefficient of a top-degree covector against the volume covector."""
    if alpha.degree != alpha.dim:
        raise ValueError(f"hodge star implemented for top degree only (k={alpha.degree}, m={alpha.dim})")
    return float(alpha.coeffs.get(tuple(range(alpha.dim)), 0.0))


def generalized_inverse(f: BranchedCoverSpec, y) -> np.ndarray:
    """Index-weighted sum of the fiber locations; equals d times the fiber barycenter."""
    p = minv(f, y)
    return np.asarray((p.weights[:, None] * p.locations).sum(axis=0), dtype=np.float64)


# ---------------------------------------------------------------------------
# the quasiregular-curve ratio check


def qr_curve_check(
    f: BranchedCoverSpec,
    region,
    n_samples: int = 10_000,
    seed: int = 0,
    margin_frac: float = 1e-3,
    tol: float = 1e-9,
) -> dict:
    """Sampled ratio |D minv f|^n / (d^{n/2-1} K_I * star(minv f)* omega_n).

    The natural n-form has unit comass, so the bound states ratio <= 1.
    Samples within ``margin_frac`` of the branch values (relative to the
    region diameter) are excluded and counted.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    ys = region.sample(rng, n_samples)
    margin = margin_frac * region.diameter()
    n, d = f.n, f.degree
    const = d ** (n / 2.0 - 1.0) * f.K_I

    keep = np.array([f.branch_value_distance(y) > margin for y in ys])
    ys_used = ys[keep]
    excluded = int((~keep).sum())

    ratios = np.empty(len(ys_used))
    if f.branch_diff_batch is not None and n == 2:
        L = f.branch_diff_batch(ys_used)  # (m, d, 2, 2)
        a = L[..., 0, 0] ** 2 + L[..., 1, 0] ** 2
        c = L[..., 0, 1] ** 2 + L[..., 1, 1] ** 2
        b = L[..., 0, 0] * L[..., 0, 1] + L[..., 1, 0] * L[..., 1, 1]
        disc = np.sqrt(np.maximum(((a - c) / 2) ** 2 + b * b, 0.0))
        opsq = (a + c) / 2 + disc
        frame_sq = opsq.sum(axis=1)
        dets = (L[..., 0, 0] * L[..., 1, 1] - L[..., 0, 1] * L[..., 1, 0]).sum(axis=1)
        ratios = frame_sq ** (n / 2.0) / (const * dets)
    else:
        for i, y in enumerate(ys_used):
            _, _, L = branch_differentials(f, y)
            frame_sq = sum(op_norm(Lj) ** 2 for Lj in L)
            star = float(sum(np.linalg.det(Lj) for Lj in L))
            ratios[i] = frame_sq ** (n / 2.0) / (const * star)

    spread = float(ratios.max() - ratios.min())
    if spread < 64 * np.finfo(float).eps * max(1.0, abs(float(ratios.max()))):
        pad = max(1e-12, abs(float(ratios[0])) * 1e-9)
        hist, edges = np.histogram(ratios, bins=32, range=(float(ratios[0]) - pad, float(ratios[0]) + pad))
    else:
        hist, edges = np.histogram(ratios, bins=32)
    return {
        "check": "qr-curve",
        "map": f.name,
        "n_samples": n_samples,
        "n_used": int(len(ys_used)),
        "excluded": excluded,
        "max_ratio": float(ratios.max()),
        "min_ratio": float(ratios.min()),
        "mean_ratio": float(ratios.mean()),
        "constant": const,
        "tol": tol,
        "pass": bool(ratios.max() <= 1.0 + tol),
        "histogram": {"counts": hist.tolist(), "edges": edges.tolist()},
    }


# ---------------------------------------------------------------------------
# weak Stokes verification


@dataclass
class BumpTestForm:
    """Compactly supported polynomial bump (degree-0 test form) on a box.

    phi = amp * prod_i (1 - u_i^2)^q with u the box-normalized coordinates;
    C^{q-1} on R^m, smooth inside the box, vanishing to order q on the
    boundary.  The gradient is analytic.
    """

    lo: np.ndarray
    hi: np.ndarray
    q: int = 3
    amp: float = 1.0

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=np.float64)
        self.hi = np.asarray(self.hi, dtype=np.float64)

    def _u(self, x: np.ndarray) -> np.ndarray:
        return (2.0 * x - (self.lo + self.hi)) / (self.hi - self.lo)

    def value(self, x: np.ndarray) -> float:
        u = self._u(np.asarray(x, dtype=np.float64))
        if np.any(np.abs(u) >= 1.0):
            return 0.0
        return float(self.amp * np.prod((1.0 - u * u) ** self.q))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        u = self._u(x)
        if np.any(np.abs(u) >= 1.0):
            return np.zeros_like(x)
        fac = (1.0 - u * u) ** self.q
        total = self.amp * np.prod(fac)
        grad = np.empty_like(x)
        for i in range(len(x)):
            dui = 2.0 / (self.hi[i] - self.lo[i])
            grad[i] = total / (1.0 - u[i] ** 2) * (-2.0 * self.q * u[i]) * dui
        return grad


def weak_stokes_check(
    F: MultiValuedMap,
    omega: KForm,
    alpha: BumpTestForm,
    orders: tuple[int, ...] = (16, 32, 64),
    fd_step: float = 1e-5,
    differential_cache: Optional[dict] = None,
) -> dict:
    """Quadrature comparison of int dalpha ^ F*omega with (-1)^{k+1} int alpha ^ F*(d omega).

    Implemented for scalar (degree-0) test forms, i.e. forms omega of degree
    m-1 on maps from R^m; top-degree closed forms degenerate to the 0 = 0
    identity and are reported as such.  Tensor Gauss-Legendre rules of the
    given orders are used on the support box of alpha; the discrepancy is
    reported per refinement level.
    """
    from .regions import Box, box_quadrature

    m = F.m
    k = omega.degree
    if k not in (m - 1, m):
        raise PullbackError("scalar test forms require deg(omega) in {m-1, m}")
    box = Box(alpha.lo, alpha.hi)
    domega = None
    if omega.analytic_derivative is None and not omega.is_constant:
        from .forms import exterior_derivative

        domega = exterior_derivative(omega, fd_step=fd_step)

    levels = []
    for order in orders:
        pts, wts = box_quadrature(box, order)
        I1 = 0.0
        I2 = 0.0
        for x, w in zip(pts, wts):
            key = (float(x[0]), float(x[1])) if m == 2 else tuple(map(float, x))
            if differential_cache is not None and key in differential_cache:
                diff = differential_cache[key]
            else:
                diff = differential(F, x, h=fd_step)
                if differential_cache is not None:
                    differential_cache[key] = diff
            if k == m:
                # both integrands vanish identically by degree
                continue
            cov = _pullback_at(omega, diff.values, diff.L)  # (m-1)-covector on R^m
            g = alpha.gradient(x)
            # dalpha ^ F*omega, coefficient on the volume covector
            if m == 2:
                u = cov.coeffs.get((0,), 0.0)
                v = cov.coeffs.get((1,), 0.0)
                I1 += w * (g[0] * v - g[1] * u)
            else:
                acc = 0.0
                for j in range(m):
                    J = tuple(i for i in range(m) if i != j)
                    acc += (-1.0) ** j * g[j] * cov.coeffs.get(J, 0.0)
                I1 += w * acc
            # alpha ^ F*(d omega)
            if omega.analytic_derivative is not None:
                dcov_amb = omega.analytic_derivative(diff.values.reshape(-1))
            elif omega.is_constant:
                dcov_amb = KCovector(omega.dim, k + 1, {})
            else:
                dcov_amb = domega.at(diff.values.reshape(-1))
            T = diff.L.reshape(F.d * F.n, m)
            dcov = dcov_amb.pullback_linear(T)
            I2 += w * alpha.value(x) * dcov.coeffs.get(tuple(range(m)), 0.0)
        # integration by parts: int dalpha ^ beta = (-1)^(m-k) int alpha ^ dbeta
        sign = (-1.0) ** (m - k)
        disc = abs(I1 - sign * I2)
        scale = max(abs(I1), abs(I2), 1e-30)
        levels.append(
            {"order": order, "lhs": I1, "rhs": I2, "abs_discrepancy": disc, "rel_discrepancy": disc / scale}
        )
    finest = levels[-1]
    return {
        "check": "weak-stokes",
        "degree": k,
        "levels": levels,
        "abs_discrepancy": finest["abs_discrepancy"],
        "rel_discrepancy": finest["rel_discrepancy"],
        "decreasing": all(
            levels[i + 1]["abs_discrepancy"] <= levels[i]["abs_discrepancy"] * 1.5 + 1e-14
            for i in range(len(levels) - 1)
        ),
    }


# ---------------------------------------------------------------------------
# interpolation toward the diagonal


def interpolate_feps(
    F: MultiValuedMap,
    eps: float,
    L: Optional[float] = None,
    cloud_size: int = 10_000,
    seed: int = 0,
) -> tuple[MultiValuedMap, dict]:
    """Interpolate F toward the diagonal map d[[b(F)]] near its coincidence set.

    The blending weight is 1 where the tuple lies within eps of the diagonal
    (exact membership test) and decays linearly with the distance to a
    quasi-random sample cloud of that sublevel set; the sampled distance
    over-estimates the true one, so the interpolation region never grows.
    Returns the interpolated map and an info dict.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if L is None:
        L = F.lipschitz_bound
    if L is None:
        raise ValueError("need a Lipschitz bound for the interpolation radius bookkeeping")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 271]))
    pts = F.domain.sample(rng, cloud_size)
    member = np.array([distance_to_diagonal(F(x)) < eps for x in pts])
    cloud = pts[member]
    all_member = bool(member.all())
    info = {
        "member_fraction": float(member.mean()),
        "covers_domain": all_member,
        "cloud_size": int(len(cloud)),
        "eps": eps,
        "lipschitz_bound": float(L),
    }

    def eta(x: np.ndarray, p: AlmgrenPoint) -> float:
        if distance_to_diagonal(p) < eps:
            return 1.0
        if len(cloud) == 0:
            return 0.0
        dmin = float(np.sqrt(np.min(np.einsum("ij,ij->i", cloud - x, cloud - x))))
        return max(0.0, 1.0 - dmin / eps)

    def ev(x: np.ndarray) -> AlmgrenPoint:
        p = F(x)
        e = eta(x, p)
        if e == 0.0:
            return p
        b = p.barycenter()
        locs = (1.0 - e) * p.locations + e * b
        return AlmgrenPoint.from_points(locs, p.weights.tolist())

    G = MultiValuedMap(
        domain=F.domain,
        m=F.m,
        n=F.n,
        d=F.d,
        evaluate=ev,
        provenance="interpolated",
        lipschitz_bound=(3.0 + 2.0 * F.d) * L,
        info=info,
    )
    return G, info
