"""Discrete conformal modulus, curve-wise upper gradients, the area formula,
Ahlfors-regularity sampling and metric quasiconformality checks.

The discrete modulus problem

    minimize sum_c V_c rho_c^n   s.t.   sum_c a_{gc} rho_c >= 1 per curve g

is solved through its concave dual by projected gradient ascent; the primal
density recovered from the dual variables is rescaled to exact feasibility,
so the reported value is a true upper bound for the discrete optimum and the
dual value a lower bound (the gap is part of the diagnostics).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .almgren import AlmgrenPoint
from .covers import (
    BranchedCoverSpec,
    CoverError,
    NumericalError,
    h_function,
    lift_path,
    minv,
    minv_metric_jacobian,
    op_norm,
)
from .regions import Annulus, Box, annulus_quadrature, box_quadrature


# ---------------------------------------------------------------------------
# curve families


@dataclass
class CurveFamily:
    """A finite family of rectifiable curves given as polylines."""

    polylines: list[np.ndarray]
    name: str = "polylines"

    def __post_init__(self):
        if not self.polylines:
            raise ValueError("empty curve family")
        for pts in self.polylines:
            seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            if seg.sum() <= 0:
                raise ValueError("curve with zero length rejected")

    def __len__(self) -> int:
        return len(self.polylines)


def radial_family(ann: Annulus, count: int) -> CurveFamily:
    """Segments joining the two boundary circles of an annulus."""
    thetas = 2 * np.pi * np.arange(count) / count
    lines = []
    for t in thetas:
        u = np.array([np.cos(t), np.sin(t)])
        lines.append(np.stack([ann.center + ann.r_in * u, ann.center + ann.r_out * u]))
    return CurveFamily(lines, name="radial")


def circle_family(ann: Annulus, count: int, vertices: int = 720) -> CurveFamily:
    """Concentric circles separating the two boundary components."""
    rs = np.linspace(ann.r_in, ann.r_out, count + 2)[1:-1]
    t = np.linspace(0, 2 * np.pi, vertices + 1)
    lines = [
        ann.center + np.stack([r * np.cos(t), r * np.sin(t)], axis=1) for r in rs
    ]
    return CurveFamily(lines, name="circles")


def build_family(spec, region) -> CurveFamily:
    """Family DSL: 'radial' | 'circles' | {'family':..., 'count':...} | polyline list."""
    if isinstance(spec, str):
        spec = {"family": spec}
    if isinstance(spec, dict):
        kind = spec.get("family")
        count = int(spec.get("count", 512))
        if kind == "radial":
            return radial_family(region, count)
        if kind == "circles":
            return circle_family(region, count)
        if kind == "polylines":
            return CurveFamily([np.asarray(p, dtype=float) for p in spec["paths"]])
    raise ValueError(f"bad family spec {spec!r}")


# ---------------------------------------------------------------------------
# discrete modulus


@dataclass
class Grid2D:
    box: Box
    ncells: int  # per axis

    @property
    def h(self) -> np.ndarray:
        return (self.box.hi - self.box.lo) / self.ncells

    def cell_of(self, pts: np.ndarray) -> np.ndarray:
        ij = np.floor((pts - self.box.lo) / self.h).astype(np.int64)
        ij = np.clip(ij, 0, self.ncells - 1)
        return ij[:, 0] * self.ncells + ij[:, 1]

    def centers(self, flat_idx: np.ndarray) -> np.ndarray:
        i, j = np.divmod(flat_idx, self.ncells)
        return self.box.lo + (np.stack([i, j], axis=1) + 0.5) * self.h

    def cell_volume(self) -> float:
        return float(np.prod(self.h))


def _rasterize(
    polylines: Sequence[np.ndarray],
    grid: Grid2D,
    seg_values: Optional[Sequence[np.ndarray]] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deposit per-curve arclength (or supplied per-segment mass) onto cells.

    Returns COO triplets (curve_row, cell_col, value) with duplicates merged.
    """
    hmin = float(grid.h.min())
    rows, cols, vals = [], [], []
    for ci, pts in enumerate(polylines):
        pts = np.asarray(pts, dtype=np.float64)
        seg = np.diff(pts, axis=0)
        seg_len = np.linalg.norm(seg, axis=1)
        mass = seg_len if seg_values is None else np.asarray(seg_values[ci], dtype=np.float64)
        for k in range(len(seg)):
            if seg_len[k] == 0:
                continue
            nsub = max(1, int(np.ceil(seg_len[k] / (hmin / 3.0))))
            t = (np.arange(nsub) + 0.5) / nsub
            mids = pts[k] + t[:, None] * seg[k]
            cells = grid.cell_of(mids)
            rows.append(np.full(nsub, ci, dtype=np.int64))
            cols.append(cells)
            vals.append(np.full(nsub, mass[k] / nsub))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    # merge duplicate (row, col) pairs
    key = rows * (grid.ncells**2) + cols
    order = np.argsort(key, kind="stable")
    key, rows, cols, vals = key[order], rows[order], cols[order], vals[order]
    boundary = np.concatenate([[True], key[1:] != key[:-1]])
    group = np.cumsum(boundary) - 1
    merged_vals = np.bincount(group, weights=vals)
    first = np.flatnonzero(boundary)
    return rows[first], cols[first], merged_vals


@dataclass
class DensityField:
    """An admissible density on the touched grid cells.

    ``admissibility_residual`` is 1 minus the smallest curve integral; the
    stored density is rescaled to make it exactly nonnegative.
    """

    grid: Grid2D
    cells: np.ndarray  # flat indices of touched cells
    values: np.ndarray  # density per touched cell, >= 0
    exponent: float
    curve_integrals: np.ndarray

    @property
    def admissibility_residual(self) -> float:
        return float(1.0 - self.curve_integrals.min())


@dataclass
class ModulusResult:
    value: float
    dual_value: float
    gap: float
    iterations: int
    n_curves: int
    n_cells: int
    min_curve_integral: float
    grid: int
    density: Optional[DensityField] = None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "iterations": self.iterations,
            "n_curves": self.n_curves,
            "n_cells": self.n_cells,
            "min_curve_integral": self.min_curve_integral,
            "grid": self.grid,
        }


def discrete_modulus(
    family: CurveFamily,
    region,
    grid: int = 256,
    n: float = 2.0,
    cell_weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    seg_values: Optional[Sequence[np.ndarray]] = None,
    max_iters: int = 4000,
    tol: float = 1e-9,
) -> ModulusResult:
    """Discrete n-modulus of a curve family on a grid over the region's bbox.

    ``cell_weight`` rescales the cell volumes (the density of the measure
    against Lebesgue); ``seg_values`` overrides the per-segment admissibility
    mass (the length element along the curves).  Convex duality supplies the
    convergence certificate.
    """
    g2 = Grid2D(region.bbox(), grid)
    rows, cols, vals = _rasterize(family.polylines, g2, seg_values=seg_values)
    # restrict to touched cells
    touched, cols_c = np.unique(cols, return_inverse=True)
    ncells = len(touched)
    M = len(family)
    V = np.full(ncells, g2.cell_volume())
    if cell_weight is not None:
        V = V * np.asarray(cell_weight(g2.centers(touched)), dtype=np.float64)
    if np.any(V <= 0):
        raise ValueError("nonpositive cell weights")

    q = n / (n - 1.0)

    def a_t(lam: np.ndarray) -> np.ndarray:  # A^T lam over touched cells
        return np.bincount(cols_c, weights=vals * lam[rows], minlength=ncells)

    def a(rho: np.ndarray) -> np.ndarray:  # A rho over curves
        return np.bincount(rows, weights=vals * rho[cols_c], minlength=M)

    def rho_of(lam: np.ndarray) -> np.ndarray:
        return (a_t(lam) / (n * V)) ** (1.0 / (n - 1.0))

    def dual(lam: np.ndarray) -> float:
        s = a_t(lam) / (n * V)
        return float(lam.sum() - (n - 1.0) * (V * s**q).sum())

    # Lipschitz estimate of the dual gradient at n = 2 via power iteration
    lam = np.full(M, 1e-3)
    if n == 2.0:
        v = np.ones(M)
        for _ in range(40):
            w = a(a_t(v) / (2.0 * V))
            nv = np.linalg.norm(w)
            if nv == 0:
                break
            v = w / nv
        Lg = max(nv, 1e-30)
        step = 1.0 / Lg
        it = 0
        prev = -np.inf
        for it in range(1, max_iters + 1):
            grad = 1.0 - a(rho_of(lam))
            lam = np.maximum(0.0, lam + step * grad)
            if it % 50 == 0:
                cur = dual(lam)
                if cur - prev < tol * max(1.0, abs(cur)):
                    break
                prev = cur
    else:
        # backtracking projected gradient for general exponents
        step = 1.0
        cur = dual(lam)
        it = 0
        for it in range(1, max_iters + 1):
            grad = 1.0 - a(rho_of(lam))
            while step > 1e-18:
                trial = np.maximum(0.0, lam + step * grad)
                val = dual(trial)
                if val >= cur - 1e-14:
                    break
                step *= 0.5
            improved = val - cur
            lam, cur = trial, val
            step *= 1.3
            if 0 <= improved < tol * max(1.0, abs(cur)) and it > 100:
                break

    rho = rho_of(lam)
    integrals = a(rho)
    mu = float(integrals.min())
    if mu <= 0:
        raise NumericalError("dual iterate left a curve with zero mass")
    rho_feasible = rho / mu
    primal = float((V * rho_feasible**n).sum())
    dval = dual(lam)
    return ModulusResult(
        value=primal,
        dual_value=dval,
        gap=primal - dval,
        iterations=it,
        n_curves=M,
        n_cells=ncells,
        min_curve_integral=mu,
        grid=grid,
        density=DensityField(
            grid=g2,
            cells=touched,
            values=rho_feasible,
            exponent=float(n),
            curve_integrals=integrals / mu,
        ),
    )


def ring_modulus_exact(r_in: float, r_out: float) -> float:
    """Continuum 2-modulus of the connecting family of a round annulus."""
    return float(2 * np.pi / np.log(r_out / r_in))


# ---------------------------------------------------------------------------
# push-forward modulus (geometric quasiconformality)


def metric_jacobian_values(f: BranchedCoverSpec, ys: np.ndarray) -> np.ndarray:
    """Metric Jacobian of the multi-valued inverse at many points."""
    ys = np.atleast_2d(ys)
    if f.branch_diff_batch is not None and f.n == 2:
        L = f.branch_diff_batch(ys)  # (m, d, 2, 2)
        G00 = (L[..., 0, 0] ** 2 + L[..., 1, 0] ** 2).sum(axis=1)
        G11 = (L[..., 0, 1] ** 2 + L[..., 1, 1] ** 2).sum(axis=1)
        G01 = (L[..., 0, 0] * L[..., 0, 1] + L[..., 1, 0] * L[..., 1, 1]).sum(axis=1)
        return np.sqrt(np.maximum(G00 * G11 - G01**2, 0.0))
    return np.array([minv_metric_jacobian(f, y) for y in ys])


def pushforward_modulus_check(
    f: BranchedCoverSpec,
    family: CurveFamily,
    region,
    grid: int = 256,
    slack: float = 0.05,
    lift_steps: int = 256,
) -> dict:
    """Two-sided modulus comparison between a base family and its image under
    the multi-valued inverse.

    The image modulus is computed on the same base grid: curve mass uses the
    tuple-space arclength of the lifted frames and cell volumes use the
    metric Jacobian of the inverse (the area formula for the Hausdorff
    measure of the image set).
    """
    base = discrete_modulus(family, region, grid=grid)

    seg_values = []
    polylines = []
    failures = 0
    for pts in family.polylines:
        try:
            from .covers import polyline

            gamma = polyline(pts)
            lp = lift_path(f, gamma, initial_steps=lift_steps)
            d_lift = np.diff(lp.lifts, axis=0)  # (steps, d, n)
            frame_len = np.sqrt(np.einsum("sjk,sjk->s", d_lift, d_lift))
            polylines.append(lp.base)
            seg_values.append(frame_len)
        except (NumericalError, CoverError):
            failures += 1
    if not polylines:
        raise NumericalError("all lifts failed")
    lifted_family = CurveFamily(polylines, name=f"{family.name}-lifted")
    image = discrete_modulus(
        lifted_family,
        region,
        grid=grid,
        cell_weight=lambda ys: metric_jacobian_values(f, ys),
        seg_values=seg_values,
    )

    K = f.K_I * f.K_O
    ratio = image.value / base.value
    lo, hi = 1.0 / K - slack, K + slack
    return {
        "check": "geom-qc",
        "map": f.name,
        "mod_base": base.value,
        "mod_image": image.value,
        "ratio": ratio,
        "K_I_K_O": K,
        "bound_lo": lo,
        "bound_hi": hi,
        "pass": bool(lo <= ratio <= hi),
        "lift_failures": failures,
        "base_diag": base.to_json(),
        "image_diag": image.to_json(),
    }


# ---------------------------------------------------------------------------
# curve-wise upper gradient check


def upper_gradient_check(
    f: BranchedCoverSpec,
    family: CurveFamily,
    samples_per_curve: int = 64,
    fd_step: float = 1e-5,
    tol: float = 1e-6,
    margin: float = 1e-3,
) -> dict:
    """Sampled two-sided comparison of the tuple-space speed of lifted curves
    against H * base speed (lower) and (K_I K_O)^{1/n} H * base speed (upper).

    Speeds are central differences of assignment-matched fibers at parameter
    offsets +-fd_step; samples too close to the branch values are excluded.
    """
    from .covers import polyline

    n = f.n
    Kfac = (f.K_I * f.K_O) ** (1.0 / n)
    used = 0
    excluded = 0
    viol_low = 0
    viol_high = 0
    worst_low = 0.0
    worst_high = 0.0
    for pts in family.polylines:
        gamma = polyline(pts)
        for t in (np.arange(samples_per_curve) + 0.5) / samples_per_curve:
            y = gamma(t)
            if f.branch_value_distance(y) < margin:
                excluded += 1
                continue
            yp, ym = gamma(t + fd_step), gamma(t - fd_step)
            base_speed = float(np.linalg.norm(yp - ym) / (2 * fd_step))
            if base_speed == 0.0:
                excluded += 1
                continue
            X = minv(f, y).expand()
            Fp = minv(f, yp).expand()
            Fm = minv(f, ym).expand()
            dp = X[:, None, :] - Fp[None, :, :]
            cp = np.einsum("ijk,ijk->ij", dp, dp)
            _, pp = kernels.solve_assignment(cp)
            dm = X[:, None, :] - Fm[None, :, :]
            cm = np.einsum("ijk,ijk->ij", dm, dm)
            _, pm = kernels.solve_assignment(cm)
            vel = (Fp[pp] - Fm[pm]) / (2 * fd_step)
            frame_speed = float(np.sqrt(np.einsum("jk,jk->", vel, vel)))
            H = h_function(f, y)
            lower = H * base_speed
            upper = Kfac * H * base_speed
            used += 1
            if frame_speed < lower * (1 - tol):
                viol_low += 1
                worst_low = max(worst_low, (lower - frame_speed) / lower)
            if frame_speed > upper * (1 + tol):
                viol_high += 1
                worst_high = max(worst_high, (frame_speed - upper) / upper)
    total = max(used, 1)
    return {
        "check": "upper-gradient",
        "map": f.name,
        "n_samples": used,
        "excluded": excluded,
        "violation_fraction": (viol_low + viol_high) / total,
        "worst_low_gap": worst_low,
        "worst_high_gap": worst_high,
        "K_factor": Kfac,
        "tol": tol,
        "pass": bool(viol_low + viol_high == 0),
    }


# ---------------------------------------------------------------------------
# area formula


def area_formula_check(
    f: BranchedCoverSpec,
    g: Callable[[np.ndarray], float],
    image_region,
    preimage_region=None,
    orders: tuple[int, ...] = (32, 64),
) -> dict:
    """Quadrature comparison of the push-forward integral with the domain-side
    integral of g * Jf; exact preimage regions keep the integrands smooth."""

    def quad(region, order):
        if isinstance(region, Annulus):
            return annulus_quadrature(region, order, 2 * order)
        return box_quadrature(region, order)

    levels = []
    for order in orders:
        pts, w = quad(image_region, order)
        lhs = 0.0
        for y, wy in zip(pts, w):
            p = minv(f, y)
            lhs += wy * sum(int(wt) * g(loc) for loc, wt in zip(p.locations, p.weights))
        if preimage_region is not None:
            pts2, w2 = quad(preimage_region, order)
            rhs = float(sum(wx * g(x) * f.jacobian(x) for x, wx in zip(pts2, w2)))
            indicator = False
        else:
            box = image_region.bbox()
            # no exact preimage description: integrate with an indicator
            pts2, w2 = quad(box, order)
            rhs = 0.0
            for x, wx in zip(pts2, w2):
                y = f.evaluate(x)
                inside = image_region.contains(y[None, :])[0]
                if inside:
                    rhs += wx * g(x) * f.jacobian(x)
            indicator = True
        disc = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs), 1e-300)
        levels.append({"order": order, "lhs": lhs, "rhs": rhs, "rel_discrepancy": disc / scale})
    finest = levels[-1]
    return {
        "check": "area-formula",
        "map": f.name,
        "levels": levels,
        "rel_discrepancy": finest["rel_discrepancy"],
        "indicator_fallback": indicator,
    }


def energy_bound_check(
    f: BranchedCoverSpec, image_region, preimage_region, order: int = 64
) -> dict:
    """int_E H^n dy <= d^{n/2-1} K_I K_O |f^{-1} E| with the slack reported."""
    n = f.n
    if isinstance(image_region, Annulus):
        pts, w = annulus_quadrature(image_region, order, 2 * order)
    else:
        pts, w = box_quadrature(image_region, order)
    lhs = float(sum(wy * h_function(f, y) ** n for y, wy in zip(pts, w)))
    rhs = f.degree ** (n / 2.0 - 1.0) * f.K_I * f.K_O * preimage_region.volume()
    return {
        "check": "inverse-energy-bound",
        "map": f.name,
        "energy": lhs,
        "bound": rhs,
        "slack": rhs - lhs,
        "pass": bool(lhs <= rhs * (1 + 1e-9)),
    }


# ---------------------------------------------------------------------------
# Ahlfors regularity sampling


UNIT_BALL_VOLUME = {1: 2.0, 2: float(np.pi), 3: 4.0 * np.pi / 3.0}


@dataclass
class OmegaFSample:
    center: dict
    radius: float
    measure: float
    ci_halfwidth: float
    ratio: float
    ratio_ci: float
    boundary_fraction: float

    def to_json(self) -> dict:
        return {
            "center": self.center,
            "radius": self.radius,
            "measure": self.measure,
            "ci_halfwidth": self.ci_halfwidth,
            "ratio": self.ratio,
            "ratio_ci": self.ratio_ci,
            "boundary_fraction": self.boundary_fraction,
        }


def ahlfors_sampler(
    f: BranchedCoverSpec,
    centers: Sequence[np.ndarray],
    radii: Sequence[float],
    n_samples: int = 100_000,
    seed: int = 0,
    box_safety: float = 2.0,
) -> list[OmegaFSample]:
    """Monte Carlo estimates of the Hausdorff measure of metric balls in the
    image of the multi-valued inverse, via the area formula, compared with
    the upper-regularity constant vol(B^n) d^{n/2} K_I K_O r^n.

    The sampling box around each center is grown until the ball indicator
    stops touching its outer shell.
    """
    n = f.n
    if n != 2:
        raise NotImplementedError("sampler implemented for planar covers")
    const = UNIT_BALL_VOLUME[n] * f.degree ** (n / 2.0) * f.K_I * f.K_O
    out: list[OmegaFSample] = []
    for ic, y0 in enumerate(centers):
        y0 = np.asarray(y0, dtype=np.float64)
        z = minv(f, y0)
        zC = z.expand()
        H0 = h_function(f, y0)
        for ir, r in enumerate(radii):
            rng = np.random.default_rng(np.random.SeedSequence([seed, 11, ic, ir]))
            R = box_safety * r / H0
            for _ in range(4):
                lo, hi = y0 - R, y0 + R
                ys = rng.uniform(lo, hi, size=(n_samples, 2))
                if f.fiber_batch is not None:
                    fibers = f.fiber_batch(ys)
                else:
                    fibers = np.stack([minv(f, y).expand() for y in ys])
                inside = kernels.dist_sq_one_to_many(zC, fibers) < r * r
                shell = np.max(np.abs(ys - y0), axis=1) > 0.85 * R
                boundary_fraction = float((inside & shell).sum() / max(inside.sum(), 1))
                if boundary_fraction == 0.0:
                    break
                R *= 1.6
            vol_box = float(np.prod(hi - lo))
            vals = np.zeros(n_samples)
            if inside.any():
                vals[inside] = metric_jacobian_values(f, ys[inside])
            est = vol_box * float(vals.mean())
            sd = vol_box * float(vals.std(ddof=1) / np.sqrt(n_samples))
            denom = const * r**n
            out.append(
                OmegaFSample(
                    center=z.to_json(),
                    radius=float(r),
                    measure=est,
                    ci_halfwidth=3.0 * sd,
                    ratio=est / denom,
                    ratio_ci=3.0 * sd / denom,
                    boundary_fraction=boundary_fraction,
                )
            )
    return out


# ---------------------------------------------------------------------------
# metric quasiconformality at a point


def metric_qc_check(
    f: BranchedCoverSpec,
    y0: np.ndarray,
    radii: Sequence[float],
    n_boundary: int = 512,
) -> dict:
    """Compare the finite-radius distortion of the multi-valued inverse with
    the fiberwise distortion of the normal neighborhoods.

    Needs the normal-neighborhood oracle (planar powers); radii must keep
    the fiber neighborhoods disjoint.
    """
    if f.normal_neighborhood_boundary is None:
        raise CoverError("metric-qc check needs the normal-neighborhood oracle")
    y0 = np.asarray(y0, dtype=np.float64)
    z0 = minv(f, y0)
    z0e = z0.expand()
    fiber = z0.locations
    gap = np.inf
    for i in range(len(fiber)):
        for j in range(i + 1, len(fiber)):
            gap = min(gap, float(np.linalg.norm(fiber[i] - fiber[j])))

    rows = []
    for r in radii:
        phis = 2 * np.pi * (np.arange(n_boundary) + 0.5) / n_boundary
        ring = y0 + r * np.stack([np.cos(phis), np.sin(phis)], axis=1)
        dists = []
        for y in ring:
            dists.append(np.sqrt(kernels.dist_sq(minv(f, y).expand(), z0e)))
        dists = np.array(dists)
        # interior sampling for the sup
        sup_int = 0.0
        for u in (0.25, 0.5, 0.75):
            ring_u = y0 + u * r * np.stack([np.cos(phis[::8]), np.sin(phis[::8])], axis=1)
            for y in ring_u:
                sup_int = max(sup_int, float(np.sqrt(kernels.dist_sq(minv(f, y).expand(), z0e))))
        L_minv = max(float(dists.max()), sup_int)
        l_minv = float(dists.min())
        lhs = (L_minv / l_minv) ** 2

        rhs = 0.0
        ok = True
        for x in fiber:
            try:
                bdry = f.normal_neighborhood_boundary(x, r, samples=n_boundary)
            except CoverError:
                ok = False
                break
            radial = np.linalg.norm(bdry - x, axis=1)
            Lstar = float(radial.max())
            lstar = float(radial.min())
            if 2 * Lstar > gap and np.isfinite(gap):
                raise CoverError(f"radius {r} too large: fiber neighborhoods may merge")
            rhs += (Lstar / lstar) ** 2
        if not ok:
            raise CoverError(f"radius {r} too large for the normal-neighborhood oracle")
        rows.append(
            {
                "radius": float(r),
                "H_minv_sq": lhs,
                "sum_H_star_sq": rhs,
                "slack": rhs - lhs,
                "pass": bool(lhs <= rhs * (1 + 1e-9)),
            }
        )
    return {
        "check": "metric-qc",
        "map": f.name,
        "center": y0.tolist(),
        "rows": rows,
        "pass": bool(all(r["pass"] for r in rows)),
    }
