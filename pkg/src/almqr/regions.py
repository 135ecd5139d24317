"""Sampling regions and tensor Gauss-Legendre quadrature helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=np.float64))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=np.float64))
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise ValueError("invalid box bounds")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return np.all((x >= self.lo) & (x <= self.hi), axis=1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(size, self.dim))

    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def bbox(self) -> "Box":
        return self


@dataclass(frozen=True)
class Disk:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self) -> int:
        return 2

    def volume(self) -> float:
        return float(np.pi * self.radius**2)

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return np.linalg.norm(x - self.center, axis=1) <= self.radius

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        r = self.radius * np.sqrt(rng.uniform(size=size))
        t = rng.uniform(0, 2 * np.pi, size=size)
        return self.center + np.stack([r * np.cos(t), r * np.sin(t)], axis=1)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def bbox(self) -> Box:
        return Box(self.center - self.radius, self.center + self.radius)


@dataclass(frozen=True)
class Annulus:
    center: np.ndarray
    r_in: float
    r_out: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        if not (0 <= self.r_in < self.r_out):
            raise ValueError("need 0 <= r_in < r_out")

    @property
    def dim(self) -> int:
        return 2

    def volume(self) -> float:
        return float(np.pi * (self.r_out**2 - self.r_in**2))

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        r = np.linalg.norm(x - self.center, axis=1)
        return (r >= self.r_in) & (r <= self.r_out)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.uniform(size=size)
        r = np.sqrt(self.r_in**2 + u * (self.r_out**2 - self.r_in**2))
        t = rng.uniform(0, 2 * np.pi, size=size)
        return self.center + np.stack([r * np.cos(t), r * np.sin(t)], axis=1)

    def diameter(self) -> float:
        return 2.0 * self.r_out

    def bbox(self) -> Box:
        return Box(self.center - self.r_out, self.center + self.r_out)


@dataclass(frozen=True)
class Cylinder:
    """{(x, y, z): r_in <= |(x, y)| <= r_out, z0 <= z <= z1}."""

    r_in: float
    r_out: float
    z0: float
    z1: float

    @property
    def dim(self) -> int:
        return 3

    def volume(self) -> float:
        return float(np.pi * (self.r_out**2 - self.r_in**2) * (self.z1 - self.z0))

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        r = np.hypot(x[:, 0], x[:, 1])
        return (r >= self.r_in) & (r <= self.r_out) & (x[:, 2] >= self.z0) & (x[:, 2] <= self.z1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.uniform(size=size)
        r = np.sqrt(self.r_in**2 + u * (self.r_out**2 - self.r_in**2))
        t = rng.uniform(0, 2 * np.pi, size=size)
        z = rng.uniform(self.z0, self.z1, size=size)
        return np.stack([r * np.cos(t), r * np.sin(t), z], axis=1)

    def diameter(self) -> float:
        return float(np.hypot(2 * self.r_out, self.z1 - self.z0))

    def bbox(self) -> Box:
        return Box([-self.r_out, -self.r_out, self.z0], [self.r_out, self.r_out, self.z1])


def parse_region(text: str):
    """Parse the CLI region DSL: 'annulus:r0,r1', 'disk:r', 'box:x0,x1,y0,y1'."""
    kind, _, rest = text.partition(":")
    try:
        vals = [float(v) for v in rest.split(",")] if rest else []
        if kind == "annulus" and len(vals) == 2:
            return Annulus(np.zeros(2), vals[0], vals[1])
        if kind == "disk" and len(vals) == 1:
            return Disk(np.zeros(2), vals[0])
        if kind == "box" and len(vals) == 4:
            return Box([vals[0], vals[2]], [vals[1], vals[3]])
    except ValueError as exc:
        raise ValueError(f"bad region spec {text!r}: {exc}") from exc
    raise ValueError(f"bad region spec {text!r}")


# ---------------------------------------------------------------------------
# quadrature


def gl_nodes(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def box_quadrature(box: Box, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre rule over a box; returns points (m, dim) and weights."""
    axes = [gl_nodes(lo, hi, order) for lo, hi in zip(box.lo, box.hi)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    w = axes[0][1]
    for a in axes[1:]:
        w = np.multiply.outer(w, a[1])
    return pts, w.ravel()


def annulus_quadrature(ann: Annulus, order_r: int, order_t: int) -> tuple[np.ndarray, np.ndarray]:
    """Polar tensor rule over an annulus (weights include the r factor)."""
    r, wr = gl_nodes(ann.r_in, ann.r_out, order_r)
    t, wt = gl_nodes(0.0, 2 * np.pi, order_t)
    R, T = np.meshgrid(r, t, indexing="ij")
    pts = ann.center + np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], axis=1)
    W = np.multiply.outer(wr * r, wt).ravel()
    return pts, W
