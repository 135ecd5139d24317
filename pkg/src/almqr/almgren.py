"""The space of unordered weighted tuples in R^n with the assignment metric.

Points are multisets of d locations (weights = multiplicities).  The metric
is the minimum over pairings of the root-sum-square of Euclidean distances,
computed by optimal assignment on the d x d matrix of squared distances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels

MAX_BRUTEFORCE_D = 8


class TupleSpaceError(ValueError):
    """Invalid construction or incompatible operands."""


def _as_location(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise TupleSpaceError(f"location must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise TupleSpaceError("location has non-finite entries")
    # canonicalize -0.0 so bitwise merging and ordering match numeric equality
    return arr + 0.0


@dataclass(frozen=True)
class AlmgrenPoint:
    """An unordered d-tuple in R^n: merged locations with integer weights.

    ``locations`` has shape (k, n) with distinct (bitwise) rows in
    lexicographic order; ``weights`` are positive integers summing to d.
    Merging uses exact equality only; approximate coincidence is the
    business of :func:`singular_stratum`.
    """

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        # the + 0.0 canonicalizes any -0.0 entries (bitwise identity below)
        object.__setattr__(self, "locations", np.ascontiguousarray(self.locations, dtype=np.float64) + 0.0)
        object.__setattr__(self, "weights", np.ascontiguousarray(self.weights, dtype=np.int64))
        if self.locations.ndim != 2:
            raise TupleSpaceError("locations must have shape (k, n)")
        if self.weights.shape != (self.locations.shape[0],):
            raise TupleSpaceError("weights must match locations")
        if len(self.weights) == 0:
            raise TupleSpaceError("empty tuple")
        if np.any(self.weights <= 0):
            raise TupleSpaceError("weights must be positive")
        self.locations.setflags(write=False)
        self.weights.setflags(write=False)

    @classmethod
    def from_points(cls, points: Iterable, weights: Sequence[int] | None = None) -> "AlmgrenPoint":
        """Build from locations (+ optional weights), merging exact duplicates."""
        locs = [_as_location(p) for p in points]
        if not locs:
            raise TupleSpaceError("empty tuple")
        n = len(locs[0])
        if any(len(p) != n for p in locs):
            raise TupleSpaceError("locations have mixed dimensions")
        if weights is None:
            weights = [1] * len(locs)
        if len(weights) != len(locs):
            raise TupleSpaceError("weights must match locations")
        merged: dict[bytes, tuple[np.ndarray, int]] = {}
        for p, w in zip(locs, weights):
            w = int(w)
            if w <= 0:
                raise TupleSpaceError("weights must be positive")
            key = p.tobytes()
            if key in merged:
                merged[key] = (p, merged[key][1] + w)
            else:
                merged[key] = (p, w)
        pts = np.array([pw[0] for pw in merged.values()])
        ws = np.array([pw[1] for pw in merged.values()], dtype=np.int64)
        order = np.lexsort(pts.T[::-1])
        return cls(pts[order], ws[order])

    @classmethod
    def diagonal(cls, x, d: int) -> "AlmgrenPoint":
        """The point d*[[x]]: one location with full multiplicity."""
        return cls.from_points([x], [int(d)])

    @property
    def n(self) -> int:
        return self.locations.shape[1]

    @property
    def d(self) -> int:
        return int(self.weights.sum())

    def expand(self) -> np.ndarray:
        """Flatten weights into repeated rows, shape (d, n), lexicographic order."""
        return np.repeat(self.locations, self.weights, axis=0)

    def barycenter(self) -> np.ndarray:
        """Weighted mean of the locations."""
        return (self.weights[:, None] * self.locations).sum(axis=0) / self.d

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlmgrenPoint):
            return NotImplemented
        return (
            self.locations.shape == other.locations.shape
            and self.locations.tobytes() == other.locations.tobytes()
            and self.weights.tobytes() == other.weights.tobytes()
        )

    def __hash__(self) -> int:
        return hash((self.locations.tobytes(), self.weights.tobytes()))

    def __repr__(self) -> str:
        parts = [f"{w}*{loc.tolist()}" for loc, w in zip(self.locations, self.weights)]
        return f"AlmgrenPoint({' + '.join(parts)})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "points": [
                {"x": loc.tolist(), "w": int(w)} for loc, w in zip(self.locations, self.weights)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AlmgrenPoint":
        try:
            n = int(obj["n"])
            pts = [_as_location(e["x"]) for e in obj["points"]]
            ws = [int(e["w"]) for e in obj["points"]]
        except (KeyError, TypeError) as exc:
            raise TupleSpaceError(f"malformed tuple JSON: {exc}") from exc
        if any(len(p) != n for p in pts):
            raise TupleSpaceError("declared dimension does not match locations")
        return cls.from_points(pts, ws)


@dataclass(frozen=True)
class DistanceResult:
    """Assignment distance value plus a minimizing pairing of the expanded tuples."""

    value: float
    matching: tuple[int, ...]


def _check_compatible(p: AlmgrenPoint, q: AlmgrenPoint):
    if p.n != q.n:
        raise TupleSpaceError(f"ambient dimensions differ: {p.n} vs {q.n}")
    if p.d != q.d:
        raise TupleSpaceError(f"total weights differ: {p.d} vs {q.d}")


def _canonical_pair(p: AlmgrenPoint, q: AlmgrenPoint) -> tuple[AlmgrenPoint, AlmgrenPoint]:
    """Deterministic argument order so values are bitwise symmetric."""
    kp = (p.locations.tobytes(), p.weights.tobytes())
    kq = (q.locations.tobytes(), q.weights.tobytes())
    return (p, q) if kp <= kq else (q, p)


def distance_value(p: AlmgrenPoint, q: AlmgrenPoint) -> float:
    """Assignment distance, value only (the hot path).

    Computed on a canonical orientation of the pair, so the result is
    bitwise symmetric in the arguments.
    """
    _check_compatible(p, q)
    a, b = _canonical_pair(p, q)
    return float(np.sqrt(kernels.dist_sq(a.expand(), b.expand())))


def _sq_cost(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    diff = P[:, None, :] - Q[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _matched_value(P: np.ndarray, Q: np.ndarray, matching) -> float:
    """Exactly rounded value of a matching (order-independent, hence symmetric)."""
    import math

    pair_sq = [
        math.fsum((a - b) * (a - b) for a, b in zip(P[i], Q[j])) for i, j in enumerate(matching)
    ]
    return float(np.sqrt(max(math.fsum(pair_sq), 0.0)))


def _lex_refine(cost: np.ndarray, best: float) -> tuple[int, ...]:
    """Lexicographically smallest permutation among optimal assignments.

    Fixes rows in order, taking the smallest column index whose forced
    completion still attains the optimum (within a tiny relative band).
    """
    d = cost.shape[0]
    tol = 1e-12 * (1.0 + abs(best))
    rows = list(range(d))
    cols = list(range(d))
    fixed_cost = 0.0
    out = [0] * d
    for i in rows:
        for c in sorted(cols):
            rest_rows = [r for r in rows if r > i]
            rest_cols = [x for x in cols if x != c]
            if rest_rows:
                sub = cost[np.ix_(rest_rows, rest_cols)]
                completion = kernels.assignment_value(sub)
            else:
                completion = 0.0
            if fixed_cost + cost[i, c] + completion <= best + tol:
                out[i] = c
                fixed_cost += cost[i, c]
                cols.remove(c)
                break
        else:
            raise RuntimeError("lexicographic refinement failed to complete")
    return tuple(out)


def distance(p: AlmgrenPoint, q: AlmgrenPoint) -> DistanceResult:
    """Assignment distance with the lexicographically smallest optimal matching.

    The value is finalized with exactly rounded summation over the matched
    pairs, so it is symmetric in the arguments and agrees bit for bit with
    the enumeration oracle whenever both find the same matching.
    """
    _check_compatible(p, q)
    P, Q = p.expand(), q.expand()
    cost = _sq_cost(P, Q)
    best, _ = kernels.solve_assignment(cost)
    matching = _lex_refine(cost, best)
    return DistanceResult(value=_matched_value(P, Q, matching), matching=matching)


def _enumerate_min(cost: np.ndarray) -> tuple[float, tuple[int, ...]]:
    d = cost.shape[0]
    best = np.inf
    best_perm: tuple[int, ...] = tuple(range(d))
    rows = np.arange(d)
    for perm in itertools.permutations(range(d)):
        total = cost[rows, perm].sum()
        if total < best:
            best = total
            best_perm = perm
    return float(best), best_perm


def distance_bruteforce(p: AlmgrenPoint, q: AlmgrenPoint) -> DistanceResult:
    """Exact minimum by permutation enumeration (test oracle, d <= 8).

    Independent of the assignment solver; the value finalization is the
    same exactly rounded summation as in :func:`distance`.
    """
    _check_compatible(p, q)
    d = p.d
    if d > MAX_BRUTEFORCE_D:
        raise TupleSpaceError(f"brute force limited to d <= {MAX_BRUTEFORCE_D}, got {d}")
    P, Q = p.expand(), q.expand()
    _, perm = _enumerate_min(_sq_cost(P, Q))
    return DistanceResult(value=_matched_value(P, Q, perm), matching=perm)


def barycenter(p: AlmgrenPoint) -> np.ndarray:
    return p.barycenter()


def distance_to_diagonal(p: AlmgrenPoint) -> float:
    """Distance to the diagonal point d*[[b(p)]].

    All columns of the cost matrix coincide, so no matching freedom:
    the value is sqrt(sum_j |x_j - b(p)|^2).
    """
    b = p.barycenter()
    diff = p.expand() - b
    return float(np.sqrt(np.einsum("ij,ij->", diff, diff)))


def singular_stratum(p: AlmgrenPoint, tol: float = 0.0) -> int:
    """Largest k such that some k expanded entries lie pairwise within tol.

    k = 1 means all entries separated; k = d means the diagonal.
    """
    if tol < 0:
        raise TupleSpaceError("tol must be nonnegative")
    X = p.expand()
    d = len(X)
    if tol == 0.0:
        return int(p.weights.max())
    diff = X[:, None, :] - X[None, :, :]
    close = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)) <= tol
    for k in range(d, 1, -1):
        for subset in itertools.combinations(range(d), k):
            idx = np.array(subset)
            if close[np.ix_(idx, idx)].all():
                return k
    return 1
