"""Exterior algebra of k-forms on (R^n)^d with group symmetrization.

Covectors are stored sparsely over elementary covectors dx_I (strictly
increasing index tuples over the flat coordinates of (R^n)^d, block j
occupying positions [j*n, (j+1)*n)).  An elementary covector evaluates as
the determinant of the selected components, so dx_1^dx_2 applied to
(e_1, e_2) is 1 and the wedge of elementary covectors is the signed merge
of their index tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


# ---------------------------------------------------------------------------
# covectors


def _sort_with_sign(idx: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Sort an index tuple, returning the parity sign; 0 on repeats."""
    idx = tuple(idx)
    arr = list(idx)
    sign = 1
    # insertion sort, counting swaps; tuples here have length <= 4
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(arr)):
        if arr[i - 1] == arr[i]:
            return tuple(arr), 0
    return tuple(arr), sign


@dataclass(frozen=True)
class KCovector:
    """A k-covector on R^N, sparse over increasing elementary index tuples."""

    dim: int
    degree: int
    coeffs: dict[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        for I in self.coeffs:
            if len(I) != self.degree:
                raise ValueError(f"index tuple {I} has wrong length for degree {self.degree}")
            if any(not (0 <= i < self.dim) for i in I):
                raise ValueError(f"index tuple {I} out of range for dim {self.dim}")
            if any(a >= b for a, b in zip(I, I[1:])):
                raise ValueError(f"index tuple {I} not strictly increasing")

    def __call__(self, vectors: np.ndarray) -> float:
        """Evaluate on k row vectors, shape (k, N)."""
        V = np.asarray(vectors, dtype=np.float64)
        if V.shape != (self.degree, self.dim):
            raise ValueError(f"expected {self.degree} vectors of length {self.dim}")
        if self.degree == 0:
            return float(self.coeffs.get((), 0.0))
        total = 0.0
        for I, c in self.coeffs.items():
            M = V[:, I]
            total += c * float(np.linalg.det(M)) if self.degree > 1 else c * float(M[0, 0])
        return total

    def add(self, other: "KCovector", scale: float = 1.0) -> "KCovector":
        out = dict(self.coeffs)
        for I, c in other.coeffs.items():
            out[I] = out.get(I, 0.0) + scale * c
            if out[I] == 0.0:
                del out[I]
        return KCovector(self.dim, self.degree, out)

    def scaled(self, a: float) -> "KCovector":
        if a == 0.0:
            return KCovector(self.dim, self.degree, {})
        return KCovector(self.dim, self.degree, {I: a * c for I, c in self.coeffs.items()})

    def wedge(self, other: "KCovector") -> "KCovector":
        if self.dim != other.dim:
            raise ValueError("mixed ambient dimensions")
        k = self.degree + other.degree
        if k > self.dim:
            raise ValueError("degree overflow")
        out: dict[tuple[int, ...], float] = {}
        for I, a in self.coeffs.items():
            for J, b in other.coeffs.items():
                K, sign = _sort_with_sign(I + J)
                if sign == 0:
                    continue
                out[K] = out.get(K, 0.0) + sign * a * b
                if out[K] == 0.0:
                    del out[K]
        return KCovector(self.dim, k, out)

    def pullback_gather(self, gather: np.ndarray) -> "KCovector":
        """Pull back along the coordinate permutation v -> v[gather]."""
        out: dict[tuple[int, ...], float] = {}
        for I, c in self.coeffs.items():
            J, sign = _sort_with_sign(tuple(int(gather[i]) for i in I))
            if sign == 0:
                continue
            out[J] = out.get(J, 0.0) + sign * c
            if out[J] == 0.0:
                del out[J]
        return KCovector(self.dim, self.degree, out)

    def pullback_linear(self, T: np.ndarray) -> "KCovector":
        """Pull back along a linear map R^m -> R^N given as an (N, m) matrix."""
        T = np.asarray(T, dtype=np.float64)
        m = T.shape[1]
        k = self.degree
        out: dict[tuple[int, ...], float] = {}
        if k == 0:
            return KCovector(m, 0, dict(self.coeffs))
        for I, c in self.coeffs.items():
            sub = T[list(I), :]
            for J in itertools.combinations(range(m), k):
                M = sub[:, J]
                val = c * (float(np.linalg.det(M)) if k > 1 else float(M[0, 0]))
                if val != 0.0:
                    out[J] = out.get(J, 0.0) + val
                    if out[J] == 0.0:
                        del out[J]
        return KCovector(m, k, out)

    def l2(self) -> float:
        return float(np.sqrt(sum(c * c for c in self.coeffs.values())))


def volume_covector(n: int) -> KCovector:
    return KCovector(n, n, {tuple(range(n)): 1.0})


# ---------------------------------------------------------------------------
# group actions


class GroupAction:
    """A finite group of block permutations of (R^n)^d acting on flat coordinates.

    Each element is stored as a gather array g with (gamma v)[i] = v[g[i]].
    """

    def __init__(self, n: int, d: int, gathers: list[np.ndarray], name: str):
        self.n = n
        self.d = d
        self.gathers = [np.asarray(g, dtype=np.int64) for g in gathers]
        self.name = name

    def __len__(self) -> int:
        return len(self.gathers)

    @staticmethod
    def _gather_from_block_perm(sigma: tuple[int, ...], n: int) -> np.ndarray:
        # (sigma x)_j = x_{sigma^-1(j)}; flat gather g[j*n + a] = sigma^-1(j)*n + a
        d = len(sigma)
        inv = [0] * d
        for i, s in enumerate(sigma):
            inv[s] = i
        g = np.empty(n * d, dtype=np.int64)
        for j in range(d):
            g[j * n : (j + 1) * n] = np.arange(inv[j] * n, inv[j] * n + n)
        return g

    @classmethod
    def full(cls, n: int, d: int) -> "GroupAction":
        """The full symmetric group permuting the d blocks."""
        if d > 7:
            raise ValueError("full symmetric group enumeration limited to d <= 7")
        gathers = [
            cls._gather_from_block_perm(sigma, n) for sigma in itertools.permutations(range(d))
        ]
        return cls(n, d, gathers, f"S_{d}")

    @classmethod
    def split(cls, n: int, d0: int, d1: int) -> "GroupAction":
        """The product group permuting the first d0 and last d1 blocks separately."""
        if d0 + d1 > 8:
            raise ValueError("split group enumeration limited to d0 + d1 <= 8")
        gathers = []
        for s0 in itertools.permutations(range(d0)):
            for s1 in itertools.permutations(range(d1)):
                sigma = tuple(s0) + tuple(d0 + j for j in s1)
                gathers.append(cls._gather_from_block_perm(sigma, n))
        return cls(n, d0 + d1, gathers, f"S_{d0}xS_{d1}")

    def apply_point(self, gather: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64)[gather]


# ---------------------------------------------------------------------------
# forms


@dataclass
class KForm:
    """A k-form on (R^n)^d: a covector-valued coefficient function.

    ``invariance`` is a bookkeeping tag ("full", ("split", d0, d1) or
    "none"); it is set by the constructors that guarantee it and checked by
    sampling in the test suite, not enforced pointwise.
    """

    degree: int
    n: int
    d: int
    coeff_fn: Callable[[np.ndarray], KCovector]
    is_constant: bool = False
    constant_value: Optional[KCovector] = None
    analytic_derivative: Optional[Callable[[np.ndarray], KCovector]] = None
    invariance: object = "none"

    @property
    def dim(self) -> int:
        return self.n * self.d

    def at(self, x: np.ndarray) -> KCovector:
        if self.is_constant:
            return self.constant_value
        return self.coeff_fn(np.asarray(x, dtype=np.float64).reshape(self.dim))

    def __call__(self, x: np.ndarray, vectors: np.ndarray) -> float:
        return self.at(x)(vectors)

    @classmethod
    def constant(cls, cov: KCovector, n: int, d: int, invariance="none") -> "KForm":
        if cov.dim != n * d:
            raise ValueError("covector dimension mismatch")
        return cls(
            degree=cov.degree,
            n=n,
            d=d,
            coeff_fn=lambda x, _c=cov: _c,
            is_constant=True,
            constant_value=cov,
            analytic_derivative=lambda x, _n=n * d, _k=cov.degree: KCovector(_n, _k + 1, {}),
            invariance=invariance,
        )

    @classmethod
    def zero(cls, degree: int, n: int, d: int) -> "KForm":
        return cls.constant(KCovector(n * d, degree, {}), n, d, invariance="full")

    def add(self, other: "KForm", scale: float = 1.0) -> "KForm":
        if (self.degree, self.n, self.d) != (other.degree, other.n, other.d):
            raise ValueError("incompatible forms")
        inv = self.invariance if self.invariance == other.invariance else "none"
        if self.is_constant and other.is_constant:
            return KForm.constant(
                self.constant_value.add(other.constant_value, scale), self.n, self.d, inv
            )
        a, b = self, other
        deriv = None
        if a.analytic_derivative and b.analytic_derivative:
            deriv = lambda x: a.analytic_derivative(x).add(b.analytic_derivative(x), scale)
        return KForm(
            degree=self.degree,
            n=self.n,
            d=self.d,
            coeff_fn=lambda x: a.at(x).add(b.at(x), scale),
            analytic_derivative=deriv,
            invariance=inv,
        )

    def scaled(self, a: float) -> "KForm":
        if self.is_constant:
            return KForm.constant(self.constant_value.scaled(a), self.n, self.d, self.invariance)
        base = self
        deriv = None
        if base.analytic_derivative:
            deriv = lambda x: base.analytic_derivative(x).scaled(a)
        return KForm(
            degree=self.degree,
            n=self.n,
            d=self.d,
            coeff_fn=lambda x: base.at(x).scaled(a),
            analytic_derivative=deriv,
            invariance=self.invariance,
        )


def symmetrize(form: KForm, action: GroupAction) -> KForm:
    """Group-average projection onto invariant forms: average of the pullbacks."""
    if action.n != form.n or action.d != form.d:
        raise ValueError("action and form live on different spaces")
    tag = "full" if action.name.startswith("S_") and "x" not in action.name else (
        "split" if "x" in action.name else "none"
    )
    m = len(action.gathers)

    if form.is_constant:
        cov = form.constant_value
        acc = KCovector(cov.dim, cov.degree, {})
        for g in action.gathers:
            acc = acc.add(cov.pullback_gather(g), 1.0 / m)
        return KForm.constant(acc, form.n, form.d, invariance=tag)

    coeff = lambda x: _avg_pullback(form.at, x, action, form.dim, form.degree)
    deriv = None
    if form.analytic_derivative is not None:
        base_d = form.analytic_derivative
        deriv = lambda x: _avg_pullback(base_d, x, action, form.dim, form.degree + 1)
    return KForm(
        degree=form.degree,
        n=form.n,
        d=form.d,
        coeff_fn=coeff,
        analytic_derivative=deriv,
        invariance=tag,
    )


def _avg_pullback(fn, x, action: GroupAction, dim: int, degree: int) -> KCovector:
    x = np.asarray(x, dtype=np.float64).reshape(dim)
    m = len(action.gathers)
    acc = KCovector(dim, degree, {})
    for g in action.gathers:
        acc = acc.add(fn(x[g]).pullback_gather(g), 1.0 / m)
    return acc


def block_embed(cov: KCovector, block: int, n: int, d: int) -> KCovector:
    """Reindex a covector on R^n into block ``block`` of (R^n)^d."""
    shift = block * n
    return KCovector(n * d, cov.degree, {tuple(i + shift for i in I): c for I, c in cov.coeffs.items()})


def trace_form(alpha: KForm, d: int) -> KForm:
    """Sum of the block-projection pullbacks of a form on R^n; S_d-invariant."""
    if alpha.d != 1:
        raise ValueError("trace takes a form on R^n (d = 1)")
    n = alpha.n
    if alpha.is_constant:
        acc = KCovector(n * d, alpha.degree, {})
        for j in range(d):
            acc = acc.add(block_embed(alpha.constant_value, j, n, d))
        return KForm.constant(acc, n, d, invariance="full")

    def coeff(x: np.ndarray) -> KCovector:
        x = np.asarray(x, dtype=np.float64).reshape(n * d)
        acc = KCovector(n * d, alpha.degree, {})
        for j in range(d):
            acc = acc.add(block_embed(alpha.at(x[j * n : (j + 1) * n]), j, n, d))
        return acc

    deriv = None
    if alpha.analytic_derivative is not None:
        base_d = alpha.analytic_derivative

        def deriv(x: np.ndarray) -> KCovector:
            x = np.asarray(x, dtype=np.float64).reshape(n * d)
            acc = KCovector(n * d, alpha.degree + 1, {})
            for j in range(d):
                acc = acc.add(block_embed(base_d(x[j * n : (j + 1) * n]), j, n, d))
            return acc

    return KForm(
        degree=alpha.degree, n=n, d=d, coeff_fn=coeff, analytic_derivative=deriv, invariance="full"
    )


def natural_volume_form(n: int, d: int) -> KForm:
    """Trace of the volume form of R^n: the canonical n-form on the tuple space."""
    vol = KForm.constant(volume_covector(n), n, 1, invariance="full")
    return trace_form(vol, d)


def wedge(f1: KForm, f2: KForm) -> KForm:
    """Pointwise wedge (signed index merge of elementary covectors)."""
    if f1.n != f2.n or f1.d != f2.d:
        raise ValueError("wedge requires the same ambient space")
    if f1.degree + f2.degree > f1.dim:
        raise ValueError("degree overflow")
    if f1.is_constant and f2.is_constant:
        return KForm.constant(f1.constant_value.wedge(f2.constant_value), f1.n, f1.d)
    a, b = f1, f2
    deriv = None
    if a.analytic_derivative and b.analytic_derivative:
        sign = -1.0 if a.degree % 2 else 1.0
        deriv = lambda x: a.analytic_derivative(x).wedge(b.at(x)).add(
            a.at(x).wedge(b.analytic_derivative(x)), sign
        )
    return KForm(
        degree=f1.degree + f2.degree,
        n=f1.n,
        d=f1.d,
        coeff_fn=lambda x: a.at(x).wedge(b.at(x)),
        analytic_derivative=deriv,
        invariance="none",
    )


def tensor_product(f0: KForm, f1: KForm) -> KForm:
    """P0* f0 ^ P1* f1 on (R^n)^{d0+d1}; split-invariant when the factors are."""
    if f0.n != f1.n:
        raise ValueError("tensor product requires the same base dimension")
    n, d0, d1 = f0.n, f0.d, f1.d
    d = d0 + d1
    tag = ("split", d0, d1) if f0.invariance == "full" and f1.invariance == "full" else "none"

    def lift(form: KForm, offset_blocks: int, nblocks: int):
        # reinterpret a covector on (R^n)^{form.d} inside (R^n)^d
        def at(x: np.ndarray) -> KCovector:
            x = np.asarray(x, dtype=np.float64).reshape(n * d)
            sub = x[offset_blocks * n : (offset_blocks + nblocks) * n]
            cov = form.at(sub)
            return KCovector(
                n * d,
                cov.degree,
                {tuple(i + offset_blocks * n for i in I): c for I, c in cov.coeffs.items()},
            )

        return at

    at0 = lift(f0, 0, d0)
    at1 = lift(f1, d0, d1)
    const = f0.is_constant and f1.is_constant
    if const:
        x0 = np.zeros(n * d)
        return KForm.constant(at0(x0).wedge(at1(x0)), n, d, invariance=tag)
    deriv = None
    if f0.analytic_derivative and f1.analytic_derivative:
        def lift_d(form: KForm, offset_blocks: int, nblocks: int):
            def at(x: np.ndarray) -> KCovector:
                x = np.asarray(x, dtype=np.float64).reshape(n * d)
                sub = x[offset_blocks * n : (offset_blocks + nblocks) * n]
                cov = form.analytic_derivative(sub)
                return KCovector(
                    n * d,
                    cov.degree,
                    {tuple(i + offset_blocks * n for i in I): c for I, c in cov.coeffs.items()},
                )

            return at

        d_at0 = lift_d(f0, 0, d0)
        d_at1 = lift_d(f1, d0, d1)
        sign = -1.0 if f0.degree % 2 else 1.0
        deriv = lambda x: d_at0(x).wedge(at1(x)).add(at0(x).wedge(d_at1(x)), sign)
    return KForm(
        degree=f0.degree + f1.degree,
        n=n,
        d=d,
        coeff_fn=lambda x: at0(x).wedge(at1(x)),
        analytic_derivative=deriv,
        invariance=tag,
    )


# ---------------------------------------------------------------------------
# comass


@dataclass
class ComassSettings:
    n_starts: int = 64
    max_iters: int = 10_000
    tol: float = 1e-9
    seed: int = 0


@dataclass
class ComassResult:
    value: float
    frame: np.ndarray
    converged: bool
    n_starts: int
    sweeps: int


def _halton(index: int, base: int) -> float:
    f, r = 1.0, 0.0
    i = index
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71]


def _halton_gaussian(index: int, dim: int) -> np.ndarray:
    """Deterministic quasi-random Gaussian vector via Halton + Box-Muller."""
    m = (dim + 1) // 2
    out = np.empty(2 * m)
    for j in range(m):
        b1 = _PRIMES[(2 * j) % len(_PRIMES)]
        b2 = _PRIMES[(2 * j + 1) % len(_PRIMES)]
        u1 = min(max(_halton(index + 1, b1), 1e-12), 1 - 1e-12)
        u2 = _halton(index + 1, b2)
        r = np.sqrt(-2.0 * np.log(u1))
        out[2 * j] = r * np.cos(2 * np.pi * u2)
        out[2 * j + 1] = r * np.sin(2 * np.pi * u2)
    return out[:dim]


def _grad_row(cov: KCovector, V: np.ndarray, a: int) -> np.ndarray:
    """Gradient of cov(V) with respect to row a (cofactor expansion)."""
    k, N = V.shape
    g = np.zeros(N)
    rows = [r for r in range(k) if r != a]
    for I, c in cov.coeffs.items():
        M = V[:, I]
        if k == 1:
            for b, i in enumerate(I):
                g[i] += c
            continue
        sub = M[rows, :]
        for b, i in enumerate(I):
            cols = [x for x in range(k) if x != b]
            minor = sub[:, cols]
            det = float(np.linalg.det(minor)) if k > 2 else float(minor[0, 0])
            g[i] += c * ((-1) ** (a + b)) * det
    return g


def comass(form: KForm, x: np.ndarray, settings: ComassSettings | None = None) -> ComassResult:
    """Certified lower bound for the comass of a form at a point.

    Maximizes the covector over frames of unit vectors by multi-start
    blockwise ascent: each row update replaces v_a with the normalized
    gradient, which solves the restricted (linear) problem exactly, so the
    objective never decreases.  Starts include the elementary frames of the
    covector's support (exact for single elementary covector forms) plus
    quasi-random frames.
    """
    settings = settings or ComassSettings()
    cov = form.at(x)
    k, N = cov.degree, cov.dim
    if k == 0:
        return ComassResult(abs(cov((np.zeros((0, N))))), np.zeros((0, N)), True, 0, 0)
    if k == 1:
        g = np.zeros(N)
        for I, c in cov.coeffs.items():
            g[I[0]] += c
        norm = float(np.linalg.norm(g))
        frame = (g / norm)[None, :] if norm > 0 else np.zeros((1, N))
        return ComassResult(norm, frame, True, 1, 1)

    starts: list[np.ndarray] = []
    by_mag = sorted(cov.coeffs.items(), key=lambda kv: -abs(kv[1]))
    for I, c in by_mag[: max(4, settings.n_starts // 4)]:
        V = np.zeros((k, N))
        for b, i in enumerate(I):
            V[b, i] = 1.0
        if c < 0:
            V[0] *= -1.0
        starts.append(V)
    idx = 0
    while len(starts) < settings.n_starts:
        V = _halton_gaussian(idx * k * N + 7, k * N).reshape(k, N).copy()
        norms = np.linalg.norm(V, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        starts.append(V / norms)
        idx += 1

    best_val = -np.inf
    best_frame = starts[0]
    best_conv = False
    best_sweeps = 0
    for V0 in starts:
        V = V0.copy()
        val = cov(V)
        converged = False
        sweeps = 0
        for sweep in range(settings.max_iters):
            sweeps = sweep + 1
            improved = val
            for a in range(k):
                g = _grad_row(cov, V, a)
                norm = float(np.linalg.norm(g))
                if norm > 0:
                    V[a] = g / norm
            val = cov(V)
            if val - improved <= settings.tol:
                converged = True
                break
        if val > best_val:
            best_val = val
            best_frame = V
            best_conv = converged
            best_sweeps = sweeps
    return ComassResult(float(best_val), best_frame, best_conv, len(starts), best_sweeps)


# ---------------------------------------------------------------------------
# exterior derivative


def exterior_derivative(form: KForm, fd_step: float = 1e-5) -> KForm:
    """d of a form: analytic if available, else Richardson-refined central FD."""
    N = form.dim
    k = form.degree
    if form.analytic_derivative is not None:
        base_d = form.analytic_derivative
        return KForm(
            degree=k + 1, n=form.n, d=form.d, coeff_fn=lambda x: base_d(x), invariance=form.invariance
        )

    base = form.at

    def coeff(x: np.ndarray) -> KCovector:
        x = np.asarray(x, dtype=np.float64).reshape(N)
        partials: list[dict[tuple[int, ...], float]] = []
        for i in range(N):
            e = np.zeros(N)
            e[i] = 1.0

            def delta(h: float) -> KCovector:
                return base(x + h * e).add(base(x - h * e), -1.0).scaled(1.0 / (2.0 * h))

            d1 = delta(fd_step)
            d2 = delta(fd_step / 2.0)
            rich = d2.scaled(4.0 / 3.0).add(d1, -1.0 / 3.0)
            partials.append(rich.coeffs)
        out: dict[tuple[int, ...], float] = {}
        keys = set()
        for p in partials:
            keys.update(p.keys())
        for I in keys:
            for i in range(N):
                c = partials[i].get(I, 0.0)
                if c == 0.0:
                    continue
                J, sign = _sort_with_sign((i,) + I)
                if sign == 0:
                    continue
                out[J] = out.get(J, 0.0) + sign * c
        out = {J: c for J, c in out.items() if c != 0.0}
        return KCovector(N, k + 1, out)

    return KForm(degree=k + 1, n=form.n, d=form.d, coeff_fn=coeff, invariance=form.invariance)


# ---------------------------------------------------------------------------
# polynomial coefficient helpers (used by the DSL and tests)


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial on R^m: exponent tuple -> coefficient."""

    nvars: int
    terms: dict[tuple[int, ...], float]

    def __call__(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        total = 0.0
        for exps, c in self.terms.items():
            v = c
            for xi, e in zip(x, exps):
                if e:
                    v *= xi**e
            total += v
        return total

    def partial(self, i: int) -> "MultiPoly":
        out: dict[tuple[int, ...], float] = {}
        for exps, c in self.terms.items():
            if exps[i] == 0:
                continue
            new = list(exps)
            new[i] -= 1
            key = tuple(new)
            out[key] = out.get(key, 0.0) + c * exps[i]
        return MultiPoly(self.nvars, out)


def polynomial_one_form(n: int, components: list[MultiPoly]) -> KForm:
    """sum_b p_b dx_b on R^n with exact exterior derivative."""
    if len(components) != n:
        raise ValueError("need one polynomial per coordinate")

    def coeff(x: np.ndarray) -> KCovector:
        return KCovector(n, 1, {(b,): components[b](x) for b in range(n) if components[b](x) != 0.0})

    partials = [[components[b].partial(i) for i in range(n)] for b in range(n)]

    def deriv(x: np.ndarray) -> KCovector:
        out: dict[tuple[int, ...], float] = {}
        for i in range(n):
            for b in range(n):
                if i >= b:
                    continue
                c = partials[b][i](x) - partials[i][b](x)
                if c != 0.0:
                    out[(i, b)] = c
        return KCovector(n, 2, out)

    return KForm(degree=1, n=n, d=1, coeff_fn=coeff, analytic_derivative=deriv, invariance="none")
