"""Dense real polynomials plus the spectral helpers built on top of them.

Coefficients are stored ascending (c0 + c1*z + ...) and canonically trimmed.
Degrees stay tiny (<= 8) throughout the package, so plain Horner arithmetic
is both exact enough and fast. Classical-polynomial zeros are computed as
Jacobi-matrix eigenvalues rather than from monomial coefficients: the
three-term recurrences are perfectly conditioned, while companion matrices
of H_N or L_N^b degrade badly past N ~ 20.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError

TRIM_TOL = 1e-14


def _trim(coeffs) -> tuple[float, ...]:
    cs = [float(c) for c in coeffs]
    if not cs:
        cs = [0.0]
    while len(cs) > 1 and abs(cs[-1]) <= TRIM_TOL:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class Poly:
    """Immutable real polynomial with ascending coefficients."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> float:
        """Coefficient of z**i (0 beyond the stored degree)."""
        return self.coeffs[i] if i < len(self.coeffs) else 0.0

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    def __call__(self, z):
        arr = np.asarray(z)
        acc = np.zeros(arr.shape, dtype=np.result_type(arr.dtype, float))
        for c in reversed(self.coeffs):
            acc = acc * arr + c
        if arr.shape == ():
            return acc[()].item()
        return acc

    def derivative(self) -> "Poly":
        if self.degree == 0:
            return Poly((0.0,))
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def divided_difference(self, w: float) -> "Poly":
        """(p(z) - p(w)) / (z - w) as a polynomial, by synthetic division."""
        d = self.degree
        if d == 0:
            return Poly((0.0,))
        q = [0.0] * d
        q[d - 1] = self.coeffs[d]
        for i in range(d - 1, 0, -1):
            q[i - 1] = self.coeffs[i] + w * q[i]
        return Poly(q)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(tuple((a[i] if i < len(a) else 0.0) + (b[i] if i < len(b) else 0.0)
                          for i in range(n)))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Poly):
            out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return Poly(out)
        return Poly(tuple(float(other) * c for c in self.coeffs))

    __rmul__ = __mul__


def divmod_poly(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Long division num = quot*den + rem with deg(rem) < deg(den)."""
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    r = list(num.coeffs)
    d = den.degree
    lead = den.coeffs[d]
    if len(r) - 1 < d:
        return Poly((0.0,)), num
    q = [0.0] * (len(r) - d)
    for i in range(len(r) - 1, d - 1, -1):
        f = r[i] / lead
        q[i - d] = f
        for j in range(d + 1):
            r[i - d + j] -= f * den.coeffs[j]
    return Poly(q), Poly(r[:d] if d > 0 else [0.0])


@dataclass(frozen=True)
class Tridiag:
    """Symmetric tridiagonal matrix (diagonal + one off-diagonal)."""

    diag: tuple[float, ...]
    offdiag: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(float(x) for x in self.diag))
        object.__setattr__(self, "offdiag", tuple(float(x) for x in self.offdiag))
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must have n-1 entries")

    @property
    def n(self) -> int:
        return len(self.diag)


def tridiag_eigenvalues(t: Tridiag, k: int | None = None) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix, ascending.

    With k given, only the k smallest are computed (cheaper for large FD
    grids). Backed by LAPACK via scipy.linalg.eigh_tridiagonal, which is
    deterministic for fixed input.
    """
    n = t.n
    if n < 1:
        raise ValueError("empty matrix")
    d = np.asarray(t.diag, dtype=float)
    if n == 1:
        return d.copy()
    e = np.asarray(t.offdiag, dtype=float)
    try:
        if k is None or k >= n:
            w = scipy.linalg.eigh_tridiagonal(d, e, eigvals_only=True)
        else:
            if k < 1:
                raise ValueError("k must be >= 1")
            w = scipy.linalg.eigh_tridiagonal(
                d, e, eigvals_only=True, select="i", select_range=(0, k - 1))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    return np.sort(w)


def hermite_zeros(n: int) -> np.ndarray:
    """Zeros of the physicists' Hermite polynomial H_n, ascending.

    Jacobi matrix of the monic recurrence: diagonal 0, off-diagonal
    sqrt(k/2). Output is symmetrized about 0 exactly.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return np.zeros(0)
    off = np.sqrt(np.arange(1, n) / 2.0)
    w = tridiag_eigenvalues(Tridiag(tuple([0.0] * n), tuple(off)))
    return (w - w[::-1]) / 2.0


def laguerre_zeros(n: int, beta: float) -> np.ndarray:
    """Zeros of the generalized Laguerre polynomial L_n^beta, ascending.

    Requires beta > -1 (classical orthogonality range); all zeros are then
    strictly positive.
    """
    if beta <= -1.0:
        raise ValueError(f"beta must be > -1 (got {beta})")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return np.zeros(0)
    ks = np.arange(n, dtype=float)
    diag = 2.0 * ks + beta + 1.0
    off = np.sqrt(np.arange(1, n) * (np.arange(1, n) + beta))
    return tridiag_eigenvalues(Tridiag(tuple(diag), tuple(off)))
