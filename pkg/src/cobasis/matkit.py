"""Self-contained dense linear algebra on small matrices.

Symmetric eigendecomposition via cyclic Jacobi rotations, SVD built on top of
it, modified Gram-Schmidt orthonormalization, fractional powers of positive
semi-definite matrices, and Haar-distributed random orthogonal matrices.

Everything works on plain 2-D float64 numpy arrays and is deterministic:
identical inputs produce bit-identical outputs. Intended for matrices up to a
few hundred rows; no attempt is made to compete with LAPACK on conditioning
or speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinalgError",
    "ConvergenceError",
    "RankDeficiencyError",
    "SymEigen",
    "SvdResult",
    "as_matrix",
    "sym_eigen",
    "svd",
    "gram_schmidt",
    "psd_power",
    "random_orthogonal",
]

# Jacobi sweeps are capped; convergence is relative to the input Frobenius norm.
JACOBI_SWEEP_CAP = 100
JACOBI_OFFDIAG_TOL = 1e-14

# Columns with residual norm at or below this are treated as linearly dependent.
GRAM_SCHMIDT_RESIDUAL_MIN = 1e-12


class LinalgError(ValueError):
    """A matrix routine received invalid input or hit a numerical failure."""


class ConvergenceError(LinalgError):
    """Iteration cap reached before the convergence threshold."""


class RankDeficiencyError(LinalgError):
    """Input columns are numerically linearly dependent."""


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Validate `a` as a non-empty 2-D float64 matrix with finite entries.

    Returns a float64 array (a copy only when conversion requires one).
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise LinalgError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LinalgError("matrix entries must be finite")
    if square and m.shape[0] != m.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass
class SymEigen:
    """Eigendecomposition of a symmetric matrix.

    values is sorted non-increasing; column i of vectors is the unit
    eigenvector for values[i]. Sign convention: in each eigenvector the entry
    of largest absolute value is positive (ties broken by lowest index).
    """

    values: np.ndarray
    vectors: np.ndarray


@dataclass
class SvdResult:
    """Full singular value decomposition u @ diag(singular) @ v.T.

    u is n x n orthogonal, v is m x m orthogonal, singular holds the
    min(n, m) singular values sorted non-increasing.
    """

    u: np.ndarray
    singular: np.ndarray
    v: np.ndarray


def _offdiag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sqrt(np.sum(off * off)))


def sym_eigen(a) -> SymEigen:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    The input is symmetrized as (a + a.T)/2 before iterating, but an
    asymmetry above 1e-9 relative to the largest entry is rejected as a
    caller error. Raises ConvergenceError if the off-diagonal mass has not
    dropped below the threshold after the sweep cap (ill-conditioned input).
    """
    a = as_matrix(a, square=True)
    scale = float(np.max(np.abs(a)))
    if float(np.max(np.abs(a - a.T))) > 1e-9 * scale:
        raise LinalgError("input matrix is not symmetric")

    work = (a + a.T) / 2.0
    n = work.shape[0]
    q = np.eye(n)
    tol = JACOBI_OFFDIAG_TOL * float(np.sqrt(np.sum(work * work)))
    # Pivots this small cannot keep the off-diagonal mass above tol.
    skip = tol / (2.0 * n)

    for _ in range(JACOBI_SWEEP_CAP):
        if _offdiag_norm(work) <= tol:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = work[p, r]
                if abs(apr) <= skip:
                    continue
                tau = (work[r, r] - work[p, p]) / (2.0 * apr)
                if abs(tau) > 1e154:
                    t = 1.0 / (2.0 * tau)
                else:
                    sign = 1.0 if tau >= 0.0 else -1.0
                    t = sign / (abs(tau) + math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = work[:, p].copy()
                col_r = work[:, r].copy()
                work[:, p] = c * col_p - s * col_r
                work[:, r] = s * col_p + c * col_r
                row_p = work[p, :].copy()
                row_r = work[r, :].copy()
                work[p, :] = c * row_p - s * row_r
                work[r, :] = s * row_p + c * row_r
                work[p, r] = 0.0
                work[r, p] = 0.0

                q_p = q[:, p].copy()
                q_r = q[:, r].copy()
                q[:, p] = c * q_p - s * q_r
                q[:, r] = s * q_p + c * q_r
        # Rotations drift symmetry by roundoff; restore it each sweep.
        work = (work + work.T) / 2.0
    else:
        if _offdiag_norm(work) > tol:
            raise ConvergenceError(
                f"Jacobi sweeps did not converge within {JACOBI_SWEEP_CAP} sweeps"
            )

    values = np.diag(work).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = q[:, order]
    for j in range(n):
        col = vectors[:, j]
        if col[int(np.argmax(np.abs(col)))] < 0.0:
            vectors[:, j] = -col
    return SymEigen(values=values, vectors=vectors)


def _polar_orthogonal(b: np.ndarray) -> np.ndarray:
    """Orthogonal polar factor b @ (b.T b)^(-1/2) of a well-conditioned block."""
    e = sym_eigen(b.T @ b)
    inv_sqrt = (e.vectors / np.sqrt(np.maximum(e.values, 1e-300))) @ e.vectors.T
    return b @ inv_sqrt


def svd(m) -> SvdResult:
    """Singular value decomposition via eigenvectors of the two Gram matrices.

    u comes from sym_eigen(m @ m.T) and v from sym_eigen(m.T @ m); column
    signs of v are flipped so the diagonal of u.T @ m @ v is non-negative.
    Within groups of (near-)equal nonzero singular values the two
    eigendecompositions fix their bases independently, so v is additionally
    rotated by the orthogonal polar factor of the corresponding diagonal
    block; without this, u.T @ m @ v would not be diagonal for degenerate
    inputs such as rotation matrices.
    """
    m = as_matrix(m)
    n_rows, n_cols = m.shape
    left = sym_eigen(m @ m.T)
    right = sym_eigen(m.T @ m)
    u = left.vectors
    v = right.vectors
    r = min(n_rows, n_cols)
    singular = np.sqrt(np.maximum(left.values[:r], 0.0))

    d = u.T @ m @ v
    for i in range(r):
        if d[i, i] < 0.0:
            v[:, i] = -v[:, i]
            d[:, i] = -d[:, i]

    s_max = float(singular[0]) if r > 0 else 0.0
    if s_max > 0.0:
        gap_tol = 1e-8 * s_max
        start = 0
        while start < r:
            stop = start + 1
            while stop < r and singular[stop - 1] - singular[stop] <= gap_tol:
                stop += 1
            group = np.arange(start, stop)
            if len(group) > 1 and singular[stop - 1] > gap_tol:
                w = _polar_orthogonal(d[np.ix_(group, group)])
                v[:, group] = v[:, group] @ w.T
                d[:, group] = d[:, group] @ w.T
                for i in group:
                    if d[i, i] < 0.0:
                        v[:, i] = -v[:, i]
                        d[:, i] = -d[:, i]
            start = stop

    return SvdResult(u=u, singular=singular, v=v)


def gram_schmidt(m) -> np.ndarray:
    """Orthonormalize the columns of a square matrix by modified Gram-Schmidt.

    Two MGS passes are run; the second restores full orthogonality for
    moderately ill-conditioned input ("twice is enough"). The span of the
    first i columns is preserved for every i. Raises RankDeficiencyError when
    a column's residual norm falls to 1e-12 or below.
    """
    q = as_matrix(m, square=True).copy()
    n = q.shape[0]
    for _ in range(2):
        for j in range(n):
            for i in range(j):
                q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
            norm = float(np.sqrt(q[:, j] @ q[:, j]))
            if norm <= GRAM_SCHMIDT_RESIDUAL_MIN:
                raise RankDeficiencyError(
                    f"column {j} is numerically dependent on earlier columns"
                )
            q[:, j] /= norm
    return q


def psd_power(b, p: float) -> np.ndarray:
    """Fractional power of a symmetric positive semi-definite matrix.

    Small negative eigenvalues (down to -1e-9 of the largest) are treated as
    roundoff and clamped to zero; anything more negative raises LinalgError.
    """
    if not p > 0.0:
        raise LinalgError(f"power must be positive, got {p}")
    e = sym_eigen(b)
    lam_max = max(float(e.values[0]), 0.0)
    if float(e.values[-1]) < -1e-9 * lam_max - 1e-30:
        raise LinalgError("matrix has a significantly negative eigenvalue; not PSD")
    powered = np.maximum(e.values, 0.0) ** p
    out = (e.vectors * powered) @ e.vectors.T
    return (out + out.T) / 2.0


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random n x n orthogonal matrix.

    Gram-Schmidt QR of a standard-Gaussian matrix; the R factor's diagonal is
    positive by construction, which is exactly the sign correction that makes
    the distribution Haar. Same generator state gives an identical matrix.
    """
    if n < 1:
        raise LinalgError(f"dimension must be at least 1, got {n}")
    return gram_schmidt(rng.standard_normal((n, n)))
