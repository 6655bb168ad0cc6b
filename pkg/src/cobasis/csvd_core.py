"""Common-basis extraction for a weighted set of matrices.

The central routine picks a shared orthogonal pair (u, v) as eigenvectors of
the weighted sums of powered Gram matrices

    sum_k w_k^q (A_k A_k^T)^p      and      sum_k w_k^q (A_k^T A_k)^p,

optionally after per-matrix marginal removal A -> A - r c^T built from the
row sums r and column sums c. A plain weighted-average-then-SVD baseline, the
coefficient tensor u.T A_k v, and a self/cross interference diagnostic for
the powered Gram sums live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit

__all__ = [
    "NORMALIZATION_MODES",
    "DegenerateAverageError",
    "MatrixSet",
    "CsvdConfig",
    "BasisPair",
    "normalize_rc",
    "apply_normalization",
    "gram_power_sums",
    "csvd",
    "mean_svd",
    "coefficients",
    "mixing_diagnostic",
]

NORMALIZATION_MODES = ("none", "rc", "rc_scaled")

# Orthogonality tolerance (max-abs of u.T u - I) accepted by BasisPair.
BASIS_ORTHO_TOL = 1e-10


class DegenerateAverageError(ValueError):
    """The weighted average of the set is numerically zero; its SVD basis is
    meaningless."""


@dataclass
class MatrixSet:
    """A list of K equally sized matrices with non-negative weights.

    Weights default to all ones. At least one weight must be positive.
    """

    matrices: list[np.ndarray]
    weights: np.ndarray | None = None

    def __post_init__(self):
        if len(self.matrices) < 1:
            raise ValueError("matrix set must contain at least one matrix")
        self.matrices = [matkit.as_matrix(a) for a in self.matrices]
        shape = self.matrices[0].shape
        for idx, a in enumerate(self.matrices):
            if a.shape != shape:
                raise ValueError(
                    f"matrix {idx} has shape {a.shape}, expected {shape}"
                )
        if self.weights is None:
            self.weights = np.ones(len(self.matrices))
        else:
            self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (len(self.matrices),):
            raise ValueError("need exactly one weight per matrix")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0.0):
            raise ValueError("weights must be finite and non-negative")
        if not np.any(self.weights > 0.0):
            raise ValueError("at least one weight must be positive")

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrices[0].shape


@dataclass(frozen=True)
class CsvdConfig:
    """Powers and normalization mode for the common-basis extraction.

    p is applied to the Gram matrices, q to the weights; both must lie in
    (0, 16]. normalization is one of "none", "rc", "rc_scaled".
    """

    p: float = 1.0
    q: float = 1.0
    normalization: str = "none"

    def __post_init__(self):
        if not (0.0 < self.p <= 16.0):
            raise ValueError(f"p must lie in (0, 16], got {self.p}")
        if not (0.0 < self.q <= 16.0):
            raise ValueError(f"q must lie in (0, 16], got {self.q}")
        if self.normalization not in NORMALIZATION_MODES:
            raise ValueError(
                f"normalization must be one of {NORMALIZATION_MODES}, "
                f"got {self.normalization!r}"
            )


@dataclass
class BasisPair:
    """Orthogonal u (n x n) and v (m x m) whose columns are the shared bases."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = matkit.as_matrix(self.u, square=True)
        self.v = matkit.as_matrix(self.v, square=True)
        for name, mat in (("u", self.u), ("v", self.v)):
            err = np.max(np.abs(mat.T @ mat - np.eye(mat.shape[0])))
            if err > BASIS_ORTHO_TOL:
                raise ValueError(
                    f"{name} is not orthogonal (max deviation {err:.3e})"
                )


def normalize_rc(a, scaled: bool = False) -> np.ndarray:
    """Subtract the outer product of row sums and column sums from a matrix.

    With scaled=True the outer product is divided by the total sum s, which
    makes every row and column sum of the result exactly zero; this variant
    is undefined (raises ValueError) when |s| <= 1e-12.
    """
    a = matkit.as_matrix(a)
    row = a.sum(axis=1)
    col = a.sum(axis=0)
    outer = np.outer(row, col)
    if scaled:
        total = float(a.sum())
        if abs(total) <= 1e-12:
            raise ValueError("total sum is numerically zero; scaled removal undefined")
        return a - outer / total
    return a - outer


def apply_normalization(a: np.ndarray, mode: str) -> np.ndarray:
    """Apply the configured per-matrix normalization.

    "rc_scaled" falls back to the unscaled variant for matrices whose total
    sum is numerically zero.
    """
    if mode == "none":
        return matkit.as_matrix(a)
    if mode == "rc":
        return normalize_rc(a)
    if mode == "rc_scaled":
        try:
            return normalize_rc(a, scaled=True)
        except ValueError:
            return normalize_rc(a)
    raise ValueError(f"unknown normalization mode {mode!r}")


def _weight_powers(weights: np.ndarray, q: float) -> np.ndarray:
    # 0^q is defined as 0 for every q > 0: zero-weight matrices drop out.
    out = np.zeros_like(weights)
    pos = weights > 0.0
    out[pos] = weights[pos] ** q
    return out


def gram_power_sums(mset: MatrixSet, cfg: CsvdConfig) -> tuple[np.ndarray, np.ndarray]:
    """Weighted sums of powered Gram matrices for the row and column sides.

    Accumulation runs in ascending matrix index so the result is bit-stable.
    """
    n, m = mset.shape
    w_pow = _weight_powers(mset.weights, cfg.q)
    sum_left = np.zeros((n, n))
    sum_right = np.zeros((m, m))
    for a, wq in zip(mset.matrices, w_pow):
        if wq == 0.0:
            continue
        an = apply_normalization(a, cfg.normalization)
        sum_left += wq * matkit.psd_power(an @ an.T, cfg.p)
        sum_right += wq * matkit.psd_power(an.T @ an, cfg.p)
    return sum_left, sum_right


def csvd(mset: MatrixSet, cfg: CsvdConfig = CsvdConfig()) -> BasisPair:
    """Shared basis pair from eigenvectors of the weighted Gram-power sums.

    Columns are ordered by descending eigenvalue independently on each side,
    with the sym_eigen sign convention, so the output is deterministic.
    """
    sum_left, sum_right = gram_power_sums(mset, cfg)
    return BasisPair(
        u=matkit.sym_eigen(sum_left).vectors,
        v=matkit.sym_eigen(sum_right).vectors,
    )


def mean_svd(mset: MatrixSet) -> BasisPair:
    """Baseline basis: SVD of the plain weighted average of the set.

    Raises DegenerateAverageError when the average cancels to numerical zero.
    """
    avg = np.zeros(mset.shape)
    for a, w in zip(mset.matrices, mset.weights):
        avg += w * a
    largest = max(float(np.sqrt(np.sum(a * a))) for a in mset.matrices)
    if float(np.sqrt(np.sum(avg * avg))) < 1e-12 * largest:
        raise DegenerateAverageError(
            "weighted average of the set is numerically zero"
        )
    res = matkit.svd(avg)
    return BasisPair(u=res.u, v=res.v)


def coefficients(
    mset: MatrixSet, basis: BasisPair, normalization: str = "none"
) -> np.ndarray:
    """Coefficient tensor of the set in the shared basis, shape (K, n, m).

    Entry [k, i, j] is the coefficient of matrix k on basis columns (i, j);
    matrices are normalized per `normalization` before projection.
    """
    n, m = mset.shape
    if basis.u.shape[0] != n or basis.v.shape[0] != m:
        raise ValueError(
            f"basis of shape {basis.u.shape[0]}x{basis.v.shape[0]} does not "
            f"match matrices of shape {n}x{m}"
        )
    return np.stack(
        [basis.u.T @ apply_normalization(a, normalization) @ basis.v
         for a in mset.matrices]
    )


def mixing_diagnostic(
    mset: MatrixSet, basis: BasisPair, cfg: CsvdConfig
) -> tuple[float, float]:
    """Split the squared Rayleigh mass of the Gram-power sum into self and
    cross contributions.

    Returns (self_term, mixing_term) where, over the powered Gram matrices
    B_k and powered weights wq_k,

        self_term   = sum_{k, i}      wq_k^2       u_i.T B_k^2    u_i
        mixing_term = sum_{k != k', i} wq_k wq_k'  u_i.T B_k B_k' u_i.

    A large mixing term signals interference between the matrices in the
    shared-basis objective. For a basis of eigenvectors of sum_k wq_k B_k the
    two terms add up to sum_i (u_i.T (sum_k wq_k B_k) u_i)^2.
    """
    n, _ = mset.shape
    if basis.u.shape[0] != n:
        raise ValueError("basis does not match the matrix set")
    w_pow = _weight_powers(mset.weights, cfg.q)
    active = [
        (wq, apply_normalization(a, cfg.normalization))
        for a, wq in zip(mset.matrices, w_pow)
        if wq > 0.0
    ]
    weights = np.array([wq for wq, _ in active])
    projections = [
        matkit.psd_power(an @ an.T, cfg.p) @ basis.u for _, an in active
    ]
    k = len(active)
    pair_sums = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            pair_sums[i, j] = pair_sums[j, i] = float(
                np.sum(projections[i] * projections[j])
            )
    self_term = float(np.sum(weights**2 * np.diag(pair_sums)))
    total = float(weights @ pair_sums @ weights)
    return self_term, total - self_term
