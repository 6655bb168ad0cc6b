"""Direct minimization of a coordinate-wise objective over orthogonal pairs.

The objective sum_{ijk} w_k f(c_ijk) with c = u.T A_k v is driven down by
steepest descent in the antisymmetric generators of the orthogonal group:
u -> u (I - eps G), v -> v (I - eps H), re-orthonormalized by Gram-Schmidt
after every step. The step size is picked per iteration by trying a small
candidate set and keeping the best; eps = 0 is always a candidate, so the
objective trace never increases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import matkit
from .csvd_core import BasisPair, CsvdConfig, MatrixSet, csvd

__all__ = [
    "EvalFunction",
    "ABS",
    "NEG_POW4",
    "SQUARE",
    "eval_function",
    "GradOptConfig",
    "GeneratorPair",
    "DescentResult",
    "objective",
    "gradient",
    "descend",
]

# Iterations with relative improvement below rel_tol needed before stopping.
STALL_WINDOW = 10


@dataclass(frozen=True)
class EvalFunction:
    """Coordinate-wise evaluation function with its derivative.

    f and fprime act elementwise on arrays. The "square" kind is a
    diagnostic: its objective is invariant under any orthogonal basis change.
    """

    kind: str
    f: Callable[[np.ndarray], np.ndarray]
    fprime: Callable[[np.ndarray], np.ndarray]


ABS = EvalFunction("abs", np.abs, np.sign)  # subgradient 0 at x = 0
NEG_POW4 = EvalFunction("neg_pow4", lambda x: -(x**4), lambda x: -4.0 * x**3)
SQUARE = EvalFunction("square", np.square, lambda x: 2.0 * x)

_EVAL_FUNCTIONS = {e.kind: e for e in (ABS, NEG_POW4, SQUARE)}


def eval_function(kind: str) -> EvalFunction:
    """Look up an evaluation function by kind name."""
    try:
        return _EVAL_FUNCTIONS[kind]
    except KeyError:
        raise ValueError(
            f"unknown evaluation function {kind!r}; "
            f"expected one of {sorted(_EVAL_FUNCTIONS)}"
        ) from None


@dataclass(frozen=True)
class GradOptConfig:
    """Settings for the orthogonal-pair descent.

    init is "identity", "csvd" (requires csvd_cfg) or "random" (uses seed).
    symmetric=True keeps u = v throughout (square matrices only).
    """

    eval: EvalFunction = NEG_POW4
    step_candidates: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 1e-1)
    max_iters: int = 5000
    rel_tol: float = 1e-9
    symmetric: bool = False
    init: str = "identity"
    seed: int = 0
    csvd_cfg: CsvdConfig | None = None

    def __post_init__(self):
        if len(self.step_candidates) == 0:
            raise ValueError("step_candidates must not be empty")
        if any(eps <= 0.0 for eps in self.step_candidates):
            raise ValueError("step candidates must all be positive")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.init not in ("identity", "csvd", "random"):
            raise ValueError(f"unknown init mode {self.init!r}")


@dataclass
class GeneratorPair:
    """Antisymmetric generators for the two sides, exact by construction."""

    g: np.ndarray
    h: np.ndarray


@dataclass
class DescentResult:
    """Final basis plus the per-iteration objective trace.

    objectives[0] is the objective at the initial basis; accepted_steps[t] is
    the step size accepted at iteration t (0.0 both for the initial row and
    for iterations where no candidate improved).
    """

    basis: BasisPair
    objectives: list[float]
    accepted_steps: list[float]


def _antisymmetrize(m: np.ndarray) -> np.ndarray:
    upper = np.triu(m, 1)
    return upper - upper.T


def _objective_raw(mats, weights, u, v, ev: EvalFunction) -> float:
    total = 0.0
    for a, w in zip(mats, weights):
        total += w * float(np.sum(ev.f(u.T @ a @ v)))
    return total


def _gradient_raw(mats, weights, u, v, ev: EvalFunction, symmetric: bool) -> GeneratorPair:
    n = u.shape[0]
    m = v.shape[0]
    grad_u = np.zeros((n, n))
    grad_v = np.zeros((m, m))
    for a, w in zip(mats, weights):
        c = u.T @ a @ v
        fp = ev.fprime(c)
        grad_u += w * (c @ fp.T - fp @ c.T)
        grad_v += w * (c.T @ fp - fp.T @ c)
    if symmetric:
        combined = _antisymmetrize(grad_u + grad_v)
        return GeneratorPair(g=combined, h=combined)
    return GeneratorPair(g=_antisymmetrize(grad_u), h=_antisymmetrize(grad_v))


def objective(mset: MatrixSet, basis: BasisPair, ev: EvalFunction) -> float:
    """Weighted coordinate-wise objective sum_k w_k sum_ij f((u.T A_k v)_ij)."""
    _check_dims(mset, basis)
    return _objective_raw(mset.matrices, mset.weights, basis.u, basis.v, ev)


def gradient(
    mset: MatrixSet, basis: BasisPair, ev: EvalFunction, symmetric: bool = False
) -> GeneratorPair:
    """Objective derivatives with respect to the antisymmetric generators.

    Entry (a, b) of g, for a < b, is sum_{jk} w_k (f'(c_bjk) c_ajk -
    f'(c_ajk) c_bjk); h is the analogous column-side sum. In symmetric mode
    (square matrices, u = v) both slots hold the single combined generator.
    """
    _check_dims(mset, basis)
    n, m = mset.shape
    if symmetric and n != m:
        raise ValueError("symmetric mode requires square matrices")
    return _gradient_raw(
        mset.matrices, mset.weights, basis.u, basis.v, ev, symmetric
    )


def _check_dims(mset: MatrixSet, basis: BasisPair) -> None:
    n, m = mset.shape
    if basis.u.shape[0] != n or basis.v.shape[0] != m:
        raise ValueError(
            f"basis of shape {basis.u.shape[0]}x{basis.v.shape[0]} does not "
            f"match matrices of shape {n}x{m}"
        )


def _initial_basis(mset: MatrixSet, cfg: GradOptConfig) -> tuple[np.ndarray, np.ndarray]:
    n, m = mset.shape
    if cfg.init == "identity":
        return np.eye(n), np.eye(m)
    if cfg.init == "csvd":
        if cfg.csvd_cfg is None:
            raise ValueError("init='csvd' requires csvd_cfg")
        pair = csvd(mset, cfg.csvd_cfg)
        if cfg.symmetric:
            # Only one basis in symmetric mode; the row side wins.
            return pair.u, pair.u.copy()
        return pair.u, pair.v
    rng = np.random.default_rng(cfg.seed)
    u = matkit.random_orthogonal(n, rng)
    if cfg.symmetric:
        return u, u.copy()
    return u, matkit.random_orthogonal(m, rng)


def descend(mset: MatrixSet, cfg: GradOptConfig) -> DescentResult:
    """Minimize the objective by generator-space steepest descent.

    Per iteration every candidate step (plus eps = 0) is evaluated after
    Gram-Schmidt re-orthonormalization and the best one is kept, ties going
    to the smallest step. Stops at max_iters, at an exactly zero gradient, or
    after STALL_WINDOW consecutive iterations whose relative improvement is
    below rel_tol. The trace is non-increasing by construction.
    """
    n, m = mset.shape
    if cfg.symmetric and n != m:
        raise ValueError("symmetric mode requires square matrices")
    u, v = _initial_basis(mset, cfg)
    mats, weights = mset.matrices, mset.weights
    ev = cfg.eval

    obj = _objective_raw(mats, weights, u, v, ev)
    objectives = [obj]
    accepted_steps = [0.0]
    candidates = sorted(cfg.step_candidates)
    eye_n = np.eye(n)
    eye_m = np.eye(m)
    stall = 0

    for _ in range(cfg.max_iters):
        gen = _gradient_raw(mats, weights, u, v, ev, cfg.symmetric)
        if not gen.g.any() and not gen.h.any():
            break  # stationary point, nothing to try
        best_obj, best_u, best_v, best_eps = obj, u, v, 0.0
        for eps in candidates:
            cand_u = matkit.gram_schmidt(u @ (eye_n - eps * gen.g))
            if cfg.symmetric:
                cand_v = cand_u
            else:
                cand_v = matkit.gram_schmidt(v @ (eye_m - eps * gen.h))
            cand_obj = _objective_raw(mats, weights, cand_u, cand_v, ev)
            if cand_obj < best_obj:
                best_obj, best_u, best_v, best_eps = cand_obj, cand_u, cand_v, eps
        improvement = obj - best_obj
        rel = improvement / max(abs(obj), 1e-300)
        u, v, obj = best_u, best_v, best_obj
        objectives.append(obj)
        accepted_steps.append(best_eps)
        stall = stall + 1 if rel < cfg.rel_tol else 0
        if stall >= STALL_WINDOW:
            break

    return DescentResult(
        basis=BasisPair(u=u, v=v),
        objectives=objectives,
        accepted_steps=accepted_steps,
    )
