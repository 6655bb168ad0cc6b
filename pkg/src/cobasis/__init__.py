"""Optimization of a single orthonormal basis pair shared by a set of matrices."""

from .csvd_core import (
    BasisPair,
    CsvdConfig,
    DegenerateAverageError,
    MatrixSet,
    coefficients,
    csvd,
    gram_power_sums,
    mean_svd,
    mixing_diagnostic,
    normalize_rc,
)
from .matkit import (
    ConvergenceError,
    LinalgError,
    RankDeficiencyError,
    SvdResult,
    SymEigen,
    gram_schmidt,
    psd_power,
    random_orthogonal,
    svd,
    sym_eigen,
)
from .orthopt import (
    ABS,
    NEG_POW4,
    SQUARE,
    DescentResult,
    EvalFunction,
    GeneratorPair,
    GradOptConfig,
    descend,
    eval_function,
    gradient,
    objective,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ABS",
    "BasisPair",
    "ConvergenceError",
    "CsvdConfig",
    "DegenerateAverageError",
    "DescentResult",
    "EvalFunction",
    "GeneratorPair",
    "GradOptConfig",
    "LinalgError",
    "MatrixSet",
    "NEG_POW4",
    "RankDeficiencyError",
    "SQUARE",
    "SvdResult",
    "SymEigen",
    "coefficients",
    "csvd",
    "descend",
    "eval_function",
    "gradient",
    "gram_power_sums",
    "gram_schmidt",
    "mean_svd",
    "mixing_diagnostic",
    "normalize_rc",
    "objective",
    "psd_power",
    "random_orthogonal",
    "svd",
    "sym_eigen",
]
