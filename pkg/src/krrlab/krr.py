"""Kernel ridge regression via the representer theorem.

Fitting solves the dual system (K + n lambda I) alpha = y with a symmetric
positive-definite factorization; the predictor is x -> K(x, X) alpha.  The
regularization parameter comes from either the power-law schedule
lambda(n) = c n**(-beta / (s beta + 1)) or k-fold cross-validation on a
fixed grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .kernels import KernelFn, gram_matrix, kernel_matrix
from .rng import Stream, mix
from .targets import DataSet

__all__ = [
    "IllConditionedError",
    "KrrModel",
    "LambdaRule",
    "fixed_power",
    "cross_validation",
    "default_cv_grid",
    "fit",
    "fit_arrays",
    "predict",
    "lambda_for",
    "cv_scores",
    "cv_fold_indices",
]

_PREDICT_CHUNK = 4096
_CV_SALT = 0x5CF0  # distinguishes the fold-permutation stream from data streams


class IllConditionedError(RuntimeError):
    """The regularized Gram system could not be factorized, even with jitter."""


@dataclass(frozen=True)
class KrrModel:
    """Fitted predictor: dual coefficients over the training inputs."""

    kernel: KernelFn
    x_train: np.ndarray
    alpha: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "x_train", _readonly(self.x_train))
        object.__setattr__(self, "alpha", _readonly(self.alpha))
        if self.x_train.shape != self.alpha.shape:
            raise ValueError("alpha must have one coefficient per training input")


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def _solve_spd(system: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    factor = scipy.linalg.cho_factor(system, lower=True, check_finite=False)
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def fit_arrays(kernel: KernelFn, x: np.ndarray, y: np.ndarray, lam: float,
               gram: np.ndarray | None = None) -> KrrModel:
    """Fit from raw arrays; ``gram`` may be passed to reuse a Gram matrix."""
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.size != y.size or x.size < 1:
        raise ValueError("x and y must have equal positive length")
    if gram is None:
        gram = gram_matrix(kernel, x)
    n = x.size
    shifted = gram + (n * lam) * np.eye(n)
    try:
        alpha = _solve_spd(shifted, y)
    except scipy.linalg.LinAlgError:
        jitter = 1e-10 * np.trace(gram) / n
        try:
            alpha = _solve_spd(shifted + jitter * np.eye(n), y)
        except scipy.linalg.LinAlgError as exc:
            raise IllConditionedError(
                f"Cholesky failed for n={n}, lambda={lam:g} even after jitter {jitter:g}"
            ) from exc
    return KrrModel(kernel=kernel, x_train=x, alpha=alpha, lam=lam)


def fit(kernel: KernelFn, data: DataSet, lam: float) -> KrrModel:
    """Solve (K + n lambda I) alpha = y on the data set."""
    return fit_arrays(kernel, data.x, data.y, lam)


def predict(model: KrrModel, x_test: np.ndarray) -> np.ndarray:
    """Evaluate the fitted predictor, K(x_test, X_train) alpha."""
    xs = np.atleast_1d(np.asarray(x_test, dtype=np.float64))
    out = np.empty(xs.size)
    for start in range(0, xs.size, _PREDICT_CHUNK):
        block = xs[start:start + _PREDICT_CHUNK]
        out[start:start + _PREDICT_CHUNK] = kernel_matrix(model.kernel, block, model.x_train) @ model.alpha
    return out


@dataclass(frozen=True)
class LambdaRule:
    """Regularization schedule: power law in n, or cross-validated grid."""

    kind: str
    c: float = 1.0
    s: float = 0.0
    beta: float = 0.0
    grid: tuple[float, ...] = ()
    folds: int = 5

    def __post_init__(self):
        if self.kind == "fixed_power":
            if self.c <= 0.0:
                raise ValueError(f"c must be positive, got {self.c}")
        elif self.kind == "cross_validation":
            if len(self.grid) == 0:
                raise ValueError("cross-validation grid must be non-empty")
            g = np.asarray(self.grid)
            if np.any(g <= 0.0) or np.any(np.diff(g) <= 0.0):
                raise ValueError("cross-validation grid must be positive and strictly increasing")
            if self.folds < 2:
                raise ValueError(f"folds must be >= 2, got {self.folds}")
        else:
            raise ValueError(f"unknown lambda rule {self.kind!r}")


def fixed_power(c: float, s: float, beta: float) -> LambdaRule:
    return LambdaRule(kind="fixed_power", c=c, s=s, beta=beta)


def cross_validation(grid, folds: int = 5) -> LambdaRule:
    return LambdaRule(kind="cross_validation", grid=tuple(float(g) for g in grid), folds=folds)


def default_cv_grid(n: int, s: float, beta: float, points: int = 20, span: float = 100.0) -> np.ndarray:
    """Log-spaced grid of ``points`` values spanning [lam/span, lam*span]
    around the power-law schedule lam = n**(-beta / (s beta + 1))."""
    center = float(n) ** (-beta / (s * beta + 1.0))
    return np.exp(np.linspace(np.log(center / span), np.log(center * span), points))


def cv_fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Contiguous folds of one fixed permutation, a function of (n, folds, seed)."""
    perm = Stream(mix(seed, n, folds, _CV_SALT)).permutation(n)
    bounds = np.linspace(0, n, folds + 1).astype(int)
    return [perm[bounds[f]:bounds[f + 1]] for f in range(folds)]


def cv_scores(kernel: KernelFn, data: DataSet, grid, folds: int,
              gram: np.ndarray | None = None) -> np.ndarray:
    """Mean held-out MSE per grid value, over contiguous folds of a fixed
    seeded permutation.

    Each fold's Gram block is eigendecomposed once; every grid value is then
    an O(n^2) solve, so the full table costs folds eigendecompositions.  The
    table is materialized completely, making the downstream argmin
    independent of evaluation order.
    """
    grid = np.asarray(grid, dtype=np.float64)
    n = data.n
    if n < folds:
        raise ValueError(f"need at least one sample per fold: n={n}, folds={folds}")
    if gram is None:
        gram = gram_matrix(kernel, data.x)
    fold_idx = cv_fold_indices(n, folds, data.seed)
    scores = np.zeros(grid.size)
    for val in fold_idx:
        train = np.setdiff1d(np.arange(n), val, assume_unique=False)
        k_tt = gram[np.ix_(train, train)]
        k_vt = gram[np.ix_(val, train)]
        y_tr = data.y[train]
        y_val = data.y[val]
        evals, evecs = np.linalg.eigh(k_tt)
        evals = np.clip(evals, 0.0, None)  # negative values are rounding noise on a PSD block
        rot_y = evecs.T @ y_tr
        proj = k_vt @ evecs
        denom = evals[:, None] + train.size * grid[None, :]
        preds = proj @ (rot_y[:, None] / denom)
        scores += np.mean((preds - y_val[:, None]) ** 2, axis=0)
    return scores / folds


def lambda_for(rule: LambdaRule, n: int, kernel: KernelFn, data: DataSet,
               gram: np.ndarray | None = None) -> float:
    """Resolve the regularization parameter for sample size n.

    ``fixed_power`` returns c * n**(-beta / (s beta + 1)).
    ``cross_validation`` returns the grid value minimizing mean validation
    MSE; exact ties resolve to the smallest grid value.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if rule.kind == "fixed_power":
        return rule.c * float(n) ** (-rule.beta / (rule.s * rule.beta + 1.0))
    scores = cv_scores(kernel, data, rule.grid, rule.folds, gram=gram)
    return float(rule.grid[int(np.argmin(scores))])
