"""Kernels on [0, 1] and spectral computations for their integral operators.

Two closed-form kernels are provided:

* ``sobolev_h1`` -- the reproducing kernel of H^1(0, 1) with the inner
  product <f, g> = int f g + int f' g'.  It is the Green's function of
  -u'' + u with Neumann boundary conditions,

      k(x, y) = cosh(min(x, y)) * cosh(1 - max(x, y)) / sinh(1).

* ``first_order_min`` -- k(x, y) = min(x, y), the RKHS of absolutely
  continuous functions with f(0) = 0 and square-integrable derivative.
  Its Mercer decomposition under the uniform measure is closed form:
  eigenvalues ((2i - 1) pi / 2)^(-2) and eigenfunctions
  sqrt(2) sin((2i - 1) pi x / 2).

``truncated_mercer`` kernels are finite Mercer sums over a spectral model;
they exist as exact low-rank oracles for testing the ridge solver against
feature-space regression.

Spectral quantities (effective dimension, embedding constants, the
regularized projection f_lambda and its approximation error) are computed
from a :class:`SpectralModel`, which requires closed-form eigenpairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SpectralModel",
    "KernelFn",
    "min_kernel_model",
    "power_law_model",
    "sobolev_h1",
    "first_order_min",
    "truncated_mercer",
    "kernel_by_name",
    "eval_kernel",
    "kernel_matrix",
    "gram_matrix",
    "mercer_partial_sum",
    "effective_dimension",
    "decay_upper_constant",
    "embedding_constant_partial",
    "spectral_f_lambda",
    "approximation_error",
]

_CHUNK = 4_000_000  # elements per block in long spectral sums


@dataclass(frozen=True)
class SpectralModel:
    """Closed-form eigenvalue sequence and eigenfunction family.

    ``eigenvalue(i)`` and ``eigenfunction(i, x)`` take 1-based index arrays
    and broadcast; eigenvalues must be positive and non-increasing, and the
    eigenfunctions orthonormal in L^2(0, 1).  ``beta`` is the polynomial
    decay exponent: lambda_i is comparable to i**(-beta).
    """

    label: str
    beta: float
    eigenvalue: Callable[[np.ndarray], np.ndarray]
    eigenfunction: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def eigenvalues(self, indices: np.ndarray) -> np.ndarray:
        return self.eigenvalue(np.asarray(indices, dtype=np.float64))

    def eigenfunction_matrix(self, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Matrix e_i(x_j) of shape (len(x), len(indices))."""
        idx = np.asarray(indices, dtype=np.float64)[None, :]
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))[:, None]
        return self.eigenfunction(idx, xs)


def min_kernel_model() -> SpectralModel:
    """Mercer data of k(x, y) = min(x, y) under the uniform measure."""
    return SpectralModel(
        label="first_order_min",
        beta=2.0,
        eigenvalue=lambda i: (2.0 / (np.pi * (2.0 * i - 1.0))) ** 2,
        eigenfunction=lambda i, x: math.sqrt(2.0) * np.sin((2.0 * i - 1.0) * (np.pi / 2.0) * x),
    )


def power_law_model(beta: float, scale: float = 1.0, label: str | None = None) -> SpectralModel:
    """Synthetic model lambda_i = scale * i**(-beta) with the sine basis.

    The eigenfunctions sqrt(2) sin(i pi x) are orthonormal on [0, 1]; the
    model is a test fixture for spectral sums, not a kernel's true
    decomposition.
    """
    if beta <= 1.0:
        raise ValueError(f"decay exponent must exceed 1, got {beta}")
    return SpectralModel(
        label=label or f"power_law_{beta:g}",
        beta=float(beta),
        eigenvalue=lambda i: scale * i ** (-beta),
        eigenfunction=lambda i, x: math.sqrt(2.0) * np.sin(i * np.pi * x),
    )


@dataclass(frozen=True)
class KernelFn:
    """A kernel on [0, 1] x [0, 1], identified by its canonical kind name."""

    kind: str
    model: SpectralModel | None = None
    terms: int | None = None

    def __post_init__(self):
        if self.kind not in ("sobolev_h1", "first_order_min", "truncated_mercer"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "truncated_mercer":
            if self.model is None:
                raise ValueError("truncated_mercer requires a spectral model")
            if self.terms is None or self.terms < 1:
                raise ValueError("truncated_mercer requires terms >= 1")


def sobolev_h1() -> KernelFn:
    return KernelFn(kind="sobolev_h1")


def first_order_min() -> KernelFn:
    return KernelFn(kind="first_order_min")


def truncated_mercer(model: SpectralModel, terms: int = 32) -> KernelFn:
    return KernelFn(kind="truncated_mercer", model=model, terms=terms)


def kernel_by_name(name: str, mercer_terms: int = 32) -> KernelFn:
    """Resolve a canonical kernel kind name as used in CLI configs."""
    if name == "sobolev_h1":
        return sobolev_h1()
    if name == "first_order_min":
        return first_order_min()
    if name == "truncated_mercer":
        return truncated_mercer(min_kernel_model(), mercer_terms)
    raise ValueError(f"unknown kernel kind {name!r}")


def _check_domain(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.size and (np.min(a) < 0.0 or np.max(a) > 1.0):
        raise ValueError("kernel arguments must lie in [0, 1]")
    return a


def kernel_matrix(k: KernelFn, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cross matrix k(x_i, y_j) of shape (len(x), len(y))."""
    xa = np.atleast_1d(_check_domain(x))[:, None]
    ya = np.atleast_1d(_check_domain(y))[None, :]
    if k.kind == "sobolev_h1":
        hi = np.maximum(xa, ya)
        lo = np.minimum(xa, ya)
        return np.cosh(1.0 - hi) * np.cosh(lo) / math.sinh(1.0)
    if k.kind == "first_order_min":
        return np.minimum(xa, ya)
    idx = np.arange(1, k.terms + 1)
    scale = np.sqrt(k.model.eigenvalues(idx))
    ex = k.model.eigenfunction_matrix(idx, xa[:, 0]) * scale
    ey = k.model.eigenfunction_matrix(idx, ya[0, :]) * scale
    return ex @ ey.T  # products commute exactly, so k(x, y) == k(y, x) bitwise


def eval_kernel(k: KernelFn, x: float, y: float) -> float:
    """Evaluate k(x, y) for scalars x, y in [0, 1]."""
    return float(kernel_matrix(k, np.array([x]), np.array([y]))[0, 0])


def gram_matrix(k: KernelFn, x: np.ndarray) -> np.ndarray:
    """Gram matrix on the points x, exactly symmetric by construction.

    The upper triangle is computed and mirrored, so K[i, j] and K[j, i]
    are the same float even when the underlying evaluation is blocked.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.size < 1:
        raise ValueError("gram_matrix needs at least one point")
    gram = kernel_matrix(k, x, x)
    upper = np.triu_indices(x.size, 1)
    gram[(upper[1], upper[0])] = gram[upper]
    return gram


def mercer_partial_sum(model: SpectralModel, terms: int, x: float, y: float) -> float:
    """Partial Mercer sum  sum_{i<=terms} lambda_i e_i(x) e_i(y)."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    total = 0.0
    for start in range(1, terms + 1, _CHUNK):
        idx = np.arange(start, min(terms, start + _CHUNK - 1) + 1, dtype=np.float64)
        ex = model.eigenfunction_matrix(idx, np.array([x]))[0]
        ey = model.eigenfunction_matrix(idx, np.array([y]))[0]
        total += float(np.sum(model.eigenvalues(idx) * ex * ey))
    return total


def decay_upper_constant(model: SpectralModel, scan: int = 4096) -> float:
    """Constant C with lambda_i <= C i**(-beta), from a scan of the closed form.

    Assumes lambda_i * i**beta attains its supremum on the scanned window,
    which holds for the monotone closed forms shipped here.
    """
    idx = np.arange(1, scan + 1, dtype=np.float64)
    return float(np.max(model.eigenvalues(idx) * idx ** model.beta))


def effective_dimension(model: SpectralModel, lam: float, tail_tol: float) -> float:
    """Effective dimension  N(lambda) = sum_i lambda_i / (lambda_i + lambda).

    The series is truncated at the index where the integral tail bound
    (C / lambda) * M**(1 - beta) / (beta - 1), valid for
    lambda_i <= C i**(-beta), drops below ``tail_tol``; the returned value
    is therefore within tail_tol of the full sum.
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if tail_tol <= 0.0:
        raise ValueError(f"tail_tol must be positive, got {tail_tol}")
    upper = decay_upper_constant(model)
    beta = model.beta
    cutoff = int(math.ceil((upper / (lam * tail_tol * (beta - 1.0))) ** (1.0 / (beta - 1.0))))
    cutoff = max(cutoff, 64)
    total = 0.0
    for start in range(1, cutoff + 1, _CHUNK):
        idx = np.arange(start, min(cutoff, start + _CHUNK - 1) + 1, dtype=np.float64)
        vals = model.eigenvalues(idx)
        total += float(np.sum(vals / (vals + lam)))
    return total


def embedding_constant_partial(model: SpectralModel, alpha: float, x: float, terms: int) -> float:
    """Partial sum  sum_{i<=terms} lambda_i**alpha * e_i(x)**2.

    The supremum over x of the full series is the squared embedding norm of
    the alpha-power space into L^infinity; callers study the partial sums'
    growth in ``terms`` to decide boundedness versus divergence.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    total = 0.0
    for start in range(1, terms + 1, _CHUNK):
        idx = np.arange(start, min(terms, start + _CHUNK - 1) + 1, dtype=np.float64)
        ef = model.eigenfunction_matrix(idx, np.array([x]))[0]
        total += float(np.sum(model.eigenvalues(idx) ** alpha * ef * ef))
    return total


def spectral_f_lambda(model: SpectralModel, coeffs: np.ndarray, lam: float) -> np.ndarray:
    """Eigenbasis coefficients of the regularized projection.

    Maps a_i to lambda_i / (lambda_i + lam) * a_i, the coefficients of
    (T + lam)^(-1) T f when f has coefficients a in the eigenbasis.
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    a = np.asarray(coeffs, dtype=np.float64)
    vals = model.eigenvalues(np.arange(1, a.size + 1))
    return vals / (vals + lam) * a


def approximation_error(model: SpectralModel, coeffs: np.ndarray, lam: float, gamma: float = 0.0) -> float:
    """Interpolation-norm distance between f and its regularized projection.

    Returns sqrt( sum_i (lam / (lam + lambda_i))**2 lambda_i**(-gamma) a_i**2 );
    gamma = 0 gives the L^2 approximation error.
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if gamma < 0.0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    a = np.asarray(coeffs, dtype=np.float64)
    vals = model.eigenvalues(np.arange(1, a.size + 1))
    ratio = lam / (lam + vals)
    return float(np.sqrt(np.sum(ratio ** 2 * vals ** (-gamma) * a ** 2)))
