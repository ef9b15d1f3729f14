"""Unbounded regression targets and synthetic data generation.

Both target families are truncated series with coefficients
c_k = k**(-(s + 0.5)), which for s < 0.5 makes f* a member of the
smoothness-s interpolation space of the respective RKHS while leaving it
unbounded near x = 1 (every series term equals c_k there).

* ``fourier_sobolev``:  f*(x) = sum_k c_k (sin(2 k pi x) + cos(2 k pi x))
* ``min_eigen``:        f*(x) = sum_k c_k e_{2k-1}(x)  in the min-kernel
  eigenbasis, so its eigen-coefficients are known exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import min_kernel_model
from .rng import Stream, mix

__all__ = [
    "SeriesTarget",
    "DataSet",
    "fourier_sobolev",
    "min_eigen",
    "target_by_name",
    "eval_series",
    "eval_target",
    "target_coefficients",
    "target_coefficient_array",
    "interpolation_norm",
    "generate_data",
]

_X_CHUNK = 2048
_K_CHUNK = 8192


@dataclass(frozen=True)
class SeriesTarget:
    """Truncated series regression function with smoothness index s."""

    family: str
    s: float
    truncation: int

    def __post_init__(self):
        if self.family not in ("fourier_sobolev", "min_eigen"):
            raise ValueError(f"unknown target family {self.family!r}")
        if self.s <= 0.0:
            raise ValueError(f"smoothness index must be positive, got {self.s}")
        if self.truncation < 1:
            raise ValueError(f"truncation must be >= 1, got {self.truncation}")

    def coefficients(self) -> np.ndarray:
        """Series coefficients c_k = k**(-(s + 0.5)), k = 1..truncation."""
        k = np.arange(1, self.truncation + 1, dtype=np.float64)
        return k ** (-(self.s + 0.5))


def fourier_sobolev(s: float, truncation: int = 1000) -> SeriesTarget:
    return SeriesTarget(family="fourier_sobolev", s=s, truncation=truncation)


def min_eigen(s: float, truncation: int = 1000) -> SeriesTarget:
    return SeriesTarget(family="min_eigen", s=s, truncation=truncation)


def target_by_name(name: str, s: float, truncation: int = 1000) -> SeriesTarget:
    """Resolve a canonical target family name as used in CLI configs."""
    if name == "fourier_sobolev":
        return fourier_sobolev(s, truncation)
    if name == "min_eigen":
        return min_eigen(s, truncation)
    raise ValueError(f"unknown target family {name!r}")


def _basis_block(family: str, k: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Basis-term matrix of shape (len(x), len(k))."""
    xs = x[:, None]
    if family == "fourier_sobolev":
        angle = 2.0 * np.pi * k[None, :] * xs
        return np.sin(angle) + np.cos(angle)
    # eigenindex 2k - 1 of the min kernel: sqrt(2) sin((2(2k-1) - 1) pi x / 2)
    freq = (4.0 * k[None, :] - 3.0) * (np.pi / 2.0)
    return math.sqrt(2.0) * np.sin(freq * xs)


def eval_series(family: str, coeff: np.ndarray, x) -> float | np.ndarray:
    """Evaluate sum_k coeff_k * (basis term k at x); linear in ``coeff``."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    coeff = np.asarray(coeff, dtype=np.float64)
    out = np.zeros_like(xs)
    for xa in range(0, xs.size, _X_CHUNK):
        xblock = xs[xa:xa + _X_CHUNK]
        acc = np.zeros_like(xblock)
        for ka in range(0, coeff.size, _K_CHUNK):
            k = np.arange(ka + 1, min(coeff.size, ka + _K_CHUNK) + 1, dtype=np.float64)
            acc += _basis_block(family, k, xblock) @ coeff[ka:ka + k.size]
        out[xa:xa + _X_CHUNK] = acc
    return float(out[0]) if np.isscalar(x) or np.asarray(x).ndim == 0 else out


def eval_target(target: SeriesTarget, x) -> float | np.ndarray:
    """Evaluate the truncated series at x (scalar or array), in 64-bit sums."""
    return eval_series(target.family, target.coefficients(), x)


def target_coefficients(target: SeriesTarget) -> dict[int, float] | None:
    """Exact eigen-coefficients {eigenindex: value}, or None if unavailable.

    Only ``min_eigen`` admits an exact eigenbasis representation: index
    2k - 1 carries c_k and every even index is zero.
    """
    if target.family != "min_eigen":
        return None
    coeff = target.coefficients()
    return {2 * k - 1: float(coeff[k - 1]) for k in range(1, target.truncation + 1)}


def target_coefficient_array(target: SeriesTarget) -> np.ndarray:
    """Dense eigen-coefficient array over eigenindices 1 .. 2K-1 (min_eigen only)."""
    sparse = target_coefficients(target)
    if sparse is None:
        raise ValueError(f"{target.family} has no exact eigenbasis representation")
    dense = np.zeros(2 * target.truncation - 1)
    for idx, value in sparse.items():
        dense[idx - 1] = value
    return dense


def interpolation_norm(target: SeriesTarget) -> float:
    """Smoothness-s interpolation norm of a min_eigen target.

    sqrt( sum_k lambda_{2k-1}**(-s) c_k**2 ) with the min-kernel eigenvalues;
    finite for every truncation.
    """
    if target.family != "min_eigen":
        raise ValueError(f"{target.family} has no computable interpolation norm")
    model = min_kernel_model()
    idx = 2 * np.arange(1, target.truncation + 1) - 1
    lam = model.eigenvalues(idx)
    return float(np.sqrt(np.sum(lam ** (-target.s) * target.coefficients() ** 2)))


@dataclass(frozen=True)
class DataSet:
    """Regression sample y_i = f*(x_i) + sigma * eps_i, reproducible by seed."""

    x: np.ndarray
    y: np.ndarray
    noise_sigma: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "x", _readonly(self.x))
        object.__setattr__(self, "y", _readonly(self.y))
        if self.x.shape != self.y.shape or self.x.ndim != 1 or self.x.size < 1:
            raise ValueError("x and y must be 1-d arrays of equal positive length")

    @property
    def n(self) -> int:
        return self.x.size


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def generate_data(target: SeriesTarget, n: int, noise_sigma: float, seed: int) -> DataSet:
    """Draw n points x ~ U[0, 1] and y = f*(x) + noise_sigma * N(0, 1).

    Fully determined by (target, n, noise_sigma, seed); the stream key is
    mix(seed, n) so distinct sizes decorrelate even under equal seeds.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if noise_sigma < 0.0:
        raise ValueError(f"noise_sigma must be non-negative, got {noise_sigma}")
    stream = Stream(mix(seed, n))
    x = stream.uniforms(n)
    y = eval_target(target, x)
    if noise_sigma > 0.0:
        y = y + noise_sigma * stream.normals(n)
    return DataSet(x=x, y=np.asarray(y, dtype=np.float64), noise_sigma=noise_sigma, seed=seed)
