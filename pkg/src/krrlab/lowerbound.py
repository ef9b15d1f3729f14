"""Constructive minimax hardness family with a numerical certificate.

The construction packs binary words of length m at pairwise Hamming
distance >= ceil(m / 8) (greedy Gilbert-Varshamov search in a seeded random
order), then attaches to each word omega a function

    f_omega = sqrt(eps) * sum_k omega_k e_{m+k},     eps = C0 m**(-s beta - 1),

built on eigenindices m+1 .. 2m of a spectral model.  Orthonormality of the
eigenbasis makes squared L^2 distances exactly eps times Hamming distances
(Parseval), so the family is eps*m/8-separated while each pair of induced
sampling distributions stays within the Kullback-Leibler budget a * ln M
required by the two-point reduction to hypothesis testing.  The certificate
re-checks every condition numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .kernels import SpectralModel
from .rng import Stream, mix

__all__ = [
    "CodebookConstructionError",
    "Codebook",
    "HardFamily",
    "Certificate",
    "hamming_distance",
    "build_codebook",
    "build_family",
    "kl_product",
    "certify_lower_bound",
    "format_certificate",
]

_CODEBOOK_SALT = 0xC0DE
# comparisons that are exact equalities in reals get this float slack
_CERT_RTOL = 1e-12


class CodebookConstructionError(RuntimeError):
    """Greedy search exhausted its candidate budget before reaching size."""


def hamming_distance(a: int, b: int) -> int:
    return (a ^ b).bit_count()


@dataclass(frozen=True)
class Codebook:
    """All-zeros word plus M nonzero words at pairwise distance >= ceil(m/8)."""

    m: int
    words: np.ndarray  # shape (M + 1, m), dtype uint8, row 0 all-zeros
    min_distance: int

    def __post_init__(self):
        w = np.array(self.words, dtype=np.uint8)
        w.flags.writeable = False
        object.__setattr__(self, "words", w)

    @property
    def size(self) -> int:
        return self.words.shape[0]

    @property
    def n_nonzero(self) -> int:
        return self.words.shape[0] - 1

    def word_ints(self) -> list[int]:
        weights = 1 << np.arange(self.m, dtype=object)
        return [int(np.sum(row.astype(object) * weights)) for row in self.words]


def _bits(value: int, m: int) -> np.ndarray:
    return np.array([(value >> j) & 1 for j in range(m)], dtype=np.uint8)


def build_codebook(m: int, seed: int) -> Codebook:
    """Greedy Gilbert-Varshamov codebook of 2**floor(m/8) nonzero words.

    Candidates are visited in a seeded random order (a full permutation of
    {0, 1}^m for m <= 20, otherwise 2**20 random draws); a word is kept iff
    its distance to every kept word is at least ceil(m / 8).  The all-zeros
    word is always first.
    """
    if m < 8:
        raise ValueError(f"block length must be >= 8, got {m}")
    required = -(-m // 8)  # ceil(m / 8)
    target_nonzero = 2 ** (m // 8)
    stream = Stream(mix(seed, m, _CODEBOOK_SALT))
    if m <= 20:
        candidates = stream.permutation(2 ** m)
    else:
        candidates = stream.words(2 ** 20) & np.uint64((1 << m) - 1)
    kept = [0]
    for cand in candidates:
        value = int(cand)
        if all(hamming_distance(value, prior) >= required for prior in kept):
            kept.append(value)
            if len(kept) - 1 >= target_nonzero:
                break
    if len(kept) - 1 < target_nonzero:
        raise CodebookConstructionError(
            f"found only {len(kept) - 1} of {target_nonzero} words for m={m}; "
            "the packing bound guarantees existence, so this indicates a bug"
        )
    words = np.stack([_bits(v, m) for v in kept])
    min_distance = min(
        hamming_distance(a, b) for i, a in enumerate(kept) for b in kept[i + 1:]
    )
    return Codebook(m=m, words=words, min_distance=min_distance)


@dataclass(frozen=True)
class HardFamily:
    """Functions f_i = sqrt(eps) sum_k omega_k^{(i)} e_{m+k} on eigenindices m+1..2m."""

    codebook: Codebook
    model: SpectralModel
    s: float
    beta: float
    radius: float
    sigma_bar: float
    a: float
    c0: float
    epsilon: float

    @property
    def m(self) -> int:
        return self.codebook.m

    def coefficient_array(self, i: int) -> np.ndarray:
        """Dense eigen-coefficients of member i over eigenindices 1 .. 2m."""
        coeffs = np.zeros(2 * self.m)
        coeffs[self.m:] = math.sqrt(self.epsilon) * self.codebook.words[i].astype(np.float64)
        return coeffs

    def evaluate_member(self, i: int, x: np.ndarray) -> np.ndarray:
        idx = np.arange(self.m + 1, 2 * self.m + 1)
        basis = self.model.eigenfunction_matrix(idx, x)
        return basis @ (math.sqrt(self.epsilon) * self.codebook.words[i].astype(np.float64))

    def interpolation_norm(self, i: int) -> float:
        """Smoothness-s norm sqrt(eps * sum_k lambda_{m+k}**(-s) omega_k)."""
        idx = np.arange(self.m + 1, 2 * self.m + 1)
        lam = self.model.eigenvalues(idx)
        omega = self.codebook.words[i].astype(np.float64)
        return math.sqrt(self.epsilon * float(np.sum(lam ** (-self.s) * omega)))


def build_family(codebook: Codebook, model: SpectralModel, s: float, beta: float,
                 radius: float, sigma_bar: float, a: float) -> HardFamily:
    """Scale the codebook into functions of interpolation norm <= radius.

    C0 = min(radius * 2**(-s beta) / c_model,  sigma_bar**2 ln(2) a / 4)
    where c_model is the lower eigenvalue-decay constant min lambda_i i**beta
    over the index window [m+1, 2m]; eps = C0 * m**(-s beta - 1).  The first
    cap keeps every member inside the norm ball, the second keeps the
    KL divergences under budget at the coupled sample size n = m**(s beta + 1).
    """
    if not 0.0 < a < 0.125:
        raise ValueError(f"a must lie in (0, 1/8), got {a}")
    if radius <= 0.0 or sigma_bar <= 0.0:
        raise ValueError("radius and sigma_bar must be positive")
    m = codebook.m
    idx = np.arange(m + 1, 2 * m + 1)
    c_model = float(np.min(model.eigenvalues(idx) * idx.astype(np.float64) ** beta))
    c0 = min(radius * 2.0 ** (-s * beta) / c_model, sigma_bar ** 2 * math.log(2.0) * a / 4.0)
    epsilon = c0 * float(m) ** (-s * beta - 1.0)
    return HardFamily(codebook=codebook, model=model, s=s, beta=beta, radius=radius,
                      sigma_bar=sigma_bar, a=a, c0=c0, epsilon=epsilon)


def kl_product(f1_coeffs: np.ndarray, f2_coeffs: np.ndarray, n: int, sigma: float) -> float:
    """KL divergence of n-fold products of Gaussian regression models.

    KL(rho_1^n, rho_2^n) = n / (2 sigma^2) * ||f_1 - f_2||_{L^2}^2, with the
    squared distance read off the eigen-coefficients by Parseval.
    """
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    diff = np.asarray(f1_coeffs, dtype=np.float64) - np.asarray(f2_coeffs, dtype=np.float64)
    return n / (2.0 * sigma ** 2) * float(np.sum(diff ** 2))


@dataclass(frozen=True)
class Certificate:
    """Numerical verification record for one hardness family."""

    m: int
    n_samples: int
    codebook_size: int
    n_nonzero: int
    min_hamming: int
    required_hamming: int
    c0: float
    epsilon: float
    separation_sq: float
    separation_floor: float
    max_kl: float
    kl_budget: float
    max_interp_norm: float
    norm_radius: float
    rate_exponent: float
    checks: dict[str, bool] = field(default_factory=dict)
    passed: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _leq(lhs: float, rhs: float) -> bool:
    # equality in reals may round either way; allow relative float slack
    return lhs <= rhs * (1.0 + _CERT_RTOL) + 1e-300


def certify_lower_bound(family: HardFamily, n: int, a: float) -> Certificate:
    """Check separation, KL budget, norm ball, and codebook validity.

    Separations are evaluated in exact product form epsilon * d_Hamming
    (the Parseval identity makes this the squared L^2 distance); the KL
    check compares the worst member against a * ln(M).  Failure is encoded
    in the certificate, never raised.
    """
    if a != family.a:
        raise ValueError(f"certificate a={a} differs from family a={family.a}")
    book = family.codebook
    ints = book.word_ints()
    m = book.m
    n_nonzero = book.n_nonzero
    required = -(-m // 8)

    min_dist = min(
        hamming_distance(x, y) for i, x in enumerate(ints) for y in ints[i + 1:]
    )
    separation_sq = family.epsilon * min_dist
    separation_floor = family.epsilon * (m / 8.0)

    zero = family.coefficient_array(0)
    max_kl = max(
        kl_product(family.coefficient_array(i), zero, n, family.sigma_bar)
        for i in range(1, book.size)
    )
    kl_budget = a * math.log(n_nonzero) if n_nonzero >= 2 else float("-inf")
    max_norm = max(family.interpolation_norm(i) for i in range(book.size))

    checks = {
        "codebook_nondegenerate": n_nonzero >= 2,
        "hamming_distance": min_dist >= required,
        "separation": _leq(separation_floor, separation_sq),
        "kl_budget": _leq(max_kl, kl_budget),
        "norm_ball": _leq(max_norm, family.radius),
    }
    return Certificate(
        m=m,
        n_samples=n,
        codebook_size=book.size,
        n_nonzero=n_nonzero,
        min_hamming=min_dist,
        required_hamming=required,
        c0=family.c0,
        epsilon=family.epsilon,
        separation_sq=separation_sq,
        separation_floor=separation_floor,
        max_kl=max_kl,
        kl_budget=kl_budget,
        max_interp_norm=max_norm,
        norm_radius=family.radius,
        rate_exponent=-family.s * family.beta / (family.s * family.beta + 1.0),
        checks=checks,
        passed=all(checks.values()),
    )


def format_certificate(cert: Certificate) -> str:
    lines = [
        "lower-bound certificate",
        f"  block length m            = {cert.m}",
        f"  coupled sample size n     = {cert.n_samples}",
        f"  codebook size (with zero) = {cert.codebook_size}",
        f"  nonzero words M           = {cert.n_nonzero}",
        f"  min Hamming distance      = {cert.min_hamming} (required >= {cert.required_hamming})",
        f"  C0                        = {cert.c0:.12g}",
        f"  epsilon                   = {cert.epsilon:.12g}",
        f"  min separation ||.||^2    = {cert.separation_sq:.12g} (floor eps*m/8 = {cert.separation_floor:.12g})",
        f"  max KL divergence         = {cert.max_kl:.12g} (budget a*ln M = {cert.kl_budget:.12g})",
        f"  max interpolation norm    = {cert.max_interp_norm:.12g} (radius = {cert.norm_radius:.12g})",
        f"  implied rate exponent     = {cert.rate_exponent:.12g}",
    ]
    for name, ok in cert.checks.items():
        lines.append(f"  check {name:<24}= {'pass' if ok else 'FAIL'}")
    lines.append(f"  certificate               = {'PASS' if cert.passed else 'FAIL'}")
    return "\n".join(lines)
