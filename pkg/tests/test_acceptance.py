"""Acceptance gate: every criterion at its stated tolerance.

The two rate-recovery sweeps and the cross-validation variants run the full
desk-scale protocol (n = 200..2000, 20 trials) and dominate the runtime of
this module (around 20 minutes total on a 2-core laptop).
"""

import dataclasses
import math

import numpy as np
import pytest

from krrlab.analysis import simpson_integral
from krrlab.cli import main, run_experiment
from krrlab.config import ExperimentConfig
from krrlab.kernels import (
    effective_dimension,
    min_kernel_model,
    truncated_mercer,
)
from krrlab.krr import fit, predict
from krrlab.lowerbound import build_codebook, build_family, kl_product
from krrlab.targets import DataSet, min_eigen, target_coefficient_array

MASTER_SEED = 20230301
TARGET_SLOPE = -4.0 / 9.0

RATE_CONFIG = ExperimentConfig(
    kernel="sobolev_h1",
    target="fourier_sobolev",
    s=0.4,
    beta=2.0,
    lambda_rule="fixed_power",
    c_grid=(0.01, 0.05, 0.1, 0.5, 1.0),
    n_start=200,
    n_stop=2000,
    n_step=200,
    trials=20,
    truncation=1000,
    quadrature=None,
    noise_sigma=1.0,
    seed=MASTER_SEED,
    output_dir="",
)


def report(name: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, f"{name}: {detail}"


@pytest.fixture(scope="module")
def sobolev_sweep(tmp_path_factory):
    cfg = dataclasses.replace(RATE_CONFIG, output_dir=str(tmp_path_factory.mktemp("sobolev")))
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def min_kernel_sweep(tmp_path_factory):
    cfg = dataclasses.replace(RATE_CONFIG, kernel="first_order_min", target="min_eigen",
                              output_dir=str(tmp_path_factory.mktemp("minkernel")))
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def cv_results(tmp_path_factory):
    results = {}
    for kernel, target in (("sobolev_h1", "fourier_sobolev"), ("first_order_min", "min_eigen")):
        cfg = dataclasses.replace(
            RATE_CONFIG, kernel=kernel, target=target, lambda_rule="cross_validation",
            c_grid=None, output_dir=str(tmp_path_factory.mktemp(f"cv_{kernel}")),
        )
        results[kernel] = run_experiment(cfg)
    return results


def test_criterion_1_sobolev_rate_recovery(sobolev_sweep):
    best = sobolev_sweep.best
    deviation = abs(best.fit_sq.slope - TARGET_SLOPE)
    report("sobolev-rate", deviation <= 0.10,
           f"best c={best.c:g}, squared-error slope {best.fit_sq.slope:+.4f}, "
           f"target {TARGET_SLOPE:+.4f}, |dev|={deviation:.4f} <= 0.10")


def test_criterion_2_min_kernel_rate_recovery(min_kernel_sweep):
    best = min_kernel_sweep.best
    deviation = abs(best.fit_sq.slope - TARGET_SLOPE)
    report("min-kernel-rate", deviation <= 0.10,
           f"best c={best.c:g}, squared-error slope {best.fit_sq.slope:+.4f}, "
           f"target {TARGET_SLOPE:+.4f}, |dev|={deviation:.4f} <= 0.10")


def test_criterion_3_cross_validation_variant(cv_results):
    details = []
    ok = True
    for kernel, result in cv_results.items():
        slope = result.best.fit_sq.slope
        deviation = abs(slope - TARGET_SLOPE)
        ok = ok and deviation <= 0.12
        details.append(f"{kernel}: slope {slope:+.4f}, |dev|={deviation:.4f} <= 0.12")
    report("cv-rate", ok, "; ".join(details))


def test_invariant_subrange_slope_bias(sobolev_sweep, min_kernel_sweep):
    # finite-size bias is one-signed: dropping the smallest n cannot push the
    # fitted |r| down by more than the 0.02 slack
    from krrlab.analysis import fit_power_law

    for result in (sobolev_sweep, min_kernel_sweep):
        rows = result.best.summary.rows
        ns = np.array([r.n for r in rows])
        sq = np.array([r.mean_sq_error for r in rows])
        full = abs(fit_power_law(ns, sq).slope)
        tail_only = abs(fit_power_law(ns[ns >= 600], sq[ns >= 600]).slope)
        assert tail_only >= full - 0.02


def test_criterion_4_representer_oracle_equivalence():
    spectral = min_kernel_model()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        terms = int(rng.integers(1, 33))
        lam = 10.0 ** rng.uniform(-6, 0)
        x = rng.random(n)
        y = rng.normal(size=n)
        x_test = rng.random(50)
        data = DataSet(x=x, y=y, noise_sigma=1.0, seed=0)
        kernel_preds = predict(fit(truncated_mercer(spectral, terms), data, lam), x_test)

        idx = np.arange(1, terms + 1)
        scale = np.sqrt(spectral.eigenvalues(idx))
        phi = spectral.eigenfunction_matrix(idx, x) * scale
        phi_test = spectral.eigenfunction_matrix(idx, x_test) * scale
        weights = np.linalg.solve(phi.T @ phi + n * lam * np.eye(terms), phi.T @ y)
        worst = max(worst, float(np.max(np.abs(kernel_preds - phi_test @ weights))))
    report("representer-oracle", worst <= 1e-8,
           f"max |kernel - feature-space| over 100 instances = {worst:.3e} <= 1e-8")


def test_criterion_5_approximation_error_law():
    from krrlab.kernels import approximation_error

    model = min_kernel_model()
    target = min_eigen(0.4, 1000)
    coeffs = target_coefficient_array(target)
    idx = np.arange(1, coeffs.size + 1, dtype=float)
    lam_i = (2.0 / (np.pi * (2.0 * idx - 1.0))) ** 2
    radius = math.sqrt(float(np.sum(lam_i ** (-0.4) * coeffs ** 2)))
    worst_gap = 0.0
    bound_ok = True
    for lam in np.logspace(-1, -6, 6):
        got = approximation_error(model, coeffs, lam, gamma=0.0)
        brute = math.sqrt(float(np.sum((lam / (lam + lam_i)) ** 2 * coeffs ** 2)))
        worst_gap = max(worst_gap, abs(got - brute) / brute)
        bound_ok = bound_ok and got <= radius * lam ** 0.2
    report("approximation-error", worst_gap <= 1e-12 and bound_ok,
           f"max rel gap to brute force {worst_gap:.2e} <= 1e-12, bound holds: {bound_ok}")


def test_criterion_6_effective_dimension_asymptotics():
    model = min_kernel_model()
    lams = np.logspace(-6, -2, 9)
    values = [effective_dimension(model, lam, 1e-2) for lam in lams]
    slope = float(np.polyfit(np.log(1.0 / lams), np.log(values), 1)[0])
    report("effective-dimension", 0.45 <= slope <= 0.55,
           f"log-log slope {slope:.4f} in [0.45, 0.55]")


def test_criterion_7_lower_bound_certificate():
    details = []
    ok = True
    for m in (8, 16, 32):
        book = build_codebook(m, seed=MASTER_SEED)
        family = build_family(book, min_kernel_model(), 0.4, 2.0, 1.0, 1.0, 0.1)
        size_ok = book.size >= 2 ** (m // 8)
        dist_ok = book.min_distance >= -(-m // 8)
        parseval_ok = True
        for i in range(book.size):
            ci = family.coefficient_array(i)
            for j in range(i + 1, book.size):
                dist = int(np.sum(book.words[i] != book.words[j]))
                sep = float(np.sum((ci - family.coefficient_array(j)) ** 2))
                if abs(sep - family.epsilon * dist) > 1e-15 * max(sep, family.epsilon * dist):
                    parseval_ok = False
        n = int(float(m) ** 1.8)
        zero = family.coefficient_array(0)
        max_kl = max(kl_product(family.coefficient_array(i), zero, n, 1.0)
                     for i in range(1, book.size))
        kl_ok = max_kl <= 0.1 * math.log(book.n_nonzero) * (1 + 1e-12)
        exit_code = main(["verify-lowerbound", "--m", str(m), "--s", "0.4", "--beta", "2.0",
                          "--a", "0.1", "--seed", str(MASTER_SEED)])
        ok = ok and size_ok and dist_ok and parseval_ok and kl_ok and exit_code == 0
        details.append(f"m={m}: size {book.size}, dist {book.min_distance}, "
                       f"maxKL {max_kl:.4f} <= {0.1 * math.log(book.n_nonzero):.4f}, exit {exit_code}")
    report("lower-bound-certificate", ok, "; ".join(details))


def test_criterion_8_quadrature_order():
    fn = lambda x: np.exp(2.0 * x)
    reference = simpson_integral(fn, 1_000_001)
    ratios = []
    for points in (17, 33, 65):
        coarse = abs(simpson_integral(fn, points) - reference)
        fine = abs(simpson_integral(fn, 2 * points - 1) - reference)
        ratios.append(coarse / fine)
    ok = all(12.0 <= r <= 20.0 for r in ratios)
    report("quadrature-order", ok,
           "error ratios per grid halving: " + ", ".join(f"{r:.2f}" for r in ratios) + " in [12, 20]")


def test_criterion_9_determinism(tmp_path):
    cfg = dataclasses.replace(
        RATE_CONFIG, kernel="first_order_min", target="min_eigen", c_grid=None, c=0.1,
        n_start=60, n_stop=120, n_step=60, trials=3, truncation=50, quadrature=1201,
        output_dir=str(tmp_path / "first"),
    )
    run_experiment(cfg)
    run_experiment(dataclasses.replace(cfg, output_dir=str(tmp_path / "second")))
    identical = True
    for name in ("trials.csv", "summary.csv"):
        with open(tmp_path / "first" / name, "rb") as fh:
            a = fh.read()
        with open(tmp_path / "second" / name, "rb") as fh:
            b = fh.read()
        identical = identical and a == b
    report("determinism", identical, "re-run trials.csv and summary.csv byte-identical")
