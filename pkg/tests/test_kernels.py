import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from krrlab.kernels import (
    approximation_error,
    decay_upper_constant,
    effective_dimension,
    embedding_constant_partial,
    eval_kernel,
    first_order_min,
    gram_matrix,
    kernel_by_name,
    kernel_matrix,
    mercer_partial_sum,
    min_kernel_model,
    power_law_model,
    sobolev_h1,
    spectral_f_lambda,
    truncated_mercer,
)
from krrlab.targets import min_eigen, target_coefficient_array

COTH1 = math.cosh(1.0) / math.sinh(1.0)       # sobolev_h1 value at (0, 0) and (1, 1)
INV_SINH1 = 1.0 / math.sinh(1.0)              # sobolev_h1 value at (0, 1)

ALL_KERNELS = [sobolev_h1(), first_order_min(), truncated_mercer(min_kernel_model(), 16)]


# ---------------------------------------------------------------- eval / gram

def test_sobolev_corner_values():
    k = sobolev_h1()
    assert eval_kernel(k, 0.0, 0.0) == pytest.approx(COTH1, abs=1e-15)
    assert eval_kernel(k, 1.0, 1.0) == pytest.approx(COTH1, abs=1e-15)
    assert eval_kernel(k, 0.0, 1.0) == pytest.approx(INV_SINH1, abs=1e-15)


def test_sobolev_interior_value():
    # direct scalar evaluation of cosh(min) cosh(1 - max) / sinh(1)
    expected = math.cosh(0.3) * math.cosh(1.0 - 0.7) / math.sinh(1.0)
    assert eval_kernel(sobolev_h1(), 0.3, 0.7) == pytest.approx(expected, rel=1e-15)


def test_min_kernel_values():
    k = first_order_min()
    assert eval_kernel(k, 0.3, 0.7) == 0.3
    assert eval_kernel(k, 0.5, 0.5) == 0.5


@settings(max_examples=60)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_symmetry(x, y):
    for k in ALL_KERNELS:
        assert eval_kernel(k, x, y) == eval_kernel(k, y, x)


def test_domain_error():
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            eval_kernel(first_order_min(), bad, 0.5)
        with pytest.raises(ValueError):
            eval_kernel(sobolev_h1(), 0.5, bad)


def test_bounded_diagonal():
    xs = np.linspace(0.0, 1.0, 101)
    assert np.max(kernel_matrix(sobolev_h1(), xs, xs).diagonal()) <= COTH1 + 1e-15
    assert np.max(kernel_matrix(first_order_min(), xs, xs).diagonal()) <= 1.0


def test_gram_min_examples():
    assert gram_matrix(first_order_min(), np.array([0.5])) == pytest.approx(np.array([[0.5]]))
    got = gram_matrix(first_order_min(), np.array([0.2, 0.8]))
    assert np.array_equal(got, np.array([[0.2, 0.2], [0.2, 0.8]]))


def test_gram_sobolev_endpoints():
    got = gram_matrix(sobolev_h1(), np.array([0.0, 1.0]))
    expected = np.array([[COTH1, INV_SINH1], [INV_SINH1, COTH1]])
    assert np.allclose(got, expected, atol=1e-15)


def test_gram_bitwise_symmetric():
    rng = np.random.default_rng(3)
    x = rng.random(33)
    for k in ALL_KERNELS:
        gram = gram_matrix(k, x)
        assert np.array_equal(gram, gram.T)


def test_gram_positive_semidefinite():
    rng = np.random.default_rng(11)
    for size in (2, 7, 16, 64):
        x = rng.random(size)
        for k in ALL_KERNELS:
            eigs = np.linalg.eigvalsh(gram_matrix(k, x))
            assert eigs.min() >= -1e-10


# ----------------------------------------------------------------- mercer sum

def test_mercer_single_term():
    # lambda_1 e_1(0.5)^2 = (2/pi)^2 * (sqrt(2) sin(pi/4))^2 = 4/pi^2
    got = mercer_partial_sum(min_kernel_model(), 1, 0.5, 0.5)
    assert got == pytest.approx(4.0 / math.pi ** 2, rel=1e-14)


def test_mercer_converges_to_min_kernel():
    got = mercer_partial_sum(min_kernel_model(), 10_000, 0.3, 0.7)
    assert abs(got - 0.3) < 1e-3


def test_mercer_vanishes_at_zero():
    for m in (1, 5, 50):
        assert mercer_partial_sum(min_kernel_model(), m, 0.0, 0.7) == 0.0


def test_mercer_truncation_error_monotone_and_bounded():
    model = min_kernel_model()
    upper = decay_upper_constant(model)
    pts = [(0.2, 0.2), (0.25, 0.8), (0.6, 0.9)]
    for x, y in pts:
        exact = min(x, y)
        errs = []
        for terms in (4, 16, 64, 256):
            errs.append(abs(mercer_partial_sum(model, terms, x, y) - exact))
            # sup |e_i| = sqrt(2), so the tail is at most 2 * sum_{i>M} lambda_i
            tail = 2.0 * upper * terms ** (1.0 - model.beta) / (model.beta - 1.0)
            assert errs[-1] <= tail
        assert all(a >= b for a, b in zip(errs, errs[1:]))


def test_truncated_mercer_matches_partial_sum():
    k = truncated_mercer(min_kernel_model(), 8)
    got = eval_kernel(k, 0.4, 0.9)
    assert got == pytest.approx(mercer_partial_sum(min_kernel_model(), 8, 0.4, 0.9), rel=1e-12)


def test_kernel_by_name_roundtrip():
    assert kernel_by_name("sobolev_h1").kind == "sobolev_h1"
    assert kernel_by_name("first_order_min").kind == "first_order_min"
    assert kernel_by_name("truncated_mercer", 8).terms == 8
    with pytest.raises(ValueError):
        kernel_by_name("gaussian")


# -------------------------------------------------------- effective dimension

def test_effective_dimension_inverse_square():
    # sum_i 1/(1 + i^2) = (pi coth(pi) - 1) / 2, an independent closed form
    expected = (math.pi / math.tanh(math.pi) - 1.0) / 2.0
    got = effective_dimension(power_law_model(2.0), 1.0, 1e-6)
    assert abs(got - expected) <= 1.0001e-6


def test_effective_dimension_monotone_in_lambda():
    model = min_kernel_model()
    values = [effective_dimension(model, lam, 1e-4) for lam in (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e3)]
    assert all(a > b > 0.0 for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-2  # N(lambda) -> 0 as lambda -> infinity


def test_effective_dimension_ratio_near_ten():
    model = min_kernel_model()
    for lam in (1e-6, 1e-4, 1e-3):
        ratio = effective_dimension(model, lam, 1e-2) / effective_dimension(model, 100 * lam, 1e-2)
        assert abs(ratio - 10.0) / 10.0 < 0.25


def test_effective_dimension_loglog_slope():
    model = min_kernel_model()
    lams = np.logspace(-6, -2, 9)
    values = [effective_dimension(model, lam, 1e-2) for lam in lams]
    slope = np.polyfit(np.log(1.0 / lams), np.log(values), 1)[0]
    assert 1.0 / model.beta - 0.05 <= slope <= 1.0 / model.beta + 0.05


def test_effective_dimension_invalid_arguments():
    with pytest.raises(ValueError):
        effective_dimension(min_kernel_model(), 0.0, 1e-3)
    with pytest.raises(ValueError):
        effective_dimension(min_kernel_model(), -1.0, 1e-3)
    with pytest.raises(ValueError):
        effective_dimension(min_kernel_model(), 1.0, 0.0)


# --------------------------------------------------------- embedding constant

def test_embedding_alpha_one_bounded_by_diagonal():
    model = min_kernel_model()
    for x in (0.25, 0.5, 1.0):
        partial = embedding_constant_partial(model, 1.0, x, 50_000)
        assert partial <= min(x, x) + 1e-12


def test_embedding_alpha_06_plateaus():
    model = min_kernel_model()
    values = [embedding_constant_partial(model, 0.6, 1.0, 2 ** j) for j in (14, 15, 16, 17)]
    increments = np.diff(values)
    assert np.all(increments > 0.0)
    assert all(a > b for a, b in zip(increments, increments[1:]))
    # full-series bound: e_i(1)^2 = 2 and sum lambda_i^0.6 < infinity
    upper = decay_upper_constant(model)
    beta06 = 0.6 * model.beta
    full = values[-1] + 2.0 * upper ** 0.6 * (2 ** 17) ** (1.0 - beta06) / (beta06 - 1.0)
    assert values[-1] < full


def test_embedding_alpha_04_diverges_past_plateau():
    model = min_kernel_model()
    plateau = embedding_constant_partial(model, 0.6, 1.0, 2 ** 17)
    diverging = embedding_constant_partial(model, 0.4, 1.0, 2 ** 17)
    assert diverging > 10.0 * plateau
    # and it keeps growing
    assert embedding_constant_partial(model, 0.4, 1.0, 2 ** 18) > diverging + 1.0


# ------------------------------------------ regularized projection / apx error

def test_f_lambda_scalar_example():
    model = power_law_model(2.0)  # lambda_1 = 1
    got = spectral_f_lambda(model, np.array([1.0, 0.0]), 1.0)
    assert got[0] == pytest.approx(0.5, abs=1e-15)
    assert got[1] == 0.0


def test_f_lambda_identity_limit():
    model = min_kernel_model()
    a = np.array([1.0, -2.0, 0.25])
    got = spectral_f_lambda(model, a, 1e-300)
    assert np.allclose(got, a, rtol=1e-12)


def test_f_lambda_two_eigenvalues():
    model = power_law_model(2.0)  # lambda = (1, 0.25, ...)
    got = spectral_f_lambda(model, np.array([1.0, 1.0]), 0.5)
    assert got == pytest.approx([2.0 / 3.0, 1.0 / 3.0], rel=1e-14)


def test_approximation_error_scalar_example():
    model = power_law_model(2.0)
    assert approximation_error(model, np.array([1.0]), 1.0, 0.0) == pytest.approx(0.5, abs=1e-15)


def test_approximation_error_monotone_to_zero():
    model = min_kernel_model()
    a = target_coefficient_array(min_eigen(0.4, 100))
    errs = [approximation_error(model, a, lam, 0.0) for lam in (1e-1, 1e-3, 1e-5, 1e-8)]
    assert all(x > y for x, y in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3


def test_approximation_error_matches_brute_force_and_bound():
    model = min_kernel_model()
    target = min_eigen(0.4, 1000)
    a = target_coefficient_array(target)
    idx = np.arange(1, a.size + 1, dtype=float)
    lam_i = (2.0 / (np.pi * (2.0 * idx - 1.0))) ** 2
    radius = math.sqrt(np.sum(lam_i ** (-0.4) * a ** 2))
    for lam in (1e-3, 1e-5):
        brute = math.sqrt(np.sum((lam / (lam + lam_i)) ** 2 * a ** 2))
        got = approximation_error(model, a, lam, 0.0)
        assert got == pytest.approx(brute, rel=1e-12)
        assert got <= radius * lam ** 0.2


def test_parseval_consistency_with_f_lambda():
    model = min_kernel_model()
    rng = np.random.default_rng(5)
    a = rng.normal(size=40)
    for lam in (1e-4, 1e-2, 1.0):
        b = spectral_f_lambda(model, a, lam)
        direct = np.linalg.norm(a - b)
        assert approximation_error(model, a, lam, 0.0) == pytest.approx(direct, rel=1e-12)


def test_approximation_error_invalid_arguments():
    model = min_kernel_model()
    with pytest.raises(ValueError):
        approximation_error(model, np.array([1.0]), 0.0, 0.0)
    with pytest.raises(ValueError):
        approximation_error(model, np.array([1.0]), 1.0, -0.5)
    with pytest.raises(ValueError):
        spectral_f_lambda(model, np.array([1.0]), -1.0)


def test_eigenfunctions_normalized():
    # int_0^1 e_i(x)^2 dx = 1 via fine trapezoid quadrature
    model = min_kernel_model()
    x = np.linspace(0.0, 1.0, 20_001)
    basis = model.eigenfunction_matrix(np.array([1, 2, 7, 20]), x)
    norms = np.trapezoid(basis ** 2, x, axis=0)
    assert np.allclose(norms, 1.0, atol=1e-6)


def test_eigenvalues_positive_nonincreasing():
    for model in (min_kernel_model(), power_law_model(2.5, scale=0.7)):
        vals = model.eigenvalues(np.arange(1, 200))
        assert np.all(vals > 0.0)
        assert np.all(np.diff(vals) <= 0.0)
