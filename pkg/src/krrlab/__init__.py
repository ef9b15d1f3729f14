"""krrlab: a desk-scale laboratory for kernel ridge regression rates.

Fits kernel ridge regression on synthetic unbounded targets over [0, 1],
measures L^2 generalization error by Simpson quadrature, fits log-log
convergence slopes, evaluates spectral quantities of the underlying
integral operators, and certifies a constructive information-theoretic
hardness family.
"""

from .analysis import (RateFit, SummaryRow, SweepSummary, TrialRecord, fit_power_law,
                       fit_rate, l2_error_simpson, l2_norm_simpson, simpson_integral,
                       summarize)
from .config import ConfigError, ExperimentConfig, emit_config, load_config, parse_config
from .kernels import (KernelFn, SpectralModel, approximation_error, effective_dimension,
                      embedding_constant_partial, eval_kernel, first_order_min, gram_matrix,
                      kernel_by_name, kernel_matrix, mercer_partial_sum, min_kernel_model,
                      power_law_model, sobolev_h1, spectral_f_lambda, truncated_mercer)
from .krr import (IllConditionedError, KrrModel, LambdaRule, cross_validation,
                  default_cv_grid, fit, fixed_power, lambda_for, predict)
from .lowerbound import (Certificate, Codebook, CodebookConstructionError, HardFamily,
                         build_codebook, build_family, certify_lower_bound, hamming_distance,
                         kl_product)
from .targets import (DataSet, SeriesTarget, eval_target, fourier_sobolev, generate_data,
                      interpolation_norm, min_eigen, target_by_name, target_coefficient_array,
                      target_coefficients)

__version__ = "0.1.0"
