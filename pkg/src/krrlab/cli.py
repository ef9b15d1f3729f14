"""Command-line entry point: experiment sweeps, certificates, spectral reports.

Subcommands
-----------
run-experiment     full (n, trial) sweep from a config file; writes
                   trials.csv, summary.csv and rate_report.txt, with one
                   subdirectory per c when a c grid is swept.
verify-lowerbound  build the hardness family on the min-kernel model and
                   print its certificate; exit 0 only if it passes.
spectral-report    effective-dimension curve, its log-log slope, and
                   embedding-constant partial-sum trajectories as CSV.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 certificate
failure.  Output files are a pure function of the config contents; floats
are serialized with 17 significant digits so re-runs are byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

import numpy as np

from . import analysis, krr, lowerbound
from .config import ConfigError, ExperimentConfig, emit_config, format_float, load_config
from .kernels import KernelFn, effective_dimension, embedding_constant_partial, gram_matrix, \
    kernel_by_name, kernel_matrix, min_kernel_model
from .rng import mix
from .targets import eval_target, generate_data, target_by_name

__all__ = ["run_experiment", "verify_lowerbound", "spectral_report", "main",
           "ArmResult", "ExperimentResult"]

_GRID_CHUNK = 4096
_SPECTRAL_MODELS = {"first_order_min": min_kernel_model}
_EMBEDDING_TERMS = tuple(2 ** j for j in range(17))

TRIALS_HEADER = "experiment_id,kernel,target,s,n,trial,lambda,error_l2"
SUMMARY_HEADER = "n,mean_error,std_error,mean_sq_error,trials"
REPORT_HEADER = "row_kind,lambda,n_lambda,fitted_slope,inv_beta,alpha,terms,x,partial_sum"


@dataclasses.dataclass
class ArmResult:
    """One λ-rule arm of a sweep (a single c value, or the CV run)."""

    c: float | None
    experiment_id: str
    records: list[analysis.TrialRecord]
    summary: analysis.SweepSummary | None = None
    fit_rms: analysis.RateFit | None = None
    fit_sq: analysis.RateFit | None = None
    directory: str = ""


@dataclasses.dataclass
class ExperimentResult:
    config: ExperimentConfig
    arms: list[ArmResult]
    best: ArmResult
    output_dir: str
    quadrature_points: int


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _trials_csv(arm: ArmResult, cfg: ExperimentConfig) -> str:
    rows = [TRIALS_HEADER]
    for rec in arm.records:
        rows.append(",".join([
            arm.experiment_id, cfg.kernel, cfg.target, format_float(cfg.s),
            str(rec.n), str(rec.trial), format_float(rec.lam), format_float(rec.error_l2),
        ]))
    return "\n".join(rows) + "\n"


def _summary_csv(summary: analysis.SweepSummary) -> str:
    rows = [SUMMARY_HEADER]
    for row in summary.rows:
        rows.append(",".join([
            str(row.n), format_float(row.mean_error), format_float(row.std_error),
            format_float(row.mean_sq_error), str(row.trials),
        ]))
    return "\n".join(rows) + "\n"


def _rate_report(arm: ArmResult, cfg: ExperimentConfig, selected_c: float | None) -> str:
    theory = -cfg.s * cfg.beta / (cfg.s * cfg.beta + 1.0)
    lines = [
        f"experiment_id = {arm.experiment_id}",
        f"r_squared_error = {format_float(arm.fit_sq.slope)}",
        f"r_rms_error = {format_float(arm.fit_rms.slope)}",
        f"intercept_b = {format_float(arm.fit_rms.intercept)}",
        f"rms_residual = {format_float(arm.fit_rms.rms_residual)}",
        f"theoretical_exponent = {format_float(theory)}",
    ]
    if selected_c is not None:
        lines.append(f"selected_c = {format_float(selected_c)}")
    lines.append("[config]")
    lines.append(emit_config(cfg).rstrip("\n"))
    return "\n".join(lines) + "\n"


def _write_arm(arm: ArmResult, cfg: ExperimentConfig, selected_c: float | None = None) -> None:
    os.makedirs(arm.directory, exist_ok=True)
    _write_text(os.path.join(arm.directory, "trials.csv"), _trials_csv(arm, cfg))
    if arm.summary is not None:
        _write_text(os.path.join(arm.directory, "summary.csv"), _summary_csv(arm.summary))
        _write_text(os.path.join(arm.directory, "rate_report.txt"), _rate_report(arm, cfg, selected_c))


def _resolve_quadrature(cfg: ExperimentConfig) -> int:
    return cfg.quadrature if cfg.quadrature is not None else analysis.default_quadrature_points(cfg.n_stop)


def _sweep_lambdas(cfg: ExperimentConfig, kernel: KernelFn, n: int, data, gram) -> list[float]:
    if cfg.lambda_rule == "fixed_power":
        return [krr.lambda_for(krr.fixed_power(c, cfg.s, cfg.beta), n, kernel, data) for c in cfg.c_values()]
    grid = krr.default_cv_grid(n, cfg.s, cfg.beta, cfg.cv_grid_points, cfg.cv_span)
    rule = krr.cross_validation(grid, cfg.cv_folds)
    return [krr.lambda_for(rule, n, kernel, data, gram=gram)]


def run_experiment(cfg: ExperimentConfig, progress=None) -> ExperimentResult:
    """Run the configured sweep and write all outputs under cfg.output_dir.

    For each n in the grid and each trial, the trial seed is
    mix(master_seed, n, trial); the data set, Gram matrix and test-grid
    kernel block are shared across the swept c values.  Records accumulate
    in canonical (n, trial) order, so outputs do not depend on evaluation
    scheduling.  On a solver failure, partial trial records are flushed
    before the error (annotated with its n and trial) propagates.
    """
    kernel = kernel_by_name(cfg.kernel, cfg.mercer_terms)
    target = target_by_name(cfg.target, cfg.s, cfg.truncation)
    points = _resolve_quadrature(cfg)
    grid = np.linspace(0.0, 1.0, points)
    weights = analysis.simpson_weights(points)
    f_star = eval_target(target, grid)

    sweeping = cfg.lambda_rule == "fixed_power" and cfg.c_grid is not None
    base_id = f"{cfg.kernel}-{cfg.target}-s{cfg.s:g}"
    if cfg.lambda_rule == "cross_validation":
        arms = [ArmResult(c=None, experiment_id=f"{base_id}-cv", records=[],
                          directory=cfg.output_dir)]
    else:
        arms = [ArmResult(c=c, experiment_id=f"{base_id}-c{c:g}", records=[],
                          directory=os.path.join(cfg.output_dir, f"c_{c:g}") if sweeping else cfg.output_dir)
                for c in cfg.c_values()]

    try:
        for n in cfg.n_grid():
            for trial in range(cfg.trials):
                seed = mix(cfg.seed, n, trial)
                try:
                    data = generate_data(target, n, cfg.noise_sigma, seed)
                    gram = gram_matrix(kernel, data.x)
                    lams = _sweep_lambdas(cfg, kernel, n, data, gram)
                    alphas = np.column_stack([
                        krr.fit_arrays(kernel, data.x, data.y, lam, gram=gram).alpha for lam in lams
                    ])
                    sq_acc = np.zeros(len(lams))
                    for start in range(0, points, _GRID_CHUNK):
                        block = slice(start, min(points, start + _GRID_CHUNK))
                        preds = kernel_matrix(kernel, grid[block], data.x) @ alphas
                        sq_acc += weights[block] @ (preds - f_star[block, None]) ** 2
                    errors = np.sqrt(np.maximum(sq_acc, 0.0))
                except Exception as exc:
                    raise type(exc)(f"{exc} (at n={n}, trial={trial})") from exc
                for arm, lam, err in zip(arms, lams, errors):
                    arm.records.append(analysis.TrialRecord(n=n, trial=trial, lam=lam, error_l2=float(err)))
            if progress is not None:
                progress(f"n={n} done ({cfg.trials} trials x {len(arms)} arm(s))")
    except Exception:
        for arm in arms:
            if arm.records:
                _write_arm(arm, cfg)
        raise

    for arm in arms:
        arm.summary = analysis.summarize(arm.records)
        arm.fit_rms = analysis.fit_rate(arm.summary)
        arm.fit_sq = analysis.fit_power_law(arm.summary.column("n"), arm.summary.column("mean_sq_error"))
        _write_arm(arm, cfg)

    best = min(arms, key=lambda a: a.summary.rows[-1].mean_error)
    if sweeping:
        sweep_rows = ["c,mean_error_at_n_stop,r_squared_error,r_rms_error"]
        for arm in arms:
            sweep_rows.append(",".join([
                format_float(arm.c), format_float(arm.summary.rows[-1].mean_error),
                format_float(arm.fit_sq.slope), format_float(arm.fit_rms.slope),
            ]))
        os.makedirs(cfg.output_dir, exist_ok=True)
        _write_text(os.path.join(cfg.output_dir, "c_sweep.csv"), "\n".join(sweep_rows) + "\n")
        top = dataclasses.replace(best, directory=cfg.output_dir)
        _write_arm(top, cfg, selected_c=best.c)
    return ExperimentResult(config=cfg, arms=arms, best=best, output_dir=cfg.output_dir,
                            quadrature_points=points)


def verify_lowerbound(m: int, s: float, beta: float, a: float, seed: int,
                      sigma_bar: float = 1.0, radius: float = 1.0) -> lowerbound.Certificate:
    """Build the min-kernel hardness family at block length m and certify it.

    The coupled sample size is n = floor(m**(s beta + 1)); rounding down
    keeps the KL budget conservative.
    """
    if m < 8:
        raise ConfigError(f"m must be >= 8, got {m}")
    if not 0.0 < a < 0.125:
        raise ConfigError(f"a must lie in (0, 1/8), got {a}")
    book = lowerbound.build_codebook(m, seed)
    family = lowerbound.build_family(book, min_kernel_model(), s, beta, radius, sigma_bar, a)
    n = max(1, int(float(m) ** (s * beta + 1.0)))
    return lowerbound.certify_lower_bound(family, n, a)


def spectral_report(model_name: str, lambdas, alphas, tail_tol: float = 1e-2,
                    embedding_x: float = 1.0) -> tuple[list[str], analysis.RateFit]:
    """CSV rows: N(lambda) per lambda, its log-log slope against 1/lambda,
    and embedding-constant partial sums per alpha at x = embedding_x."""
    if model_name not in _SPECTRAL_MODELS:
        raise ConfigError(f"unknown spectral model {model_name!r}")
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if lambdas.size < 2:
        raise ConfigError("need at least 2 lambda grid points")
    model = _SPECTRAL_MODELS[model_name]()
    rows = [REPORT_HEADER]
    n_lam = [effective_dimension(model, lam, tail_tol) for lam in lambdas]
    for lam, val in zip(lambdas, n_lam):
        rows.append(f"effective_dimension,{format_float(lam)},{format_float(val)},,,,,,")
    fit = analysis.fit_power_law(1.0 / lambdas, n_lam)
    rows.append(f"edr_fit,,,{format_float(fit.slope)},{format_float(1.0 / model.beta)},,,,")
    for alpha in alphas:
        for terms in _EMBEDDING_TERMS:
            val = embedding_constant_partial(model, alpha, embedding_x, terms)
            rows.append(f"embedding,,,,,{format_float(alpha)},{terms},"
                        f"{format_float(embedding_x)},{format_float(val)}")
    return rows, fit


def _cmd_run_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.c_grid is not None:
        grid = tuple(float(v) for v in args.c_grid.split(",") if v.strip())
        cfg = dataclasses.replace(cfg, c_grid=grid)
    if args.output_dir is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.output_dir)
    progress = None if args.quiet else lambda msg: print(msg, file=sys.stderr)
    result = run_experiment(cfg, progress=progress)
    best = result.best
    print(f"wrote {result.output_dir}: best arm {best.experiment_id} "
          f"r_squared_error={best.fit_sq.slope:.6g} r_rms_error={best.fit_rms.slope:.6g}")
    return 0


def _cmd_verify_lowerbound(args) -> int:
    cert = verify_lowerbound(args.m, args.s, args.beta, args.a, args.seed,
                             sigma_bar=args.sigma_bar, radius=args.radius)
    print(lowerbound.format_certificate(cert))
    return 0 if cert.passed else 4


def _cmd_spectral_report(args) -> int:
    if args.points < 2:
        raise ConfigError(f"need at least 2 lambda grid points, got {args.points}")
    if args.lambda_min <= 0 or args.lambda_max <= args.lambda_min:
        raise ConfigError("require 0 < lambda-min < lambda-max")
    lambdas = np.exp(np.linspace(math.log(args.lambda_min), math.log(args.lambda_max), args.points))
    alphas = [float(v) for v in args.alphas.split(",") if v.strip()]
    rows, fit = spectral_report(args.model, lambdas, alphas, tail_tol=args.tail_tol)
    _write_text(args.out, "\n".join(rows) + "\n")
    print(f"wrote {args.out}: effective-dimension slope {fit.slope:.6g} "
          f"(1/beta = {1.0 / _SPECTRAL_MODELS[args.model]().beta:.6g})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="krrlab",
                                     description="kernel ridge regression rate laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run-experiment", help="run a sweep from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--c-grid", default=None, help="comma-separated c values to sweep")
    p_run.add_argument("--output-dir", default=None)
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=_cmd_run_experiment)

    p_lb = sub.add_parser("verify-lowerbound", help="certify the hardness construction")
    p_lb.add_argument("--m", type=int, required=True)
    p_lb.add_argument("--s", type=float, required=True)
    p_lb.add_argument("--beta", type=float, required=True)
    p_lb.add_argument("--a", type=float, required=True)
    p_lb.add_argument("--seed", type=int, required=True)
    p_lb.add_argument("--sigma-bar", type=float, default=1.0)
    p_lb.add_argument("--radius", type=float, default=1.0)
    p_lb.set_defaults(func=_cmd_verify_lowerbound)

    p_sp = sub.add_parser("spectral-report", help="effective dimension and embedding sums")
    p_sp.add_argument("--model", required=True)
    p_sp.add_argument("--lambda-min", type=float, required=True)
    p_sp.add_argument("--lambda-max", type=float, required=True)
    p_sp.add_argument("--points", type=int, required=True)
    p_sp.add_argument("--alphas", default="0.4,0.6,1.0")
    p_sp.add_argument("--tail-tol", type=float, default=1e-2)
    p_sp.add_argument("--out", default="spectral_report.csv")
    p_sp.set_defaults(func=_cmd_spectral_report)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (krr.IllConditionedError, lowerbound.CodebookConstructionError,
            np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
