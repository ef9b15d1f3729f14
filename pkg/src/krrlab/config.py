"""Flat key=value experiment configuration with exact round-tripping."""

from __future__ import annotations

from dataclasses import dataclass, fields

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "emit_config", "load_config", "format_float"]


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


def format_float(x: float) -> str:
    """17 significant digits: parses back to the identical float."""
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: str = "sobolev_h1"
    target: str = "fourier_sobolev"
    s: float = 0.4
    beta: float = 2.0
    lambda_rule: str = "fixed_power"
    c: float = 1.0
    c_grid: tuple[float, ...] | None = None
    cv_folds: int = 5
    cv_grid_points: int = 20
    cv_span: float = 100.0
    n_start: int = 200
    n_stop: int = 2000
    n_step: int = 200
    trials: int = 20
    truncation: int = 1000
    quadrature: int | None = None  # None means "auto": 10 * n_stop + 1, odd
    noise_sigma: float = 1.0
    seed: int = 0
    output_dir: str = "out"
    mercer_terms: int = 32

    def __post_init__(self):
        if self.kernel not in ("sobolev_h1", "first_order_min", "truncated_mercer"):
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        if self.target not in ("fourier_sobolev", "min_eigen"):
            raise ConfigError(f"unknown target {self.target!r}")
        if self.lambda_rule not in ("fixed_power", "cross_validation"):
            raise ConfigError(f"unknown lambda_rule {self.lambda_rule!r}")
        if not 0.0 < self.s <= 2.0:
            raise ConfigError(f"s must lie in (0, 2], got {self.s}")
        if self.beta <= 1.0:
            raise ConfigError(f"beta must exceed 1, got {self.beta}")
        if self.n_start < 2 or self.n_step < 1 or self.n_stop < self.n_start:
            raise ConfigError(f"bad n grid: start={self.n_start} stop={self.n_stop} step={self.n_step}")
        if self.trials < 2:
            raise ConfigError(f"trials must be >= 2, got {self.trials}")
        if self.truncation < 1:
            raise ConfigError(f"truncation must be >= 1, got {self.truncation}")
        if self.noise_sigma < 0.0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.c <= 0.0:
            raise ConfigError(f"c must be positive, got {self.c}")
        if self.c_grid is not None and (len(self.c_grid) == 0 or any(c <= 0.0 for c in self.c_grid)):
            raise ConfigError("c_grid must be a non-empty list of positive values")
        if self.quadrature is not None and (self.quadrature < 3 or self.quadrature % 2 == 0):
            raise ConfigError(f"quadrature must be odd and >= 3, got {self.quadrature}")
        if self.cv_folds < 2 or self.cv_grid_points < 1 or self.cv_span <= 1.0:
            raise ConfigError("bad cross-validation settings")
        if self.mercer_terms < 1:
            raise ConfigError(f"mercer_terms must be >= 1, got {self.mercer_terms}")

    def n_grid(self) -> list[int]:
        return list(range(self.n_start, self.n_stop + 1, self.n_step))

    def c_values(self) -> tuple[float, ...]:
        return self.c_grid if self.c_grid is not None else (self.c,)


_INT_KEYS = {"cv_folds", "cv_grid_points", "n_start", "n_stop", "n_step",
             "trials", "truncation", "seed", "mercer_terms"}
_FLOAT_KEYS = {"s", "beta", "c", "cv_span", "noise_sigma"}
_STR_KEYS = {"kernel", "target", "lambda_rule", "output_dir"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse `key = value` lines; `#` starts a comment, blank lines ignored."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        try:
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key in _STR_KEYS:
                values[key] = val
            elif key == "quadrature":
                values[key] = None if val == "auto" else int(val)
            elif key == "c_grid":
                values[key] = None if val == "none" else tuple(float(v) for v in val.split(",") if v.strip())
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def emit_config(cfg: ExperimentConfig) -> str:
    """Serialize so that parse_config(emit_config(cfg)) == cfg."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "quadrature":
            text = "auto" if value is None else str(value)
        elif f.name == "c_grid":
            text = "none" if value is None else ",".join(format_float(v) for v in value)
        elif f.name in _FLOAT_KEYS:
            text = format_float(value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
