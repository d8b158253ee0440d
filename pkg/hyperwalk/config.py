"""Experiment configuration: flat KEY=value files plus command-line overrides.

Files are read with python-dotenv, so comments, quoting and ``export``
prefixes work the same as in a ``.env`` file. Every problem found is
reported at once through ConfigError.
"""

from __future__ import annotations

import io
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from dotenv import dotenv_values

from hyperwalk import settings
from hyperwalk.errors import ConfigError, ResourceLimitError
from hyperwalk.metrics import REFERENCE_KINDS
from hyperwalk.walk import INITIAL_STATES

logger = logging.getLogger(__name__)

FIGURES_BY_MODE = {
    "closed_form": ("pi_x", "hamming_profile"),
    "coherent": ("tvd_coherent", "tvd_instantaneous"),
    "decoherent": ("tvd_decoherent",),
    "sweep": ("mixing_vs_n", "instant_mixing_vs_n", "mixing_vs_p", "mixing_vs_n_deco"),
}
DEFAULT_FIGURE = {
    "closed_form": "hamming_profile",
    "coherent": "tvd_coherent",
    "decoherent": "tvd_decoherent",
    "sweep": "mixing_vs_n",
}
MODE_OF_FIGURE = {figure: mode for mode, figures in FIGURES_BY_MODE.items() for figure in figures}

# figures that hold a 2^n state vector (or enumerate 2^n vertices) for every n they touch
STATE_VECTOR_FIGURES = {
    "pi_x", "tvd_coherent", "tvd_instantaneous", "tvd_decoherent",
    "mixing_vs_n", "instant_mixing_vs_n", "mixing_vs_p", "mixing_vs_n_deco",
}
SWEEP_OVER_N = {"mixing_vs_n", "instant_mixing_vs_n", "mixing_vs_n_deco"}
DECOHERENT_FIGURES = {"tvd_decoherent", "mixing_vs_p", "mixing_vs_n_deco"}

DEFAULT_N_VALUES = {
    "mixing_vs_n": [4, 5, 6, 7, 8, 9, 10],
    "instant_mixing_vs_n": [4, 5, 6, 7, 8, 9, 10],
    "mixing_vs_n_deco": [4, 5, 6, 7, 8, 9],
}
DEFAULT_P_VALUES = [0.02, 0.05, 0.1, 0.2, 0.3, 0.4]

FORMATS = ("csv", "json", "both")
REFERENCE_CHOICES = ("both",) + REFERENCE_KINDS
KNOWN_KEYS = (
    "mode", "figure", "n", "t_max", "p", "epsilons", "trials", "seed",
    "n_values", "p_values", "initial", "reference", "out", "format", "jobs",
)
SEED_LIMIT = 2 ** 64


@dataclass
class ExperimentConfig:
    mode: str = "coherent"
    figure: str = "tvd_coherent"
    n: int = 8
    t_max: Optional[int] = None
    p: float = 0.1
    epsilons: List[float] = field(default_factory=lambda: [0.2])
    trials: int = settings.DEFAULT_TRIALS
    seed: int = settings.DEFAULT_SEED
    n_values: Optional[List[int]] = None
    p_values: Optional[List[float]] = None
    initial: str = "symmetric"
    reference: str = "both"
    out: Optional[str] = None
    format: str = "csv"
    jobs: int = 1

    def horizon(self, n=None) -> int:
        """t_max for dimension n: the configured value or 200·n."""
        if self.t_max is not None:
            return self.t_max
        return settings.default_t_max(self.n if n is None else n)

    def sweep_n_values(self) -> List[int]:
        if self.n_values:
            return list(self.n_values)
        return list(DEFAULT_N_VALUES.get(self.figure, [self.n]))

    def sweep_p_values(self) -> List[float]:
        if self.p_values:
            return list(self.p_values)
        if self.figure == "mixing_vs_p":
            return list(DEFAULT_P_VALUES)
        return [self.p]

    def output_targets(self) -> List[Tuple[str, str]]:
        """(format, path) pairs to write; format=both puts .csv and .json side by side."""
        formats = ["csv", "json"] if self.format == "both" else [self.format]
        if self.out is None:
            return [(fmt, f"{self.figure}.{fmt}") for fmt in formats]
        if len(formats) == 1:
            return [(formats[0], self.out)]
        stem = Path(self.out).with_suffix("")
        return [(fmt, f"{stem}.{fmt}") for fmt in formats]

    def reference_kinds(self) -> List[str]:
        return list(REFERENCE_KINDS) if self.reference == "both" else [self.reference]

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)


# --- Parsing ---

def parse_config_text(raw_text) -> Dict[str, str]:
    """KEY=value pairs with lower-cased keys; keys without a value are kept as ''."""
    values = dotenv_values(stream=io.StringIO(raw_text or ""))
    return {key.strip().lower(): ("" if value is None else value.strip()) for key, value in values.items()}


def _split(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    return [item.strip() for item in str(value).split(",") if item.strip()]


def _as_int(name, value, errors):
    if isinstance(value, bool):
        errors.append(f"{name}: expected an integer, got {value!r}.")
        return None
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except ValueError:
        errors.append(f"{name}: expected an integer, got {value!r}.")
        return None


def _as_float(name, value, errors):
    try:
        return float(str(value).strip()) if not isinstance(value, (int, float)) else float(value)
    except ValueError:
        errors.append(f"{name}: expected a number, got {value!r}.")
        return None


def _as_list(name, value, convert, errors):
    items = _split(value)
    if not items:
        errors.append(f"{name}: expected a comma-separated list, got {value!r}.")
        return None
    parsed = [convert(name, item, errors) for item in items]
    return None if any(item is None for item in parsed) else parsed


# --- Validation ---

def validate_config(raw_text="", overrides: Optional[Mapping[str, object]] = None) -> ExperimentConfig:
    """Parse and range-check a config; overrides (e.g. CLI flags) win over file values.

    Raises ConfigError listing every problem, or ResourceLimitError when the
    config is well-formed but exceeds a size cap.
    """
    values: Dict[str, object] = dict(parse_config_text(raw_text))
    errors: List[str] = []
    limits: List[str] = []

    for key in values:
        if key not in KNOWN_KEYS:
            errors.append(f"{key}: unknown key. Valid keys are: {', '.join(KNOWN_KEYS)}.")
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    config = ExperimentConfig(jobs=settings.default_jobs())
    _read_fields(values, config, errors)
    _check_mode(values, config, errors)
    _check_ranges(config, errors)
    if not errors:
        _check_limits(config, limits)

    if errors:
        raise ConfigError(errors + limits)
    if limits:
        raise ResourceLimitError("; ".join(limits))
    logger.debug("validated config %s", config.as_dict())
    return config


def _read_fields(values, config, errors):
    scalar = {
        "n": _as_int, "t_max": _as_int, "trials": _as_int, "seed": _as_int, "jobs": _as_int,
        "p": _as_float,
    }
    for key, convert in scalar.items():
        if key in values:
            parsed = convert(key, values[key], errors)
            if parsed is not None:
                setattr(config, key, parsed)

    lists = {"epsilons": _as_float, "n_values": _as_int, "p_values": _as_float}
    for key, convert in lists.items():
        if key in values:
            parsed = _as_list(key, values[key], convert, errors)
            if parsed is not None:
                setattr(config, key, parsed)

    for key in ("initial", "reference", "out", "format"):
        if key in values and values[key] != "":
            setattr(config, key, str(values[key]).strip())


def _check_mode(values, config, errors):
    mode = str(values.get("mode", "")).strip().lower() or None
    figure = str(values.get("figure", "")).strip().lower() or None

    if mode is not None and mode not in FIGURES_BY_MODE:
        errors.append(f"mode: '{mode}' is not one of {', '.join(FIGURES_BY_MODE)}.")
        return
    if figure is not None and figure not in MODE_OF_FIGURE:
        errors.append(f"figure: '{figure}' is not one of {', '.join(MODE_OF_FIGURE)}.")
        return

    if figure is None:
        mode = mode or "coherent"
        figure = DEFAULT_FIGURE[mode]
    elif mode is None:
        mode = MODE_OF_FIGURE[figure]
    elif MODE_OF_FIGURE[figure] != mode:
        errors.append(f"figure: '{figure}' belongs to mode '{MODE_OF_FIGURE[figure]}', not '{mode}'.")
    config.mode, config.figure = mode, figure

    if config.n_values and figure not in SWEEP_OVER_N:
        errors.append(f"n_values: only used by the {', '.join(sorted(SWEEP_OVER_N))} figures.")
    if config.p_values and figure not in DECOHERENT_FIGURES:
        errors.append(f"p_values: only used by the {', '.join(sorted(DECOHERENT_FIGURES))} figures.")
    if config.reference != "both" and figure != "instant_mixing_vs_n":
        errors.append("reference: only used by the instant_mixing_vs_n figure.")
    # coherent figures measure against π of the symmetric start
    if config.initial != "symmetric" and figure not in DECOHERENT_FIGURES:
        errors.append(f"initial: only the {', '.join(sorted(DECOHERENT_FIGURES))} figures take another start.")


def _check_ranges(config, errors):
    dims = config.n_values if config.n_values else [config.n]
    for n in dims:
        if n < settings.MIN_N:
            errors.append(f"n: must be >= {settings.MIN_N}, got {n}.")
    if config.t_max is not None and config.t_max < 1:
        errors.append(f"t_max: must be >= 1, got {config.t_max}.")
    for p in [config.p] + list(config.p_values or []):
        if not 0.0 <= p <= 1.0:
            errors.append(f"p: must lie in [0, 1], got {p}.")
    for epsilon in config.epsilons:
        if not 0.0 < epsilon <= 2.0:
            errors.append(f"epsilons: each threshold must lie in (0, 2], got {epsilon}.")
    if config.trials < 1:
        errors.append(f"trials: must be >= 1, got {config.trials}.")
    if not 0 <= config.seed < SEED_LIMIT:
        errors.append(f"seed: must be a 64-bit unsigned integer, got {config.seed}.")
    if config.jobs < 1:
        errors.append(f"jobs: must be >= 1, got {config.jobs}.")
    if config.initial not in INITIAL_STATES:
        errors.append(f"initial: '{config.initial}' is not one of {', '.join(sorted(INITIAL_STATES))}.")
    if config.reference not in REFERENCE_CHOICES:
        errors.append(f"reference: '{config.reference}' is not one of {', '.join(REFERENCE_CHOICES)}.")
    if config.format not in FORMATS:
        errors.append(f"format: '{config.format}' is not one of {', '.join(FORMATS)}.")


def _check_limits(config, limits):
    dims = config.sweep_n_values() if config.figure in SWEEP_OVER_N else [config.n]
    if config.figure in STATE_VECTOR_FIGURES:
        cap = settings.max_state_n()
        for n in dims:
            if n > cap:
                limits.append(
                    f"n: {n} exceeds the state-vector cap of {cap} for figure '{config.figure}' "
                    f"(raise HYPERWALK_MAX_N at your own risk)."
                )
                continue
            cells = (config.horizon(n) + 1) * 2 ** n
            if cells > settings.HISTORY_BUDGET:
                limits.append(f"t_max: {config.horizon(n)} steps at n={n} exceed the history budget.")
    else:
        for n in dims:
            if n > settings.CLOSED_FORM_MAX_N:
                limits.append(f"n: {n} exceeds the closed-form limit of {settings.CLOSED_FORM_MAX_N}.")

    if config.figure in DECOHERENT_FIGURES:
        for n in dims:
            if n > settings.max_state_n():
                continue
            work = config.trials * config.horizon(n) * n * 2 ** n
            if work > settings.WORK_BUDGET:
                limits.append(f"trials: {config.trials} trials at n={n} exceed the simulation work budget.")
