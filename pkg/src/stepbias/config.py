"""Experiment configuration: a single validated JSON file."""

import json
from dataclasses import asdict, dataclass, field

from .errors import ParseError, ValidationError

EXPERIMENTS = (
    "toy2d",
    "quadratic_certify",
    "eta_sweep",
    "alpha_sweep",
    "scale_sweep",
    "filter_profiles",
)

TAU = 1.0 - 1e-5  # eta_big default is tau * 2 / sigma_1.

DEFAULT_ETA_GRID = (0.25, 0.5, 0.75, 1.0, 1.4, 1.7, TAU * 2.0)
DEFAULT_ALPHA_GRID = (0.2, 0.1, 0.05, 0.02, 0.01)
DEFAULT_SCALE_GRID = (0.5, 1.0, 2.0, 4.0)


@dataclass
class ExperimentConfig:
    """All knobs of a run; unknown JSON keys are rejected at load time.

    Grids are interpreted per experiment: eta_grid in units of
    1/sigma_1 of the train operator, alpha_grid as fractions of the
    initial excess train loss, scale_grid as kernel scales. eta_small
    and eta_big (same 1/sigma_1 units) default to 1 and tau*2 with
    tau = 1 - 1e-5.
    """

    experiment: str
    seed: int = 0
    dataset_path: str | None = None
    n: int = 200
    d: int = 2
    n_test: int = 1000
    eta_grid: list = field(default_factory=lambda: list(DEFAULT_ETA_GRID))
    alpha_grid: list = field(default_factory=lambda: list(DEFAULT_ALPHA_GRID))
    scale_grid: list = field(default_factory=lambda: list(DEFAULT_SCALE_GRID))
    eta_small: float | None = None
    eta_big: float | None = None
    alpha: float | None = None
    lam: float = 1e-6
    scale: float = 1.0
    sigma1: float = 1.0
    sigma2: float = 0.2
    instances: int = 20
    output_dir: str = "out"


_GRID_BY_EXPERIMENT = {
    "eta_sweep": "eta_grid",
    "alpha_sweep": "alpha_grid",
    "scale_sweep": "scale_grid",
}

_FIELD_TYPES = {
    "experiment": str,
    "seed": int,
    "dataset_path": (str, type(None)),
    "n": int,
    "d": int,
    "n_test": int,
    "eta_grid": list,
    "alpha_grid": list,
    "scale_grid": list,
    "eta_small": (int, float, type(None)),
    "eta_big": (int, float, type(None)),
    "alpha": (int, float, type(None)),
    "lam": (int, float),
    "scale": (int, float),
    "sigma1": (int, float),
    "sigma2": (int, float),
    "instances": int,
    "output_dir": str,
}


def validate_config(raw):
    """Check a raw mapping and build an ExperimentConfig from it."""
    if not isinstance(raw, dict):
        raise ValidationError("config root must be a JSON object")
    unknown = set(raw) - set(_FIELD_TYPES)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" not in raw:
        raise ValidationError("experiment is required")
    for key, value in raw.items():
        want = _FIELD_TYPES[key]
        if isinstance(value, bool) or not isinstance(value, want):
            raise ValidationError(f"{key}: expected {want}, got {value!r}")
    cfg = ExperimentConfig(**raw)
    if cfg.experiment not in EXPERIMENTS:
        raise ValidationError(
            f"experiment must be one of {EXPERIMENTS}, got {cfg.experiment!r}"
        )
    for name in ("n", "d", "n_test", "instances"):
        if getattr(cfg, name) < 1:
            raise ValidationError(f"{name} must be positive")
    for name in ("lam",):
        if getattr(cfg, name) < 0:
            raise ValidationError(f"{name} must be nonnegative")
    for name in ("scale", "sigma1", "sigma2"):
        if getattr(cfg, name) <= 0:
            raise ValidationError(f"{name} must be positive")
    if cfg.experiment == "toy2d" and not cfg.sigma1 > cfg.sigma2:
        raise ValidationError("sigma1 must exceed sigma2")
    grid_name = _GRID_BY_EXPERIMENT.get(cfg.experiment)
    if grid_name is not None:
        grid = getattr(cfg, grid_name)
        if not grid:
            raise ValidationError(grid_name)
        if not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0
            for v in grid
        ):
            raise ValidationError(f"{grid_name} must contain positive numbers")
    return cfg


def load_config(path):
    """Parse and validate a JSON config file."""
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return validate_config(raw)


def canonical_config(cfg):
    """Mapping that round-trips through validate_config to an equal config."""
    return asdict(cfg)


def save_config(cfg, path):
    with open(path, "w") as fh:
        json.dump(canonical_config(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
