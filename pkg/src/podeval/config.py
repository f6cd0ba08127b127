"""Analysis configuration stored as a plain ``key = value`` text file."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .errors import ParseError
from .fap import COUNTING_MODES
from .mhm import DEFAULT_EXPERIMENTS, DEFAULT_STEP, DEFAULT_WINDOW, ROUNDING_RULES
from .pod import DEFAULT_GRID_POINTS, DEFAULT_LR_LEVEL

__all__ = ["AnalysisConfig", "load_config", "parse_config"]


@dataclass(frozen=True)
class AnalysisConfig:
    window: tuple = DEFAULT_WINDOW
    grid_step: float = DEFAULT_STEP
    experiments: int = DEFAULT_EXPERIMENTS
    rounding: str = "half-away"
    lr_level: float = DEFAULT_LR_LEVEL
    shm_threshold: float = 0.5
    fap_mode: str = "window-max"
    fap_threshold: float = 0.5
    output_dir: str = "."
    curve_points: int = DEFAULT_GRID_POINTS
    tie_tolerance: float = 1e-3

    def __post_init__(self):
        if self.rounding not in ROUNDING_RULES:
            raise ValueError(f"rounding must be one of {ROUNDING_RULES}")
        if self.fap_mode not in COUNTING_MODES:
            raise ValueError(f"fap_mode must be one of {COUNTING_MODES}")
        lo, hi = self.window
        if not hi > lo:
            raise ValueError("window must be increasing")
        if self.grid_step <= 0 or self.experiments < 1 or self.curve_points < 2:
            raise ValueError("grid_step, experiments and curve_points must be positive")
        if self.lr_level < 0 or not 0 < self.shm_threshold < 1 or not 0 < self.fap_threshold < 1:
            raise ValueError("lr_level must be >= 0 and thresholds must lie in (0, 1)")

    def dumps(self):
        lines = ["# podeval analysis configuration"]
        for key, value in asdict(self).items():
            if isinstance(value, tuple):
                value = ", ".join(repr(float(v)) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


_CONVERTERS = {
    "window": lambda s: tuple(float(v) for v in s.split(",")),
    "grid_step": float,
    "experiments": int,
    "rounding": str,
    "lr_level": float,
    "shm_threshold": float,
    "fap_mode": str,
    "fap_threshold": float,
    "output_dir": str,
    "curve_points": int,
    "tie_tolerance": float,
}
assert set(_CONVERTERS) == {f.name for f in fields(AnalysisConfig)}


def parse_config(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONVERTERS:
            raise ParseError(f"unknown configuration key {key!r}", line=lineno)
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {exc}", line=lineno) from None
        if key == "window" and len(values[key]) != 2:
            raise ParseError("window takes two values: start, stop", line=lineno)
    try:
        return AnalysisConfig(**values)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_config(path=None):
    if path is None:
        return AnalysisConfig()
    with open(path) as fh:
        return parse_config(fh.read())
