"""Modified and standard hit/miss analyses of classifier probability traces.

A classifier's per-time-step detection probabilities for a set of events are
averaged onto a common time grid. The modified analysis turns each averaged
probability ``P`` into ``n = round(10 * P)`` hits among 10 pseudo-experiments,
runs a separate hit/miss POD analysis on each experiment and averages the
resulting a90/95 values. The standard analysis thresholds ``P`` at 0.5.

Time is signed seconds relative to the event (negative before it).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllExperimentsDegenerate,
    DegenerateData,
    DomainError,
    EmptyInput,
    MisalignedTrace,
    NoValidModel,
    ParseError,
)
from .glm import TrialSet
from .pod import PodSummary, summarize

__all__ = [
    "DEFAULT_WINDOW",
    "DEFAULT_STEP",
    "DEFAULT_EXPERIMENTS",
    "ProbabilityTrace",
    "AveragedTrace",
    "ExperimentMatrix",
    "MhmResult",
    "time_grid",
    "average_traces",
    "round_count",
    "expand",
    "modified_hit_miss",
    "standard_hit_miss",
    "pooled_hit_miss",
    "read_traces_csv",
    "write_traces_csv",
]

DEFAULT_WINDOW = (-7.0, 0.0)
DEFAULT_STEP = 0.05
DEFAULT_EXPERIMENTS = 10
MIN_COVERAGE = 0.5
ROUNDING_RULES = ("half-away", "half-even")


@dataclass(frozen=True, eq=False)
class ProbabilityTrace:
    """Detection probabilities of one classifier over one event window."""

    event_id: str
    t: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.t, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if t.shape != p.shape or t.ndim != 1 or t.size == 0:
            raise DomainError(f"trace {self.event_id!r}: t and p must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise DomainError(f"trace {self.event_id!r}: timestamps must be strictly increasing")
        if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
            raise DomainError(f"trace {self.event_id!r}: probabilities must lie in [0, 1]")
        object.__setattr__(self, "event_id", str(self.event_id))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True, eq=False)
class AveragedTrace:
    t: np.ndarray
    p_mean: np.ndarray
    n_events: int
    skipped: tuple = ()

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        p = np.asarray(self.p_mean, dtype=float)
        if t.shape != p.shape or t.ndim != 1:
            raise DomainError("t and p_mean must be 1-d arrays of equal length")
        if np.any((p < 0) | (p > 1)):
            raise DomainError("averaged probabilities must lie in [0, 1]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p_mean", p)

    @classmethod
    def from_trace(cls, trace: ProbabilityTrace):
        return cls(trace.t, trace.p, 1)


@dataclass(frozen=True, eq=False)
class ExperimentMatrix:
    """0/1 outcomes: one row per pseudo-experiment, one column per time step."""

    cells: np.ndarray
    t: np.ndarray

    @property
    def n_experiments(self):
        return self.cells.shape[0]

    def row(self, r) -> TrialSet:
        return TrialSet.from_binary(self.t, self.cells[r])

    def column_sums(self):
        return self.cells.sum(axis=0)


def time_grid(window=DEFAULT_WINDOW, step=DEFAULT_STEP):
    start, stop = map(float, window)
    if not stop > start or not step > 0:
        raise DomainError(f"invalid window {window!r} / step {step!r}")
    n = int(round((stop - start) / step))
    # rounding keeps grid times free of accumulated float noise
    return np.round(start + step * np.arange(n + 1), 10)


def average_traces(traces, window=DEFAULT_WINDOW, step=DEFAULT_STEP, min_coverage=MIN_COVERAGE):
    """Pointwise mean of the traces on a common grid (nearest-sample alignment).

    A grid time takes a trace's nearest sample if one lies within half a
    step. Traces matching fewer than ``min_coverage`` of the grid times are
    skipped with a :class:`MisalignedTrace` warning and listed in
    ``AveragedTrace.skipped``.
    """
    traces = list(traces)
    if not traces:
        raise EmptyInput("no traces supplied")
    grid = time_grid(window, step)
    total = np.zeros(grid.size)
    count = np.zeros(grid.size)
    skipped = []
    tol = 0.5 * step + 1e-9
    for trace in traces:
        idx = np.clip(np.searchsorted(trace.t, grid), 1, max(trace.t.size - 1, 1))
        left = trace.t[idx - 1]
        right = trace.t[np.minimum(idx, trace.t.size - 1)]
        use_left = np.abs(grid - left) <= np.abs(right - grid)
        nearest = np.where(use_left, idx - 1, np.minimum(idx, trace.t.size - 1))
        hit = np.abs(trace.t[nearest] - grid) <= tol
        if hit.mean() < min_coverage:
            warnings.warn(MisalignedTrace(
                f"trace {trace.event_id!r} covers {hit.mean():.0%} of the window; skipped"))
            skipped.append(trace.event_id)
            continue
        total[hit] += trace.p[nearest[hit]]
        count[hit] += 1
    used = len(traces) - len(skipped)
    if used == 0:
        raise EmptyInput("every trace was skipped as misaligned")
    keep = count > 0
    if not keep.all():
        warnings.warn(MisalignedTrace(f"{int((~keep).sum())} grid times have no samples; dropped"))
    p_mean = np.clip(total[keep] / count[keep], 0.0, 1.0)
    return AveragedTrace(grid[keep], p_mean, used, tuple(skipped))


def round_count(values, rounding="half-away"):
    """Round non-negative values to integers by the named rule."""
    values = np.asarray(values, dtype=float)
    if rounding == "half-away":
        return np.floor(values + 0.5).astype(np.int64)
    if rounding == "half-even":
        return np.rint(values).astype(np.int64)
    raise DomainError(f"unknown rounding rule {rounding!r}; expected one of {ROUNDING_RULES}")


def expand(avg: AveragedTrace, n_experiments=DEFAULT_EXPERIMENTS, rounding="half-away") -> ExperimentMatrix:
    """Pseudo-experiment matrix: at each time, the first ``round(n * P)`` rows are hits."""
    if n_experiments < 1:
        raise DomainError("need at least one experiment")
    counts = round_count(n_experiments * avg.p_mean, rounding)
    rows = np.arange(n_experiments)[:, None]
    cells = (rows < counts[None, :]).astype(np.int8)
    return ExperimentMatrix(cells, avg.t.copy())


@dataclass(eq=False)
class MhmResult:
    a90_95_mean: float
    per_experiment: list
    excluded: dict = field(default_factory=dict)
    matrix: ExperimentMatrix | None = None

    @property
    def values(self):
        """a90/95 of every experiment that produced one."""
        return [s.a90_95 for s in self.per_experiment if s is not None and s.a90_95 is not None]


def _default_grid(avg, grid):
    if grid is not None:
        return tuple(grid)
    return float(avg.t.min()), float(avg.t.max()), 512


def modified_hit_miss(avg: AveragedTrace, grid=None, n_experiments=DEFAULT_EXPERIMENTS,
                      rounding="half-away", level=None, row_order=None) -> MhmResult:
    """Modified hit/miss analysis of an averaged trace.

    Every pseudo-experiment gets its own four-model POD analysis. Those with
    no a90/95 (degenerate data, no valid model, or a bound that never reaches
    0.9) are left out of the mean and listed in ``MhmResult.excluded``.

    ``row_order`` permutes the experiment rows before analysis; the result
    does not depend on it.
    """
    matrix = expand(avg, n_experiments, rounding)
    if row_order is not None:
        matrix = ExperimentMatrix(matrix.cells[np.asarray(row_order)], matrix.t)
    grid = _default_grid(avg, grid)
    per_experiment = []
    excluded = {}
    cache = {}
    for r in range(matrix.n_experiments):
        key = matrix.cells[r].tobytes()
        if key not in cache:
            try:
                cache[key] = summarize(matrix.row(r), grid, level)
            except (DegenerateData, NoValidModel) as exc:
                cache[key] = exc
        outcome = cache[key]
        if isinstance(outcome, Exception):
            per_experiment.append(None)
            excluded[r] = f"{outcome.name}: {outcome}"
        else:
            per_experiment.append(outcome)
            if outcome.a90_95 is None:
                excluded[r] = "lower bound never reaches 0.9 on the grid"
    values = [s.a90_95 for s in per_experiment if s is not None and s.a90_95 is not None]
    if not values:
        raise AllExperimentsDegenerate(
            f"none of the {matrix.n_experiments} experiments produced an a90/95")
    return MhmResult(float(np.mean(values)), per_experiment, excluded, matrix)


def standard_hit_miss(avg: AveragedTrace, grid=None, threshold=0.5, level=None) -> PodSummary:
    """Standard hit/miss: a hit wherever the averaged probability exceeds ``threshold``."""
    outcomes = (avg.p_mean > threshold).astype(np.int64)
    return summarize(TrialSet.from_binary(avg.t, outcomes), _default_grid(avg, grid), level)


def pooled_hit_miss(avg: AveragedTrace, grid=None, n_experiments=DEFAULT_EXPERIMENTS,
                    rounding="half-away", level=None) -> PodSummary:
    """One POD analysis of all pseudo-experiments together (``trials = n`` per time)."""
    matrix = expand(avg, n_experiments, rounding)
    data = TrialSet(matrix.t, matrix.column_sums(), np.full(matrix.t.size, n_experiments))
    return summarize(data, _default_grid(avg, grid), level)


# ---------------------------------------------------------------------------
# CSV


TRACE_HEADER = ["event_id", "t_seconds", "probability"]


def read_traces_csv(path):
    """Read ``event_id,t_seconds,probability`` rows into traces, in first-seen order."""
    groups = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInput(f"{path}: empty file")
        if [h.strip() for h in header] != TRACE_HEADER:
            raise ParseError(f"expected header {','.join(TRACE_HEADER)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            event, t_text, p_text = (c.strip() for c in row)
            try:
                t, p = float(t_text), float(p_text)
            except ValueError:
                raise ParseError(f"non-numeric value in {row!r}", line=lineno) from None
            if t > 0:
                raise ParseError(f"t_seconds must be <= 0 (relative to the event), got {t}", line=lineno)
            if not 0.0 <= p <= 1.0:
                raise ParseError(f"probability must lie in [0, 1], got {p}", line=lineno)
            groups.setdefault(event, []).append((t, p, lineno))
    if not groups:
        raise EmptyInput(f"{path}: no data rows")
    traces = []
    for event, rows in groups.items():
        rows.sort(key=lambda r: r[0])
        for (t0, _, _), (t1, _, line) in zip(rows, rows[1:]):
            if t1 == t0:
                raise ParseError(f"duplicate timestamp {t1} in event {event!r}", line=line)
        traces.append(ProbabilityTrace(event, [r[0] for r in rows], [r[1] for r in rows]))
    return traces


def write_traces_csv(traces, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for trace in traces:
            for t, p in zip(trace.t, trace.p):
                writer.writerow([trace.event_id, f"{t:.10g}", f"{p:.10g}"])
