"""Binomial GLM with one process parameter: ``g(p) = b0 + b1 * T(a)``.

``g`` is the logit or probit link and ``T`` the identity or the natural log.
Fitting is by iteratively reweighted least squares (Fisher scoring) on an
internally standardized axis, with step halving so that the log-likelihood
never decreases between iterations.

The log-likelihood used throughout omits the binomial coefficients, so a
grouped observation ``(a, k, n)`` contributes exactly what ``n`` replicated
Bernoulli observations at ``a`` would.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import specfun
from .errors import DegenerateData, DomainError, EmptyInput, NonPositiveAxis, ParseError

__all__ = [
    "Link",
    "Axis",
    "TrialSet",
    "FittedGlm",
    "fit",
    "deviance_of",
    "profile_log_likelihood",
    "saturated_log_likelihood",
    "separation_direction",
    "read_trials_csv",
    "write_trials_csv",
]

MAX_ITER = 100
LL_TOL = 1e-10
STEP_TOL = 1e-8
SEPARATION_SLOPE = 1e4
_MAX_HALVINGS = 60


class Link(enum.Enum):
    LOGIT = "logit"
    PROBIT = "probit"

    def cdf(self, eta):
        """Inverse link: probability for linear predictor ``eta``."""
        if self is Link.LOGIT:
            return special.expit(eta)
        return special.ndtr(eta)

    def log_cdf_pair(self, eta):
        """``(log p, log(1 - p))`` evaluated without cancellation."""
        if self is Link.LOGIT:
            return special.log_expit(eta), special.log_expit(-eta)
        return special.log_ndtr(eta), special.log_ndtr(-eta)

    def link(self, p):
        """The link function itself, for a scalar probability in (0, 1)."""
        p = float(p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"link requires 0 < p < 1, got {p!r}")
        if self is Link.LOGIT:
            return float(np.log(p) - np.log1p(-p))
        return specfun.normal_quantile(p)

    def scores(self, eta, hits, misses):
        """Per-observation score d loglik / d eta and Fisher weight."""
        if self is Link.LOGIT:
            p = special.expit(eta)
            trials = hits + misses
            return hits - trials * p, trials * p * (1.0 - p)
        log_phi = -0.5 * eta * eta - 0.5 * np.log(2.0 * np.pi)
        log_p, log_q = special.log_ndtr(eta), special.log_ndtr(-eta)
        # Mills ratios phi/Phi and phi/(1 - Phi) kept in log space
        score = hits * np.exp(log_phi - log_p) - misses * np.exp(log_phi - log_q)
        weight = (hits + misses) * np.exp(2.0 * log_phi - log_p - log_q)
        return score, weight


class Axis(enum.Enum):
    CARTESIAN = "cart"
    LOGARITHMIC = "log"

    def forward(self, a):
        a = np.asarray(a, dtype=float)
        if self is Axis.CARTESIAN:
            return a
        if np.any(a <= 0.0):
            raise NonPositiveAxis("logarithmic axis requires every a > 0")
        return np.log(a)

    def inverse(self, x):
        x = np.asarray(x, dtype=float)
        return x if self is Axis.CARTESIAN else np.exp(x)


@dataclass(frozen=True, eq=False)
class TrialSet:
    """Grouped binomial observations ``(a, hits, trials)``."""

    a: np.ndarray
    hits: np.ndarray
    trials: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        hits = np.atleast_1d(np.asarray(self.hits))
        trials = np.atleast_1d(np.asarray(self.trials))
        if not (a.shape == hits.shape == trials.shape) or a.ndim != 1:
            raise DomainError("a, hits and trials must be 1-d arrays of equal length")
        if a.size == 0:
            raise DomainError("a TrialSet needs at least one point")
        if not np.all(np.isfinite(a)):
            raise DomainError("process-parameter values must be finite")
        if np.any(hits != np.round(hits)) or np.any(trials != np.round(trials)):
            raise DomainError("hits and trials must be integers")
        hits = hits.astype(np.int64)
        trials = trials.astype(np.int64)
        if np.any(trials < 1) or np.any(hits < 0) or np.any(hits > trials):
            raise DomainError("require 0 <= hits <= trials and trials >= 1 at every point")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "hits", hits)
        object.__setattr__(self, "trials", trials)

    @classmethod
    def from_points(cls, points):
        points = list(points)
        if not points:
            raise DomainError("a TrialSet needs at least one point")
        a, hits, trials = zip(*points)
        return cls(np.array(a, dtype=float), np.array(hits), np.array(trials))

    @classmethod
    def from_binary(cls, a, outcomes):
        outcomes = np.asarray(outcomes)
        return cls(np.asarray(a, dtype=float), outcomes.astype(np.int64), np.ones(outcomes.shape, dtype=np.int64))

    @property
    def misses(self):
        return self.trials - self.hits

    @property
    def points(self):
        return [(float(a), int(h), int(t)) for a, h, t in zip(self.a, self.hits, self.trials)]

    def __len__(self):
        return self.a.size

    def n_distinct(self):
        return np.unique(self.a).size


@dataclass(frozen=True, eq=False)
class FittedGlm:
    """Result of :func:`fit`.

    When ``separation_flag`` is set the coefficients are not estimates: the
    slope is reported as ``+/-inf`` (direction of the trend) or NaN and the
    likelihood summaries as NaN. ``reason`` then says why.
    """

    b0: float
    b1: float
    link: Link
    axis: Axis
    log_likelihood: float
    deviance: float
    converged: bool
    separation_flag: bool
    iterations: int
    cov: np.ndarray = field(default_factory=lambda: np.full((2, 2), np.nan))
    reason: str = ""
    ll_history: tuple = ()

    @property
    def usable(self):
        return self.converged and not self.separation_flag

    @property
    def std_errors(self):
        return np.sqrt(np.diag(self.cov))

    def describe(self):
        return f"{self.axis.value}-{self.link.value}"


# ---------------------------------------------------------------------------
# likelihood pieces


def _xlogy(k, logp):
    # k * log p with the 0 * log 0 = 0 convention
    return np.where(k > 0, k * np.where(k > 0, logp, 0.0), 0.0)


def _loglik(x, hits, misses, b0, b1, link):
    """Log-likelihood, vectorized over parameter arrays ``b0``, ``b1``."""
    b0 = np.asarray(b0, dtype=float)[..., None]
    b1 = np.asarray(b1, dtype=float)[..., None]
    eta = b0 + b1 * x
    log_p, log_q = link.log_cdf_pair(eta)
    return np.sum(_xlogy(hits, log_p) + _xlogy(misses, log_q), axis=-1)


def saturated_log_likelihood(data: TrialSet) -> float:
    frac = data.hits / data.trials
    with np.errstate(divide="ignore"):
        value = _xlogy(data.hits, np.log(frac)) + _xlogy(data.misses, np.log1p(-frac))
    return float(np.sum(value))


def profile_log_likelihood(data: TrialSet, b0, b1, link: Link, axis: Axis):
    """Binomial log-likelihood at arbitrary coefficients.

    ``b0`` and ``b1`` may be arrays of equal shape; the result then has that
    shape.
    """
    x = axis.forward(data.a)
    value = _loglik(x, data.hits, data.misses, b0, b1, link)
    return float(value) if np.ndim(value) == 0 else value


def deviance_of(data: TrialSet, model) -> float:
    """Binomial deviance of ``model`` (anything with b0, b1, link, axis) on ``data``."""
    x = model.axis.forward(data.a)
    p = model.link.cdf(model.b0 + model.b1 * x)
    h, m, t = data.hits, data.misses, data.trials
    with np.errstate(divide="ignore", invalid="ignore"):
        term_h = np.where(h > 0, h * np.log(h / (t * p)), 0.0)
        term_m = np.where(m > 0, m * np.log(m / (t * (1.0 - p))), 0.0)
    return float(max(0.0, 2.0 * np.sum(term_h + term_m)))


def separation_direction(data: TrialSet) -> int:
    """+1 / -1 if hits and misses are (quasi-)completely ordered in a, else 0.

    A point with both hits and misses belongs to both sets, so ordering is
    only possible when at most one a value is shared between them.
    """
    hit_a = data.a[data.hits > 0]
    miss_a = data.a[data.misses > 0]
    if hit_a.size == 0 or miss_a.size == 0:
        return 0
    if miss_a.max() <= hit_a.min():
        return 1
    if hit_a.max() <= miss_a.min():
        return -1
    return 0


# ---------------------------------------------------------------------------
# fitting


def _flagged(link, axis, reason, b0=np.nan, b1=np.nan):
    return FittedGlm(b0=b0, b1=b1, link=link, axis=axis, log_likelihood=np.nan,
                     deviance=np.nan, converged=False, separation_flag=True,
                     iterations=0, reason=reason)


def _standardize(x):
    center = float(np.mean(x))
    scale = float(np.std(x))
    return center, scale


def fit(data: TrialSet, link: Link = Link.LOGIT, axis: Axis = Axis.CARTESIAN) -> FittedGlm:
    """Maximum-likelihood fit of one (axis, link) POD model.

    Degenerate data (all hits, all misses, hits and misses ordered in a, or
    a slope beyond 1e4 on the standardized axis) does not raise; it comes
    back with ``separation_flag`` set and ``converged`` false.
    """
    x = axis.forward(data.a)
    if data.n_distinct() < 2:
        raise DomainError("at least two distinct process-parameter values are required")
    hits = data.hits.astype(float)
    misses = data.misses.astype(float)
    total_hits = hits.sum()
    if total_hits == 0:
        return _flagged(link, axis, "all misses", b0=-np.inf)
    if misses.sum() == 0:
        return _flagged(link, axis, "all hits", b0=np.inf)
    direction = separation_direction(data)
    if direction:
        return _flagged(link, axis, "complete separation", b1=direction * np.inf)

    center, scale = _standardize(x)
    xs = (x - center) / scale
    design = np.column_stack([np.ones_like(xs), xs])

    frac = np.clip(total_hits / data.trials.sum(), 0.01, 0.99)
    beta = np.array([link.link(frac), 0.0])
    ll = float(_loglik(xs, hits, misses, beta[0], beta[1], link))
    history = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        eta = design @ beta
        score, weight = link.scores(eta, hits, misses)
        info = design.T @ (weight[:, None] * design)
        grad = design.T @ score
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError:
            break
        new_ll = float(_loglik(xs, hits, misses, *(beta + step), link))
        halvings = 0
        while not new_ll >= ll and halvings < _MAX_HALVINGS:
            step *= 0.5
            new_ll = float(_loglik(xs, hits, misses, *(beta + step), link))
            halvings += 1
        if not new_ll >= ll:
            # no ascent possible along the scoring direction: at the optimum to rounding
            step = np.zeros(2)
            new_ll = ll
        beta = beta + step
        gain = new_ll - ll
        ll = new_ll
        history.append(ll)
        if abs(beta[1]) > SEPARATION_SLOPE:
            return _flagged(link, axis, "slope diverging (separation)", b1=np.sign(beta[1]) * np.inf)
        if abs(gain) < LL_TOL and np.linalg.norm(step) < STEP_TOL:
            converged = True
            break

    eta = design @ beta
    _, weight = link.scores(eta, hits, misses)
    info_s = design.T @ (weight[:, None] * design)
    b1 = beta[1] / scale
    b0 = beta[0] - b1 * center
    # d(b0, b1) / d(beta_s)
    jac = np.array([[1.0, -center / scale], [0.0, 1.0 / scale]])
    try:
        cov = jac @ np.linalg.inv(info_s) @ jac.T
    except np.linalg.LinAlgError:
        cov = np.full((2, 2), np.nan)
    deviance = max(0.0, 2.0 * (saturated_log_likelihood(data) - ll))
    return FittedGlm(b0=float(b0), b1=float(b1), link=link, axis=axis, log_likelihood=ll,
                     deviance=deviance, converged=converged, separation_flag=False,
                     iterations=iterations, cov=cov,
                     reason="" if converged else "iteration limit reached",
                     ll_history=tuple(history))


def require_usable(model: FittedGlm) -> FittedGlm:
    if model.separation_flag:
        raise DegenerateData(f"{model.describe()} fit is degenerate: {model.reason}")
    return model


# ---------------------------------------------------------------------------
# CSV

TRIALS_HEADER = ["a", "hits", "trials"]


def read_trials_csv(path) -> TrialSet:
    """Read ``a,hits,trials`` rows; errors name the offending line."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInput(f"{path}: empty file")
        if [h.strip() for h in header] != TRIALS_HEADER:
            raise ParseError(f"expected header {','.join(TRIALS_HEADER)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            try:
                a, hits, trials = float(row[0]), float(row[1]), float(row[2])
            except ValueError:
                raise ParseError(f"non-numeric value in {row!r}", line=lineno) from None
            if not np.isfinite(a) or hits != int(hits) or trials != int(trials):
                raise ParseError("a must be finite, hits and trials integers", line=lineno)
            if trials < 1 or not 0 <= hits <= trials:
                raise ParseError(f"require 0 <= hits <= trials and trials >= 1, got {hits:g}/{trials:g}",
                                 line=lineno)
            rows.append((a, int(hits), int(trials)))
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    return TrialSet.from_points(rows)


def write_trials_csv(data: TrialSet, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIALS_HEADER)
        for a, h, n in data.points:
            writer.writerow([repr(a), h, n])
