"""POD curves, model selection, likelihood-ratio lower bound, a90 and a90/95.

The lower confidence bound at ``a`` is the smallest mean POD attained by any
coefficient pair inside the likelihood-ratio region

    {(b0, b1) : 2 * (loglik_max - loglik(b0, b1)) <= level}.

The region is convex (both links give a concave log-likelihood), so the
minimum of the linear predictor lies on its boundary. The boundary is traced
once per fitted model, by root-finding along rays from the MLE in whitened
coordinates; the bound at any ``a`` is then a minimum over the traced
boundary points refined by a parabolic step in the ray angle.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DegenerateData, DomainError, FlatModel, NoValidModel, ParseError
from .glm import Axis, FittedGlm, Link, TrialSet, fit, separation_direction

__all__ = [
    "DEFAULT_LR_LEVEL",
    "DEFAULT_GRID_POINTS",
    "CANDIDATES",
    "PodSummary",
    "LikelihoodContour",
    "pod_mean",
    "fit_candidates",
    "select_model",
    "lower_bound_95",
    "a_at_pod",
    "a90_95_of",
    "summarize",
    "default_grid",
    "curve_csv_text",
    "write_curve_csv",
    "read_curve_csv",
]

DEFAULT_LR_LEVEL = specfun.chi2_quantile(0.90, 1)
DEFAULT_GRID_POINTS = 512
TARGET_POD = 0.9

# Candidate order doubles as the tie-break order on equal deviance.
CANDIDATES = (
    (Link.LOGIT, Axis.CARTESIAN),
    (Link.LOGIT, Axis.LOGARITHMIC),
    (Link.PROBIT, Axis.CARTESIAN),
    (Link.PROBIT, Axis.LOGARITHMIC),
)
DEVIANCE_TIE_TOL = 1e-9


def pod_mean(model, a):
    """Mean POD of ``model`` at ``a``.

    ``model`` is anything carrying ``b0``, ``b1``, ``link`` and ``axis``
    (a :class:`~podeval.glm.FittedGlm` or a synthetic ground truth).
    """
    x = model.axis.forward(a)
    value = model.link.cdf(model.b0 + model.b1 * x)
    return float(value) if np.ndim(value) == 0 else value


def a_at_pod(model, p=TARGET_POD):
    """Process-parameter value where the mean POD equals ``p``."""
    if model.b1 == 0:
        raise FlatModel("slope is zero; the POD curve is flat")
    if not np.isfinite(model.b1) or not np.isfinite(model.b0):
        raise DegenerateData("coefficients are not finite")
    x = (model.link.link(p) - model.b0) / model.b1
    return float(model.axis.inverse(x))


# ---------------------------------------------------------------------------
# model selection


def fit_candidates(data: TrialSet):
    """Fit every applicable (link, axis) candidate, in tie-break order.

    Logarithmic candidates are skipped when any ``a <= 0``.
    """
    positive = bool(np.all(data.a > 0))
    return [fit(data, link, axis) for link, axis in CANDIDATES
            if axis is Axis.CARTESIAN or positive]


def _pick(candidates):
    usable = [m for m in candidates if m.usable]
    if not usable:
        return None
    best = min(m.deviance for m in usable)
    return next(m for m in usable if m.deviance <= best + DEVIANCE_TIE_TOL)


def select_model(data: TrialSet, candidates=None) -> FittedGlm:
    """Lowest-deviance converged candidate among the four POD models."""
    if candidates is None:
        candidates = fit_candidates(data)
    chosen = _pick(candidates)
    if chosen is not None:
        return chosen
    if data.hits.sum() == 0 or data.misses.sum() == 0 or separation_direction(data):
        reason = next(m.reason for m in candidates if m.reason)
        raise DegenerateData(f"no POD model can be fitted: {reason}")
    reasons = "; ".join(f"{m.describe()}: {m.reason}" for m in candidates)
    raise NoValidModel(f"all candidate fits failed ({reasons})")


# ---------------------------------------------------------------------------
# likelihood-ratio region


class LikelihoodContour:
    """Boundary of the likelihood-ratio region around a fitted model.

    Parameters
    ----------
    data : TrialSet
        Data the model was fitted on.
    model : FittedGlm
        Converged maximum-likelihood fit.
    level : float, optional
        Deviance drop defining the region; ``DEFAULT_LR_LEVEL`` if omitted.
    n_angles : int
        Number of rays traced around the MLE.
    """

    def __init__(self, data: TrialSet, model: FittedGlm, level=None, n_angles=720):
        if not model.usable:
            raise DegenerateData(f"cannot build a confidence region for a degenerate fit ({model.reason})")
        self.model = model
        self.level = DEFAULT_LR_LEVEL if level is None else float(level)
        if self.level < 0:
            raise DomainError("likelihood-ratio level must be non-negative")
        x = model.axis.forward(data.a)
        self._center = float(np.mean(x))
        self._scale = float(np.std(x))
        self._xs = (x - self._center) / self._scale
        self._hits = data.hits.astype(float)
        self._misses = data.misses.astype(float)
        # MLE in standardized coordinates
        self._beta = np.array([model.b0 + model.b1 * self._center, model.b1 * self._scale])
        self._ll_max = self._loglik(self._beta[None, :])[0]
        self.theta = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
        if self.level == 0.0:
            self.radius = np.zeros(n_angles)
            self.boundary = np.tile(self._beta, (n_angles, 1))
            return
        eta = self._beta[0] + self._beta[1] * self._xs
        _, weight = model.link.scores(eta, self._hits, self._misses)
        design = np.column_stack([np.ones_like(self._xs), self._xs])
        cov = np.linalg.inv(design.T @ (weight[:, None] * design))
        chol = np.linalg.cholesky(cov)
        self._dirs = np.column_stack([np.cos(self.theta), np.sin(self.theta)]) @ chol.T
        self.radius = self._trace()
        self.boundary = self._beta + self.radius[:, None] * self._dirs

    def _loglik(self, beta):
        eta = beta[:, :1] + beta[:, 1:] * self._xs
        log_p, log_q = self.model.link.log_cdf_pair(eta)
        ll = np.where(self._hits > 0, self._hits * log_p, 0.0)
        ll += np.where(self._misses > 0, self._misses * log_q, 0.0)
        return ll.sum(axis=1)

    def _drop_and_slope(self, r, rows=slice(None)):
        dirs = self._dirs[rows]
        beta = self._beta + r[:, None] * dirs
        drop = 2.0 * (self._ll_max - self._loglik(beta))
        eta = beta[:, :1] + beta[:, 1:] * self._xs
        score, _ = self.model.link.scores(eta, self._hits, self._misses)
        grad = np.column_stack([score.sum(axis=1), (score * self._xs).sum(axis=1)])
        slope = -2.0 * np.einsum("ij,ij->i", grad, dirs)
        return drop, slope

    def _trace(self):
        c = self.level
        n = self.theta.size
        lo = np.zeros(n)
        hi = np.full(n, np.sqrt(c))
        drop, _ = self._drop_and_slope(hi)
        for _ in range(64):
            short = drop < c
            if not short.any():
                break
            lo[short] = hi[short]
            hi[short] *= 2.0
            drop[short], _ = self._drop_and_slope(hi[short], short)
        # rays that never reach the level keep the largest radius tried
        r = hi.copy()
        for _ in range(200):
            drop, slope = self._drop_and_slope(r)
            resid = drop - c
            done = np.abs(resid) <= 1e-11 * max(c, 1.0)
            below = resid < 0
            lo = np.where(below, r, lo)
            hi = np.where(below, hi, r)
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = r - resid / slope
            ok = (slope > 0) & (newton > lo) & (newton < hi)
            r_new = np.where(ok, newton, 0.5 * (lo + hi))
            r_new = np.where(done, r, r_new)
            if done.all() or np.all(np.abs(r_new - r) <= 1e-14 * r):
                r = r_new
                break
            r = r_new
        return r

    def _eta_min_std(self, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        values = self.boundary[:, :1] + self.boundary[:, 1:] * xs[None, :]
        k = np.argmin(values, axis=0)
        cols = np.arange(xs.size)
        n = self.theta.size
        f0 = values[k, cols]
        fm = values[(k - 1) % n, cols]
        fp = values[(k + 1) % n, cols]
        denom = fp - 2.0 * f0 + fm
        with np.errstate(divide="ignore", invalid="ignore"):
            vertex = f0 - (fp - fm) ** 2 / (8.0 * denom)
        return np.where(denom > 0, np.minimum(vertex, f0), f0)

    def lower(self, a):
        """Lower confidence bound on POD at ``a`` (scalar or array)."""
        x = self.model.axis.forward(a)
        xs = (np.atleast_1d(x) - self._center) / self._scale
        value = self.model.link.cdf(self._eta_min_std(xs))
        return float(value[0]) if np.ndim(a) == 0 else value.reshape(np.shape(a))


def lower_bound_95(data: TrialSet, model: FittedGlm, a, level=None):
    """Likelihood-ratio lower confidence bound on POD at ``a``."""
    return LikelihoodContour(data, model, level).lower(a)


def default_grid(data: TrialSet, count=DEFAULT_GRID_POINTS):
    return float(data.a.min()), float(data.a.max()), int(count)


def _grid_values(grid):
    a_min, a_max, count = grid
    if not a_max > a_min or count < 2:
        raise DomainError(f"invalid grid {grid!r}")
    return np.linspace(a_min, a_max, int(count))


def a90_95_of(data: TrialSet, model: FittedGlm, grid=None, level=None, contour=None,
              p=TARGET_POD):
    """Where the lower bound first reaches ``p``, scanning from the low-POD end.

    Returns None when the bound stays below ``p`` on the whole grid.
    """
    if contour is None:
        contour = LikelihoodContour(data, model, level)
    grid = default_grid(data) if grid is None else grid
    a = _grid_values(grid)
    lower = contour.lower(a)
    return _first_crossing(contour, a, lower, model.b1 < 0, p)


def _first_crossing(contour, a, lower, descending, p):
    if descending:
        a, lower = a[::-1], lower[::-1]
    above = np.nonzero(lower >= p)[0]
    if above.size == 0:
        return None
    i = int(above[0])
    if i == 0:
        return float(a[0])
    lo, hi = float(a[i - 1]), float(a[i])
    tol = 1e-3 * abs(hi - lo)
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if contour.lower(mid) >= p:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# summary


@dataclass(eq=False)
class PodSummary:
    model: FittedGlm
    a: np.ndarray
    pod: np.ndarray
    lower: np.ndarray
    a90: float | None
    a90_95: float | None
    grid_spec: tuple
    level: float
    candidates: list = field(default_factory=list)

    @property
    def curve(self):
        return list(zip(self.a.tolist(), self.pod.tolist(), self.lower.tolist()))

    def to_dict(self):
        m = self.model
        return {
            "model": m.describe(),
            "link": m.link.value,
            "axis": m.axis.value,
            "b0": m.b0,
            "b1": m.b1,
            "log_likelihood": m.log_likelihood,
            "deviance": m.deviance,
            "iterations": m.iterations,
            "a90": self.a90,
            "a90_95": self.a90_95,
            "lr_level": self.level,
            "grid": list(self.grid_spec),
            "candidates": [
                {"model": c.describe(), "deviance": None if c.separation_flag else c.deviance,
                 "converged": c.converged, "reason": c.reason}
                for c in self.candidates
            ],
        }


def summarize(data: TrialSet, grid=None, level=None) -> PodSummary:
    """Select a model, evaluate mean curve and lower bound, extract a90 and a90/95."""
    candidates = fit_candidates(data)
    model = select_model(data, candidates)
    grid = default_grid(data) if grid is None else tuple(grid)
    a = _grid_values(grid)
    contour = LikelihoodContour(data, model, level)
    mean = pod_mean(model, a)
    lower = np.minimum(contour.lower(a), mean)
    try:
        a90 = a_at_pod(model, TARGET_POD)
    except FlatModel:
        a90 = None
    if a90 is not None and not grid[0] <= a90 <= grid[1]:
        a90 = None
    a90_95 = _first_crossing(contour, a, lower, model.b1 < 0, TARGET_POD)
    return PodSummary(model=model, a=a, pod=mean, lower=lower, a90=a90, a90_95=a90_95,
                      grid_spec=grid, level=contour.level, candidates=candidates)


# ---------------------------------------------------------------------------
# curve export


def _fmt(value):
    return f"{value:.9g}"


def curve_csv_text(summary: PodSummary) -> str:
    lines = ["a,pod_mean,pod_lower95"]
    lines += [f"{_fmt(a)},{_fmt(mean)},{_fmt(low)}" for a, mean, low in summary.curve]
    return "\n".join(lines) + "\n"


def write_curve_csv(summary: PodSummary, path):
    with open(path, "w") as fh:
        fh.write(curve_csv_text(summary))


def read_curve_csv(path):
    """Read a curve CSV back as three float arrays ``(a, pod_mean, pod_lower95)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["a", "pod_mean", "pod_lower95"]:
        raise ParseError("curve CSV must start with header a,pod_mean,pod_lower95", line=1)
    values = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float).reshape(-1, 3)
    return values[:, 0], values[:, 1], values[:, 2]
