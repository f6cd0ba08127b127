"""Synthetic ground truth: hit/miss draws and classifier probability traces.

Randomness comes from :func:`numpy.random.default_rng` (PCG64), whose
output for a given seed is stable across platforms and numpy versions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .glm import Axis, Link, TrialSet
from .mhm import DEFAULT_STEP, DEFAULT_WINDOW, ProbabilityTrace, time_grid
from .pod import pod_mean

__all__ = ["GroundTruth", "draw_trials", "synth_trace", "synth_traces"]


@dataclass(frozen=True)
class GroundTruth:
    link: Link
    axis: Axis
    b0: float
    b1: float
    noise_seed: int = 0

    def pod(self, a):
        return pod_mean(self, a)


def draw_trials(gt: GroundTruth, a_grid, trials_per_point, seed=None) -> TrialSet:
    """Binomial hit counts at each grid value with success probability ``gt.pod(a)``."""
    if trials_per_point < 1:
        raise DomainError("trials_per_point must be >= 1")
    a = np.asarray(a_grid, dtype=float)
    p = gt.pod(a)
    rng = np.random.default_rng(gt.noise_seed if seed is None else seed)
    hits = rng.binomial(int(trials_per_point), p)
    return TrialSet(a, hits, np.full(a.shape, int(trials_per_point)))


def synth_trace(gt: GroundTruth, window=DEFAULT_WINDOW, step=DEFAULT_STEP, jitter=0.0,
                seed=None, event_id="synthetic") -> ProbabilityTrace:
    """Classifier probability trace following ``gt``'s POD curve in time.

    Each sample gets independent uniform noise on ``[-jitter, jitter]`` and is
    clamped to ``[0, 1]``, so ``|p - pod| <= jitter`` everywhere.

    On the logarithmic axis the curve is evaluated at the time before the
    event, ``-t``, and the sample at ``t = 0`` is dropped; use ``b1 < 0`` for
    a probability that rises toward the event.
    """
    if jitter < 0:
        raise DomainError("jitter must be non-negative")
    t = time_grid(window, step)
    if gt.axis is Axis.LOGARITHMIC:
        t = t[t < 0]
        p = gt.pod(-t)
    else:
        p = gt.pod(t)
    if jitter > 0:
        rng = np.random.default_rng(gt.noise_seed if seed is None else seed)
        p = p + rng.uniform(-jitter, jitter, size=t.size)
    return ProbabilityTrace(event_id, t, np.clip(p, 0.0, 1.0))


def synth_traces(gt: GroundTruth, n_events, window=DEFAULT_WINDOW, step=DEFAULT_STEP,
                 jitter=0.0, seed=None):
    """``n_events`` independently jittered traces with ids ``e0, e1, ...``."""
    base = gt.noise_seed if seed is None else seed
    seeds = np.random.SeedSequence(base).spawn(n_events)
    return [synth_trace(gt, window, step, jitter, np.random.default_rng(s).integers(2**63), f"e{i}")
            for i, s in enumerate(seeds)]
