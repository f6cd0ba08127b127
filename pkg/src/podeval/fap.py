"""False-alarm probability at 50 % confidence from hit/miss noise counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyInput
from .specfun import f_quantile

__all__ = ["FapResult", "fap_50", "count_false_alarms", "COUNTING_MODES"]

# How a negative-class trace turns into false-alarm opportunities:
#   window-max  one opportunity per trace, alarm if any sample exceeds the threshold
#   window-mean one opportunity per trace, alarm if the trace mean exceeds it
#   sample      every sample is an opportunity
COUNTING_MODES = ("window-max", "window-mean", "sample")


@dataclass(frozen=True)
class FapResult:
    n: int
    x: int
    fap: float


def fap_50(n: int, x: int) -> FapResult:
    """False-alarm probability with 50 % confidence.

    ``n`` is the number of false-alarm opportunities and ``x`` the number of
    false alarms observed::

        FAP = 1 / (1 + (n - x) / ((x + 1) * F(0.5; 2x + 2, 2n - 2x)))

    For ``x == n`` the second term vanishes and FAP is exactly 1; the F
    quantile (with zero denominator degrees of freedom) is not evaluated.
    """
    if int(n) != n or int(x) != x:
        raise DomainError("n and x must be integers")
    n, x = int(n), int(x)
    if n < 1 or x < 0 or x > n:
        raise DomainError(f"require n >= 1 and 0 <= x <= n, got n={n}, x={x}")
    if x == n:
        return FapResult(n, x, 1.0)
    f = f_quantile(0.5, 2 * x + 2, 2 * n - 2 * x)
    return FapResult(n, x, 1.0 / (1.0 + (n - x) / ((x + 1) * f)))


def count_false_alarms(negatives, threshold=0.5, mode="window-max"):
    """Count ``(n, x)`` over negative-class traces.

    ``negatives`` holds objects with a probability array ``p`` (for example
    :class:`~podeval.mhm.ProbabilityTrace`). A false alarm is a probability
    strictly above ``threshold``.
    """
    negatives = list(negatives)
    if not negatives:
        raise EmptyInput("no negative-class traces supplied")
    if not 0.0 < threshold < 1.0:
        raise DomainError("threshold must lie in (0, 1)")
    if mode == "window-max":
        alarms = [np.max(neg.p) > threshold for neg in negatives]
    elif mode == "window-mean":
        alarms = [np.mean(neg.p) > threshold for neg in negatives]
    elif mode == "sample":
        alarms = np.concatenate([np.asarray(neg.p) > threshold for neg in negatives])
    else:
        raise DomainError(f"unknown counting mode {mode!r}; expected one of {COUNTING_MODES}")
    return len(alarms), int(np.sum(alarms))
