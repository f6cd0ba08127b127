"""Probability-of-detection analysis for machine-learning classifiers.

The core pipeline fits binomial GLM POD curves (logit or probit link,
Cartesian or log axis) to hit/miss data, selects the lowest-deviance model
and reports a90 together with the likelihood-ratio lower-bound value
a90/95. On top of it sit the standard and modified hit/miss analyses of
classifier probability traces, the 50 %-confidence false-alarm
probability, and winner-take-all comparison across feature layers.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AllExperimentsDegenerate,
    DegenerateData,
    DomainError,
    EmptyInput,
    FlatModel,
    KeyMismatch,
    MisalignedTrace,
    NoValidModel,
    NonPositiveAxis,
    ParseError,
    PodError,
)
from .glm import Axis, FittedGlm, Link, TrialSet, fit  # noqa: E402
from .pod import PodSummary, a_at_pod, pod_mean, select_model, summarize  # noqa: E402
from .mhm import (  # noqa: E402
    AveragedTrace,
    ProbabilityTrace,
    average_traces,
    expand,
    modified_hit_miss,
    standard_hit_miss,
)
from .fap import fap_50  # noqa: E402
from .ensemble import CandidateResult, comparison_table, winner_take_all, winner_table  # noqa: E402
from .synth import GroundTruth, draw_trials, synth_trace  # noqa: E402
