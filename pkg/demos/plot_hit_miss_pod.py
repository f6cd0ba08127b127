"""
Hit/miss POD curve from grouped trials
======================================

Draw binomial hit/miss data from a known logistic POD curve, let the four
candidate models compete on deviance, and read off a90 and a90/95.
"""

from pathlib import Path

import numpy as np

from podeval import GroundTruth, Link, Axis, draw_trials, summarize
from podeval.pod import a_at_pod
from podeval.svgplot import render_pod_svg

# ground truth: POD = logistic(2 + 2a)
truth = GroundTruth(Link.LOGIT, Axis.CARTESIAN, b0=2.0, b1=2.0)
a = np.linspace(-3.0, 1.0, 50)
data = draw_trials(truth, a, trials_per_point=20, seed=0)

###############################################################################
# Model selection and the likelihood-ratio bound

summary = summarize(data)
for cand in summary.candidates:
    print(f"{cand.describe():12s} deviance {cand.deviance:8.3f}")
print("selected:", summary.model.describe())
print(f"a90     = {summary.a90:.3f}   (truth {a_at_pod(truth):.3f})")
print(f"a90/95  = {summary.a90_95:.3f}")

###############################################################################
# The SVG shows the mean curve, the 95 % lower bound and the hit fractions

out = Path("demo_output")
out.mkdir(exist_ok=True)
svg = render_pod_svg(summary.a, summary.pod, summary.lower,
                     points=(data.a, data.hits / data.trials),
                     a90=summary.a90, a90_95=summary.a90_95, title="Hit/miss POD")
(out / "hit_miss_pod.svg").write_text(svg)
print("wrote", out / "hit_miss_pod.svg")
