"""
Winner-take-all over feature layers
===================================

Every feature layer gives one a90/95 per evaluation method. The winner for
a classifier is the layer with the earliest reliable prediction; ties are
listed and a complete tie is reported as "All".
"""

import numpy as np

from podeval import AveragedTrace, CandidateResult, GroundTruth, Link, Axis
from podeval import modified_hit_miss, standard_hit_miss
from podeval.ensemble import EXTERNAL, MODIFIED, STANDARD, comparison_table, format_comparison, format_winners, winner_table
from podeval.errors import PodError
from podeval.synth import synth_trace

# four layers whose classifiers switch on at different times
a50 = {"1": -2.5, "2": -3.0, "3": -3.6, "4": -2.0}
results = []
for layer, mid in a50.items():
    gt = GroundTruth(Link.LOGIT, Axis.CARTESIAN, -2.0 * mid, 2.0)
    avg = AveragedTrace.from_trace(synth_trace(gt, jitter=0.2, seed=int(layer)))
    for method, run in ((STANDARD, standard_hit_miss), (MODIFIED, modified_hit_miss)):
        try:
            out = run(avg)
            value = out.a90_95 if method == STANDARD else out.a90_95_mean
        except PodError:
            value = None
        results.append(CandidateResult("demo", layer, value, method, driver_id="1"))
    # stand-in for an externally computed reference value
    results.append(CandidateResult("demo", layer, mid + 0.8, EXTERNAL, driver_id="1"))

###############################################################################
# Per-layer comparison with differences to the reference method

print(format_comparison(comparison_table(results)))

###############################################################################
# Winners per method

print(format_winners(winner_table(results)))
