"""
Standard versus modified hit/miss on a classifier trace
=======================================================

A classifier reports a detection probability every 0.05 s during the 7 s
before an event. The standard analysis thresholds each probability at 0.5;
the modified analysis spreads it over 10 pseudo-experiments.
"""

import numpy as np

from podeval import AveragedTrace, GroundTruth, Link, Axis, modified_hit_miss, standard_hit_miss
from podeval.fap import count_false_alarms, fap_50
from podeval.pod import a_at_pod
from podeval.synth import synth_trace, synth_traces

truth = GroundTruth(Link.LOGIT, Axis.CARTESIAN, b0=6.0, b1=2.0)
trace = synth_trace(truth, jitter=0.2, seed=0)
avg = AveragedTrace.from_trace(trace)
print(f"analytic a90: {a_at_pod(truth):.3f} s")

###############################################################################
# Standard hit/miss: one binary outcome per time step

shm = standard_hit_miss(avg)
print(f"SHM a90/95: {shm.a90_95:.3f} s ({-shm.a90_95:.3f} s before the event)")

###############################################################################
# Modified hit/miss: ten pseudo-experiments, each analysed on its own

mhm = modified_hit_miss(avg)
print("column sums of the first 8 steps:", mhm.matrix.column_sums()[:8])
for r, s in enumerate(mhm.per_experiment):
    value = "excluded" if s is None or s.a90_95 is None else f"{s.a90_95:.3f}"
    print(f"  experiment {r + 1:2d}: {value}")
print(f"MHM a90/95 (mean): {mhm.a90_95_mean:.3f} s")

###############################################################################
# False-alarm probability from traces recorded without any event

negatives = synth_traces(GroundTruth(Link.LOGIT, Axis.CARTESIAN, -4.0, 0.0), 25, jitter=0.1, seed=1)
n, x = count_false_alarms(negatives)
print(f"{x} false alarms in {n} opportunities -> FAP {fap_50(n, x).fap:.4f}")
