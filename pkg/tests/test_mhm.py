import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from podeval.errors import AllExperimentsDegenerate, DegenerateData, DomainError, EmptyInput, MisalignedTrace, ParseError
from podeval.glm import Axis, Link, TrialSet
from podeval.mhm import (
    AveragedTrace,
    ProbabilityTrace,
    average_traces,
    expand,
    modified_hit_miss,
    pooled_hit_miss,
    read_traces_csv,
    round_count,
    standard_hit_miss,
    time_grid,
    write_traces_csv,
)
from podeval.pod import summarize
from podeval.synth import GroundTruth, synth_trace


def _noisy_binary_trace():
    """0/1 trace that switches on around t = -3 with overlap (not separated)."""
    t = time_grid()
    rng = np.random.default_rng(12)
    prob = 1.0 / (1.0 + np.exp(-3.0 * (t + 3.0)))
    return AveragedTrace(t, (rng.random(t.size) < prob).astype(float), 1)


class TestTimeGrid:
    def test_default(self):
        t = time_grid()
        assert t.size == 141
        assert t[0] == -7.0 and t[-1] == 0.0
        np.testing.assert_allclose(np.diff(t), 0.05, atol=1e-12)

    def test_invalid(self):
        with pytest.raises(DomainError):
            time_grid((0.0, -1.0))


class TestAverage:
    def test_pointwise_mean(self):
        t = time_grid((-1.0, 0.0), 0.25)
        a = ProbabilityTrace("a", t, [0.0, 0.2, 0.4, 0.6, 0.8])
        b = ProbabilityTrace("b", t, [1.0, 0.4, 0.4, 0.2, 0.0])
        avg = average_traces([a, b], (-1.0, 0.0), 0.25)
        np.testing.assert_allclose(avg.p_mean, [0.5, 0.3, 0.4, 0.4, 0.4])
        assert avg.n_events == 2

    def test_nearest_sample_alignment(self):
        t = time_grid((-1.0, 0.0), 0.25)
        shifted = ProbabilityTrace("s", t - 0.01, [0.1, 0.2, 0.3, 0.4, 0.5])
        avg = average_traces([shifted], (-1.0, 0.0), 0.25)
        np.testing.assert_allclose(avg.p_mean, [0.1, 0.2, 0.3, 0.4, 0.5])

    def test_misaligned_trace_skipped(self):
        t = time_grid((-1.0, 0.0), 0.25)
        good = ProbabilityTrace("good", t, np.full(t.size, 0.5))
        bad = ProbabilityTrace("bad", [-30.0, -29.0], [0.1, 0.2])
        with pytest.warns(MisalignedTrace):
            avg = average_traces([good, bad], (-1.0, 0.0), 0.25)
        assert avg.skipped == ("bad",)
        assert avg.n_events == 1

    def test_empty(self):
        with pytest.raises(EmptyInput):
            average_traces([])

    def test_trace_validation(self):
        with pytest.raises(DomainError):
            ProbabilityTrace("x", [0.0, -1.0], [0.1, 0.2])
        with pytest.raises(DomainError):
            ProbabilityTrace("x", [-1.0, 0.0], [0.1, 1.2])


class TestExpand:
    def test_column_sums(self):
        avg = AveragedTrace([-2.0, -1.0, 0.0], [0.04, 0.45, 0.96], 1)
        m = expand(avg)
        np.testing.assert_array_equal(m.column_sums(), [0, 5, 10])
        assert m.n_experiments == 10

    def test_stacking(self):
        avg = AveragedTrace([-1.0, 0.0], [0.3, 0.7], 1)
        cells = expand(avg).cells
        np.testing.assert_array_equal(cells[:, 0], [1, 1, 1, 0, 0, 0, 0, 0, 0, 0])
        np.testing.assert_array_equal(cells[:, 1], [1] * 7 + [0] * 3)

    def test_rounding_rules(self):
        np.testing.assert_array_equal(round_count([0.5, 1.5, 2.5], "half-away"), [1, 2, 3])
        np.testing.assert_array_equal(round_count([0.5, 1.5, 2.5], "half-even"), [0, 2, 2])
        with pytest.raises(DomainError):
            round_count([1.0], "up")

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=60), st.integers(1, 30))
    def test_column_sums_property(self, p, n):
        avg = AveragedTrace(np.arange(len(p), dtype=float), p, 1)
        m = expand(avg, n)
        np.testing.assert_array_equal(m.column_sums(), np.floor(n * np.asarray(p) + 0.5))


class TestStandard:
    def test_threshold_is_strict(self):
        t = np.linspace(-3.0, 0.0, 13)
        p = np.array([0.1, 0.5, 0.2, 0.5, 0.6, 0.4, 0.7, 0.5, 0.9, 0.8, 0.95, 1.0, 1.0])
        avg = AveragedTrace(t, p, 1)
        s = standard_hit_miss(avg)
        # p == 0.5 counts as a miss
        expected = summarize(TrialSet.from_binary(t, (p > 0.5).astype(int)), (t.min(), t.max(), 512))
        assert s.a90_95 == expected.a90_95
        assert s.model.b0 == expected.model.b0

    def test_step_trace_separates(self):
        t = time_grid()
        avg = AveragedTrace(t, (t > -2.0).astype(float), 1)
        with pytest.raises(DegenerateData):
            standard_hit_miss(avg)


class TestModified:
    def test_binary_trace_equals_standard(self):
        avg = _noisy_binary_trace()
        mhm = modified_hit_miss(avg)
        shm = standard_hit_miss(avg)
        assert mhm.a90_95_mean == pytest.approx(shm.a90_95, abs=1e-12)
        assert mhm.excluded == {}

    def test_row_permutation_invariance(self):
        gt = GroundTruth(Link.LOGIT, Axis.CARTESIAN, 6.0, 2.0)
        avg = AveragedTrace.from_trace(synth_trace(gt, jitter=0.2, seed=3))
        base = modified_hit_miss(avg)
        rng = np.random.default_rng(0)
        for _ in range(3):
            other = modified_hit_miss(avg, row_order=rng.permutation(10))
            assert other.a90_95_mean == pytest.approx(base.a90_95_mean, abs=1e-9)

    def test_excluded_rows_reported(self):
        gt = GroundTruth(Link.LOGIT, Axis.CARTESIAN, 6.0, 2.0)
        avg = AveragedTrace.from_trace(synth_trace(gt, jitter=0.2, seed=3))
        result = modified_hit_miss(avg)
        assert len(result.per_experiment) == 10
        assert len(result.values) + len(result.excluded) == 10
        assert result.a90_95_mean == pytest.approx(np.mean(result.values), abs=1e-12)
        for r in result.excluded:
            s = result.per_experiment[r]
            assert s is None or s.a90_95 is None

    def test_all_degenerate(self):
        t = time_grid()
        avg = AveragedTrace(t, (t > -2.0).astype(float), 1)
        with pytest.raises(AllExperimentsDegenerate):
            modified_hit_miss(avg)

    def test_all_miss(self):
        t = time_grid()
        with pytest.raises(DegenerateData):
            modified_hit_miss(AveragedTrace(t, np.zeros(t.size), 1))

    def test_pooled_recovers_a90(self):
        gt = GroundTruth(Link.LOGIT, Axis.CARTESIAN, 6.0, 2.0)
        avg = AveragedTrace.from_trace(synth_trace(gt))
        s = pooled_hit_miss(avg)
        assert s.a90 == pytest.approx((np.log(9.0) - 6.0) / 2.0, abs=0.1)


class TestCsv:
    def test_round_trip(self, tmp_path):
        traces = [ProbabilityTrace("e1", [-1.0, -0.5, 0.0], [0.1, 0.5, 0.9]),
                  ProbabilityTrace("e2", [-1.0, 0.0], [0.2, 0.8])]
        path = tmp_path / "traces.csv"
        write_traces_csv(traces, path)
        back = read_traces_csv(path)
        assert [b.event_id for b in back] == ["e1", "e2"]
        np.testing.assert_allclose(back[0].p, traces[0].p)

    @pytest.mark.parametrize("body, line", [
        ("e1,-1,0.1\ne1,zz,0.2\n", 3),
        ("e1,-1,0.1\ne1,0.5,0.2\n", 3),
        ("e1,-1,1.5\n", 2),
        ("e1,-1\n", 2),
        ("e1,-1,0.1\ne1,-1,0.2\n", 3),
    ])
    def test_errors_name_line(self, tmp_path, body, line):
        path = tmp_path / "bad.csv"
        path.write_text("event_id,t_seconds,probability\n" + body)
        with pytest.raises(ParseError, match=f"line {line}"):
            read_traces_csv(path)

    def test_bad_header_and_empty(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,t,p\n")
        with pytest.raises(ParseError, match="line 1"):
            read_traces_csv(path)
        path.write_text("event_id,t_seconds,probability\n")
        with pytest.raises(EmptyInput):
            read_traces_csv(path)
