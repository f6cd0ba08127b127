import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from podeval.errors import DomainError, EmptyInput
from podeval.fap import COUNTING_MODES, count_false_alarms, fap_50
from podeval.mhm import ProbabilityTrace


class TestFap50:
    def test_symmetric_median(self):
        # F(0.5; 4, 4) = 1, so FAP = 1 / (1 + 2 / 2)
        assert fap_50(3, 1).fap == 0.5

    def test_all_alarms(self):
        for n in (1, 5, 40):
            assert fap_50(n, n).fap == 1.0

    def test_no_alarms_closed_form(self):
        # with d1 = 2 the F median is n (2**(1/n) - 1), giving FAP = 1 - 2**(-1/n)
        assert fap_50(10, 0).fap == pytest.approx(1.0 - 2.0 ** (-0.1), abs=1e-12)
        assert fap_50(10, 0).fap == pytest.approx(0.0670, abs=1e-4)

    def test_beta_median_equivalence(self):
        for n in range(1, 51):
            for x in range(0, n):
                assert fap_50(n, x).fap == pytest.approx(stats.beta.median(x + 1, n - x), abs=1e-8)

    @given(st.integers(1, 200), st.data())
    def test_monotone_in_alarms(self, n, data):
        x = data.draw(st.integers(0, n - 1))
        assert fap_50(n, x).fap < fap_50(n, x + 1).fap

    @pytest.mark.parametrize("n, x", [(0, 0), (3, 4), (3, -1), (2.5, 1)])
    def test_domain(self, n, x):
        with pytest.raises(DomainError):
            fap_50(n, x)


class TestCounting:
    @pytest.fixture
    def negatives(self):
        t = np.linspace(-1.0, 0.0, 5)
        return [
            ProbabilityTrace("a", t, [0.1, 0.2, 0.6, 0.2, 0.1]),
            ProbabilityTrace("b", t, [0.1, 0.1, 0.1, 0.1, 0.1]),
            ProbabilityTrace("c", t, [0.9, 0.9, 0.9, 0.1, 0.1]),
        ]

    def test_modes(self, negatives):
        assert count_false_alarms(negatives, mode="window-max") == (3, 2)
        assert count_false_alarms(negatives, mode="window-mean") == (3, 1)
        assert count_false_alarms(negatives, mode="sample") == (15, 4)

    def test_threshold_is_strict(self):
        t = np.array([-1.0, 0.0])
        assert count_false_alarms([ProbabilityTrace("a", t, [0.5, 0.5])]) == (1, 0)

    def test_errors(self, negatives):
        with pytest.raises(EmptyInput):
            count_false_alarms([])
        with pytest.raises(DomainError):
            count_false_alarms(negatives, mode="nope")
        with pytest.raises(DomainError):
            count_false_alarms(negatives, threshold=1.0)
        assert "window-max" in COUNTING_MODES
