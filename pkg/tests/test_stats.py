import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

from colanet.errors import StatisticsError
from colanet.stats import paired_t_test, student_t_two_sided_p

# Table 1: per-class digital and mean spiking accuracies.
DIGITAL = [98.23, 99.32, 97.36, 95.59, 97.14, 97.11, 96.72, 97.92, 93.12, 93.88]
SPIKING = [97.48, 98.92, 97.37, 96.57, 97.76, 96.13, 98.26, 98.24, 95.14, 92.04]


def test_table_reproduction():
    r = paired_t_test(np.subtract(DIGITAL, SPIKING))
    assert r.df == 9
    assert r.mean == pytest.approx(-0.152, abs=1e-9)
    assert r.sd == pytest.approx(1.19, abs=0.01)
    assert r.p == pytest.approx(0.70, abs=0.02)


def test_cross_check_scipy():
    d = np.subtract(DIGITAL, SPIKING)
    ref = scipy.stats.ttest_1samp(d, 0.0)
    r = paired_t_test(d)
    assert r.t == pytest.approx(ref.statistic, rel=1e-12)
    assert r.p == pytest.approx(ref.pvalue, rel=1e-9)


def test_zero_diffs():
    r = paired_t_test([0.0] * 10)
    assert r.t == 0.0 and r.p == 1.0


def test_constant_nonzero_diffs():
    r = paired_t_test([0.5] * 4)
    assert math.isinf(r.t) and r.p == 0.0


def test_symmetric_pair():
    r = paired_t_test([-1.0, 1.0])
    assert r.mean == 0.0 and r.t == 0.0 and r.p == pytest.approx(1.0)
    assert r.df == 1


@pytest.mark.parametrize("diffs", [[], [1.0]])
def test_too_few(diffs):
    with pytest.raises(StatisticsError):
        paired_t_test(diffs)


def test_bad_df():
    with pytest.raises(StatisticsError):
        student_t_two_sided_p(1.0, 0)


@settings(max_examples=200)
@given(st.floats(-50, 50), st.integers(1, 200))
def test_p_matches_survival_function(t, df):
    assert student_t_two_sided_p(t, df) == pytest.approx(2 * scipy.stats.t.sf(abs(t), df), abs=1e-12)
