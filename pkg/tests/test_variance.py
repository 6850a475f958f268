import numpy as np
import pytest

from swarmscale.curves import TimeGrid
from swarmscale.variance import (condition_signals, step_down, step_up,
                                 throttle_series, throttled_speed)


class TestStepFunctions:
    def test_step_up_cases(self):
        assert step_up(4999, 5000, 0.4) == 0.0
        assert step_up(5000, 5000, 0.4) == 0.2
        assert step_up(5001, 5000, 0.4) == 0.4

    def test_step_down_cases(self):
        assert step_down(4999, 5000, 0.8) == 0.8
        assert step_down(5000, 5000, 0.8) == pytest.approx(0.4)
        assert step_down(5001, 5000, 0.8) == 0.0

    @pytest.mark.parametrize("beta", [0.1, 0.2, 0.4, 0.8])
    def test_amplitude_identity(self, beta):
        for t in [0.0, 999.0, 1000.0, 1001.0, 5000.0]:
            assert step_up(t, 1000.0, beta) + step_down(t, 1000.0, beta) \
                == pytest.approx(beta, abs=1e-15)

    @pytest.mark.parametrize("beta", [0.0, 1.0, -0.3, 1.5])
    def test_amplitude_range_enforced(self, beta):
        with pytest.raises(ValueError):
            step_up(0.0, 10.0, beta)


class TestConditionSignals:
    def test_step_up_cost(self):
        grid = TimeGrid(100.0, 10)
        prof = condition_signals("step_up", 0.4, 50.0, grid)
        assert np.all(prof.ideal == 1.0)
        # before the onset: ideal conditions
        assert prof.deviation[0] == 1.0
        # after the onset: relative carry cost 1/(1-0.4)
        assert prof.deviation[-1] == pytest.approx(1.0 / 0.6)
        assert prof.orientation == "cost_like"

    def test_step_down_cost(self):
        grid = TimeGrid(100.0, 10)
        prof = condition_signals("step_down", 0.8, 50.0, grid)
        assert prof.deviation[0] == pytest.approx(5.0)
        assert prof.deviation[-1] == 1.0

    def test_deviation_never_below_ideal_for_throttles(self):
        grid = TimeGrid(1000.0, 100)
        for kind in ("step_up", "step_down"):
            prof = condition_signals(kind, 0.5, 500.0, grid)
            assert np.all(prof.deviation >= prof.ideal)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            condition_signals("ramp", 0.4, 50.0, TimeGrid(100.0, 10))


class TestThrottle:
    def test_series_none(self):
        assert np.all(throttle_series("none", 0.4, 50.0, 10, 0.1) == 0.0)

    def test_series_step_up(self):
        v = throttle_series("step_up", 0.4, 0.5, 10, 0.1)
        assert list(v[:5]) == [0.0] * 5
        assert v[5] == 0.2
        assert list(v[6:]) == [0.4] * 4

    def test_only_carriers_slowed(self):
        carrying = np.array([-1, 3, 0, -1])
        caps = throttled_speed(1.0, carrying, 0.4)
        assert list(caps) == [1.0, 0.6, 0.6, 1.0]

    def test_zero_throttle_is_identity(self):
        caps = throttled_speed(2.0, np.array([0, -1]), 0.0)
        assert list(caps) == [2.0, 2.0]

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            throttled_speed(1.0, np.array([0]), 1.0)
