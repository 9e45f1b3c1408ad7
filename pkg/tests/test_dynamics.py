import math

import numpy as np
import pytest

from fieldorder.casestudy import minimal_candidate_points, zero_point
from fieldorder.dynamics import (CONVERGED, LEFT_DOMAIN, MAX_TIME, STEP_UNDERFLOW,
                                 IntegratorConfig, check_setwise_stability, integrate,
                                 lyapunov_integral)
from fieldorder.errors import DomainViolationError
from fieldorder.fields import (Box, SampleSet, negate, quadratic_form, scalar_field,
                               vector_field)

PI = math.pi


@pytest.fixture(scope="module")
def decay_flow():
    return negate(vector_field("linear"))


@pytest.fixture(scope="module")
def oscillator_flow():
    return negate(vector_field("xsininv"))


class TestIntegrate:
    def test_exponential_decay_matches_closed_form(self, decay_flow):
        traj = integrate(decay_flow, [1.0], IntegratorConfig(t_max=20.0))
        assert traj.terminated_reason == CONVERGED
        assert abs(traj.final_state[0]) < 1e-6
        i = int(np.searchsorted(traj.times, 1.0))
        assert traj.times[i] == pytest.approx(1.0)
        assert traj.states[i, 0] == pytest.approx(math.exp(-1.0), abs=1e-8)

    def test_zero_field_constant(self):
        _, c = quadratic_form(np.zeros((1, 1)), [0.0])
        traj = integrate(c, [0.4], IntegratorConfig(t_max=0.05))
        assert traj.terminated_reason == CONVERGED
        assert np.all(traj.states == 0.4)

    def test_oscillator_reaches_first_zero(self, oscillator_flow):
        traj = integrate(oscillator_flow, [0.5], IntegratorConfig())
        assert traj.terminated_reason == CONVERGED
        assert traj.final_state[0] == pytest.approx(1 / PI, abs=1e-4)

    def test_times_strictly_increase_and_states_stay_inside(self, oscillator_flow):
        traj = integrate(oscillator_flow, [2.0], IntegratorConfig(t_max=10.0))
        assert np.all(np.diff(traj.times) > 0)
        for row in traj.states[:: max(1, len(traj.states) // 50)]:
            assert oscillator_flow.domain.contains(row)

    def test_left_domain(self):
        growth = vector_field("linear")  # x' = x blows outward
        traj = integrate(growth, [0.9], IntegratorConfig(t_max=5.0))
        assert traj.terminated_reason == LEFT_DOMAIN
        assert traj.final_state[0] <= 1.0

    def test_step_underflow_near_zero(self, decay_flow):
        cfg = IntegratorConfig(t_max=50.0, convergence_eps=1e-15, floor_eps=1e-9)
        traj = integrate(decay_flow, [1.0], cfg)
        assert traj.terminated_reason == STEP_UNDERFLOW

    def test_max_time(self, oscillator_flow):
        traj = integrate(oscillator_flow, [2.0], IntegratorConfig(t_max=0.05))
        assert traj.terminated_reason == MAX_TIME

    def test_outside_domain_rejected(self, oscillator_flow):
        with pytest.raises(DomainViolationError):
            integrate(oscillator_flow, [5.0], IntegratorConfig())

    def test_halving_dt_barely_moves_endpoints(self, oscillator_flow):
        for x0 in (0.5, 1.0, 2.0):
            a = integrate(oscillator_flow, [x0], IntegratorConfig(dt=1e-3))
            b = integrate(oscillator_flow, [x0], IntegratorConfig(dt=5e-4))
            assert abs(a.final_state[0] - b.final_state[0]) < 1e-6

    def test_csv_export(self, decay_flow, tmp_path):
        traj = integrate(decay_flow, [1.0], IntegratorConfig(t_max=0.01))
        path = tmp_path / "t.csv"
        with open(path, "w") as fh:
            traj.write_csv(fh)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,x1"
        assert len(lines) == len(traj.times) + 1


class TestLyapunovIntegral:
    def test_linear_ramp(self):
        f = scalar_field("linear", Box((-1.0,), (2.0,)))
        assert lyapunov_integral(f, 0.0, 1.0) == pytest.approx(0.5, abs=1e-10)

    def test_empty_interval(self):
        f = scalar_field("xsininv")
        assert lyapunov_integral(f, 1 / PI, 1 / PI) == 0.0

    def test_orientation(self):
        f = scalar_field("linear", Box((-1.0,), (2.0,)))
        assert lyapunov_integral(f, 1.0, 0.0) == pytest.approx(-0.5, abs=1e-10)

    def test_oscillator_against_midpoint_rule(self):
        f = scalar_field("xsininv")
        got = lyapunov_integral(f, 1 / PI, 0.5)
        xs = np.linspace(1 / PI, 0.5, 1_000_001)
        mids = 0.5 * (xs[:-1] + xs[1:])
        brute = float(np.sum(mids * np.sin(1.0 / mids)) * (xs[1] - xs[0]))
        assert got > 0
        assert got == pytest.approx(brute, abs=1e-8)

    def test_needs_one_dimension(self):
        with pytest.raises(ValueError):
            lyapunov_integral(scalar_field("mexican_hat"), 0.0, 1.0)

    def test_interval_must_stay_inside_domain(self):
        with pytest.raises(DomainViolationError):
            lyapunov_integral(scalar_field("xsininv"), 0.0, 5.0)


class TestSetwiseStability:
    def test_decay_to_origin(self, decay_flow):
        ics = SampleSet(np.array([[1.0]]), "explicit", 0)
        rep = check_setwise_stability(decay_flow, [[0.0]], ics, IntegratorConfig(t_max=20.0))
        assert rep.all_converged
        assert rep.trials[0].limit_point == (0.0,)

    def test_oscillator_basins(self, oscillator_flow):
        # x' = -f sends each inter-zero bracket to its odd-indexed zero and
        # the mirrored bracket to its even-indexed zero
        starts, expected = [], []
        for k in (1, 2, 3):
            starts.append([0.5 * (zero_point(2 * k) + zero_point(2 * (k + 1)))])
            expected.append(zero_point(2 * k + 1))
        for k in (1, 2, 3):
            starts.append([-0.5 * (zero_point(2 * k - 1) + zero_point(2 * k + 1))])
            expected.append(-zero_point(2 * k))
        cand = minimal_candidate_points(25)
        ics = SampleSet(np.array(starts), "explicit", 0)
        rep = check_setwise_stability(oscillator_flow, cand, ics, IntegratorConfig(),
                                      potential=scalar_field("xsininv"))
        assert rep.all_converged
        assert rep.lyapunov_monotone
        for trial, want in zip(rep.trials, expected):
            assert trial.limit_point[0] == pytest.approx(want, abs=1e-4)

    def test_first_basin_goes_to_first_zero_only(self, oscillator_flow):
        ics = SampleSet(np.array([[0.5]]), "explicit", 0)
        rep = check_setwise_stability(oscillator_flow, minimal_candidate_points(25),
                                      ics, IntegratorConfig())
        assert rep.trials[0].limit_point[0] == pytest.approx(1 / PI, abs=1e-6)

    def test_empty_inputs_rejected(self, decay_flow):
        ics = SampleSet(np.array([[1.0]]), "explicit", 0)
        with pytest.raises(ValueError):
            check_setwise_stability(decay_flow, [], ics, IntegratorConfig())
