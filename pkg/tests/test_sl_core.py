import math

import numpy as np
import pytest

from fucik.sl_core import (InvalidStart, PiecewiseFn, ProblemError, SLProblem, Tolerances,
                           first_zero, shoot_u, shoot_v)

TAU_T = 1e-11


def test_piecewise_eval_and_integral():
    f = PiecewiseFn.pwlinear([(0, 1), (1, -1), (3, 3)])
    assert f(0.5) == pytest.approx(0.0)
    assert f(2.0) == pytest.approx(1.0)
    assert f.integral(0, 3) == pytest.approx(0.0 + 2.0)
    s = PiecewiseFn.sine(2.0, 3.0, 0.5, 0.1)
    t = np.linspace(0, 2, 7)
    assert np.allclose(s(t), 2 * np.sin(3 * t + 0.5) + 0.1)
    assert s.integral(0, 2) == pytest.approx(-2 / 3 * (math.cos(6.5) - math.cos(0.5)) + 0.2)
    assert PiecewiseFn.constant(0.0).is_zero()


def test_reflection_mirrors_values():
    for f in (PiecewiseFn.pwlinear([(0, 1), (1, -1), (2, 4)]), PiecewiseFn.sine(1.0, 2.0, 0.3, 0.2)):
        r = f.reflected()
        t = np.linspace(0.1, 1.9, 11)
        assert np.allclose(r(-t), f(t))


@pytest.mark.parametrize("field,kwargs", [
    ("p", dict(p=PiecewiseFn.pwlinear([(0, 1), (1, -0.1), (2, 1)]))),
    ("q", dict(q=PiecewiseFn.constant(-1.0))),
])
def test_validation_names_field(field, kwargs):
    with pytest.raises(ProblemError) as exc:
        SLProblem.single(0, 2, PiecewiseFn.constant(1.0), **kwargs)
    assert exc.value.field == field


def test_validation_coverage_and_zero_weight():
    with pytest.raises(ProblemError) as exc:
        SLProblem.single(0, 2, PiecewiseFn.pwlinear([(0, 1), (1, 1)]))
    assert exc.value.field == "m"
    with pytest.raises(ProblemError):
        SLProblem.single(0, 2, PiecewiseFn.constant(0.0))
    with pytest.raises(ProblemError):
        SLProblem.single(2, 2, PiecewiseFn.constant(1.0))


def test_shoot_u_examples(long_const):
    assert shoot_u(long_const, "m", 1.0, 0.0)[1].zero == pytest.approx(math.pi, abs=1e-9)
    assert shoot_u(long_const, "m", 0.0, 0.0)[1].zero == math.inf
    assert shoot_u(long_const, "m", 4.0, 1.0)[1].zero == pytest.approx(1 + math.pi / 2, abs=1e-9)


def test_shoot_v_examples(long_const, const):
    assert shoot_v(long_const, "m", 1.0, "t1")[1].zero == pytest.approx(math.pi / 2, abs=1e-9)
    assert shoot_v(long_const, "m", 0.0, "t1")[1].zero == math.inf
    assert shoot_v(const, "m", 1.0, "t2")[1].zero == pytest.approx(math.pi / 2, abs=1e-9)
    assert shoot_v(const, "m", 0.0, "t2")[1].zero == -math.inf


def test_invalid_start(const):
    with pytest.raises(InvalidStart):
        shoot_u(const, "m", 1.0, 4.0)


def test_trajectory_matches_closed_form(long_const):
    traj, res = shoot_u(long_const, "m", 4.0, 1.0)
    for t in np.linspace(1.0, 10.0, 37):
        u, w = traj(t)
        assert u == pytest.approx(math.sin(2 * (t - 1)) / 2, abs=1e-9)
        assert w == pytest.approx(math.cos(2 * (t - 1)), abs=1e-9)
    assert np.all(np.diff(traj.t) > 0)
    assert np.all(np.abs(traj.u) + np.abs(traj.w) > 0)
    u_end, du_end = res.end_state
    assert u_end == pytest.approx(math.sin(18) / 2, abs=1e-9)
    assert du_end == pytest.approx(math.cos(18), abs=1e-9)
    assert res.interior_zero_count_to_end == 5


def test_backward_trajectory_is_decreasing(const):
    traj, _ = shoot_v(const, "m", 1.0, "t2")
    assert traj.direction == "backward"
    assert np.all(np.diff(traj.t) < 0)
    u, _ = traj(1.0)
    assert u == pytest.approx(math.cos(math.pi - 1.0), abs=1e-9)


def test_zero_is_simple_and_small(presets):
    prob = presets["sine_offset"]
    traj, res = shoot_v(prob, "m", 3.0, "t1")
    assert math.isfinite(res.zero)
    assert res.derivative_at_zero != 0.0
    u, _ = traj(res.zero)
    assert abs(u) <= 1e-9 * res.u_max


def test_exponential_regime_rescales_without_overflow(const):
    # v = cosh(sqrt(|a|) t) overflows doubles long before pi at |a| = 1e6
    _, res = shoot_v(const, "m", -1e6, "t1", record=False)
    assert res.zero == math.inf
    assert math.isfinite(res.u_max)
    assert res.log_scale > 700
    _, res = shoot_u(const, "m", 1.01e6, 0.0, record=False)
    assert res.interior_zero_count_to_end == math.floor(math.sqrt(1.01e6))


def test_breakpoints_split_steps():
    prob = SLProblem.single(0, 2, PiecewiseFn.pwlinear([(0, 1), (0.7, 3), (1.3, -1), (2, 1)]))
    traj, _ = shoot_v(prob, "m", 2.0, "t1")
    for bp in (0.7, 1.3):
        assert np.min(np.abs(traj.t - bp)) == 0.0


def test_half_tolerance_changes_zero_little(presets):
    prob = presets["zigzag_N3"]
    for c in (5.0, 40.0, -25.0):
        z = first_zero(prob, "m", c, 0.0, "v", "forward")
        zh = first_zero(prob, "m", c, 0.0, "v", "forward", Tolerances().halved())
        if math.isfinite(z):
            assert abs(z - zh) < 10 * TAU_T * prob.length
        else:
            assert z == zh


def test_reversal_consistency(presets):
    for name in ("sine_balanced", "zigzag_N2", "zigzag_N3"):
        prob = presets[name]
        ref = prob.reflected()
        for c in (3.0, 17.0, -9.0):
            z_back = shoot_v(prob, "m", c, "t2", record=False)[1].zero
            z_mirror = shoot_v(ref, "m", c, "t1", record=False)[1].zero
            assert z_back == pytest.approx(-z_mirror, abs=TAU_T * prob.length * 10)


def test_momentum_form_with_variable_p():
    # -(e^{2t} u')' = 0 has u = 1 - e^{-2t}; p only continuous at 0.5
    p = PiecewiseFn.pwlinear([(0, 1), (0.5, 2), (1, 1)])
    prob = SLProblem.single(0, 1, PiecewiseFn.constant(1.0), p=p)
    traj, res = shoot_u(prob, "m", 0.0, 0.0)
    # w = p u' is constant (= p(0) = 1) when a = 0
    assert np.allclose(traj.w, 1.0, atol=1e-12)
    expected = 0.5 * math.log(2) + 0.5 * math.log(2)  # int_0^1 dt / p
    assert traj(1.0)[0] == pytest.approx(expected, abs=1e-10)
    assert res.end_state[1] == pytest.approx(1.0, abs=1e-10)
