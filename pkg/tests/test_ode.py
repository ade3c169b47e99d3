import numpy as np
import pytest

from gainmod.dsl import parse_definition
from gainmod.errors import ConfigError, NoPeriod, NonFiniteState
from gainmod.ode import (IntegratorConfig, Method, Trajectory, detect_period, integrate,
                         return_distances, signal_period, step_rk4)
from gainmod.systems import builtin



def system(*rhs, names="xyz"):
    lines = ["system t"] + [f"var {v} : {e}" for v, e in zip(names, rhs)]
    return parse_definition("\n".join(lines) + "\n")


def test_step_identity():
    s = system("0", "0", "0")
    assert np.array_equal(step_rk4(s, np.array([1.0, 2.0, 3.0]), 0.1), [1.0, 2.0, 3.0])


def test_step_oscillator(oscillator):
    state = np.array([1.0, 0.0])
    for _ in range(628):
        state = step_rk4(oscillator, state, 0.01)
    assert np.allclose(state, [np.cos(6.28), -np.sin(6.28)], atol=1e-6, rtol=0)


def test_step_decay():
    assert step_rk4(system("-z", names="z"), np.array([1.0]), 0.1)[0] == \
        pytest.approx(0.9048375, abs=1e-7)


def test_step_nonfinite():
    with pytest.raises(NonFiniteState):
        step_rk4(system("x^2", names="x"), np.array([1e200]), 0.1)


def test_integrate_constant():
    traj = integrate(system("0", names="x"), [5.0],
                     IntegratorConfig(dt=0.1, t_end=1, transient_fraction=0))
    assert len(traj) == 11
    assert np.all(traj.states == 5.0)
    assert np.allclose(np.diff(traj.times), 0.1)


@pytest.mark.parametrize("method", list(Method))
def test_energy_conservation(oscillator, method):
    traj = integrate(oscillator, None, IntegratorConfig(method=method, dt=0.01, t_end=100,
                                                        transient_fraction=0))
    energy = (traj.states ** 2).sum(axis=1)
    assert np.max(np.abs(energy - energy[0])) / energy[0] < 1e-6


def _oscillator_error(oscillator, dt):
    t_end = 20 * np.pi
    traj = integrate(oscillator, None, IntegratorConfig(dt=dt, t_end=t_end, transient_fraction=0))
    exact = np.column_stack([np.cos(traj.times), -np.sin(traj.times)])
    return np.abs(traj.states - exact).max()


def test_rk4_order(oscillator):
    ratio = _oscillator_error(oscillator, 0.02) / _oscillator_error(oscillator, 0.01)
    assert 12 <= ratio <= 20


def test_divergence_reports_time():
    s = system("x^2", names="x")
    with pytest.raises(NonFiniteState) as info:
        integrate(s, [1.0], IntegratorConfig(dt=0.001, t_end=5, transient_fraction=0))
    assert info.value.time == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("kwargs", [dict(dt=0), dict(dt=-1), dict(t_end=0.001, dt=0.01),
                                    dict(transient_fraction=1.0), dict(abs_tol=0)])
def test_invalid_config(kwargs):
    with pytest.raises(ConfigError):
        IntegratorConfig(**kwargs)


def test_initial_dimension_checked(oscillator):
    with pytest.raises(ConfigError):
        integrate(oscillator, [1.0, 2.0, 3.0], IntegratorConfig(t_end=1))


def test_transient_dropped():
    traj = integrate(system("0", names="x"), [1.0],
                     IntegratorConfig(dt=0.1, t_end=10, transient_fraction=0.5))
    assert traj.times[0] == pytest.approx(5.0)
    assert traj.times[-1] == pytest.approx(10.0)


def test_determinism():
    s = builtin("rossler_v1")
    cfg = IntegratorConfig(t_end=200)
    a, b = integrate(s, None, cfg), integrate(s, None, cfg)
    assert a.states.tobytes() == b.states.tobytes()


def test_dp45_agrees_with_rk4():
    s = builtin("rossler_v1")
    rk = integrate(s, None, IntegratorConfig(method=Method.RK4))
    dp = integrate(s, None, IntegratorConfig(method=Method.DP45))
    assert np.array_equal(rk.times, dp.times)
    assert np.abs(rk.states - dp.states).max() < 1e-4


# -- periods ------------------------------------------------------------------------

def _signal_traj(values, dt):
    values = np.asarray(values, dtype=float)
    return Trajectory(np.arange(len(values)) * dt, values[:, None], dt, ("s",))


def test_period_of_sine():
    t = np.arange(0, 30, 0.01)
    assert detect_period(_signal_traj(np.sin(2 * np.pi * t / 5), 0.01)) == \
        pytest.approx(5.0, abs=0.01)


def test_constant_has_no_period():
    with pytest.raises(NoPeriod):
        detect_period(_signal_traj(np.ones(500), 0.01))


def test_too_few_crossings():
    t = np.arange(0, 9, 0.01)
    with pytest.raises(NoPeriod):
        signal_period(np.sin(2 * np.pi * t / 5), 0.01)


def test_irregular_signal_has_no_period():
    rng = np.random.default_rng(0)
    with pytest.raises(NoPeriod):
        signal_period(rng.normal(size=3000), 0.01)


def test_rossler_v1_is_a_limit_cycle():
    from conftest import analysis
    traj = analysis("rossler_v1").trajectory
    period = detect_period(traj, 0)
    assert period == pytest.approx(6.4054, abs=1e-3)  # regression anchor
    assert return_distances(traj, 0).max() < 1e-3
