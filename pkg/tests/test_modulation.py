import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import analysis
from gainmod.dsl import NonlinearTermDef, parse, parse_definition
from gainmod.errors import MissingTerm
from gainmod.modulation import frames_from_trace, gain_fd, io_space_frames, trace
from gainmod.ode import IntegratorConfig, Trajectory, integrate
from gainmod.systems import BUILTIN_NAMES, builtin


def _traj(system, *rows):
    states = np.array(rows, dtype=float)
    return Trajectory(np.arange(len(states)) * 0.01, states, 0.01, system.state_vars)


def test_trace_v1_origin():
    s = builtin("rossler_v1")
    tr = trace(_traj(s, [0, 0, 0], [0, 1, 0]), s)
    assert tr.output[0] == 0.0 and tr.gain[0] == 1.0


def test_trace_original_sample():
    s = builtin("rossler_original")
    tr = trace(_traj(s, [2, 0, 3], [2, 0, 3]), s)
    assert tr.output[0] == 6.0 and tr.gain[0] == 2.0


def test_trace_without_term():
    s = parse_definition("system s\nvar x : -x\n")
    with pytest.raises(MissingTerm):
        trace(_traj(s, [1], [1]), s)


def test_v1_gain_identity():
    tr = analysis("rossler_v1").trace
    assert np.abs(tr.gain - (1 - tr.output ** 2)).max() < 1e-9


def test_fhn_gain_identity():
    tr = analysis("fitzhugh_nagumo").trace
    assert np.abs(tr.gain + tr.input ** 2).max() < 1e-9


def test_original_gain_identity():
    tr = analysis("rossler_original").trace
    assert np.array_equal(tr.gain, tr.modulator)


def test_gain_fd_examples():
    assert gain_fd(NonlinearTermDef(parse("tanh(x+z)"), "z", "x"), 0, 0, 1e-5) == \
        pytest.approx(1, abs=1e-9)
    prod = NonlinearTermDef(parse("x*z"), "z", "x")
    for h in (2.0 ** -17, 0.25, 4.0):  # dyadic steps keep z +- h exact
        assert gain_fd(prod, 3, 7, h) == 3
    assert gain_fd(prod, 3, 7, 1e-5) == pytest.approx(3, abs=1e-9)
    assert gain_fd(NonlinearTermDef(parse("tanh(x*z)"), "z", "x"), 2, 0.5, 1e-5) == \
        pytest.approx(2 / math.cosh(1) ** 2, abs=1e-8)


def test_gain_fd_needs_positive_step():
    with pytest.raises(ValueError):
        gain_fd(NonlinearTermDef(parse("x*z"), "z", "x"), 1, 1, 0)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_symbolic_gain_matches_fd_on_trace(name):
    s = builtin(name)
    tr = analysis(name).trace
    idx = np.random.default_rng(3).choice(len(tr), 100, replace=False)
    for i in idx:
        fd = gain_fd(s.term, tr.modulator[i], tr.input[i], 1e-5, s.params)
        assert abs(tr.gain[i] - fd) / max(1.0, abs(tr.gain[i])) < 1e-6


def test_single_frame_is_first_sample():
    an = analysis("rossler_v1")
    (frame,) = frames_from_trace(an.trace, an.system.term, 1, an.system.params)
    assert frame.time == an.trace.times[0]


def test_v1_frames_are_shifted_sigmoids():
    s = builtin("rossler_v1")
    traj = integrate(s, None, IntegratorConfig(t_end=200))
    frames = io_space_frames(traj, s, 12)
    assert len(frames) == 12
    for f in frames:
        assert np.abs(f.curve - np.tanh(f.input_grid + f.modulator)).max() < 1e-12
        z, o = f.point
        assert o == pytest.approx(math.tanh(z + f.modulator), abs=1e-12)
        assert f.slope == pytest.approx(1 - o ** 2, abs=1e-9)


def test_v2_frames_slope_at_origin():
    s = builtin("rossler_v2")
    traj = integrate(s, None, IntegratorConfig(t_end=100))
    h = 1e-6
    for f in io_space_frames(traj, s, 8):
        assert np.abs(f.curve - np.tanh(f.input_grid * f.modulator)).max() < 1e-12
        slope0 = (math.tanh(h * f.modulator) - math.tanh(-h * f.modulator)) / (2 * h)
        assert slope0 == pytest.approx(f.modulator, abs=1e-9)


def test_frames_share_input_grid():
    an = analysis("rossler_v1")
    frames = frames_from_trace(an.trace, an.system.term, 5, an.system.params)
    assert all(np.array_equal(frames[0].input_grid, f.input_grid) for f in frames)
    assert frames[0].input_grid.min() < an.trace.input.min()
    assert frames[0].input_grid.max() > an.trace.input.max()


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_fd_gain_of_product_term_is_modulator(x, z):
    assert gain_fd(NonlinearTermDef(parse("x*z"), "z", "x"), x, z) == pytest.approx(x, abs=1e-9)
