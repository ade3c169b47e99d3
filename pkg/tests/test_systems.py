import numpy as np
import pytest
from scipy.spatial import cKDTree

from gainmod.dsl import parse, parse_definition
from gainmod.errors import NoPeriod, UnknownParameter, UnknownSystem
from gainmod.ode import IntegratorConfig, detect_period, integrate
from gainmod.systems import BUILTIN_NAMES, builtin, builtin_source, perturb


@pytest.mark.parametrize("name, params", [
    ("rossler_v1", {"a": 1, "b": 0.06, "c": 0.2, "d": 2}),
    ("rossler_v2", {"a": 6, "b": 0.03, "c": 1.1, "d": 1.1}),
])
def test_builtin_params(name, params):
    assert dict(builtin(name).params) == params


@pytest.mark.parametrize("name, expr", [
    ("rossler_original", "x*z"),
    ("rossler_v1", "tanh(x+z)"),
    ("rossler_v2", "tanh(x*z)"),
    ("fitzhugh_nagumo", "-z^3/3 - x"),
])
def test_builtin_terms(name, expr):
    t = builtin(name).term
    assert t.expr == parse(expr)
    assert (t.input_var, t.modulator_var) == ("z", "x")


def test_builtin_is_pure():
    assert builtin("rossler_v1") is builtin("rossler_v1") or \
        builtin("rossler_v1") == builtin("rossler_v1")


def test_unknown_system():
    with pytest.raises(UnknownSystem) as info:
        builtin("lorenz")
    assert all(n in str(info.value) for n in BUILTIN_NAMES)


@pytest.mark.parametrize("name, value", [("rossler_v1", 1.8), ("rossler_v2", 0.99)])
def test_perturb_d(name, value):
    p = perturb(builtin(name), "d", -0.10)
    assert p.params["d"] == pytest.approx(value, rel=1e-12)
    base = builtin(name)
    assert {k: v for k, v in p.params.items() if k != "d"} == \
        {k: v for k, v in base.params.items() if k != "d"}
    assert p.rhs == base.rhs and p.terms == base.terms


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_zero_perturbation_is_identity(name):
    assert perturb(builtin(name), next(iter(builtin(name).params)), 0.0) == builtin(name)


def test_perturb_unknown_param():
    with pytest.raises(UnknownParameter):
        perturb(builtin("rossler_v1"), "q", 0.1)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_sources_round_trip(name):
    assert parse_definition(builtin_source(name), default_name=name) == builtin(name)


def _hausdorff(a, b):
    return max(cKDTree(b).query(a)[0].max(), cKDTree(a).query(b)[0].max())


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_single_attractor(name):
    s = builtin(name)
    rng = np.random.default_rng(11)
    clouds = [integrate(s, ic).states[::10] for ic in rng.uniform(-1, 1, size=(10, s.dim))]
    worst = max(_hausdorff(clouds[0], c) for c in clouds[1:])
    assert worst < 0.05


def test_mirror_sign_pattern_has_no_cycle():
    # With -y - z and a*x + b*y in place of -y + z and a*x - b*y the same
    # parameters settle onto a fixed point; this is why the built-ins use the
    # sign pattern they do.
    src = builtin_source("rossler_v1").replace("-y + z", "-y - z").replace("a*x - b*y", "a*x + b*y")
    s = parse_definition(src)
    assert s.rhs != builtin("rossler_v1").rhs
    traj = integrate(s, None, IntegratorConfig(t_end=1000))
    assert np.ptp(traj.states[-5000:], axis=0).max() < 1e-9
    with pytest.raises(NoPeriod):
        detect_period(traj, 0)
