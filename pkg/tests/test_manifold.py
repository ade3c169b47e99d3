import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import analysis
from gainmod.dsl.classify import classify_term
from gainmod.errors import TooFewSamples
from gainmod.manifold import COLLAPSE_THRESHOLD, Verdict, classify_manifold, functional_residual
from gainmod.dsl import classify as dsl_classify
from gainmod.systems import BUILTIN_NAMES, builtin


def test_threshold_shared_with_classifier():
    assert dsl_classify.COLLAPSE_THRESHOLD is COLLAPSE_THRESHOLD


def test_exact_function_collapses():
    xs = np.random.default_rng(0).uniform(-1, 1, 5000)
    assert functional_residual(xs, 1 - xs ** 2) < 0.02


def test_independent_noise():
    rng = np.random.default_rng(1)
    assert functional_residual(rng.uniform(size=5000), rng.uniform(size=5000)) > 0.5


def test_constant_ys():
    assert functional_residual(np.arange(200.0), np.full(200, 3.0)) == 0.0


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        functional_residual(np.arange(50.0), np.arange(50.0))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.floats(-100, 100), st.floats(0.01, 100))
def test_residual_invariances(scale, shift, yscale):
    rng = np.random.default_rng(2)
    xs = rng.uniform(-2, 2, 2000)
    ys = np.sin(3 * xs) + 0.3 * rng.normal(size=2000)
    base = functional_residual(xs, ys)
    assert functional_residual(scale * xs + shift, ys) == pytest.approx(base, rel=1e-6)
    assert functional_residual(xs, yscale * ys) == pytest.approx(base, rel=1e-9)


def test_v1_collapses_on_output():
    rep = classify_manifold(analysis("rossler_v1").trace)
    assert rep.verdict is Verdict.COLLAPSED_ON_OUTPUT
    assert np.allclose(rep.fitted_relation, (1, 0, -1), atol=1e-3)


def test_fhn_collapses_on_input():
    rep = classify_manifold(analysis("fitzhugh_nagumo").trace)
    assert rep.verdict is Verdict.COLLAPSED_ON_INPUT
    assert np.allclose(rep.fitted_relation, (0, 0, -1), atol=1e-3)


@pytest.mark.parametrize("name", ["rossler_v2", "rossler_original"])
def test_gain_modulated_systems_are_3d(name):
    rep = classify_manifold(analysis(name).trace)
    assert rep.verdict is Verdict.THREE_DIMENSIONAL
    assert rep.fitted_relation is None
    assert min(rep.residual_vs_output, rep.residual_vs_input) > 5 * COLLAPSE_THRESHOLD


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_static_prediction_matches_trajectory(name):
    an = analysis(name)
    measured = classify_manifold(an.trace).dim
    assert classify_term(builtin(name).term, builtin(name).params).predicted_dim == measured
    assert an.classification.predicted_dim == measured


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_verdict_stable_under_subsampling(name):
    tr = analysis(name).trace
    assert classify_manifold(tr.subsample(2)).verdict is classify_manifold(tr).verdict


def test_report_dict_is_labelled():
    d = classify_manifold(analysis("rossler_v1").trace).to_dict()
    assert "operationalization" in d["criterion"]
    assert d["dimension"] == 2
