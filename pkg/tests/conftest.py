import json
from functools import lru_cache
from pathlib import Path

import pytest

from gainmod.dsl import parse_definition
from gainmod.ode import IntegratorConfig
from gainmod.pipeline import analyze
from gainmod.systems import builtin, perturb

FIXTURES = Path(__file__).parent / "fixtures"


@lru_cache(maxsize=None)
def analysis(name, perturbation=None, phase_source="output"):
    """Default-config pipeline run, shared across test modules."""
    system = builtin(name)
    if perturbation:
        system = perturb(system, *perturbation)
    return analyze(system, IntegratorConfig(), phase_source=phase_source)


@pytest.fixture(scope="session")
def thresholds():
    return json.loads((FIXTURES / "thresholds.json").read_text())


@pytest.fixture
def oscillator():
    return parse_definition("system harmonic\nvar x : y\nvar y : -x\ninit x = 1\ninit y = 0\n")
