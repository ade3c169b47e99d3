"""Static classification of a two-variable nonlinear term by modulation type.

The symbolic gain ∂f/∂input is exact; the class itself is decided by
sampling the term over a box and testing which coordinate (if any) the gain
is a function of. Pattern matching on the tree would miss algebraic
rewrites such as ``tanh(z - (-x))``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import qmc

from ..errors import DegenerateTerm
from ..manifold import COLLAPSE_THRESHOLD, functional_residual
from .calculus import ZERO, differentiate, evaluate_array
from .expr import Expr, free_vars

DEFAULT_BOX = ((-3.0, 3.0), (-3.0, 3.0))
N_SAMPLES = 512


class ModulationClass(str, Enum):
    LINEAR_INPUT = "LinearInputModulation"
    LINEAR_OUTPUT = "LinearOutputModulation"
    GAIN = "GainModulation"
    NONE = "NoModulation"


class CollapseAxis(str, Enum):
    OUTPUT = "Output"
    INPUT = "Input"
    NONE = "None"


@dataclass(frozen=True)
class TermClassification:
    cls: ModulationClass
    predicted_dim: int
    collapse_axis: CollapseAxis
    gain_expr: Expr
    residual_vs_output: float = float("nan")
    residual_vs_input: float = float("nan")

    def to_dict(self):
        return {
            "class": self.cls.value,
            "predicted_dim": self.predicted_dim,
            "collapse_axis": self.collapse_axis.value,
            "gain_expr": str(self.gain_expr),
            "residual_vs_output": self.residual_vs_output,
            "residual_vs_input": self.residual_vs_input,
        }


_LAYOUT = {
    ModulationClass.LINEAR_INPUT: (2, CollapseAxis.OUTPUT),
    ModulationClass.LINEAR_OUTPUT: (2, CollapseAxis.INPUT),
    ModulationClass.GAIN: (3, CollapseAxis.NONE),
    # an affine term has constant gain: a plane in I/O/G, attached to neither axis
    ModulationClass.NONE: (2, CollapseAxis.NONE),
}


def sample_box(box=DEFAULT_BOX, n: int = N_SAMPLES, seed: int = 0):
    """Scrambled Sobol points; returns (modulator, input) arrays."""
    sampler = qmc.Sobol(d=2, scramble=True, seed=np.random.default_rng(seed))
    m = int(np.log2(n))
    if 2 ** m == n:
        pts = sampler.random_base2(m)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            pts = sampler.random(n)
    lo = np.array([box[0][0], box[1][0]])
    hi = np.array([box[0][1], box[1][1]])
    pts = qmc.scale(pts, lo, hi)
    return pts[:, 0], pts[:, 1]


def _collapsed(a, g):
    r_ga = functional_residual(a, g)
    r_ag = functional_residual(g, a)
    return min(r_ga, r_ag)


def classify_term(term, params=None, box=DEFAULT_BOX, seed: int = 0,
                  n_samples: int = N_SAMPLES) -> TermClassification:
    """Classify ``term`` as linear-input, linear-output, gain or no modulation.

    ``box`` is ((modulator_lo, modulator_hi), (input_lo, input_hi)).
    """
    expr, z, x = term.expr, term.input_var, term.modulator_var
    gain = differentiate(expr, z)
    slope_x = differentiate(expr, x)
    if gain == ZERO or slope_x == ZERO:
        missing = z if gain == ZERO else x
        raise DegenerateTerm(f"term {expr} does not depend on {missing!r}")
    params = dict(params or {})
    others = free_vars(expr) - {x, z} - set(params)
    if others:
        raise DegenerateTerm(f"term {expr} uses variables other than {x!r} and {z!r}: "
                             f"{sorted(others)}")

    xs, zs = sample_box(box, n_samples, seed)
    bind = {**params, x: xs, z: zs}
    out = evaluate_array(expr, bind)
    g = evaluate_array(gain, bind)
    gx = evaluate_array(slope_x, bind)
    if not np.any(g) or not np.any(gx):
        raise DegenerateTerm(f"term {expr} is flat in one variable over the sampling box")

    def flat(v):
        return np.ptp(v) < 1e-9 * max(1.0, np.abs(v).max())

    if flat(g) and flat(gx):
        cls = ModulationClass.NONE
        r_out = r_in = 0.0
    else:
        r_out = _collapsed(out, g)
        r_in = _collapsed(zs, g)
        if r_out < COLLAPSE_THRESHOLD:
            cls = ModulationClass.LINEAR_INPUT
        elif r_in < COLLAPSE_THRESHOLD:
            cls = ModulationClass.LINEAR_OUTPUT
        else:
            cls = ModulationClass.GAIN
    dim, axis = _LAYOUT[cls]
    return TermClassification(cls, dim, axis, gain, float(r_out), float(r_in))
