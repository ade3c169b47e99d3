"""Is the modulation-phase-space trajectory 2-D (gain collapses onto output or
input) or genuinely 3-D?

The instrument is a functional-dependence residual: how much of the gain's
variance is left after explaining it as a smooth function of one coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import TooFewSamples

COLLAPSE_THRESHOLD = 0.02
N_BINS = 64
MIN_SAMPLES = 100
MAX_FIT_DEGREE = 6


class Verdict(str, Enum):
    COLLAPSED_ON_OUTPUT = "CollapsedOnOutput"
    COLLAPSED_ON_INPUT = "CollapsedOnInput"
    THREE_DIMENSIONAL = "ThreeDimensional"


@dataclass(frozen=True)
class CollapseReport:
    residual_vs_output: float
    residual_vs_input: float
    verdict: Verdict
    fitted_relation: Optional[tuple] = None
    threshold: float = COLLAPSE_THRESHOLD

    @property
    def dim(self) -> int:
        return 3 if self.verdict is Verdict.THREE_DIMENSIONAL else 2

    def to_dict(self):
        return {
            "residual_vs_output": self.residual_vs_output,
            "residual_vs_input": self.residual_vs_input,
            "verdict": self.verdict.value,
            "dimension": self.dim,
            "fitted_relation": list(self.fitted_relation) if self.fitted_relation else None,
            "criterion": (f"binned functional residual < {self.threshold} declares collapse "
                          "(artifact operationalization, not a published value)"),
        }


def functional_residual(xs, ys, n_bins: int = N_BINS) -> float:
    """Normalised RMS of ``ys`` left unexplained by a smooth function of ``xs``.

    Pairs are sorted by ``xs`` and split into ``n_bins`` equal-occupancy bins;
    inside each bin the deviation is taken from the bin's least-squares line.
    The RMS deviation is divided by the standard deviation of ``ys``. An exact
    smooth relation gives a value near 0, independent data give about 1.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-D and of equal length")
    if len(xs) < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {len(xs)}")
    sd = ys.std()
    if sd == 0.0 or sd <= 1e-14 * np.abs(ys).max():
        return 0.0
    order = np.argsort(xs, kind="stable")
    sq = 0.0
    for bx, by in zip(np.array_split(xs[order], n_bins), np.array_split(ys[order], n_bins)):
        dx = bx - bx.mean()
        dy = by - by.mean()
        sxx = dx @ dx
        if sxx > 0.0:
            dy = dy - (dx @ dy / sxx) * dx
        sq += dy @ dy
    return float(np.sqrt(sq / len(ys)) / sd)


def fit_relation(axis, gain, residual: float):
    """Lowest-degree polynomial (≤ 6) whose normalised RMS error is within 10% of
    ``residual``. Returns ascending coefficients, or None when no degree
    qualifies (the relation is then reported only as the binned table)."""
    axis = np.asarray(axis, dtype=float)
    gain = np.asarray(gain, dtype=float)
    sd = gain.std()
    if sd == 0.0:
        return (float(gain.mean()),)
    for deg in range(MAX_FIT_DEGREE + 1):
        p = Polynomial.fit(axis, gain, deg)
        err = np.sqrt(np.mean((gain - p(axis)) ** 2)) / sd
        if err <= 1.1 * residual + 1e-12:
            coef = p.convert().coef
            coef = np.pad(coef, (0, deg + 1 - len(coef)))
            return tuple(float(c) for c in coef)
    return None


def classify_manifold(trace) -> CollapseReport:
    gain = np.asarray(trace.gain)
    if len(gain) < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {len(gain)}")
    r_out = functional_residual(trace.output, gain)
    r_in = functional_residual(trace.input, gain)
    candidates = [(r, v, axis) for r, v, axis in (
        (r_out, Verdict.COLLAPSED_ON_OUTPUT, trace.output),
        (r_in, Verdict.COLLAPSED_ON_INPUT, trace.input),
    ) if r < COLLAPSE_THRESHOLD]
    if not candidates:
        return CollapseReport(r_out, r_in, Verdict.THREE_DIMENSIONAL)
    r, verdict, axis = min(candidates, key=lambda c: c[0])
    return CollapseReport(r_out, r_in, verdict, fit_relation(axis, gain, r))
