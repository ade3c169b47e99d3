"""Instantaneous phase from the analytic signal and the phase-gain relationship.

The symmetry score is this package's own operationalisation of a mirror
symmetry in the phase-gain curve; it is not a published quantity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (EmptyBins, GridMismatch, IncompatibleReports, NoPeriod, NotOscillatory,
                     TooShort)
from .ode import signal_period

EDGE_FRACTION = 0.02
MIN_LENGTH = 64
N_PHASE_BINS = 360
MAX_EMPTY_FRACTION = 0.10
SYMMETRIC_THRESHOLD = 0.05
ASYMMETRIC_THRESHOLD = 0.15
AXIS_DRIFT_BINS = 2


@dataclass(frozen=True)
class PhaseSeries:
    times: np.ndarray
    phase: np.ndarray
    unwrapped: np.ndarray
    amplitude: np.ndarray
    edge: int
    period: float = float("nan")

    def __len__(self):
        return len(self.times)

    @property
    def interior(self) -> slice:
        return slice(self.edge, len(self.times) - self.edge)


def wrap(phi):
    """Map angles into (-pi, pi]."""
    out = np.mod(np.asarray(phi, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(out == -np.pi, np.pi, out)


def analytic_signal(x) -> np.ndarray:
    """FFT construction: keep DC and Nyquist, double positive, zero negative bins."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    weights = np.zeros(n)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[n // 2] = 1.0
        weights[1:n // 2] = 2.0
    else:
        weights[1:(n + 1) // 2] = 2.0
    return np.fft.ifft(np.fft.fft(x) * weights)


def analytic_phase(signal, dt: float, times=None) -> PhaseSeries:
    """Phase and amplitude of ``signal`` over the longest whole-period prefix."""
    x = np.asarray(signal, dtype=float)
    if len(x) < MIN_LENGTH:
        raise TooShort(f"need at least {MIN_LENGTH} samples, got {len(x)}")
    if not np.var(x) > 0:
        raise NotOscillatory("signal has zero variance")
    try:
        period = signal_period(x, dt)
    except NoPeriod as exc:
        raise NotOscillatory(str(exc)) from None
    whole = math.floor(len(x) * dt / period)
    if whole < 1:
        raise TooShort("signal is shorter than one period")
    n = min(len(x), int(round(whole * period / dt)))
    x = x[:n] - x[:n].mean()
    z = analytic_signal(x)
    phase = wrap(np.angle(z))
    t = np.arange(n) * dt if times is None else np.asarray(times, dtype=float)[:n]
    return PhaseSeries(t, phase, np.unwrap(phase), np.abs(z),
                       int(round(EDGE_FRACTION * n)), period)


def _guard_window(trace) -> int:
    for signal in (trace.output, trace.gain):
        try:
            return max(3, int(round(0.01 * signal_period(signal, trace.dt) / trace.dt)))
        except NoPeriod:
            continue
    return 3


def gain_extrema(trace, window=None, edge_fraction: float = EDGE_FRACTION) -> list:
    """Strict local extrema of the gain with ``window`` guard samples per side.

    A plateau counts once, at its midpoint, when the ``window`` samples on each
    side are all strictly below (max) or above (min) it.
    """
    g = np.asarray(trace.gain, dtype=float)
    n = len(g)
    w = _guard_window(trace) if window is None else int(window)
    if n < 2 * w + 1:
        return []
    # runs of identical values
    change = np.flatnonzero(np.diff(g) != 0) + 1
    starts = np.r_[0, change]
    ends = np.r_[change - 1, n - 1]
    ok = (starts >= w) & (ends + w <= n - 1)
    starts, ends = starts[ok], ends[ok]
    win = sliding_window_view(g, w)
    wmax, wmin = win.max(axis=1), win.min(axis=1)
    left_max, left_min = wmax[starts - w], wmin[starts - w]
    right_max, right_min = wmax[ends + 1], wmin[ends + 1]
    v = g[starts]
    is_max = (left_max < v) & (right_max < v)
    is_min = (left_min > v) & (right_min > v)
    mid = (starts + ends) // 2
    edge = int(round(edge_fraction * n))
    keep = (is_max | is_min) & (mid >= edge) & (mid < n - edge)
    return [(int(i), "max" if m else "min") for i, m in zip(mid[keep], is_max[keep])]


def _check_grid(trace, phase):
    n = len(phase)
    if n > len(trace.times):
        raise GridMismatch("phase series is longer than the trace")
    tol = 1e-9 * abs(trace.times[1] - trace.times[0])
    if not np.allclose(phase.times, trace.times[:n], rtol=0.0, atol=tol):
        raise GridMismatch("phase and trace are sampled on different time grids")


def extrema_phase_diffs(trace, phase: PhaseSeries, pairing: str = "same_kind",
                        window=None) -> np.ndarray:
    """Phase advance between gain extrema, reduced into (0, 2π].

    ``pairing="same_kind"`` pairs each extremum with the next one of the same
    kind (max to max, min to min); ``"adjacent"`` pairs neighbours in time.
    """
    _check_grid(trace, phase)
    lo, hi = phase.interior.start, phase.interior.stop
    ext = [(i, k) for i, k in gain_extrema(trace, window) if lo <= i < hi]
    if pairing == "adjacent":
        pairs = list(zip(ext, ext[1:]))
    elif pairing == "same_kind":
        pairs = []
        for kind in ("max", "min"):
            same = [e for e in ext if e[1] == kind]
            pairs += list(zip(same, same[1:]))
        pairs.sort()
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    if not pairs:
        return np.array([])
    i = np.array([a[0] for a, _ in pairs])
    j = np.array([b[0] for _, b in pairs])
    d = np.mod(phase.unwrapped[j] - phase.unwrapped[i], 2 * np.pi)
    return np.where(d == 0.0, 2 * np.pi, d)


@dataclass(frozen=True)
class SymmetryReport:
    score: float
    axis_phase: float
    extrema_phase_diffs: tuple
    binned_gain: tuple
    n_bins: int = N_PHASE_BINS

    @property
    def bin_width(self) -> float:
        return 2 * np.pi / self.n_bins

    @property
    def label(self) -> str:
        if self.score < SYMMETRIC_THRESHOLD:
            return "symmetric"
        if self.score > ASYMMETRIC_THRESHOLD:
            return "asymmetric"
        return "indeterminate"

    def to_dict(self):
        return {
            "score": self.score,
            "axis_phase": self.axis_phase,
            "label": self.label,
            "extrema_phase_diffs": list(self.extrema_phase_diffs),
            "n_bins": self.n_bins,
            "binned_gain": list(self.binned_gain),
            "definition": ("min over mirror axes of RMS(G(a+d) - G(a-d)) / RMS(G - mean G) "
                           "on phase-binned normalised gain (artifact operationalization)"),
        }


def bin_gain(phases, gain, n_bins: int = N_PHASE_BINS) -> np.ndarray:
    """Mean normalised gain per phase bin; bin k covers [-π + k·w, -π + (k+1)·w)."""
    gain = np.asarray(gain, dtype=float)
    top = np.abs(gain).max()
    g = gain / top if top > 0 else gain
    idx = np.floor((np.asarray(phases) + np.pi) / (2 * np.pi) * n_bins).astype(int) % n_bins
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=g, minlength=n_bins)
    empty = counts == 0
    if empty.mean() > MAX_EMPTY_FRACTION:
        raise EmptyBins(f"{int(empty.sum())} of {n_bins} phase bins are empty")
    means = np.divide(sums, counts, out=np.zeros(n_bins), where=~empty)
    if empty.any():
        k = np.arange(n_bins)
        means[empty] = np.interp(k[empty], k[~empty], means[~empty], period=n_bins)
    return means


def mirror_asymmetry(binned) -> np.ndarray:
    """Normalised asymmetry of ``binned`` about each bin centre."""
    b = np.asarray(binned, dtype=float)
    nb = len(b)
    spread = np.sqrt(np.mean((b - b.mean()) ** 2))
    if spread == 0.0:
        return np.zeros(nb)
    k = np.arange(nb)[:, None]
    d = np.arange(1, nb // 2)[None, :] if nb % 2 == 0 else np.arange(1, nb // 2 + 1)[None, :]
    diff = b[(k + d) % nb] - b[(k - d) % nb]
    return np.sqrt(np.mean(diff ** 2, axis=1)) / spread


def symmetry_score(trace, phase: PhaseSeries, n_bins: int = N_PHASE_BINS,
                   pairing: str = "same_kind") -> SymmetryReport:
    """Mirror symmetry of normalised gain against oscillation phase.

    Scores are clipped to [0, 1]; 0 is an exact mirror image about
    ``axis_phase``.
    """
    _check_grid(trace, phase)
    s = phase.interior
    if s.stop - s.start < MIN_LENGTH:
        raise TooShort("too few interior samples")
    if np.ptp(phase.unwrapped[s]) < 2 * np.pi:
        raise TooShort("less than one full period of phase")
    binned = bin_gain(phase.phase[s], np.asarray(trace.gain)[s.start:s.stop], n_bins)
    asym = mirror_asymmetry(binned)
    k = int(np.argmin(asym))
    axis = float(wrap(-np.pi + (k + 0.5) * 2 * np.pi / n_bins))
    diffs = extrema_phase_diffs(trace, phase, pairing)
    return SymmetryReport(float(min(1.0, asym[k])), axis, tuple(float(d) for d in diffs),
                          tuple(float(v) for v in binned), n_bins)


class Plasticity(str, Enum):
    CONSTRAINED = "Constrained"
    UNCONSTRAINED = "Unconstrained"


@dataclass(frozen=True)
class PlasticityReport:
    base_score: float
    perturbed_score: float
    axis_drift: float
    max_curve_change: float
    classification: Plasticity

    def to_dict(self):
        return {
            "base_score": self.base_score,
            "perturbed_score": self.perturbed_score,
            "axis_drift": self.axis_drift,
            "max_curve_change": self.max_curve_change,
            "classification": self.classification.value,
        }


def axis_distance(a: float, b: float) -> float:
    """Distance between mirror axes; an axis and its opposite are the same axis."""
    d = abs(a - b) % np.pi
    return float(min(d, np.pi - d))


def phase_plasticity_report(base: SymmetryReport, perturbed: SymmetryReport) -> PlasticityReport:
    if base.n_bins != perturbed.n_bins:
        raise IncompatibleReports(f"bin counts differ: {base.n_bins} vs {perturbed.n_bins}")
    drift = axis_distance(base.axis_phase, perturbed.axis_phase)
    change = float(np.max(np.abs(np.subtract(base.binned_gain, perturbed.binned_gain))))
    constrained = (base.score < SYMMETRIC_THRESHOLD and perturbed.score < SYMMETRIC_THRESHOLD
                   and drift < AXIS_DRIFT_BINS * base.bin_width)
    return PlasticityReport(base.score, perturbed.score, drift, change,
                            Plasticity.CONSTRAINED if constrained else Plasticity.UNCONSTRAINED)
