"""SVG figures built from analysis artifacts (trace.csv, report.json)."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .dsl.calculus import evaluate_array
from .modulation import frames_from_trace
from .svg import Canvas, Panel, PolarPanel

FIGURES = ("io_space", "iog_views", "timeseries_gain", "polar_phase_gain")


def _window(tr, period, n_periods=3):
    if period and np.isfinite(period):
        return slice(0, min(len(tr), int(round(n_periods * period / tr.dt)) + 1))
    return slice(0, len(tr))


def io_space(tr, term, params, out_dir, n_frames=1, period=None):
    """Sigmoid at x(τ), the modulation envelope, the cycle and the tangent."""
    out_dir = Path(out_dir)
    frames = frames_from_trace(tr, term, n_frames, params)
    grid = frames[0].input_grid
    envelope = [evaluate_array(term.expr, {**params, term.input_var: grid,
                                           term.modulator_var: np.full_like(grid, m)})
                for m in np.quantile(tr.modulator, np.linspace(0, 1, 9))]
    lo = min(min(e.min() for e in envelope), tr.output.min())
    hi = max(max(e.max() for e in envelope), tr.output.max())
    paths = []
    for k, fr in enumerate(frames):
        cv = Canvas(520, 440)
        p = Panel(cv, 70, 40, 420, 340, (grid[0], grid[-1]), (lo, hi),
                  xlabel=f"input {term.input_var}", ylabel="output",
                  title=f"I/O space, t = {fr.time:.2f}")
        for e in envelope:
            p.line(grid, e, color="#000", width=0.8, opacity=0.15)
        p.line(grid, fr.curve, color="#000", width=1.6)
        p.line(tr.input, tr.output, color="#d62728", width=1.2)
        z0, o0 = fr.point
        half = 0.12 * (grid[-1] - grid[0])
        p.line([z0 - half, z0 + half], [o0 - fr.slope * half, o0 + fr.slope * half],
               color="#2ca02c", width=1.6)
        p.marker(z0, o0, color="#d62728", r=5)
        name = "io_space.svg" if n_frames == 1 else f"io_space_{k:03d}.svg"
        cv.save(out_dir / name)
        paths.append(out_dir / name)
    return paths


def iog_views(tr, out_dir, title=""):
    cv = Canvas(1260, 420)
    axes = (("input", tr.input), ("output", tr.output), ("gain", tr.gain))
    pairs = ((0, 1), (0, 2), (1, 2))
    for k, (i, j) in enumerate(pairs):
        (xn, xv), (yn, yv) = axes[i], axes[j]
        p = Panel(cv, 70 + k * 410, 50, 330, 300, (xv.min(), xv.max()), (yv.min(), yv.max()),
                  xlabel=xn, ylabel=yn, title=f"{xn} vs {yn}")
        p.line(xv, yv, color="#d62728", width=1.0)
    if title:
        cv.text(630, 20, title, size=14)
    path = Path(out_dir) / "iog_views.svg"
    cv.save(path)
    return [path]


def timeseries_gain(tr, report, out_dir):
    period = report.get("period")
    w = _window(tr, period)
    t, o, g = tr.times[w], tr.output[w], tr.gain[w]
    cv = Canvas(900, 380)
    p = Panel(cv, 70, 40, 780, 280, (t[0], t[-1]), (o.min(), o.max()),
              xlabel="time", ylabel="output", title="output with gain colour-coded")
    p.colored_line(t, o, g, float(tr.gain.min()), float(tr.gain.max()))
    ext = report.get("extrema", {})
    idx = [i for i in ext.get("indices", []) if w.start <= i < w.stop]
    kinds = dict(zip(ext.get("indices", []), ext.get("kinds", [])))
    for i in idx:
        p.marker(tr.times[i], tr.output[i], color="#d62728" if kinds[i] == "max" else "#1f77b4",
                 r=3.5, label=kinds[i])
    labels = ext.get("pair_labels", [])
    for (i, j, d) in labels:
        if w.start <= i and j < w.stop:
            mid = 0.5 * (tr.times[i] + tr.times[j])
            cv.text(float(p.px(mid)), 354, f"{d / np.pi:.2f}π", size=10)
    path = Path(out_dir) / "timeseries_gain.svg"
    cv.save(path)
    return [path]


def polar_phase_gain(report, out_dir, perturbed=None):
    sym = report["symmetry"]
    n = sym["n_bins"]
    angles = -np.pi + (np.arange(n) + 0.5) * 2 * np.pi / n
    cv = Canvas(520, 520)
    pol = PolarPanel(cv, 260, 280, 190, title="normalised gain vs output phase")
    closed = np.r_[angles, angles[:1]]
    base = np.asarray(sym["binned_gain"])
    pol.curve(closed, np.r_[base, base[:1]], color="#000", width=1.6)
    if perturbed is not None:
        pb = np.asarray(perturbed["symmetry"]["binned_gain"])
        pol.curve(closed, np.r_[pb, pb[:1]], color="#d62728", width=1.4, dash="6,3",
                  dash_negative="1,3")
    cv.text(260, 505, f"symmetry score {sym['score']:.3f}"
            + (f" / perturbed {perturbed['symmetry']['score']:.3f}" if perturbed else ""),
            size=11)
    path = Path(out_dir) / "polar_phase_gain.svg"
    cv.save(path)
    return [path]
