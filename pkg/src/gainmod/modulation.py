"""Input / output / instantaneous-gain coordinates along a trajectory."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsl.calculus import differentiate, evaluate, evaluate_array
from .errors import MissingTerm, NoPeriod
from .ode import signal_period

GRID_POINTS = 401
GRID_WIDENING = 0.20
FD_STEP = 1e-5


@dataclass(frozen=True)
class ModulationTrace:
    times: np.ndarray
    input: np.ndarray
    modulator: np.ndarray
    output: np.ndarray
    gain: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if any(len(a) != n for a in (self.input, self.modulator, self.output, self.gain)):
            raise ValueError("all trace columns must have the same length")

    def __len__(self):
        return len(self.times)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def subsample(self, step: int) -> "ModulationTrace":
        return ModulationTrace(*(a[::step] for a in
                                 (self.times, self.input, self.modulator, self.output, self.gain)))


@dataclass(frozen=True)
class Frame:
    time: float
    modulator: float
    input_grid: np.ndarray
    curve: np.ndarray
    point: tuple
    slope: float


def _term(system, term=None):
    term = term if term is not None else system.term
    if term is None:
        raise MissingTerm(f"system {system.name!r} declares no nonlinear term")
    return term


def trace(traj, system, term=None) -> ModulationTrace:
    """Evaluate the term and its symbolic gain ∂f/∂input at every sample."""
    term = _term(system, term)
    bind = dict(system.params)
    bind.update({v: traj.column(v) for v in traj.state_vars})
    gain_expr = differentiate(term.expr, term.input_var)
    return ModulationTrace(
        times=np.asarray(traj.times),
        input=traj.column(term.input_var).copy(),
        modulator=traj.column(term.modulator_var).copy(),
        output=evaluate_array(term.expr, bind),
        gain=evaluate_array(gain_expr, bind),
    )


def gain_fd(term, x: float, z: float, h: float = FD_STEP, params=None) -> float:
    """Central difference of the term along its input variable."""
    if not h > 0:
        raise ValueError("h must be positive")
    bind = dict(params or {})
    bind[term.modulator_var] = x
    up = evaluate(term.expr, {**bind, term.input_var: z + h})
    down = evaluate(term.expr, {**bind, term.input_var: z - h})
    return (up - down) / (2.0 * h)


def input_grid(values, n: int = GRID_POINTS) -> np.ndarray:
    lo, hi = float(np.min(values)), float(np.max(values))
    pad = 0.5 * GRID_WIDENING * (hi - lo) if hi > lo else 1.0
    return np.linspace(lo - pad, hi + pad, n)


def frames_from_trace(tr: ModulationTrace, term, n_frames: int, params=None,
                      span_one_period: bool = True) -> list:
    """I/O curve snapshots: f(x(τ), ·) over a fixed input grid, the state point
    (z(τ), O(τ)) on it and the tangent slope G(τ).

    Frames are spread evenly over one oscillation period when one can be
    detected, otherwise over the whole trace.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be at least 1")
    n = len(tr)
    stop = n - 1
    if span_one_period and n_frames > 1:
        try:
            stop = min(n - 1, int(round(signal_period(tr.output, tr.dt) / tr.dt)))
        except NoPeriod:
            pass
    if n_frames == 1:
        idx = [0]
    else:
        end = stop if stop == n - 1 else stop * (n_frames - 1) / n_frames
        idx = np.round(np.linspace(0, end, n_frames)).astype(int)
    grid = input_grid(tr.input)
    base = dict(params or {})
    frames = []
    for i in idx:
        bind = {**base, term.input_var: grid, term.modulator_var: np.full_like(grid, tr.modulator[i])}
        frames.append(Frame(
            time=float(tr.times[i]),
            modulator=float(tr.modulator[i]),
            input_grid=grid,
            curve=evaluate_array(term.expr, bind),
            point=(float(tr.input[i]), float(tr.output[i])),
            slope=float(tr.gain[i]),
        ))
    return frames


def io_space_frames(traj, system, n_frames: int) -> list:
    term = _term(system)
    return frames_from_trace(trace(traj, system, term), term, n_frames, system.params)
