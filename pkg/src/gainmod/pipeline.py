"""End-to-end analysis of one system: integrate, trace, phase, symmetry, manifold."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import __version__
from .dsl.classify import TermClassification, classify_term
from .manifold import CollapseReport, classify_manifold
from .modulation import ModulationTrace, trace
from .ode import IntegratorConfig, Trajectory, integrate
from .phase import (PhaseSeries, SymmetryReport, analytic_phase, gain_extrema, symmetry_score)

PAIRING = "same_kind"


@dataclass
class Analysis:
    system: object
    config: IntegratorConfig
    trajectory: Trajectory
    trace: ModulationTrace
    phase: PhaseSeries
    phase_source: str
    extrema: list
    symmetry: SymmetryReport
    manifold: CollapseReport
    classification: TermClassification
    seed: int = 0


def trajectory_box(traj, term):
    x = traj.column(term.modulator_var)
    z = traj.column(term.input_var)
    return ((float(x.min()), float(x.max())), (float(z.min()), float(z.max())))


def analyze(system, config: IntegratorConfig = IntegratorConfig(), seed: int = 0,
            phase_source: str = "output", initial=None) -> Analysis:
    traj = integrate(system, initial, config)
    tr = trace(traj, system)
    signal = tr.output if phase_source == "output" else traj.column(phase_source)
    ph = analytic_phase(signal, traj.dt, tr.times)
    lo, hi = ph.interior.start, ph.interior.stop
    extrema = [(i, k) for i, k in gain_extrema(tr) if lo <= i < hi]
    sym = symmetry_score(tr, ph, pairing=PAIRING)
    man = classify_manifold(tr)
    cls = classify_term(system.term, system.params, box=trajectory_box(traj, system.term),
                        seed=seed)
    return Analysis(system, config, traj, tr, ph, phase_source, extrema, sym, man, cls, seed)


def _pair_labels(extrema, phase):
    out = []
    for kind in ("max", "min"):
        same = [i for i, k in extrema if k == kind]
        for i, j in zip(same, same[1:]):
            d = float(np.mod(phase.unwrapped[j] - phase.unwrapped[i], 2 * np.pi)) or 2 * np.pi
            out.append([int(i), int(j), d])
    out.sort()
    return out


def system_summary(system):
    term = system.term
    return {
        "name": system.name,
        "state_vars": list(system.state_vars),
        "params": dict(system.params),
        "rhs": [str(e) for e in system.rhs],
        "initial": list(system.initial),
        "term": {"expr": str(term.expr), "input": term.input_var,
                 "modulator": term.modulator_var} if term else None,
    }


def integrator_summary(config: IntegratorConfig):
    return {
        "method": config.method.value,
        "dt": config.dt,
        "t_end": config.t_end,
        "transient_fraction": config.transient_fraction,
        "abs_tol": config.abs_tol,
        "rel_tol": config.rel_tol,
    }


def report(an: Analysis) -> dict:
    diffs = list(an.symmetry.extrema_phase_diffs)
    return {
        "schema": "gainmod.report/1",
        "code_version": __version__,
        "system": system_summary(an.system),
        "integrator": integrator_summary(an.config),
        "seed": an.seed,
        "phase_source": an.phase_source,
        "period": an.phase.period,
        "classification": an.classification.to_dict(),
        "manifold": an.manifold.to_dict(),
        "symmetry": an.symmetry.to_dict(),
        "extrema": {
            "pairing": PAIRING,
            "indices": [i for i, _ in an.extrema],
            "kinds": [k for _, k in an.extrema],
            "phase_diffs": diffs,
            "pair_labels": _pair_labels(an.extrema, an.phase),
            "max_abs_deviation_from_pi": (max(abs(d - np.pi) for d in diffs) if diffs else None),
        },
    }
