"""Derive the symmetry thresholds once and freeze them in tests/fixtures/thresholds.json.

The thresholds themselves are fixed by hand (0.05 / 0.15) after looking at
the scores this run prints; the fixture records the run so later changes to
the pipeline show up as regressions.

    python3 scripts/derive_thresholds.py [--write]
"""
import argparse
import json
from pathlib import Path

from gainmod import __version__
from gainmod.ode import IntegratorConfig
from gainmod.phase import ASYMMETRIC_THRESHOLD, AXIS_DRIFT_BINS, SYMMETRIC_THRESHOLD
from gainmod.pipeline import analyze, integrator_summary
from gainmod.systems import builtin, perturb

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "thresholds.json"
RUNS = [("rossler_v1", None), ("rossler_v1", ("d", -0.10)),
        ("rossler_v2", None), ("rossler_v2", ("d", -0.10))]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--write", action="store_true", help="overwrite the fixture")
    args = ap.parse_args()
    config = IntegratorConfig()
    runs = []
    for name, pert in RUNS:
        system = builtin(name) if pert is None else perturb(builtin(name), *pert)
        an = analyze(system, config)
        diffs = an.symmetry.extrema_phase_diffs
        runs.append({
            "system": name,
            "perturbation": list(pert) if pert else None,
            "score": round(an.symmetry.score, 6),
            "axis_phase": round(an.symmetry.axis_phase, 6),
            "period": round(an.phase.period, 6),
            "max_abs_deviation_from_pi": round(max(abs(d - 3.141592653589793) for d in diffs), 6),
        })
        print(f"{name:12s} {str(pert):16s} score={an.symmetry.score:.4f} "
              f"axis={an.symmetry.axis_phase:+.4f} period={an.phase.period:.4f}")
    fixture = {
        "symmetric_threshold": SYMMETRIC_THRESHOLD,
        "asymmetric_threshold": ASYMMETRIC_THRESHOLD,
        "axis_drift_bins": AXIS_DRIFT_BINS,
        "anchor_tolerance": 1e-3,
        "derivation": {"code_version": __version__, "integrator": integrator_summary(config),
                       "runs": runs},
    }
    if args.write:
        FIXTURE.write_text(json.dumps(fixture, indent=2) + "\n")
        print(f"wrote {FIXTURE}")
    else:
        print(json.dumps(fixture, indent=2))


if __name__ == "__main__":
    main()
