"""Run every built-in system through analyze and render all figures.

    python3 scripts/reproduce_figures.py --out figures [--frames 60] [--jobs 4]

Layout: <out>/<system>/{trace.csv, phase.csv, report.json, *.svg} with the
d -10% runs under <out>/<system>/perturbed/.
"""
import argparse
import sys
from pathlib import Path

from gainmod.cli import main as gainmod

PERTURBED = {"rossler_v1", "rossler_v2"}
SYSTEMS = ("rossler_v1", "rossler_v2", "rossler_original", "fitzhugh_nagumo")


def run(args):
    code = gainmod(args)
    if code:
        sys.exit(f"gainmod {' '.join(args)} failed with exit code {code}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--frames", type=int, default=60, help="io_space animation frames")
    ap.add_argument("--jobs", type=int, default=2)
    args = ap.parse_args()
    root = Path(args.out)
    for name in SYSTEMS:
        d = root / name
        cmd = ["analyze", "--system", name, "--out", str(d), "--jobs", str(args.jobs)]
        if name in PERTURBED:
            cmd += ["--compare", "d:-0.10"]
        run(cmd)
        for fig in ("iog_views", "timeseries_gain"):
            run(["render", "--figure", fig, "--inputs", str(d)])
        run(["render", "--figure", "io_space", "--inputs", str(d), "--n-frames", "1"])
        if args.frames > 1:
            run(["render", "--figure", "io_space", "--inputs", str(d), "--out", str(d / "frames"),
                 "--n-frames", str(args.frames)])
        polar = ["render", "--figure", "polar_phase_gain", "--inputs", str(d)]
        if name in PERTURBED:
            polar += ["--perturbed", str(d / "perturbed")]
        run(polar)
    print(f"figures written under {root}")


if __name__ == "__main__":
    main()
