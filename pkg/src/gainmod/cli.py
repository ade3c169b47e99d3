"""Command-line entry point: simulate, analyze, classify, render.

Exit codes: 0 ok, 2 configuration or parse error, 3 numeric failure,
4 signal not oscillatory.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__, figures
from .dsl.classify import classify_term
from .dsl import NonlinearTermDef, parse, parse_definition
from .errors import ConfigError, DslSyntaxError, NotOscillatory, NumericError
from .io import (read_json, read_trace, write_json, write_phase, write_trace, write_trajectory)
from .ode import IntegratorConfig, Method, integrate
from .phase import phase_plasticity_report, SymmetryReport
from .pipeline import analyze, integrator_summary, report, system_summary
from .systems import BUILTIN_NAMES, builtin, perturb

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_NOT_OSCILLATORY = 0, 2, 3, 4
OUTPUTS = ("trajectory", "trace", "phase", "symmetry", "manifold", "frames")
METHODS = {"rk4": Method.RK4, "dp45": Method.DP45}


@dataclass
class RunConfig:
    system: str = "rossler_v1"
    definition: Optional[str] = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    outputs: tuple = ("trace", "phase", "symmetry", "manifold")
    output_dir: Path = Path("out")
    seed: int = 0
    perturbation: Optional[tuple] = None
    compare: Optional[tuple] = None
    phase_source: str = "output"
    n_frames: int = 60
    jobs: int = 1

    def resolve_system(self):
        if self.definition:
            path = Path(self.definition)
            if not path.is_file():
                raise ConfigError(f"definition file {path} not found")
            system = parse_definition(path.read_text(encoding="ascii"), default_name=path.stem)
        else:
            system = builtin(self.system)
        if self.perturbation:
            system = perturb(system, *self.perturbation)
        return system

    def manifest(self, command, system):
        return {
            "command": command,
            "code_version": __version__,
            "system": system_summary(system),
            "definition": system.to_text(),
            "integrator": integrator_summary(self.integrator),
            "perturbation": ({"param": self.perturbation[0], "relative_change": self.perturbation[1]}
                             if self.perturbation else None),
            "compare": ({"param": self.compare[0], "relative_change": self.compare[1]}
                        if self.compare else None),
            "seed": self.seed,
            "phase_source": self.phase_source,
            "outputs": list(self.outputs),
        }


def parse_perturbation(text):
    try:
        name, value = text.split(":", 1)
        return name.strip(), float(value)
    except ValueError:
        raise ConfigError(f"perturbation must look like PARAM:REL (e.g. d:-0.10), got {text!r}") \
            from None


def _outdir(path):
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from None
    return path


def cmd_simulate(cfg: RunConfig) -> int:
    system = cfg.resolve_system()
    out = _outdir(cfg.output_dir)
    traj = integrate(system, config=cfg.integrator)
    write_trajectory(out / "trajectory.csv", traj)
    write_json(out / "run_manifest.json", cfg.manifest("simulate", system))
    print(f"wrote {len(traj)} samples to {out / 'trajectory.csv'}")
    return EXIT_OK


def _analyze_one(system, cfg: RunConfig, out: Path):
    an = analyze(system, cfg.integrator, cfg.seed, cfg.phase_source)
    out = _outdir(out)
    if "trajectory" in cfg.outputs:
        write_trajectory(out / "trajectory.csv", an.trajectory)
    write_trace(out / "trace.csv", an.trace)
    if "phase" in cfg.outputs:
        write_phase(out / "phase.csv", an.phase)
    rep = report(an)
    if "frames" in cfg.outputs:
        from .modulation import frames_from_trace
        frames = frames_from_trace(an.trace, system.term, cfg.n_frames, system.params)
        write_json(out / "frames.json", [{
            "time": f.time, "modulator": f.modulator, "point": list(f.point), "slope": f.slope,
            "input_grid": f.input_grid.tolist(), "curve": f.curve.tolist()} for f in frames])
    return rep


def cmd_analyze(cfg: RunConfig) -> int:
    system = cfg.resolve_system()
    out = _outdir(cfg.output_dir)
    runs = [(system, out)]
    if cfg.compare:
        runs.append((perturb(system, *cfg.compare), out / "perturbed"))
    if cfg.jobs > 1 and len(runs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_analyze_one, [s for s, _ in runs], [cfg] * len(runs),
                                    [o for _, o in runs]))
    else:
        reports = [_analyze_one(s, cfg, o) for s, o in runs]
    base = reports[0]
    if cfg.compare:
        pert = reports[1]
        plast = phase_plasticity_report(_sym(base), _sym(pert))
        base["plasticity"] = {"param": cfg.compare[0], "relative_change": cfg.compare[1],
                              **plast.to_dict()}
        write_json(out / "perturbed" / "report.json", pert)
    write_json(out / "report.json", base)
    write_json(out / "run_manifest.json", cfg.manifest("analyze", system))
    m, c = base["manifold"], base["classification"]
    print(f"{system.name}: {c['class']} (predicted dim {c['predicted_dim']}), "
          f"manifold {m['verdict']}, symmetry score {base['symmetry']['score']:.4f}")
    return EXIT_OK


def _sym(rep) -> SymmetryReport:
    s = rep["symmetry"]
    return SymmetryReport(s["score"], s["axis_phase"], tuple(s["extrema_phase_diffs"]),
                          tuple(s["binned_gain"]), s["n_bins"])


def cmd_classify(path, seed: int = 0) -> int:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"definition file {path} not found")
    system = parse_definition(path.read_text(encoding="ascii"), default_name=path.stem)
    if not system.terms:
        raise ConfigError(f"{path} declares no term")
    rows = []
    for t in system.terms:
        c = classify_term(t, system.params, seed=seed)
        rows.append({"term": str(t.expr), "input": t.input_var, "modulator": t.modulator_var,
                     **c.to_dict()})
    print(json.dumps(rows, indent=2))
    return EXIT_OK


def cmd_render(inputs, figure, out_dir, perturbed=None, n_frames=1) -> int:
    inputs = Path(inputs)
    out = _outdir(out_dir)
    rep = read_json(inputs / "report.json")
    if figure == "polar_phase_gain":
        pert = read_json(Path(perturbed) / "report.json") if perturbed else None
        paths = figures.polar_phase_gain(rep, out, pert)
    else:
        tr = read_trace(inputs / "trace.csv")
        if figure == "io_space":
            term, params = _term_from_report(rep)
            paths = figures.io_space(tr, term, params, out, n_frames)
        elif figure == "iog_views":
            paths = figures.iog_views(tr, out, rep["system"]["name"])
        elif figure == "timeseries_gain":
            paths = figures.timeseries_gain(tr, rep, out)
        else:
            raise ConfigError(f"unknown figure {figure!r}; choose from {', '.join(figures.FIGURES)}")
    print(f"wrote {len(paths)} SVG file(s) to {out}")
    return EXIT_OK


def _term_from_report(rep):
    s = rep["system"]
    t = s.get("term")
    if not t:
        raise ConfigError("report.json has no term")
    return NonlinearTermDef(parse(t["expr"]), t["input"], t["modulator"]), dict(s["params"])


def build_parser():
    p = argparse.ArgumentParser(prog="gainmod", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def run_flags(sp):
        sp.add_argument("--system", default="rossler_v1",
                        help=f"built-in system ({', '.join(BUILTIN_NAMES)})")
        sp.add_argument("--def", dest="definition", help="path to a system definition file")
        sp.add_argument("--perturb", help="PARAM:REL, e.g. d:-0.10")
        sp.add_argument("--dt", type=float, default=0.01)
        sp.add_argument("--t-end", type=float, default=2000.0)
        sp.add_argument("--transient", type=float, default=0.5)
        sp.add_argument("--method", choices=sorted(METHODS), default="rk4")
        sp.add_argument("--out", default="out")
        sp.add_argument("--seed", type=int, default=0)

    sim = sub.add_parser("simulate", help="integrate and write trajectory.csv")
    run_flags(sim)

    ana = sub.add_parser("analyze", help="full modulation-phase-space analysis")
    run_flags(ana)
    ana.add_argument("--compare", help="also analyse PARAM:REL and report phase plasticity")
    ana.add_argument("--phase-source", default="output",
                     help="'output' or a state variable whose phase is used")
    ana.add_argument("--outputs", default="trace,phase,symmetry,manifold",
                     help=f"comma list from {','.join(OUTPUTS)}")
    ana.add_argument("--n-frames", type=int, default=60)
    ana.add_argument("--jobs", type=int, default=1)

    cls = sub.add_parser("classify", help="static modulation class of each term in a file")
    cls.add_argument("path")
    cls.add_argument("--seed", type=int, default=0)

    ren = sub.add_parser("render", help="SVG figures from analysis artifacts")
    ren.add_argument("--figure", required=True, choices=figures.FIGURES)
    ren.add_argument("--inputs", default="out", help="directory holding trace.csv/report.json")
    ren.add_argument("--perturbed", help="directory of the perturbed analysis (polar figure)")
    ren.add_argument("--n-frames", type=int, default=1)
    ren.add_argument("--out", default=None, help="output directory (default: --inputs)")
    return p


def _run_config(args) -> RunConfig:
    if args.definition and args.system != "rossler_v1":
        raise ConfigError("give either --system or --def, not both")
    outputs = tuple(o.strip() for o in getattr(args, "outputs", "trajectory").split(",") if o.strip())
    bad = set(outputs) - set(OUTPUTS)
    if bad:
        raise ConfigError(f"unknown output(s) {sorted(bad)}; choose from {', '.join(OUTPUTS)}")
    integ = IntegratorConfig(method=METHODS[args.method], dt=args.dt, t_end=args.t_end,
                             transient_fraction=args.transient)
    return RunConfig(
        system=args.system,
        definition=args.definition,
        integrator=integ,
        outputs=outputs,
        output_dir=Path(args.out),
        seed=args.seed,
        perturbation=parse_perturbation(args.perturb) if args.perturb else None,
        compare=parse_perturbation(args.compare) if getattr(args, "compare", None) else None,
        phase_source=getattr(args, "phase_source", "output"),
        n_frames=getattr(args, "n_frames", 60),
        jobs=getattr(args, "jobs", 1),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(_run_config(args))
        if args.command == "analyze":
            return cmd_analyze(_run_config(args))
        if args.command == "classify":
            return cmd_classify(args.path, args.seed)
        return cmd_render(args.inputs, args.figure, args.out or args.inputs, args.perturbed,
                          args.n_frames)
    except DslSyntaxError as exc:
        print(f"error: {exc}\n{exc.caret()}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotOscillatory as exc:
        print(f"error: signal is not oscillatory: {exc}", file=sys.stderr)
        return EXIT_NOT_OSCILLATORY
    except NumericError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
