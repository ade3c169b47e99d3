import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from gainmod.cli import main
from gainmod.systems import BUILTIN_NAMES, builtin_source

SHORT = ["--t-end", "400"]


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("gainmod").joinpath("schemas/report.schema.json").read_text())


@pytest.fixture(scope="module")
def v1_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("v1")
    assert main(["analyze", "--system", "rossler_v1", "--compare", "d:-0.10", "--out", str(out),
                 "--outputs", "trajectory,trace,phase"]) == 0
    return out


def _files(d):
    return {p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_simulate_writes_csv_and_manifest(tmp_path):
    assert main(["simulate", "--system", "rossler_v1", "--out", str(tmp_path)] + SHORT) == 0
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "time,x,y,z"
    data = np.loadtxt(tmp_path / "trajectory.csv", delimiter=",", skiprows=1)
    assert np.allclose(np.diff(data[:, 0]), 0.01)
    manifest = json.loads((tmp_path / "run_manifest.json").read_text())
    assert manifest["system"]["name"] == "rossler_v1"
    assert "timestamp" not in json.dumps(manifest)


def test_simulate_records_perturbation(tmp_path):
    assert main(["simulate", "--system", "rossler_v2", "--perturb", "d:-0.10",
                 "--out", str(tmp_path)] + SHORT) == 0
    manifest = json.loads((tmp_path / "run_manifest.json").read_text())
    assert manifest["system"]["params"]["d"] == pytest.approx(0.99)
    assert manifest["perturbation"] == {"param": "d", "relative_change": -0.1}


def test_unknown_system_exit_2(tmp_path, capsys):
    assert main(["simulate", "--system", "lorenz", "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert all(name in err for name in BUILTIN_NAMES)


@pytest.mark.parametrize("flag", ["d", "d:x", "q:0.1"])
def test_bad_perturbation_exit_2(tmp_path, flag):
    assert main(["simulate", "--perturb", flag, "--out", str(tmp_path)] + SHORT) == 2


def test_divergence_exit_3(tmp_path, capsys):
    path = tmp_path / "blowup.sys"
    path.write_text("system blowup\nvar x : x^2\ninit x = 1\n")
    assert main(["simulate", "--def", str(path), "--dt", "0.001", "--t-end", "5",
                 "--out", str(tmp_path)]) == 3
    assert "t=" in capsys.readouterr().err


def test_fixed_point_exit_4(tmp_path):
    src = builtin_source("rossler_v1").replace("-y + z", "-y - z").replace("a*x - b*y", "a*x + b*y")
    path = tmp_path / "still.sys"
    path.write_text(src)
    assert main(["analyze", "--def", str(path), "--out", str(tmp_path / "o")] + SHORT) == 4


def test_missing_term_exit_2(tmp_path):
    path = tmp_path / "osc.sys"
    path.write_text("system osc\nvar x : y\nvar y : -x\n")
    assert main(["analyze", "--def", str(path), "--out", str(tmp_path / "o")] + SHORT) == 2


def test_analyze_v1_report(v1_run, schema):
    rep = json.loads((v1_run / "report.json").read_text())
    jsonschema.validate(rep, schema)
    assert rep["manifold"]["verdict"] == "CollapsedOnOutput"
    assert rep["classification"]["class"] == "LinearInputModulation"
    assert rep["plasticity"]["classification"] == "Constrained"
    assert (v1_run / "trace.csv").read_text().splitlines()[0] == "time,input,modulator,output,gain"
    assert (v1_run / "phase.csv").exists()
    jsonschema.validate(json.loads((v1_run / "perturbed" / "report.json").read_text()), schema)


@pytest.mark.parametrize("name, verdict, cls", [
    ("fitzhugh_nagumo", "CollapsedOnInput", "LinearOutputModulation"),
    ("rossler_original", "ThreeDimensional", "GainModulation"),
])
def test_analyze_builtins(tmp_path, schema, name, verdict, cls):
    assert main(["analyze", "--system", name, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    jsonschema.validate(rep, schema)
    assert (rep["manifold"]["verdict"], rep["classification"]["class"]) == (verdict, cls)


def test_analyze_is_byte_identical(tmp_path):
    args = ["analyze", "--system", "rossler_v2", "--seed", "5"] + SHORT
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    a, b = _files(tmp_path / "a"), _files(tmp_path / "b")
    assert a.keys() == b.keys() and a == b


def test_parallel_compare_matches_serial(tmp_path):
    args = ["analyze", "--system", "rossler_v1", "--compare", "d:-0.10"] + SHORT
    assert main(args + ["--out", str(tmp_path / "s")]) == 0
    assert main(args + ["--jobs", "2", "--out", str(tmp_path / "p")]) == 0
    assert _files(tmp_path / "s") == _files(tmp_path / "p")


@pytest.mark.parametrize("term, cls", [("tanh(x+z)", "LinearInputModulation"),
                                       ("x*z", "GainModulation")])
def test_classify(tmp_path, capsys, term, cls):
    path = tmp_path / "t.sys"
    path.write_text(f"system t\nvar x : -x\nvar z : -z + {term}\nterm {term} input z modulator x\n")
    assert main(["classify", str(path)]) == 0
    (row,) = json.loads(capsys.readouterr().out)
    assert row["class"] == cls


def test_classify_syntax_error(tmp_path, capsys):
    path = tmp_path / "bad.sys"
    path.write_text("system t\nvar x : -x\nvar z : -z\nterm tanh(x +* z) input z modulator x\n")
    assert main(["classify", str(path)]) == 2
    err = capsys.readouterr().err
    assert "line 4" in err
    src_line, caret = err.strip().splitlines()[-2:]
    assert src_line.startswith("term tanh") and caret.strip() == "^"
    assert src_line[caret.index("^")] == "*"


def test_render_figures(v1_run, tmp_path):
    for fig in ("iog_views", "timeseries_gain"):
        assert main(["render", "--figure", fig, "--inputs", str(v1_run), "--out", str(tmp_path)]) == 0
        assert (tmp_path / f"{fig}.svg").read_text().startswith("<svg")
    assert main(["render", "--figure", "polar_phase_gain", "--inputs", str(v1_run),
                 "--perturbed", str(v1_run / "perturbed"), "--out", str(tmp_path)]) == 0
    polar = (tmp_path / "polar_phase_gain.svg").read_text()
    assert "stroke-dasharray" in polar


def test_render_io_space_frames(v1_run, tmp_path):
    assert main(["render", "--figure", "io_space", "--n-frames", "60", "--inputs", str(v1_run),
                 "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("io_space_*.svg"))) == 60


def test_render_missing_artifacts(tmp_path):
    assert main(["render", "--figure", "iog_views", "--inputs", str(tmp_path / "none")]) == 2


def test_render_empty_trace(v1_run, tmp_path):
    (tmp_path / "report.json").write_bytes((v1_run / "report.json").read_bytes())
    (tmp_path / "trace.csv").write_text("")
    assert main(["render", "--figure", "timeseries_gain", "--inputs", str(tmp_path)]) == 2


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "gainmod.cli", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0
    assert all(c in proc.stdout for c in ("simulate", "analyze", "classify", "render"))
