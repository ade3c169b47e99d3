"""CSV and JSON artifacts. Numbers are written with 17 significant digits so
they read back bit-exactly."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .modulation import ModulationTrace
from .ode import Trajectory

TRACE_COLUMNS = ("time", "input", "modulator", "output", "gain")
PHASE_COLUMNS = ("time", "phase", "unwrapped", "amplitude")


def write_csv(path, header, columns):
    cols = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*(c.tolist() for c in cols)):
            fh.write(",".join("%.17g" % v for v in row))
            fh.write("\n")


def read_csv(path):
    """Return (header, 2-D array). Raises ConfigError on missing or empty files."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"missing artifact {path}")
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        if header == [""]:
            raise ConfigError(f"{path} is empty")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        raise ConfigError(f"{path} has no data rows")
    if data.shape[1] != len(header):
        raise ConfigError(f"{path}: {data.shape[1]} columns but {len(header)} header fields")
    return header, data


def write_trajectory(path, traj: Trajectory):
    write_csv(path, ("time",) + tuple(traj.state_vars),
              [traj.times] + [traj.states[:, i] for i in range(traj.states.shape[1])])


def read_trajectory(path) -> Trajectory:
    header, data = read_csv(path)
    if header[0] != "time" or len(data) < 2:
        raise ConfigError(f"{path} is not a trajectory file")
    return Trajectory(data[:, 0], data[:, 1:], float(data[1, 0] - data[0, 0]), tuple(header[1:]))


def write_trace(path, tr: ModulationTrace):
    write_csv(path, TRACE_COLUMNS, [tr.times, tr.input, tr.modulator, tr.output, tr.gain])


def read_trace(path) -> ModulationTrace:
    header, data = read_csv(path)
    if tuple(header) != TRACE_COLUMNS:
        raise ConfigError(f"{path} header must be {','.join(TRACE_COLUMNS)}")
    if len(data) < 3:
        raise ConfigError(f"{path} has too few rows")
    return ModulationTrace(*(data[:, i].copy() for i in range(5)))


def write_phase(path, ph):
    write_csv(path, PHASE_COLUMNS, [ph.times, ph.phase, ph.unwrapped, ph.amplitude])


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")


def read_json(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"missing artifact {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from None
