"""Plain-text serialization: model checkpoints, field samples, metric tables.

Floats are written with 17 significant digits so every file round-trips to
the exact same binary values.
"""

import csv
from pathlib import Path

import numpy as np

from .harmonics import HarmonicModel
from .model import PointNeuronModel
from .room import FieldSamples

F = "{:.17g}"


def _fmt(*vals) -> str:
    return " ".join(F.format(float(v)) for v in vals)


def save_point_neuron(model: PointNeuronModel, path) -> None:
    lines = ["point_neuron_checkpoint 1",
             f"k {F.format(model.k)}",
             f"V {model.n_neurons}"]
    for w, b in zip(model.weights, model.biases):
        lines.append(_fmt(w.real, w.imag, b[0], b[1], b[2]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_point_neuron(path) -> PointNeuronModel:
    lines = Path(path).read_text().splitlines()
    if lines[0].split() != ["point_neuron_checkpoint", "1"]:
        raise ValueError(f"not a point neuron checkpoint: {path}")
    k = float(lines[1].split()[1])
    n = int(lines[2].split()[1])
    rows = np.array([[float(v) for v in line.split()] for line in lines[3:3 + n]])
    return PointNeuronModel(k, rows[:, 0] + 1j * rows[:, 1], rows[:, 2:5])


def save_harmonic(model: HarmonicModel, path) -> None:
    lines = ["harmonic_checkpoint 1",
             f"k {F.format(model.k)}",
             "center " + _fmt(*model.center),
             f"N {model.order}"]
    for c in model.coefficients:
        lines.append(_fmt(c.real, c.imag))
    Path(path).write_text("\n".join(lines) + "\n")


def load_harmonic(path) -> HarmonicModel:
    lines = Path(path).read_text().splitlines()
    if lines[0].split() != ["harmonic_checkpoint", "1"]:
        raise ValueError(f"not a harmonic checkpoint: {path}")
    k = float(lines[1].split()[1])
    center = [float(v) for v in lines[2].split()[1:4]]
    order = int(lines[3].split()[1])
    rows = np.array([[float(v) for v in line.split()] for line in lines[4:4 + 2 * order + 1]])
    return HarmonicModel(k, center, order, rows[:, 0] + 1j * rows[:, 1])


def save_field(samples: FieldSamples, path) -> None:
    lines = ["field_samples 1",
             f"k {F.format(samples.k)}",
             f"M {samples.positions.shape[0]}"]
    for p, v in zip(samples.positions, samples.pressures):
        lines.append(_fmt(p[0], p[1], p[2], v.real, v.imag))
    Path(path).write_text("\n".join(lines) + "\n")


def load_field(path) -> FieldSamples:
    lines = Path(path).read_text().splitlines()
    if lines[0].split() != ["field_samples", "1"]:
        raise ValueError(f"not a field samples file: {path}")
    k = float(lines[1].split()[1])
    m = int(lines[2].split()[1])
    rows = np.array([[float(v) for v in line.split()] for line in lines[3:3 + m]])
    return FieldSamples(k, rows[:, 0:3], rows[:, 3] + 1j * rows[:, 4])


METRICS_COLUMNS = ["method", "frequency_hz", "placement", "Q", "snr_db", "seed", "nmse_db", "mac"]


def write_metrics_csv(rows: list, path) -> None:
    """rows: dicts with the METRICS_COLUMNS keys; written sorted for reproducibility."""
    def key(r):
        return (r["method"], float(r["frequency_hz"]), r["placement"],
                int(r["Q"]), str(r["snr_db"]), int(r["seed"]))
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRICS_COLUMNS)
        writer.writeheader()
        for row in sorted(rows, key=key):
            out = dict(row)
            out["nmse_db"] = "{:.10g}".format(float(row["nmse_db"]))
            out["mac"] = "{:.10g}".format(float(row["mac"]))
            writer.writerow(out)


def save_nse_map(positions: np.ndarray, nse_db: np.ndarray, path) -> None:
    """x y nse_db per line (z is constant over a planar map and omitted)."""
    lines = ["nse_map 1", f"M {positions.shape[0]}"]
    for p, v in zip(positions, nse_db):
        val = "nan" if np.isnan(v) else F.format(float(v))
        lines.append(f"{F.format(p[0])} {F.format(p[1])} {val}")
    Path(path).write_text("\n".join(lines) + "\n")
