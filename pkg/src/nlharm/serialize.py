"""File formats: cochain CSV with JSON sidecar, point-field CSV, reports.

Every float is printed with 17 significant digits so that write/read
round-trips are bit-exact; artifact bytes are deterministic for identical
inputs (no timestamps, fixed row order).
"""

import csv
import json
import os

import numpy as np

from .grid import Cochain, TorusGrid
from .multivector import axes_of_mask

SCHEMA_VERSION = 1

__all__ = [
    "fmt",
    "save_cochain",
    "load_cochain",
    "save_point_field",
    "load_point_field",
    "grid_metadata",
    "check_grid_metadata",
    "write_json",
]


def fmt(v):
    """17-significant-digit decimal string; round-trips float64 exactly."""
    return format(float(v), ".17g")


def grid_metadata(grid):
    return {
        "dim": grid.dim,
        "resolution": list(grid.resolution),
        "periods": [fmt(L) for L in grid.periods],
        "metric_id": grid.metric_id,
    }


def check_grid_metadata(meta, grid):
    expect = grid_metadata(grid)
    got = {k: meta.get(k) for k in expect}
    if got != expect:
        raise ValueError(f"grid metadata mismatch: file has {got}, "
                         f"expected {expect}")


def _subset_label(mask):
    axes = axes_of_mask(mask)
    return "".join(str(a + 1) for a in axes) if axes else "-"


def write_json(path, payload):
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def save_cochain(path, cochain):
    """CSV rows (cell-index, axis-subset, value) plus a JSON sidecar."""
    grid = cochain.grid
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["cell_index", "axis_subset", "value"])
        for row, mask in enumerate(grid.subsets(cochain.degree)):
            label = _subset_label(mask)
            flat = cochain.values[row].ravel()
            for idx in range(flat.shape[0]):
                w.writerow([idx, label, fmt(flat[idx])])
    meta = grid_metadata(grid)
    meta.update({"schema_version": SCHEMA_VERSION, "kind": "cochain",
                 "degree": cochain.degree})
    write_json(path + ".meta.json", meta)


def load_cochain(path, grid):
    with open(path + ".meta.json") as f:
        meta = json.load(f)
    if meta.get("kind") != "cochain":
        raise ValueError(f"{path} is not a cochain artifact")
    check_grid_metadata(meta, grid)
    degree = int(meta["degree"])
    labels = {_subset_label(mask): row
              for row, mask in enumerate(grid.subsets(degree))}
    vals = np.zeros((len(labels),) + grid.resolution)
    flat = vals.reshape(len(labels), -1)
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        if header != ["cell_index", "axis_subset", "value"]:
            raise ValueError(f"unexpected cochain CSV header in {path}")
        for idx, label, value in r:
            flat[labels[label], int(idx)] = float(value)
    return Cochain(grid, degree, vals)


def save_point_field(path, grid, values, name="field"):
    """Per-top-cell scalar values as CSV (cell-index, value) + sidecar."""
    flat = np.asarray(values, dtype=np.float64).ravel()
    if flat.shape[0] != grid.ncells_top:
        raise ValueError("point field length does not match grid")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["cell_index", "value"])
        for idx in range(flat.shape[0]):
            w.writerow([idx, fmt(flat[idx])])
    meta = grid_metadata(grid)
    meta.update({"schema_version": SCHEMA_VERSION, "kind": "point_field",
                 "name": name})
    write_json(path + ".meta.json", meta)


def load_point_field(path, grid):
    with open(path + ".meta.json") as f:
        meta = json.load(f)
    if meta.get("kind") != "point_field":
        raise ValueError(f"{path} is not a point-field artifact")
    check_grid_metadata(meta, grid)
    out = np.zeros(grid.ncells_top)
    with open(path, newline="") as f:
        r = csv.reader(f)
        next(r)
        for idx, value in r:
            out[int(idx)] = float(value)
    return out.reshape(grid.resolution)
