"""Readers for the sairs-lab CSV contracts."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List

import numpy as np

STATE_COLUMNS = ("S_inf", "A_inf", "I_inf", "R_inf")
TRAJECTORY_COLUMNS = ("t", "S", "A", "I", "R")


class CsvFormatError(ValueError):
    """The file does not follow the expected CSV contract."""


def _read_rows(path) -> List[Dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CsvFormatError(f"{path}: empty file, no header row")
        rows = list(reader)
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    return rows


@dataclass(frozen=True)
class SweepGrid:
    """A pivoted sweep: axis names, grid values, and per-cell quantities.

    The value grids are shaped (len(values1), len(values2)) and hold exactly
    what the heatmap panels render; regime holds the CSV's regime strings on
    the same grid.
    """

    param1: str
    param2: str
    values1: np.ndarray
    values2: np.ndarray
    grids: Dict[str, np.ndarray]
    regime: np.ndarray


def load_sweep(path) -> SweepGrid:
    """Pivot a sweep CSV (axis1, axis2, r0, regime, S_inf, ..., R_inf)."""
    rows = _read_rows(path)
    header = list(rows[0].keys())
    if len(header) < 8:
        raise CsvFormatError(f"{path}: expected 8 columns, got {header}")
    param1, param2 = header[0], header[1]
    missing = [c for c in ("r0", "regime", *STATE_COLUMNS) if c not in header]
    if missing:
        raise CsvFormatError(f"{path}: missing columns {missing}")

    v1 = np.array(sorted({float(row[param1]) for row in rows}))
    v2 = np.array(sorted({float(row[param2]) for row in rows}))
    index1 = {value: k for k, value in enumerate(v1)}
    index2 = {value: k for k, value in enumerate(v2)}
    shape = (len(v1), len(v2))
    grids = {name: np.full(shape, np.nan) for name in ("r0", *STATE_COLUMNS)}
    regime = np.full(shape, "", dtype=object)
    for row in rows:
        i = index1[float(row[param1])]
        j = index2[float(row[param2])]
        for name in grids:
            grids[name][i, j] = float(row[name])
        regime[i, j] = row["regime"]
    if any(np.isnan(grid).any() for grid in grids.values()):
        raise CsvFormatError(f"{path}: grid has holes (not a full cartesian sweep)")
    return SweepGrid(
        param1=param1, param2=param2, values1=v1, values2=v2, grids=grids, regime=regime
    )


def load_trajectory(path) -> Dict[str, np.ndarray]:
    """Read a trajectory CSV with columns t, S, A, I, R."""
    rows = _read_rows(path)
    header = list(rows[0].keys())
    missing = [c for c in TRAJECTORY_COLUMNS if c not in header]
    if missing:
        raise CsvFormatError(f"{path}: missing columns {missing}")
    out = {name: np.array([float(row[name]) for row in rows]) for name in TRAJECTORY_COLUMNS}
    if np.any(np.diff(out["t"]) <= 0.0):
        raise CsvFormatError(f"{path}: time column must be strictly increasing")
    return out


def label_from_filename(path) -> str:
    """Derive a legend label like 'gamma = 0.01' from 'gamma_0.01.csv'."""
    stem = Path(path).stem
    if "_" in stem:
        name, _, value = stem.rpartition("_")
        try:
            float(value)
        except ValueError:
            return stem
        return f"{name} = {value}"
    return stem
