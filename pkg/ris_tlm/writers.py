"""
Deterministic CSV and JSON emitters.

Floats are written in fixed scientific notation with nine significant
digits so identical runs produce byte-identical files.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import json
import logging
from collections.abc import Iterable, Sequence
from functools import singledispatch
from pathlib import Path

import numpy as np

from . import const
from .models import CapacitanceMap, FieldMap, LookupTable

_LOG = logging.getLogger(__name__)


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return const.FLOAT_FORMAT.format(float(value))


def write_rows(path: Path, header: str, rows: Iterable[Sequence]) -> Path:
    """Write `header` followed by one comma-separated line per row."""
    lines = [header] if header else []
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    _LOG.info("Wrote %s", path)
    return path


def write_matrix(path: Path, matrix: np.ndarray, header: str = "") -> Path:
    return write_rows(path, header, np.atleast_2d(matrix).tolist())


@singledispatch
def write_result(result, directory: Path, stem: str) -> list[Path]:
    """Serialize a computed result under `directory`; returns the files written."""
    raise TypeError(f"no writer registered for {type(result).__name__}")


@write_result.register
def _(table: LookupTable, directory: Path, stem: str) -> list[Path]:
    rows = (
        (table.f, str(table.pol), theta, c, g.real, g.imag)
        for i, theta in enumerate(table.theta_grid)
        for c, g in zip(table.c_grid, table.gamma[i])
    )
    files = [write_rows(directory / f"{stem}.csv", const.HEADER_LOOKUP, rows)]
    # views: one row per theta, one column per capacitance
    view_header = "# theta_rad\\c_farad," + ",".join(fmt(c) for c in table.c_grid)
    for name, view in (("amplitude_db", table.amplitude_db), ("phase_deg", table.phase_deg)):
        view_rows = ([theta, *values] for theta, values in zip(table.theta_grid, view))
        files.append(write_rows(directory / f"{stem}_{name}.csv", view_header, view_rows))
    return files


@write_result.register
def _(cap_map: CapacitanceMap, directory: Path, stem: str) -> list[Path]:
    csv_path = write_matrix(directory / f"{stem}.csv", cap_map.capacitance)
    meta = {
        "scenario_digest": cap_map.scenario_digest,
        "mode": str(cap_map.mode),
        "f_hz": cap_map.f,
        "pol": str(cap_map.pol) if cap_map.pol is not None else None,
        "rows": cap_map.shape[0],
        "columns": cap_map.shape[1],
        "clamped_cells": int(np.count_nonzero(cap_map.clamped)),
    }
    json_path = directory / f"{stem}.json"
    json_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    _LOG.info("Wrote %s", json_path)
    return [csv_path, json_path]


@write_result.register
def _(fmap: FieldMap, directory: Path, stem: str) -> list[Path]:
    plane = fmap.plane
    power_db = fmap.power_db
    rows = (
        (u, v, fmap.power[i, j], power_db[i, j])
        for i, u in enumerate(plane.u)
        for j, v in enumerate(plane.v)
    )
    header = const.HEADER_FIELD_MAP.format(u=plane.u_axis, v=plane.v_axis)
    return [write_rows(directory / f"{stem}.csv", header, rows)]


def read_matrix(path: Path) -> np.ndarray:
    """Read a matrix written by write_matrix."""
    return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
