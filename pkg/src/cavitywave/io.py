"""On-disk formats: EPF1 scalar fields, EPT1 boundary traces, PGM renders.

EPF1: one UTF-8 header line holding a JSON record
``{"format": "EPF1", "nx", "ny", "hx", "hy", "origin_x", "origin_y"}``
terminated by a newline, followed by nx*ny raw little-endian float64 values
in row-major order with y as the outer index.

EPT1: a JSON header line ``{"format": "EPT1", "nt", "dt",
"n_boundary_nodes", ...grid keys...}``, then one text line per boundary
node ``flat_index,face_id,lambda,gamma_flag`` in walk order, then
(nt+1)*n_nodes raw little-endian float64 values, time-outer.  The grid keys
(same names as EPF1) make the file self-contained for reconstruction.

Write-then-read round trips are bit-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .boundary import BoundarySpec, BoundaryTrace
from .errors import FileFormatError
from .fields import Grid2D, ScalarField, TimeAxis

__all__ = [
    "write_field",
    "read_field",
    "write_trace",
    "read_trace",
    "write_pgm",
    "write_csv",
    "read_header",
]

_GRID_KEYS = ("nx", "ny", "hx", "hy", "origin_x", "origin_y")


def _grid_record(grid: Grid2D) -> dict:
    return {
        "nx": grid.nx,
        "ny": grid.ny,
        "hx": grid.hx,
        "hy": grid.hy,
        "origin_x": grid.origin[0],
        "origin_y": grid.origin[1],
    }


def _grid_from_record(rec: dict) -> Grid2D:
    try:
        return Grid2D(
            nx=int(rec["nx"]),
            ny=int(rec["ny"]),
            hx=float(rec["hx"]),
            hy=float(rec["hy"]),
            origin=(float(rec["origin_x"]), float(rec["origin_y"])),
        )
    except (KeyError, ValueError) as exc:
        raise FileFormatError(f"bad grid record in header: {exc}") from exc


def _read_json_line(fh) -> dict:
    line = fh.readline()
    if not line.endswith(b"\n"):
        raise FileFormatError("missing newline-terminated header line")
    try:
        rec = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"header is not a JSON record: {exc}") from exc
    if not isinstance(rec, dict):
        raise FileFormatError("header record must be a JSON object")
    return rec


def write_field(path: str | Path, field: ScalarField) -> None:
    rec = {"format": "EPF1", **_grid_record(field.grid)}
    with open(path, "wb") as fh:
        fh.write((json.dumps(rec) + "\n").encode("utf-8"))
        fh.write(field.values.astype("<f8").tobytes())


def read_field(path: str | Path) -> ScalarField:
    with open(path, "rb") as fh:
        rec = _read_json_line(fh)
        if rec.get("format") != "EPF1":
            raise FileFormatError(f"expected EPF1 file, found format {rec.get('format')!r}")
        grid = _grid_from_record(rec)
        raw = fh.read()
    want = grid.n_nodes * 8
    if len(raw) != want:
        raise FileFormatError(f"field payload has {len(raw)} bytes, expected {want}")
    values = np.frombuffer(raw, dtype="<f8").reshape(grid.shape)
    return ScalarField(grid, values)


def write_trace(path: str | Path, trace: BoundaryTrace) -> None:
    bnd = trace.boundary
    rec = {
        "format": "EPT1",
        "nt": trace.times.nt,
        "dt": trace.times.dt,
        "n_boundary_nodes": bnd.n_nodes,
        **_grid_record(bnd.grid),
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(rec) + "\n").encode("utf-8"))
        for flat, face, lam, gam in zip(bnd.flat_indices, bnd.faces, bnd.lam, bnd.gamma):
            fh.write(f"{flat},{face},{lam!r},{int(gam)}\n".encode("utf-8"))
        fh.write(trace.values.astype("<f8").tobytes())


def read_trace(path: str | Path) -> BoundaryTrace:
    with open(path, "rb") as fh:
        rec = _read_json_line(fh)
        if rec.get("format") != "EPT1":
            raise FileFormatError(f"expected EPT1 file, found format {rec.get('format')!r}")
        grid = _grid_from_record(rec)
        try:
            nt = int(rec["nt"])
            dt = float(rec["dt"])
            n_nodes = int(rec["n_boundary_nodes"])
        except (KeyError, ValueError) as exc:
            raise FileFormatError(f"bad EPT1 header: {exc}") from exc

        lam = np.empty(n_nodes)
        gamma = np.empty(n_nodes, dtype=bool)
        flats = np.empty(n_nodes, dtype=int)
        faces = np.empty(n_nodes, dtype=int)
        for k in range(n_nodes):
            line = fh.readline().decode("utf-8").strip()
            parts = line.split(",")
            if len(parts) != 4:
                raise FileFormatError(f"bad node-table row {k}: {line!r}")
            flats[k], faces[k] = int(parts[0]), int(parts[1])
            lam[k], gamma[k] = float(parts[2]), bool(int(parts[3]))
        raw = fh.read()

    bnd = BoundarySpec(grid, lam, gamma)
    if not np.array_equal(flats, bnd.flat_indices) or not np.array_equal(faces, bnd.faces):
        raise FileFormatError("node table does not match the canonical boundary walk")
    times = TimeAxis(dt=dt, nt=nt)
    want = times.n_levels * n_nodes * 8
    if len(raw) != want:
        raise FileFormatError(f"trace payload has {len(raw)} bytes, expected {want}")
    values = np.frombuffer(raw, dtype="<f8").reshape(times.n_levels, n_nodes)
    return BoundaryTrace(bnd, times, values)


def read_header(path: str | Path) -> dict:
    """Header record of either format, for inspection."""
    with open(path, "rb") as fh:
        rec = _read_json_line(fh)
    if rec.get("format") not in ("EPF1", "EPT1"):
        raise FileFormatError(f"unknown format {rec.get('format')!r}")
    return rec


def write_pgm(path: str | Path, values: np.ndarray) -> None:
    """8-bit binary PGM with linear min-max scaling; top row = largest y."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError("PGM rendering needs a 2-D array")
    lo, hi = float(arr.min()), float(arr.max())
    if hi > lo:
        scaled = np.round((arr - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(arr)
    img = scaled.astype(np.uint8)[::-1, :]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def write_csv(path_or_handle, header: list[str], rows) -> None:
    """Comma-separated values with a header row; floats via shortest repr."""

    def fmt(x) -> str:
        if isinstance(x, float):
            return repr(x)
        return str(x)

    def emit(fh):
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")

    if hasattr(path_or_handle, "write"):
        emit(path_or_handle)
    else:
        with open(path_or_handle, "w", encoding="utf-8") as fh:
            emit(fh)
