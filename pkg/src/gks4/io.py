"""Field, time-series and checkpoint files.

Binary layouts are little-endian float64, component-major, x varying
fastest: the interior array indexed ``[component, k, j, i]`` in C order.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .grid import Field3D, GridSpec
from .kinetics import GasModel, pressure

CHECKPOINT_MAGIC = b"GKS4CKPT"
CHECKPOINT_VERSION = 1
# magic, version, nx, ny, nz, lo[3], hi[3], time, step, seed
_HEADER = struct.Struct("<8sI3Q3d3ddQQ")


def _xfastest(a):
    """(…, X, Y, Z) -> (…, Z, Y, X) so that C order runs along x first."""
    return np.ascontiguousarray(np.swapaxes(a, -1, -3))


def _fmt(v):
    return repr(float(v))


def write_vtk(fld: Field3D, path, gas: GasModel):
    """Legacy VTK structured points, ASCII, with density, pressure and velocity at cell centres."""
    grid = fld.grid
    q = fld.interior
    rho = q[0]
    vel = q[1:4] / rho
    p = pressure(q, gas)
    nx, ny, nz = grid.shape
    origin = [grid.lo[a] + 0.5 * grid.spacing[a] for a in range(3)]
    lines = [
        "# vtk DataFile Version 3.0",
        f"gks4 field t={_fmt(fld.time)}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {nx} {ny} {nz}",
        "ORIGIN " + " ".join(_fmt(v) for v in origin),
        "SPACING " + " ".join(_fmt(v) for v in grid.spacing),
        f"POINT_DATA {nx * ny * nz}",
    ]
    for name, data in (("density", rho), ("pressure", p)):
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [_fmt(v) for v in _xfastest(data).ravel()]
    lines.append("VECTORS velocity double")
    v = _xfastest(vel).reshape(3, -1)
    lines += [f"{_fmt(a)} {_fmt(b)} {_fmt(c)}" for a, b, c in zip(*v)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_raw(fld: Field3D, path):
    """Interior conserved field only, no header."""
    Path(path).write_bytes(_xfastest(fld.interior).astype("<f8").tobytes())


def read_raw(path, grid: GridSpec, time: float = 0.0) -> Field3D:
    nx, ny, nz = grid.shape
    data = np.frombuffer(Path(path).read_bytes(), dtype="<f8")
    if data.size != 5 * nx * ny * nz:
        raise ValueError(f"{path}: expected {5 * nx * ny * nz} values, found {data.size}")
    interior = np.swapaxes(data.reshape(5, nz, ny, nx), -1, -3)
    return Field3D.from_interior(grid, interior, time)


def write_field(fld: Field3D, path, fmt: str, gas: GasModel):
    if fmt == "vtk":
        write_vtk(fld, path, gas)
    elif fmt == "raw":
        write_raw(fld, path)
    else:
        raise ValueError(f"unknown field format {fmt!r}")


def write_csv(rows, path):
    """Rows are dicts sharing the same keys; floats written with full precision."""
    rows = list(rows)
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()})


def write_table(table, header, path):
    """2D array with named columns as CSV."""
    write_csv([dict(zip(header, map(float, row))) for row in np.asarray(table)], path)


def write_checkpoint(fld: Field3D, path, step: int, seed: int = 0):
    g = fld.grid
    head = _HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, *g.shape, *g.lo, *g.hi,
                        fld.time, int(step), int(seed))
    tmp = Path(str(path) + ".tmp")
    tmp.write_bytes(head + _xfastest(fld.interior).astype("<f8").tobytes())
    tmp.replace(path)


def read_checkpoint(path):
    """Returns (field, step, seed)."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated checkpoint")
    magic, version, nx, ny, nz, *rest = _HEADER.unpack_from(blob)
    if magic != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a gks4 checkpoint")
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    lo, hi, (time, step, seed) = rest[0:3], rest[3:6], rest[6:9]
    grid = GridSpec((nx, ny, nz), tuple(lo), tuple(hi))
    data = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    if data.size != 5 * nx * ny * nz:
        raise ValueError(f"{path}: field size does not match header")
    interior = np.swapaxes(data.reshape(5, nz, ny, nx), -1, -3)
    return Field3D.from_interior(grid, interior, time), int(step), int(seed)
