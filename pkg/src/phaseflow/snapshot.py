"""Binary field snapshots (PFNS format).

Layout, all little-endian:

    magic "PFNS" | u16 version=1 | u32 nx | u32 ny | f64 lx | f64 ly
    | f64 time | u32 field_count
    | per field: u16 name_length | UTF-8 name | nx*ny f64 samples (row-major,
      x index outermost)

Round trips are lossless for float64 fields.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import Grid

MAGIC = b"PFNS"
VERSION = 1

__all__ = ["write_snapshot", "read_snapshot", "SnapshotError"]


class SnapshotError(ValueError):
    pass


def write_snapshot(path, grid: Grid, time: float, fields: dict[str, np.ndarray]) -> None:
    parts = [MAGIC, struct.pack("<HIIdd", VERSION, grid.nx, grid.ny, grid.lx, grid.ly),
             struct.pack("<dI", float(time), len(fields))]
    for name, values in fields.items():
        values = np.ascontiguousarray(values, dtype="<f8")
        if values.shape != (grid.nx, grid.ny):
            raise SnapshotError(f"field {name!r} has shape {values.shape}, "
                                f"expected ({grid.nx}, {grid.ny})")
        raw = name.encode("utf-8")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
        parts.append(values.tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_snapshot(path):
    """Return ``(grid, time, fields)`` with fields as float64 arrays."""
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise SnapshotError("bad magic; not a PFNS snapshot")
    off = 4
    version, nx, ny, lx, ly = struct.unpack_from("<HIIdd", buf, off)
    off += struct.calcsize("<HIIdd")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    time, count = struct.unpack_from("<dI", buf, off)
    off += struct.calcsize("<dI")
    grid = Grid(nx, ny, lx, ly)
    fields: dict[str, np.ndarray] = {}
    for _ in range(count):
        (nlen,) = struct.unpack_from("<H", buf, off)
        off += 2
        name = buf[off:off + nlen].decode("utf-8")
        off += nlen
        n = nx * ny
        vals = np.frombuffer(buf, dtype="<f8", count=n, offset=off).reshape(nx, ny)
        off += 8 * n
        fields[name] = vals.astype(float)
    if off != len(buf):
        raise SnapshotError("trailing bytes after last field")
    return grid, float(time), fields
