"""Writers and readers for density grids, graymaps and run summaries."""
from __future__ import annotations

import configparser
import io
from pathlib import Path

import numpy as np

from .core import DensityField, GridSpec


class EmptyDensityError(ValueError):
    pass


def write_csv(d: DensityField, path) -> Path:
    """Rows ``x,z,density`` with x as the outer loop, shortest round-trip floats."""
    path = Path(path)
    x, z = d.grid.x, d.grid.z
    xx, zz = np.meshgrid(x, z, indexing="ij")
    table = np.column_stack([xx.ravel(), zz.ravel(), d.values.ravel()])
    buf = io.StringIO()
    buf.write("x,z,density\n")
    for row in table.tolist():
        buf.write(f"{row[0]!r},{row[1]!r},{row[2]!r}\n")
    path.write_text(buf.getvalue())
    return path


def read_csv(path) -> DensityField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs = np.unique(data[:, 0])
    zs = np.unique(data[:, 1])
    grid = GridSpec(float(xs[0]), float(xs[-1]), len(xs), float(zs[0]), float(zs[-1]), len(zs))
    if data.shape[0] != grid.nx * grid.nz:
        raise ValueError(f"{path}: {data.shape[0]} rows do not fill a {grid.nx}x{grid.nz} grid")
    return DensityField(grid, data[:, 2].reshape(grid.nx, grid.nz))


def to_gray(d: DensityField) -> np.ndarray:
    """8-bit image, rows = z (increasing downward), columns = x; field max maps to 255."""
    peak = float(d.values.max())
    if not peak > 0:
        raise EmptyDensityError("empty density")
    return np.rint(d.values.T / peak * 255.0).astype(np.uint8)


def write_pgm(d: DensityField, path) -> Path:
    path = Path(path)
    img = to_gray(d)
    h, w = img.shape
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    magic, dims, maxval, body = raw.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError(f"{path}: not an 8-bit P5 graymap")
    w, h = map(int, dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w)


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def write_summary(summary: dict, path) -> Path:
    """``summary`` maps section names to flat dicts; written INI-style, in insertion order."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    for section, items in summary.items():
        cp[section] = {k: _fmt(v) for k, v in items.items()}
    path = Path(path)
    with path.open("w") as fh:
        cp.write(fh)
    return path


def read_summary(path) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read(path)
    return {s: dict(cp[s]) for s in cp.sections()}
