"""On-disk formats: raw field files, PGM previews, CSV series.

Raw field file: one 64-byte text header line

    FCHF1 m=<m> L=<L> time=<t>

space-padded to 63 characters plus a newline, followed by m*m little-endian
8-byte floats in row-major order with the x index i varying fastest.  Floats
in headers and CSV are written with shortest round-trip repr, so identical
runs produce identical bytes.

PGM preview: binary (P5) 8-bit grayscale, linearly scaled between the field
minimum and maximum; image rows run from large y to small y.  The scaling
bounds land in a `<name>.pgm.txt` sidecar (`flat=1` marks a constant field,
rendered mid-gray).

Series CSV header (fixed):

    step,time,energy,energy_convex,energy_concave,mass,psd_iters,residual
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..grid import CellField, GridSpec

__all__ = [
    "SERIES_HEADER",
    "write_field_raw",
    "read_field_raw",
    "write_pgm",
    "write_snapshot",
    "write_series",
    "read_series",
]

RAW_MAGIC = "FCHF1"
HEADER_BYTES = 64
SERIES_HEADER = "step,time,energy,energy_convex,energy_concave,mass,psd_iters,residual"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_field_raw(path, phi: CellField, time: float) -> None:
    path = Path(path)
    header = f"{RAW_MAGIC} m={phi.grid.m} L={_fmt(phi.grid.L)} time={_fmt(time)}"
    if len(header) > HEADER_BYTES - 1:
        raise ValueError(f"raw header too long: {header!r}")
    try:
        with open(path, "wb") as fh:
            fh.write(header.ljust(HEADER_BYTES - 1).encode("ascii") + b"\n")
            fh.write(np.ascontiguousarray(phi.values, dtype="<f8").tobytes(order="F"))
    except OSError as exc:
        raise OSError(f"cannot write raw field {path}: {exc}") from exc


def read_field_raw(path) -> tuple[CellField, float]:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read raw field {path}: {exc}") from exc
    header = blob[:HEADER_BYTES].decode("ascii")
    tokens = header.split()
    if not tokens or tokens[0] != RAW_MAGIC:
        raise ValueError(f"{path}: not a raw field file (bad magic)")
    kv = dict(tok.split("=", 1) for tok in tokens[1:])
    m = int(kv["m"])
    grid = GridSpec(m, float(kv["L"]))
    data = np.frombuffer(blob[HEADER_BYTES:], dtype="<f8", count=m * m)
    values = data.reshape((m, m), order="F").copy()
    return CellField(grid, values), float(kv["time"])


def write_pgm(path, phi: CellField) -> None:
    """8-bit PGM with linear min/max scaling plus a `.txt` sidecar."""
    path = Path(path)
    lo = float(phi.values.min())
    hi = float(phi.values.max())
    flat = hi == lo
    if flat:
        pix = np.full((phi.grid.m, phi.grid.m), 128, dtype=np.uint8)
    else:
        scaled = np.rint((phi.values - lo) * (255.0 / (hi - lo)))
        pix = np.clip(scaled, 0, 255).astype(np.uint8)
    # image row k shows the y = (m - k - 1/2) h line, left-to-right in x
    img = pix.T[::-1, :]
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{phi.grid.m} {phi.grid.m}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
        sidecar = path.with_name(path.name + ".txt")
        sidecar.write_text(f"min={_fmt(lo)}\nmax={_fmt(hi)}\nflat={int(flat)}\n")
    except OSError as exc:
        raise OSError(f"cannot write PGM {path}: {exc}") from exc


def write_snapshot(phi: CellField, path_base, time: float) -> None:
    """Write the raw field plus the PGM preview pair under one basename."""
    base = Path(path_base)
    write_field_raw(base.with_name(base.name + ".bin"), phi, time)
    write_pgm(base.with_name(base.name + ".pgm"), phi)


def write_series(rows: Iterable, path) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(SERIES_HEADER + "\n")
            for r in rows:
                fh.write(
                    f"{r.step},{_fmt(r.time)},{_fmt(r.energy)},{_fmt(r.energy_convex)},"
                    f"{_fmt(r.energy_concave)},{_fmt(r.mass)},{r.psd_iters},{_fmt(r.residual)}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write series {path}: {exc}") from exc


def read_series(path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != SERIES_HEADER:
        raise ValueError(f"{path}: unexpected series header")
    cols = SERIES_HEADER.split(",")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(cols, parts))
        out.append(
            {
                "step": int(row["step"]),
                "time": float(row["time"]),
                "energy": float(row["energy"]),
                "energy_convex": float(row["energy_convex"]),
                "energy_concave": float(row["energy_concave"]),
                "mass": float(row["mass"]),
                "psd_iters": int(row["psd_iters"]),
                "residual": float(row["residual"]),
            }
        )
    return out
