"""Writers (and a reader) for grid dumps, time series and contour rasters."""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from ..diagnostics import RunRecord
from ..grid import ConfigurationError, Field, Grid2D, make_grid

DUMP_MAGIC = "# nonlocal_balance grid dump v1"


def _num(x: float) -> str:
    # 17 significant digits: lossless for IEEE doubles
    return f"{x:.16e}"


def format_grid_dump(grid: Grid2D, field: Field, t: float) -> str:
    """Plain-text dump: header, then per component one line per grid row ``j``."""
    out = [
        DUMP_MAGIC,
        f"nx {grid.nx}",
        f"ny {grid.ny}",
        "extents " + " ".join(_num(v) for v in (grid.x_min, grid.x_max, grid.y_min, grid.y_max)),
        f"periodic {int(grid.periodic)}",
        "components " + " ".join(field.names),
        "far_field " + " ".join(_num(v) for v in field.far_field),
        f"t {_num(t)}",
    ]
    for c, name in enumerate(field.names):
        out.append(f"component {name}")
        for j in range(grid.ny):
            out.append(" ".join(_num(v) for v in field.values[c, :, j]))
    return "\n".join(out) + "\n"


def parse_grid_dump(text: str) -> tuple[Grid2D, Field, float]:
    lines = text.splitlines()
    if not lines or lines[0] != DUMP_MAGIC:
        raise ConfigurationError("not a grid dump (missing header line)")
    head = {}
    k = 1
    while k < len(lines) and not lines[k].startswith("component "):
        key, _, rest = lines[k].partition(" ")
        head[key] = rest
        k += 1
    nx, ny = int(head["nx"]), int(head["ny"])
    ext = [float(v) for v in head["extents"].split()]
    grid = make_grid(*ext, nx, ny, periodic=head["periodic"] == "1")
    names = tuple(head["components"].split())
    far = tuple(float(v) for v in head["far_field"].split())
    values = np.empty((len(names), nx, ny))
    for c, name in enumerate(names):
        if lines[k] != f"component {name}":
            raise ConfigurationError(f"grid dump: expected block for component {name}")
        rows = [np.array(lines[k + 1 + j].split(), dtype=float) for j in range(ny)]
        values[c] = np.stack(rows, axis=1)
        k += 1 + ny
    return grid, Field(values, far, names), float(head["t"])


def write_grid_dump(path: str | Path, grid: Grid2D, field: Field, t: float) -> Path:
    path = Path(path)
    path.write_text(format_grid_dump(grid, field, t))
    return path


def read_grid_dump(path: str | Path) -> tuple[Grid2D, Field, float]:
    return parse_grid_dump(Path(path).read_text())


def pgm_bytes(values: np.ndarray, clip_min: float, clip_max: float) -> bytes:
    """Binary graymap of a cell array ``(nx, ny)``, ``x2`` increasing upwards.

    Values in the clip range map linearly onto 1..255; anything below the
    range is 0 and anything above saturates at 255.
    """
    if not clip_min < clip_max:
        raise ConfigurationError(f"clip range must satisfy min < max, got [{clip_min}, {clip_max}]")
    v = np.asarray(values, dtype=float)
    nx, ny = v.shape
    scaled = 1.0 + 254.0 * (np.clip(v, clip_min, clip_max) - clip_min) / (clip_max - clip_min)
    px = np.where(v < clip_min, 0, np.rint(scaled)).astype(np.uint8)
    image = px.T[::-1]  # rows top to bottom = decreasing x2
    return f"P5\n{nx} {ny}\n255\n".encode("ascii") + image.tobytes()


def write_pgm(path: str | Path, values: np.ndarray, clip_min: float, clip_max: float) -> Path:
    path = Path(path)
    path.write_bytes(pgm_bytes(values, clip_min, clip_max))
    return path


def read_pgm(path: str | Path) -> np.ndarray:
    """Pixel array as stored (rows top to bottom)."""
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ConfigurationError(f"{path}: not a binary graymap")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def timeseries_csv(record: RunRecord) -> str:
    buf = _io.StringIO()
    cols = record.columns()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in record.rows:
        w.writerow([_cell(row.get(c, float("nan"))) for c in cols])
    return buf.getvalue()


def write_timeseries(path: str | Path, record: RunRecord) -> Path:
    path = Path(path)
    path.write_text(timeseries_csv(record))
    return path


def read_timeseries(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    return {c: np.array([float(r[k]) for r in body]) for k, c in enumerate(head)}
