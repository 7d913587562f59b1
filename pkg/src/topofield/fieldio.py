"""Field and diagram file formats.

Three field formats:
  csv-grid  rows of comma-separated decimals, one grid row per line
  raw-f32   12-byte header of three little-endian uint32 (H, W, C),
            then H*W*C little-endian float32, row-major
  pgm8      binary PGM (P5), 8-bit, mapped to [0, 1] by maxval

Diagram files are CSV with the header
  dim,birth,death,birth_i,birth_j,death_i,death_j,essential,persistence
one pair per row in diagram order.  Floats are written with 17
significant digits so numeric round-trips are exact.
"""

import struct
from pathlib import Path

import numpy as np

from .errors import FieldFormatError
from .persistence import PersistenceDiagram

__all__ = ["read_field", "write_field", "detect_format", "write_diagram", "read_diagram", "fmt_float"]

_CSV_EXT = {".csv", ".txt"}
_PGM_EXT = {".pgm"}
_RAW_EXT = {".raw", ".f32", ".bin", ".dat"}


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def detect_format(path) -> str:
    """Pick a format from the extension, falling back to content sniffing."""
    p = Path(path)
    ext = p.suffix.lower()
    if ext in _CSV_EXT:
        return "csv-grid"
    if ext in _PGM_EXT:
        return "pgm8"
    if ext in _RAW_EXT:
        return "raw-f32"
    if p.exists():
        head = p.open("rb").read(2)
        if head == b"P5":
            return "pgm8"
        if head and not head[:1].isdigit() and head[:1] not in b"-+. \t":
            return "raw-f32"
        return "csv-grid"
    return "raw-f32"


def _read_csv_grid(path) -> np.ndarray:
    rows = []
    try:
        with open(path, "r", encoding="ascii") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rows.append([float(tok) for tok in line.split(",")])
                except ValueError as exc:
                    raise FieldFormatError(f"{path}: bad number on line {line_no}: {exc}") from None
    except UnicodeDecodeError:
        raise FieldFormatError(f"{path}: not a text csv-grid file") from None
    if not rows:
        raise FieldFormatError(f"{path}: empty csv-grid file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FieldFormatError(f"{path}: ragged csv-grid rows")
    return np.array(rows, dtype=np.float64)


def _write_csv_grid(path, arr: np.ndarray) -> None:
    if arr.ndim != 2:
        raise FieldFormatError("csv-grid holds a single channel; write raw-f32 for C > 1")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in arr:
            fh.write(",".join(fmt_float(x) for x in row))
            fh.write("\n")


def _read_raw_f32(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if len(blob) < 12:
        raise FieldFormatError(f"{path}: raw-f32 header truncated")
    h, w, c = struct.unpack("<III", blob[:12])
    if h < 1 or w < 1 or c < 1:
        raise FieldFormatError(f"{path}: raw-f32 header has zero dimension ({h}, {w}, {c})")
    expected = 12 + 4 * h * w * c
    if len(blob) != expected:
        raise FieldFormatError(f"{path}: raw-f32 payload is {len(blob)} bytes, expected {expected}")
    data = np.frombuffer(blob, dtype="<f4", offset=12).astype(np.float64)
    arr = data.reshape(h, w, c)
    return arr[:, :, 0] if c == 1 else arr


def _write_raw_f32(path, arr: np.ndarray) -> None:
    if arr.ndim == 2:
        arr = arr[:, :, None]
    h, w, c = arr.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack("<III", h, w, c))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def _read_pgm8(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if blob[:2] != b"P5":
        raise FieldFormatError(f"{path}: not a binary PGM (P5) file")
    pos, fields = 2, []
    while len(fields) < 3:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FieldFormatError(f"{path}: truncated PGM header")
        try:
            fields.append(int(blob[start:pos]))
        except ValueError:
            raise FieldFormatError(f"{path}: bad PGM header token {blob[start:pos]!r}") from None
    pos += 1  # single whitespace after maxval
    w, h, maxval = fields
    if not (0 < maxval <= 255):
        raise FieldFormatError(f"{path}: pgm8 requires maxval in 1..255, got {maxval}")
    if w < 1 or h < 1:
        raise FieldFormatError(f"{path}: bad PGM dimensions {w}x{h}")
    if len(blob) - pos != w * h:
        raise FieldFormatError(f"{path}: PGM payload is {len(blob) - pos} bytes, expected {w * h}")
    data = np.frombuffer(blob, dtype=np.uint8, offset=pos).reshape(h, w)
    return data.astype(np.float64) / maxval


def _write_pgm8(path, arr: np.ndarray) -> None:
    if arr.ndim != 2:
        raise FieldFormatError("pgm8 holds a single channel")
    clipped = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    h, w = clipped.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(clipped.tobytes())


_READERS = {"csv-grid": _read_csv_grid, "raw-f32": _read_raw_f32, "pgm8": _read_pgm8}
_WRITERS = {"csv-grid": _write_csv_grid, "raw-f32": _write_raw_f32, "pgm8": _write_pgm8}


def read_field(paths, fmt: str | None = None) -> np.ndarray:
    """Read one field file, or stack several single-channel files as channels."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    channels = []
    for path in paths:
        if not Path(path).exists():
            raise FieldFormatError(f"{path}: no such file")
        kind = fmt or detect_format(path)
        channels.append(_READERS[kind](path))
    if len(channels) == 1:
        return channels[0]
    planes = []
    for path, ch in zip(paths, channels):
        if ch.ndim == 3:
            raise FieldFormatError(f"{path}: per-channel inputs must be single-channel")
        planes.append(ch)
    if len({p.shape for p in planes}) != 1:
        raise FieldFormatError("channel files decode to inconsistent shapes")
    return np.stack(planes, axis=2)


def write_field(path, arr, fmt: str | None = None) -> None:
    kind = fmt or detect_format(path)
    _WRITERS[kind](path, np.asarray(arr, dtype=np.float64))


DIAGRAM_HEADER = "dim,birth,death,birth_i,birth_j,death_i,death_j,essential,persistence"


def write_diagram(path, dgm: PersistenceDiagram) -> None:
    """Write a diagram CSV; rows keep the diagram's deterministic order."""
    width = dgm.shape.width
    lines = [DIAGRAM_HEADER]
    for p in dgm.pairs:
        bi, bj = divmod(p.birth_vertex, width)
        di, dj = divmod(p.death_vertex, width)
        lines.append(
            f"{p.dim},{fmt_float(p.birth)},{fmt_float(p.death)},{bi},{bj},{di},{dj},"
            f"{int(p.essential)},{fmt_float(p.persistence)}"
        )
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def read_diagram(path) -> list[dict]:
    """Read a diagram CSV back as a list of row dicts (numeric fields parsed)."""
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != DIAGRAM_HEADER:
        raise FieldFormatError(f"{path}: missing diagram header")
    names = DIAGRAM_HEADER.split(",")
    int_fields = {"dim", "birth_i", "birth_j", "death_i", "death_j", "essential"}
    rows = []
    for ln in lines[1:]:
        toks = ln.split(",")
        if len(toks) != len(names):
            raise FieldFormatError(f"{path}: bad diagram row {ln!r}")
        rows.append(
            {n: (int(t) if n in int_fields else float(t)) for n, t in zip(names, toks)}
        )
    return rows
