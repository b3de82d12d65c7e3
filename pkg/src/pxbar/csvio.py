"""CSV helpers: 12-significant-digit writers with a provenance comment, and
tolerant numeric readers that report schema problems with line numbers."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SchemaError


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence], digest: str, seed: int) -> str:
    buf = io.StringIO()
    buf.write(f"# config_sha256={digest} seed={seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path, header, rows, digest: str, seed: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(header, rows, digest, seed))
    return path


def _data_lines(path: Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc})") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s and not s.startswith("#"):
            yield lineno, [f.strip() for f in s.split(",")]


def read_table(path: Path) -> tuple[list[str] | None, list[tuple[int, list[str]]]]:
    """Split a CSV into an optional non-numeric header and data lines (with line numbers)."""
    header = None
    rows = []
    for lineno, fields in _data_lines(path):
        if header is None and not rows:
            try:
                [float(f) for f in fields]
            except ValueError:
                header = fields
                continue
        rows.append((lineno, fields))
    return header, rows


def read_matrix(path: Path) -> np.ndarray:
    header, rows = read_table(path)
    if not rows:
        raise SchemaError(f"{path}: no numeric rows")
    width = len(rows[0][1])
    out = []
    for lineno, fields in rows:
        if len(fields) != width:
            raise SchemaError(f"{path}:{lineno}: expected {width} columns, got {len(fields)}")
        try:
            out.append([float(f) for f in fields])
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: non-numeric value ({exc})") from exc
    return np.array(out, dtype=float)


def read_vector(path: Path) -> np.ndarray:
    """A vector stored as one column or as one row."""
    m = read_matrix(path)
    if m.shape[0] != 1 and m.shape[1] != 1:
        raise SchemaError(f"{path}: expected a single row or column, got shape {m.shape}")
    return m.ravel()


def read_samples(path: Path) -> tuple[np.ndarray, np.ndarray | None]:
    """Feature matrix and optional integer labels from a CSV with a ``label`` column."""
    header, rows = read_table(path)
    if not rows:
        raise SchemaError(f"{path}: no samples")
    label_col = header.index("label") if header and "label" in header else None
    feats, labels = [], []
    for lineno, fields in rows:
        if header and len(fields) != len(header):
            raise SchemaError(f"{path}:{lineno}: expected {len(header)} columns, got {len(fields)}")
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: non-numeric value ({exc})") from exc
        if label_col is not None:
            labels.append(int(values.pop(label_col)))
        feats.append(values)
    widths = {len(f) for f in feats}
    if len(widths) != 1:
        raise SchemaError(f"{path}: rows have differing feature counts {sorted(widths)}")
    return np.array(feats), (np.array(labels, dtype=int) if label_col is not None else None)
