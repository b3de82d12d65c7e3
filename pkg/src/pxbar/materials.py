"""Optical dispersion tables for phase-change materials and partial-phase mixing.

A material table holds the complex refractive index of the amorphous and the
crystalline phase on a wavelength grid (nm). Between grid nodes the real and
imaginary parts are interpolated linearly and independently. A partially
crystallized cell is described by a volume-weighted mix of the two phase
permittivities.

CSV layout::

    # name=GST                      (optional metadata comments)
    # g_amorphous_S=1e-6
    # g_crystalline_S=1e-4
    wavelength_nm,n_amorphous,k_amorphous,n_crystalline,k_crystalline
    1500,3.94,0.045,6.11,0.83
    ...
"""

from __future__ import annotations

import bisect
import cmath
import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Literal

from .errors import DomainError, InvariantError, OutOfRange, ParseError

Phase = Literal["amorphous", "crystalline"]

CSV_HEADER = ("wavelength_nm", "n_amorphous", "k_amorphous", "n_crystalline", "k_crystalline")


@dataclass(frozen=True)
class MaterialRecord:
    """Dispersion table plus electrical endpoint conductances of one material.

    ``table`` rows are ``(wavelength_nm, n_a, k_a, n_c, k_c)``.
    """

    name: str
    table: tuple[tuple[float, float, float, float, float], ...]
    g_amorphous: float
    g_crystalline: float

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(float(v) for v in row) for row in self.table))
        validate_material(self)

    @property
    def wavelengths(self) -> tuple[float, ...]:
        return tuple(row[0] for row in self.table)

    @property
    def span(self) -> tuple[float, float]:
        return self.table[0][0], self.table[-1][0]

    @property
    def conductance_ratio(self) -> float:
        return self.g_crystalline / self.g_amorphous


def validate_material(record: MaterialRecord) -> None:
    """Raise InvariantError if ``record`` breaks any table or conductance invariant."""
    table = record.table
    if len(table) < 2:
        raise InvariantError(f"{record.name}: need at least 2 table rows, got {len(table)}")
    for i, row in enumerate(table):
        if len(row) != 5:
            raise InvariantError(f"{record.name}: row {i} has {len(row)} fields, expected 5")
        wl, n_a, k_a, n_c, k_c = row
        if not all(math.isfinite(v) for v in row):
            raise InvariantError(f"{record.name}: row {i} has a non-finite value")
        if n_a <= 0 or n_c <= 0:
            raise InvariantError(f"{record.name}: row {i} (λ={wl} nm) has n <= 0")
        if k_a < 0 or k_c < 0:
            raise InvariantError(f"{record.name}: row {i} (λ={wl} nm) has negative k")
        if i and wl <= table[i - 1][0]:
            raise InvariantError(
                f"{record.name}: wavelengths must be strictly increasing "
                f"({table[i - 1][0]} then {wl})"
            )
    if not (record.g_amorphous > 0):
        raise InvariantError(f"{record.name}: g_amorphous must be > 0")
    if not (record.g_crystalline > record.g_amorphous):
        raise InvariantError(
            f"{record.name}: need g_crystalline > g_amorphous "
            f"(got {record.g_crystalline} <= {record.g_amorphous})"
        )


def load_material(
    path: str | Path,
    g_amorphous: float | None = None,
    g_crystalline: float | None = None,
    name: str | None = None,
) -> MaterialRecord:
    """Read a material CSV.

    Conductances passed as arguments take precedence over ``# key=value``
    metadata comments in the file.

    Raises:
        ParseError: missing header, wrong field count or non-numeric field.
        InvariantError: the parsed table or conductances break an invariant.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read material file ({exc})") from exc

    meta: dict[str, str] = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        fields = next(csv.reader([stripped]))
        fields = [f.strip() for f in fields]
        if not header_seen:
            if tuple(fields) != CSV_HEADER:
                raise ParseError(f"{path}:{lineno}: expected header {','.join(CSV_HEADER)}")
            header_seen = True
            continue
        if len(fields) != 5:
            raise ParseError(f"{path}:{lineno}: expected 5 fields, got {len(fields)}")
        try:
            rows.append(tuple(float(f) for f in fields))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: non-numeric field ({exc})") from exc
    if not header_seen:
        raise ParseError(f"{path}: no header line")

    def _meta_float(key):
        if key not in meta:
            raise ParseError(f"{path}: {key} not given and not in file metadata")
        try:
            return float(meta[key])
        except ValueError as exc:
            raise ParseError(f"{path}: metadata {key} is not numeric") from exc

    if g_amorphous is None:
        g_amorphous = _meta_float("g_amorphous_S")
    if g_crystalline is None:
        g_crystalline = _meta_float("g_crystalline_S")
    name = name or meta.get("name") or path.stem
    return MaterialRecord(name, tuple(rows), float(g_amorphous), float(g_crystalline))


def builtin_material_path(name: str) -> Path:
    """Path of a material table shipped with the package (e.g. ``"GST"``)."""
    ref = resources.files("pxbar") / "data" / "materials" / f"{name}.csv"
    path = Path(str(ref))
    if not path.is_file():
        raise ParseError(f"no bundled material named {name!r}")
    return path


def lookup_nk(record: MaterialRecord, phase: Phase, wavelength_nm: float) -> complex:
    """Complex index ``n + ik`` of one phase at ``wavelength_nm``.

    Raises:
        OutOfRange: wavelength outside the table span.
    """
    if phase == "amorphous":
        cols = (1, 2)
    elif phase == "crystalline":
        cols = (3, 4)
    else:
        raise ValueError(f"unknown phase {phase!r}")
    lo, hi = record.span
    if not (lo <= wavelength_nm <= hi):
        raise OutOfRange(f"{record.name}: λ={wavelength_nm} nm outside table span [{lo}, {hi}] nm")

    wls = record.wavelengths
    i = bisect.bisect_left(wls, wavelength_nm)
    if wls[i] == wavelength_nm:
        row = record.table[i]
        return complex(row[cols[0]], row[cols[1]])
    r0, r1 = record.table[i - 1], record.table[i]
    t = (wavelength_nm - r0[0]) / (r1[0] - r0[0])
    n = (1.0 - t) * r0[cols[0]] + t * r1[cols[0]]
    k = (1.0 - t) * r0[cols[1]] + t * r1[cols[1]]
    return complex(n, k)


def mixed_permittivity(x: float, idx_a: complex, idx_c: complex) -> complex:
    """Volume-weighted permittivity of a crystalline fraction ``x``; affine in ``x``."""
    _check_fraction(x)
    eps_a = complex(idx_a) ** 2
    eps_c = complex(idx_c) ** 2
    return eps_a + x * (eps_c - eps_a)


def mixed_index(x: float, idx_a: complex, idx_c: complex) -> complex:
    """Effective complex index of a partially crystallized material.

    Mixes the two phase permittivities linearly in the crystalline fraction and
    returns the principal square root. Endpoints and the degenerate case
    ``idx_a == idx_c`` return the input index unchanged.

    Raises:
        DomainError: ``x`` outside [0, 1].
    """
    _check_fraction(x)
    idx_a, idx_c = complex(idx_a), complex(idx_c)
    if x == 0 or idx_a == idx_c:
        return idx_a
    if x == 1:
        return idx_c
    return cmath.sqrt(mixed_permittivity(x, idx_a, idx_c))


def _check_fraction(x: float) -> None:
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"crystalline fraction must be in [0, 1], got {x}")
