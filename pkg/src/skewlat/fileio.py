"""Plain-text lattice, relation and skew files; grid specs; CSV output.

Matrix files hold one matrix row per line with whitespace-separated
entries; decimals and rationals ``p/q`` are accepted. Blank lines and
anything after ``#`` are ignored.

Skew files give ``n`` on the first line, then the ``n`` diagonal entries,
then the ``n(n-1)/2`` strict upper entries in row-major order. After the
first line, line breaks are free.
"""

from __future__ import annotations

import io
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputFileError, LatticeError
from .lattice import Lattice, SkewingSpec

FLOAT_FORMAT = "{:.17g}"


def _tokens(path) -> list[tuple[int, list[str]]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputFileError(path, 0, f"cannot read file ({exc.strerror})") from None
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    return rows


def parse_number(token: str) -> Fraction:
    """Exact value of a decimal or ``p/q`` token."""
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {token!r}") from None
    return value


def _matrix(path, integer: bool) -> np.ndarray:
    rows = _tokens(path)
    if not rows:
        raise InputFileError(path, 0, "file contains no matrix rows")
    width = len(rows[0][1])
    out = []
    for lineno, toks in rows:
        if len(toks) != width:
            raise InputFileError(path, lineno, f"expected {width} entries, found {len(toks)}")
        row = []
        for tok in toks:
            try:
                v = parse_number(tok)
            except ValueError as exc:
                raise InputFileError(path, lineno, str(exc)) from None
            if integer and v.denominator != 1:
                raise InputFileError(path, lineno, f"relation entries must be integers, got {tok!r}")
            row.append(int(v) if integer else float(v))
        out.append(row)
    if len(out) != width:
        raise InputFileError(path, rows[-1][0], f"matrix is {len(out)}x{width}, expected square")
    return np.array(out, dtype=np.int64 if integer else float)


def read_lattice(path, tol: float | None = None) -> Lattice:
    m = _matrix(path, integer=False)
    try:
        return Lattice(m) if tol is None else Lattice(m, tol)
    except LatticeError as exc:
        raise InputFileError(path, 0, str(exc)) from None


def read_relation(path) -> np.ndarray:
    return _matrix(path, integer=True)


def read_skew(path) -> SkewingSpec:
    rows = _tokens(path)
    if not rows:
        raise InputFileError(path, 0, "empty skew file")
    lineno, first = rows[0]
    if len(first) != 1 or not first[0].isdigit() or int(first[0]) < 1:
        raise InputFileError(path, lineno, "first line must be the dimension n")
    n = int(first[0])
    values = []
    for lineno, toks in rows[1:]:
        for tok in toks:
            try:
                values.append((lineno, float(parse_number(tok))))
            except ValueError as exc:
                raise InputFileError(path, lineno, str(exc)) from None
    need = n + n * (n - 1) // 2
    if len(values) != need:
        where = values[-1][0] if values else lineno
        raise InputFileError(path, where, f"expected {need} entries after n={n}, found {len(values)}")
    diag = [v for _, v in values[:n]]
    for lineno, v in values[:n]:
        if not v > 0:
            raise InputFileError(path, lineno, f"diagonal entry {v} is not positive")
    return SkewingSpec(tuple(diag), tuple(v for _, v in values[n:]))


def format_matrix(m) -> str:
    return "".join(" ".join(FLOAT_FORMAT.format(float(v)) for v in row) + "\n" for row in np.atleast_2d(m))


def parse_grid(spec: str) -> list[float]:
    """``min:max:count:linear|log``, a comma list, or a single value."""
    if ":" not in spec:
        try:
            values = [float(s) for s in spec.split(",") if s.strip()]
        except ValueError:
            raise ValueError(f"bad grid {spec!r}") from None
        if not values or any(not v > 0 for v in values):
            raise ValueError(f"grid values must be positive: {spec!r}")
        return values
    parts = spec.split(":")
    if len(parts) == 3:
        parts.append("linear")
    if len(parts) != 4:
        raise ValueError(f"grid must look like min:max:count:linear|log, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"bad grid {spec!r}") from None
    kind = parts[3].lower()
    if count < 1:
        raise ValueError("grid count must be at least 1")
    if not (lo > 0 and hi >= lo):
        raise ValueError("grid needs 0 < min <= max")
    if kind not in ("linear", "log"):
        raise ValueError(f"grid spacing must be linear or log, got {parts[3]!r}")
    if count == 1:
        return [lo]
    if kind == "log":
        return [float(v) for v in np.geomspace(lo, hi, count)]
    return [float(v) for v in np.linspace(lo, hi, count)]


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return FLOAT_FORMAT.format(v)
    return str(getattr(v, "value", v))


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    lines = text.rstrip("\n").split("\n")
    return lines[0].split(","), [line.split(",") for line in lines[1:]]
