"""Readers for the harness dataset contract.

Field CSVs carry a `# l=<side> t=<time> model=<name>` header followed by
`side` rows of `side` comma-separated values (row = second angle index,
column = first angle index). Tabular CSVs carry a plain column-name
header. All parse failures raise ParseError with file and line context.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ParseError(ValueError):
    pass


def _fail(path, lineno, msg):
    raise ParseError(f"{path}:{lineno}: {msg}")


def _lines(path: Path) -> list[str]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return text.splitlines()


@dataclass(frozen=True)
class Field:
    grid: np.ndarray   # (side, side)
    side: int
    t: float
    model: str


_HEADER = re.compile(r"#\s*l=(\d+)\s+t=(\S+)\s+model=(\S+)\s*$")


def read_field(path) -> Field:
    path = Path(path)
    lines = _lines(path)
    if not lines:
        _fail(path, 1, "empty file")
    m = _HEADER.match(lines[0])
    if not m:
        _fail(path, 1, f"bad field header {lines[0]!r}")
    side = int(m.group(1))
    try:
        t = float(m.group(2))
    except ValueError:
        _fail(path, 1, f"bad time {m.group(2)!r}")
    if len(lines) != side + 1:
        _fail(path, len(lines), f"expected {side} data rows, found {len(lines) - 1}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != side:
            _fail(path, i, f"expected {side} values, found {len(parts)}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            _fail(path, i, str(exc))
    return Field(grid=np.array(rows), side=side, t=t, model=m.group(3))


def _read_table(path, columns: tuple[str, ...]) -> np.ndarray:
    path = Path(path)
    lines = _lines(path)
    if not lines:
        _fail(path, 1, "empty file")
    header = tuple(h.strip() for h in lines[0].split(","))
    if header != columns:
        _fail(path, 1, f"expected columns {','.join(columns)}, found {lines[0]!r}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(columns):
            _fail(path, i, f"expected {len(columns)} values, found {len(parts)}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            _fail(path, i, str(exc))
    if not rows:
        _fail(path, 2, "no data rows")
    return np.array(rows)


def read_spectrum(path) -> np.ndarray:
    """Columns index, omega, dirichlet_energy."""
    return _read_table(path, ("index", "omega", "dirichlet_energy"))


def read_vectorfield(path) -> np.ndarray:
    """Columns theta1, theta2, v1, v2."""
    return _read_table(path, ("theta1", "theta2", "v1", "v2"))


def read_convergence(path) -> np.ndarray:
    """Columns eps, n, tau, max_error."""
    return _read_table(path, ("eps", "n", "tau", "max_error"))
