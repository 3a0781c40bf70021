"""POSCAR-dialect structure text.

Layout::

    comment
    scale                 (negative: target cell volume in A^3)
    a1x a1y a1z
    a2x a2y a2z
    a3x a3y a3z
    B N                   species names, one per block
    2 2                   counts per block
    [Selective dynamics]  optional, ignored
    Direct | Cartesian
    x y z [...]           one row per site
"""

from __future__ import annotations

import numpy as np

from ..core import Crystal, Lattice
from ..errors import CountMismatch, DefectKitError, ParseError


def format_float(x: float) -> str:
    """Shortest repr that parses back to the identical double."""
    return repr(float(x))


class _Lines:
    def __init__(self, text: str, start: int = 0):
        self.lines = text.splitlines()
        self.pos = start

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.lines):
            raise ParseError(f"unexpected end of input, expected {what}", self.pos + 1, 0)
        self.pos += 1
        return self.pos, self.lines[self.pos - 1]


def _tokens(line: str):
    """Split on whitespace and report the 1-based column of each token."""
    out = []
    i, n = 0, len(line)
    while i < n:
        while i < n and line[i].isspace():
            i += 1
        if i >= n:
            break
        j = i
        while j < n and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def parse_float(token: str, lineno: int, column: int) -> float:
    # float() is locale independent; reject the non-numeric spellings it accepts
    if token.lower().lstrip("+-") in ("nan", "inf", "infinity") or "_" in token:
        raise ParseError(f"non-finite or malformed number {token!r}", lineno, column)
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", lineno, column) from None


def parse_int(token: str, lineno: int, column: int) -> int:
    try:
        if not token.lstrip("+-").isdigit():
            raise ValueError
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno, column) from None


def _floats(lineno: int, line: str, count: int, what: str) -> list[float]:
    toks = _tokens(line)
    if len(toks) < count:
        col = len(line) + 1 if line else 0
        raise ParseError(f"expected {count} numbers for {what}, found {len(toks)}", lineno, col)
    return [parse_float(t, lineno, c) for c, t in toks[:count]]


def read_structure_block(reader: _Lines) -> Crystal:
    reader.next("comment line")
    lineno, line = reader.next("scale factor")
    scale = _floats(lineno, line, 1, "scale factor")[0]
    if scale == 0.0:
        raise ParseError("scale factor must be non-zero", lineno, 1)
    rows = []
    for _ in range(3):
        lineno, line = reader.next("lattice vector")
        rows.append(_floats(lineno, line, 3, "lattice vector"))
    raw = np.array(rows)
    if scale < 0:
        vol = abs(np.linalg.det(raw))
        if vol == 0.0:
            raise ParseError("cannot rescale a zero-volume lattice", lineno, 1)
        factor = (-scale / vol) ** (1.0 / 3.0)
    else:
        factor = scale
    lattice = Lattice(raw * factor)

    lineno, line = reader.next("species names")
    toks = _tokens(line)
    if not toks:
        raise ParseError("empty species line", lineno, 0)
    if toks[0][1].lstrip("+-").isdigit():
        raise ParseError("species names are required (VASP 4 files unsupported)", lineno, toks[0][0])
    names = [t for _, t in toks]
    lineno, line = reader.next("species counts")
    ctoks = _tokens(line)
    counts = [parse_int(t, lineno, c) for c, t in ctoks]
    if len(counts) != len(names):
        raise CountMismatch(
            f"line {lineno}: {len(names)} species names but {len(counts)} counts"
        )
    if any(n < 0 for n in counts) or sum(counts) == 0:
        raise CountMismatch(f"line {lineno}: counts must be non-negative and not all zero")

    lineno, line = reader.next("coordinate mode")
    mode = line.strip()
    if mode[:1] in ("S", "s"):
        lineno, line = reader.next("coordinate mode")
        mode = line.strip()
    if mode[:1] in ("D", "d"):
        cartesian = False
    elif mode[:1] in ("C", "c", "K", "k"):
        cartesian = True
    else:
        raise ParseError(f"expected 'Direct' or 'Cartesian', got {mode!r}", lineno, 1)

    total = sum(counts)
    coords = []
    for i in range(total):
        if reader.pos >= len(reader.lines) or not reader.lines[reader.pos].strip():
            raise CountMismatch(f"counts list {total} sites but only {i} coordinate rows follow")
        lineno, line = reader.next("coordinates")
        coords.append(_floats(lineno, line, 3, "site coordinates"))
    coords = np.array(coords, dtype=float)
    if cartesian:
        coords = lattice.to_fractional(coords * factor)
    species = tuple(n for n, c in zip(names, counts) for _ in range(c))
    try:
        return Crystal(lattice, species, coords)
    except ValueError as exc:
        raise ParseError(str(exc), lineno, 0) from None


def parse_structure(text: str) -> Crystal:
    """Parse POSCAR-style text into a :class:`Crystal` (fractional coordinates)."""
    try:
        return read_structure_block(_Lines(text))
    except DefectKitError:
        raise
    except (ValueError, TypeError, OverflowError, np.linalg.LinAlgError) as exc:
        raise ParseError(str(exc)) from None


def _blocks(species):
    names, counts = [], []
    for s in species:
        if names and names[-1] == s:
            counts[-1] += 1
        else:
            names.append(s)
            counts.append(1)
    return names, counts


def write_structure(crystal: Crystal, comment: str = "defectkit structure") -> str:
    lines = [comment.replace("\n", " "), "1.0"]
    for row in crystal.lattice.vectors:
        lines.append("  " + " ".join(f"{format_float(x):>24}" for x in row))
    names, counts = _blocks(crystal.species)
    lines.append("  " + " ".join(f"{n:>4}" for n in names))
    lines.append("  " + " ".join(f"{c:>4d}" for c in counts))
    lines.append("Direct")
    for f in crystal.frac:
        lines.append("  " + " ".join(f"{format_float(x):>24}" for x in f))
    return "\n".join(lines) + "\n"
