"""CHGCAR-dialect volumetric grids.

A structure header (see :mod:`defectkit.io.structure`), a blank line, a line
``n1 n2 n3`` and then ``n1*n2*n3`` values, five per line, with the first axis
varying fastest.  Files written by VASP may carry further blocks (augmentation
data, then the magnetization grid); ``block=1`` selects the second grid.

Values are stored as given.  VASP multiplies densities by the cell volume;
pass ``volume_scaled=True`` to divide that factor out on reading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Crystal, Lattice
from ..errors import CountMismatch, DefectKitError, ParseError
from .structure import _Lines, _tokens, format_float, parse_float, parse_int, read_structure_block, write_structure

VALUES_PER_LINE = 5


@dataclass(frozen=True)
class VolumetricGrid:
    """Scalar field on the grid of fractional points (i/n1, j/n2, k/n3).

    ``values[i, j, k]`` holds the sample at that point; densities are in
    1/Angstrom^3.
    """

    crystal: Crystal
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim != 3 or min(v.shape) < 1:
            raise CountMismatch(f"grid values must be a non-empty 3-d array, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def lattice(self) -> Lattice:
        return self.crystal.lattice

    @property
    def dims(self) -> tuple:
        return tuple(int(n) for n in self.values.shape)

    @property
    def voxel_volume(self) -> float:
        return self.lattice.volume / self.values.size

    def integrate(self) -> float:
        return float(np.sum(self.values)) * self.voxel_volume

    def frac_points(self) -> np.ndarray:
        """Fractional coordinates of all grid points, shape (n1, n2, n3, 3)."""
        axes = [np.arange(n) / n for n in self.dims]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def _read_dims(reader: _Lines):
    while reader.pos < len(reader.lines) and not reader.lines[reader.pos].strip():
        reader.pos += 1
    lineno, line = reader.next("grid dimensions")
    toks = _tokens(line)
    if len(toks) != 3:
        raise ParseError(f"expected three grid dimensions, found {len(toks)} fields", lineno, 1)
    dims = tuple(parse_int(t, lineno, c) for c, t in toks)
    if min(dims) < 1:
        raise CountMismatch(f"line {lineno}: grid dimensions must be >= 1, got {dims}")
    return dims


def _read_values(reader: _Lines, count: int) -> np.ndarray:
    out = np.empty(count, dtype=float)
    filled = 0
    while filled < count:
        if reader.pos >= len(reader.lines):
            raise CountMismatch(f"grid declares {count} values but only {filled} are present")
        lineno, line = reader.next("grid values")
        for col, tok in _tokens(line):
            if filled >= count:
                raise CountMismatch(f"line {lineno}: more values than the declared {count}")
            out[filled] = parse_float(tok, lineno, col)
            filled += 1
    return out


def _is_dims_line(line: str, dims) -> bool:
    toks = line.split()
    return len(toks) == 3 and all(t.isdigit() for t in toks) and tuple(map(int, toks)) == dims


def parse_volumetric(text: str, block: int = 0, volume_scaled: bool = False) -> VolumetricGrid:
    """Parse CHGCAR-style text; ``block`` selects which grid in the file."""
    try:
        reader = _Lines(text)
        crystal = read_structure_block(reader)
        dims = _read_dims(reader)
        n = dims[0] * dims[1] * dims[2]
        if n > 10**9:
            raise CountMismatch(f"grid of {n} points is implausibly large")
        for _ in range(block):
            _read_values(reader, n)
            while True:
                if reader.pos >= len(reader.lines):
                    raise CountMismatch(f"requested grid block {block} is not present")
                if _is_dims_line(reader.lines[reader.pos], dims):
                    reader.pos += 1
                    break
                reader.pos += 1
        values = _read_values(reader, n)
        if block == 0:
            # trailing content is allowed only as another CHGCAR section
            rest = [ln for ln in reader.lines[reader.pos:] if ln.strip()]
            if rest and not any(
                _is_dims_line(ln, dims) or ln.lstrip().startswith("augmentation") for ln in rest[:2]
            ):
                raise CountMismatch(f"unexpected content after {n} grid values")
        grid = values.reshape(dims[::-1]).transpose(2, 1, 0)
        if volume_scaled:
            grid = grid / crystal.lattice.volume
        return VolumetricGrid(crystal, grid)
    except DefectKitError:
        raise
    except (ValueError, TypeError, OverflowError, MemoryError) as exc:
        raise ParseError(str(exc)) from None


def write_volumetric(grid: VolumetricGrid, comment: str = "defectkit grid") -> str:
    head = write_structure(grid.crystal, comment)
    n1, n2, n3 = grid.dims
    flat = grid.values.transpose(2, 1, 0).reshape(-1)
    body = []
    for start in range(0, flat.size, VALUES_PER_LINE):
        chunk = flat[start:start + VALUES_PER_LINE]
        body.append(" " + " ".join(f"{format_float(x):>24}" for x in chunk))
    return head + "\n" + f"{n1:5d} {n2:5d} {n3:5d}\n" + "\n".join(body) + "\n"
