"""PWC1: a small, documented binary container for plane-wave coefficients.

All fields are little-endian::

    magic      4 bytes   b"PWC1"
    version    u32       1
    n_spin     u32       1 or 2
    n_k        u32
    n_bands    u32
    lattice    9 x f64   rows a1, a2, a3 in Angstrom
    encut      f64       eV
    then for each spin, for each k-point:
        kvec     3 x f64   fractional
        weight   f64
        n_pw     u32
        gvecs    n_pw x 3 x i32
        then for each band:
            eigenvalue   f64  eV
            occupation   f64
            coeffs       n_pw x 2 x f64 (re, im)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..constants import HBAR2_OVER_2M
from ..core import Lattice
from ..errors import DefectKitError, FormatError, NormalizationError, TruncatedFile

MAGIC = b"PWC1"
VERSION = 1
NORM_TOL = 1e-8
WEIGHT_TOL = 1e-10

_HEADER = struct.Struct("<4sIIII9dd")
_KHEAD = struct.Struct("<4dI")
_BANDHEAD = struct.Struct("<2d")


@dataclass(frozen=True)
class KBlock:
    """Plane-wave data of one (spin, k) pair."""

    kvec: np.ndarray  # fractional, (3,)
    weight: float
    gvecs: np.ndarray  # int32, (n_pw, 3)
    eigenvalues: np.ndarray  # eV, (n_bands,)
    occupations: np.ndarray  # (n_bands,)
    coeffs: np.ndarray  # complex128, (n_bands, n_pw)

    @property
    def n_pw(self) -> int:
        return int(self.gvecs.shape[0])


@dataclass(frozen=True)
class WavefunctionSet:
    lattice: Lattice
    encut: float
    blocks: tuple  # blocks[spin][k] -> KBlock
    version: int = VERSION

    @property
    def n_spin(self) -> int:
        return len(self.blocks)

    @property
    def n_k(self) -> int:
        return len(self.blocks[0])

    @property
    def n_bands(self) -> int:
        return int(self.blocks[0][0].eigenvalues.shape[0])

    def block(self, spin: int, k: int) -> KBlock:
        return self.blocks[spin][k]

    def kinetic_energies(self, spin: int, k: int) -> np.ndarray:
        """hbar^2 |k+G|^2 / 2m for every plane wave of the block, in eV."""
        b = self.blocks[spin][k]
        kg = (b.kvec + b.gvecs) @ self.lattice.reciprocal.vectors
        return HBAR2_OVER_2M * np.einsum("ij,ij->i", kg, kg)

    def validate(self):
        if self.n_spin not in (1, 2):
            raise FormatError(f"n_spin must be 1 or 2, got {self.n_spin}")
        counts = {len(kb) for kb in self.blocks}
        if len(counts) != 1 or self.n_k < 1:
            raise FormatError("every spin channel needs the same, non-zero number of k-points")
        for s, kblocks in enumerate(self.blocks):
            wsum = float(sum(b.weight for b in kblocks))
            if abs(wsum - 1.0) > WEIGHT_TOL:
                raise FormatError(f"k-point weights of spin {s} sum to {wsum!r}, expected 1")
            for k, b in enumerate(kblocks):
                if b.eigenvalues.shape[0] != self.n_bands:
                    raise FormatError(f"(spin={s}, k={k}) has a different band count")
                if b.coeffs.shape != (self.n_bands, b.n_pw):
                    raise FormatError(f"(spin={s}, k={k}) coefficient array has shape {b.coeffs.shape}")
                if b.n_pw:
                    ekin = self.kinetic_energies(s, k)
                    if np.max(ekin) > self.encut * (1 + 1e-9) + 1e-9:
                        raise FormatError(
                            f"(spin={s}, k={k}) plane wave with {np.max(ekin):.6g} eV exceeds encut {self.encut:.6g} eV"
                        )
                norms = np.sum(np.abs(b.coeffs) ** 2, axis=1)
                for band, nrm in enumerate(norms):
                    if not abs(nrm - 1.0) <= NORM_TOL:
                        raise NormalizationError(s, k, band, float(nrm))
        return self


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n: int, what: str) -> memoryview:
        if n < 0 or self.pos + n > len(self.data):
            raise TruncatedFile(
                f"file ends at byte {len(self.data)} while reading {what} "
                f"(needed {n} bytes at offset {self.pos})"
            )
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, st: struct.Struct, what: str):
        return st.unpack(self.take(st.size, what))

    def array(self, dtype: str, count: int, what: str) -> np.ndarray:
        dt = np.dtype(dtype)
        return np.frombuffer(self.take(count * dt.itemsize, what), dtype=dt).copy()


def read_wavefunctions(data: bytes) -> WavefunctionSet:
    """Decode PWC1 bytes and validate normalization, weights and cutoff."""
    try:
        return _read(bytes(data))
    except DefectKitError:
        raise
    except (ValueError, TypeError, OverflowError, MemoryError, struct.error) as exc:
        raise FormatError(str(exc)) from None


def _read(data: bytes) -> WavefunctionSet:
    if len(data) < 4:
        raise TruncatedFile(f"only {len(data)} bytes, too short for the PWC1 magic")
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {bytes(data[:4])!r}, expected {MAGIC!r}")
    r = _Reader(data)
    head = r.unpack(_HEADER, "header")
    _, version, n_spin, n_k, n_bands = head[:5]
    lattice_rows = np.array(head[5:14], dtype=float).reshape(3, 3)
    encut = head[14]
    if version != VERSION:
        raise FormatError(f"unsupported PWC1 version {version}")
    if n_spin not in (1, 2):
        raise FormatError(f"n_spin must be 1 or 2, got {n_spin}")
    if n_k < 1 or n_bands < 1:
        raise FormatError("n_k and n_bands must both be >= 1")
    if not np.all(np.isfinite(lattice_rows)) or not np.isfinite(encut) or encut <= 0:
        raise FormatError("lattice and encut must be finite, encut positive")
    lattice = Lattice(lattice_rows)

    blocks = []
    for s in range(n_spin):
        kblocks = []
        for k in range(n_k):
            kx, ky, kz, weight, n_pw = r.unpack(_KHEAD, f"k-point header (spin={s}, k={k})")
            # the payload size must be plausible before allocating
            need = n_pw * 12 + n_bands * (16 + 16 * n_pw)
            if r.pos + need > len(data):
                raise TruncatedFile(
                    f"(spin={s}, k={k}) declares {n_pw} plane waves but the file is too short"
                )
            gvecs = r.array("<i4", 3 * n_pw, "G-vectors").reshape(n_pw, 3)
            eig = np.empty(n_bands)
            occ = np.empty(n_bands)
            coeffs = np.empty((n_bands, n_pw), dtype=np.complex128)
            for b in range(n_bands):
                eig[b], occ[b] = r.unpack(_BANDHEAD, f"band header (spin={s}, k={k}, band={b})")
                coeffs[b] = r.array("<c16", n_pw, f"coefficients (spin={s}, k={k}, band={b})")
            kvec = np.array([kx, ky, kz])
            if not (np.all(np.isfinite(kvec)) and np.isfinite(weight)
                    and np.all(np.isfinite(eig)) and np.all(np.isfinite(occ))):
                raise FormatError(f"non-finite header values at (spin={s}, k={k})")
            kblocks.append(KBlock(kvec, float(weight), gvecs, eig, occ, coeffs))
        blocks.append(tuple(kblocks))
    if r.pos != len(data):
        raise FormatError(f"{len(data) - r.pos} trailing bytes after the last band")
    return WavefunctionSet(lattice, float(encut), tuple(blocks), version).validate()


def write_wavefunctions(wfs: WavefunctionSet) -> bytes:
    out = [
        _HEADER.pack(
            MAGIC, wfs.version, wfs.n_spin, wfs.n_k, wfs.n_bands,
            *np.asarray(wfs.lattice.vectors, dtype=float).reshape(-1), float(wfs.encut),
        )
    ]
    for kblocks in wfs.blocks:
        for b in kblocks:
            out.append(_KHEAD.pack(*map(float, b.kvec), float(b.weight), b.n_pw))
            out.append(np.ascontiguousarray(b.gvecs, dtype="<i4").tobytes())
            for band in range(b.eigenvalues.shape[0]):
                out.append(_BANDHEAD.pack(float(b.eigenvalues[band]), float(b.occupations[band])))
                out.append(np.ascontiguousarray(b.coeffs[band], dtype="<c16").tobytes())
    return b"".join(out)
