"""Hyperfine tensors from a real-space spin-density grid.

``A_ij = (1/2S) (mu0/4pi) gamma_J gamma_e hbar^2 [(8pi/3) sigma(R) delta_ij + W_ij(R)]``
in MHz, with

``W_ij(R) = int (3 x_i x_j / |x|^5 - delta_ij / |x|^3) sigma(R + x) dx``.

The contact term uses the valence spin density interpolated at the nucleus;
no core polarization is added.  ``gamma_e`` enters with its magnitude, so a
positive spin density at a nucleus with positive gamma gives positive A.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..constants import GAMMA_ELECTRON, HBAR, MU0_OVER_4PI, PLANCK
from ..errors import MissingGrid, NoUnpairedSpin
from ..io.volumetric import VolumetricGrid
from .isotopes import isotope_data

R_CUT = 0.1  # Angstrom; grid points closer to the nucleus are skipped


@dataclass(frozen=True)
class NucleusSpec:
    position: tuple  # fractional
    isotope: str
    gamma: float | None = None  # rad s^-1 T^-1
    spin: float | None = None

    def __post_init__(self):
        if self.gamma is None or self.spin is None:
            gamma, spin = isotope_data(self.isotope)
            if self.gamma is None:
                object.__setattr__(self, "gamma", gamma)
            if self.spin is None:
                object.__setattr__(self, "spin", spin)
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))


@dataclass(frozen=True)
class HyperfineTensor:
    A: np.ndarray  # MHz
    principal: np.ndarray  # ascending, MHz
    axes: np.ndarray  # columns are principal directions
    a_iso: float

    @property
    def A_xx(self):
        return float(self.principal[0])

    @property
    def A_yy(self):
        return float(self.principal[1])

    @property
    def A_zz(self):
        return float(self.principal[2])


def _require(grid):
    if grid is None:
        raise MissingGrid("no spin-density grid supplied")
    return grid


def trilinear(grid: VolumetricGrid, frac) -> float:
    """Periodic trilinear interpolation of the grid at a fractional point."""
    v = grid.values
    dims = np.array(v.shape)
    x = (np.asarray(frac, dtype=float) % 1.0) * dims
    i0 = np.floor(x).astype(int)
    t = x - i0
    total = 0.0
    for corner in range(8):
        off = np.array([(corner >> 2) & 1, (corner >> 1) & 1, corner & 1])
        w = np.prod(np.where(off == 1, t, 1.0 - t))
        if w == 0.0:
            continue
        i, j, k = (i0 + off) % dims
        total += w * v[i, j, k]
    return float(total)


def fermi_contact(grid: VolumetricGrid, R_frac) -> float:
    """(8 pi / 3) sigma(R) in 1/Angstrom^3."""
    return 8.0 * math.pi / 3.0 * trilinear(_require(grid), R_frac)


def _displacements(grid: VolumetricGrid, R_frac):
    """Minimum-image Cartesian displacements from R to every grid point.

    Evaluated component by component so a scalar loop following the same
    operation order reproduces every value exactly.
    """
    n1, n2, n3 = grid.dims
    A = grid.lattice.vectors
    f1 = np.arange(n1) / n1 - R_frac[0]
    f2 = np.arange(n2) / n2 - R_frac[1]
    f3 = np.arange(n3) / n3 - R_frac[2]
    f1 = (f1 - np.round(f1))[:, None, None]
    f2 = (f2 - np.round(f2))[None, :, None]
    f3 = (f3 - np.round(f3))[None, None, :]
    x = f1 * A[0, 0] + f2 * A[1, 0] + f3 * A[2, 0]
    y = f1 * A[0, 1] + f2 * A[1, 1] + f3 * A[2, 1]
    z = f1 * A[0, 2] + f2 * A[1, 2] + f3 * A[2, 2]
    return x, y, z


def dipole_dipole_tensor(grid: VolumetricGrid, R_frac, r_cut: float = R_CUT) -> np.ndarray:
    """W_ij(R) in 1/Angstrom^3 by grid quadrature (points within ``r_cut`` skipped).

    Each component is reduced with ``math.fsum`` so the result is independent
    of summation order.
    """
    grid = _require(grid)
    R = [float(c) for c in R_frac]
    x, y, z = _displacements(grid, R)
    r2 = x * x + y * y + z * z
    mask = r2 >= r_cut * r_cut
    r2m = np.where(mask, r2, 1.0)
    r = np.sqrt(r2m)
    r5 = r2m * r2m * r
    r3 = r2m * r
    sigma = np.where(mask, grid.values, 0.0)
    comps = {"x": x, "y": y, "z": z}
    dv = grid.voxel_volume
    W = np.zeros((3, 3))
    names = "xyz"
    for a in range(3):
        for b in range(a, 3):
            term = 3.0 * comps[names[a]] * comps[names[b]] / r5
            if a == b:
                term = term - 1.0 / r3
            vals = (term * sigma)[mask]
            W[a, b] = W[b, a] = math.fsum(vals.tolist()) * dv
    return W


def hyperfine_prefactor(gamma_nucleus: float, S: float) -> float:
    """MHz per (1/Angstrom^3) of spin density."""
    joule = MU0_OVER_4PI * gamma_nucleus * GAMMA_ELECTRON * HBAR**2 * 1e30
    return joule / PLANCK / 1e6 / (2.0 * S)


def hyperfine_tensor(S: float, nucleus: NucleusSpec, grid: VolumetricGrid, r_cut: float = R_CUT) -> HyperfineTensor:
    if not S > 0:
        raise NoUnpairedSpin("hyperfine coupling needs S > 0")
    grid = _require(grid)
    total = grid.integrate()
    if abs(total - 2.0 * S) > 0.01 * 2.0 * S:
        warnings.warn(
            f"spin density integrates to {total:.4g}, expected 2S = {2 * S:g}", stacklevel=2
        )
    contact = fermi_contact(grid, nucleus.position)
    W = dipole_dipole_tensor(grid, nucleus.position, r_cut)
    pref = hyperfine_prefactor(nucleus.gamma, S)
    A = pref * (contact * np.eye(3) + W)
    A = 0.5 * (A + A.T)
    vals, vecs = np.linalg.eigh(A)
    return HyperfineTensor(A, vals, vecs, float(np.trace(A)) / 3.0)
