"""Dipolar spin-spin zero-field splitting from real-space orbitals.

::

    D_ab = (mu0/4pi) (gamma_e hbar)^2 / (2S (2S-1))
           * sum_{i<j} chi_ij <Phi_ij| (r^2 delta_ab - 3 r_a r_b) / r^5 |Phi_ij>

``Phi_ij`` is the two-electron determinant of orbitals i and j, ``chi = +1``
for parallel and ``-1`` for antiparallel spins.  For parallel spins the pair
expectation is direct minus exchange; for antiparallel spins only the direct
term survives.  The kernel is applied in reciprocal space as
``4 pi (G_a G_b / G^2 - delta_ab / 3)`` with the G = 0 term dropped, so the
interaction is periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..constants import GAMMA_ELECTRON, HBAR, MU0_OVER_4PI, PLANCK
from ..core import Lattice
from ..errors import GridMismatch, InvalidTensor, SpinTooLow

#: (mu0/4pi)(gamma_e hbar)^2 / h in GHz * Angstrom^3 (~52.04).
ZFS_PREFACTOR_GHZ_A3 = MU0_OVER_4PI * (GAMMA_ELECTRON * HBAR) ** 2 / PLANCK * 1e30 * 1e-9

DIRECT_MAX_POINTS = 16**3


@dataclass(frozen=True)
class OrbitalPairSet:
    """Real-space Kohn-Sham orbitals on a common grid.

    ``orbitals[n]`` holds psi_n at the fractional points (i/n1, j/n2, k/n3),
    normalized so that sum |psi|^2 * dV = 1; ``spins[n]`` is +1 (up) or -1
    (down).  ``S`` defaults to half the spin imbalance.
    """

    lattice: Lattice
    orbitals: np.ndarray
    spins: tuple
    S: float | None = None

    def __post_init__(self):
        orbs = np.asarray(self.orbitals)
        if orbs.ndim != 4:
            raise GridMismatch(f"orbitals must have shape (n_orb, n1, n2, n3), got {orbs.shape}")
        spins = tuple(int(s) for s in self.spins)
        if len(spins) != orbs.shape[0] or any(s not in (1, -1) for s in spins):
            raise GridMismatch("one spin label (+1 or -1) is required per orbital")
        object.__setattr__(self, "orbitals", orbs)
        object.__setattr__(self, "spins", spins)
        if self.S is None:
            object.__setattr__(self, "S", abs(sum(spins)) / 2.0)

    @classmethod
    def from_grids(cls, grids, spins, S=None) -> "OrbitalPairSet":
        """Stack orbitals given as VolumetricGrid objects, checking commensurability."""
        grids = list(grids)
        if not grids:
            raise GridMismatch("no orbital grids given")
        ref = grids[0]
        for g in grids[1:]:
            if g.dims != ref.dims:
                raise GridMismatch(f"grid {g.dims} does not match {ref.dims}")
            if not np.allclose(g.lattice.vectors, ref.lattice.vectors, rtol=0, atol=1e-8):
                raise GridMismatch("orbital grids were sampled in different cells")
        return cls(ref.lattice, np.stack([g.values for g in grids]), spins, S)

    @property
    def dims(self) -> tuple:
        return tuple(self.orbitals.shape[1:])

    @property
    def voxel_volume(self) -> float:
        return self.lattice.volume / float(np.prod(self.dims))


@dataclass(frozen=True)
class ZfsTensor:
    D_ab: np.ndarray  # GHz
    D: float
    E: float
    axes: np.ndarray  # columns x, y, z of the canonical frame


def dipolar_kernel_g(lattice: Lattice, dims) -> np.ndarray:
    """4 pi (G_a G_b / G^2 - delta_ab / 3) on the FFT frequency grid; shape (3, 3, n1, n2, n3)."""
    freqs = [np.fft.fftfreq(n, d=1.0 / n) for n in dims]
    m = np.stack(np.meshgrid(*freqs, indexing="ij"), axis=-1)
    G = m @ lattice.reciprocal.vectors
    g2 = np.einsum("...i,...i->...", G, G)
    zero = g2 == 0
    g2 = np.where(zero, 1.0, g2)
    K = 4.0 * math.pi * (np.einsum("...a,...b->ab...", G, G) / g2 - np.eye(3)[:, :, None, None, None] / 3.0)
    K[:, :, zero] = 0.0
    return K


def _pair_terms(pairs: OrbitalPairSet):
    """Yield (chi, densities to correlate) for every orbital pair i < j."""
    orbs = pairs.orbitals
    n = orbs.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            same = pairs.spins[i] == pairs.spins[j]
            chi = 1.0 if same else -1.0
            rho_i = np.abs(orbs[i]) ** 2
            rho_j = np.abs(orbs[j]) ** 2
            exch = np.conj(orbs[i]) * orbs[j] if same else None
            yield chi, rho_i, rho_j, exch


def _check(pairs: OrbitalPairSet):
    if pairs.S < 1:
        raise SpinTooLow(f"zero-field splitting needs S >= 1, got S = {pairs.S:g}")


def _assemble(pairs: OrbitalPairSet, M: np.ndarray) -> ZfsTensor:
    S = pairs.S
    D_ab = ZFS_PREFACTOR_GHZ_A3 / (2.0 * S * (2.0 * S - 1.0)) * M
    D_ab = 0.5 * (D_ab + D_ab.T)
    D, E, axes = zfs_parameters(D_ab)
    return ZfsTensor(D_ab, D, E, axes)


def zfs_tensor(pairs: OrbitalPairSet) -> ZfsTensor:
    """Reciprocal-space evaluation of the pair sum."""
    _check(pairs)
    dims = pairs.dims
    vol = pairs.lattice.volume
    dv = pairs.voxel_volume
    K = dipolar_kernel_g(pairs.lattice, dims)
    M = np.zeros((3, 3))
    for chi, rho_i, rho_j, exch in _pair_terms(pairs):
        fi = np.fft.fftn(rho_i) * dv
        fj = np.fft.fftn(rho_j) * dv
        spectrum = fi * np.conj(fj)
        if exch is not None:
            fx = np.fft.fftn(exch) * dv
            spectrum = spectrum - np.abs(fx) ** 2
        M += chi * np.real(np.einsum("abxyz,xyz->ab", K, spectrum)) / vol
    return _assemble(pairs, M)


def real_space_kernel(lattice: Lattice, dims) -> np.ndarray:
    """Periodic kernel on grid displacements, by explicit summation over G (no FFT)."""
    n1, n2, n3 = dims
    K = dipolar_kernel_g(lattice, dims).reshape(3, 3, -1)
    m = np.stack(np.meshgrid(*(np.arange(n) for n in dims), indexing="ij"), axis=-1).reshape(-1, 3)
    frac = m / np.array(dims, dtype=float)
    phase = np.exp(2j * math.pi * (frac @ m.T))  # [displacement, G]
    out = np.real(np.einsum("abg,dg->abd", K, phase)) / lattice.volume
    return out.reshape(3, 3, n1, n2, n3)


def zfs_tensor_direct(pairs: OrbitalPairSet) -> ZfsTensor:
    """Oracle: double sum over grid-point pairs with the tabulated periodic kernel.

    Cost grows with the square of the grid size; limited to 16^3 points.
    """
    _check(pairs)
    dims = pairs.dims
    npts = int(np.prod(dims))
    if npts > DIRECT_MAX_POINTS:
        raise GridMismatch(f"direct evaluator limited to {DIRECT_MAX_POINTS} points, got {npts}")
    dv = pairs.voxel_volume
    Kr = real_space_kernel(pairs.lattice, dims)
    idx = np.stack(np.meshgrid(*(np.arange(n) for n in dims), indexing="ij"), axis=-1).reshape(-1, 3)
    M = np.zeros((3, 3))
    for chi, rho_i, rho_j, exch in _pair_terms(pairs):
        a = rho_i.reshape(-1)
        b = rho_j.reshape(-1)
        x = exch.reshape(-1) if exch is not None else None
        acc = np.zeros((3, 3))
        for p in range(npts):
            d = (idx[p] - idx) % np.array(dims)
            kern = Kr[:, :, d[:, 0], d[:, 1], d[:, 2]]
            val = a[p] * (kern @ b)
            if x is not None:
                val = val - np.real(x[p] * (kern @ np.conj(x)))
            acc += val
        M += chi * acc * dv * dv
    return _assemble(pairs, M)


def zfs_parameters(D_ab) -> tuple:
    """Axial D and rhombic E (same units as D_ab) plus the canonical axes.

    z is the eigenvector with the largest |eigenvalue|; D = 3/2 D_zz and
    E = (D_xx - D_yy)/2 with x, y ordered so that E has the sign of D.
    """
    T = np.asarray(D_ab, dtype=float)
    if T.shape != (3, 3) or not np.all(np.isfinite(T)):
        raise InvalidTensor("ZFS tensor must be a finite 3x3 matrix")
    scale = max(1.0, float(np.max(np.abs(T))))
    if np.max(np.abs(T - T.T)) > 1e-9 * scale:
        raise InvalidTensor("ZFS tensor must be symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (T + T.T))
    if np.all(vals == 0):
        return 0.0, 0.0, np.eye(3)
    iz = int(np.argmax(np.abs(vals)))
    rest = [i for i in range(3) if i != iz]
    D = 1.5 * vals[iz]
    ix, iy = rest
    if (vals[ix] - vals[iy]) * D < 0:
        ix, iy = iy, ix
    E = 0.5 * (vals[ix] - vals[iy])
    axes = np.column_stack([vecs[:, ix], vecs[:, iy], vecs[:, iz]])
    if np.linalg.det(axes) < 0:
        axes[:, 0] *= -1
    return float(D), float(E), axes
