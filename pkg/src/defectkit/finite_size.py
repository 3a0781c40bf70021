"""Point-charge image correction and potential alignment for charged supercells.

The image term is minus the Madelung energy of a periodic point charge ``q``
in a neutralizing background, screened by the dielectric tensor::

    E_M = (q^2 / 2) k_C [ sum'_R erfc(eta d_R) / (d_R sqrt(det eps))
                         + (4 pi / V) sum'_G exp(-G.eps.G / 4 eta^2) / G.eps.G
                         - 2 eta / (sqrt(pi) sqrt(det eps)) - pi / (V eta^2) ]

with ``d_R = sqrt(R . eps^-1 . R)``.  ``E_image = -E_M`` is what gets added to
the formation energy; for a cubic cell and scalar eps that is
``+q^2 alpha k_C / (2 eps L)`` with alpha = 2.8373.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .constants import COULOMB_EV_ANGSTROM
from .core import Lattice
from .errors import ConvergenceError

MAX_TERMS = 4_000_000


@dataclass(frozen=True)
class DielectricModel:
    tensor: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tensor, dtype=float)
        if t.ndim == 0:
            t = np.eye(3) * float(t)
        if t.shape != (3, 3) or not np.all(np.isfinite(t)):
            raise ValueError("dielectric tensor must be a scalar or a finite 3x3 matrix")
        if np.max(np.abs(t - t.T)) > 1e-12 * max(1.0, np.max(np.abs(t))):
            raise ValueError("dielectric tensor must be symmetric")
        if np.min(np.linalg.eigvalsh(t)) <= 0:
            raise ValueError("dielectric tensor must be positive definite")
        t = 0.5 * (t + t.T)
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)

    @classmethod
    def of(cls, value) -> "DielectricModel":
        if isinstance(value, DielectricModel):
            return value
        return cls(np.asarray(1.0 if value is None else value, dtype=float))

    @property
    def is_isotropic(self) -> bool:
        t = self.tensor
        return bool(np.all(t == np.eye(3) * t[0, 0]))


@dataclass(frozen=True)
class CorrectionResult:
    E_image: float
    E_align: float
    E_corr: float
    eta: float
    converged: bool


def default_eta(lattice: Lattice) -> float:
    return math.sqrt(math.pi) * lattice.volume ** (-1.0 / 3.0)


def _lattice_points(vectors: np.ndarray, cutoff: float) -> np.ndarray:
    """All integer combinations n @ vectors with |n @ vectors| <= cutoff, excluding 0."""
    # plane spacings bound the index range needed along each axis
    inv = np.linalg.inv(vectors)
    nmax = np.ceil(cutoff * np.linalg.norm(inv, axis=0)).astype(int)
    count = np.prod(2 * nmax + 1)
    if count > MAX_TERMS:
        return None
    ranges = [np.arange(-m, m + 1) for m in nmax]
    n = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, 3)
    pts = n @ vectors
    r2 = np.einsum("ij,ij->i", pts, pts)
    keep = (r2 <= cutoff * cutoff) & (r2 > 0)
    pts = pts[keep]
    # deterministic order: by length, then lexicographic
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0], np.round(r2[keep], 12)))
    return pts[order]


def _madelung_potential(lattice: Lattice, eps: DielectricModel, eta: float, scale: float) -> float | None:
    """Ewald potential (e/Angstrom) of the unit point-charge lattice at the charge site."""
    A = lattice.vectors
    vol = lattice.volume
    t = eps.tensor
    t_inv = np.linalg.inv(t)
    sqrt_det = math.sqrt(np.linalg.det(t))
    lam_max = np.max(np.linalg.eigvalsh(t))
    lam_min = np.min(np.linalg.eigvalsh(t))

    # erfc(x) < 1e-16 for x >= 5.9; exp(-y) < 1e-17 for y >= 39
    r_cut = scale * 5.9 * math.sqrt(lam_max) / eta
    g_cut = scale * 2.0 * eta * math.sqrt(39.0 / lam_min)

    R = _lattice_points(A, r_cut)
    G = _lattice_points(lattice.reciprocal.vectors, g_cut)
    if R is None or G is None:
        return None
    d = np.sqrt(np.einsum("ij,jk,ik->i", R, t_inv, R))
    real = math.fsum(erfc(eta * d) / d) / sqrt_det
    geg = np.einsum("ij,jk,ik->i", G, t, G)
    recip = 4.0 * math.pi / vol * math.fsum(np.exp(-geg / (4.0 * eta * eta)) / geg)
    self_term = -2.0 * eta / (math.sqrt(math.pi) * sqrt_det)
    background = -math.pi / (vol * eta * eta)
    return real + recip + self_term + background


def ewald_point_charge_energy(lattice: Lattice, q: int, eps=1.0, tol: float = 1e-8, eta: float | None = None) -> float:
    """Madelung energy (eV) of a periodic point charge in a neutralizing background.

    Negative for any non-zero charge.  Cutoffs grow until two successive
    evaluations agree within ``tol``.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    eps = DielectricModel.of(eps)
    if q == 0:
        return 0.0
    eta = default_eta(lattice) if eta is None else float(eta)
    if not eta > 0:
        raise ValueError("eta must be positive")
    pref = 0.5 * q * q * COULOMB_EV_ANGSTROM
    scale = 1.0
    prev = _madelung_potential(lattice, eps, eta, scale)
    change = math.inf
    while prev is not None:
        scale *= 1.3
        cur = _madelung_potential(lattice, eps, eta, scale)
        if cur is None:
            break
        change = abs(cur - prev) * pref
        if change <= tol:
            return pref * cur
        prev = cur
    raise ConvergenceError(eta, change)


def image_charge_correction(lattice: Lattice, q: int, eps=1.0, tol: float = 1e-8, eta: float | None = None) -> float:
    """Energy added to E_form to remove the spurious image interaction (= -E_Madelung)."""
    return -ewald_point_charge_energy(lattice, q, eps, tol, eta)


def potential_alignment(delta_v: float, q: int) -> float:
    """Alignment term -q * dV, with dV the far-field potential offset defect minus bulk."""
    return -q * delta_v


def total_correction(lattice: Lattice, q: int, eps=1.0, delta_v: float = 0.0, tol: float = 1e-8, eta: float | None = None) -> CorrectionResult:
    if q == 0:
        return CorrectionResult(0.0, 0.0, 0.0, 0.0 if eta is None else float(eta), True)
    eta = default_eta(lattice) if eta is None else float(eta)
    e_image = -ewald_point_charge_energy(lattice, q, eps, tol, eta)
    e_align = potential_alignment(delta_v, q)
    return CorrectionResult(e_image, e_align, e_image + e_align, eta, True)
