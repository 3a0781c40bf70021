"""Transition dipoles from plane-wave coefficients, radiative lifetimes, ZPLs and
bound-exciton stability.

The momentum matrix element is evaluated in the plane-wave basis only
(``<f|p|i> = sum_G c_f*(G) hbar (k+G) c_i(G)``); the commutator with a
non-local pseudopotential is not included.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import (
    ELEMENTARY_CHARGE,
    EPSILON0,
    HBAR2_OVER_2M,
    PLANCK,
    SPEED_OF_LIGHT,
)
from .errors import DegenerateEnergies, InfiniteLifetime, InvalidBand, WeightError
from .io.wavefunction import WavefunctionSet

DEFAULT_REFRACTIVE_INDEX = 2.1
LIFETIME_CONVENTIONS = {"as-printed": 1.0, "standard": 2.0}


class TransitionKind(str, enum.Enum):
    LL = "LL"  # between two in-gap defect levels
    LD = "LD"  # between a band edge and a defect level


@dataclass(frozen=True)
class TransitionSpec:
    kind: TransitionKind
    spin: int
    initial_band: int
    final_band: object  # int, or tuple of degenerate partner bands
    edge: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", TransitionKind(self.kind))
        finals = self.final_bands
        if self.initial_band in finals:
            raise DegenerateEnergies("initial and final band coincide")

    @property
    def final_bands(self) -> tuple:
        fb = self.final_band
        return tuple(int(b) for b in fb) if isinstance(fb, (tuple, list)) else (int(fb),)


@dataclass(frozen=True)
class DipoleMoment:
    per_k: np.ndarray  # (n_k, n_partners, 3) complex, e*Angstrom
    weights: np.ndarray
    mean: float  # k-averaged magnitude, e*Angstrom
    frequency: float  # Hz, from the eigenvalue difference at the first k-point


def _check_band(wfs, spin, band):
    if not 0 <= spin < wfs.n_spin:
        raise InvalidBand(f"spin index {spin} outside 0..{wfs.n_spin - 1}")
    if not 0 <= band < wfs.n_bands:
        raise InvalidBand(f"band index {band} outside 0..{wfs.n_bands - 1}")


def momentum_matrix_element(wfs: WavefunctionSet, spin: int, k: int, initial: int, final: int) -> np.ndarray:
    """<f|p|i> / hbar as a Cartesian 3-vector in 1/Angstrom."""
    _check_band(wfs, spin, initial)
    _check_band(wfs, spin, final)
    b = wfs.block(spin, k)
    kg = (b.kvec + b.gvecs) @ wfs.lattice.reciprocal.vectors
    return (np.conj(b.coeffs[final]) * b.coeffs[initial]) @ kg


def transition_dipole(wfs: WavefunctionSet, spec: TransitionSpec, k: int, final: int | None = None) -> np.ndarray:
    """mu_k = i hbar <f|p|i> / ((e_f - e_i) m) in e*Angstrom (one partner band)."""
    final = spec.final_bands[0] if final is None else final
    if not 0 <= k < wfs.n_k:
        raise InvalidBand(f"k-point index {k} outside 0..{wfs.n_k - 1}")
    _check_band(wfs, spec.spin, spec.initial_band)
    _check_band(wfs, spec.spin, final)
    b = wfs.block(spec.spin, k)
    de = b.eigenvalues[final] - b.eigenvalues[spec.initial_band]
    if spec.initial_band == final or abs(de) < 1e-10:
        raise DegenerateEnergies(
            f"bands {spec.initial_band} and {final} are degenerate at k={k} (de = {de:.3g} eV)"
        )
    p = momentum_matrix_element(wfs, spec.spin, k, spec.initial_band, final)
    # hbar^2/m in eV*A^2 divided by an energy in eV leaves Angstrom
    return 1j * (2.0 * HBAR2_OVER_2M) * p / de


def kpoint_average(mu_k, weights) -> float:
    """Weighted RMS magnitude sqrt(sum_k w_k |mu_k|^2)."""
    w = np.asarray(weights, dtype=float)
    if abs(math.fsum(w) - 1.0) > 1e-10:
        raise WeightError(f"k-point weights sum to {math.fsum(w)!r}, expected 1")
    mags = [float(np.sum(np.abs(np.asarray(m)) ** 2)) for m in mu_k]
    if len(mags) != len(w):
        raise WeightError(f"{len(mags)} dipoles for {len(w)} weights")
    return math.sqrt(math.fsum(wi * m for wi, m in zip(w, mags)))


def dipole_moment(wfs: WavefunctionSet, spec: TransitionSpec) -> DipoleMoment:
    """Dipoles at every k-point; degenerate final partners are summed in quadrature."""
    finals = spec.final_bands
    per_k = np.array(
        [[transition_dipole(wfs, spec, k, f) for f in finals] for k in range(wfs.n_k)]
    )
    weights = np.array([wfs.block(spec.spin, k).weight for k in range(wfs.n_k)])
    mean = kpoint_average(per_k.reshape(wfs.n_k, -1), weights)
    b = wfs.block(spec.spin, 0)
    de = abs(b.eigenvalues[finals[0]] - b.eigenvalues[spec.initial_band])
    return DipoleMoment(per_k, weights, mean, de * ELEMENTARY_CHARGE / PLANCK)


def _rate(E: float, mu_bar: float, n_r: float, convention: str) -> float:
    try:
        factor = LIFETIME_CONVENTIONS[convention]
    except KeyError:
        raise ValueError(f"unknown lifetime convention {convention!r}") from None
    nu = E * ELEMENTARY_CHARGE / PLANCK
    mu_si = mu_bar * ELEMENTARY_CHARGE * 1e-10
    return factor * n_r * (2.0 * math.pi) ** 3 * nu**3 * mu_si**2 / (
        3.0 * EPSILON0 * PLANCK * SPEED_OF_LIGHT**3
    )


def radiative_lifetime(E_transition: float, mu_bar: float, n_r: float = DEFAULT_REFRACTIVE_INDEX,
                       convention: str = "as-printed") -> float:
    """Wigner-Weisskopf radiative lifetime in ns.

    ``1/tau = f n_r (2 pi)^3 nu^3 |mu|^2 / (3 eps0 h c^3)`` with ``nu = E/h``.
    ``convention="as-printed"`` uses f = 1; ``"standard"`` uses f = 2, the
    Einstein A coefficient ``omega^3 n |mu|^2 / (3 pi eps0 hbar c^3)``.

    Args:
        E_transition: photon energy in eV.
        mu_bar: k-averaged dipole magnitude in e*Angstrom.
        n_r: refractive index of the host.

    Raises:
        InfiniteLifetime: if ``mu_bar`` is zero.
    """
    if not E_transition > 0:
        raise ValueError(f"transition energy must be positive, got {E_transition}")
    if mu_bar < 0:
        raise ValueError("dipole magnitude must be non-negative")
    if n_r < 1:
        raise ValueError(f"refractive index must be >= 1, got {n_r}")
    if mu_bar == 0:
        raise InfiniteLifetime("zero transition dipole: the transition is dark")
    return 1e9 / _rate(E_transition, mu_bar, n_r, convention)


def dipole_for_lifetime(E_transition: float, tau_ns: float, n_r: float = DEFAULT_REFRACTIVE_INDEX,
                        convention: str = "as-printed") -> float:
    """Dipole magnitude (e*Angstrom) that yields ``tau_ns`` at ``E_transition``."""
    unit = _rate(E_transition, 1.0, n_r, convention)
    return math.sqrt(1e9 / (tau_ns * unit))


def zpl(E_excited_relaxed: float, E_ground_relaxed: float) -> float:
    """ZPL from relaxed excited and ground total energies of the same setup."""
    e = E_excited_relaxed - E_ground_relaxed
    if not e > 0:
        warnings.warn(f"non-positive ZPL {e:.6g} eV: check the excited-state energy", stacklevel=2)
    return e


def bound_exciton_stability(zpl_energy: float, ctl: float) -> tuple:
    """(BES, stable) with BES = ZPL - CTL; stable only for BES > 0."""
    bes = zpl_energy - ctl
    return bes, bes > 0


@dataclass(frozen=True)
class ZplRecord:
    label: str
    kind: TransitionKind
    E_zpl: float
    tau: float | None = None  # ns
    bes: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", TransitionKind(self.kind))
        if not self.E_zpl > 0:
            raise ValueError(f"{self.label}: ZPL must be positive, got {self.E_zpl}")
        if self.kind is TransitionKind.LL and self.bes is not None:
            raise ValueError(f"{self.label}: LL transitions carry no bound-exciton stability")
