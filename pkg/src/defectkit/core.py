"""Lattices, crystals, supercells and point defects.

Lattice matrices use the row convention: ``vectors[i]`` is the i-th lattice
vector in Angstrom and Cartesian positions are ``frac @ vectors``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateLattice,
    InvalidSite,
    InvalidTransform,
    SiteCollision,
)

DUPLICATE_TOL = 1e-6
COLLISION_DISTANCE = 0.1  # Angstrom


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def reduce_frac(frac):
    """Map fractional coordinates into [0, 1); exact 1.0 after flooring becomes 0.0."""
    f = np.asarray(frac, dtype=float)
    f = f - np.floor(f)
    return np.where(f >= 1.0, 0.0, f)


@dataclass(frozen=True)
class Lattice:
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.shape != (3, 3) or not np.all(np.isfinite(v)):
            raise DegenerateLattice(f"lattice must be a finite 3x3 matrix, got shape {v.shape}")
        det = np.linalg.det(v)
        scale = np.prod(np.linalg.norm(v, axis=1))
        if not scale > 0 or abs(det) <= 1e-12 * scale:
            raise DegenerateLattice("lattice vectors are linearly dependent")
        if det < 0:
            raise DegenerateLattice("lattice vectors must be right-handed (det > 0)")
        object.__setattr__(self, "vectors", _frozen(v))

    @property
    def volume(self) -> float:
        return float(np.linalg.det(self.vectors))

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    @property
    def reciprocal(self) -> "Lattice":
        return reciprocal_lattice(self)

    def to_cartesian(self, frac):
        return np.asarray(frac, dtype=float) @ self.vectors

    def to_fractional(self, cart):
        return np.linalg.solve(self.vectors.T, np.asarray(cart, dtype=float).T).T

    def min_image_distance(self, frac_a, frac_b) -> float:
        """Shortest periodic distance between two fractional points (Angstrom)."""
        d = np.asarray(frac_a, dtype=float) - np.asarray(frac_b, dtype=float)
        d -= np.round(d)
        # neighbouring images matter for strongly skewed cells
        shifts = np.array(list(itertools.product((-1, 0, 1), repeat=3)), dtype=float)
        return float(np.min(np.linalg.norm((d + shifts) @ self.vectors, axis=1)))

    @classmethod
    def hexagonal(cls, a: float, c: float) -> "Lattice":
        return cls(
            [
                [a, 0.0, 0.0],
                [-0.5 * a, 0.5 * np.sqrt(3.0) * a, 0.0],
                [0.0, 0.0, c],
            ]
        )

    @classmethod
    def cubic(cls, a: float) -> "Lattice":
        return cls(np.eye(3) * a)


def reciprocal_lattice(lattice: Lattice) -> Lattice:
    """Reciprocal lattice with b_i . a_j = 2 pi delta_ij (rows are b_i, 1/Angstrom)."""
    try:
        inv = np.linalg.inv(np.asarray(lattice.vectors, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise DegenerateLattice("singular lattice has no reciprocal") from exc
    return Lattice(2.0 * np.pi * inv.T)


@dataclass(frozen=True)
class Crystal:
    lattice: Lattice
    species: tuple
    frac: np.ndarray

    def __post_init__(self):
        species = tuple(str(s) for s in self.species)
        frac = np.asarray(self.frac, dtype=float).reshape(-1, 3)
        if len(species) == 0:
            raise ValueError("a crystal needs at least one site")
        if len(species) != len(frac):
            raise ValueError(f"{len(species)} species for {len(frac)} positions")
        if not np.all(np.isfinite(frac)):
            raise ValueError("fractional coordinates must be finite")
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "frac", _frozen(reduce_frac(frac)))

    def __len__(self):
        return len(self.species)

    @property
    def cartesian(self) -> np.ndarray:
        return self.lattice.to_cartesian(self.frac)

    def composition(self) -> dict:
        out: dict = {}
        for s in self.species:
            out[s] = out.get(s, 0) + 1
        return out

    def same_sites(self, other: "Crystal", tol: float = DUPLICATE_TOL) -> bool:
        """True if both crystals hold the same (species, position) multiset."""
        if len(self) != len(other) or sorted(self.species) != sorted(other.species):
            return False
        used = np.zeros(len(other), dtype=bool)
        for s, f in zip(self.species, self.frac):
            d = other.frac - f
            d -= np.round(d)
            dist = np.max(np.abs(d), axis=1)
            match = [
                i
                for i in np.flatnonzero(dist < tol)
                if not used[i] and other.species[i] == s
            ]
            if not match:
                return False
            used[match[0]] = True
        return True


def hbn_primitive(a: float = 2.50, c: float = 6.58) -> Crystal:
    """Bulk AA'-stacked hexagonal BN (P6_3/mmc), two formula units per cell."""
    return Crystal(
        Lattice.hexagonal(a, c),
        ("B", "B", "N", "N"),
        [
            [1 / 3, 2 / 3, 0.25],
            [2 / 3, 1 / 3, 0.75],
            [2 / 3, 1 / 3, 0.25],
            [1 / 3, 2 / 3, 0.75],
        ],
    )


@dataclass(frozen=True)
class SupercellTransform:
    """Integer supercell matrix.

    With ``convention="column"`` (default) the columns of ``M`` hold the new
    lattice vectors in units of the old ones, i.e. ``new = M.T @ old``; with
    ``"row"`` the rows do, ``new = M @ old``.  The column reading is the one
    that reproduces a = b = 10.88 A, c = 10.90 A for hBN with
    M = [[2, 2, -5], [4, 4, -3], [1, -1, 0]].
    """

    M: np.ndarray
    convention: str = "column"

    def __post_init__(self):
        m = np.asarray(self.M)
        if m.shape != (3, 3):
            raise InvalidTransform(f"transformation must be 3x3, got {m.shape}")
        if not np.all(np.asarray(m, dtype=float) == np.round(np.asarray(m, dtype=float))):
            raise InvalidTransform("transformation matrix must be integer")
        m = m.astype(np.int64)
        if self.convention not in ("column", "row"):
            raise InvalidTransform(f"unknown convention {self.convention!r}")
        object.__setattr__(self, "M", _frozen(m, dtype=np.int64))
        if self.determinant < 1:
            raise InvalidTransform(f"det(M) = {self.determinant}; must be >= 1")

    @property
    def determinant(self) -> int:
        m = self.M
        # exact integer cofactor expansion
        return int(
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )

    @property
    def row_matrix(self) -> np.ndarray:
        """Matrix P with new_vectors = P @ old_vectors."""
        return self.M.T if self.convention == "column" else self.M


def _dedupe(species, frac, tol):
    keep_s, keep_f = [], []
    for s, f in zip(species, frac):
        if keep_f:
            d = np.asarray(keep_f) - f
            d -= np.round(d)
            if np.any(np.max(np.abs(d), axis=1) < tol):
                continue
        keep_s.append(s)
        keep_f.append(f)
    return keep_s, np.asarray(keep_f).reshape(-1, 3)


def make_supercell(crystal: Crystal, t: SupercellTransform) -> Crystal:
    """Build the supercell spanned by ``t`` and fill it with all site images."""
    if not isinstance(t, SupercellTransform):
        t = SupercellTransform(t)
    P = t.row_matrix.astype(float)
    new_lattice = Lattice(P @ crystal.lattice.vectors)
    inv_p = np.linalg.inv(P)

    # bounding box of the new cell in old fractional coordinates
    corners = np.array(
        [np.asarray(c) @ P for c in itertools.product((0, 1), repeat=3)]
    )
    lo = np.floor(corners.min(axis=0)).astype(int) - 1
    hi = np.ceil(corners.max(axis=0)).astype(int) + 1
    grid = np.array(
        list(itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))), dtype=float
    )

    eps = 1e-9
    species, frac = [], []
    for s, f in zip(crystal.species, crystal.frac):
        g = (f + grid) @ inv_p
        inside = np.all((g > -eps) & (g < 1.0 - eps), axis=1)
        for row in g[inside]:
            species.append(s)
            frac.append(row)
    species, frac = _dedupe(species, reduce_frac(np.asarray(frac)), DUPLICATE_TOL)
    expected = t.determinant * len(crystal)
    if len(species) != expected:
        raise InvalidTransform(
            f"generated {len(species)} sites, expected det(M) x {len(crystal)} = {expected}"
        )
    return Crystal(new_lattice, tuple(species), frac)


class DefectKind(enum.Enum):
    VACANCY = "vacancy"
    SUBSTITUTION = "substitution"
    INTERSTITIAL = "interstitial"


@dataclass(frozen=True)
class DefectSpec:
    kind: DefectKind
    target_site: int | None = None
    position: tuple | None = None
    species: str | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", DefectKind(self.kind))
        if self.kind is DefectKind.INTERSTITIAL:
            if self.position is None or self.species is None:
                raise ValueError("interstitials need a position and a species")
        else:
            if self.target_site is None:
                raise ValueError(f"{self.kind.value} needs a target site index")
            if self.kind is DefectKind.SUBSTITUTION and self.species is None:
                raise ValueError("substitutions need a species")


@dataclass(frozen=True)
class AppliedDefect:
    """Defective crystal plus the stoichiometry change (atoms added > 0, removed < 0)."""

    crystal: Crystal
    delta: dict = field(default_factory=dict)
    label: str = ""


def apply_defect(crystal: Crystal, spec: DefectSpec) -> AppliedDefect:
    species = list(crystal.species)
    frac = crystal.frac
    delta: dict = {}
    if spec.kind is DefectKind.INTERSTITIAL:
        pos = reduce_frac(np.asarray(spec.position, dtype=float).reshape(3))
        for i, f in enumerate(frac):
            d = crystal.lattice.min_image_distance(pos, f)
            if d < COLLISION_DISTANCE:
                raise SiteCollision(
                    f"interstitial lies {d:.3g} A from site {i} ({species[i]})"
                )
        species.append(spec.species)
        frac = np.vstack([frac, pos])
        delta[spec.species] = 1
    else:
        idx = spec.target_site
        if not isinstance(idx, (int, np.integer)) or not 0 <= idx < len(species):
            raise InvalidSite(f"site index {idx!r} outside 0..{len(species) - 1}")
        old = species[idx]
        if spec.kind is DefectKind.VACANCY:
            del species[idx]
            frac = np.delete(frac, idx, axis=0)
            delta[old] = -1
        else:
            species[idx] = spec.species
            if spec.species != old:
                delta[old] = -1
                delta[spec.species] = 1
    return AppliedDefect(Crystal(crystal.lattice, tuple(species), frac), delta, spec.label)
