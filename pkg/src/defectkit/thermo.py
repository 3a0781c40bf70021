"""Defect formation energies, chemical-potential limits and charge transition levels.

Sign and reference conventions:

* ``E_form = E_tot - E_bulk - sum_i n_i (mu_ref_i + dmu_i) + q (E_vbm + E_F) + E_corr``
  with ``n_i > 0`` for added atoms and ``E_F`` measured from the VBM.
* For a binary host ``dmu_A + dmu_B = dH_form``; ``lam = 0`` is the limit rich
  in the first element of ``rich_order`` (N-rich for hBN), ``lam = 1`` the
  other one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import DegenerateTransition, EmptyInput, MissingChemicalPotential, RangeError


@dataclass(frozen=True)
class HostReference:
    E_bulk: float
    E_vbm: float
    E_gap: float
    dH_form: float
    mu_ref: dict
    rich_order: tuple = ("N", "B")

    def __post_init__(self):
        if not self.E_gap > 0:
            raise ValueError(f"band gap must be positive, got {self.E_gap}")
        if len(self.rich_order) != 2:
            raise ValueError("rich_order names exactly two elements")
        if self.dH_form >= 0:
            warnings.warn(f"dH_form = {self.dH_form} eV >= 0: host is not stable", stacklevel=2)


@dataclass(frozen=True)
class ChemPotentialPoint:
    dmu: dict
    lam: float

    def __post_init__(self):
        for el, v in self.dmu.items():
            if v > 0:
                raise RangeError(f"dmu_{el} = {v} > 0 lies outside the stability region")


@dataclass(frozen=True)
class DefectEntry:
    label: str
    q: int
    E_tot: float
    n: dict
    E_corr: float = 0.0
    multiplicity: str | None = None

    def __post_init__(self):
        if int(self.q) != self.q:
            raise ValueError(f"charge must be an integer, got {self.q}")
        object.__setattr__(self, "q", int(self.q))
        for el, v in self.n.items():
            if int(v) != v:
                raise ValueError(f"stoichiometry change for {el} must be an integer, got {v}")
        object.__setattr__(self, "n", {k: int(v) for k, v in self.n.items()})
        if self.q == 0 and self.E_corr != 0:
            raise ValueError(f"{self.label}: neutral entries cannot carry a charge correction")


@dataclass(frozen=True)
class TransitionLevel:
    """Fermi level (eV above the VBM) where charge ``q_high`` gives way to ``q_low``."""

    q_high: int
    q_low: int
    energy: float
    in_gap: bool = True

    def __post_init__(self):
        if self.q_high <= self.q_low:
            raise DegenerateTransition(f"need q_high > q_low, got {self.q_high}, {self.q_low}")

    @property
    def notation(self) -> str:
        return f"({_charge_label(self.q_low)}/{_charge_label(self.q_high)})"


def _charge_label(q: int) -> str:
    if q == 0:
        return "0"
    return f"{abs(q)}{'+' if q > 0 else '-'}"


def chem_potentials(host: HostReference, lam: float) -> ChemPotentialPoint:
    """Point on the rich-to-rich segment of the binary stability line."""
    if not 0.0 <= lam <= 1.0:
        raise RangeError(f"lambda must lie in [0, 1], got {lam}")
    first, second = host.rich_order
    dmu_first = lam * host.dH_form
    dmu_second = host.dH_form - dmu_first
    return ChemPotentialPoint({first: dmu_first, second: dmu_second}, float(lam))


def condition_lambda(condition) -> float:
    """Translate ``"n-rich"``, ``"b-rich"`` or a number into lambda."""
    if isinstance(condition, str):
        c = condition.strip().lower()
        if c in ("n-rich", "n_rich", "nrich"):
            return 0.0
        if c in ("b-rich", "b_rich", "brich"):
            return 1.0
        try:
            return float(c)
        except ValueError:
            raise RangeError(f"unknown growth condition {condition!r}") from None
    return float(condition)


def _reservoir_term(entry: DefectEntry, host: HostReference, mu: ChemPotentialPoint) -> float:
    total = 0.0
    for el, n in entry.n.items():
        if n == 0:
            continue
        if el not in host.mu_ref:
            raise MissingChemicalPotential(f"no reference chemical potential for {el!r}")
        total += n * (host.mu_ref[el] + mu.dmu.get(el, 0.0))
    return total


def formation_energy(entry: DefectEntry, host: HostReference, mu: ChemPotentialPoint, E_F: float = 0.0) -> float:
    if not 0.0 <= E_F <= host.E_gap:
        warnings.warn(f"Fermi level {E_F} eV lies outside [0, {host.E_gap}] eV", stacklevel=2)
    return (
        entry.E_tot
        - host.E_bulk
        - _reservoir_term(entry, host, mu)
        + entry.q * (host.E_vbm + E_F)
        + entry.E_corr
    )


def _mu_free(entry: DefectEntry, host: HostReference) -> float:
    # the part of E_form(E_F = 0) that differs between charge states
    return entry.E_tot + entry.E_corr + entry.q * host.E_vbm


def charge_transition_level(a: DefectEntry, b: DefectEntry, host: HostReference, mu=None) -> TransitionLevel:
    """Crossing point of the two formation-energy lines.

    Computed from the chemical-potential-free parts of the entries, so the
    result does not depend on ``mu`` at all; ``mu`` is accepted for symmetry
    with :func:`formation_energy`.
    """
    if a.label != b.label:
        raise ValueError(f"entries belong to different defects: {a.label} vs {b.label}")
    if a.q == b.q:
        raise DegenerateTransition(f"{a.label}: both entries have charge {a.q:+d}")
    if {k: v for k, v in a.n.items() if v} != {k: v for k, v in b.n.items() if v}:
        raise ValueError(f"{a.label}: charge states with different stoichiometry")
    hi, lo = (a, b) if a.q > b.q else (b, a)
    eps = (_mu_free(lo, host) - _mu_free(hi, host)) / (hi.q - lo.q)
    return TransitionLevel(hi.q, lo.q, eps, 0.0 <= eps <= host.E_gap)


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    q: int
    E_lo: float
    E_hi: float


@dataclass(frozen=True)
class ChargeProfile:
    """Lower envelope of the formation-energy lines of one defect over [0, E_gap]."""

    label: str
    segments: tuple
    intercepts: dict = field(default_factory=dict)  # q -> E_form at E_F = 0

    @property
    def charges(self) -> list:
        return [s.q for s in self.segments]

    def transition_levels(self) -> list:
        return [
            TransitionLevel(a.q, b.q, a.hi)
            for a, b in zip(self.segments, self.segments[1:])
        ]

    def formation_energy(self, E_F: float) -> float:
        """Envelope value at ``E_F`` (minimum over all charge states)."""
        return min(e + q * E_F for q, e in self.intercepts.items())


def stable_charge_profile(entries, host: HostReference, mu: ChemPotentialPoint) -> ChargeProfile:
    entries = list(entries)
    if not entries:
        raise EmptyInput("no entries to build a charge profile from")
    labels = {e.label for e in entries}
    if len(labels) != 1:
        raise ValueError(f"entries mix defects: {sorted(labels)}")
    label = entries[0].label
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lines: dict = {}
        for e in entries:
            val = formation_energy(e, host, mu, 0.0)
            if e.q not in lines or val < lines[e.q]:
                lines[e.q] = val

    def value(q, x):
        return lines[q] + q * x

    gap = host.E_gap
    # lowest at E_F = 0; among equal values the smaller slope wins just above 0
    start = min(lines, key=lambda q: (lines[q], q))
    current, x = start, 0.0
    segments = []
    while True:
        best_x, best_q = math.inf, None
        for q in lines:
            if q >= current:
                continue
            cross = (lines[q] - lines[current]) / (current - q)
            if cross < x:
                continue
            if cross < best_x or (cross == best_x and q < best_q):
                best_x, best_q = cross, q
        end = min(best_x, gap)
        if best_q is None or best_x >= gap:
            segments.append(Segment(x, gap, current, value(current, x), value(current, gap)))
            break
        if end > x:
            segments.append(Segment(x, end, current, value(current, x), value(current, end)))
        current, x = best_q, end
    return ChargeProfile(label, tuple(segments), dict(lines))


def normalized_ctl(t, E_gap: float) -> float:
    if not E_gap > 0:
        raise ValueError("band gap must be positive")
    energy = t.energy if isinstance(t, TransitionLevel) else float(t)
    return energy / E_gap


@dataclass(frozen=True)
class Polyline:
    label: str
    vertices: tuple  # (E_F, E_form) pairs along the envelope
    kinks: tuple  # (E_F, E_form) at each transition level


def diagram_data(profiles) -> list:
    """Envelope polylines sorted by defect label, vertices ordered by E_F."""
    if isinstance(profiles, dict):
        profiles = profiles.values()
    out = []
    for p in sorted(profiles, key=lambda p: p.label):
        verts = [(p.segments[0].lo, p.segments[0].E_lo)]
        verts += [(s.hi, s.E_hi) for s in p.segments]
        kinks = tuple((s.hi, s.E_hi) for s in p.segments[:-1])
        out.append(Polyline(p.label, tuple(verts), kinks))
    return out


def group_by_label(entries) -> dict:
    groups: dict = {}
    for e in entries:
        groups.setdefault(e.label, []).append(e)
    return dict(sorted(groups.items()))
