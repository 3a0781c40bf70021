"""Spin-qubit screening: Weber criteria, the bound-exciton extension, protocol
classification and a deterministic JSON report.

A dossier passes when its classified protocol clears that protocol's gate:

* ``TripletGroundNVlike`` — Weber filter (paramagnetic, enough gap levels).
* ``SingletGroundISC`` — Weber filter, or the named rule
  ``singlet-ground-isc-exception`` (singlet ground, recorded intermediate
  triplet, enough gap levels).
* ``BoundExciton`` — bound-exciton filter (BES > 0, allowed by criteria).

Microwave manipulability and the telecom band are reported but never reject.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field

from ._parallel import parallel_map
from .constants import HC_EV_NM
from .errors import IncompleteDossier
from .optics import TransitionKind, ZplRecord

SINGLET_EXCEPTION = "singlet-ground-isc-exception"

# nm, inclusive lower edge
TELECOM_BANDS = (
    ("O", 1260.0, 1360.0),
    ("E", 1360.0, 1460.0),
    ("S", 1460.0, 1530.0),
    ("C", 1530.0, 1565.0),
    ("L", 1565.0, 1625.0),
    ("U", 1625.0, 1675.0),
)
VISIBLE_NM = (380.0, 750.0)


class Protocol(str, enum.Enum):
    TripletGroundNVlike = "TripletGroundNVlike"
    SingletGroundISC = "SingletGroundISC"
    BoundExciton = "BoundExciton"
    Rejected = "Rejected"


@dataclass(frozen=True)
class GapState:
    energy: float  # eV above the VBM
    occupation: float
    spin: str  # "up" | "down"
    degeneracy: int = 1
    label: str | None = None


@dataclass(frozen=True)
class Criteria:
    require_paramagnetic: bool = True
    min_gap_levels: int = 2
    allow_bound_exciton: bool = True
    max_zfs_for_microwave: float = 20.0  # GHz
    telecom_bands: tuple = TELECOM_BANDS

    def __post_init__(self):
        if int(self.min_gap_levels) != self.min_gap_levels or self.min_gap_levels < 1:
            raise ValueError(f"min_gap_levels must be an integer >= 1, got {self.min_gap_levels}")
        if not self.max_zfs_for_microwave > 0:
            raise ValueError("max_zfs_for_microwave must be positive")
        bands = tuple(tuple(b) for b in self.telecom_bands)
        for name, lo, hi in bands:
            if not 0 < lo < hi:
                raise ValueError(f"band {name}: edges must satisfy 0 < lo < hi")
        object.__setattr__(self, "telecom_bands", bands)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["telecom_bands"] = [list(b) for b in self.telecom_bands]
        return d


@dataclass(frozen=True)
class DefectDossier:
    label: str
    charge: int
    multiplicity: str | None
    E_gap: float
    gap_states: tuple | None = None
    zpl: ZplRecord | None = None
    zfs: tuple | None = None  # (D, E) GHz
    hyperfine: tuple = ()  # (isotope, A MHz) pairs
    intermediate_triplet: float | None = None  # eV above the ground state
    stable_window: tuple | None = None  # (lo, hi) E_F range where this charge is stable

    def __post_init__(self):
        if self.gap_states is not None:
            states = tuple(s if isinstance(s, GapState) else GapState(**s) for s in self.gap_states)
            for s in states:
                if not 0.0 <= s.energy <= self.E_gap:
                    raise ValueError(
                        f"{self.name}: gap state at {s.energy} eV lies outside [0, {self.E_gap}]"
                    )
            object.__setattr__(self, "gap_states", states)

    @property
    def name(self) -> str:
        return f"{self.label}{self.charge:+d}" if self.charge else f"{self.label}0"


@dataclass(frozen=True)
class ScreeningVerdict:
    label: str
    charge: int
    passed: bool
    protocol: Protocol
    reasons: tuple
    microwave_ok: bool | None = None
    telecom_band: str | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.protocol is Protocol.Rejected) == self.passed:
            raise ValueError("pass flag must be false exactly for Rejected verdicts")
        if not self.reasons:
            raise ValueError("a verdict needs at least one reason")


def _distinct_levels(d: DefectDossier) -> int:
    return len({round(s.energy, 6) for s in d.gap_states})


def _require_gap_states(d: DefectDossier):
    if d.multiplicity is None:
        raise IncompleteDossier(f"{d.name}: spin multiplicity missing")
    if d.gap_states is None:
        raise IncompleteDossier(f"{d.name}: gap-state data missing")


def weber_filter(d: DefectDossier, c: Criteria = Criteria()) -> tuple:
    """Paramagnetic ground state and at least ``min_gap_levels`` distinct gap levels."""
    _require_gap_states(d)
    reasons = []
    para = d.multiplicity != "S"
    if para:
        reasons.append(f"weber: paramagnetic ground state ({d.multiplicity})")
    elif c.require_paramagnetic:
        reasons.append("weber: diamagnetic ground state")
    else:
        reasons.append("weber: diamagnetic ground state tolerated (require_paramagnetic off)")
    n = _distinct_levels(d)
    levels_ok = n >= c.min_gap_levels
    reasons.append(
        f"weber: {n} distinct in-gap level(s) {'>=' if levels_ok else '<'} {c.min_gap_levels}"
    )
    ok = (para or not c.require_paramagnetic) and levels_ok
    return ok, reasons


def bound_exciton_filter(d: DefectDossier, c: Criteria = Criteria()) -> tuple:
    """LD transition whose bound exciton is stable (BES > 0, strictly)."""
    z = d.zpl
    if z is None or z.kind is not TransitionKind.LD:
        return False, ["bound-exciton: no LD transition"]
    if z.bes is None:
        raise IncompleteDossier(f"{d.name}: LD transition without bound-exciton stability")
    reasons = []
    stable = z.bes > 0
    reasons.append(f"bound-exciton: BES {z.bes:.2f} eV {'> 0' if stable else '<= 0, dissociates'}")
    if not c.allow_bound_exciton:
        reasons.append("bound-exciton: disallowed by criteria")
    return stable and c.allow_bound_exciton, reasons


def _singlet_exception(d: DefectDossier, c: Criteria) -> tuple:
    ok = (
        d.multiplicity == "S"
        and d.intermediate_triplet is not None
        and _distinct_levels(d) >= c.min_gap_levels
    )
    if ok:
        return True, [f"{SINGLET_EXCEPTION}: intermediate triplet {d.intermediate_triplet:.2f} eV above ground"]
    return False, [f"{SINGLET_EXCEPTION}: not applicable"]


def protocol_classify(d: DefectDossier) -> Protocol:
    """Operating protocol suggested by ground-state spin and optical transition."""
    z = d.zpl
    if d.multiplicity in ("T", "Q") and z is not None and z.kind is TransitionKind.LL:
        return Protocol.TripletGroundNVlike
    if d.multiplicity == "S" and d.intermediate_triplet is not None:
        return Protocol.SingletGroundISC
    if z is not None and z.kind is TransitionKind.LD and z.bes is not None and z.bes > 0:
        return Protocol.BoundExciton
    return Protocol.Rejected


def microwave_manipulability(D: float, E: float, c: Criteria = Criteria()) -> tuple:
    ok = abs(D) <= c.max_zfs_for_microwave
    rel = "<=" if ok else ">"
    return ok, [f"microwave: |D| = {abs(D):.1f} GHz {rel} {c.max_zfs_for_microwave:g} GHz"]


def telecom_band_check(zpl_energy: float, c: Criteria = Criteria()) -> str:
    """Band label for a photon energy, using lambda rounded to 1 nm."""
    if not zpl_energy > 0:
        raise ValueError(f"ZPL must be positive, got {zpl_energy}")
    lam = round(HC_EV_NM / zpl_energy)
    for name, lo, hi in c.telecom_bands:
        if lo <= lam < hi:
            return name
    return "outside-telecom"


def spectral_region(zpl_energy: float) -> str:
    lam = round(HC_EV_NM / zpl_energy)
    if lam < VISIBLE_NM[0]:
        return "ultraviolet"
    if lam <= VISIBLE_NM[1]:
        return "visible"
    return "near-infrared" if lam < 2500 else "infrared"


def screen(d: DefectDossier, c: Criteria = Criteria()) -> ScreeningVerdict:
    """Full verdict for one dossier; incomplete data rejects with a reason."""
    reasons = []
    details: dict = {}
    try:
        _require_gap_states(d)
        weber_ok, r = weber_filter(d, c)
        reasons += r
        protocol = protocol_classify(d)
        if protocol is Protocol.TripletGroundNVlike:
            gate = weber_ok
        elif protocol is Protocol.SingletGroundISC:
            exc_ok, r = _singlet_exception(d, c)
            reasons += r
            gate = weber_ok or exc_ok
        elif protocol is Protocol.BoundExciton:
            gate, r = bound_exciton_filter(d, c)
            reasons += r
        else:
            gate = False
            if d.zpl is None:
                reasons.append("protocol: no optical transition recorded")
            elif d.zpl.kind is TransitionKind.LD:
                gate, r = bound_exciton_filter(d, c)
                reasons += r
                gate = False
            else:
                reasons.append("protocol: LL transition without a triplet ground state or intermediate triplet")
    except IncompleteDossier as exc:
        reasons.append(f"incomplete dossier: {exc}")
        protocol, gate = Protocol.Rejected, False

    if protocol is not Protocol.Rejected and not gate:
        reasons.append(f"protocol: {protocol.value} gate failed")
        protocol = Protocol.Rejected
    if protocol is not Protocol.Rejected:
        reasons.append(f"protocol: {protocol.value}")

    microwave = None
    if d.zfs is not None:
        microwave, r = microwave_manipulability(d.zfs[0], d.zfs[1], c)
        reasons += r
        details["zfs"] = {"D": d.zfs[0], "E": d.zfs[1]}
    band = None
    if d.zpl is not None:
        band = telecom_band_check(d.zpl.E_zpl, c)
        lam = round(HC_EV_NM / d.zpl.E_zpl)
        region = band if band != "outside-telecom" else spectral_region(d.zpl.E_zpl)
        reasons.append(f"telecom: ZPL {d.zpl.E_zpl:.2f} eV -> {lam} nm ({region})")
        details["zpl"] = {"kind": d.zpl.kind.value, "E_zpl": d.zpl.E_zpl, "wavelength_nm": lam,
                          "tau_ns": d.zpl.tau, "bes": d.zpl.bes}
    if d.hyperfine:
        details["hyperfine"] = [{"isotope": i, "A": a} for i, a in d.hyperfine]
    if d.stable_window is not None:
        details["stable_window"] = list(d.stable_window)
    return ScreeningVerdict(d.label, d.charge, protocol is not Protocol.Rejected, protocol,
                            tuple(reasons), microwave, band, details)


def screen_all(dossiers, c: Criteria = Criteria()) -> list:
    """Verdicts in (label, charge) order; evaluation may run on worker threads."""
    dossiers = sorted(dossiers, key=lambda d: (d.label, d.charge))
    return parallel_map(lambda d: screen(d, c), dossiers)


def _clean(x):
    # JSON has no NaN/inf; floats are emitted via repr by json itself
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def report(dossiers, c: Criteria = Criteria()) -> dict:
    dossiers = list(dossiers)
    if not dossiers:
        raise ValueError("report needs at least one dossier")
    verdicts = screen_all(dossiers, c)
    rows = []
    for v in verdicts:
        rows.append({
            "label": v.label,
            "charge": v.charge,
            "name": f"{v.label}{v.charge:+d}" if v.charge else f"{v.label}0",
            "pass": v.passed,
            "protocol": v.protocol.value,
            "reasons": list(v.reasons),
            "microwave_ok": v.microwave_ok,
            "telecom_band": v.telecom_band,
            "details": v.details,
        })
    by_protocol = {p.value: sum(1 for v in verdicts if v.protocol is p) for p in Protocol}
    return _clean({
        "schema": "defectkit.screening-report/1",
        "criteria": c.to_dict(),
        "summary": {
            "total": len(verdicts),
            "candidates": sum(v.passed for v in verdicts),
            "by_protocol": by_protocol,
            "candidate_names": [r["name"] for r in rows if r["pass"]],
        },
        "verdicts": rows,
    })


def report_json(dossiers, c: Criteria = Criteria()) -> str:
    return json.dumps(report(dossiers, c), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
