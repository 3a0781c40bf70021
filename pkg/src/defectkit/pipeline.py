"""Manifest-driven glue: host references, corrected entries, profiles and dossiers."""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from ._parallel import parallel_map
from .core import Lattice
from .finite_size import CorrectionResult, total_correction
from .io.manifest import DefectRecord, ProjectManifest
from .io.volumetric import parse_volumetric
from .io.wavefunction import read_wavefunctions
from .optics import (
    TransitionSpec,
    ZplRecord,
    bound_exciton_stability,
    dipole_moment,
    radiative_lifetime,
    zpl,
)
from .screening import DefectDossier
from .spin.hyperfine import NucleusSpec, hyperfine_tensor
from .spin.zfs import OrbitalPairSet, zfs_tensor
from .thermo import (
    ChargeProfile,
    DefectEntry,
    HostReference,
    charge_transition_level,
    chem_potentials,
    group_by_label,
    stable_charge_profile,
)


def host_reference(m: ProjectManifest) -> HostReference:
    h = m.host
    return HostReference(h.E_bulk, h.E_vbm, h.E_gap, h.dH_form, dict(h.mu_ref), tuple(h.rich_order))


def record_correction(m: ProjectManifest, rec: DefectRecord, tol: float = 1e-8, eta=None) -> CorrectionResult:
    """Ewald image term plus alignment from the host cell and dielectric."""
    if m.host.supercell_lattice is None:
        raise ValueError("host.supercell_lattice is needed to compute corrections")
    corr = rec.correction or {}
    eps = corr.get("dielectric", m.host.dielectric)
    lattice = Lattice(np.asarray(m.host.supercell_lattice, dtype=float))
    return total_correction(lattice, rec.charge, 1.0 if eps is None else eps,
                            float(corr.get("delta_V", 0.0)), tol, eta)


def _e_corr(m: ProjectManifest, rec: DefectRecord, tol: float, eta) -> float:
    corr = rec.correction or {}
    if rec.charge == 0:
        return 0.0
    if "E_corr" in corr:
        return float(corr["E_corr"])
    if m.host.supercell_lattice is not None:
        return record_correction(m, rec, tol, eta).E_corr
    warnings.warn(f"{rec.label} q={rec.charge:+d}: no correction data, using E_corr = 0", stacklevel=3)
    return 0.0


def defect_entries(m: ProjectManifest, tol: float = 1e-8, eta=None) -> list:
    def build(rec):
        return DefectEntry(rec.label, rec.charge, rec.E_tot, dict(rec.n),
                           _e_corr(m, rec, tol, eta), rec.multiplicity)

    return parallel_map(build, m.defects)


def charge_profiles(m: ProjectManifest, lam: float, entries=None) -> dict:
    host = host_reference(m)
    mu = chem_potentials(host, lam)
    entries = defect_entries(m) if entries is None else entries
    return {label: stable_charge_profile(group, host, mu)
            for label, group in group_by_label(entries).items()}


def stable_window(profile: ChargeProfile, q: int):
    segs = [s for s in profile.segments if s.q == q]
    return (segs[0].lo, segs[0].hi) if segs else None


def zpl_record(rec: DefectRecord, entries, host: HostReference, n_r: float) -> ZplRecord | None:
    z = rec.zpl
    if z is None:
        return None
    name = f"{rec.label}{rec.charge:+d}"
    E = float(z["E_zpl"]) if "E_zpl" in z else zpl(float(z["E_excited"]), float(z["E_ground"]))
    tau = z.get("tau_ns")
    if tau is None and z.get("mu_bar") is not None and z["mu_bar"] > 0:
        tau = radiative_lifetime(E, float(z["mu_bar"]), n_r)
    bes = None
    if z["kind"] == "LD":
        ctl = z.get("ctl_value")
        if ctl is None and "ctl" in z:
            q1, q2 = z["ctl"]
            pick = {e.q: e for e in entries if e.label == rec.label}
            if q1 in pick and q2 in pick:
                ctl = charge_transition_level(pick[q1], pick[q2], host).energy
        if ctl is not None:
            bes, _ = bound_exciton_stability(E, float(ctl))
    return ZplRecord(name, z["kind"], E, None if tau is None else float(tau), bes)


def dossiers(m: ProjectManifest, lam: float = 0.0, entries=None) -> list:
    host = host_reference(m)
    entries = defect_entries(m) if entries is None else entries
    profiles = charge_profiles(m, lam, entries)
    out = []
    for rec in m.defects:
        zfs = None
        if rec.zfs is not None:
            zfs = (float(rec.zfs["D"]), float(rec.zfs.get("E", 0.0)))
        out.append(DefectDossier(
            label=rec.label,
            charge=rec.charge,
            multiplicity=rec.multiplicity,
            E_gap=host.E_gap,
            gap_states=None if rec.gap_states is None else tuple(rec.gap_states),
            zpl=zpl_record(rec, entries, host, m.host.refractive_index),
            zfs=zfs,
            hyperfine=tuple((h["isotope"], float(h["A"])) for h in rec.hyperfine or ()),
            intermediate_triplet=rec.intermediate_triplet,
            stable_window=stable_window(profiles[rec.label], rec.charge),
        ))
    return out


# file-backed calculations


def _require_file(rec: DefectRecord, key: str) -> Path:
    if key not in rec.files:
        raise ValueError(f"{rec.label} q={rec.charge:+d}: manifest lists no '{key}' file")
    return rec.files[key]


def record_lifetime(m: ProjectManifest, rec: DefectRecord) -> dict:
    """Dipole and lifetime from the record's wavefunction file and transition spec."""
    if rec.transition is None:
        raise ValueError(f"{rec.label} q={rec.charge:+d}: no transition specified")
    wfs = read_wavefunctions(_require_file(rec, "wavefunctions").read_bytes())
    t = rec.transition
    kind = rec.zpl["kind"] if rec.zpl else "LL"
    spec = TransitionSpec(kind, int(t["spin"]), int(t["initial_band"]), t["final_band"])
    dip = dipole_moment(wfs, spec)
    b = wfs.block(spec.spin, 0)
    E = None
    if rec.zpl is not None:
        z = rec.zpl
        E = float(z["E_zpl"]) if "E_zpl" in z else zpl(float(z["E_excited"]), float(z["E_ground"]))
    if E is None:
        E = abs(float(b.eigenvalues[spec.final_bands[0]] - b.eigenvalues[spec.initial_band]))
    tau = radiative_lifetime(E, dip.mean, m.host.refractive_index)
    return {"label": rec.label, "charge": rec.charge, "E": E, "mu_bar": dip.mean, "tau_ns": tau}


def record_hyperfine(rec: DefectRecord) -> list:
    path = _require_file(rec, "spin_density")
    grid = parse_volumetric(path.read_text(), block=int(rec.files.get("spin_density_block", 0)))
    S = rec.S
    if S is None:
        raise ValueError(f"{rec.label} q={rec.charge:+d}: spin S is required for hyperfine")
    out = []
    for i, nuc in enumerate(rec.nuclei or ()):
        spec = NucleusSpec(tuple(nuc["position"]), nuc["isotope"])
        t = hyperfine_tensor(float(S), spec, grid)
        out.append({"nucleus": nuc.get("label", f"{nuc['isotope']}#{i}"), "isotope": nuc["isotope"],
                    "A_xx": t.A_xx, "A_yy": t.A_yy, "A_zz": t.A_zz, "a_iso": t.a_iso})
    return out


def record_zfs(rec: DefectRecord, all_occupied: bool = False) -> dict:
    """ZFS over the record's orbital grids (only ``localized`` ones unless ``all_occupied``)."""
    orbs = rec.files.get("orbitals") or []
    if not all_occupied:
        orbs = [o for o in orbs if o.get("localized", True)]
    if not orbs:
        raise ValueError(f"{rec.label} q={rec.charge:+d}: no orbital grids listed")
    grids = [parse_volumetric(Path(o["path"]).read_text()) for o in orbs]
    spins = [1 if o["spin"] == "up" else -1 for o in orbs]
    pairs = OrbitalPairSet.from_grids(grids, spins, rec.S)
    t = zfs_tensor(pairs)
    return {"label": rec.label, "charge": rec.charge, "D": t.D, "E": t.E,
            "D_ab": [list(map(float, row)) for row in t.D_ab]}
