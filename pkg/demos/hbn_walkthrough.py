"""Walk through the bundled hBN fixture: thermodynamics, lifetimes, screening.

Run with ``python3 demos/hbn_walkthrough.py``.  Everything here uses the
shipped synthetic manifest, so no DFT output is needed.
"""

import json

import numpy as np

from defectkit.constants import DEBYE_IN_E_ANGSTROM
from defectkit.core import Lattice, SupercellTransform, hbn_primitive, make_supercell
from defectkit.fixture import PAPER_SUPERCELL_MATRIX, TABLE5, fixture_path
from defectkit.io import read_manifest
from defectkit.optics import dipole_for_lifetime, radiative_lifetime
from defectkit.pipeline import charge_profiles, dossiers, host_reference
from defectkit.screening import report
from defectkit.spin import OrbitalPairSet, zfs_tensor
from defectkit.thermo import normalized_ctl

# %% The paper's 112-atom supercell
sc = make_supercell(hbn_primitive(), SupercellTransform(np.array(PAPER_SUPERCELL_MATRIX)))
print(f"supercell: {len(sc)} atoms, |a|,|b|,|c| = {np.round(sc.lattice.lengths, 3)} A")

# %% Stable charge states and transition levels (N-rich)
m = read_manifest(fixture_path())
gap = host_reference(m).E_gap
for label, prof in charge_profiles(m, 0.0).items():
    levels = ", ".join(
        f"{t.notation} {t.energy:.2f} eV ({normalized_ctl(t, gap):.2f})" for t in prof.transition_levels()
    )
    print(f"{label:4s} charges {prof.charges}  {levels}")

# %% Lifetimes: invert Table 5 to a dipole, then recompute tau
for (label, q), (kind, E, tau) in TABLE5.items():
    mu = dipole_for_lifetime(E, tau)
    name = f"{label}{q:+d}" if q else f"{label}0"
    print(f"{name:6s} {kind} ZPL {E:.2f} eV  mu = {mu / DEBYE_IN_E_ANGSTROM:.2f} D  "
          f"tau = {radiative_lifetime(E, mu):.2f} ns")

# %% Dipolar ZFS of two parallel spins 3 A apart (point-dipole limit is -1.5 * 52.04 / d^3)
L, n, d = 24.0, 64, 3.0
ax = np.arange(n) / n * L
X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
orbs = []
for z0 in (L / 2 - d / 2, L / 2 + d / 2):
    psi = np.exp(-2.0 * ((X - L / 2) ** 2 + (Y - L / 2) ** 2 + (Z - z0) ** 2))
    orbs.append(psi / np.sqrt(np.sum(psi**2) * L**3 / n**3))
t = zfs_tensor(OrbitalPairSet(Lattice.cubic(L), np.stack(orbs), (1, 1)))
print(f"two-spin ZFS: D = {t.D:.3f} GHz, E = {t.E:.1e} GHz")

# %% Screening
rep = report(dossiers(m))
print(json.dumps(rep["summary"], indent=2))
