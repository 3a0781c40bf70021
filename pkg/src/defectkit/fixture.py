"""Paper reference tables and the synthetic hBN fixture manifest built from them.

The paper reports formation energies, CTLs and spin data but not the raw total
energies behind them, so the fixture inverts the published numbers: neutral
``E_tot`` values reproduce the Table 2 N-rich formation energies against a
synthetic host, and charged states are chained so that every CTL of Table 3
comes out exactly.  Charge corrections are set to zero.  Gap states for V_B⁻¹
and V_N⁻¹ are illustrative placeholders; the other levels follow the text.

Regenerate the shipped copy with ``python3 -m defectkit.fixture``.
"""

from __future__ import annotations

import json
import sys
from importlib import resources

import numpy as np

from .core import SupercellTransform, hbn_primitive, make_supercell

PAPER_SUPERCELL_MATRIX = ((2, 2, -5), (4, 4, -3), (1, -1, 0))
E_GAP = 4.88
DH_FORM = -2.842

STOICHIOMETRY = {
    "V_B": {"B": -1},
    "V_N": {"N": -1},
    "B_N": {"B": 1, "N": -1},
    "N_B": {"N": 1, "B": -1},
    "B_i": {"B": 1},
    "N_i": {"N": 1},
}

# Table 2, neutral formation energies (eV)
TABLE2 = {
    "N_B": (4.057, 9.741),
    "N_i": (5.036, 7.878),
    "V_B": (7.330, 10.172),
    "V_N": (8.173, 5.331),
    "B_i": (8.934, 6.091),
    "B_N": (10.192, 4.508),
}

# Table 3, r2SCAN: (label, q_low, q_high) -> eV
TABLE3 = {
    ("V_B", -2, -1): 3.76,
    ("V_B", -1, 0): 1.10,
    ("V_N", -1, 0): 3.81,
    ("V_N", 0, 1): 2.82,
    ("B_N", -1, 0): 2.77,
    ("B_N", 0, 1): 0.34,
    ("N_B", 0, 1): 1.48,
    ("B_i", -2, -1): 4.46,
    ("B_i", -1, 0): 2.77,
    ("B_i", 0, 1): 1.51,
    ("B_i", 1, 2): 1.37,
    ("N_i", -2, -1): 4.10,
    ("N_i", -1, 0): 1.09,
    ("N_i", 0, 1): 0.24,
}

# Table 4, stable charges and ground-state spin multiplicity
TABLE4 = {
    "V_B": ((-2, "D"), (-1, "T"), (0, "D")),
    "V_N": ((-1, "S"), (0, "D"), (1, "S")),
    "B_N": ((-1, "D"), (0, "S"), (1, "D")),
    "N_B": ((0, "S"), (1, "D")),
    "B_i": ((-2, "D"), (-1, "S"), (0, "D"), (1, "T"), (2, "D")),
    "N_i": ((-2, "D"), (-1, "S"), (0, "D"), (1, "T")),
}

# Table 5: (label, q) -> (kind, ZPL eV, lifetime ns)
TABLE5 = {
    ("V_B", -1): ("LL", 1.62, 583.50),
    ("B_N", 0): ("LL", 1.01, 61.88),
    ("N_i", 1): ("LD", 0.63, 246.01),
    ("B_i", 1): ("LD", 1.61, 79.76),
}

# ZFS (GHz) and hyperfine (MHz) quoted in the text: reference metadata only
PAPER_ZFS = {
    ("V_B", -1): (3.1, 0.0),
    ("B_N", 0): (8.3, 0.0),
    ("B_i", 1): (7.5, 0.19),
    ("N_i", 1): (48.3, 0.08),
}
PAPER_HYPERFINE = {
    ("V_B", -1): (("14N", 34.0),),
    ("B_N", 0): (("11B", 140.0),),
    ("N_i", 1): (("11B", 34.0),),
    ("B_i", 1): (("14N", 28.0),),
}

CANDIDATES = {
    ("V_B", -1): "TripletGroundNVlike",
    ("B_N", 0): "SingletGroundISC",
    ("B_i", 1): "BoundExciton",
    ("N_i", 1): "BoundExciton",
}

# synthetic host references (eV)
E_BULK = -1000.0
E_VBM = 2.5
MU_REF = {"B": -6.7, "N": -8.3}
DIELECTRIC = [[4.95, 0.0, 0.0], [0.0, 4.95, 0.0], [0.0, 0.0, 3.38]]


def _gs(energy, occupation, spin, degeneracy=1, label=None):
    d = {"energy": energy, "occupation": occupation, "spin": spin, "degeneracy": degeneracy}
    if label:
        d["label"] = label
    return d


GAP_STATES = {
    # illustrative a/e manifold (the paper shows it only graphically)
    ("V_B", -1): [
        _gs(0.92, 1, "up", 1, "a1'"), _gs(1.35, 2, "up", 2, "e'"),
        _gs(1.18, 1, "down", 1, "a1'"), _gs(2.80, 0, "down", 2, "e'"),
    ],
    ("V_N", -1): [_gs(3.95, 2, "up", 1, "a1")],
    ("B_N", 0): [_gs(0.66, 2, "up", 2, "e"), _gs(2.45, 0, "up", 1, "a1")],
    ("B_i", 1): [
        _gs(1.24, 1, "up"), _gs(1.88, 1, "up"),
        _gs(3.30, 0, "down"), _gs(4.06, 0, "down"),
    ],
    ("N_i", 1): [_gs(1.68, 0, "down"), _gs(1.70, 0, "down")],
}

EXTRAS = {
    ("V_B", -1): {"point_group": "D3h", "S": 1.0},
    ("B_N", 0): {"point_group": "C3v", "S": 0.0, "intermediate_triplet": 0.73},
    ("B_i", 1): {"point_group": "C1", "S": 1.0},
    ("N_i", 1): {"point_group": "C1", "S": 1.0},
}

# (label, q) -> CTL pair that the LD bound exciton dissociates through
LD_CTL = {("N_i", 1): [0, 1], ("B_i", 1): [1, 2]}


def paper_supercell_lattice() -> list:
    t = SupercellTransform(np.array(PAPER_SUPERCELL_MATRIX))
    sc = make_supercell(hbn_primitive(), t)
    return [[float(x) for x in row] for row in sc.lattice.vectors]


def neutral_total_energy(label: str) -> float:
    """E_tot that gives the Table 2 N-rich formation energy (dmu_N = 0, dmu_B = dH)."""
    dmu = {"N": 0.0, "B": DH_FORM}
    reservoir = sum(n * (MU_REF[el] + dmu[el]) for el, n in STOICHIOMETRY[label].items())
    return TABLE2[label][0] + E_BULK + reservoir


def charged_total_energies(label: str) -> dict:
    """E_tot per charge so that consecutive lines cross at the Table 3 CTLs."""
    charges = [q for q, _ in TABLE4[label]]
    e0 = {0: neutral_total_energy(label)}  # E_tot + q E_vbm
    for q in sorted(c for c in charges if c > 0):
        e0[q] = e0[q - 1] - TABLE3[(label, q - 1, q)]
    for q in sorted((c for c in charges if c < 0), reverse=True):
        e0[q] = e0[q + 1] + TABLE3[(label, q, q + 1)]
    return {q: e0[q] - q * E_VBM for q in charges}


def build_hbn_manifest() -> dict:
    defects = []
    for label in sorted(TABLE4):
        energies = charged_total_energies(label)
        for q, mult in TABLE4[label]:
            key = (label, q)
            d = {
                "label": label,
                "charge": q,
                "E_tot": energies[q],
                "n": dict(STOICHIOMETRY[label]),
                "multiplicity": mult,
            }
            if q != 0:
                d["correction"] = {"E_corr": 0.0}
            d.update(EXTRAS.get(key, {}))
            if key in GAP_STATES:
                d["gap_states"] = GAP_STATES[key]
            if key in TABLE5:
                kind, e, tau = TABLE5[key]
                z = {"kind": kind, "E_zpl": e, "tau_ns": tau}
                if key in LD_CTL:
                    z["ctl"] = LD_CTL[key]
                d["zpl"] = z
            if key in PAPER_ZFS:
                D, E = PAPER_ZFS[key]
                d["zfs"] = {"D": D, "E": E}
            if key in PAPER_HYPERFINE:
                d["hyperfine"] = [{"isotope": i, "A": a} for i, a in PAPER_HYPERFINE[key]]
            defects.append(d)
    return {
        "name": "hBN intrinsic defects (r2SCAN, synthetic inversion of Tables 2-5)",
        "note": "Total energies are synthetic and reproduce the published formation energies and "
                "CTLs; ZFS and hyperfine values are reference metadata, not computed here; "
                "V_B-1 and V_N-1 gap states are illustrative.",
        "host": {
            "E_bulk": E_BULK,
            "E_vbm": E_VBM,
            "E_gap": E_GAP,
            "dH_form": DH_FORM,
            "mu_ref": dict(MU_REF),
            "rich_order": ["N", "B"],
            "refractive_index": 2.1,
            "supercell_lattice": paper_supercell_lattice(),
            "dielectric": DIELECTRIC,
        },
        "defects": defects,
    }


def fixture_text() -> str:
    return json.dumps(build_hbn_manifest(), indent=2, sort_keys=False) + "\n"


def fixture_path():
    """Path of the shipped fixture manifest inside the package."""
    return resources.files("defectkit").joinpath("data/hbn_fixture.json")


def main() -> int:
    sys.stdout.write(fixture_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
