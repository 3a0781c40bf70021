import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defectkit.errors import (
    DegenerateTransition,
    EmptyInput,
    MissingChemicalPotential,
    RangeError,
)
from defectkit.fixture import E_GAP, TABLE3, TABLE4, charged_total_energies
from defectkit.thermo import (
    DefectEntry,
    HostReference,
    charge_transition_level,
    chem_potentials,
    condition_lambda,
    diagram_data,
    formation_energy,
    normalized_ctl,
    stable_charge_profile,
)

HOST = HostReference(E_bulk=-100.0, E_vbm=1.0, E_gap=4.88, dH_form=-2.842, mu_ref={"B": -6.0, "N": -8.0})


def entry(q, e, n=None, label="X", corr=0.0):
    return DefectEntry(label, q, e, n or {"B": -1}, corr if q else 0.0)


def test_chemical_potential_limits():
    n_rich = chem_potentials(HOST, 0.0)
    b_rich = chem_potentials(HOST, 1.0)
    assert n_rich.dmu == {"N": 0.0, "B": -2.842}
    assert b_rich.dmu == {"N": -2.842, "B": 0.0}
    half = chem_potentials(HOST, 0.5)
    assert sum(half.dmu.values()) == pytest.approx(-2.842)
    with pytest.raises(RangeError):
        chem_potentials(HOST, 1.5)


def test_condition_lambda():
    assert condition_lambda("n-rich") == 0.0
    assert condition_lambda("B-rich") == 1.0
    assert condition_lambda("0.25") == 0.25
    with pytest.raises(RangeError):
        condition_lambda("o-rich")


def test_formation_energy_terms():
    e = DefectEntry("V_B", -1, -95.0, {"B": -1}, E_corr=0.3)
    mu = chem_potentials(HOST, 0.0)
    got = formation_energy(e, HOST, mu, E_F=1.2)
    want = -95.0 + 100.0 + (-6.0 - 2.842) - (1.0 + 1.2) + 0.3
    assert got == pytest.approx(want, abs=1e-12)


def test_formation_energy_warns_outside_gap():
    with pytest.warns(UserWarning):
        formation_energy(entry(0, 1.0), HOST, chem_potentials(HOST, 0.0), E_F=6.0)


def test_missing_chemical_potential():
    e = DefectEntry("C_B", 0, 1.0, {"C": 1, "B": -1})
    with pytest.raises(MissingChemicalPotential):
        formation_energy(e, HOST, chem_potentials(HOST, 0.0))


def test_entry_validation():
    with pytest.raises(ValueError):
        DefectEntry("X", 0.5, 1.0, {})
    with pytest.raises(ValueError):
        DefectEntry("X", 0, 1.0, {}, E_corr=0.1)


def test_ctl_definition_and_errors():
    hi, lo = entry(1, 0.0), entry(0, 2.0)
    t = charge_transition_level(hi, lo, HOST)
    # E0(0) - E0(+1) = 2 - (0 + 1) = 1
    assert t.energy == pytest.approx(1.0)
    assert t.notation == "(0/1+)"
    assert t.in_gap
    with pytest.raises(DegenerateTransition):
        charge_transition_level(entry(0, 1.0), entry(0, 2.0), HOST)
    with pytest.raises(ValueError):
        charge_transition_level(entry(0, 1.0), entry(1, 2.0, label="Y"), HOST)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(-50, 50), st.floats(-50, 50), st.integers(-3, 3), st.integers(-3, 3))
def test_ctl_independent_of_mu(lam, e1, e2, q1, q2):
    if q1 == q2:
        return
    a, b = entry(q1, e1), entry(q2, e2)
    ref = charge_transition_level(a, b, HOST)
    assert charge_transition_level(a, b, HOST, chem_potentials(HOST, lam)).energy == ref.energy
    # the crossing point equalises the two formation energies
    mu = chem_potentials(HOST, lam)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fa = formation_energy(a, HOST, mu, ref.energy)
        fb = formation_energy(b, HOST, mu, ref.energy)
    assert fa == pytest.approx(fb, abs=1e-9 * max(1.0, abs(fa)))


def test_table3_round_trip_and_table4_sequences():
    host = HostReference(-1000.0, 2.5, E_GAP, -2.842, {"B": -6.7, "N": -8.3})
    mu = chem_potentials(host, 0.0)
    from defectkit.fixture import STOICHIOMETRY

    found = {}
    for label, states in TABLE4.items():
        energies = charged_total_energies(label)
        entries = [DefectEntry(label, q, energies[q], STOICHIOMETRY[label]) for q, _ in states]
        prof = stable_charge_profile(entries, host, mu)
        assert prof.charges == sorted((q for q, _ in states), reverse=True)
        for t in prof.transition_levels():
            found[(label, t.q_low, t.q_high)] = t.energy
    assert set(found) == set(TABLE3)
    for key, val in TABLE3.items():
        assert found[key] == pytest.approx(val, abs=1e-6)


def random_entries(rng, n):
    qs = rng.choice(np.arange(-3, 4), size=n, replace=False)
    return [entry(int(q), float(rng.normal(scale=3.0))) for q in qs]


def test_envelope_matches_dense_minimum():
    """Oracle: minimum over all lines on 10^4 Fermi levels."""
    rng = np.random.default_rng(7)
    mu = chem_potentials(HOST, 0.3)
    xs = np.linspace(0.0, HOST.E_gap, 10_000)
    for _ in range(50):
        ents = random_entries(rng, int(rng.integers(1, 7)))
        prof = stable_charge_profile(ents, HOST, mu)
        lines = np.array([[formation_energy(e, HOST, mu) + e.q * x for x in xs] for e in ents])
        dense = lines.min(axis=0)
        env = np.array([prof.formation_energy(x) for x in xs])
        assert np.allclose(env, dense, atol=1e-12)
        # segment values agree with the minimum at their end points
        for s in prof.segments:
            assert s.E_lo == pytest.approx(prof.formation_energy(s.lo), abs=1e-9)
            assert s.E_hi == pytest.approx(prof.formation_energy(s.hi), abs=1e-9)
        # dense argmin sequence (dropping repeats) equals the profile charges
        qs = np.array([e.q for e in ents])[np.argmin(lines, axis=0)]
        seq = [int(qs[0])] + [int(q) for p, q in zip(qs, qs[1:]) if q != p]
        assert seq == prof.charges
        levels = [t.energy for t in prof.transition_levels()]
        assert levels == sorted(levels)


def test_unstable_state_is_skipped():
    # +1 line lies above the 0 line everywhere in the gap
    ents = [entry(1, 10.0), entry(0, 0.0), entry(-1, 2.0)]
    prof = stable_charge_profile(ents, HOST, chem_potentials(HOST, 0.0))
    assert prof.charges == [0, -1]


def test_profile_errors():
    with pytest.raises(EmptyInput):
        stable_charge_profile([], HOST, chem_potentials(HOST, 0.0))
    with pytest.raises(ValueError):
        stable_charge_profile([entry(0, 0.0), entry(1, 0.0, label="Y")], HOST, chem_potentials(HOST, 0.0))


def test_normalized_ctl_and_diagram():
    assert round(normalized_ctl(3.76, 4.88), 2) == 0.77
    ents = [entry(1, 0.0), entry(0, 2.0)]
    prof = stable_charge_profile(ents, HOST, chem_potentials(HOST, 0.0))
    (poly,) = diagram_data({"X": prof})
    xs = [v[0] for v in poly.vertices]
    assert xs == sorted(xs) and xs[0] == 0.0 and xs[-1] == HOST.E_gap
    assert len(poly.kinks) == 1 and poly.kinks[0][0] == pytest.approx(1.0)
