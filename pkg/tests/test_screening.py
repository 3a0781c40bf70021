import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defectkit.errors import IncompleteDossier
from defectkit.io.manifest import read_manifest
from defectkit.optics import ZplRecord
from defectkit.pipeline import dossiers as build_dossiers
from defectkit.screening import (
    SINGLET_EXCEPTION,
    Criteria,
    DefectDossier,
    GapState,
    Protocol,
    bound_exciton_filter,
    microwave_manipulability,
    protocol_classify,
    report,
    report_json,
    screen,
    screen_all,
    telecom_band_check,
    weber_filter,
)

GAP = 4.88


def levels(*energies):
    return tuple(GapState(e, 1.0, "up") for e in energies)


def dossier(label="X", q=0, mult="T", gaps=(1.0, 2.0), zpl=None, zfs=None, triplet=None):
    return DefectDossier(label, q, mult, GAP, levels(*gaps) if gaps is not None else None,
                         zpl, zfs, (), triplet)


VB = dossier("V_B", -1, "T", (1.2, 2.9, 3.1), ZplRecord("V_B", "LL", 1.62, 583.5), (3.1, 0.0))
VN = dossier("V_N", -1, "S", (2.0, 3.0), ZplRecord("V_N", "LL", 2.0))
BN = dossier("B_N", 0, "S", (1.8, 3.0), ZplRecord("B_N", "LL", 1.01, 61.88), triplet=0.73)
BI = dossier("B_i", 1, "T", (2.5, 3.3), ZplRecord("B_i", "LD", 1.61, 79.76, bes=0.24), (7.5, 0.1))
NI = dossier("N_i", 1, "T", (2.2, 3.6), ZplRecord("N_i", "LD", 0.63, 246.01, bes=0.39), (48.3, 1.0))


def test_weber_examples():
    ok, reasons = weber_filter(VB)
    assert ok
    ok, reasons = weber_filter(VN)
    assert not ok and any("diamagnetic ground state" in r for r in reasons)
    ok, reasons = weber_filter(dossier(mult="D", gaps=()))
    assert not ok and any("0 distinct in-gap level(s) < 2" in r for r in reasons)
    with pytest.raises(IncompleteDossier):
        weber_filter(dossier(gaps=None))
    with pytest.raises(IncompleteDossier):
        weber_filter(dossier(mult=None))


def test_degenerate_levels_count_once():
    assert not weber_filter(dossier(gaps=(1.5, 1.5)))[0]


def test_bound_exciton_examples():
    assert bound_exciton_filter(BI)[0]
    neg = dossier(zpl=ZplRecord("x", "LD", 1.0, bes=-0.1))
    zero = dossier(zpl=ZplRecord("x", "LD", 1.0, bes=0.0))
    assert not bound_exciton_filter(neg)[0]
    assert not bound_exciton_filter(zero)[0]
    with pytest.raises(IncompleteDossier):
        bound_exciton_filter(dossier(zpl=ZplRecord("x", "LD", 1.0)))
    assert not bound_exciton_filter(BI, Criteria(allow_bound_exciton=False))[0]


def test_protocols():
    assert protocol_classify(VB) is Protocol.TripletGroundNVlike
    assert protocol_classify(BN) is Protocol.SingletGroundISC
    assert protocol_classify(NI) is Protocol.BoundExciton
    assert protocol_classify(BI) is Protocol.BoundExciton
    assert protocol_classify(VN) is Protocol.Rejected


def test_singlet_exception_is_named():
    v = screen(BN)
    assert v.passed and v.protocol is Protocol.SingletGroundISC
    assert any(r.startswith(SINGLET_EXCEPTION) for r in v.reasons)


def test_microwave():
    assert microwave_manipulability(3.1, 0.0)[0]
    assert not microwave_manipulability(48.3, 1.0)[0]
    assert microwave_manipulability(20.0, 0.0)[0]
    assert microwave_manipulability(-20.0, 0.0)[0]
    v = screen(NI)
    assert v.passed and v.microwave_ok is False


@pytest.mark.parametrize(
    "E,band",
    [(0.8, "C"), (1.01, "outside-telecom"), (1.62, "outside-telecom"), (0.95, "O"), (0.63, "outside-telecom")],
)
def test_telecom(E, band):
    assert telecom_band_check(E) == band


def test_telecom_reason_names_region():
    v = screen(VB)
    assert "telecom: ZPL 1.62 eV -> 765 nm (near-infrared)" in v.reasons
    with pytest.raises(ValueError):
        telecom_band_check(0.0)


def test_incomplete_dossier_rejects():
    v = screen(dossier(gaps=None))
    assert not v.passed and v.protocol is Protocol.Rejected
    assert v.reasons[0].startswith("incomplete dossier:")


def test_dossier_invariants():
    with pytest.raises(ValueError):
        dossier(gaps=(5.0,))
    with pytest.raises(ValueError):
        Criteria(min_gap_levels=0)
    with pytest.raises(ValueError):
        Criteria(max_zfs_for_microwave=0.0)


def test_candidate_set():
    verdicts = screen_all([VB, VN, BN, BI, NI])
    passed = {(v.label, v.charge): v.protocol for v in verdicts if v.passed}
    assert passed == {
        ("V_B", -1): Protocol.TripletGroundNVlike,
        ("B_N", 0): Protocol.SingletGroundISC,
        ("B_i", 1): Protocol.BoundExciton,
        ("N_i", 1): Protocol.BoundExciton,
    }


def test_single_rejected_report():
    r = report([VN])
    assert r["summary"]["total"] == 1 and r["summary"]["candidates"] == 0
    (row,) = r["verdicts"]
    assert row["protocol"] == "Rejected" and row["reasons"]
    with pytest.raises(ValueError):
        report([])


def test_fixture_report_and_determinism(hbn_manifest_path):
    m = read_manifest(hbn_manifest_path)
    ds = build_dossiers(m)
    text = report_json(ds)
    assert report_json(list(reversed(ds))) == text
    r = json.loads(text)
    assert sorted(r["summary"]["candidate_names"]) == ["B_N0", "B_i+1", "N_i+1", "V_B-1"]
    for row in r["verdicts"]:
        if not row["pass"]:
            assert row["reasons"]


def test_threads_do_not_change_report(hbn_manifest_path, monkeypatch):
    ds = build_dossiers(read_manifest(hbn_manifest_path))
    serial = report_json(ds)
    monkeypatch.setenv("DEFECTKIT_THREADS", "4")
    assert report_json(ds) == serial


def _rejection_names(reasons):
    return [r.split(":")[0] for r in reasons]


gap_lists = st.lists(st.floats(0.0, GAP), max_size=4)
zpls = st.one_of(
    st.none(),
    st.builds(lambda e: ZplRecord("x", "LL", e), st.floats(0.3, 4.0)),
    st.builds(lambda e, b: ZplRecord("x", "LD", e, bes=b), st.floats(0.3, 4.0), st.floats(-1, 1)),
)
random_dossier = st.builds(
    lambda m, g, z, d, t: DefectDossier("X", 0, m, GAP, levels(*g), z, (d, 0.0), (), t),
    st.sampled_from(["S", "D", "T", "Q"]),
    gap_lists,
    zpls,
    st.floats(-60, 60),
    st.one_of(st.none(), st.floats(0.1, 2.0)),
)


@settings(max_examples=300, deadline=None)
@given(random_dossier)
def test_relaxing_criteria_is_monotone(d):
    strict = Criteria(min_gap_levels=3, allow_bound_exciton=False, max_zfs_for_microwave=5.0)
    steps = [
        strict,
        Criteria(min_gap_levels=2, allow_bound_exciton=False, max_zfs_for_microwave=5.0),
        Criteria(min_gap_levels=2, allow_bound_exciton=True, max_zfs_for_microwave=5.0),
        Criteria(min_gap_levels=1, allow_bound_exciton=True, max_zfs_for_microwave=50.0),
        Criteria(require_paramagnetic=False, min_gap_levels=1, allow_bound_exciton=True,
                 max_zfs_for_microwave=50.0),
    ]
    prev = False
    for c in steps:
        v = screen(d, c)
        assert v.passed or not prev
        prev = v.passed
        assert v.reasons
        if not v.passed:
            assert {"weber", "protocol", "bound-exciton", "incomplete dossier"} & set(_rejection_names(v.reasons))


def test_thread_count_from_env(monkeypatch):
    from defectkit._parallel import thread_count

    monkeypatch.setenv("DEFECTKIT_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("DEFECTKIT_THREADS", "many")
    assert thread_count() == 1
    monkeypatch.delenv("DEFECTKIT_THREADS")
    assert thread_count() == 1
