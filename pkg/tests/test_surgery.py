from __future__ import annotations

import pytest

from surfdefect.circuit import ExportError, export_flow, export_flow_circuits, verify_circuit
from surfdefect.lattice import DefectMap, Pauli, WindowSpec
from surfdefect.surgery import (Processor, SurgeryError, cnot_windows, cnot_yield_trial, data_window,
                                merge_patches, subpatch)


@pytest.fixture(scope="module")
def d3_layout():
    proc = Processor.adapt(WindowSpec(9, 9), DefectMap())
    p = {k: subpatch(proc, data_window(*b, proc.flip)) for k, b in cnot_windows(3).items()}
    mca = merge_patches(proc, p["control"], p["ancilla"], Pauli.Z)
    mat = merge_patches(proc, p["ancilla"], p["target"], Pauli.X)
    return proc, p, mca, mat


def test_cnot_windows():
    assert cnot_windows(3) == {"control": (0, 0, 3, 3), "ancilla": (0, 6, 3, 3), "target": (6, 6, 3, 3)}


def test_subpatches_reach_full_distance(d3_layout):
    _, p, _, _ = d3_layout
    assert {k: (v.distance.d_x, v.distance.d_z) for k, v in p.items()} == {k: (3, 3) for k in p}


def test_merged_windows_include_routing(d3_layout):
    _, _, mca, mat = d3_layout
    assert (mca.window.width, mca.window.height) == (3, 9)
    assert (mat.window.width, mat.window.height) == (9, 3)
    assert len(mca.notes["routing"]) == 9
    assert mca.notes["merge_basis"] == "Z"


def test_merge_orientation_is_checked(d3_layout):
    proc, p, _, _ = d3_layout
    with pytest.raises(SurgeryError, match="routing column"):
        merge_patches(proc, p["control"], p["ancilla"], Pauli.X)
    with pytest.raises(SurgeryError, match="routing row"):
        merge_patches(proc, p["ancilla"], p["target"], Pauli.Z)


def _labels(text):
    return [line.split(": ", 1)[1] for line in text.splitlines() if line.startswith("# observable")]


def test_flow_observables(d3_layout):
    _, p, mca, mat = d3_layout
    flows = export_flow_circuits(p["control"], p["ancilla"], p["target"], mca, mat, rounds=3)
    assert sorted(flows) == ["ancilla_target_X", "ancilla_target_Z", "control_ancilla_X", "control_ancilla_Z"]
    assert _labels(flows["control_ancilla_Z"]) == ["Z_C Z_A (merge outcome)", "Z_C", "Z_A"]
    assert _labels(flows["control_ancilla_X"]) == ["X_(C+A)"]
    assert _labels(flows["ancilla_target_X"]) == ["X_A X_T (merge outcome)", "X_A", "X_T"]
    for text in flows.values():
        assert verify_circuit(text).ok


def test_flow_rejects_overlapping_patches(d3_layout):
    _, p, mca, _ = d3_layout
    with pytest.raises(ExportError, match="overlap"):
        export_flow(p["control"], p["control"], mca, Pauli.Z, Pauli.Z, rounds=1)


def test_defect_free_cnot_trial_succeeds():
    t = cnot_yield_trial(3, DefectMap())
    assert t.success and t.expansions == 0


def test_defective_window_grows():
    # a data defect inside the control patch costs distance and forces an expansion
    t = cnot_yield_trial(3, DefectMap(frozenset({(3, 3)})), method="dqd")
    assert t.expansions >= 1
