from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from surfdefect.code import (SCHEDULE, Check, CheckKind, InvalidPatch, Parity, RawCheck, build_patch, commutes,
                             native_raw_checks, slot_of)
from surfdefect.lattice import Pauli, WindowSpec
from structure import logical_count, structural_problems


@pytest.mark.parametrize("w,h", [(1, 1), (2, 3), (3, 3), (4, 2), (5, 5), (7, 4)])
def test_defect_free_patch_encodes_one_qubit(w, h):
    data, raws = native_raw_checks(WindowSpec(w, h))
    patch = build_patch(WindowSpec(w, h), data, raws)
    assert patch.k == 1 == logical_count(patch)
    assert all(c.kind in (CheckKind.STABILIZER, CheckKind.BOUNDARY) for c in patch.checks)
    assert all(c.parity is Parity.EVERY_ROUND for c in patch.checks)
    assert patch.super_stabilizers == ()
    assert structural_problems(patch) == []


def test_slots_follow_the_schedule():
    a = (4, 4)
    assert [slot_of(a, Pauli.Z, (a[0] + dx, a[1] + dy)) for dx, dy in SCHEDULE[Pauli.Z]] == [1, 2, 3, 4]
    # both types start north-west and end south-east; the middle two differ
    assert SCHEDULE[Pauli.X][0] == SCHEDULE[Pauli.Z][0] and SCHEDULE[Pauli.X][3] == SCHEDULE[Pauli.Z][3]
    assert SCHEDULE[Pauli.X][1:3] == SCHEDULE[Pauli.Z][1:3][::-1]


def test_check_rejects_weight_zero_and_fake_repurposing():
    with pytest.raises(ValueError):
        Check((2, 2), Pauli.Z, (), CheckKind.GAUGE, Parity.ODD, (2, 2))
    with pytest.raises(ValueError):
        Check((2, 2), Pauli.Z, (((1, 1), 1), ((3, 1), 3)), CheckKind.REPURPOSED, Parity.ODD, (2, 2))


def test_weight_one_checks_are_refused():
    data, raws = native_raw_checks(WindowSpec(3, 3))
    raws.append(RawCheck((2, 2), Pauli.X, frozenset({(1, 1)}), (2, 2)))
    with pytest.raises(InvalidPatch, match="weight-1"):
        build_patch(WindowSpec(3, 3), data, raws)


def test_missing_check_changes_logical_count():
    data, raws = native_raw_checks(WindowSpec(3, 3))
    with pytest.raises(InvalidPatch, match="logical"):
        build_patch(WindowSpec(3, 3), data, raws[1:])


def test_gauge_pairs_get_alternating_rounds():
    # remove the central data qubit of a 5x5 code by hand
    spec = WindowSpec(5, 5)
    data, raws = native_raw_checks(spec)
    gone = (5, 5)
    data = [q for q in data if q != gone]
    trimmed = []
    for r in raws:
        qs = r.qubits - {gone}
        if len(qs) >= 2:
            trimmed.append(RawCheck(r.ancilla, r.pauli, qs, r.owner, r.touches_boundary))
    patch = build_patch(spec, data, trimmed)
    gauges = [c for c in patch.checks if c.kind is CheckKind.GAUGE]
    assert sorted(c.weight for c in gauges) == [3, 3, 3, 3]
    assert len(patch.super_stabilizers) == 2
    for c in gauges:
        assert c.parity is (Parity.EVEN if c.pauli is Pauli.X else Parity.ODD)
        assert c.measured_in(0) is (c.pauli is Pauli.X)
    assert structural_problems(patch) == []


@given(st.sampled_from([Pauli.X, Pauli.Z]), st.sampled_from([Pauli.X, Pauli.Z]),
       st.sets(st.sampled_from([(1, 1), (3, 1), (1, 3), (3, 3)]), min_size=2),
       st.sets(st.sampled_from([(1, 1), (3, 1), (1, 3), (3, 3)]), min_size=2))
def test_commutation_is_overlap_parity(p1, p2, s1, s2):
    def mk(p, s):
        return Check((2, 2), p, tuple((q, i + 1) for i, q in enumerate(sorted(s))), CheckKind.GAUGE,
                     Parity.EVEN, (2, 2))
    expected = p1 is p2 or len(s1 & s2) % 2 == 0
    assert commutes(mk(p1, s1), mk(p2, s2)) is expected
