from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from surfdefect.lattice import (DefectMap, DefectRates, Padding, Pauli, WindowSpec, build_window,
                                defect_map_from_json, is_ancilla, is_data, make_link, native_pauli,
                                sample_defects)


def test_d3_layout_counts():
    lat = build_window(WindowSpec(3, 3))
    assert len(lat.data) == 9
    assert len(lat.native_ancillas) == 8
    weights = sorted(len(lat.support(a)) for a in lat.native_ancillas)
    assert weights == [2, 2, 2, 2, 4, 4, 4, 4]
    assert WindowSpec(3, 3).target_distance == (3, 3)


def test_coordinates_have_fixed_parity():
    lat = build_window(WindowSpec(5, 4))
    assert all(is_data(q) for q in lat.data)
    assert all(is_ancilla(a) for a in lat.ancillas)
    assert all(max(abs(q[0] - a[0]), abs(q[1] - a[1])) == 1 for q, a in lat.links)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_ancilla_padding_fills_the_perimeter(d):
    plain = build_window(WindowSpec(d, d))
    padded = build_window(WindowSpec(d, d, padding="ancilla"))
    assert len(padded.ancillas) - len(plain.ancillas) == 2 * (d - 1)
    assert padded.perimeter <= padded.ancillas
    assert len(padded.perimeter) == 4 * (d - 1)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_d_plus_1_padding_cost(d):
    plain = build_window(WindowSpec(d, d))
    bigger = build_window(WindowSpec(d, d, padding="d_plus_1"))
    extra = (len(bigger.data) + len(bigger.ancillas)) - (len(plain.data) + len(plain.ancillas))
    assert extra == 4 * d + 2
    assert WindowSpec(d, d, padding="d_plus_1").target_distance == (d, d)


def _hand_counts(w: int, h: int) -> tuple[int, int]:
    """(weight-4 checks, weight-2 checks) of a w x h rotated layout, counted by hand rules."""
    bulk = (w - 1) * (h - 1)
    edge = 0
    for i in range(w - 1):
        x = 2 + 2 * i
        edge += native_pauli((x, 0)) is Pauli.X  # top, X boundary
        edge += native_pauli((x, 2 * h)) is Pauli.X  # bottom
    for j in range(h - 1):
        y = 2 + 2 * j
        edge += native_pauli((0, y)) is Pauli.Z
        edge += native_pauli((2 * w, y)) is Pauli.Z
    return bulk, edge


@pytest.mark.parametrize("w", range(1, 10))
@pytest.mark.parametrize("h", range(1, 10))
def test_component_counts(w, h):
    lat = build_window(WindowSpec(w, h))
    bulk, edge = _hand_counts(w, h)
    assert len(lat.data) == w * h
    assert len(lat.native_ancillas) == bulk + edge
    assert len(lat.links) == 4 * bulk + 2 * edge


def test_odd_square_window_has_one_logical_worth_of_checks():
    for d in (3, 5, 7, 9):
        assert len(build_window(WindowSpec(d, d)).native_ancillas) == d * d - 1


@given(st.integers(1, 8), st.integers(1, 8))
def test_parity_flip_swaps_types_only(w, h):
    a = build_window(WindowSpec(w, h, padding="ancilla"))
    b = build_window(WindowSpec(w, h, padding="ancilla", pauli_parity_flip=True))
    assert a.data == b.data and a.perimeter == b.perimeter
    for anc in a.perimeter:
        assert a.native_pauli(anc) is not b.native_pauli(anc)


def test_zero_rates_give_empty_map():
    dm = sample_defects(WindowSpec(9, 9), DefectRates.uniform(0.0), 123)
    assert dm.empty


@given(st.integers(0, 2**64 - 1))
def test_sampling_is_deterministic(seed):
    spec = WindowSpec(5, 5)
    assert sample_defects(spec, DefectRates.uniform(0.1), seed) == sample_defects(spec, DefectRates.uniform(0.1), seed)


def test_sampled_defect_count_matches_binomial_mean():
    spec = WindowSpec(17, 17)
    counts = build_window(spec).component_counts()
    total = sum(counts.values())
    q = 0.01
    n = 1000
    mean = np.mean([len(sample_defects(spec, DefectRates.uniform(q), s)) for s in range(n)])
    sigma = np.sqrt(total * q * (1 - q) / n)
    assert abs(mean - q * total) < 3 * sigma


def test_sampled_defects_lie_inside_the_window():
    for pad in Padding:
        spec = WindowSpec(5, 5, padding=pad)
        dm = sample_defects(spec, DefectRates.uniform(0.2), 7)
        dm.validate(build_window(spec))


def test_json_round_trip():
    spec = WindowSpec(5, 5, padding="ancilla")
    dm = sample_defects(spec, DefectRates.uniform(0.08), 4)
    text = json.dumps(dm.to_json_dict(spec))
    spec2, dm2 = defect_map_from_json(text)
    assert spec2 == spec
    assert dm2 == dm
    assert dm2.seed == 4


def test_json_rejects_out_of_window_defects():
    with pytest.raises(ValueError, match="outside the window"):
        defect_map_from_json({"width": 3, "height": 3, "data_defects": [[9, 9]]})


def test_json_rejects_wrong_parity():
    with pytest.raises(ValueError):
        defect_map_from_json({"width": 3, "height": 3, "data_defects": [[2, 2]]})


def test_links_are_normalised():
    assert make_link((2, 2), (1, 1)) == ((1, 1), (2, 2))
    with pytest.raises(ValueError):
        make_link((1, 1), (4, 4))


def test_links_may_touch_defective_qubits():
    dm = DefectMap(frozenset({(3, 3)}), frozenset(), frozenset({((3, 3), (2, 2))}))
    dm.validate(build_window(WindowSpec(3, 3)))


def test_invalid_rates_rejected():
    with pytest.raises(ValueError):
        DefectRates(0.1, -0.1, 0.0)
