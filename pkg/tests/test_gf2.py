from __future__ import annotations

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from surfdefect import gf2
from structure import gf2_rank

rows_st = st.lists(st.integers(0, 2**12 - 1), max_size=10)


def _matrix(rows, n=12):
    return np.array([[(r >> j) & 1 for j in range(n)] for r in rows], dtype=np.uint8).reshape(len(rows), n)


@given(rows_st)
def test_rank_matches_dense_elimination(rows):
    assert gf2.rank(rows) == gf2_rank(_matrix(rows))


@given(rows_st, st.integers(0, 2**12 - 1))
def test_span_membership(rows, v):
    assert gf2.span_contains(rows, v) == (gf2_rank(_matrix(rows + [v])) == gf2_rank(_matrix(rows)))


@given(rows_st)
def test_nullspace_is_orthogonal_and_complete(rows):
    null = gf2.nullspace(rows, 12)
    for v in null:
        for r in rows:
            assert gf2.popcount(v & r) % 2 == 0
    assert len(null) == 12 - gf2_rank(_matrix(rows))


@given(rows_st, st.integers(0, 2**12 - 1))
def test_basis_reduce_tracks_combination(rows, v):
    b = gf2.Basis()
    for r in rows:
        b.add(r)
    residue, combo = b.reduce(v)
    acc = v ^ residue
    for i in gf2.from_bits(combo):
        acc ^= rows[i]
    assert acc == 0


def test_bit_helpers():
    assert gf2.to_bits([0, 3, 3, 5]) == 0b100001
    assert gf2.from_bits(0b100001) == [0, 5]
