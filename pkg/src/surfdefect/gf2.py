"""Linear algebra over GF(2) with rows stored as Python integers (bitsets).

Python ints give arbitrary-width XOR and popcount, which is all the codes in
this package need; n stays in the low thousands.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence


def popcount(v: int) -> int:
    return v.bit_count()


def to_bits(indices: Iterable[int]) -> int:
    v = 0
    for i in indices:
        v ^= 1 << i
    return v


def from_bits(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


class Basis:
    """Incrementally maintained echelon basis keyed by pivot bit.

    ``reduce`` returns the residue of a vector against the span together with
    the combination (as a bitset over insertion order) that was used.
    """

    __slots__ = ("pivots", "combos", "count")

    def __init__(self) -> None:
        self.pivots: dict[int, int] = {}
        self.combos: dict[int, int] = {}
        self.count = 0

    def reduce(self, v: int, track: int = 0) -> tuple[int, int]:
        pivots = self.pivots
        combos = self.combos
        out = 0
        while v:
            top = v.bit_length() - 1
            row = pivots.get(top)
            if row is None:
                out |= 1 << top
                v ^= 1 << top
            else:
                v ^= row
                track ^= combos[top]
        return out, track

    def add(self, v: int, label: int | None = None) -> bool:
        """Insert ``v``; return False if it was already in the span."""
        idx = self.count if label is None else label
        res, track = self.reduce(v, 1 << idx)
        self.count += 1
        if res == 0:
            return False
        self.pivots[res.bit_length() - 1] = res
        self.combos[res.bit_length() - 1] = track
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank(rows: Iterable[int]) -> int:
    b = Basis()
    for r in rows:
        b.add(r)
    return b.rank


def span_contains(rows: Sequence[int], v: int) -> bool:
    b = Basis()
    for r in rows:
        b.add(r)
    return b.contains(v)


def row_basis(rows: Iterable[int]) -> list[int]:
    b = Basis()
    for r in rows:
        b.add(r)
    return list(b.pivots.values())


def left_nullspace(rows: Sequence[int]) -> list[int]:
    """Bitsets ``c`` over row indices with XOR of the selected rows equal to 0."""
    b = Basis()
    null = []
    for i, r in enumerate(rows):
        res, track = b.reduce(r, 1 << i)
        if res == 0:
            null.append(track)
        else:
            top = res.bit_length() - 1
            b.pivots[top] = res
            b.combos[top] = track
    return null


def nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of {x : popcount(row & x) even for every row} as column bitsets."""
    # Gauss-Jordan on the row space, then read off free columns.
    pivots: dict[int, int] = {}
    for r in rows:
        v = r
        for p, row in pivots.items():
            if v >> p & 1:
                v ^= row
        if not v:
            continue
        p = v.bit_length() - 1
        for q in list(pivots):
            if pivots[q] >> p & 1:
                pivots[q] ^= v
        pivots[p] = v
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = 1 << f
        for p, row in pivots.items():
            if row >> f & 1:
                x |= 1 << p
        basis.append(x)
    return basis


def transpose(rows: Sequence[int], ncols: int) -> list[int]:
    cols = [0] * ncols
    for i, r in enumerate(rows):
        for c in from_bits(r):
            cols[c] |= 1 << i
    return cols
