"""Checks, patches and their GF(2) analysis.

A patch is a set of active data qubits plus a list of measured checks. The
checks generate the gauge group; the stabilizer group is its center. Checks
that commute with everything are measured every round (unless their ancilla
is shared with a repurposed check); the rest are gauge checks measured in
alternating rounds, X-type in even rounds and Z-type in odd rounds.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import gf2
from .lattice import Coord, DefectMap, Pauli, WindowSpec, ancilla_neighbors

# Gate order per check type, as offsets from the owning ancilla. X-type
# boundaries are on top and bottom, so Z hooks must end on a vertical pair and
# X hooks on a horizontal pair.
SCHEDULE = {
    Pauli.Z: ((-1, -1), (-1, 1), (1, -1), (1, 1)),
    Pauli.X: ((-1, -1), (1, -1), (-1, 1), (1, 1)),
}


def slot_of(owner: Coord, pauli: Pauli, q: Coord) -> int:
    """1-based time step at which ``owner``'s native ``pauli`` check touches ``q``."""
    off = (q[0] - owner[0], q[1] - owner[1])
    return SCHEDULE[pauli].index(off) + 1


class CheckKind(str, enum.Enum):
    STABILIZER = "stabilizer"
    GAUGE = "gauge"
    REPURPOSED = "repurposed"
    BOUNDARY = "boundary"


class Parity(str, enum.Enum):
    EVERY_ROUND = "every_round"
    EVEN = "even"
    ODD = "odd"

    def active(self, rnd: int) -> bool:
        if self is Parity.EVERY_ROUND:
            return True
        return (rnd % 2 == 0) == (self is Parity.EVEN)


def parity_for(pauli: Pauli) -> Parity:
    return Parity.EVEN if pauli is Pauli.X else Parity.ODD


@dataclass(frozen=True)
class RawCheck:
    """A check before analysis: who measures it and whose schedule it borrows."""

    ancilla: Coord
    pauli: Pauli
    qubits: frozenset[Coord]
    owner: Coord  # ancilla whose native check this is a piece of
    touches_boundary: bool = False
    nominal: frozenset[Coord] | None = None  # untruncated support

    @property
    def full(self) -> frozenset[Coord]:
        return self.qubits if self.nominal is None else self.nominal

    @property
    def repurposed(self) -> bool:
        return self.ancilla != self.owner

    @property
    def weight(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class Check:
    ancilla: Coord
    pauli: Pauli
    support: tuple[tuple[Coord, int], ...]
    kind: CheckKind
    parity: Parity
    owner: Coord

    def __post_init__(self):
        if not 1 <= len(self.support) <= 4:
            raise ValueError(f"check at {self.ancilla} has weight {len(self.support)}")
        if self.kind is CheckKind.REPURPOSED and self.ancilla == self.owner:
            raise ValueError("repurposed checks must be measured by a foreign ancilla")

    @property
    def qubits(self) -> tuple[Coord, ...]:
        return tuple(q for q, _ in self.support)

    @property
    def weight(self) -> int:
        return len(self.support)

    def measured_in(self, rnd: int) -> bool:
        return self.parity.active(rnd)


def make_check(raw: RawCheck, kind: CheckKind, parity: Parity) -> Check:
    support = tuple(sorted(((q, slot_of(raw.owner, raw.pauli, q)) for q in raw.qubits),
                           key=lambda t: t[1]))
    return Check(raw.ancilla, raw.pauli, support, kind, parity, raw.owner)


@dataclass(frozen=True)
class DistanceReport:
    d_x: int
    d_z: int
    d_targ: int

    @property
    def d_out(self) -> int:
        return min(self.d_x, self.d_z)

    @property
    def d_rel(self) -> float:
        return self.d_out / self.d_targ if self.d_targ else 0.0

    def key(self, active: int = 0) -> tuple[int, int, int]:
        """Ranking key: minimum distance, then the sum, then active data."""
        return (self.d_out, self.d_x + self.d_z, active)


@dataclass
class Patch:
    """An adapted code on a target window."""

    window: WindowSpec
    data: frozenset[Coord]
    checks: tuple[Check, ...]
    super_stabilizers: tuple[tuple[int, ...], ...]
    disabled: frozenset[Coord] = frozenset()
    defects: DefectMap = field(default_factory=DefectMap)
    corners: tuple[Coord, ...] = ()
    method: str = "snl"
    k: int = 1
    distance: DistanceReport | None = None
    # bookkeeping filled by analysis
    central: tuple[bool, ...] = ()
    stabilizer_generators: tuple[tuple[int, ...], ...] = ()
    hyperedge_free: bool = True
    notes: dict = field(default_factory=dict)

    # ---- convenience -------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.data)

    @property
    def active_data(self) -> int:
        return len(self.data)

    def data_index(self) -> dict[Coord, int]:
        return {q: i for i, q in enumerate(sorted(self.data))}

    def check_bits(self, idx: dict[Coord, int] | None = None) -> list[int]:
        idx = idx or self.data_index()
        return [gf2.to_bits(idx[q] for q in c.qubits) for c in self.checks]

    def checks_of(self, pauli: Pauli) -> list[int]:
        return [i for i, c in enumerate(self.checks) if c.pauli is pauli]

    def generator_bits(self, pauli: Pauli, idx: dict[Coord, int] | None = None) -> list[int]:
        """Stabilizer generators of one type as data bitsets."""
        idx = idx or self.data_index()
        bits = self.check_bits(idx)
        out = []
        for group in self.stabilizer_generators:
            if self.checks[group[0]].pauli is not pauli:
                continue
            v = 0
            for i in group:
                v ^= bits[i]
            out.append(v)
        return out

    def ancilla_usage(self) -> dict[Coord, list[int]]:
        use: dict[Coord, list[int]] = defaultdict(list)
        for i, c in enumerate(self.checks):
            use[c.ancilla].append(i)
        return dict(use)

    def repurposed_counts(self) -> dict[Coord, int]:
        cnt: dict[Coord, int] = defaultdict(int)
        for c in self.checks:
            if c.kind is CheckKind.REPURPOSED:
                cnt[c.ancilla] += 1
        return dict(cnt)

    def summary(self) -> dict:
        rep = self.distance
        return {
            "window": [self.window.width, self.window.height],
            "origin": list(self.window.origin),
            "padding": self.window.padding.value,
            "pauli_parity_flip": self.window.pauli_parity_flip,
            "method": self.method,
            "active_data": self.active_data,
            "k": self.k,
            "d_x": rep.d_x if rep else None,
            "d_z": rep.d_z if rep else None,
            "d_out": rep.d_out if rep else None,
            "checks": len(self.checks),
            "super_stabilizers": len(self.super_stabilizers),
            "disabled": [list(q) for q in sorted(self.disabled)],
            "corners": [list(c) for c in self.corners],
        }


class InvalidPatch(ValueError):
    """Raised when a check set does not define a usable single-logical code."""


# ---------------------------------------------------------------------------
# analysis

def anticommutation(x_bits: Sequence[int], z_bits: Sequence[int]) -> list[int]:
    """Row i: bitset over Z checks anticommuting with X check i."""
    # Sparse overlap counting via data-qubit incidence.
    by_qubit: dict[int, int] = defaultdict(int)
    for j, zb in enumerate(z_bits):
        for q in gf2.from_bits(zb):
            by_qubit[q] ^= 1 << j
    rows = []
    for xb in x_bits:
        acc = 0
        for q in gf2.from_bits(xb):
            acc ^= by_qubit.get(q, 0)
        rows.append(acc)
    return rows


def _components(n_x: int, rows: Sequence[int]) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite anticommutation graph (X idx, Z idx)."""
    parent = list(range(n_x))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    owner_of_z: dict[int, int] = {}
    for i, r in enumerate(rows):
        for j in gf2.from_bits(r):
            if j in owner_of_z:
                a, b = find(i), find(owner_of_z[j])
                if a != b:
                    parent[a] = b
            else:
                owner_of_z[j] = i
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for i, r in enumerate(rows):
        if r:
            groups.setdefault(find(i), ([], []))[0].append(i)
    for j, i in owner_of_z.items():
        groups[find(i)][1].append(j)
    return [(sorted(xs), sorted(zs)) for xs, zs in groups.values()]


def _sparse_nullspace(rows: Sequence[int], ncheck: int) -> tuple[list[int], bool]:
    """Nullspace of ``rows`` (one per check), preferring a disjoint basis.

    Returns bitsets over the local check indices and whether the basis is a
    partition (every check in at most one vector).
    """
    null = gf2.left_nullspace(rows)
    if not null:
        return [], True
    # Columns of the basis matrix: checks with identical membership patterns
    # form atoms; a partition basis exists iff #atoms == dim.
    patterns: dict[int, int] = {}
    for c in range(ncheck):
        pat = 0
        for b, v in enumerate(null):
            if v >> c & 1:
                pat |= 1 << b
        if pat:
            patterns.setdefault(pat, 0)
            patterns[pat] |= 1 << c
    if len(patterns) == len(null):
        return sorted(patterns.values(), key=lambda v: (v & -v)), True
    # Fall back to a reduced echelon basis, greedily sparsified.
    basis = gf2.row_basis(null)
    basis.sort(key=gf2.popcount)
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(len(basis)):
                if i != j:
                    cand = basis[i] ^ basis[j]
                    if gf2.popcount(cand) < gf2.popcount(basis[i]):
                        basis[i] = cand
                        changed = True
    return basis, False


@dataclass
class Analysis:
    central: list[bool]
    groups: list[tuple[int, ...]]  # multi-check stabilizer generators
    partition: bool
    k: int
    rank_gx: int
    rank_gz: int
    rank_sx: int
    rank_sz: int


def analyze_checks(data: Sequence[Coord], raws: Sequence[RawCheck]) -> Analysis:
    idx = {q: i for i, q in enumerate(sorted(data))}
    bits = [gf2.to_bits(idx[q] for q in r.qubits) for r in raws]
    xi = [i for i, r in enumerate(raws) if r.pauli is Pauli.X]
    zi = [i for i, r in enumerate(raws) if r.pauli is Pauli.Z]
    rows = anticommutation([bits[i] for i in xi], [bits[i] for i in zi])
    central = [True] * len(raws)
    for a, r in enumerate(rows):
        if r:
            central[xi[a]] = False
            for b in gf2.from_bits(r):
                central[zi[b]] = False
    groups: list[tuple[int, ...]] = []
    partition = True
    for hx, hz in _components(len(xi), rows):
        zpos = {j: p for p, j in enumerate(hz)}
        # X side: rows over hole Z checks
        xrows = []
        for a in hx:
            v = 0
            for b in gf2.from_bits(rows[a]):
                v |= 1 << zpos[b]
            xrows.append(v)
        zrows = gf2.transpose(xrows, len(hz))
        for local, members in ((xrows, [xi[a] for a in hx]), (zrows, [zi[b] for b in hz])):
            vecs, part = _sparse_nullspace(local, len(members))
            partition &= part
            for v in vecs:
                groups.append(tuple(members[c] for c in gf2.from_bits(v)))
    sx = [bits[i] for i in xi if central[i]]
    sz = [bits[i] for i in zi if central[i]]
    for g in groups:
        v = 0
        for i in g:
            v ^= bits[i]
        (sx if raws[g[0]].pauli is Pauli.X else sz).append(v)
    rank_gx = gf2.rank(bits[i] for i in xi)
    rank_gz = gf2.rank(bits[i] for i in zi)
    rank_sx = gf2.rank(sx)
    rank_sz = gf2.rank(sz)
    k = len(data) - rank_gx - rank_sz
    return Analysis(central, groups, partition, k, rank_gx, rank_gz, rank_sx, rank_sz)


def build_patch(window: WindowSpec, data: Iterable[Coord], raws: Sequence[RawCheck], *,
                disabled: Iterable[Coord] = (), defects: DefectMap | None = None,
                corners: Sequence[Coord] = (), method: str = "snl",
                require_k1: bool = True) -> Patch:
    """Analyse a raw check list and assign kinds and round parities."""
    data = frozenset(data)
    for r in raws:
        if r.weight < 2:
            raise InvalidPatch(f"weight-{r.weight} check at {r.ancilla}")
        if not r.qubits <= data:
            raise InvalidPatch(f"check at {r.ancilla} acts on inactive data")
    an = analyze_checks(sorted(data), raws)
    if require_k1 and an.k != 1:
        raise InvalidPatch(f"patch encodes {an.k} logical qubits")
    per_ancilla: dict[Coord, list[int]] = defaultdict(list)
    for i, r in enumerate(raws):
        per_ancilla[r.ancilla].append(i)
    parities: list[Parity] = [Parity.EVERY_ROUND] * len(raws)
    for anc, ids in per_ancilla.items():
        if len(ids) > 2:
            raise InvalidPatch(f"ancilla {anc} measures {len(ids)} checks")
        if len(ids) == 2:
            a, b = (raws[i] for i in ids)
            if a.pauli is b.pauli:
                raise InvalidPatch(f"ancilla {anc} measures two {a.pauli.value} checks")
            for i in ids:
                parities[i] = parity_for(raws[i].pauli)
        else:
            i = ids[0]
            parities[i] = Parity.EVERY_ROUND if an.central[i] else parity_for(raws[i].pauli)
    checks = []
    for i, r in enumerate(raws):
        if r.repurposed:
            kind = CheckKind.REPURPOSED
        elif not an.central[i]:
            kind = CheckKind.GAUGE
        elif r.touches_boundary:
            kind = CheckKind.BOUNDARY
        else:
            kind = CheckKind.STABILIZER
        checks.append(make_check(r, kind, parities[i]))
    gens = [(i,) for i in range(len(raws)) if an.central[i]] + list(an.groups)
    super_groups = tuple(g for g in an.groups if len(g) > 1)
    return Patch(
        window=window, data=data, checks=tuple(checks),
        super_stabilizers=super_groups, disabled=frozenset(disabled),
        defects=defects or DefectMap(), corners=tuple(corners), method=method,
        k=an.k, central=tuple(an.central), stabilizer_generators=tuple(gens),
        hyperedge_free=an.partition,
    )


def native_raw_checks(window: WindowSpec) -> tuple[list[Coord], list[RawCheck]]:
    """Defect-free code on ``window`` as raw checks."""
    from .lattice import build_window

    lat = build_window(window)
    raws = []
    for a in sorted(lat.native_ancillas):
        qs = frozenset(lat.support(a))
        raws.append(RawCheck(a, lat.native_pauli(a), qs, a,
                             touches_boundary=len(qs) < 4))
    return sorted(lat.data), raws


def commutes(a: Check, b: Check) -> bool:
    if a.pauli is b.pauli:
        return True
    return len(set(a.qubits) & set(b.qubits)) % 2 == 0


def owner_support(owner: Coord) -> list[Coord]:
    return ancilla_neighbors(owner)
