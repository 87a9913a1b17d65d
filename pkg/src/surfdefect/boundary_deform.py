"""Impose the target window's boundary on an adaptation layout.

Everything outside the window is treated as an exterior region whose cells
carry a boundary label: X above and below the window, Z to the left and
right, and ``C`` in the diagonal corner regions. A disabled cell inside the
window joins the exterior (inheriting its label) when it shares an ancilla of
the other Pauli type with an exterior cell; such an ancilla's check would
otherwise straddle two incompatible boundaries. Holes containing a window
corner are relabelled around a new corner qubit.

A check survives when every exterior cell of its nominal support carries its
own Pauli type, truncated to the active data. Weight-1 checks disable their
qubit and a data qubit lacking either X or Z coverage is disabled; the
procedure repeats until stable.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .code import RawCheck
from .lattice import Coord, Lattice, Pauli, ancilla_neighbors, data_neighbors
from .layout import Layout

CORNER_NAMES = ("top_left", "top_right", "bottom_left", "bottom_right")
_SIGNS = {"top_left": (1, 1), "top_right": (-1, 1), "bottom_left": (1, -1), "bottom_right": (-1, -1)}


class UnsupportedHole(RuntimeError):
    """A hole containing more than two window corners."""


@dataclass(frozen=True)
class CornerPlacement:
    window_corner: str
    corner: Coord
    boundary_typing: tuple[tuple[str, Pauli], ...] = (("horizontal", Pauli.X), ("vertical", Pauli.Z))


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[Coord, ...]
    gauge_ring: tuple[int, ...]
    interior: frozenset[Coord]


@dataclass(frozen=True)
class Hole:
    super_stabilizers: tuple[tuple[int, ...], ...]
    checks: tuple[int, ...]
    cycles: tuple[Cycle, ...]
    open: bool


@dataclass
class Deformed:
    """Checks of a layout after the boundary has been imposed."""

    active: frozenset[Coord]
    disabled: frozenset[Coord]
    checks: list[RawCheck]
    labels: dict[Coord, str]
    placements: tuple[CornerPlacement, ...] = ()
    corners: tuple[Coord, ...] = ()


@dataclass
class _NeedCorner:
    name: str
    candidates: list[Coord]


def window_corners(lat: Lattice) -> dict[str, Coord]:
    x0, y0, x1, y1 = lat.bounds
    return {"top_left": (x0 + 1, y0 + 1), "top_right": (x1 - 1, y0 + 1),
            "bottom_left": (x0 + 1, y1 - 1), "bottom_right": (x1 - 1, y1 - 1)}


def outside_label(lat: Lattice, p: Coord) -> str:
    x0, y0, x1, y1 = lat.bounds
    inx = x0 < p[0] < x1
    iny = y0 < p[1] < y1
    if inx and not iny:
        return "X"
    if iny and not inx:
        return "Z"
    return "C"


def corner_label(name: str, c: Coord, h: Coord) -> str:
    """Boundary label of hole cell ``h`` when the corner moves to ``c``."""
    sx, sy = _SIGNS[name]
    a = sx * (h[0] - c[0])
    b = sy * (h[1] - c[1])
    if a > b:
        return "X"
    if a < b:
        return "Z"
    return "C"


def _share_ancilla(p: Coord, q: Coord) -> bool:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1])) == 2


def shared_neighbors(p: Coord) -> list[Coord]:
    """Data positions sharing at least one ancilla with ``p``."""
    x, y = p
    return [(x + dx, y + dy) for dx in (-2, 0, 2) for dy in (-2, 0, 2) if dx or dy]


def components(cells: Iterable[Coord]) -> list[set[Coord]]:
    """Groups of data cells connected through shared ancillas."""
    cells = set(cells)
    seen: set[Coord] = set()
    out = []
    for s in sorted(cells):
        if s in seen:
            continue
        comp = {s}
        dq = deque([s])
        seen.add(s)
        while dq:
            p = dq.popleft()
            for n in shared_neighbors(p):
                if n in cells and n not in seen:
                    seen.add(n)
                    comp.add(n)
                    dq.append(n)
        out.append(comp)
    return out


def _clockwise(cands: Iterable[Coord], around: Iterable[Coord]) -> list[Coord]:
    around = list(around)
    cx = sum(p[0] for p in around) / len(around)
    cy = sum(p[1] for p in around) / len(around)
    # y grows downwards, so increasing atan2 is clockwise on screen
    return sorted(set(cands), key=lambda p: (math.atan2(p[1] - cy, p[0] - cx), p))


def _deform_once(layout: Layout, lat: Lattice, physical: frozenset[Coord] | None,
                 choice: Mapping[str, Coord]) -> Deformed | _NeedCorner:
    T = lat.data
    D = set(layout.disabled & T)
    corners = window_corners(lat)
    raws = [r for r in layout.checks if physical is None or r.ancilla in physical]
    while True:
        labels: dict[Coord, str] = {}
        placements = []
        for comp in components(D):
            inside = [n for n, q in corners.items() if q in comp]
            if not inside:
                continue
            if len(inside) > 2:
                cells = sorted(comp)
                raise UnsupportedHole(f"hole of {len(cells)} disabled data qubits from {cells[0]} to {cells[-1]} "
                                      f"contains {len(inside)} window corners ({', '.join(sorted(inside))})")
            for name in inside:
                c = choice.get(name)
                if c is None or c in D or c not in T:
                    cands = {n for p in comp for n in shared_neighbors(p) if n in T and n not in D}
                    return _NeedCorner(name, _clockwise(cands, comp))
                placements.append(CornerPlacement(name, c))
            for h in comp:
                if len(inside) == 1:
                    name = inside[0]
                else:
                    name = min(inside, key=lambda n: (max(abs(h[0] - corners[n][0]), abs(h[1] - corners[n][1])), n))
                labels[h] = corner_label(name, choice[name], h)
        # grow the exterior into disabled cells of the window
        frontier = deque(sorted(p for p in D if p not in labels))
        pending = set(frontier)
        while frontier:
            p = frontier.popleft()
            pending.discard(p)
            if p in labels:
                continue
            lab = None
            for a in data_neighbors(p):
                for e in ancilla_neighbors(a):
                    if e == p:
                        continue
                    if e in T:
                        le = labels.get(e)
                        if le is None:
                            continue
                    else:
                        le = outside_label(lat, e)
                    if le == "C":
                        continue
                    if lat.native_pauli(a).value != le:
                        lab = le
                        break
                if lab:
                    break
            if lab:
                labels[p] = lab
                for n in shared_neighbors(p):
                    if n in D and n not in labels and n not in pending:
                        pending.add(n)
                        frontier.append(n)
        survivors: list[tuple[RawCheck, frozenset[Coord], bool]] = []
        for r in raws:
            touched = False
            ok = True
            for cell in r.full:
                if cell in T:
                    lab = labels.get(cell)
                    if lab is None:
                        continue
                else:
                    lab = outside_label(lat, cell)
                touched = True
                if lab != r.pauli.value:
                    ok = False
                    break
            if not ok:
                continue
            live = frozenset(q for q in r.full if q in T and q not in D)
            if live:
                survivors.append((r, live, touched))
        new_d: set[Coord] = set()
        cov_x: set[Coord] = set()
        cov_z: set[Coord] = set()
        for r, live, _ in survivors:
            if len(live) == 1:
                new_d |= live
            else:
                (cov_x if r.pauli is Pauli.X else cov_z).update(live)
        for q in T:
            if q not in D and (q not in cov_x or q not in cov_z):
                new_d.add(q)
        if new_d:
            D |= new_d
            continue
        checks = [RawCheck(r.ancilla, r.pauli, live, r.owner, touches_boundary=t, nominal=r.full)
                  for r, live, t in survivors if len(live) >= 2]
        active = frozenset(T - D)
        corner_qubits = tuple(choice[p.window_corner] if p.window_corner in choice else corners[p.window_corner]
                              for p in placements)
        defaults = tuple(q for n, q in corners.items() if q in active)
        return Deformed(active, frozenset(D), checks, labels, tuple(placements),
                        corner_qubits + defaults)


def deform(layout: Layout, lat: Lattice, physical: frozenset[Coord] | None = None,
           max_branches: int = 64) -> list[Deformed]:
    """All boundary deformations of ``layout`` on window ``lat``.

    One result unless a window corner is compromised, in which case every
    candidate corner placement is returned.
    """
    out: list[Deformed] = []
    seen: set[tuple] = set()
    errors: list[UnsupportedHole] = []

    def rec(choice: dict[str, Coord], tried: dict[str, frozenset]):
        if len(out) >= max_branches:
            return
        key = tuple(sorted(choice.items()))
        if key in seen:
            return
        seen.add(key)
        try:
            res = _deform_once(layout, lat, physical, choice)
        except UnsupportedHole as e:
            # a relocated corner can grow the hole into a third corner; that
            # placement is invalid but its siblings may not be
            if not choice:
                raise
            errors.append(e)
            return
        if isinstance(res, Deformed):
            out.append(res)
            return
        done = tried.get(res.name, frozenset())
        for c in res.candidates:
            if c in done:
                continue
            rec({**choice, res.name: c}, {**tried, res.name: done | {c}})

    rec({}, {})
    if not out and errors:
        raise errors[0]
    return out


def deform_edge_hole(layout: Layout, lat: Lattice, physical: frozenset[Coord] | None = None) -> Deformed:
    """Deformation when no window corner is compromised (a single solution)."""
    res = _deform_once(layout, lat, physical, {})
    if isinstance(res, _NeedCorner):
        raise ValueError(f"the {res.name} corner is compromised; use deform_corner_hole")
    return res


def deform_corner_hole(layout: Layout, lat: Lattice, physical: frozenset[Coord] | None = None,
                       max_branches: int = 64) -> list[tuple[tuple[CornerPlacement, ...], Deformed]]:
    """Every candidate corner placement with its deformed checks."""
    return [(d.placements, d) for d in deform(layout, lat, physical, max_branches)]


# ---------------------------------------------------------------------------
# holes and cycles of an analysed patch

def find_holes_and_cycles(patch, lat: Lattice | None = None) -> list[Hole]:
    """Group non-central checks into holes and trace a cycle per enclosed region."""
    from .code import anticommutation, _components
    from . import gf2

    idx = patch.data_index()
    bits = patch.check_bits(idx)
    xi = patch.checks_of(Pauli.X)
    zi = patch.checks_of(Pauli.Z)
    rows = anticommutation([bits[i] for i in xi], [bits[i] for i in zi])
    data = patch.data
    x0 = y0 = x1 = y1 = None
    if lat is None:
        from .lattice import build_window
        lat = build_window(patch.window)
    holes = []
    for hx, hz in _components(len(xi), rows):
        members = tuple(sorted([xi[a] for a in hx] + [zi[b] for b in hz]))
        mset = set(members)
        groups = tuple(g for g in patch.super_stabilizers if set(g) <= mset)
        # enclosed cells: inactive data and non-measuring native positions touched by the ring
        interior: set[Coord] = set()
        for i in members:
            c = patch.checks[i]
            for q in ancilla_neighbors(c.owner):
                if q not in data:
                    interior.add(q)
        inner = {q for q in interior if q in lat.data}
        is_open = bool(interior - lat.data)
        cycles = []
        for comp in components(inner) if inner else []:
            ring = tuple(i for i in members
                         if any(q in comp for q in ancilla_neighbors(patch.checks[i].owner)))
            verts = {q for i in ring for q in patch.checks[i].qubits}
            cycles.append(Cycle(tuple(_clockwise(verts, comp)), ring, frozenset(comp)))
        if not cycles:
            ring = members
            verts = {q for i in ring for q in patch.checks[i].qubits}
            owners = [patch.checks[i].owner for i in ring]
            cycles.append(Cycle(tuple(_clockwise(verts, owners)), ring, frozenset()))
        holes.append(Hole(groups, members, tuple(cycles), is_open))
    return holes
