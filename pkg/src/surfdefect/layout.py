"""Assemble the checks of one adaptation choice on a defect-free-outside region.

A *choice* maps every adaptation site (defective ancilla or defective link)
to a repurposing orientation or to data-qubit disabling. The result is a
``Layout``: the disabled data qubits and the checks before the target
window's boundary is imposed.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .code import RawCheck
from .lattice import (Coord, DefectMap, Lattice, Link, Pauli, ancilla_neighbors,
                      data_neighbors, native_pauli)


class Orientation(str, enum.Enum):
    HORIZONTAL = "horizontal_pair"
    VERTICAL = "vertical_pair"

    @property
    def other(self) -> "Orientation":
        return Orientation.VERTICAL if self is Orientation.HORIZONTAL else Orientation.HORIZONTAL


DISABLE = "disable"
Choice = Union[Orientation, str]
Site = Union[Coord, Link]


def is_link_site(site: Site) -> bool:
    return isinstance(site[0], tuple)


def site_ancilla(site: Site) -> Coord:
    return site[1] if is_link_site(site) else site


def repurposing_pairs(r: Coord, o: Orientation) -> list[tuple[Coord, frozenset[Coord]]]:
    """(measuring flank, data pair) for both halves of ``r``'s native support."""
    x, y = r
    if o is Orientation.HORIZONTAL:
        return [((x - 2, y), frozenset({(x - 1, y - 1), (x - 1, y + 1)})),
                ((x + 2, y), frozenset({(x + 1, y - 1), (x + 1, y + 1)}))]
    return [((x, y - 2), frozenset({(x - 1, y - 1), (x + 1, y - 1)})),
            ((x, y + 2), frozenset({(x - 1, y + 1), (x + 1, y + 1)}))]


def gauge_flanks(r: Coord, o: Orientation) -> tuple[Coord, Coord]:
    """The two neighbours whose native checks turn into gauges."""
    x, y = r
    if o is Orientation.HORIZONTAL:
        return (x, y - 2), (x, y + 2)
    return (x - 2, y), (x + 2, y)


@dataclass(frozen=True)
class Tentative:
    """A weight-2 piece of a replaced check, before snake removal."""

    measurer: Coord
    pauli: Pauli
    pair: frozenset[Coord]
    owner: Coord
    site: Site

    @property
    def remnant(self) -> bool:
        return self.measurer == self.owner


@dataclass(frozen=True)
class LayoutDefects:
    """Defects as seen by the adaptation.

    ``ancillas`` and ``links`` are the sites needing a strategy; ``unusable``
    are padding ancillas that exist but must not measure anything.
    """

    data: frozenset[Coord] = frozenset()
    ancillas: frozenset[Coord] = frozenset()
    links: frozenset[Link] = frozenset()
    bad_links: frozenset[Link] = frozenset()
    unusable: frozenset[Coord] = frozenset()

    @property
    def sites(self) -> list[Site]:
        return sorted(self.ancillas) + sorted(self.links)

    def restrict(self, data: Iterable[Coord], ancillas: Iterable[Coord], links: Iterable[Link]) -> "LayoutDefects":
        data, ancillas, links = set(data), set(ancillas), set(links)
        return LayoutDefects(self.data & data, self.ancillas & ancillas, self.links & links,
                             self.bad_links, self.unusable)


def effective_defects(lattice: Lattice, dm: DefectMap, padding: Iterable[Coord] | None = None) -> LayoutDefects:
    """Split a defect map into adaptation sites.

    Padding ancillas that are defective or have a defective link are only
    marked unusable. An ancilla with two or more defective links to working
    data qubits is handled as an ancilla defect; a link whose data qubit is
    defective needs no handling of its own. ``padding`` overrides the
    lattice's own padding ancillas (for windows cut out of a larger chip).
    """
    padding = lattice.padding_ancillas if padding is None else frozenset(padding)
    unusable = {a for a in dm.ancilla_defects if a in padding}
    per_anc: dict[Coord, list[Link]] = defaultdict(list)
    for q, a in dm.link_defects:
        if a in padding:
            unusable.add(a)
        elif q not in dm.data_defects and a not in dm.ancilla_defects:
            per_anc[a].append((q, a))
    ancillas = {a for a in dm.ancilla_defects if a not in padding}
    links = set()
    for a, ls in per_anc.items():
        if len(ls) >= 2:
            ancillas.add(a)
        else:
            links.add(ls[0])
    return LayoutDefects(frozenset(dm.data_defects), frozenset(ancillas), frozenset(links),
                         frozenset(dm.link_defects), frozenset(unusable))


@dataclass(frozen=True)
class Layout:
    region: Lattice
    disabled: frozenset[Coord]
    checks: tuple[RawCheck, ...]
    repurposed: tuple[Tentative, ...]
    snakes: frozenset[Coord]

    @property
    def active(self) -> frozenset[Coord]:
        return self.region.data - self.disabled


def tentative_checks(choices: Mapping[Site, Choice], flip: bool) -> tuple[list[Tentative], set[Coord]]:
    """Weight-2 checks and directly disabled data implied by ``choices``."""
    tents: list[Tentative] = []
    disabled: set[Coord] = set()
    for site, ch in choices.items():
        if is_link_site(site):
            q, r = site
            if ch == DISABLE:
                disabled.add(q)
                continue
            p = native_pauli(r, flip)
            for m, pair in repurposing_pairs(r, ch):
                tents.append(Tentative(m if q in pair else r, p, pair, r, site))
        else:
            r = site
            if ch == DISABLE:
                disabled.update(ancilla_neighbors(r))
                continue
            p = native_pauli(r, flip)
            for m, pair in repurposing_pairs(r, ch):
                tents.append(Tentative(m, p, pair, r, site))
    return tents, disabled


def remove_snakes(tents: list[Tentative], disabled: set[Coord], defects: LayoutDefects,
                  physical: frozenset[Coord] | None = None) -> tuple[list[Tentative], set[Coord]]:
    """Drop every connected group of weight-2 checks that touches a defect.

    Vertices are the measuring ancillas and data qubits of the tentative
    checks; edges are their gates. A component is compromised if it holds a
    disabled or defective data qubit, a defective or unusable measuring
    ancilla, a defective gate, or an ancilla asked to measure two repurposed
    checks. All data qubits of a compromised component are disabled.
    """
    parent: dict = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    load: dict[Coord, int] = defaultdict(int)
    for t in tents:
        if not t.remnant:
            load[t.measurer] += 1
    bad_roots = set()
    for t in tents:
        mv = ("a", t.measurer)
        find(mv)
        for d in t.pair:
            union(mv, ("d", d))
    for t in tents:
        mv = ("a", t.measurer)
        bad = (t.measurer in defects.ancillas or t.measurer in defects.unusable
               or load[t.measurer] > 1
               or (physical is not None and t.measurer not in physical))
        for d in t.pair:
            if d in disabled or d in defects.data or (d, t.measurer) in defects.bad_links:
                bad = True
        if bad:
            bad_roots.add(find(mv))
    if not bad_roots:
        return list(tents), set(disabled)
    keep, dis = [], set(disabled)
    for t in tents:
        if find(("a", t.measurer)) in bad_roots:
            dis.update(t.pair)
        else:
            keep.append(t)
    return keep, dis


def avalanche(checks: list[tuple[RawCheck, frozenset[Coord]]], disabled: set[Coord]) -> tuple[list[RawCheck], set[Coord]]:
    """Disable data of weight-1 checks until none remain; drop empty checks."""
    dis = set(disabled)
    while True:
        changed = False
        for raw, nominal in checks:
            live = nominal - dis
            if len(live) == 1:
                dis |= live
                changed = True
        if not changed:
            break
    out = []
    for raw, nominal in checks:
        live = frozenset(nominal - dis)
        if len(live) >= 2:
            out.append(RawCheck(raw.ancilla, raw.pauli, live, raw.owner, nominal=nominal))
    return out, dis


def build_layout(region: Lattice, defects: LayoutDefects, choices: Mapping[Site, Choice],
                 physical: frozenset[Coord] | None = None) -> Layout:
    """Checks and disabled data for one adaptation choice on ``region``."""
    flip = region.spec.pauli_parity_flip
    choices = dict(choices)
    for a in defects.ancillas:
        choices.setdefault(a, DISABLE)
    for link in defects.links:
        choices.setdefault(link, DISABLE)
    tents, dis0 = tentative_checks(choices, flip)
    dis0 = (dis0 | set(defects.data)) & region.data
    tents = [t for t in tents if t.pair <= region.data]
    keep, dis = remove_snakes(tents, dis0, defects, physical)
    snakes = frozenset(dis - dis0)
    replaced = set(defects.ancillas)
    for site, ch in choices.items():
        if is_link_site(site) and ch != DISABLE:
            replaced.add(site[1])
    items: list[tuple[RawCheck, frozenset[Coord]]] = []
    data = region.data
    for a in sorted(region.native_ancillas):
        if a in replaced:
            continue
        nominal = frozenset(q for q in ancilla_neighbors(a) if q in data)
        items.append((RawCheck(a, native_pauli(a, flip), nominal, a), nominal))
    for t in keep:
        items.append((RawCheck(t.measurer, t.pauli, t.pair, t.owner), t.pair))
    raws, dis = avalanche(items, dis)
    return Layout(region, frozenset(dis), tuple(raws), tuple(keep), snakes)


def neighbors_of_data(q: Coord) -> list[Coord]:
    return data_neighbors(q)
