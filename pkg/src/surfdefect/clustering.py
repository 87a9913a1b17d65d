"""Group defects into clusters whose adaptations can never interact.

Clusters are built from the worst case in which every defective ancilla (and
the ancilla behind every defective link) has all its data neighbours
disabled. Weight-1 checks around the disabled region disable further data
qubits until none remain. The footprint of a disabled set is its
neighbouring ancillas plus their data qubits; clusters are connected
components of overlapping footprints.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .lattice import Coord, DefectMap, Link, ancilla_neighbors, chebyshev, data_neighbors
from .layout import LayoutDefects, Site


@dataclass(frozen=True)
class DefectCluster:
    id: int
    defects: LayoutDefects
    footprint: frozenset[Coord]
    worst_disabled: frozenset[Coord] = frozenset()

    @property
    def sites(self) -> list[Site]:
        return self.defects.sites

    @property
    def defect_coords(self) -> list[Coord]:
        d = self.defects
        return sorted(d.data) + sorted(d.ancillas) + sorted({c for l in d.links for c in l})

    def as_defect_map(self) -> DefectMap:
        d = self.defects
        return DefectMap(d.data, d.ancillas, d.links)


def worst_case_disabled(defects: LayoutDefects, links_as_ancillas: bool = False) -> set[Coord]:
    """Data disabled when nothing is repurposed, after the weight-1 avalanche.

    With ``links_as_ancillas`` a defective link disables every data qubit of
    its ancilla, which covers the checks its repurposings touch.
    """
    dis = set(defects.data)
    for a in defects.ancillas:
        dis.update(ancilla_neighbors(a))
    for q, a in defects.links:
        if links_as_ancillas:
            dis.update(ancilla_neighbors(a))
        else:
            dis.add(q)
    return avalanche_unbounded(dis)


def avalanche_unbounded(disabled: set[Coord]) -> set[Coord]:
    """Disable the last live qubit of every check on an unbounded lattice."""
    dis = set(disabled)
    todo = {a for q in dis for a in data_neighbors(q)}
    while todo:
        a = todo.pop()
        live = [q for q in ancilla_neighbors(a) if q not in dis]
        if len(live) == 1:
            q = live[0]
            dis.add(q)
            todo.update(data_neighbors(q))
    return dis


def footprint_of(disabled: set[Coord]) -> set[Coord]:
    anc = {a for q in disabled for a in data_neighbors(q)}
    return anc | {q for a in anc for q in ancilla_neighbors(a)}


def cluster_defects(defects: LayoutDefects) -> list[DefectCluster]:
    """Partition adaptation sites and data defects into clusters.

    ``defects`` should come from ``effective_defects``, so defective padding
    ancillas and links to them are already excluded (they are only marked
    unusable).
    """
    dis = worst_case_disabled(defects, links_as_ancillas=True)
    if not dis:
        return []
    # components of disabled data whose footprints overlap (Chebyshev <= 4)
    cells = sorted(dis)
    parent = {c: c for c in cells}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    buckets: dict[tuple[int, int], list[Coord]] = defaultdict(list)
    for c in cells:
        buckets[(c[0] // 8, c[1] // 8)].append(c)
    for c in cells:
        bx, by = c[0] // 8, c[1] // 8
        for nx in (bx - 1, bx, bx + 1):
            for ny in (by - 1, by, by + 1):
                for o in buckets.get((nx, ny), ()):
                    if o < c and chebyshev(o, c) <= 4:
                        ra, rb = find(o), find(c)
                        if ra != rb:
                            parent[ra] = rb
    groups: dict[Coord, set[Coord]] = defaultdict(set)
    for c in cells:
        groups[find(c)].add(c)
    out = []
    for members in groups.values():
        data = frozenset(q for q in defects.data if q in members)
        ancs = frozenset(a for a in defects.ancillas if any(q in members for q in ancilla_neighbors(a)))
        links = frozenset(l for l in defects.links if l[0] in members)
        sub = LayoutDefects(data, ancs, links, defects.bad_links, defects.unusable)
        out.append((members, sub))
    out.sort(key=lambda t: min((c[1], c[0]) for c in t[0]))
    return [DefectCluster(i, sub, frozenset(footprint_of(m)), frozenset(m)) for i, (m, sub) in enumerate(out)]


def prune_cluster(c: DefectCluster) -> DefectCluster:
    """Drop footprint nodes with no defect within Chebyshev distance 3.

    Every primitive of a defect touches only qubits within that range
    (flanking ancillas at distance 2 and their data at 3).
    """
    seeds = c.defect_coords
    keep = frozenset(n for n in c.footprint if any(chebyshev(n, s) <= 3 for s in seeds))
    if not keep:
        keep = c.footprint
    return DefectCluster(c.id, c.defects, keep, c.worst_disabled)
