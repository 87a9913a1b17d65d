"""Processor lattice: coordinates, qubit roles, target windows and defects.

Coordinates are integer pairs. Data qubits sit at (odd, odd) positions and
ancilla qubits at (even, even) positions, so every data qubit has its four
ancillas at the diagonal offsets (+-1, +-1). The ancilla at ``(x, y)``
natively measures a Z-type check when ``(x + y) / 2`` is even; the
``pauli_parity_flip`` switch inverts that assignment everywhere.

The patch orientation is fixed: X-type boundaries on top and bottom, Z-type
boundaries on the left and right, so a defect-free ``w x h`` window has
distance ``(d_X, d_Z) = (h, w)``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

Coord = tuple[int, int]
Link = tuple[Coord, Coord]  # (data, ancilla)

# Diagonal offsets of an ancilla's four data qubits, in NW, NE, SW, SE order.
NW, NE, SW, SE = (-1, -1), (1, -1), (-1, 1), (1, 1)
DIAGONALS = (NW, NE, SW, SE)


class Pauli(str, enum.Enum):
    X = "X"
    Z = "Z"

    @property
    def opposite(self) -> "Pauli":
        return Pauli.Z if self is Pauli.X else Pauli.X

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class Padding(str, enum.Enum):
    NONE = "none"
    ANCILLA = "ancilla"
    D_PLUS_1 = "d_plus_1"


def is_data(c: Coord) -> bool:
    return c[0] % 2 == 1 and c[1] % 2 == 1


def is_ancilla(c: Coord) -> bool:
    return c[0] % 2 == 0 and c[1] % 2 == 0


def native_pauli(a: Coord, flip: bool = False) -> Pauli:
    z = ((a[0] + a[1]) // 2) % 2 == 0
    if flip:
        z = not z
    return Pauli.Z if z else Pauli.X


def ancilla_neighbors(a: Coord) -> list[Coord]:
    """Data qubits of ancilla ``a`` in NW, NE, SW, SE order."""
    x, y = a
    return [(x + dx, y + dy) for dx, dy in DIAGONALS]


def data_neighbors(q: Coord) -> list[Coord]:
    """Ancillas adjacent to data qubit ``q`` in NW, NE, SW, SE order."""
    x, y = q
    return [(x + dx, y + dy) for dx, dy in DIAGONALS]


def make_link(u: Coord, v: Coord) -> Link:
    """Normalise an unordered data/ancilla pair to ``(data, ancilla)``."""
    if is_data(u) and is_ancilla(v):
        link = (u, v)
    elif is_data(v) and is_ancilla(u):
        link = (v, u)
    else:
        raise ValueError(f"link must join a data and an ancilla qubit: {u}, {v}")
    if max(abs(link[0][0] - link[1][0]), abs(link[0][1] - link[1][1])) != 1:
        raise ValueError(f"link endpoints are not neighbours: {u}, {v}")
    return link


def chebyshev(u: Coord, v: Coord) -> int:
    return max(abs(u[0] - v[0]), abs(u[1] - v[1]))


@dataclass(frozen=True)
class WindowSpec:
    """A ``width x height`` block of data qubits with its ancilla ring.

    ``origin`` is the top-left data qubit. For ``padding="d_plus_1"`` the
    lattice is built one row and column larger than ``width x height`` while
    the target distance stays ``(height, width)``.
    """

    width: int
    height: int
    origin: Coord = (1, 1)
    padding: Padding = Padding.NONE
    pauli_parity_flip: bool = False

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("window dimensions must be positive")
        if not is_data(self.origin):
            raise ValueError("window origin must be a data coordinate")
        object.__setattr__(self, "padding", Padding(self.padding))

    @property
    def target_distance(self) -> tuple[int, int]:
        return self.height, self.width

    @property
    def lattice_size(self) -> tuple[int, int]:
        if self.padding is Padding.D_PLUS_1:
            return self.width + 1, self.height + 1
        return self.width, self.height

    def with_flip(self, flip: bool) -> "WindowSpec":
        return WindowSpec(self.width, self.height, self.origin, self.padding, flip)

    def extended(self, margin: int) -> "WindowSpec":
        w, h = self.lattice_size
        ox, oy = self.origin
        return WindowSpec(w + 2 * margin, h + 2 * margin,
                          (ox - 2 * margin, oy - 2 * margin),
                          Padding.NONE, self.pauli_parity_flip)


@dataclass(frozen=True)
class Lattice:
    """Qubits, links and native check layout of one window."""

    spec: WindowSpec

    @cached_property
    def bounds(self) -> tuple[int, int, int, int]:
        """(x_min, y_min, x_max, y_max) of the ancilla ring."""
        w, h = self.spec.lattice_size
        ox, oy = self.spec.origin
        return ox - 1, oy - 1, ox + 2 * w - 1, oy + 2 * h - 1

    @cached_property
    def data(self) -> frozenset[Coord]:
        w, h = self.spec.lattice_size
        ox, oy = self.spec.origin
        return frozenset((ox + 2 * i, oy + 2 * j) for i in range(w) for j in range(h))

    def contains_data(self, q: Coord) -> bool:
        x0, y0, x1, y1 = self.bounds
        return x0 < q[0] < x1 and y0 < q[1] < y1

    def side_of(self, a: Coord) -> str | None:
        """Which window side a perimeter ancilla sits on (None for bulk/corner/outside)."""
        x0, y0, x1, y1 = self.bounds
        x, y = a
        on_x = x in (x0, x1)
        on_y = y in (y0, y1)
        if on_x and on_y:
            return "corner"
        if on_y and x0 < x < x1:
            return "top" if y == y0 else "bottom"
        if on_x and y0 < y < y1:
            return "left" if x == x0 else "right"
        return None

    def is_bulk_ancilla(self, a: Coord) -> bool:
        x0, y0, x1, y1 = self.bounds
        return x0 < a[0] < x1 and y0 < a[1] < y1

    def boundary_pauli(self, side: str) -> Pauli:
        return Pauli.X if side in ("top", "bottom") else Pauli.Z

    def native_pauli(self, a: Coord) -> Pauli:
        return native_pauli(a, self.spec.pauli_parity_flip)

    @cached_property
    def perimeter(self) -> frozenset[Coord]:
        """Non-corner perimeter ancilla positions."""
        x0, y0, x1, y1 = self.bounds
        out = set()
        for x in range(x0 + 2, x1, 2):
            out.add((x, y0))
            out.add((x, y1))
        for y in range(y0 + 2, y1, 2):
            out.add((x0, y))
            out.add((x1, y))
        return frozenset(out)

    @cached_property
    def native_ancillas(self) -> frozenset[Coord]:
        """Ancillas measuring a check in the defect-free code."""
        x0, y0, x1, y1 = self.bounds
        out = {(x, y) for x in range(x0 + 2, x1, 2) for y in range(y0 + 2, y1, 2)}
        for a in self.perimeter:
            if self.native_pauli(a) is self.boundary_pauli(self.side_of(a)):
                out.add(a)
        return frozenset(out)

    @cached_property
    def padding_ancillas(self) -> frozenset[Coord]:
        """Perimeter ancillas present only because of ancilla padding."""
        if self.spec.padding is not Padding.ANCILLA:
            return frozenset()
        return self.perimeter - self.native_ancillas

    @cached_property
    def ancillas(self) -> frozenset[Coord]:
        """All physical ancillas in the window."""
        return self.native_ancillas | self.padding_ancillas

    def support(self, a: Coord) -> list[Coord]:
        """Native support of ancilla ``a`` restricted to window data (NW, NE, SW, SE)."""
        return [q for q in ancilla_neighbors(a) if q in self.data]

    @cached_property
    def links(self) -> frozenset[Link]:
        return frozenset((q, a) for a in self.ancillas for q in self.support(a))

    @cached_property
    def native_links(self) -> frozenset[Link]:
        return frozenset((q, a) for a in self.native_ancillas for q in self.support(a))

    def native_checks(self) -> dict[Coord, tuple[Pauli, list[Coord]]]:
        """Defect-free layout: ancilla -> (Pauli type, support)."""
        return {a: (self.native_pauli(a), self.support(a)) for a in sorted(self.native_ancillas)}

    def component_counts(self) -> dict[str, int]:
        return {"data": len(self.data), "ancilla": len(self.ancillas), "link": len(self.links)}


def build_window(spec: WindowSpec) -> Lattice:
    return Lattice(spec)


@dataclass(frozen=True)
class DefectRates:
    q_d: float
    q_a: float
    q_l: float

    def __post_init__(self):
        for name in ("q_d", "q_a", "q_l"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def uniform(cls, q: float) -> "DefectRates":
        return cls(q, q, q)


@dataclass(frozen=True)
class DefectMap:
    data_defects: frozenset[Coord] = frozenset()
    ancilla_defects: frozenset[Coord] = frozenset()
    link_defects: frozenset[Link] = frozenset()
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "data_defects", frozenset(tuple(c) for c in self.data_defects))
        object.__setattr__(self, "ancilla_defects", frozenset(tuple(c) for c in self.ancilla_defects))
        links = frozenset(make_link(tuple(u), tuple(v)) for u, v in self.link_defects)
        object.__setattr__(self, "link_defects", links)
        for q in self.data_defects:
            if not is_data(q):
                raise ValueError(f"data defect at non-data coordinate {q}")
        for a in self.ancilla_defects:
            if not is_ancilla(a):
                raise ValueError(f"ancilla defect at non-ancilla coordinate {a}")

    def __len__(self) -> int:
        return len(self.data_defects) + len(self.ancilla_defects) + len(self.link_defects)

    @property
    def empty(self) -> bool:
        return len(self) == 0

    def is_link_defective(self, q: Coord, a: Coord) -> bool:
        return (q, a) in self.link_defects

    def restrict(self, lattice: Lattice) -> "DefectMap":
        """Keep only components that exist in ``lattice``."""
        return DefectMap(
            self.data_defects & lattice.data,
            self.ancilla_defects & lattice.ancillas,
            frozenset(l for l in self.link_defects if l in lattice.links),
            seed=self.seed,
        )

    def validate(self, lattice: Lattice) -> None:
        bad = [q for q in self.data_defects if q not in lattice.data]
        bad += [a for a in self.ancilla_defects if a not in lattice.ancillas]
        bad += [l for l in self.link_defects if l not in lattice.links]
        if bad:
            raise ValueError(f"defects outside the window: {sorted(bad)[:5]}")

    def union(self, other: "DefectMap") -> "DefectMap":
        return DefectMap(self.data_defects | other.data_defects,
                         self.ancilla_defects | other.ancilla_defects,
                         self.link_defects | other.link_defects, seed=self.seed)

    def to_json_dict(self, spec: WindowSpec) -> dict:
        d = {
            "width": spec.width,
            "height": spec.height,
            "padding": spec.padding.value,
            "data_defects": [list(c) for c in sorted(self.data_defects)],
            "ancilla_defects": [list(c) for c in sorted(self.ancilla_defects)],
            "link_defects": [[list(q), list(a)] for q, a in sorted(self.link_defects)],
        }
        if spec.origin != (1, 1):
            d["origin"] = list(spec.origin)
        if self.seed is not None:
            d["seed"] = self.seed
        return d


def defect_map_from_json(obj: dict | str) -> tuple[WindowSpec, DefectMap]:
    """Parse the canonical DefectMap JSON document."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("defect map JSON must be an object")
    try:
        spec = WindowSpec(int(obj["width"]), int(obj["height"]),
                          tuple(obj.get("origin", (1, 1))),
                          Padding(obj.get("padding", "none")))
        dm = DefectMap(
            frozenset(tuple(c) for c in obj.get("data_defects", [])),
            frozenset(tuple(c) for c in obj.get("ancilla_defects", [])),
            frozenset((tuple(u), tuple(v)) for u, v in obj.get("link_defects", [])),
            seed=obj.get("seed"),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed defect map: {exc}") from exc
    dm.validate(build_window(spec))
    return spec, dm


def _bernoulli_pick(rng: np.random.Generator, items: Iterable, q: float) -> frozenset:
    items = sorted(items)
    if q <= 0.0 or not items:
        return frozenset()
    mask = rng.random(len(items)) < q
    return frozenset(it for it, m in zip(items, mask) if m)


def sample_defects(spec: WindowSpec, rates: DefectRates, seed: int) -> DefectMap:
    """Mark every data qubit, physical ancilla and link defective independently.

    Uses numpy's PCG64 generator seeded with ``seed``; components are drawn in
    sorted coordinate order (data, ancillas, links), so the map depends only on
    the seed, the window and the rates.
    """
    lat = build_window(spec.with_flip(False) if spec.padding is Padding.ANCILLA else spec)
    rng = np.random.Generator(np.random.PCG64(seed))
    return DefectMap(
        _bernoulli_pick(rng, lat.data, rates.q_d),
        _bernoulli_pick(rng, lat.ancillas, rates.q_a),
        _bernoulli_pick(rng, lat.links, rates.q_l),
        seed=seed,
    )
