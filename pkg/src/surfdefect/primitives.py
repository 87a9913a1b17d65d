"""Adaptations for isolated data, ancilla and link defects.

Each defective ancilla (or ancilla behind a defective link) can be replaced by
two weight-2 checks measured by flanking ancillas, oriented horizontally or
vertically, or handled by disabling data qubits. ``evaluate_local`` builds the
patch of one adaptation choice on a small defect-free-outside window and
reports its distance loss; it is the workhorse for orientation
classification and for the per-cluster search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .code import (Check, CheckKind, InvalidPatch, Patch, RawCheck, build_patch, make_check,
                   parity_for, Parity)
from .lattice import Coord, Link, Pauli, WindowSpec, ancilla_neighbors, build_window, data_neighbors, native_pauli
from .layout import (DISABLE, Choice, LayoutDefects, Orientation, Site, build_layout, gauge_flanks,
                     is_link_site, repurposing_pairs, site_ancilla)


@dataclass(frozen=True)
class RepurposingPlan:
    """One orientation of ancilla repurposing for a defective ancilla or link."""

    defective_site: Site
    orientation: Orientation
    weight2_checks: tuple[Check, Check]
    induced_gauges: tuple[Coord, Coord]
    distance_preserving: bool = False

    @property
    def ancilla(self) -> Coord:
        return site_ancilla(self.defective_site)

    @property
    def measurers(self) -> tuple[Coord, ...]:
        return tuple(c.ancilla for c in self.weight2_checks)


@dataclass(frozen=True)
class DataDefectPrimitive:
    """Truncated neighbour checks of a disabled data qubit."""

    qubit: Coord
    checks: tuple[Check, ...]
    super_stabilizers: tuple[tuple[int, ...], ...]


def data_defect_primitive(q: Coord, flip: bool = False) -> DataDefectPrimitive:
    """The four neighbouring checks with ``q`` removed, grouped per Pauli type."""
    checks = []
    for a in data_neighbors(q):
        p = native_pauli(a, flip)
        raw = RawCheck(a, p, frozenset(ancilla_neighbors(a)) - {q}, a)
        checks.append(make_check(raw, CheckKind.GAUGE, parity_for(p)))
    groups = tuple(tuple(i for i, c in enumerate(checks) if c.pauli is p) for p in (Pauli.X, Pauli.Z))
    return DataDefectPrimitive(q, tuple(checks), groups)


def _plan(site: Site, o: Orientation, flip: bool) -> RepurposingPlan:
    r = site_ancilla(site)
    p = native_pauli(r, flip)
    checks = []
    for m, pair in repurposing_pairs(r, o):
        if is_link_site(site) and site[0] not in pair:
            m = r  # the native ancilla keeps the half it is still connected to
        raw = RawCheck(m, p, pair, r)
        kind = CheckKind.REPURPOSED if m != r else CheckKind.GAUGE
        checks.append(make_check(raw, kind, parity_for(p)))
    return RepurposingPlan(site, o, (checks[0], checks[1]), gauge_flanks(r, o))


def ancilla_repurposing_options(a: Coord, defects: LayoutDefects | None = None,
                                flip: bool = False) -> list[RepurposingPlan]:
    """Horizontal and vertical repurposing of defective ancilla ``a``.

    Plans using defective or unusable flanks are still returned; whether
    their checks survive is decided by snake removal.
    """
    plans = [_plan(a, o, flip) for o in Orientation]
    keep = preserving_orientations(a, flip)
    return [RepurposingPlan(p.defective_site, p.orientation, p.weight2_checks, p.induced_gauges,
                            p.orientation in keep) for p in plans]


def link_defect_options(link: Link, defects: LayoutDefects | None = None,
                        flip: bool = False) -> list[RepurposingPlan | str]:
    """Both repurposings of a defective link plus the data-disabling fallback.

    When the link's ancilla is itself defective the ancilla options apply.
    """
    q, r = link
    if defects is not None and r in defects.ancillas:
        return list(ancilla_repurposing_options(r, defects, flip))
    keep = preserving_orientations(link, flip)
    out: list[RepurposingPlan | str] = []
    for o in Orientation:
        p = _plan(link, o, flip)
        out.append(RepurposingPlan(p.defective_site, o, p.weight2_checks, p.induced_gauges, o in keep))
    out.append(DISABLE)
    return out


# ---------------------------------------------------------------------------
# local evaluation

@dataclass(frozen=True)
class LocalResult:
    """Patch of one choice on a local window, with its distance loss."""

    loss: tuple[int, int]
    active: int
    disabled: frozenset[Coord]
    snakes: frozenset[Coord]
    patch: Patch = field(compare=False, repr=False)
    offset: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)  # patch coords minus real coords

    @property
    def max_loss(self) -> int:
        return max(self.loss)

    @property
    def sum_loss(self) -> int:
        return sum(self.loss)


def local_window(coords: Iterable[Coord], margin: int = 2, flip: bool = False) -> WindowSpec:
    """Smallest window containing ``coords`` with ``margin`` spare data rows/columns."""
    coords = list(coords)
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    lo_x = min(xs) - 2 * margin
    lo_y = min(ys) - 2 * margin
    hi_x = max(xs) + 2 * margin
    hi_y = max(ys) + 2 * margin
    lo_x -= (lo_x + 1) % 2  # round down to odd
    lo_y -= (lo_y + 1) % 2
    hi_x += (hi_x + 1) % 2
    hi_y += (hi_y + 1) % 2
    return WindowSpec((hi_x - lo_x) // 2 + 1, (hi_y - lo_y) // 2 + 1, (lo_x, lo_y), pauli_parity_flip=flip)


def _shift(c, dx: int, dy: int):
    if isinstance(c[0], tuple):
        return tuple(_shift(x, dx, dy) for x in c)
    return (c[0] + dx, c[1] + dy)


def evaluate_local(defects: LayoutDefects, choices: Mapping[Site, Choice], region: Iterable[Coord],
                   flip: bool = False) -> LocalResult | None:
    """Distance loss of ``choices`` with no boundary nearby; None when invalid.

    Evaluation is translation invariant up to shifts that preserve the check
    typing, so results are cached on a canonical translate.
    """
    region = list(region)
    xs = min(c[0] for c in region)
    ys = min(c[1] for c in region)
    dx, dy = -(xs - xs % 4), -(ys - ys % 4)
    key = (
        frozenset(_shift(q, dx, dy) for q in defects.data),
        frozenset(_shift(a, dx, dy) for a in defects.ancillas),
        frozenset(_shift(l, dx, dy) for l in defects.links),
        frozenset(_shift(l, dx, dy) for l in defects.bad_links),
        frozenset(_shift(a, dx, dy) for a in defects.unusable),
        frozenset((_shift(s, dx, dy), c) for s, c in choices.items()),
        frozenset(_shift(c, dx, dy) for c in region),
        flip,
    )
    res = _evaluate_cached(key)
    if res is None:
        return None
    return LocalResult(res.loss, res.active, frozenset(_shift(q, -dx, -dy) for q in res.disabled),
                       frozenset(_shift(q, -dx, -dy) for q in res.snakes), res.patch, (dx, dy))


def shift_check(c: Check, dx: int, dy: int) -> Check:
    """``c`` translated by (dx, dy); slots are translation invariant."""
    return Check(_shift(c.ancilla, dx, dy), c.pauli, tuple((_shift(q, dx, dy), s) for q, s in c.support),
                 c.kind, c.parity, _shift(c.owner, dx, dy))


@lru_cache(maxsize=1 << 16)
def _evaluate_cached(key) -> LocalResult | None:
    data, ancillas, links, bad_links, unusable, choices, region, flip = key
    from .boundary_deform import UnsupportedHole, deform
    from .distance import DistanceError, distance_report

    spec = local_window(region, flip=flip)
    lat = build_window(spec)
    defects = LayoutDefects(data, ancillas, links, bad_links, unusable)
    layout = build_layout(lat, defects, dict(choices))
    try:
        branches = deform(layout, lat, None)
    except UnsupportedHole:
        return None
    best = None
    for dfm in branches:
        try:
            patch = build_patch(spec, dfm.active, dfm.checks, disabled=dfm.disabled)
            rep = distance_report(patch)
        except (InvalidPatch, DistanceError):
            continue
        h, w = spec.target_distance
        res = LocalResult((h - rep.d_x, w - rep.d_z), len(patch.data), frozenset(dfm.disabled),
                          layout.snakes, patch)
        if best is None or (res.max_loss, res.sum_loss, -res.active) < (best.max_loss, best.sum_loss, -best.active):
            best = res
    return best


@lru_cache(maxsize=None)
def _orientation_losses(site: Site, flip: bool) -> dict[Orientation, tuple[int, int] | None]:
    r = site_ancilla(site)
    if is_link_site(site):
        defects = LayoutDefects(links=frozenset({site}), bad_links=frozenset({site}))
    else:
        defects = LayoutDefects(ancillas=frozenset({r}))
    out = {}
    for o in Orientation:
        res = evaluate_local(defects, {site: o}, [r], flip)
        out[o] = None if res is None else res.loss
    return out


def preserving_orientations(site: Site, flip: bool = False) -> frozenset[Orientation]:
    """Orientations whose isolated-defect loss is minimal (both when tied)."""
    r = site_ancilla(site)
    # canonical translate: only the typing and the link direction matter
    dx, dy = -(r[0] - r[0] % 4), -(r[1] - r[1] % 4)
    losses = _orientation_losses(_shift(site, dx, dy), flip)
    scored = {o: (max(l), sum(l)) for o, l in losses.items() if l is not None}
    if not scored:
        return frozenset()
    best = min(scored.values())
    return frozenset(o for o, s in scored.items() if s == best)


def classify_orientation(plan: RepurposingPlan, flip: bool = False) -> bool:
    """Whether ``plan``'s orientation is the distance-preserving one."""
    if plan.defective_site is None:
        raise ValueError("a repurposing plan needs a defective site")
    return plan.orientation in preserving_orientations(plan.defective_site, flip)


def predicted_invalid(site: Site, o: Orientation, defects: LayoutDefects, flip: bool = False) -> int:
    """Weight-2 checks of one orientation that touch a known defect."""
    r = site_ancilla(site)
    bad = 0
    for m, pair in repurposing_pairs(r, o):
        if is_link_site(site) and site[0] not in pair:
            m = r
        hit = m in defects.ancillas and m != r or m in defects.unusable
        for q in pair:
            if q in defects.data or (q, m) in defects.bad_links:
                hit = True
        bad += hit
    return bad
