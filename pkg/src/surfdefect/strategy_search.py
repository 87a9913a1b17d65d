"""Per-cluster strategy search and global composition.

A local strategy is an adaptation choice for every site of one cluster
(orientation or data disabling). Candidates are streamed in a promising-first
order and filtered by a ``HeuristicsConfig``; global strategies are
Cartesian-product combinations of local ones, realised on the target window
and ranked by distance.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Iterator, Mapping, Sequence

from . import gf2
from .boundary_deform import UnsupportedHole, deform
from .clustering import DefectCluster, cluster_defects, worst_case_disabled
from .code import Check, CheckKind, DistanceReport, InvalidPatch, Patch, build_patch
from .distance import DistanceError, distance_report
from .lattice import DefectMap, Lattice, Link, Pauli, WindowSpec, build_window
from .layout import (DISABLE, Choice, LayoutDefects, Orientation, Site, build_layout, effective_defects,
                     is_link_site, remove_snakes)
from .primitives import (LocalResult, RepurposingPlan, _plan, evaluate_local, predicted_invalid,
                         preserving_orientations, shift_check)

__all__ = [
    "HeuristicsConfig", "PRESETS", "PROFILE_ORDER", "LinkAssignment", "LocalStrategy", "GlobalStrategy",
    "AdaptFailure", "SearchLimitExceeded", "sort_candidates", "remove_snakes", "build_super_stabilizers",
    "local_search", "compose_global", "realize", "adapt", "adapt_window", "place", "Placement",
]

DEFAULT_SAFETY_CAP = 10 ** 6


@dataclass(frozen=True)
class HeuristicsConfig:
    """Search-control parameters; ``None`` disables a condition."""

    link_defect_to_ancilla: bool = False
    n_skip: int | None = None
    n_zombie: int | None = None
    n_max: int | None = None
    n_sum: int | None = None
    n_sol_max_per_cluster: int | None = None
    n_sol_max: int | None = None
    name: str = "custom"

    @classmethod
    def preset(cls, name: str) -> "HeuristicsConfig":
        try:
            return PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown heuristics profile {name!r}; choose from {sorted(PRESETS)}") from None

    @classmethod
    def from_dict(cls, obj: Mapping) -> "HeuristicsConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise ValueError(f"unknown heuristics fields {sorted(unknown)}")
        return cls(**obj)

    def to_dict(self) -> dict:
        return asdict(self)


PRESETS: dict[str, HeuristicsConfig] = {
    "h0": HeuristicsConfig(True, None, 1, 1, 1, 1, 1, "h0"),
    "h1": HeuristicsConfig(True, None, 10, 2, 2, 2, 2, "h1"),
    "h2": HeuristicsConfig(True, None, None, None, None, 2, 10, "h2"),
    "h3": HeuristicsConfig(False, 10, None, None, None, 3, 10, "h3"),
    "h4": HeuristicsConfig(False, 10, None, None, None, 3, None, "h4"),
    "h5": HeuristicsConfig(False, None, None, None, None, 10, 100, "h5"),
    "h6": HeuristicsConfig(False, None, None, None, None, None, None, "h6"),
    # profile 0 with a longer patience, used for very large windows
    "h0z2": HeuristicsConfig(True, None, 2, 1, 1, 1, 1, "h0z2"),
}
PROFILE_ORDER = ("h0", "h1", "h2", "h3", "h4", "h5", "h6")


class AdaptFailure(RuntimeError):
    """No valid adapted patch was found."""


class SearchLimitExceeded(AdaptFailure):
    """A cluster produced more candidates than the safety cap allows."""


@dataclass(frozen=True)
class LinkAssignment:
    """Per link site: True when the data-disabling fallback is used."""

    links: tuple[Link, ...]
    disable: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.links)

    @property
    def n_disabled(self) -> int:
        return sum(self.disable)


@dataclass(frozen=True)
class LocalStrategy:
    cluster_id: int
    choices: tuple[tuple[Site, Choice], ...]
    repurposings: tuple[RepurposingPlan, ...]
    snakes: frozenset
    disabled: frozenset
    gauge_checks: tuple[Check, ...]
    super_stabilizers: tuple[tuple[Check, ...], ...]
    loss: tuple[int, int]
    active_data: int

    @property
    def choice_map(self) -> dict[Site, Choice]:
        return dict(self.choices)

    @property
    def max_loss(self) -> int:
        return max(self.loss)

    @property
    def sum_loss(self) -> int:
        return sum(self.loss)


@dataclass
class GlobalStrategy:
    strategies: tuple[LocalStrategy, ...]
    patch: Patch
    report: DistanceReport
    method: str = "snl"
    profile: str = ""
    n_clusters: int = 0
    evaluated: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def key(self) -> tuple[int, int, int]:
        return self.report.key(self.patch.active_data)


# ---------------------------------------------------------------------------
# candidate ordering

def _preferred(site: Site, defects: LayoutDefects, flip: bool) -> tuple[Orientation, Orientation]:
    keep = preserving_orientations(site, flip)
    ranked = sorted(Orientation, key=lambda o: (predicted_invalid(site, o, defects, flip), o not in keep,
                                                list(Orientation).index(o)))
    return ranked[0], ranked[1]


def _assignments(links: Sequence[Link]) -> Iterator[LinkAssignment]:
    n = len(links)
    for k in range(n + 1):
        for idx in itertools.combinations(range(n), k):
            s = set(idx)
            yield LinkAssignment(tuple(links), tuple(i in s for i in range(n)))


def _combos(sites: Sequence[Site], prefs: Mapping[Site, tuple[Orientation, Orientation]],
            fixed: Mapping[Site, Choice]) -> Iterator[dict[Site, Choice]]:
    n = len(sites)
    for k in range(n + 1):
        for flipped in itertools.combinations(range(n), k):
            fs = set(flipped)
            ch = dict(fixed)
            for i, s in enumerate(sites):
                ch[s] = prefs[s][1 if i in fs else 0]
            yield ch


def candidate_groups(cluster: DefectCluster, flip: bool = False
                     ) -> Iterator[tuple[LinkAssignment, Iterator[dict[Site, Choice]]]]:
    """Lazy (link assignment, combination stream) pairs in search order."""
    d = cluster.defects
    links = sorted(d.links)
    for assignment in _assignments(links):
        fixed = {l: DISABLE for l, off in zip(assignment.links, assignment.disable) if off}
        sites = sorted(d.ancillas) + [l for l, off in zip(assignment.links, assignment.disable) if not off]
        prefs = {s: _preferred(s, d, flip) for s in sites}
        yield assignment, _combos(sites, prefs, fixed)


def sort_candidates(cluster: DefectCluster, flip: bool = False
                    ) -> Iterator[tuple[LinkAssignment, dict[Site, Choice]]]:
    """Every (link assignment, orientation combination), most promising first."""
    for assignment, combos in candidate_groups(cluster, flip):
        for ch in combos:
            yield assignment, ch


# ---------------------------------------------------------------------------
# super-stabilizers

def build_super_stabilizers(patch: Patch) -> tuple[list[tuple[Check, ...]], bool]:
    """Super-stabilizer groups of an analysed patch and whether they are consistent.

    Consistent means one logical qubit and every stabilizer generator
    commuting with every check.
    """
    idx = patch.data_index()
    bits = patch.check_bits(idx)
    groups = [tuple(patch.checks[i] for i in g) for g in patch.super_stabilizers]
    valid = patch.k == 1
    for g in patch.stabilizer_generators:
        v = 0
        for i in g:
            v ^= bits[i]
        p = patch.checks[g[0]].pauli
        for j, c in enumerate(patch.checks):
            if c.pauli is not p and gf2.popcount(v & bits[j]) % 2:
                valid = False
                break
    return groups, valid


# ---------------------------------------------------------------------------
# local search

def _to_strategy(cluster: DefectCluster, choices: Mapping[Site, Choice], res: LocalResult,
                 flip: bool) -> LocalStrategy:
    plans = tuple(_plan(s, c, flip) for s, c in sorted(choices.items(), key=lambda t: repr(t[0])) if c != DISABLE)
    patch = res.patch
    dx, dy = res.offset
    real = [shift_check(c, -dx, -dy) for c in patch.checks]
    gauges = tuple(c for c in real if c.kind in (CheckKind.GAUGE, CheckKind.REPURPOSED))
    supers = tuple(tuple(real[i] for i in g) for g in patch.super_stabilizers)
    return LocalStrategy(cluster.id, tuple(sorted(choices.items(), key=lambda t: repr(t[0]))), plans,
                         res.snakes, res.disabled, gauges, supers, res.loss, res.active)


def _rank_ok(value: int, values: set[int], n: int | None) -> bool:
    if n is None:
        return True
    return value in sorted(values)[:n]


def _passes(res: LocalResult, seen: list[LocalResult], heur: HeuristicsConfig) -> bool:
    pool = seen + [res]
    if heur.n_max is not None:
        if not _rank_ok(res.max_loss, {r.max_loss for r in pool}, heur.n_max):
            return False
        pool = [r for r in pool if _rank_ok(r.max_loss, {p.max_loss for p in pool}, heur.n_max)]
    if heur.n_sum is not None:
        if not _rank_ok(res.sum_loss, {r.sum_loss for r in pool}, heur.n_sum):
            return False
    return True


def _final_filter(found: list[tuple[dict, LocalResult]], heur: HeuristicsConfig) -> list[tuple[dict, LocalResult]]:
    results = [r for _, r in found]
    keep = []
    for ch, r in found:
        others = [x for x in results]
        if heur.n_max is not None and not _rank_ok(r.max_loss, {x.max_loss for x in others}, heur.n_max):
            continue
        if heur.n_sum is not None:
            pool = others
            if heur.n_max is not None:
                pool = [x for x in others if _rank_ok(x.max_loss, {p.max_loss for p in others}, heur.n_max)]
            if not _rank_ok(r.sum_loss, {x.sum_loss for x in pool}, heur.n_sum):
                continue
        keep.append((ch, r))
    # group by loss; take the most active member of each group in loss order, round robin
    groups: dict[tuple[int, int], list[tuple[dict, LocalResult]]] = {}
    for item in keep:
        groups.setdefault(item[1].loss, []).append(item)
    order = sorted(groups, key=lambda l: (max(l), sum(l), l))
    for l in order:
        groups[l].sort(key=lambda it: -it[1].active)  # stable: discovery order breaks ties
    cap = heur.n_sol_max_per_cluster
    out = []
    depth = 0
    while True:
        added = False
        for l in order:
            g = groups[l]
            if depth < len(g):
                out.append(g[depth])
                added = True
                if cap is not None and len(out) >= cap:
                    return out
        if not added:
            return out
        depth += 1


def local_search(cluster: DefectCluster, heur: HeuristicsConfig, flip: bool = False,
                 safety_cap: int = DEFAULT_SAFETY_CAP) -> list[LocalStrategy]:
    """Evaluate candidates of one cluster and keep the best few."""
    region = set(cluster.footprint) | set(cluster.defect_coords)
    found: list[tuple[dict, LocalResult]] = []
    seen_outcomes: set = set()
    evaluated = 0
    for n_assign, (assignment, combos) in enumerate(candidate_groups(cluster, flip)):
        if heur.link_defect_to_ancilla and n_assign > 0:
            break
        best_active = None
        since_better = 0
        skip_run = 0
        for choices in combos:
            evaluated += 1
            if evaluated > safety_cap:
                raise SearchLimitExceeded(f"cluster {cluster.id} exceeded {safety_cap} candidates")
            res = evaluate_local(cluster.defects, choices, region, flip)
            discarded = True
            improved = False
            if res is not None:
                if best_active is None or res.active > best_active:
                    best_active = res.active
                    improved = True
                if _passes(res, [r for _, r in found], heur):
                    discarded = False
                    outcome = (res.disabled, res.loss, frozenset(c for c in choices.items() if c[1] != DISABLE))
                    if outcome not in seen_outcomes:
                        seen_outcomes.add(outcome)
                        found.append((choices, res))
            since_better = 0 if improved else since_better + 1
            skip_run = skip_run + 1 if discarded else 0
            if heur.n_zombie is not None and since_better >= heur.n_zombie:
                break
            if heur.n_skip is not None and skip_run >= heur.n_skip:
                break
    if not found and heur != PRESETS["h6"]:
        # restrictions removed every candidate: fall back to the first valid one
        for _, choices in sort_candidates(cluster, flip):
            evaluated += 1
            if evaluated > safety_cap:
                raise SearchLimitExceeded(f"cluster {cluster.id} exceeded {safety_cap} candidates")
            res = evaluate_local(cluster.defects, choices, region, flip)
            if res is not None:
                found.append((choices, res))
                break
    chosen = _final_filter(found, heur)
    return [_to_strategy(cluster, ch, r, flip) for ch, r in chosen]


# ---------------------------------------------------------------------------
# realisation on the target window

@dataclass(frozen=True)
class Placement:
    """A target window on a chip: its working ancillas and its padding."""

    spec: WindowSpec
    dm: DefectMap
    eff: LayoutDefects
    physical: frozenset
    padding: frozenset


def place(chip: Lattice, spec: WindowSpec, dm: DefectMap) -> Placement:
    """Restrict ``dm`` to ``spec`` and work out which ring ancillas exist."""
    lat = build_window(spec)
    x0, y0, x1, y1 = lat.bounds
    inside = frozenset(a for a in chip.ancillas if x0 <= a[0] <= x1 and y0 <= a[1] <= y1)
    ring = lat.perimeter & inside
    padding = ring - lat.native_ancillas
    sub = DefectMap(dm.data_defects & lat.data, dm.ancilla_defects & inside,
                    frozenset(l for l in dm.link_defects if l[0] in lat.data and l[1] in inside))
    eff = effective_defects(lat, sub, padding)
    physical = inside - sub.ancilla_defects - eff.unusable
    return Placement(spec, sub, eff, physical, padding)


def _clamp(rep: DistanceReport, spec: WindowSpec) -> DistanceReport:
    h, w = spec.target_distance
    return DistanceReport(min(rep.d_x, h), min(rep.d_z, w), rep.d_targ)


def realize(spec: WindowSpec, dm: DefectMap, eff: LayoutDefects, choices: Mapping[Site, Choice],
            method: str = "snl", physical: frozenset | None = None, max_branches: int = 64) -> list[Patch]:
    """Every valid patch (one per corner placement) for a global choice."""
    lat = build_window(spec)
    ext = build_window(spec.extended(2))
    if physical is None:
        physical = frozenset(lat.ancillas - dm.ancilla_defects - eff.unusable)
    x0, y0, x1, y1 = lat.bounds
    beyond = frozenset(a for a in ext.ancillas if not (x0 <= a[0] <= x1 and y0 <= a[1] <= y1))
    # ring measurers that cannot measure take their snake with them; checks
    # measured beyond the ring are dropped by the deformation instead
    layout = build_layout(ext, eff, choices, physical | beyond)
    out = []
    for dfm in deform(layout, lat, physical, max_branches):
        try:
            patch = build_patch(spec, dfm.active, dfm.checks, disabled=dfm.disabled, defects=dm,
                                corners=dfm.corners, method=method)
            patch.distance = _clamp(distance_report(patch), spec)
        except (InvalidPatch, DistanceError):
            continue
        out.append(patch)
    return out


def compose_global(per_cluster: Sequence[Sequence[LocalStrategy]], heur: HeuristicsConfig,
                   spec: WindowSpec, dm: DefectMap, eff: LayoutDefects | None = None,
                   method: str = "snl", physical: frozenset | None = None) -> GlobalStrategy:
    """Best global strategy over the Cartesian product of local strategies.

    At most ``heur.n_sol_max`` combinations are realised, in cluster order.
    """
    if eff is None:
        eff = effective_defects(build_window(spec), dm)
    if any(len(s) == 0 for s in per_cluster):
        raise AdaptFailure("a defect cluster has no valid local strategy")
    combos = itertools.product(*per_cluster)
    if heur.n_sol_max is not None:
        combos = itertools.islice(combos, heur.n_sol_max)
    best: GlobalStrategy | None = None
    evaluated = 0
    holes: list[UnsupportedHole] = []
    for combo in combos:
        choices: dict[Site, Choice] = {}
        for s in combo:
            choices.update(s.choices)
        try:
            patches = realize(spec, dm, eff, choices, method, physical)
        except UnsupportedHole as e:
            holes.append(e)
            continue
        for patch in patches:
            evaluated += 1
            g = GlobalStrategy(tuple(combo), patch, patch.distance, method, heur.name, len(per_cluster))
            if best is None or g.key > best.key:
                best = g
    if best is None:
        if holes:
            raise holes[0]
        raise AdaptFailure("no global strategy yields a valid patch")
    best.evaluated = evaluated
    return best


def _dqd_strategy(cluster: DefectCluster) -> LocalStrategy:
    choices = tuple((s, DISABLE) for s in cluster.sites)
    disabled = frozenset(worst_case_disabled(cluster.defects))
    return LocalStrategy(cluster.id, choices, (), frozenset(), disabled, (), (), (0, 0), 0)


def adapt_window(chip: Lattice, spec: WindowSpec, dm: DefectMap, method: str = "snl",
                 heur: HeuristicsConfig | str = "h0", safety_cap: int = DEFAULT_SAFETY_CAP,
                 include_baseline: bool = True) -> GlobalStrategy:
    """Adapt a code on window ``spec`` of ``chip``.

    When the chip offers ancillas beyond the native ring layout, both
    boundary typings are tried. For SnL the all-disabling strategy is ranked
    alongside the searched ones, so the result is never worse than the
    baseline. Raises ``AdaptFailure`` or ``UnsupportedHole``.
    """
    if isinstance(heur, str):
        heur = HeuristicsConfig.preset(heur)
    if method not in ("snl", "dqd"):
        raise ValueError(f"unknown method {method!r}")
    t0 = time.perf_counter()
    best: GlobalStrategy | None = None
    errors: list[Exception] = []
    flips = [spec.pauli_parity_flip]
    for flip in (spec.pauli_parity_flip, not spec.pauli_parity_flip):
        s = spec.with_flip(flip)
        pl = place(chip, s, dm)
        if flip == spec.pauli_parity_flip and pl.padding:
            flips.append(not flip)
        if flip not in flips:
            continue
        clusters = cluster_defects(pl.eff)
        candidates = []
        # the search and the baseline fail independently
        if method == "snl":
            try:
                per = [local_search(c, heur, flip, safety_cap) for c in clusters]
                candidates.append(compose_global(per, heur, s, pl.dm, pl.eff, method, pl.physical))
            except (AdaptFailure, UnsupportedHole) as e:
                errors.append(e)
        if method == "dqd" or include_baseline:
            try:
                dqd = [[_dqd_strategy(c)] for c in clusters]
                g = compose_global(dqd, heur, s, pl.dm, pl.eff, method, pl.physical)
                g.notes["baseline"] = method == "snl"
                candidates.append(g)
            except (AdaptFailure, UnsupportedHole) as e:
                errors.append(e)
        for g in candidates:
            if best is None or g.key > best.key:
                best = g
    if best is None:
        raise errors[-1] if errors else AdaptFailure("adaptation failed")
    best.profile = heur.name
    best.notes["wall_ms"] = (time.perf_counter() - t0) * 1000
    return best


def adapt(spec: WindowSpec, dm: DefectMap, method: str = "snl", heur: HeuristicsConfig | str = "h0",
          safety_cap: int = DEFAULT_SAFETY_CAP, include_baseline: bool = True) -> GlobalStrategy:
    """Adapt the code occupying the whole chip described by ``spec``."""
    chip = build_window(spec)
    dm.validate(chip)
    return adapt_window(chip, spec, dm, method, heur, safety_cap, include_baseline)
