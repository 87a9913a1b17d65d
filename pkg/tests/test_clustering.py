from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from surfdefect.dqd_baseline import is_rectangular
from surfdefect.clustering import cluster_defects, prune_cluster, worst_case_disabled
from surfdefect.lattice import DefectMap, DefectRates, WindowSpec, ancilla_neighbors, build_window, sample_defects
from surfdefect.layout import LayoutDefects, effective_defects
from surfdefect.strategy_search import adapt


def _clusters(spec, dm):
    return cluster_defects(effective_defects(build_window(spec), dm))


def test_empty_map_has_no_clusters():
    assert cluster_defects(LayoutDefects()) == []


def test_far_data_defects_are_separate():
    d = LayoutDefects(data=frozenset({(5, 5), (17, 5)}))
    cs = cluster_defects(d)
    assert len(cs) == 2
    assert [sorted(c.defects.data) for c in cs] == [[(5, 5)], [(17, 5)]]


def test_adjacent_ancilla_and_data_defect_share_a_cluster():
    d = LayoutDefects(data=frozenset({(7, 7)}), ancillas=frozenset({(8, 8)}))
    (c,) = cluster_defects(d)
    assert c.defects.data == {(7, 7)} and c.defects.ancillas == {(8, 8)}


def _components(cells):
    cells, out = set(cells), []
    while cells:
        stack, comp = [cells.pop()], set()
        while stack:
            c = stack.pop()
            comp.add(c)
            for n in ((c[0] + 2, c[1]), (c[0] - 2, c[1]), (c[0], c[1] + 2), (c[0], c[1] - 2)):
                if n in cells:
                    cells.remove(n)
                    stack.append(n)
        out.append(comp)
    return out


def test_worst_case_avalanche_fills_an_l_shape():
    dis = worst_case_disabled(LayoutDefects(data=frozenset({(5, 5), (7, 5), (5, 7)})))
    assert dis == {(5, 5), (7, 5), (5, 7), (7, 7)}


@given(st.integers(0, 10**9))
def test_worst_case_holes_are_rectangles(seed):
    dm = sample_defects(WindowSpec(9, 9), DefectRates.uniform(0.04), seed)
    eff = effective_defects(build_window(WindowSpec(9, 9)), dm)
    for comp in _components(worst_case_disabled(eff)):
        assert is_rectangular(comp)


def test_cluster_ids_follow_row_major_order():
    d = LayoutDefects(data=frozenset({(21, 3), (3, 21), (3, 3)}))
    cs = cluster_defects(d)
    firsts = [min(c.defects.data, key=lambda q: (q[1], q[0])) for c in cs]
    assert firsts == sorted(firsts, key=lambda q: (q[1], q[0]))
    assert [c.id for c in cs] == [0, 1, 2]


def test_pruned_singleton_data_cluster():
    (c,) = cluster_defects(LayoutDefects(data=frozenset({(9, 9)})))
    p = prune_cluster(c)
    ancillas = set(ancilla_neighbors((9, 9)))  # diagonal offsets coincide for both roles
    ring = {q for a in ancillas for q in ancilla_neighbors(a)}
    assert ancillas | ring <= p.footprint
    assert p.footprint <= c.footprint


def test_pruning_is_idempotent():
    (c,) = cluster_defects(LayoutDefects(ancillas=frozenset({(8, 8)})))
    once = prune_cluster(c)
    assert prune_cluster(once).footprint == once.footprint


def test_chain_of_ancilla_defects_keeps_the_corridor():
    chain = frozenset({(8, 4), (8, 8), (8, 12)})
    (c,) = cluster_defects(LayoutDefects(ancillas=chain))
    p = prune_cluster(c)
    corridor = {q for a in chain for q in ancilla_neighbors(a)}
    assert corridor <= p.footprint


def test_defective_padding_ancilla_is_not_a_site():
    spec = WindowSpec(5, 5, padding="ancilla")
    lat = build_window(spec)
    pad = sorted(lat.padding_ancillas)[0]
    eff = effective_defects(lat, DefectMap(frozenset(), frozenset({pad})))
    assert eff.ancillas == frozenset() and eff.unusable == {pad}
    assert cluster_defects(eff) == []


@given(st.integers(0, 10**9))
def test_footprints_are_disjoint_and_cover_defects(seed):
    spec = WindowSpec(9, 9)
    dm = sample_defects(spec, DefectRates.uniform(0.03), seed)
    eff = effective_defects(build_window(spec), dm)
    cs = cluster_defects(eff)
    for i, a in enumerate(cs):
        for b in cs[i + 1:]:
            assert not a.footprint & b.footprint
    covered_data = set().union(*(c.defects.data for c in cs)) if cs else set()
    covered_sites = set().union(*(set(c.sites) for c in cs)) if cs else set()
    assert covered_data == eff.data
    assert covered_sites == set(eff.sites)


@given(st.integers(0, 10**9))
def test_strategies_stay_inside_the_footprint(seed):
    spec = WindowSpec(7, 7)
    dm = sample_defects(spec, DefectRates.uniform(0.02), seed)
    eff = effective_defects(build_window(spec), dm)
    cs = cluster_defects(eff)
    g = adapt(spec, dm, "snl", "h1")
    foot = set().union(*(c.footprint for c in cs)) if cs else set()
    for s in g.strategies:
        assert set(s.disabled) <= foot | eff.data
        for chk in s.gauge_checks:
            assert chk.ancilla in foot
