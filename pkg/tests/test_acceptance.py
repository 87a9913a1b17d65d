"""Acceptance criteria 1-9.

Each test records a single pass/fail line, printed in the terminal summary.
Tolerances are the published ones; statistical suites use fixed master
seeds, so their outcomes are reproducible.
"""

from __future__ import annotations

import pytest

from conftest import load_fixture, record_criterion
from structure import structural_problems
from surfdefect.boundary_deform import UnsupportedHole
from surfdefect.circuit import export_circuit, touch_schedule, verify_circuit
from surfdefect.code import CheckKind
from surfdefect.distance import brute_force_distance, graph_distance
from surfdefect.experiments import distance_sweep, heuristic_profile_sweep, sample_seed, yield_sweep
from surfdefect.lattice import DefectMap, DefectRates, Pauli, WindowSpec, build_window, sample_defects
from surfdefect.layout import Orientation
from surfdefect.primitives import preserving_orientations
from surfdefect.strategy_search import PROFILE_ORDER, AdaptFailure, adapt, place, realize
from surfdefect.surgery import cnot_yield_trial

MASTER_SEED = 2024

# every adapted patch of criteria 1-6 is handed to the structural checks
_structural = {"patches": 0, "problems": []}


def _inspect(patch, origin: str) -> None:
    _structural["patches"] += 1
    probs = structural_problems(patch)
    if probs:
        _structural["problems"].append((origin, probs[:3]))


def _observe(row, g) -> None:
    _inspect(g.patch, f"{row['method']} d={row['d_targ']} seed={row['seed']}")


def _pair(g) -> tuple[int, int]:
    return g.report.d_x, g.report.d_z


# ---------------------------------------------------------------------------


def _orientation_pair(spec, dm, site, o):
    pl = place(build_window(spec), spec, dm)
    patches = realize(spec, pl.dm, pl.eff, {site: o}, physical=pl.physical)
    if not patches:
        return None
    p = max(patches, key=lambda p: p.distance.key(p.active_data))
    _inspect(p, f"primitive {site} {o.value}")
    return p.distance.d_x, p.distance.d_z


def _adapt_pair(spec, dm, method):
    try:
        g = adapt(spec, dm, method, "h6")
    except (AdaptFailure, UnsupportedHole) as e:
        return type(e).__name__
    _inspect(g.patch, f"primitive {method}")
    return _pair(g)


def test_criterion_1_primitive_distance_table():
    misses = []
    for d in (3, 5, 7, 9):
        spec = WindowSpec(d, d)
        full, one, two = (d, d), (d - 1, d - 1), (d - 2, d - 2)
        q, anc = (d, d), [(d + 1, d + 1), (d + 1, d - 1)]
        cells = {
            "data snl": (_adapt_pair(spec, DefectMap(frozenset({q})), "snl"), one),
            "data dqd": (_adapt_pair(spec, DefectMap(frozenset({q})), "dqd"), one),
            "link snl": (_adapt_pair(spec, DefectMap(link_defects=frozenset({(q, anc[0])})), "snl"), full),
            "link dqd": (_adapt_pair(spec, DefectMap(link_defects=frozenset({(q, anc[0])})), "dqd"), one),
        }
        for a in anc:
            dm = DefectMap(ancilla_defects=frozenset({a}))
            keep = preserving_orientations(a, False)
            for o in Orientation:
                got = _orientation_pair(spec, dm, a, o)
                if o in keep:
                    cells[f"ancilla {a} preserving"] = (got, full)
                else:
                    lossy_ok = got in ((d - 2, d), (d, d - 2))
                    cells[f"ancilla {a} lossy"] = (got, got if lossy_ok else "drop of 2 in one direction")
            cells[f"ancilla {a} dqd"] = (_adapt_pair(spec, dm, "dqd"), two)
        misses += [f"d={d} {name}: got {got}, want {want}" for name, (got, want) in cells.items() if got != want]
    record_criterion(1, not misses, f"{len(misses)} mismatching cells" + ("; " + "; ".join(misses) if misses else ""))
    assert not misses


def test_criterion_2_oracle_equivalence():
    mism, checked = [], 0
    for d in (3, 5):
        spec = WindowSpec(d, d)
        for i in range(200):
            seed = sample_seed(MASTER_SEED, d, 2, i)
            dm = sample_defects(spec, DefectRates.uniform(0.05), seed)
            for method in ("snl", "dqd"):
                try:
                    p = adapt(spec, dm, method).patch
                except (AdaptFailure, UnsupportedHole):
                    continue
                for q in Pauli:
                    checked += 1
                    g, b = graph_distance(p, q), brute_force_distance(p, q)
                    if g != b:
                        mism.append((d, seed, method, q.value, g, b))
    record_criterion(2, not mism, f"{checked} distance pairs compared, {len(mism)} mismatches {mism[:3]}")
    assert not mism


def test_criterion_3_worked_example():
    spec, dm, raw = load_fixture("worked_example.json")
    dqd, snl = adapt(spec, dm, "dqd"), adapt(spec, dm, "snl")
    _inspect(dqd.patch, "worked example dqd")
    _inspect(snl.patch, "worked example snl")
    got = {"dqd": list(_pair(dqd)), "snl": list(_pair(snl))}
    want = {k: raw["expected"][k] for k in ("dqd", "snl")}
    record_criterion(3, got == want, f"got {got}, want {want}")
    assert got == want


@pytest.mark.slow
def test_criterion_4_relative_distance_at_d17():
    res = distance_sweep([17], [0.01], samples=500, methods=("snl", "dqd"), seed=MASTER_SEED, observer=_observe)
    by = {s.method: s for s in res.summaries}
    snl, dqd = by["snl"], by["dqd"]
    rows = {}
    for r in res.rows:
        rows.setdefault(r["seed"], {})[r["method"]] = r
    violations = 0
    for pair in rows.values():
        s, b = pair["snl"], pair["dqd"]
        s_out = s["d_out"] if s["status"] == "ok" else 0
        b_out = b["d_out"] if b["status"] == "ok" else 0
        violations += s_out < b_out
    ok = 0.77 <= snl.mean_d_rel <= 0.87 and snl.mean_d_rel - dqd.mean_d_rel >= 0.15 and violations == 0
    record_criterion(4, ok, f"SnL <d_rel>={snl.mean_d_rel:.4f} (failures {snl.failures}), "
                            f"DQD <d_rel>={dqd.mean_d_rel:.4f} (failures {dqd.failures}), "
                            f"gap={snl.mean_d_rel - dqd.mean_d_rel:.4f}, per-sample violations={violations}")
    assert ok


@pytest.mark.slow
def test_criterion_5_yield_at_d7():
    entries, _ = yield_sweep([7], 0.01, samples=1000, methods=("snl", "dqd"), seed=MASTER_SEED, observer=_observe)
    y = {(e.method, e.padding): e for e in entries}
    targets = {("dqd", "none"): (0.10, 0.03), ("snl", "none"): (0.50, 0.05),
               ("snl", "ancilla"): (0.65, 0.05), ("snl", "d_plus_1"): (0.80, 0.05)}
    parts, ok = [], True
    for key, (want, tol) in targets.items():
        got = y[key].yield_
        hit = abs(got - want) <= tol
        ok &= hit
        parts.append(f"{key[0]}/{key[1]}={got:.3f} (want {want:.2f}+-{tol:.2f}{'' if hit else ', miss'})")
    same = y[("dqd", "none")].successes == y[("no_strategy", "none")].successes
    ok &= same
    parts.append(f"dqd/none == no_strategy: {same}")
    record_criterion(5, ok, "; ".join(parts))
    assert ok


@pytest.mark.slow
def test_criterion_6_cnot_yield():
    fail = {}
    for d in (3, 5, 7):
        for method in ("snl", "dqd"):
            n = 0
            for i in range(500):
                dm = sample_defects(WindowSpec(3 * d, 3 * d), DefectRates.uniform(0.01),
                                    sample_seed(MASTER_SEED, d, 0, i))
                n += not cnot_yield_trial(d, dm, method, observer=lambda p: _inspect(p, "cnot")).success
            fail[(method, d)] = n / 500
    dqd = [fail[("dqd", d)] for d in (3, 5, 7)]
    snl = [fail[("snl", d)] for d in (3, 5, 7)]
    ok = abs(dqd[0] - 0.50) <= 0.07 and dqd == sorted(dqd) and all(f < 0.10 for f in snl)
    record_criterion(6, ok, f"DQD failure d=3,5,7: {dqd}; SnL failure: {snl}")
    assert ok


def test_criterion_7_structural_properties():
    if _structural["patches"] == 0:
        # run on its own: check a fresh batch instead of the other suites' patches
        distance_sweep([5, 7], [0.01, 0.02], samples=50, methods=("snl", "dqd"), seed=MASTER_SEED,
                       observer=_observe)
    probs = _structural["problems"]
    record_criterion(7, not probs, f"{_structural['patches']} patches checked, {len(probs)} with problems "
                                   f"{probs[:2]}")
    assert not probs


def test_criterion_8_export_determinism():
    bad_det, bad_sched, n, repurposed = [], [], 0, 0
    refs = {}
    i = 0
    while n < 50:
        d = (3, 5, 7)[n % 3]
        spec = WindowSpec(d, d, padding="ancilla")
        seed = sample_seed(MASTER_SEED, d, 8, i)
        i += 1
        dm = sample_defects(spec, DefectRates.uniform(0.02), seed)
        try:
            patch = adapt(spec, dm).patch
        except (AdaptFailure, UnsupportedHole):
            continue
        n += 1
        if not verify_circuit(export_circuit(patch)).ok:
            bad_det.append(seed)
        if any(c.kind is CheckKind.REPURPOSED for c in patch.checks):
            repurposed += 1
            w = patch.window
            if w not in refs:
                refs[w] = touch_schedule(export_circuit(adapt(w, DefectMap()).patch, rounds=2))
            ts = touch_schedule(export_circuit(patch, rounds=2))
            if any(not v <= refs[w].get(k, set()) for k, v in ts.items()):
                bad_sched.append(seed)
    ok = not bad_det and not bad_sched
    record_criterion(8, ok, f"{n} patches ({repurposed} with repurposed checks): "
                            f"{len(bad_det)} non-deterministic, {len(bad_sched)} schedule changes")
    assert ok


@pytest.mark.slow
def test_criterion_9_heuristic_profiles():
    entries, _ = heuristic_profile_sweep([7], 0.01, samples=200, profiles=PROFILE_ORDER, seed=MASTER_SEED)
    bsf = [e.best_so_far_ratio for e in entries]
    monotone = all(a <= b for a, b in zip(bsf, bsf[1:]))
    gain = bsf[-1] - bsf[0]
    ok = monotone and gain <= 0.01
    record_criterion(9, ok, "best-so-far " + ", ".join(f"{e.profile}={e.best_so_far_ratio:.4f}" for e in entries)
                     + f"; monotone={monotone}, gain={gain:.4f} (limit 0.01)")
    assert ok
