"""Seeded batch experiments: distance sweeps, yield and heuristic profiles.

Per-sample seeds are derived from a master seed with numpy's
``SeedSequence``: the sample with index ``i`` for target distance ``d`` and
rate index ``j`` uses ``SeedSequence(master, spawn_key=(d, j, i))`` and takes
the first 64-bit word of its state. The same configuration is therefore used
for every method and heuristic profile, which makes per-sample comparisons
paired.
"""

from __future__ import annotations

import csv
import io
import math
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .boundary_deform import UnsupportedHole
from .lattice import DefectMap, DefectRates, WindowSpec, sample_defects
from .strategy_search import PROFILE_ORDER, AdaptFailure, adapt

CSV_COLUMNS = ("method", "d_targ", "q_d", "q_a", "q_l", "padding", "seed", "d_x", "d_z", "d_out",
               "active_data", "n_clusters", "profile", "wall_ms", "status")


def sample_seed(master: int, d: int, rate_index: int, sample: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(d, rate_index, sample))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _as_rates(q) -> DefectRates:
    return q if isinstance(q, DefectRates) else DefectRates.uniform(float(q))


def run_sample(spec: WindowSpec, rates: DefectRates, seed: int, method: str = "snl",
               profile: str = "h0", record_time: bool = False, dm: DefectMap | None = None,
               observer: Callable | None = None) -> dict:
    """Adapt one sampled configuration and describe it as a CSV row.

    ``observer(row, strategy)`` is called for every successful adaptation.
    """
    if dm is None:
        dm = sample_defects(spec, rates, seed)
    row = {"method": method, "d_targ": min(spec.target_distance), "q_d": rates.q_d, "q_a": rates.q_a,
           "q_l": rates.q_l, "padding": spec.padding.value, "seed": seed, "d_x": "", "d_z": "", "d_out": "",
           "active_data": "", "n_clusters": "", "profile": profile, "wall_ms": "", "status": "ok"}
    t0 = time.perf_counter()
    try:
        g = adapt(spec, dm, method, profile)
    except UnsupportedHole as e:
        row["status"] = "unsupported_hole"
        row["_error"] = str(e)
    except AdaptFailure as e:
        row["status"] = "adapt_failure"
        row["_error"] = str(e)
    else:
        rep = g.report
        row.update(d_x=rep.d_x, d_z=rep.d_z, d_out=rep.d_out, active_data=g.patch.active_data,
                   n_clusters=g.n_clusters)
        if observer is not None:
            observer(row, g)
    if record_time:
        row["wall_ms"] = round((time.perf_counter() - t0) * 1000, 1)
    row["_defects"] = len(dm)
    return row


def write_csv(rows: Iterable[dict], out=None) -> str:
    """Rows as CSV text (also written to ``out`` when it is a path or stream)."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    text = buf.getvalue()
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return text


def mean_ci(values: Sequence[float], z: float = 1.96) -> tuple[float, float, float]:
    """Mean and normal-approximation 95% interval."""
    n = len(values)
    if n == 0:
        return math.nan, math.nan, math.nan
    m = float(np.mean(values))
    se = float(np.std(values, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return m, m - z * se, m + z * se


def proportion_ci(k: int, n: int, z: float = 1.96) -> tuple[float, float, float]:
    if n == 0:
        return math.nan, math.nan, math.nan
    p = k / n
    se = math.sqrt(p * (1 - p) / n)
    return p, max(0.0, p - z * se), min(1.0, p + z * se)


@dataclass
class SweepSummary:
    method: str
    d_targ: int
    q: float
    padding: str
    samples: int
    failures: int
    mean_d_out: float
    mean_d_rel: float
    ci_low: float
    ci_high: float
    histogram: dict[int, int] = field(default_factory=dict)


@dataclass
class SweepResult:
    rows: list[dict]
    summaries: list[SweepSummary]

    def csv(self, out=None) -> str:
        return write_csv(self.rows, out)


def _summaries(rows: list[dict]) -> list[SweepSummary]:
    groups: dict[tuple, list[dict]] = defaultdict(list)
    for r in rows:
        groups[(r["method"], r["d_targ"], r["q_d"], r["padding"], r["profile"])].append(r)
    out = []
    for (method, d, q, padding, _), rs in groups.items():
        ok = [r for r in rs if r["status"] == "ok"]
        rel = [r["d_out"] / d for r in ok]
        m, lo, hi = mean_ci(rel)
        out.append(SweepSummary(method, d, q, padding, len(rs), len(rs) - len(ok),
                                float(np.mean([r["d_out"] for r in ok])) if ok else math.nan, m, lo, hi,
                                dict(sorted(Counter(r["d_out"] for r in ok).items()))))
    return out


def distance_sweep(d_range: Iterable[int], rates: Iterable, samples: int = 200, profile: str = "h0",
                   methods: Sequence[str] = ("snl",), padding: str = "none", seed: int = 0,
                   record_time: bool = False, progress=None, observer: Callable | None = None) -> SweepResult:
    """Relative distance per target distance and defect rate."""
    rows = []
    rates = [_as_rates(q) for q in rates]
    for d in d_range:
        spec = WindowSpec(d, d, padding=padding)
        for j, r in enumerate(rates):
            for i in range(samples):
                s = sample_seed(seed, d, j, i)
                dm = sample_defects(spec, r, s)
                for m in methods:
                    rows.append(run_sample(spec, r, s, m, profile, record_time, dm, observer))
                if progress:
                    progress(d, r, i)
    return SweepResult(rows, _summaries(rows))


@dataclass
class YieldEntry:
    method: str
    d_targ: int
    q: float
    padding: str
    samples: int
    successes: int
    failures: int
    yield_: float
    ci_low: float
    ci_high: float


def yield_sweep(d_range: Iterable[int], rate, samples: int = 200,
                paddings: Sequence[str] = ("none", "ancilla", "d_plus_1"),
                methods: Sequence[str] = ("snl", "dqd"), profile: str = "h0", seed: int = 0,
                record_time: bool = False, observer: Callable | None = None) -> tuple[list[YieldEntry], list[dict]]:
    """Fraction of samples reaching the target distance.

    A ``no_strategy`` entry per padding counts samples without any defect.
    """
    r = _as_rates(rate)
    rows: list[dict] = []
    entries: list[YieldEntry] = []
    for d in d_range:
        for padding in paddings:
            spec = WindowSpec(d, d, padding=padding)
            per_method: dict[str, list[dict]] = defaultdict(list)
            clean = 0
            for i in range(samples):
                s = sample_seed(seed, d, 0, i)
                dm = sample_defects(spec, r, s)
                clean += dm.empty
                for m in methods:
                    row = run_sample(spec, r, s, m, profile, record_time, dm, observer)
                    rows.append(row)
                    per_method[m].append(row)
            for m, rs in per_method.items():
                ok = [x for x in rs if x["status"] == "ok"]
                k = sum(1 for x in ok if x["d_out"] == d)
                p, lo, hi = proportion_ci(k, len(rs))
                entries.append(YieldEntry(m, d, r.q_d, padding, len(rs), k, len(rs) - len(ok), p, lo, hi))
            p, lo, hi = proportion_ci(clean, samples)
            entries.append(YieldEntry("no_strategy", d, r.q_d, padding, samples, clean, 0, p, lo, hi))
    return entries, rows


@dataclass
class ProfileEntry:
    d_targ: int
    profile: str
    mean_ratio: float
    best_so_far_ratio: float
    mean_wall_ms: float
    timeouts: int
    failures: int


def heuristic_profile_sweep(d_range: Iterable[int], rate, samples: int = 200,
                            profiles: Sequence[str] = PROFILE_ORDER, padding: str = "none",
                            seed: int = 0, budget_s: float | None = None) -> tuple[list[ProfileEntry], list[dict]]:
    """Distance ratio per heuristics profile, keeping the best result so far.

    A configuration whose previous profile took longer than ``budget_s``
    skips the remaining profiles (recorded as timeouts) and keeps its best.
    """
    r = _as_rates(rate)
    entries: list[ProfileEntry] = []
    rows: list[dict] = []
    for d in d_range:
        spec = WindowSpec(d, d, padding=padding)
        best: dict[int, int] = {}
        stopped: set[int] = set()
        dms = [(sample_seed(seed, d, 0, i), None) for i in range(samples)]
        dms = [(s, sample_defects(spec, r, s)) for s, _ in dms]
        for prof in profiles:
            ratios, times = [], []
            timeouts = failures = 0
            for i, (s, dm) in enumerate(dms):
                if i in stopped:
                    timeouts += 1
                    continue
                row = run_sample(spec, r, s, "snl", prof, True, dm)
                rows.append(row)
                times.append(row["wall_ms"])
                if row["status"] == "ok":
                    ratios.append(row["d_out"] / d)
                    best[i] = max(best.get(i, 0), row["d_out"])
                else:
                    failures += 1
                if budget_s is not None and row["wall_ms"] > budget_s * 1000:
                    stopped.add(i)
            bsf = float(np.mean([best[i] / d for i in sorted(best)])) if best else math.nan
            entries.append(ProfileEntry(d, prof, float(np.mean(ratios)) if ratios else math.nan, bsf,
                                        float(np.mean(times)) if times else math.nan, timeouts, failures))
    return entries, rows
