"""Relative distance of both methods on a few hundred random chips."""

from __future__ import annotations

from surfdefect.experiments import distance_sweep, yield_sweep


def main() -> None:
    res = distance_sweep([5, 7, 9], [0.01], samples=100, methods=("snl", "dqd"), seed=1)
    for s in res.summaries:
        print(f"{s.method} d={s.d_targ}: <d_out/d>={s.mean_d_rel:.3f} "
              f"[{s.ci_low:.3f}, {s.ci_high:.3f}], histogram {s.histogram}")
    entries, _ = yield_sweep([7], 0.01, samples=100, seed=1)
    for e in entries:
        print(f"yield {e.method:11s} padding={e.padding:8s} {e.yield_:.2f}")


if __name__ == "__main__":
    main()
