"""Adapt the committed 7x7 worked example with both methods and draw the results."""

from __future__ import annotations

import sys
from pathlib import Path

from surfdefect import adapt, defect_map_from_json
from surfdefect.render import render_patch

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "worked_example.json"


def main(out_dir: str = ".") -> None:
    spec, dm = defect_map_from_json(FIXTURE.read_text(encoding="utf-8"))
    for method in ("dqd", "snl"):
        g = adapt(spec, dm, method)
        rep = g.report
        print(f"{method}: d_x={rep.d_x} d_z={rep.d_z} active data={g.patch.active_data}")
        path = Path(out_dir) / f"worked_example_{method}.svg"
        path.write_text(render_patch(g.patch, title=f"{method} ({rep.d_x}, {rep.d_z})"), encoding="utf-8")
        print(f"  wrote {path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
