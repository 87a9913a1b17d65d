"""Command-line interface: ``surfdefect <command> [options]``.

Exit status is 0 on success, 1 when adaptation fails (including holes with
more than two window corners) and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .boundary_deform import UnsupportedHole
from .circuit import ExportError, export_circuit, export_flow_circuits
from .experiments import distance_sweep, heuristic_profile_sweep, sample_seed, write_csv, yield_sweep
from .lattice import DefectMap, DefectRates, Padding, Pauli, WindowSpec, defect_map_from_json, sample_defects
from .render import render_patch
from .strategy_search import PROFILE_ORDER, AdaptFailure, adapt
from .surgery import (Processor, SurgeryError, cnot_windows, cnot_yield_trial, data_window, merge_patches,
                      subpatch)

EXIT_OK, EXIT_ADAPT, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"7"``, ``"3,5,9"`` or ``"3..9"`` (odd steps) / ``"4..8:1"`` (explicit step)."""
    try:
        out: list[int] = []
        for part in text.split(","):
            if ".." in part:
                lo, rest = part.split("..")
                hi, _, step = rest.partition(":")
                out.extend(range(int(lo), int(hi) + 1, int(step) if step else 2))
            else:
                out.append(int(part))
    except ValueError as exc:
        raise InputError(f"bad range {text!r}") from exc
    if not out or min(out) < 2:
        raise InputError(f"bad range {text!r}")
    return out


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad number list {text!r}") from exc
    if any(not 0 <= v <= 1 for v in vals):
        raise InputError(f"rates must lie in [0, 1]: {text!r}")
    return vals


def _load(path: str) -> tuple[WindowSpec, DefectMap]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return defect_map_from_json(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _strategy_json(g) -> dict:
    d = g.patch.summary()
    d.update(method=g.method, profile=g.profile, n_clusters=g.n_clusters,
             baseline=bool(g.notes.get("baseline")),
             repurposings=[{"site": repr(site), "choice": getattr(c, "value", c)}
                           for s in g.strategies for site, c in s.choices])
    return d


# ---------------------------------------------------------------------------
# commands

def cmd_adapt(a) -> int:
    spec, dm = _load(a.input)
    g = adapt(spec, dm, a.method, a.profile)
    _write(json.dumps(_strategy_json(g), indent=2) + "\n", a.out)
    if a.render:
        Path(a.render).write_text(render_patch(g.patch), encoding="utf-8")
    return EXIT_OK


def cmd_render(a) -> int:
    spec, dm = _load(a.input)
    g = adapt(spec, dm, a.method, a.profile)
    _write(render_patch(g.patch), a.out)
    return EXIT_OK


def cmd_export(a) -> int:
    spec, dm = _load(a.input)
    if a.cnot:
        d = spec.width // 3
        if spec.width != spec.height or spec.width != 3 * d:
            raise InputError("a CNOT export needs a square 3d x 3d processor")
        proc = Processor.adapt(spec, dm, a.method, a.profile)
        w = cnot_windows(d)
        p = {k: subpatch(proc, data_window(*b, proc.flip)) for k, b in w.items()}
        mca = merge_patches(proc, p["control"], p["ancilla"], Pauli.Z)
        mat = merge_patches(proc, p["ancilla"], p["target"], Pauli.X)
        flows = export_flow_circuits(p["control"], p["ancilla"], p["target"], mca, mat, a.rounds, a.noise)
        out = Path(a.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        for name, text in flows.items():
            (out / f"{name}.stim").write_text(text, encoding="utf-8")
        return EXIT_OK
    g = adapt(spec, dm, a.method, a.profile)
    _write(export_circuit(g.patch, a.rounds, a.noise, a.basis), a.out)
    return EXIT_OK


def cmd_sweep(a) -> int:
    res = distance_sweep(parse_range(a.d), parse_floats(a.q), a.samples, a.profile, a.method.split(","),
                         a.padding, a.seed, a.timing)
    _write(res.csv(), a.out)
    for s in res.summaries:
        print(f"{s.method} d={s.d_targ} q={s.q}: <d_rel>={s.mean_d_rel:.4f} "
              f"[{s.ci_low:.4f}, {s.ci_high:.4f}] failures={s.failures}/{s.samples}", file=sys.stderr)
    return EXIT_OK


def cmd_yield(a) -> int:
    (q,) = parse_floats(a.q)[:1]
    entries, rows = yield_sweep(parse_range(a.d), q, a.samples, a.padding.split(","), a.method.split(","),
                                a.profile, a.seed, a.timing)
    _write(write_csv(rows), a.out)
    for e in entries:
        print(f"{e.method} d={e.d_targ} padding={e.padding}: yield={e.yield_:.4f} "
              f"[{e.ci_low:.4f}, {e.ci_high:.4f}] failures={e.failures}/{e.samples}", file=sys.stderr)
    return EXIT_OK


def cmd_cnot(a) -> int:
    (q,) = parse_floats(a.q)[:1]
    lines = ["method,d,trial,seed,success,expansions,reason"]
    methods = a.method.split(",")
    for d in parse_range(a.d):
        fails = dict.fromkeys(methods, 0)
        for i in range(a.trials):
            s = sample_seed(a.seed, d, 0, i)
            dm = sample_defects(WindowSpec(3 * d, 3 * d), DefectRates.uniform(q), s)
            for m in methods:
                t = cnot_yield_trial(d, dm, m, a.profile)
                fails[m] += not t.success
                reason = t.reason.replace('"', "'")
                lines.append(f'{m},{d},{i},{s},{int(t.success)},{t.expansions},"{reason}"')
        for m in methods:
            print(f"{m} d={d}: failure rate {fails[m] / a.trials:.4f}", file=sys.stderr)
    _write("\n".join(lines) + "\n", a.out)
    return EXIT_OK


def cmd_heuristics(a) -> int:
    (q,) = parse_floats(a.q)[:1]
    profiles = a.profiles.split(",") if a.profiles else list(PROFILE_ORDER)
    entries, rows = heuristic_profile_sweep(parse_range(a.d), q, a.samples, profiles, a.padding, a.seed, a.budget)
    lines = ["d_targ,profile,mean_ratio,best_so_far_ratio,mean_wall_ms,timeouts,failures"]
    for e in entries:
        lines.append(",".join(str(v) for v in asdict(e).values()))
    _write("\n".join(lines) + "\n", a.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--method", default="snl", help="snl or dqd (comma list for sweeps)")
    common.add_argument("--profile", default="h0", choices=list(PROFILE_ORDER) + ["h0z2"])
    common.add_argument("--out", help="output file (directory for CNOT flows); stdout if omitted")

    sample = argparse.ArgumentParser(add_help=False)
    sample.add_argument("--d", "--distance", dest="d", default="7", help="distance, list or range like 3..9")
    sample.add_argument("--q", "--defect-rate", dest="q", default="0.01", help="uniform defect rate(s)")
    sample.add_argument("--samples", type=int, default=200)
    sample.add_argument("--timing", action="store_true", help="fill the wall_ms column (breaks byte-identity)")

    p = argparse.ArgumentParser(prog="surfdefect", description="Defect-adapted surface code patches.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("adapt", parents=[common], help="adapt a patch to a defect map")
    s.add_argument("--in", dest="input", required=True, help="DefectMap JSON")
    s.add_argument("--render", help="also write an SVG drawing")
    s.set_defaults(func=cmd_adapt)

    s = sub.add_parser("render", parents=[common], help="draw the adapted patch as SVG")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("export-circuit", parents=[common], help="stabilizer circuit of the adapted patch")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--rounds", type=int, default=None)
    s.add_argument("--noise", type=float, default=None, help="depolarizing rate p")
    s.add_argument("--basis", choices=["Z", "X"], default="Z")
    s.add_argument("--cnot", action="store_true", help="write the four CNOT flows of a 3d x 3d processor")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("sweep", parents=[common, sample], help="relative-distance sweep (CSV)")
    s.add_argument("--padding", default="none", choices=[x.value for x in Padding])
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("yield", parents=[common, sample], help="yield per padding (CSV)")
    s.add_argument("--padding", default="none,ancilla,d_plus_1")
    s.set_defaults(func=cmd_yield)

    s = sub.add_parser("cnot-yield", parents=[common], help="CNOT layout yield on 3d x 3d processors")
    s.add_argument("--d", "--distance", dest="d", default="3..7")
    s.add_argument("--q", "--defect-rate", dest="q", default="0.01")
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_cnot)

    s = sub.add_parser("heuristics", parents=[common, sample], help="heuristic profiles h0..h6")
    s.add_argument("--padding", default="none", choices=[x.value for x in Padding])
    s.add_argument("--profiles", default=None, help="comma list, default h0..h6")
    s.add_argument("--budget", type=float, default=None, help="seconds per configuration before skipping")
    s.set_defaults(func=cmd_heuristics)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for m in a.method.split(","):
        if m not in ("snl", "dqd"):
            print(f"error: unknown method {m!r}", file=sys.stderr)
            return EXIT_INPUT
    try:
        return a.func(a)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnsupportedHole as exc:
        print(f"adaptation failed: unsupported hole: {exc}", file=sys.stderr)
        return EXIT_ADAPT
    except (AdaptFailure, SurgeryError, ExportError) as exc:
        print(f"adaptation failed: {exc}", file=sys.stderr)
        return EXIT_ADAPT


if __name__ == "__main__":
    sys.exit(main())
