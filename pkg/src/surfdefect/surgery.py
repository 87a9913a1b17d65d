"""Sub-patches, merged patches and the CNOT yield experiment.

A processor is adapted once as a single patch. Sub-patches reuse that global
choice of repurposings and only redo the boundary deformation for their own
window, so every sub-patch and merged patch is measured with compatible
checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .boundary_deform import UnsupportedHole
from .code import Patch
from .lattice import Coord, DefectMap, Lattice, Pauli, WindowSpec, build_window
from .strategy_search import (AdaptFailure, GlobalStrategy, HeuristicsConfig, adapt, place, realize)

__all__ = ["Processor", "subpatch", "merge_patches", "cnot_windows", "cnot_yield_trial", "CnotTrial", "data_window",
           "SurgeryError"]


class SurgeryError(ValueError):
    """Patches cannot be merged as requested."""


@dataclass
class Processor:
    """An adapted chip: its lattice, defects and global strategy."""

    spec: WindowSpec
    dm: DefectMap
    strategy: GlobalStrategy

    @classmethod
    def adapt(cls, spec: WindowSpec, dm: DefectMap, method: str = "snl",
              heur: HeuristicsConfig | str = "h0") -> "Processor":
        return cls(spec, dm, adapt(spec, dm, method, heur))

    @property
    def chip(self) -> Lattice:
        return build_window(self.spec)

    @property
    def flip(self) -> bool:
        return self.strategy.patch.window.pauli_parity_flip

    @property
    def choices(self) -> dict:
        out = {}
        for s in self.strategy.strategies:
            out.update(s.choices)
        return out


def data_window(x: int, y: int, w: int, h: int, flip: bool) -> WindowSpec:
    """Window of ``w x h`` data qubits whose top-left data qubit has index (x, y)."""
    return WindowSpec(w, h, (1 + 2 * x, 1 + 2 * y), pauli_parity_flip=flip)


def subpatch(proc: Processor, window: WindowSpec) -> Patch:
    """Best patch on ``window`` keeping the processor's adaptation choices.

    Raises ``AdaptFailure`` when no valid patch exists and
    ``UnsupportedHole`` for holes holding more than two window corners.
    """
    chip = proc.chip
    spec = window.with_flip(proc.flip)
    pl = place(chip, spec, proc.dm)
    sites = set(pl.eff.sites)
    choices = {s: c for s, c in proc.choices.items() if s in sites}
    patches = realize(spec, pl.dm, pl.eff, choices, proc.strategy.method, pl.physical)
    if not patches:
        raise AdaptFailure(f"no valid patch on window {spec.width}x{spec.height} at {spec.origin}")
    return max(patches, key=lambda p: p.distance.key(p.active_data))


def _data_box(spec: WindowSpec) -> tuple[int, int, int, int]:
    w, h = spec.lattice_size
    ox, oy = spec.origin
    return ox, oy, ox + 2 * (w - 1), oy + 2 * (h - 1)


def merge_patches(proc: Processor, a: Patch, b: Patch, basis: Pauli) -> Patch:
    """Merged patch measuring the ``basis`` logical product of ``a`` and ``b``.

    A Z merge joins vertically separated patches (X-type boundaries face each
    other); an X merge joins horizontally separated ones. The routing rows or
    columns between them become part of the bounding window.
    """
    ax0, ay0, ax1, ay1 = _data_box(a.window)
    bx0, by0, bx1, by1 = _data_box(b.window)
    vertical_gap = by0 - ay1 if by0 > ay1 else ay0 - by1
    horizontal_gap = bx0 - ax1 if bx0 > ax1 else ax0 - bx1
    if basis is Pauli.Z:
        if vertical_gap < 4:
            raise SurgeryError("a Z merge needs at least one routing row between vertically stacked patches")
    elif horizontal_gap < 4:
        raise SurgeryError("an X merge needs at least one routing column between side-by-side patches")
    x0, y0 = min(ax0, bx0), min(ay0, by0)
    x1, y1 = max(ax1, bx1), max(ay1, by1)
    spec = WindowSpec((x1 - x0) // 2 + 1, (y1 - y0) // 2 + 1, (x0, y0), pauli_parity_flip=proc.flip)
    merged = subpatch(proc, spec)
    merged.notes["merge_basis"] = basis.value
    merged.notes["routing"] = _routing(a, b, spec)
    return merged


def _routing(a: Patch, b: Patch, spec: WindowSpec) -> list[Coord]:
    lat = build_window(spec)
    covered = set()
    for p in (a, b):
        x0, y0, x1, y1 = _data_box(p.window)
        covered |= {q for q in lat.data if x0 <= q[0] <= x1 and y0 <= q[1] <= y1}
    return sorted(lat.data - covered)


# ---------------------------------------------------------------------------
# CNOT yield

@dataclass
class CnotTrial:
    success: bool
    reason: str = ""
    windows: dict[str, tuple[int, int, int, int]] = field(default_factory=dict)  # x, y, w, h in data units
    expansions: int = 0
    distances: dict[str, tuple[int, int]] = field(default_factory=dict)
    clamped: bool = False


def cnot_windows(d: int) -> dict[str, tuple[int, int, int, int]]:
    """Initial control (top left), ancilla (bottom left), target (bottom right) windows."""
    n = 3 * d
    return {"control": (0, 0, d, d), "ancilla": (0, n - d, d, d), "target": (n - d, n - d, d, d)}


def _grow(name: str, box: tuple[int, int, int, int], vertical: bool, n: int) -> tuple[tuple[int, int, int, int], bool]:
    x, y, w, h = box
    if vertical:
        if name == "control":
            h += 1
        else:
            y -= 1
            h += 1
    else:
        if name == "target":
            x -= 1
            w += 1
        else:
            w += 1
    clamped = x < 0 or y < 0 or x + w > n or y + h > n
    x, y = max(x, 0), max(y, 0)
    w, h = min(w, n - x), min(h, n - y)
    return (x, y, w, h), clamped


def _separated(b1, b2) -> bool:
    """At least one full data row or column strictly between two boxes."""
    x1, y1, w1, h1 = b1
    x2, y2, w2, h2 = b2
    gap_x = max(x2 - (x1 + w1), x1 - (x2 + w2))
    gap_y = max(y2 - (y1 + h1), y1 - (y2 + h2))
    return gap_x >= 1 or gap_y >= 1


def cnot_yield_trial(d: int, dm: DefectMap, method: str = "snl", heur: HeuristicsConfig | str = "h0",
                     max_steps: int | None = None, observer: Callable[[Patch], None] | None = None) -> CnotTrial:
    """Whether three distance-``d`` patches plus routing fit on a ``3d x 3d`` processor.

    ``observer`` sees the processor patch and every sub-patch that was built.
    """
    n = 3 * d
    spec = WindowSpec(n, n)
    try:
        proc = Processor.adapt(spec, dm, method, heur)
    except (AdaptFailure, UnsupportedHole) as e:
        return CnotTrial(False, f"processor adaptation failed: {e}")
    if observer is not None:
        observer(proc.strategy.patch)
    boxes = cnot_windows(d)
    trial = CnotTrial(True, windows=dict(boxes))
    steps = 0
    limit = max_steps if max_steps is not None else 4 * n
    for name in ("control", "ancilla", "target"):
        while True:
            box = boxes[name]
            try:
                patch = subpatch(proc, data_window(*box, proc.flip))
            except (AdaptFailure, UnsupportedHole) as e:
                return CnotTrial(False, f"{name}: {e}", dict(boxes), steps, trial.distances, trial.clamped)
            if observer is not None:
                observer(patch)
            rep = patch.distance
            trial.distances[name] = (rep.d_x, rep.d_z)
            def_x, def_z = d - rep.d_x, d - rep.d_z
            if def_x <= 0 and def_z <= 0:
                break
            vertical = def_x > 0 and (def_x >= def_z or def_z <= 0)
            boxes[name], clamped = _grow(name, box, vertical, n)
            trial.clamped |= clamped
            steps += 1
            others = [b for k, b in boxes.items() if k != name]
            if clamped or not all(_separated(boxes[name], o) for o in others):
                return CnotTrial(False, f"{name} window no longer leaves a routing row/column",
                                 dict(boxes), steps, trial.distances, trial.clamped)
            if steps > limit:
                return CnotTrial(False, "expansion limit reached", dict(boxes), steps, trial.distances, trial.clamped)
    trial.windows = dict(boxes)
    trial.expansions = steps
    return trial
