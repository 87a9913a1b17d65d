"""Data-qubit disabling: the baseline adaptation without repurposing.

Every defective ancilla disables its data neighbours, every defective link
disables its data qubit, and the weight-1 avalanche grows the holes into
rectangles. Super-stabilizers, boundary deformation and distance evaluation
share the code paths of the repurposing search.
"""

from __future__ import annotations

from .lattice import DefectMap, Lattice, WindowSpec
from .strategy_search import GlobalStrategy, HeuristicsConfig, adapt, adapt_window


def dqd_adapt(spec: WindowSpec, dm: DefectMap, heur: HeuristicsConfig | str = "h0") -> GlobalStrategy:
    """Baseline adaptation of the whole chip ``spec``; raises ``AdaptFailure``."""
    return adapt(spec, dm, method="dqd", heur=heur)


def dqd_adapt_window(chip: Lattice, spec: WindowSpec, dm: DefectMap) -> GlobalStrategy:
    """Baseline adaptation of a window cut out of ``chip``."""
    return adapt_window(chip, spec, dm, method="dqd")


def is_rectangular(cells) -> bool:
    """Whether a set of data coordinates fills its bounding box."""
    cells = set(cells)
    if not cells:
        return True
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    n = ((max(xs) - min(xs)) // 2 + 1) * ((max(ys) - min(ys)) // 2 + 1)
    return n == len(cells)
