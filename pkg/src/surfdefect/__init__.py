"""Adapting rotated surface-code patches to fabrication defects.

Defective ancillas and gates are handled either by repurposing neighbouring
ancillas to measure weight-2 pieces of the lost checks (``method="snl"``) or
by disabling the surrounding data qubits (``method="dqd"``). The main entry
point is :func:`adapt`, which returns the best global strategy together with
its patch and distance report.
"""

from __future__ import annotations

from .boundary_deform import UnsupportedHole
from .code import Check, CheckKind, DistanceReport, InvalidPatch, Parity, Patch
from .distance import brute_force_distance, distance_report, graph_distance
from .lattice import (DefectMap, DefectRates, Lattice, Padding, Pauli, WindowSpec, build_window,
                      defect_map_from_json, sample_defects)
from .strategy_search import PRESETS, AdaptFailure, GlobalStrategy, HeuristicsConfig, adapt

__all__ = [
    "AdaptFailure", "Check", "CheckKind", "DefectMap", "DefectRates", "DistanceReport", "GlobalStrategy",
    "HeuristicsConfig", "InvalidPatch", "Lattice", "PRESETS", "Padding", "Parity", "Patch", "Pauli",
    "UnsupportedHole", "WindowSpec", "adapt", "brute_force_distance", "build_window", "defect_map_from_json",
    "distance_report", "graph_distance", "sample_defects",
]
