"""Export a memory experiment of a patch with a repurposed check and verify it."""

from __future__ import annotations

from surfdefect import DefectMap, WindowSpec, adapt
from surfdefect.circuit import export_circuit, verify_circuit


def main() -> None:
    g = adapt(WindowSpec(5, 5), DefectMap(ancilla_defects=frozenset({(6, 6)})))
    text = export_circuit(g.patch, rounds=4, noise=0.001)
    v = verify_circuit(text)
    print(f"{len(text.splitlines())} lines, {v.detectors} detectors, {v.observables} observable, "
          f"deterministic: {v.ok}")
    with open("memory_d5_repurposed.stim", "w", encoding="utf-8") as fh:
        fh.write(text)


if __name__ == "__main__":
    main()
