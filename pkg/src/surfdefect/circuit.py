"""Stabilizer-circuit export for memory experiments and lattice-surgery flows.

The text format is line based and readable by stim: ``QUBIT_COORDS``, ``R``,
``RX``, ``CX``, ``M``, ``MX``, ``TICK``, ``DETECTOR``, ``OBSERVABLE_INCLUDE``
and the noise channels ``X_ERROR``, ``Z_ERROR``, ``DEPOLARIZE2``. Comment
lines start with ``#``; ``# round <t>`` separates measurement rounds.

Every round resets the ancillas of the checks measured in that round, runs
four CX layers, and measures. A check touches data qubit ``q`` in the layer
its *owner* ancilla would use for ``q`` in the defect-free code, so truncated
checks idle in their missing layers and repurposed checks reuse the layers of
the defective ancilla. X checks use ``RX``/``MX`` with the ancilla as control;
Z checks use ``R``/``M`` with the ancilla as target.

Detectors are chosen with an exact symbolic frame simulation (``FrameSim``):
each random outcome is a fresh GF(2) variable, and a set of measurements is a
valid detector exactly when its variables cancel. Consecutive outcomes of the
same stabilizer or super-stabilizer are compared directly; when an operator
appears for the first time (after initialisation, a merge or a split) it is
reduced against the latest outcomes of all other operators. Raw gauge-check
comparisons are random by construction and are written as
``# GAUGE_DETECTOR`` comments only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import gf2
from .code import Check, Patch
from .distance import bare_logical
from .lattice import Coord, Pauli

__all__ = ["Instruction", "Depolarizing", "ExportError", "FrameSim", "parse_circuit", "format_circuit",
           "export_circuit", "export_flow", "export_flow_circuits", "verify_circuit", "touch_schedule"]


class ExportError(ValueError):
    """The patches cannot be exported as requested."""


@dataclass(frozen=True)
class Depolarizing:
    """Single-rate circuit noise: DEPOLARIZE2 after CX layers, flips on resets and before measurements."""

    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"noise rate {self.p} outside [0, 1]")


def _noise_model(noise) -> Depolarizing | None:
    if noise is None or noise == "none":
        return None
    if isinstance(noise, Depolarizing):
        return noise if noise.p > 0 else None
    p = float(noise)
    return Depolarizing(p) if p > 0 else None


# ---------------------------------------------------------------------------
# text format

@dataclass(frozen=True)
class Instruction:
    """One line of circuit text. Comments use ``name == "#"`` and keep their text as the single target."""

    name: str
    args: tuple[float, ...] = ()
    targets: tuple[str, ...] = ()

    def __str__(self) -> str:
        if self.name == "#":
            return "# " + self.targets[0] if self.targets and self.targets[0] else "#"
        s = self.name
        if self.args:
            s += "(" + ", ".join(_fmt_num(a) for a in self.args) + ")"
        if self.targets:
            s += " " + " ".join(self.targets)
        return s

    @property
    def qubits(self) -> list[int]:
        return [int(t) for t in self.targets if t.isdigit()]

    @property
    def lookbacks(self) -> list[int]:
        return [int(t[4:-1]) for t in self.targets if t.startswith("rec[")]


def _fmt_num(a: float) -> str:
    return str(int(a)) if float(a).is_integer() else repr(float(a))


_LINE = re.compile(r"^([A-Z][A-Z0-9_]*)(?:\(([^)]*)\))?(?:\s+(.*))?$")


def parse_circuit(text: str) -> list[Instruction]:
    """Instruction list of circuit text; raises ``ValueError`` on malformed lines."""
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            out.append(Instruction("#", (), (line[2:] if line.startswith("# ") else line[1:],)))
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"line {n}: cannot parse {line!r}")
        args = tuple(float(a) for a in m.group(2).split(",")) if m.group(2) else ()
        targets = tuple(m.group(3).split()) if m.group(3) else ()
        out.append(Instruction(m.group(1), args, targets))
    return out


def format_circuit(instrs: Iterable[Instruction]) -> str:
    return "".join(str(i) + "\n" for i in instrs)


# ---------------------------------------------------------------------------
# symbolic frame simulation

class FrameSim:
    """Pauli-frame simulation with symbolic randomness.

    ``x[q]`` and ``z[q]`` are bitsets over random variables. Z-basis resets
    and measurements inject a fresh variable into the Z frame, X-basis ones
    into the X frame; a measurement outcome is the opposite frame component.
    Outcomes whose bitset is zero are deterministic (and equal to zero, since
    the circuits only contain CSS resets, CX and measurements).
    """

    def __init__(self, n_qubits: int) -> None:
        self.nvar = 0
        self.x = [self._fresh() for _ in range(n_qubits)]
        self.z = [self._fresh() for _ in range(n_qubits)]
        self.records: list[int] = []

    def _fresh(self) -> int:
        self.nvar += 1
        return 1 << (self.nvar - 1)

    def _grow(self, q: int) -> None:
        while q >= len(self.x):
            self.x.append(self._fresh())
            self.z.append(self._fresh())

    def apply(self, ins: Instruction) -> None:
        name = ins.name
        if name in ("R", "RX", "M", "MX", "CX"):
            qs = ins.qubits
            for q in qs:
                self._grow(q)
        if name == "R":
            for q in qs:
                self.x[q], self.z[q] = 0, self._fresh()
        elif name == "RX":
            for q in qs:
                self.x[q], self.z[q] = self._fresh(), 0
        elif name == "M":
            for q in qs:
                self.records.append(self.x[q])
                self.z[q] = self._fresh()
        elif name == "MX":
            for q in qs:
                self.records.append(self.z[q])
                self.x[q] = self._fresh()
        elif name == "CX":
            for c, t in zip(qs[::2], qs[1::2]):
                self.x[t] ^= self.x[c]
                self.z[c] ^= self.z[t]
        elif name not in ("#", "TICK", "QUBIT_COORDS", "DETECTOR", "OBSERVABLE_INCLUDE", "X_ERROR",
                          "Z_ERROR", "DEPOLARIZE1", "DEPOLARIZE2", "SHIFT_COORDS"):
            raise ValueError(f"unsupported instruction {name}")

    def form(self, lookbacks: Iterable[int]) -> int:
        v = 0
        n = len(self.records)
        for k in lookbacks:
            v ^= self.records[n + k]
        return v


@dataclass
class Verification:
    detectors: int
    observables: int
    nondeterministic_detectors: list[int]
    nondeterministic_observables: list[int]

    @property
    def ok(self) -> bool:
        return not self.nondeterministic_detectors and not self.nondeterministic_observables


def verify_circuit(text: str) -> Verification:
    """Check that every detector and observable is deterministic without noise."""
    sim = FrameSim(0)
    obs: dict[int, int] = {}
    bad_det: list[int] = []
    n_det = 0
    for ins in parse_circuit(text):
        if ins.name == "DETECTOR":
            if sim.form(ins.lookbacks):
                bad_det.append(n_det)
            n_det += 1
        elif ins.name == "OBSERVABLE_INCLUDE":
            k = int(ins.args[0])
            obs[k] = obs.get(k, 0) ^ sim.form(ins.lookbacks)
        else:
            sim.apply(ins)
    return Verification(n_det, len(obs), bad_det, sorted(k for k, v in obs.items() if v))


# ---------------------------------------------------------------------------
# builder

@dataclass
class _Latest:
    recs: tuple[int, ...]
    form: int


class _Builder:
    def __init__(self, qubits: Iterable[Coord], noise: Depolarizing | None) -> None:
        self.coords = sorted(set(qubits), key=lambda c: (c[1], c[0]))
        self.index = {c: i for i, c in enumerate(self.coords)}
        self.noise = noise
        self.instrs: list[Instruction] = []
        self.sim = FrameSim(len(self.coords))
        self.latest: dict[tuple, _Latest] = {}
        self.gauge_last: dict[tuple, int] = {}
        self.n_det = 0
        for c, i in self.index.items():
            self.instrs.append(Instruction("QUBIT_COORDS", (float(c[0]), float(c[1])), (str(i),)))

    # -- emission ----------------------------------------------------------
    def emit(self, ins: Instruction) -> None:
        self.instrs.append(ins)
        self.sim.apply(ins)

    def comment(self, text: str) -> None:
        self.instrs.append(Instruction("#", (), (text,)))

    def _targets(self, qs: Iterable[Coord]) -> tuple[str, ...]:
        return tuple(str(self.index[q]) for q in qs)

    def reset(self, qs: Sequence[Coord], basis: Pauli) -> None:
        if not qs:
            return
        t = self._targets(sorted(qs, key=self.index.get))
        self.emit(Instruction("R" if basis is Pauli.Z else "RX", (), t))
        if self.noise:
            self.emit(Instruction("X_ERROR" if basis is Pauli.Z else "Z_ERROR", (self.noise.p,), t))

    def measure(self, qs: Sequence[Coord], basis: Pauli) -> dict[Coord, int]:
        if not qs:
            return {}
        qs = sorted(qs, key=self.index.get)
        t = self._targets(qs)
        if self.noise:
            self.emit(Instruction("X_ERROR" if basis is Pauli.Z else "Z_ERROR", (self.noise.p,), t))
        start = len(self.sim.records)
        self.emit(Instruction("M" if basis is Pauli.Z else "MX", (), t))
        return {q: start + i for i, q in enumerate(qs)}

    def cx(self, pairs: Sequence[tuple[Coord, Coord]]) -> None:
        if pairs:
            t = tuple(s for c, tg in pairs for s in (str(self.index[c]), str(self.index[tg])))
            self.emit(Instruction("CX", (), t))
            if self.noise:
                self.emit(Instruction("DEPOLARIZE2", (self.noise.p,), t))
        self.emit(Instruction("TICK"))

    def _rec_targets(self, recs: Iterable[int]) -> tuple[str, ...]:
        n = len(self.sim.records)
        return tuple(f"rec[{r - n}]" for r in sorted(set(recs), reverse=True))

    def detector(self, recs: Sequence[int], coord: tuple[float, float, float]) -> None:
        self.emit(Instruction("DETECTOR", coord, self._rec_targets(recs)))
        self.n_det += 1

    def observable(self, k: int, recs: Sequence[int], label: str) -> None:
        form = 0
        for r in recs:
            form ^= self.sim.records[r]
        if form:
            raise ExportError(f"observable {label} is not deterministic")
        self.comment(f"observable {k}: {label}")
        self.emit(Instruction("OBSERVABLE_INCLUDE", (float(k),), self._rec_targets(recs)))

    # -- rounds --------------------------------------------------------------
    def round(self, checks: Sequence[Check], t: int) -> dict[int, int]:
        """Measure ``checks`` once; returns check position -> record index."""
        self.comment(f"round {t}")
        seen: dict[Coord, int] = {}
        for i, c in enumerate(checks):
            if c.ancilla in seen:
                raise ExportError(f"ancilla {c.ancilla} measures two checks in round {t}")
            seen[c.ancilla] = i
        self.reset([c.ancilla for c in checks if c.pauli is Pauli.Z], Pauli.Z)
        self.reset([c.ancilla for c in checks if c.pauli is Pauli.X], Pauli.X)
        self.emit(Instruction("TICK"))
        for slot in range(1, 5):
            pairs, busy = [], set()
            for c in checks:
                for q, s in c.support:
                    if s != slot:
                        continue
                    if q in busy or c.ancilla in busy:
                        raise ExportError(f"qubit {q} used twice in layer {slot} of round {t}")
                    busy |= {q, c.ancilla}
                    pairs.append((c.ancilla, q) if c.pauli is Pauli.X else (q, c.ancilla))
            self.cx(sorted(pairs, key=lambda p: (self.index[p[0]], self.index[p[1]])))
        rz = self.measure([c.ancilla for c in checks if c.pauli is Pauli.Z], Pauli.Z)
        rx = self.measure([c.ancilla for c in checks if c.pauli is Pauli.X], Pauli.X)
        rec = {**rz, **rx}
        return {i: rec[c.ancilla] for i, c in enumerate(checks)}

    def form_of(self, recs: Iterable[int]) -> int:
        v = 0
        for r in recs:
            v ^= self.sim.records[r]
        return v

    def compare(self, items: Sequence[tuple[tuple, tuple[int, ...], tuple[float, float, float]]],
                extra: dict[tuple, _Latest] | None = None) -> None:
        """Emit detectors for newly measured operators and update ``latest``.

        ``items`` holds (operator key, records, detector coordinate).
        """
        snapshot = dict(self.latest)
        basis: gf2.Basis | None = None
        keys: list[tuple] = []
        for key, recs, coord in items:
            form = self.form_of(recs)
            prev = snapshot.get(key)
            if prev is not None and prev.form == form:
                self.detector(recs + prev.recs, coord)
            elif form == 0:
                self.detector(recs, coord)
            else:
                if basis is None:
                    basis, keys = gf2.Basis(), []
                    for k, lat in snapshot.items():
                        if lat.form:
                            basis.add(lat.form, len(keys))
                            keys.append(k)
                res, track = basis.reduce(form)
                if res == 0:
                    combo = list(recs)
                    for j in gf2.from_bits(track):
                        combo.extend(snapshot[keys[j]].recs)
                    # records appearing twice cancel
                    cnt: dict[int, int] = {}
                    for r in combo:
                        cnt[r] = cnt.get(r, 0) ^ 1
                    self.detector([r for r, v in cnt.items() if v], coord)
            self.latest[key] = _Latest(tuple(recs), form)
        if extra:
            self.latest.update(extra)

    def text(self) -> str:
        return format_circuit(self.instrs)


# ---------------------------------------------------------------------------
# patches as detector units

def _units(patch: Patch) -> list[tuple[Pauli, frozenset[Coord], tuple[int, ...]]]:
    """(type, support, check positions) of every measured stabilizer generator."""
    out = []
    for i, c in enumerate(patch.checks):
        if patch.central[i]:
            out.append((c.pauli, frozenset(c.qubits), (i,)))
    for g in patch.super_stabilizers:
        sup: set[Coord] = set()
        for i in g:
            sup ^= set(patch.checks[i].qubits)
        out.append((patch.checks[g[0]].pauli, frozenset(sup), tuple(g)))
    return out


def _key(pauli: Pauli, support: frozenset[Coord]) -> tuple:
    return (pauli.value, tuple(sorted(support)))


def _run_rounds(b: _Builder, patches: Sequence[Patch], rounds: int, t0: int) -> tuple[int, list]:
    """Measure ``patches`` for ``rounds`` rounds; returns the next round and (key, records) per measured operator."""
    checks: list[Check] = []
    owners: list[tuple[int, int]] = []
    for pi, p in enumerate(patches):
        for ci, c in enumerate(p.checks):
            checks.append(c)
            owners.append((pi, ci))
    pos = {o: k for k, o in enumerate(owners)}
    units = [(pi, u) for pi, p in enumerate(patches) for u in _units(p)]
    log: list[tuple[tuple, tuple[int, ...]]] = []
    for t in range(t0, t0 + rounds):
        active = [k for k, c in enumerate(checks) if c.measured_in(t)]
        rec = b.round([checks[k] for k in active], t)
        by_pos = {active[j]: r for j, r in rec.items()}
        items = []
        for pi, (pauli, sup, members) in units:
            ks = [pos[(pi, i)] for i in members]
            if all(k in by_pos for k in ks):
                anc = checks[ks[0]].ancilla
                items.append((_key(pauli, sup), tuple(by_pos[k] for k in ks), (float(anc[0]), float(anc[1]), float(t))))
        b.compare(items)
        log.extend((k, r) for k, r, _ in items)
        # raw gauge comparisons: random by design, annotated for reference only
        for pi, p in enumerate(patches):
            for i, c in enumerate(p.checks):
                k = pos[(pi, i)]
                if p.central[i] or k not in by_pos:
                    continue
                gk = (c.ancilla, c.pauli.value, c.qubits)
                if gk in b.gauge_last:
                    n = len(b.sim.records)
                    b.comment(f"GAUGE_DETECTOR({c.ancilla[0]}, {c.ancilla[1]}, {t}) "
                              f"rec[{by_pos[k] - n}] rec[{b.gauge_last[gk] - n}]")
                b.gauge_last[gk] = by_pos[k]
    return t0 + rounds, log


def _final(b: _Builder, patches: Sequence[Patch], basis: Pauli, t: int) -> dict[Coord, int]:
    data = sorted(set().union(*(p.data for p in patches)), key=b.index.get)
    b.comment(f"final {basis.value} measurement of data")
    rec = b.measure(data, basis)
    items = []
    for p in patches:
        for pauli, sup, _ in _units(p):
            if pauli is basis:
                c = min(sup)
                items.append((_key(pauli, sup), tuple(rec[q] for q in sup), (float(c[0]), float(c[1]), float(t))))
    b.compare(items)
    return rec


def _logical_support(patch: Patch, pauli: Pauli) -> frozenset[Coord]:
    order = sorted(patch.data)
    return frozenset(order[j] for j in gf2.from_bits(bare_logical(patch, pauli)))


def _qubits(patches: Iterable[Patch]) -> set[Coord]:
    qs: set[Coord] = set()
    for p in patches:
        qs |= set(p.data)
        qs |= {c.ancilla for c in p.checks}
    return qs


def _default_rounds(patches: Sequence[Patch]) -> int:
    d = min(min(p.window.target_distance) for p in patches)
    defective = any(p.super_stabilizers or any(not c for c in p.central) for p in patches)
    return 2 * d if defective else d


def export_circuit(patch: Patch, rounds: int | None = None, noise=None, basis: Pauli | str = Pauli.Z) -> str:
    """Memory experiment: initialise data in ``basis``, measure ``rounds`` rounds, read out.

    ``noise`` is ``None``/``"none"``, a ``Depolarizing`` instance or a rate.
    """
    basis = Pauli(basis)
    if rounds is None:
        rounds = _default_rounds([patch])
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    b = _Builder(_qubits([patch]), _noise_model(noise))
    b.comment(f"memory experiment, basis {basis.value}, {rounds} rounds, {patch.active_data} data qubits")
    b.reset(sorted(patch.data), basis)
    t, _ = _run_rounds(b, [patch], rounds, 0)
    rec = _final(b, [patch], basis, t)
    b.observable(0, [rec[q] for q in sorted(_logical_support(patch, basis))], f"{basis.value}_L")
    return b.text()


# ---------------------------------------------------------------------------
# lattice-surgery flows

def _as_bits(sup: Iterable[Coord], col: dict[Coord, int]) -> int:
    return gf2.to_bits(col[q] for q in sup)


def _merged_logical(merged: Patch, parts: Sequence[frozenset[Coord]], routing: frozenset[Coord],
                    pauli: Pauli) -> frozenset[Coord]:
    """A ``pauli`` logical of ``merged`` equal to the product of ``parts`` outside ``routing``."""
    base: set[Coord] = set()
    for s in parts:
        base ^= set(s)
    others = [c for c in merged.checks if c.pauli is not pauli]
    rvars = sorted(routing)
    # column j: which opposite checks routing qubit j anticommutes with
    cols = gf2.Basis()
    for j, q in enumerate(rvars):
        cols.add(gf2.to_bits(i for i, c in enumerate(others) if q in c.qubits), j)
    rhs = gf2.to_bits(i for i, c in enumerate(others) if len(base & set(c.qubits)) % 2)
    res, track = cols.reduce(rhs)
    if res:
        raise ExportError(f"no {pauli.value} logical of the merged patch extends the patch logicals")
    return frozenset(base ^ {rvars[j] for j in gf2.from_bits(track)})


def export_flow(p1: Patch, p2: Patch, merged: Patch, merge_basis: Pauli | str, flow_basis: Pauli | str,
                rounds: int | None = None, noise=None, names: tuple[str, str] = ("1", "2")) -> str:
    """One merge-split flow: stabilise, merge, split, stabilise, read out in ``flow_basis``.

    ``merge_basis`` is the type of the measured two-patch logical product.
    Routing data are prepared and read out in the opposite basis. Observables:
    with ``flow_basis == merge_basis`` the merge outcome and both single-patch
    logicals; otherwise the logical of the merged patch.
    """
    merge_basis, flow_basis = Pauli(merge_basis), Pauli(flow_basis)
    if set(p1.data) & set(p2.data):
        raise ExportError("patches overlap")
    dropped = (set(p1.data) | set(p2.data)) - set(merged.data)
    if dropped:
        raise ExportError(f"incompatible patch pair: the merged patch disables data {sorted(dropped)}")
    if {c.ancilla for c in p1.checks} & {c.ancilla for c in p2.checks}:
        raise ExportError("patches share ancillas")
    if rounds is None:
        rounds = _default_rounds([p1, p2, merged])
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    routing = frozenset(merged.data - p1.data - p2.data)
    if not routing:
        raise ExportError("merged patch has no routing data")
    route_basis = merge_basis.opposite
    b = _Builder(_qubits([p1, p2, merged]), _noise_model(noise))
    n1, n2 = names
    b.comment(f"flow: {merge_basis.value}{merge_basis.value} merge of {n1} and {n2}, "
              f"{flow_basis.value} basis, {rounds} rounds per phase")
    b.reset(sorted(p1.data | p2.data), flow_basis)
    t, _ = _run_rounds(b, [p1, p2], rounds, 0)
    pre = dict(b.latest)
    b.comment("merge")
    b.reset(sorted(routing), route_basis)
    t, occurrences = _run_rounds(b, [merged], rounds, t)
    b.comment("split")
    rsplit = b.measure(sorted(routing), route_basis)
    b.latest.update({("m", q): _Latest((r,), b.form_of((r,))) for q, r in rsplit.items()})
    t, _ = _run_rounds(b, [p1, p2], rounds, t)
    rfinal = _final(b, [p1, p2], flow_basis, t)
    l1, l2 = _logical_support(p1, flow_basis), _logical_support(p2, flow_basis)
    if flow_basis is merge_basis:
        recs = _merge_outcome(b, occurrences, pre, l1 ^ l2, merge_basis)
        b.observable(0, recs, f"{merge_basis.value}_{n1} {merge_basis.value}_{n2} (merge outcome)")
        b.observable(1, [rfinal[q] for q in sorted(l1)], f"{flow_basis.value}_{n1}")
        b.observable(2, [rfinal[q] for q in sorted(l2)], f"{flow_basis.value}_{n2}")
    else:
        lm = _merged_logical(merged, [l1, l2], routing, flow_basis)
        recs = [rsplit[q] if q in routing else rfinal[q] for q in sorted(lm)]
        b.observable(0, recs, f"{flow_basis.value}_({n1}+{n2})")
    return b.text()


def _merge_outcome(b: _Builder, occurrences, pre: dict[tuple, _Latest], target: frozenset[Coord],
                   pauli: Pauli) -> list[int]:
    """Records whose parity is the merge measurement of ``target``.

    Uses the first merged-phase measurement of each ``pauli`` operator together
    with the last pre-merge outcomes of the separate patches.
    """
    cands: list[tuple[frozenset[Coord], tuple[int, ...]]] = []
    seen = set()
    for key, recs in occurrences:
        if key[0] == pauli.value and key not in seen:
            seen.add(key)
            cands.append((frozenset(key[1]), recs))
    for key, lat in pre.items():
        if key[0] == pauli.value:
            cands.append((frozenset(key[1]), lat.recs))
    coords = sorted(set(target).union(*(s for s, _ in cands)))
    col = {q: i for i, q in enumerate(coords)}
    basis = gf2.Basis()
    for j, (sup, _) in enumerate(cands):
        basis.add(_as_bits(sup, col), j)
    res, track = basis.reduce(_as_bits(target, col))
    if res:
        raise ExportError("merge outcome is not a product of measured operators")
    cnt: dict[int, int] = {}
    for j in gf2.from_bits(track):
        for r in cands[j][1]:
            cnt[r] = cnt.get(r, 0) ^ 1
    return sorted(r for r, v in cnt.items() if v)


def export_flow_circuits(control: Patch, ancilla: Patch, target: Patch, merged_ca: Patch, merged_at: Patch,
                         rounds: int | None = None, noise=None) -> dict[str, str]:
    """The four CNOT flows: ZZ merge of control and ancilla, XX merge of ancilla and target, each read in Z and X."""
    out = {}
    for basis in (Pauli.Z, Pauli.X):
        out[f"control_ancilla_{basis.value}"] = export_flow(control, ancilla, merged_ca, Pauli.Z, basis,
                                                            rounds, noise, ("C", "A"))
    for basis in (Pauli.Z, Pauli.X):
        out[f"ancilla_target_{basis.value}"] = export_flow(ancilla, target, merged_at, Pauli.X, basis,
                                                           rounds, noise, ("A", "T"))
    return out


def touch_schedule(text: str) -> dict[tuple[int, Coord], set[tuple[int, str]]]:
    """(round, data coordinate) -> {(layer, check type)} for every CX in the text.

    Data qubits are the (odd, odd) coordinates; an ancilla controlling a CX
    measures an X check, an ancilla targeted by one measures a Z check.
    """
    coords: dict[int, Coord] = {}
    out: dict[tuple[int, Coord], set[tuple[int, str]]] = {}
    rnd, layer = -1, 0
    for ins in parse_circuit(text):
        if ins.name == "QUBIT_COORDS":
            coords[int(ins.targets[0])] = (int(ins.args[0]), int(ins.args[1]))
        elif ins.name == "#" and ins.targets[0].startswith("round "):
            rnd, layer = int(ins.targets[0].split()[1]), 0
        elif ins.name == "#" and ins.targets[0] in ("merge", "split") or ins.name in ("M", "MX"):
            layer = 0
        elif ins.name == "TICK":
            layer += 1
        elif ins.name == "CX":
            qs = ins.qubits
            for c, t in zip(qs[::2], qs[1::2]):
                cc, tc = coords[c], coords[t]
                if tc[0] % 2 == 1:
                    out.setdefault((rnd, tc), set()).add((layer, "X"))
                else:
                    out.setdefault((rnd, cc), set()).add((layer, "Z"))
    return out
