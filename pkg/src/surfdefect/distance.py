"""Code distance of adapted patches.

``graph_distance`` works on the detector graph of the opposite-type
stabilizer generators: every data qubit is an edge between the (at most two)
generators it belongs to, qubits in a single generator attach to a shared
boundary node, and each edge carries a parity bit telling whether it
anticommutes with a fixed bare logical of the opposite type. A logical
operator is an odd closed walk, so the distance is a breadth-first search on
the parity-doubled graph.

``brute_force_distance`` is an independent exhaustive oracle: it recomputes
the stabilizer group with dense numpy linear algebra and enumerates the
non-trivial logical coset directly.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from . import gf2
from .code import DistanceReport, Patch
from .lattice import Pauli


class DistanceError(RuntimeError):
    pass


def bare_logical(patch: Patch, pauli: Pauli, idx=None) -> int:
    """A ``pauli``-type operator commuting with every check but not a stabilizer."""
    idx = idx or patch.data_index()
    bits = patch.check_bits(idx)
    other = [bits[i] for i in patch.checks_of(pauli.opposite)]
    stab = gf2.Basis()
    for v in patch.generator_bits(pauli, idx):
        stab.add(v)
    for v in gf2.nullspace(other, len(idx)):
        if not stab.contains(v):
            return v
    raise DistanceError(f"no bare {pauli.value} logical: patch encodes no qubit")


def graph_distance(patch: Patch, q: Pauli, exhaustive: bool = False) -> int:
    """Minimum weight of a ``q``-type logical operator."""
    idx = patch.data_index()
    p = q.opposite
    gens = patch.generator_bits(p, idx)
    logical = bare_logical(patch, p, idx)
    n = len(idx)
    member: list[list[int]] = [[] for _ in range(n)]
    for g, v in enumerate(gens):
        for j in gf2.from_bits(v):
            member[j].append(g)
    boundary = len(gens)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(boundary + 1)]
    for j in range(n):
        m = member[j]
        if len(m) > 2:
            if not patch.hyperedge_free:
                return brute_force_distance(patch, q)
            raise DistanceError(f"data qubit in {len(m)} generators")
        u = m[0] if m else boundary
        v = m[1] if len(m) == 2 else boundary
        par = logical >> j & 1
        adj[u].append((v, par))
        if u != v:
            adj[v].append((u, par))
    sources = range(boundary + 1) if exhaustive else (boundary,)
    best = None
    for s in sources:
        d = _odd_walk(adj, s)
        if d is not None and (best is None or d < best):
            best = d
    if best is None:
        raise DistanceError("no logical operator found")
    return best


def _odd_walk(adj, s: int) -> int | None:
    n = len(adj)
    dist = [-1] * (2 * n)
    dist[2 * s] = 0
    dq = deque([2 * s])
    target = 2 * s + 1
    while dq:
        cur = dq.popleft()
        u, par = divmod(cur, 2)
        du = dist[cur]
        for v, e in adj[u]:
            nxt = 2 * v + (par ^ e)
            if dist[nxt] < 0:
                dist[nxt] = du + 1
                if nxt == target:
                    return du + 1
                dq.append(nxt)
    return None


def distance_report(patch: Patch) -> DistanceReport:
    h, w = patch.window.target_distance
    return DistanceReport(graph_distance(patch, Pauli.X), graph_distance(patch, Pauli.Z), min(h, w))


# ---------------------------------------------------------------------------
# exhaustive oracle

def _gf2_rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    m = m.copy() % 2
    rows, cols = m.shape
    piv = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = np.nonzero(m[:, c])[0]
        hit = hit[hit != r]
        m[hit] ^= m[r]
        piv.append(c)
        r += 1
    return m[:r], piv


def _gf2_null(m: np.ndarray, n: int) -> np.ndarray:
    """Right nullspace basis (rows) of ``m`` with ``n`` columns."""
    if m.size == 0:
        return np.eye(n, dtype=np.uint8)
    r, piv = _gf2_rref(m)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        out[i, f] = 1
        for row, p in zip(r, piv):
            if row[f]:
                out[i, p] = 1
    return out


def _rank(m: np.ndarray) -> int:
    return 0 if m.size == 0 else len(_gf2_rref(m)[1])


def _pack(rows: np.ndarray) -> np.ndarray:
    """Pack 0/1 rows (n <= 64 columns) into uint64 words."""
    n = rows.shape[1]
    weights = (np.uint64(1) << np.arange(n, dtype=np.uint64))
    return (rows.astype(np.uint64) * weights).sum(axis=1).astype(np.uint64) if rows.size else np.zeros(0, np.uint64)


def brute_force_distance(patch: Patch, q: Pauli, max_dim: int = 22) -> int:
    """Exact dressed distance by coset enumeration (oracle for small patches).

    The stabilizer group is recomputed here as the center of the gauge group,
    independent of the analysis stored on the patch.
    """
    data = sorted(patch.data)
    n = len(data)
    if n > 64:
        raise DistanceError("oracle limited to 64 active data qubits")
    idx = {c: i for i, c in enumerate(data)}

    def mat(pauli: Pauli) -> np.ndarray:
        rows = [c for c in patch.checks if c.pauli is pauli]
        m = np.zeros((len(rows), n), dtype=np.uint8)
        for i, c in enumerate(rows):
            for d in c.qubits:
                m[i, idx[d]] = 1
        return m

    gq = mat(q)
    gp = mat(q.opposite)
    # center of the gauge group, opposite type: combinations y of gp rows with
    # y @ gp commuting with every q-type check, i.e. (y @ gp) @ gq.T = 0.
    a = (gp.astype(np.int64) @ gq.T.astype(np.int64)) % 2  # |gp| x |gq|
    combos = _gf2_null(a.T.astype(np.uint8), gp.shape[0]) if gp.shape[0] else np.zeros((0, 0), np.uint8)
    sp = (combos.astype(np.int64) @ gp.astype(np.int64)) % 2 if combos.size else np.zeros((0, n), np.int64)
    sp = sp.astype(np.uint8)
    # q-type operators commuting with the opposite stabilizers
    kernel = _gf2_null(sp, n)
    rank_g = _rank(gq)
    if kernel.shape[0] - rank_g != 1:
        raise DistanceError(f"oracle found {kernel.shape[0] - rank_g} logical qubits")
    grows, _ = _gf2_rref(gq)
    base = None
    for v in kernel:
        if _rank(np.vstack([grows, v[None, :]])) > rank_g:
            base = v
            break
    assert base is not None
    if rank_g > max_dim:
        raise DistanceError(f"enumeration dimension {rank_g} exceeds cap {max_dim}")
    words = _pack(grows)
    coset = np.array([_pack(base[None, :])[0]], dtype=np.uint64)
    for w in words:
        coset = np.concatenate([coset, coset ^ w])
    return int(np.bitwise_count(coset).min())


def brute_force_report(patch: Patch) -> DistanceReport:
    h, w = patch.window.target_distance
    return DistanceReport(brute_force_distance(patch, Pauli.X), brute_force_distance(patch, Pauli.Z), min(h, w))
