"""Tanner graphs, girth and shortest-cycle counts.

Two routes compute the same :class:`GirthReport`.  :func:`girth` runs a
breadth-first search from every variable node and works on any parity-check
matrix.  :func:`qc_girth` only needs the protograph and its circulant shifts:
a lifted cycle of length ``2k`` exists exactly when some closed,
non-backtracking protograph walk of ``2k`` edges has an alternating shift sum
of zero modulo ``v``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

from .protograph import ProtoMatrix, QCParityCheck


class UnsupportedStructureError(ValueError):
    """The fast girth path needs an untruncated circulant code."""


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite graph with variables ``0..V-1`` and checks ``0..C-1``."""

    V: int
    C: int
    edges: tuple[tuple[int, int], ...]
    var_adj: tuple[tuple[int, ...], ...]
    chk_adj: tuple[tuple[int, ...], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def from_parity_check(H) -> TannerGraph:
    H = np.asarray(H)
    C, V = H.shape
    rows, cols = np.nonzero(H)
    edges = tuple(zip(cols.tolist(), rows.tolist()))
    var_adj: list[list[int]] = [[] for _ in range(V)]
    chk_adj: list[list[int]] = [[] for _ in range(C)]
    for var, chk in edges:
        var_adj[var].append(chk)
        chk_adj[chk].append(var)
    return TannerGraph(
        V, C, edges, tuple(map(tuple, var_adj)), tuple(map(tuple, chk_adj))
    )


@total_ordering
@dataclass(frozen=True)
class GirthReport:
    """Girth with the number of shortest cycles.

    ``girth`` is ``None`` for an acyclic graph.  When ``capped`` is true no
    cycle up to the search limit exists and ``girth`` holds the lower bound
    ``max_len + 2``.
    """

    girth: int | None
    multiplicity: int = 0
    elapsed: float = 0.0
    capped: bool = False

    @property
    def acyclic(self) -> bool:
        return self.girth is None

    def _key(self):
        g = float("inf") if self.girth is None else self.girth
        return (g, -self.multiplicity if not self.capped else 0)

    def __eq__(self, other):
        if not isinstance(other, GirthReport):
            return NotImplemented
        return self.girth == other.girth and self.multiplicity == other.multiplicity

    def __lt__(self, other):
        return self._key() < other._key()

    def __hash__(self):
        return hash((self.girth, self.multiplicity))

    def __str__(self):
        if self.girth is None:
            return "acyclic"
        if self.capped:
            return f">= {self.girth}"
        return str(self.girth)


def _adjacency(g: TannerGraph) -> list[list[int]]:
    # checks are numbered after the variables
    adj = [[g.V + c for c in nbrs] for nbrs in g.var_adj]
    adj += [list(nbrs) for nbrs in g.chk_adj]
    return adj


def _shortest_cycle_through(adj, root: int, best: float) -> float:
    dist = {root: 0}
    parent = {root: -1}
    frontier = [root]
    found = best
    depth = 0
    while frontier and 2 * depth + 1 < found:
        nxt = []
        for u in frontier:
            du = dist[u]
            for w in adj[u]:
                if w == parent[u]:
                    continue
                dw = dist.get(w)
                if dw is None:
                    dist[w] = du + 1
                    parent[w] = u
                    nxt.append(w)
                else:
                    found = min(found, du + dw + 1)
        frontier = nxt
        depth += 1
    return found


def _cycles_through(adj, root: int, half: int) -> int:
    """Shortest cycles of length ``2 * half`` through ``root``.

    In a graph of girth ``2 * half`` two distinct shortest paths of length
    ``half`` from the root are internally disjoint, so every antipodal vertex
    with ``sigma`` shortest paths closes ``sigma choose 2`` cycles.
    """
    dist = {root: 0}
    sigma = {root: 1}
    frontier = [root]
    for depth in range(half):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                dw = dist.get(w)
                if dw is None:
                    dist[w] = depth + 1
                    sigma[w] = sigma[u]
                    nxt.append(w)
                elif dw == depth + 1:
                    sigma[w] += sigma[u]
        frontier = nxt
    return sum(sigma[x] * (sigma[x] - 1) // 2 for x in frontier)


def girth(g: TannerGraph) -> GirthReport:
    """Exact girth and shortest-cycle count by per-root BFS."""
    start = time.perf_counter()
    adj = _adjacency(g)
    best = float("inf")
    for root in range(g.V):
        if adj[root]:
            best = _shortest_cycle_through(adj, root, best)
    if best == float("inf"):
        return GirthReport(None, 0, time.perf_counter() - start)
    best = int(best)
    total = sum(_cycles_through(adj, root, best // 2) for root in range(g.V))
    # each cycle passes through best/2 variable nodes
    return GirthReport(best, total // (best // 2), time.perf_counter() - start)


def girth_of_matrix(H) -> GirthReport:
    return girth(from_parity_check(H))


class _WalkTables:
    """Index tables for closed-walk counting over a protograph's edge copies."""

    def __init__(self, proto: ProtoMatrix):
        edges = proto.edge_copies()
        self.proto = proto
        self.E = len(edges)
        self.row = np.array([r for r, _, _ in edges], dtype=np.int64)
        self.col = np.array([c for _, c, _ in edges], dtype=np.int64)
        self.row_onehot = np.zeros((self.E, proto.rows), dtype=np.int64)
        self.row_onehot[np.arange(self.E), self.row] = 1
        self.col_onehot = np.zeros((self.E, proto.cols), dtype=np.int64)
        self.col_onehot[np.arange(self.E), self.col] = 1
        self.row_onehot_T = self.row_onehot.T.astype(np.float64)
        self.col_onehot_T = self.col_onehot.T.astype(np.float64)


_TABLE_CACHE: dict[ProtoMatrix, _WalkTables] = {}


def _tables(proto: ProtoMatrix) -> _WalkTables:
    t = _TABLE_CACHE.get(proto)
    if t is None:
        if len(_TABLE_CACHE) > 64:
            _TABLE_CACHE.clear()
        t = _TABLE_CACHE[proto] = _WalkTables(proto)
    return t


def shift_girth(proto: ProtoMatrix, v: int, shifts, max_len: int = 12) -> GirthReport:
    """Girth of the circulant lifting of ``proto`` from its flat shift vector."""
    start = time.perf_counter()
    if max_len < 4 or max_len % 2:
        raise ValueError("max_len must be an even integer >= 4")
    t = _tables(proto)
    shifts = np.asarray(shifts, dtype=np.int64) % v
    j = np.arange(v)
    # var -> check moves the copy index by -s, check -> var by +s
    to_check = (j[None, :] + shifts[:, None]) % v
    to_var = (j[None, :] - shifts[:, None]) % v

    B, E = proto.cols, t.E
    # flat gather indices: entry (e, j) reads slot (e, idx[e, j]) of the previous state
    base = (np.arange(E) * v)[:, None]
    gather_check = (base + to_check).ravel()
    gather_var = (base + to_var).ravel()
    vc = np.zeros((B, E, v))
    vc[t.col, np.arange(E), (-shifts) % v] = 1.0
    for length in range(2, max_len + 1, 2):
        at_check = t.row_onehot_T @ vc
        pre = at_check[:, t.row, :] - vc
        cv = pre.reshape(B, E * v)[:, gather_var].reshape(B, E, v)
        if length >= 4:
            walks = int(round(cv[t.col, np.arange(E), 0].sum()))
            if walks:
                mult, rem = divmod(walks * v, length)
                assert rem == 0, "closed-walk count must be a multiple of the length"
                return GirthReport(length, mult, time.perf_counter() - start)
        if length == max_len:
            break
        at_var = t.col_onehot_T @ cv
        pre = at_var[:, t.col, :] - cv
        vc = pre.reshape(B, E * v)[:, gather_check].reshape(B, E, v)
    return GirthReport(max_len + 2, 0, time.perf_counter() - start, capped=True)


def qc_girth(code: QCParityCheck, max_len: int = 12) -> GirthReport:
    """Girth of a circulant code from its shift structure, searched up to ``max_len``."""
    if not code.structure.is_circulant:
        raise UnsupportedStructureError("explicit permutations are not circulant")
    if code.truncated:
        raise UnsupportedStructureError("partially truncated block columns break circulance")
    return shift_girth(code.proto, code.v, code.structure.flat(code.proto), max_len)
