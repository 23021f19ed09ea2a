"""Immutable undirected simple graph in compressed sparse row form.

Nodes are dense integer ids ``0..n-1``.  External labels are remapped at
ingestion (sorted order, numeric-aware) and kept on the graph so reports can
print them back.  Neighbor lists are sorted ascending.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BuildStats:
    """Counts of input rows dropped while building a graph."""

    input_edges: int
    self_loops: int
    duplicates: int
    reciprocal: int = 0


def _label_key(label):
    # numeric-aware: "10" sorts after "9"; the string breaks ties like "2" / "02"
    if isinstance(label, (int, np.integer)):
        return (0, int(label), str(int(label)))
    s = str(label)
    try:
        return (0, int(s), s)
    except ValueError:
        return (1, 0, s)


class Graph:
    """Undirected simple graph with sorted adjacency arrays.

    Use :func:`build_graph` to ingest labelled edges, or
    :meth:`Graph.from_edge_array` when ids are already dense and canonical.

    Attributes
    ----------
    indptr, indices : numpy.ndarray
        CSR adjacency; ``indices[indptr[i]:indptr[i+1]]`` is the sorted
        neighbor list of node ``i``.
    edges : numpy.ndarray
        ``(m, 2)`` array of edges with ``u < v``, in ingestion order.
    timestamps : numpy.ndarray or None
        Per-edge integer timestamps aligned with ``edges``.
    labels : list
        External label of every node id.
    """

    def __init__(self, n, edges, labels=None, timestamps=None, build_stats=None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self._n = int(n)
        self.edges = edges
        self.edges.setflags(write=False)
        if timestamps is not None:
            timestamps = np.asarray(timestamps, dtype=np.int64)
            if timestamps.shape != (len(edges),):
                raise InputError("timestamps must have one entry per edge")
            timestamps.setflags(write=False)
        self.timestamps = timestamps
        self.labels = list(range(self._n)) if labels is None else list(labels)
        if len(self.labels) != self._n:
            raise InputError("labels must have one entry per node")
        self.build_stats = build_stats

        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        counts = np.bincount(src, minlength=self._n)
        self.indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.indices.setflags(write=False)
        self.indptr.setflags(write=False)

        self._nbr_sets = None
        self._edge_keys = None
        self._label_index = None

    @classmethod
    def from_edge_array(cls, n, edges, labels=None, timestamps=None):
        """Build from dense ids, canonicalising and validating the edges."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges) and (edges.min() < 0 or edges.max() >= n):
            raise InputError("edge endpoint outside [0, n)")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise InputError("self-loops are not allowed")
        canon = np.sort(edges, axis=1)
        keys = canon[:, 0] * n + canon[:, 1]
        if len(np.unique(keys)) != len(keys):
            raise InputError("duplicate edges are not allowed")
        return cls(n, canon, labels=labels, timestamps=timestamps)

    # -- basic queries -------------------------------------------------

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    n = node_count
    m = edge_count

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, i: int) -> int:
        self._check(i)
        return int(self.indptr[i + 1] - self.indptr[i])

    def neighbors(self, i: int) -> np.ndarray:
        self._check(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        self._check(v)
        pos = np.searchsorted(nbrs, v)
        return bool(pos < len(nbrs) and nbrs[pos] == v)

    def neighbor_sets(self) -> list[frozenset]:
        """Per-node neighbor sets, built once and cached."""
        if self._nbr_sets is None:
            ind = self.indices.tolist()
            ptr = self.indptr.tolist()
            self._nbr_sets = [frozenset(ind[ptr[i]:ptr[i + 1]]) for i in range(self._n)]
        return self._nbr_sets

    def edge_keys(self) -> set[int]:
        """Set of ``u * n + v`` codes (``u < v``) for O(1) membership tests."""
        if self._edge_keys is None:
            self._edge_keys = set((self.edges[:, 0] * self._n + self.edges[:, 1]).tolist())
        return self._edge_keys

    def node_id(self, label: Hashable) -> int:
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._label_index[label]
        except KeyError:
            pass
        # labels read from text files are strings; accept the str() form too
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise InputError(f"unknown node label {label!r}") from None

    def _check(self, i) -> None:
        if not (0 <= i < self._n):
            raise IndexError(f"node id {i} out of range [0, {self._n})")

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.edge_count})"


def build_graph(
    edges: Iterable[Sequence],
    directed_input: bool = False,
    timestamps: Sequence[int] | None = None,
) -> Graph:
    """Build a :class:`Graph` from labelled edge pairs.

    Self-loops and duplicate edges are dropped and counted in
    ``graph.build_stats``.  Directed input is symmetrised; a reciprocal pair
    ``(a, b), (b, a)`` then collapses into one edge and is counted as
    ``reciprocal`` rather than duplicate.  When duplicates carry timestamps
    the earliest one is kept.

    Raises
    ------
    InputError
        If the edge list is empty.
    """
    pairs = [tuple(e) for e in edges]
    if not pairs:
        raise InputError("empty graph")
    if timestamps is not None and len(timestamps) != len(pairs):
        raise InputError("timestamps must align with edges")

    label_set = {a for a, _ in pairs} | {b for _, b in pairs}
    labels = sorted(label_set, key=_label_key)
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)

    seen: dict[int, int] = {}
    directed_seen: set[tuple[int, int]] = set()
    kept_edges: list[tuple[int, int]] = []
    kept_ts: list[int] = []
    self_loops = duplicates = reciprocal = 0
    for row, (a, b) in enumerate(pairs):
        u, v = index[a], index[b]
        if u == v:
            self_loops += 1
            continue
        key = min(u, v) * n + max(u, v)
        pos = seen.get(key)
        if pos is None:
            seen[key] = len(kept_edges)
            kept_edges.append((min(u, v), max(u, v)))
            if timestamps is not None:
                kept_ts.append(int(timestamps[row]))
            directed_seen.add((u, v))
            continue
        if directed_input and (u, v) not in directed_seen:
            reciprocal += 1
            directed_seen.add((u, v))
        else:
            duplicates += 1
        if timestamps is not None:
            kept_ts[pos] = min(kept_ts[pos], int(timestamps[row]))

    stats = BuildStats(len(pairs), self_loops, duplicates, reciprocal)
    if self_loops or duplicates:
        logger.info("dropped %d self-loops and %d duplicate edges", self_loops, duplicates)
    return Graph(
        n,
        np.array(kept_edges, dtype=np.int64).reshape(-1, 2),
        labels=labels,
        timestamps=np.array(kept_ts, dtype=np.int64) if timestamps is not None else None,
        build_stats=stats,
    )


def common_neighbors(g: Graph, u: int, v: int) -> list[int]:
    """Sorted ids adjacent to both ``u`` and ``v``."""
    if u == v:
        raise InputError("common_neighbors requires two distinct nodes")
    a, b = g.neighbors(u), g.neighbors(v)
    return np.intersect1d(a, b, assume_unique=True).tolist()


def triangles_per_node(g: Graph) -> np.ndarray:
    """Number of edges among the neighbors of every node (``e_i``).

    Uses degree-ordered orientation so each triangle is found exactly once.
    """
    n = g.node_count
    deg = g.degrees
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), deg))] = np.arange(n)
    u, v = g.edges[:, 0], g.edges[:, 1]
    flip = rank[u] > rank[v]
    lo = np.where(flip, v, u)
    hi = np.where(flip, u, v)
    order = np.argsort(lo, kind="stable")
    lo_s, hi_s = lo[order].tolist(), hi[order].tolist()

    out: list[set] = [set() for _ in range(n)]
    for a, b in zip(lo_s, hi_s):
        out[a].add(b)

    counts = np.zeros(n, dtype=np.int64)
    apex: list[int] = []
    for a, b in zip(lo_s, hi_s):
        common = out[a] & out[b]
        if common:
            k = len(common)
            counts[a] += k
            counts[b] += k
            apex.extend(common)
    if apex:
        counts += np.bincount(np.array(apex, dtype=np.int64), minlength=n)
    return counts


def triangle_count(g: Graph) -> int:
    return int(triangles_per_node(g).sum() // 3)


def local_clustering(g: Graph, i: int) -> float:
    """Local clustering coefficient of node ``i``; 0.0 when its degree < 2."""
    nbrs = g.neighbors(i)
    k = len(nbrs)
    if k < 2:
        return 0.0
    sets = g.neighbor_sets()
    links = sum(len(sets[w] & sets[i]) for w in nbrs.tolist()) // 2
    return 2.0 * links / (k * (k - 1))


def local_clustering_all(g: Graph) -> np.ndarray:
    """Vector of local clustering coefficients for every node."""
    k = g.degrees.astype(np.float64)
    tri = triangles_per_node(g).astype(np.float64)
    out = np.zeros(g.node_count)
    ok = k >= 2
    out[ok] = 2.0 * tri[ok] / (k[ok] * (k[ok] - 1.0))
    return out


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> Graph:
    """Subgraph induced on ``nodes``; new ids follow ascending parent id."""
    keep = np.unique(np.fromiter(nodes, dtype=np.int64))
    if len(keep) and (keep[0] < 0 or keep[-1] >= g.node_count):
        raise IndexError("node id out of range")
    remap = np.full(g.node_count, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    eu, ev = remap[g.edges[:, 0]], remap[g.edges[:, 1]]
    mask = (eu >= 0) & (ev >= 0)
    ts = g.timestamps[mask] if g.timestamps is not None else None
    return Graph(
        len(keep),
        np.stack([eu[mask], ev[mask]], axis=1),
        labels=[g.labels[i] for i in keep.tolist()],
        timestamps=ts,
    )


def bfs_sample(g: Graph, start: int, max_nodes: int) -> Graph:
    """Breadth-first sample of at most ``max_nodes`` nodes from ``start``.

    Nodes are collected in discovery order (FIFO queue, neighbors visited in
    ascending id) and the induced subgraph on the collected set is returned.
    """
    g._check(start)
    if max_nodes < 1:
        raise InputError("max_nodes must be >= 1")
    ind, ptr = g.indices, g.indptr
    seen = np.zeros(g.node_count, dtype=bool)
    seen[start] = True
    collected = [start]
    queue = deque([start])
    while queue and len(collected) < max_nodes:
        x = queue.popleft()
        for w in ind[ptr[x]:ptr[x + 1]].tolist():
            if not seen[w]:
                seen[w] = True
                collected.append(w)
                queue.append(w)
                if len(collected) >= max_nodes:
                    break
    return induced_subgraph(g, collected)
