"""Importance weights for the homophily and structural terms of the scorer.

The homophily weight of an attribute compares the number of same-value
edges with the number expected in a random graph with the same degree
sequence, normalised by the largest value that comparison can take.  The
structural weight measures how much of the graph's wiring is explained by
triadic closure (average local clustering by default).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .attributes import MISSING, AttributeTable
from .errors import DegenerateNullModelError, InputError, UnweightableAttributeError
from .graph import Graph, local_clustering_all, triangle_count

logger = logging.getLogger(__name__)


class StructuralEstimator(str, Enum):
    AVG_LOCAL_CC = "avg-local-cc"
    GLOBAL_CC = "global-cc"
    MOTIF_Z = "motif-z"

    @classmethod
    def parse(cls, value) -> "StructuralEstimator":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            try:
                return cls[str(value).upper()]
            except KeyError:
                raise InputError(f"unknown structural estimator {value!r}") from None


@dataclass(frozen=True)
class WeightSet:
    """Normalised homophily weight per attribute plus one structural weight."""

    homophily: dict = field(default_factory=dict)
    structural: float = 0.0
    estimator: StructuralEstimator = StructuralEstimator.AVG_LOCAL_CC
    seed: int | None = None

    def scaled(self, alpha: float) -> "WeightSet":
        return replace(self, homophily={k: alpha * w for k, w in self.homophily.items()},
                       structural=alpha * self.structural)

    def to_dict(self) -> dict:
        out = {k: float(w) for k, w in self.homophily.items()}
        out["structural"] = float(self.structural)
        out["estimator"] = self.estimator.value
        out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "WeightSet":
        data = dict(data)
        try:
            structural = float(data.pop("structural"))
        except KeyError:
            raise InputError("weights file lacks a 'structural' entry") from None
        estimator = StructuralEstimator.parse(data.pop("estimator", "avg-local-cc"))
        seed = data.pop("seed", None)
        try:
            homophily = {str(k): float(v) for k, v in data.items()}
        except (TypeError, ValueError):
            raise InputError("weights file entries must be numeric") from None
        return cls(homophily, structural, estimator, seed)


def homophily_weight(g: Graph, tab: AttributeTable, attr: str) -> float:
    """Normalised homophily weight ``W / W_max`` of one attribute.

    ``W`` sums ``A_ij - k_i k_j / 2m`` over all ordered pairs of nodes
    with equal values (the ``i == j`` terms included, as in the modularity
    convention).  ``W_max`` is the value ``W`` would take if every edge
    joined equal values: ``2m`` minus the same ``k_i k_j / 2m`` sum.

    Nodes with a missing value are dropped first, so ``k`` and ``m`` are
    taken from the subgraph induced on the labelled nodes; with nothing
    missing this is the plain graph.  Positive means assortative, negative
    disassortative, and the value never exceeds 1.  Computed exactly in
    integer arithmetic from per-value degree totals, O(n + m).
    """
    if tab.node_count != g.node_count:
        raise InputError("graph and attribute table disagree on node count")
    col = tab.codes(attr)
    if not (col != MISSING).any():
        raise UnweightableAttributeError(f"unweightable attribute {attr!r}: all values missing")
    cu, cv = col[g.edges[:, 0]], col[g.edges[:, 1]]
    both = (cu != MISSING) & (cv != MISSING)
    two_m = 2 * int(np.count_nonzero(both))
    if two_m == 0:
        raise UnweightableAttributeError(
            f"unweightable attribute {attr!r}: no edge joins two labelled nodes")

    # per-value degree totals on the labelled subgraph
    n_cats = len(tab.categories[attr])
    totals = np.bincount(np.concatenate([cu[both], cv[both]]), minlength=n_cats)
    sum_sq = sum(int(t) * int(t) for t in totals.tolist())
    same = int(np.count_nonzero(both & (cu == cv)))

    num = two_m * 2 * same - sum_sq
    den = two_m * two_m - sum_sq
    if den == 0:
        logger.warning("attribute %r does not discriminate (W_max = 0); weight set to 0", attr)
        return 0.0
    return num / den


def structural_weight_avg_cc(g: Graph, exclude_low_degree: bool = False) -> float:
    """Mean local clustering coefficient.

    Nodes of degree < 2 contribute 0 and are counted in the mean unless
    ``exclude_low_degree`` is set.
    """
    cc = local_clustering_all(g)
    if exclude_low_degree:
        cc = cc[g.degrees >= 2]
    if cc.size == 0:
        return 0.0
    # correctly rounded sum, so the result does not depend on summation order
    return math.fsum(cc.tolist()) / cc.size


def global_clustering(g: Graph) -> float:
    """Three times the triangle count over the number of connected triples."""
    k = g.degrees.astype(np.int64)
    triples = int((k * (k - 1) // 2).sum())
    if triples == 0:
        logger.warning("graph has no connected triples; global clustering set to 0")
        return 0.0
    return 3.0 * triangle_count(g) / triples


def double_edge_swap(g: Graph, n_attempts: int, rng: np.random.Generator) -> Graph:
    """Degree-preserving randomisation by ``n_attempts`` attempted swaps.

    Each attempt picks two edges ``(a, b), (c, d)`` and rewires them to
    ``(a, d), (c, b)``; attempts that would create a self-loop or a
    duplicate edge are rejected.
    """
    n = g.node_count
    m = g.edge_count
    if m < 2:
        return g
    us = g.edges[:, 0].tolist()
    vs = g.edges[:, 1].tolist()
    keys = set(min(a, b) * n + max(a, b) for a, b in zip(us, vs))
    picks = rng.integers(0, m, size=(n_attempts, 2)).tolist()
    flips = rng.random(n_attempts).tolist()
    for (i, j), flip in zip(picks, flips):
        if i == j:
            continue
        a, b = us[i], vs[i]
        c, d = (vs[j], us[j]) if flip < 0.5 else (us[j], vs[j])
        if a == d or c == b:
            continue
        k1 = min(a, d) * n + max(a, d)
        k2 = min(c, b) * n + max(c, b)
        if k1 == k2 or k1 in keys or k2 in keys:
            continue
        keys.discard(min(a, b) * n + max(a, b))
        keys.discard(min(c, d) * n + max(c, d))
        keys.add(k1)
        keys.add(k2)
        us[i], vs[i] = a, d
        us[j], vs[j] = c, b
    edges = np.sort(np.array([us, vs], dtype=np.int64).T, axis=1)
    return Graph(n, edges, labels=g.labels)


def motif_z(g: Graph, M: int = 3, e: int = 3, replicas: int = 20,
            swaps_per_edge: int = 10, seed: int = 0, workers: int = 1) -> float:
    """Z-score of the closed-triad count against degree-preserving null graphs.

    Replica ``r`` is randomised with a generator seeded ``seed + r``, so the
    result does not depend on ``workers``.  The null spread is the sample
    standard deviation over replicas.

    Raises
    ------
    DegenerateNullModelError
        If every replica has the same triangle count.
    """
    if (M, e) != (3, 3):
        raise InputError("only the closed triad (M=3, e=3) is supported")
    if replicas < 2:
        raise InputError("replicas must be >= 2")
    observed = triangle_count(g)
    attempts = swaps_per_edge * g.edge_count

    def one(r):
        rng = np.random.default_rng(seed + r)
        return triangle_count(double_edge_swap(g, attempts, rng))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(one, range(replicas)))
    else:
        counts = [one(r) for r in range(replicas)]
    counts = np.array(counts, dtype=np.float64)
    sd = counts.std(ddof=1)
    if sd == 0.0:
        raise DegenerateNullModelError("degenerate null model: randomised triangle counts have zero spread")
    return float((observed - counts.mean()) / sd)


def structural_weight(g: Graph, estimator=StructuralEstimator.AVG_LOCAL_CC, **motif_kwargs) -> float:
    estimator = StructuralEstimator.parse(estimator)
    if estimator is StructuralEstimator.AVG_LOCAL_CC:
        return structural_weight_avg_cc(g)
    if estimator is StructuralEstimator.GLOBAL_CC:
        return global_clustering(g)
    return motif_z(g, **motif_kwargs)


def compute_weights(g: Graph, tab: AttributeTable | None, attributes=(),
                    estimator=StructuralEstimator.AVG_LOCAL_CC, **motif_kwargs) -> WeightSet:
    """Weights for every listed attribute plus the structural term."""
    estimator = StructuralEstimator.parse(estimator)
    homophily = {a: homophily_weight(g, tab, a) for a in attributes}
    seed = motif_kwargs.get("seed", 0) if estimator is StructuralEstimator.MOTIF_Z else None
    return WeightSet(homophily, structural_weight(g, estimator, **motif_kwargs), estimator, seed)

