"""Neighborhood-based structural similarity between node pairs."""
from __future__ import annotations

import math
from enum import Enum

from .errors import InputError


class StructuralMetricKind(str, Enum):
    JACCARD = "jaccard"
    COSINE = "cosine"
    L1_NORM = "l1"
    ADAMIC_ADAR = "adamic-adar"
    PMI = "pmi"
    NETWORK_SIMILARITY = "ns"

    @classmethod
    def parse(cls, value) -> "StructuralMetricKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            try:
                return cls[str(value).upper()]
            except KeyError:
                raise InputError(f"unknown structural metric {value!r}") from None


def structural_score(g, kind, u: int, v: int) -> float:
    """Similarity of ``u`` and ``v`` from their neighborhoods.

    With ``I`` common neighbors, ``U`` the size of the neighbor union and
    ``k`` degrees:

    * jaccard: ``I / U``
    * cosine: ``I / sqrt(k_u k_v)``
    * l1: ``2 I / (k_u + k_v)``, i.e. one minus the normalised L1 distance
      between the two adjacency rows
    * adamic-adar: sum of ``1 / ln k_z`` over common neighbors ``z``
    * pmi: ``ln(2 m I / (k_u k_v))``, 0 when ``I = 0``
    * ns: Jaccard over closed neighborhoods (each node counts itself)

    Every ratio is 0 when its denominator is 0.
    """
    kind = StructuralMetricKind.parse(kind)
    if u == v:
        raise InputError("structural_score requires two distinct nodes")
    g._check(u)
    g._check(v)
    sets = g.neighbor_sets()
    return _score(kind, sets, g.indptr, g.edge_count, u, v)


def _score(kind, sets, indptr, m, u, v) -> float:
    su, sv = sets[u], sets[v]
    ku, kv = len(su), len(sv)
    if kind is StructuralMetricKind.ADAMIC_ADAR:
        common = su & sv
        return math.fsum(1.0 / math.log(indptr[z + 1] - indptr[z]) for z in common)
    inter = len(su & sv) if ku <= kv else len(sv & su)
    if kind is StructuralMetricKind.JACCARD:
        union = ku + kv - inter
        return inter / union if union else 0.0
    if kind is StructuralMetricKind.COSINE:
        return inter / math.sqrt(ku * kv) if ku and kv else 0.0
    if kind is StructuralMetricKind.L1_NORM:
        return 2.0 * inter / (ku + kv) if ku + kv else 0.0
    if kind is StructuralMetricKind.PMI:
        return math.log(2.0 * m * inter / (ku * kv)) if inter else 0.0
    # closed neighborhoods; u in N(v) iff adjacent
    adjacent = v in su
    if adjacent:
        union = ku + kv - inter
        return (inter + 2) / union
    return inter / (ku + kv - inter + 2)
