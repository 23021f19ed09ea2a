"""Weighted fusion of homophily and structural similarity.

For a candidate pair the score is

    (sum_k w_k * h_k + w_s * s) / (sum_k w_k + w_s)

where ``s`` is the structural similarity, ``w_s`` the structural weight,
and for each attribute ``k`` the term ``h_k`` is 1 when both values are
equal and the chosen categorical similarity otherwise.  With a single
attribute this is the two-branch fusion rule; with every weight equal to
1 it is the plain mean of the terms.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .attributes import MISSING, AttributeTable
from .errors import DegenerateScorerError, InputError
from .homophily import HomophilyMetricKind, _score as _homophily_term
from .structural import StructuralMetricKind, _score as _structural_term
from .weights import StructuralEstimator, WeightSet, compute_weights

COMPUTED = "computed"
UNIFORM = "uniform"

SKIP_TERM = "skip"
ZERO = "zero"


@dataclass(frozen=True)
class ScorerConfig:
    """What to score and how to weight it.

    ``structural_kind=None`` drops the structural term; an empty
    ``attributes`` tuple drops the homophily terms.  ``weights`` is a
    :class:`WeightSet`, ``"uniform"``, or ``"computed"`` (resolved from the
    graph by :func:`resolve_weights` before scoring).
    """

    structural_kind: Union[StructuralMetricKind, None] = StructuralMetricKind.NETWORK_SIMILARITY
    homophily_kind: HomophilyMetricKind = HomophilyMetricKind.OF
    attributes: tuple = ()
    weights: Union[WeightSet, str] = COMPUTED
    missing_policy: str = SKIP_TERM
    estimator: StructuralEstimator = StructuralEstimator.AVG_LOCAL_CC

    def __post_init__(self):
        if self.structural_kind is not None:
            object.__setattr__(self, "structural_kind", StructuralMetricKind.parse(self.structural_kind))
        object.__setattr__(self, "homophily_kind", HomophilyMetricKind.parse(self.homophily_kind))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "estimator", StructuralEstimator.parse(self.estimator))
        if self.missing_policy not in (SKIP_TERM, ZERO):
            raise InputError(f"unknown missing policy {self.missing_policy!r}")
        if isinstance(self.weights, str):
            if self.weights not in (COMPUTED, UNIFORM):
                raise InputError(f"unknown weight source {self.weights!r}")
        elif not isinstance(self.weights, WeightSet):
            raise InputError("weights must be a WeightSet, 'computed' or 'uniform'")
        if self.structural_kind is None and not self.attributes:
            raise InputError("scorer has neither a structural nor a homophily term")

    @property
    def weight_source(self) -> str:
        return self.weights if isinstance(self.weights, str) else "supplied"

    def describe(self) -> dict:
        return {
            "structural": self.structural_kind.value if self.structural_kind else None,
            "homophily": self.homophily_kind.value if self.attributes else None,
            "attributes": list(self.attributes),
            "weights": self.weight_source,
            "missing_policy": self.missing_policy,
            "estimator": self.estimator.value,
        }


def resolve_weights(g, tab: AttributeTable | None, cfg: ScorerConfig, **motif_kwargs) -> ScorerConfig:
    """Return ``cfg`` with computed weights filled in from ``g`` and ``tab``."""
    if cfg.weights != COMPUTED:
        return cfg
    ws = compute_weights(g, tab, cfg.attributes, cfg.estimator, **motif_kwargs)
    return replace(cfg, weights=ws)


class PairScorer:
    """Scores many pairs on one graph with the per-pair work kept minimal.

    Categorical similarities are tabulated per attribute up front, and
    structural similarity reuses the graph's cached neighbor sets.
    """

    def __init__(self, g, tab: AttributeTable | None, cfg: ScorerConfig):
        if cfg.weights == COMPUTED:
            raise InputError("weights not resolved; call resolve_weights first")
        self.cfg = cfg
        self._sets = g.neighbor_sets()
        self._indptr = g.indptr
        self._m = g.edge_count
        self._kind = cfg.structural_kind
        uniform = cfg.weights == UNIFORM
        self._w_s = 1.0 if uniform else float(cfg.weights.structural)

        self._attr_terms = []
        if cfg.attributes:
            if tab is None:
                raise InputError("attribute terms requested without an attribute table")
            if tab.node_count != g.node_count:
                raise InputError("graph and attribute table disagree on node count")
        for a in cfg.attributes:
            if uniform:
                w = 1.0
            else:
                try:
                    w = float(cfg.weights.homophily[a])
                except KeyError:
                    raise InputError(f"no weight supplied for attribute {a!r}") from None
            codes = tab.codes(a).tolist()
            freq = tab.frequencies(a)
            c = len(freq)
            table = [[1.0 if i == j else _homophily_term(cfg.homophily_kind, freq, i, j)
                      for j in range(c)] for i in range(c)]
            self._attr_terms.append((w, codes, table))

    def terms(self, x: int, y: int) -> list[tuple[float, float | None]]:
        """``(weight, term score)`` pairs; a missing attribute value gives None."""
        out = []
        for w, codes, table in self._attr_terms:
            a, b = codes[x], codes[y]
            out.append((w, None if a == MISSING or b == MISSING else table[a][b]))
        if self._kind is not None:
            out.append((self._w_s, self.structural(x, y)))
        return out

    def structural(self, x: int, y: int) -> float:
        return _structural_term(self._kind, self._sets, self._indptr, self._m, x, y)

    def __call__(self, x: int, y: int) -> float:
        if x == y:
            raise InputError("cannot score a node against itself")
        num = 0.0
        den = 0.0
        skip = self.cfg.missing_policy == SKIP_TERM
        for w, val in self.terms(x, y):
            if val is None:
                if skip:
                    continue
                val = 0.0
            num += w * val
            den += w
        if not den > 0.0:
            raise DegenerateScorerError(f"degenerate scorer: weight total {den!r} for pair ({x}, {y})")
        return num / den


def score_pair(g, tab: AttributeTable | None, cfg: ScorerConfig, x: int, y: int) -> float:
    """Fused similarity of ``x`` and ``y`` under ``cfg``.

    ``cfg.weights`` must already be a :class:`WeightSet` or ``"uniform"``.
    Raises :class:`DegenerateScorerError` when the weight total of the
    included terms is not positive.
    """
    g._check(x)
    g._check(y)
    return PairScorer(g, tab, cfg)(x, y)


def score_pair_uniform(g, tab: AttributeTable | None, cfg: ScorerConfig, x: int, y: int) -> float:
    """Plain mean of the included terms (every weight set to 1)."""
    return score_pair(g, tab, replace(cfg, weights=UNIFORM), x, y)


def score_pairs(g, tab, cfg: ScorerConfig, pairs) -> np.ndarray:
    scorer = PairScorer(g, tab, cfg)
    return np.array([scorer(int(x), int(y)) for x, y in pairs], dtype=np.float64)
