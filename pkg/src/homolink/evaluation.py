"""Edge-holdout AUC evaluation.

Each trial removes a fraction of the edges as probe edges, recomputes the
weights on the remaining graph, then runs ``n`` independent rounds that
draw one probe edge and one never-existing pair and compare their scores:

    AUC = (n_greater + 0.5 * n_ties) / n

The reported figure is the mean over repeated trials.
"""
from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .aggregate import PairScorer, ScorerConfig, resolve_weights
from .errors import InputError
from .graph import Graph

logger = logging.getLogger(__name__)

RANDOM = "random"
LATEST = "latest"

THREADS_ENV = "HOMOLINK_THREADS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _count(fraction: float, total: int) -> int:
    # round first so 0.1 * 30 gives 3, not 4
    return math.ceil(round(fraction * total, 9))


@dataclass
class HoldoutSplit:
    original: Graph
    train_graph: Graph
    probe_edges: np.ndarray
    mode: str

    @property
    def probe_count(self) -> int:
        return len(self.probe_edges)


def holdout(g: Graph, fraction: float = 0.10, mode: Optional[str] = None, seed=0) -> HoldoutSplit:
    """Split ``g`` into a training graph and probe edges.

    ``mode="random"`` removes a uniform sample of ``ceil(fraction * m)``
    edges; ``mode="latest"`` removes the most recent ones by timestamp,
    later input rows counting as more recent on equal stamps.  ``None``
    picks ``latest`` when the graph carries timestamps.  The training graph
    keeps every node.
    """
    if not (0.0 < fraction < 1.0):
        raise InputError("fraction must be in (0, 1)")
    if mode is None:
        mode = LATEST if g.timestamps is not None else RANDOM
    m = g.edge_count
    k = _count(fraction, m)
    if fraction * m < 1:
        raise InputError(f"fraction {fraction} of {m} edges is below one edge; raise --fraction")
    if k >= m:
        raise InputError("holdout would remove every edge")
    if mode == RANDOM:
        rng = np.random.default_rng(seed)
        probe_idx = np.sort(rng.choice(m, size=k, replace=False))
    elif mode == LATEST:
        if g.timestamps is None:
            raise InputError("latest-edge holdout requires timestamps on every edge")
        order = np.argsort(g.timestamps, kind="stable")
        probe_idx = np.sort(order[m - k:])
    else:
        raise InputError(f"unknown holdout mode {mode!r}")
    keep = np.ones(m, dtype=bool)
    keep[probe_idx] = False
    ts = g.timestamps[keep] if g.timestamps is not None else None
    train = Graph(g.node_count, g.edges[keep], labels=g.labels, timestamps=ts)
    return HoldoutSplit(g, train, g.edges[probe_idx].copy(), mode)


class NonEdgeSampler:
    """Uniform sampler of node pairs absent from the original graph.

    Rejection sampling over ``u != v`` pairs; probe edges are excluded too
    since they are edges of the original graph.
    """

    def __init__(self, original: Graph, probe_edges: np.ndarray | None = None):
        self.n = original.node_count
        self.forbidden = original.edge_keys()
        if probe_edges is not None and len(probe_edges):
            pk = np.minimum(probe_edges[:, 0], probe_edges[:, 1]) * self.n + \
                np.maximum(probe_edges[:, 0], probe_edges[:, 1])
            extra = set(pk.tolist()) - self.forbidden
            if extra:
                self.forbidden = self.forbidden | extra
        universe = self.n * (self.n - 1) // 2 - len(self.forbidden)
        if universe <= 0:
            raise InputError("graph is complete: no non-edges to sample")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty((size, 2), dtype=np.int64)
        filled = 0
        n, forbidden = self.n, self.forbidden
        while filled < size:
            batch = max(16, int((size - filled) * 1.2))
            cand = rng.integers(0, n, size=(batch, 2))
            for u, v in cand.tolist():
                if u == v:
                    continue
                a, b = (u, v) if u < v else (v, u)
                if a * n + b in forbidden:
                    continue
                out[filled] = (a, b)
                filled += 1
                if filled == size:
                    break
        return out


@dataclass
class TrialResult:
    auc: float
    n: int
    n_greater: int
    n_ties: int
    weights: Optional[dict] = None


def auc_trial(split: HoldoutSplit, tab, cfg: ScorerConfig, n: int, seed=0,
              scorer: Optional[Callable[[int, int], float]] = None) -> TrialResult:
    """One trial of ``n`` probe-vs-non-edge comparisons on ``split``.

    Weights marked ``"computed"`` are recomputed on the training graph.
    A custom ``scorer(x, y)`` may replace the fused scorer.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    if split.probe_count == 0:
        raise InputError("no probe edges")
    weights = None
    if scorer is None:
        cfg = resolve_weights(split.train_graph, tab, cfg)
        if not isinstance(cfg.weights, str):
            weights = cfg.weights.to_dict()
        scorer = PairScorer(split.train_graph, tab, cfg)
    sampler = NonEdgeSampler(split.original, split.probe_edges)
    rng = np.random.default_rng(seed)
    probes = split.probe_edges[rng.integers(0, split.probe_count, size=n)].tolist()
    non_edges = sampler.draw(rng, n).tolist()

    cache: dict[tuple[int, int], float] = {}

    def score(pair):
        key = (pair[0], pair[1])
        s = cache.get(key)
        if s is None:
            s = cache[key] = scorer(pair[0], pair[1])
        return s

    greater = ties = 0
    for p, q in zip(probes, non_edges):
        sp, sq = score(p), score(q)
        if sp > sq:
            greater += 1
        elif sp == sq:
            ties += 1
    return TrialResult((greater + 0.5 * ties) / n, n, greater, ties, weights)


@dataclass
class TrialRecord:
    seed: int
    n: int
    n_greater: int
    n_ties: int
    auc: float
    probe_edges: int
    weights: Optional[dict] = None


@dataclass
class EvaluationReport:
    trials: list = field(default_factory=list)
    mean_auc: float = float("nan")
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"mean_auc": self.mean_auc, "trials": [asdict(t) for t in self.trials],
                "config": self.config}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def trial_seeds(master_seed: int, repetitions: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(master_seed).generate_state(repetitions)]


def evaluate(g: Graph, tab, cfg: ScorerConfig, repetitions: int = 10, fraction: float = 0.10,
             n_rounds: Optional[int] = None, master_seed: int = 0, mode: Optional[str] = None,
             workers: Optional[int] = None) -> EvaluationReport:
    """Repeated holdout + AUC trials; returns per-trial and mean AUC.

    ``n_rounds`` defaults to half the number of removed edges,
    ``ceil(fraction / 2 * m)``.  Trial ``i`` uses an integer seed derived
    from ``master_seed``; its holdout and its sampling draw from two
    separate streams of that seed, so results do not depend on ``workers``.
    """
    if repetitions < 1:
        raise InputError("repetitions must be >= 1")
    if n_rounds is None:
        n_rounds = max(1, _count(fraction / 2.0, g.edge_count))
    if mode is None:
        mode = LATEST if g.timestamps is not None else RANDOM
    workers = default_workers() if workers is None else max(1, workers)
    seeds = trial_seeds(master_seed, repetitions)

    def run(seed):
        split = holdout(g, fraction, mode, seed=(seed, 0))
        res = auc_trial(split, tab, cfg, n_rounds, seed=(seed, 1))
        logger.debug("trial seed=%d auc=%.4f", seed, res.auc)
        return TrialRecord(seed, res.n, res.n_greater, res.n_ties, res.auc,
                           split.probe_count, res.weights)

    if workers > 1 and repetitions > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(run, seeds))
    else:
        trials = [run(s) for s in seeds]
    mean = float(sum(t.auc for t in trials) / len(trials))
    config = dict(cfg.describe())
    if not isinstance(cfg.weights, str):
        config["supplied_weights"] = cfg.weights.to_dict()
    config.update(repetitions=repetitions, fraction=fraction, n_rounds=n_rounds,
                  master_seed=master_seed, mode=mode, nodes=g.node_count, edges=g.edge_count)
    return EvaluationReport(trials, mean, config)
