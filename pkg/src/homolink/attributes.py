"""Categorical node attributes and neighbor majority-vote imputation."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, NoViablePolicyError

logger = logging.getLogger(__name__)

MISSING = -1
_MISSING_TOKENS = {None, "", "NA"}


def is_missing_token(value) -> bool:
    if value is None:
        return True
    if isinstance(value, float) and math.isnan(value):
        return True
    return isinstance(value, str) and value.strip() in _MISSING_TOKENS


class AttributeTable:
    """Per-node categorical values, one integer-coded column per attribute.

    Codes index into ``categories[name]``; :data:`MISSING` (``-1``) marks an
    unknown value.  Tables are never mutated in place: imputation returns a
    new table, and frequency statistics are computed at construction.
    """

    def __init__(self, node_count: int, codes: Mapping[str, np.ndarray],
                 categories: Mapping[str, Sequence]):
        self.node_count = int(node_count)
        self.names = list(codes)
        self._codes = {}
        self.categories = {}
        self._freq = {}
        for name in self.names:
            col = np.asarray(codes[name], dtype=np.int64).copy()
            cats = list(categories[name])
            if col.shape != (self.node_count,):
                raise InputError(f"attribute {name!r}: expected {self.node_count} values")
            if col.size and (col.min() < MISSING or col.max() >= len(cats)):
                raise InputError(f"attribute {name!r}: code out of range")
            col.setflags(write=False)
            self._codes[name] = col
            self.categories[name] = cats
            freq = np.bincount(col[col >= 0], minlength=len(cats))
            freq.setflags(write=False)
            self._freq[name] = freq

    @classmethod
    def from_columns(cls, columns: Mapping[str, Sequence], node_count: int | None = None):
        """Build from raw values; ``None``, ``""`` and ``"NA"`` mean missing."""
        if not columns:
            raise InputError("no attributes given")
        lengths = {len(v) for v in columns.values()}
        if len(lengths) != 1:
            raise InputError("attribute columns differ in length")
        n = lengths.pop() if node_count is None else node_count
        codes, cats = {}, {}
        for name, raw in columns.items():
            observed = sorted({v for v in raw if not is_missing_token(v)}, key=str)
            lookup = {v: i for i, v in enumerate(observed)}
            codes[name] = np.array(
                [MISSING if is_missing_token(v) else lookup[v] for v in raw], dtype=np.int64)
            cats[name] = observed
        return cls(n, codes, cats)

    def _col(self, attr: str) -> np.ndarray:
        try:
            return self._codes[attr]
        except KeyError:
            raise InputError(f"unknown attribute {attr!r}") from None

    def codes(self, attr: str) -> np.ndarray:
        return self._col(attr)

    def value(self, attr: str, i: int):
        """Raw value of node ``i`` or ``None`` when missing."""
        c = self._col(attr)[i]
        return None if c == MISSING else self.categories[attr][c]

    def values(self, attr: str) -> list:
        cats = self.categories[attr]
        return [None if c == MISSING else cats[c] for c in self._col(attr).tolist()]

    def frequencies(self, attr: str) -> np.ndarray:
        """Count of each category code over non-missing nodes."""
        self._col(attr)
        return self._freq[attr]

    def frequency(self, attr: str, i: int) -> int:
        c = self._col(attr)[i]
        return 0 if c == MISSING else int(self._freq[attr][c])

    def labeled_count(self, attr: str) -> int:
        return int(self.frequencies(attr).sum())

    def domain_size(self, attr: str) -> int:
        return int(np.count_nonzero(self.frequencies(attr)))

    def missing_count(self, attr: str) -> int:
        return int(np.count_nonzero(self._col(attr) == MISSING))

    def with_codes(self, attr: str, new_codes: np.ndarray) -> "AttributeTable":
        codes = dict(self._codes)
        self._col(attr)
        codes[attr] = new_codes
        return AttributeTable(self.node_count, codes, self.categories)

    def subset(self, names: Iterable[str]) -> "AttributeTable":
        names = list(names)
        return AttributeTable(self.node_count, {k: self._col(k) for k in names},
                              {k: self.categories[k] for k in names})


def delta(tab: AttributeTable, attr: str, i: int, j: int) -> int | None:
    """1 if both values are present and equal, 0 if different, None if either is missing."""
    col = tab.codes(attr)
    a, b = col[i], col[j]
    if a == MISSING or b == MISSING:
        return None
    return int(a == b)


@dataclass(frozen=True)
class ImputationPolicy:
    """Acceptance thresholds: ``f_min`` votes for the winner and vote share ``t_min``."""

    f_min: int = 1
    t_min: float = 0.5

    def __post_init__(self):
        if self.f_min < 1:
            raise InputError("f_min must be >= 1")
        if not (0.0 < self.t_min <= 1.0):
            raise InputError("t_min must be in (0, 1]")


@dataclass
class ImputationReport:
    attribute: str
    f_min: int
    t_min: float
    missing_before: int
    predicted: int
    remaining_missing: int
    precision: float | None = None
    correct: int | None = None
    passes: int = 1

    @property
    def pct_missing_after(self) -> float:
        if self.missing_before == 0:
            return 0.0
        return 100.0 * self.remaining_missing / self.missing_before

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "f": self.f_min,
            "t": self.t_min,
            "predicted": self.predicted,
            "precision": self.precision,
            "correct": self.correct,
            "missing_before": self.missing_before,
            "remaining_missing": self.remaining_missing,
            "pct_missing_after": round(self.pct_missing_after, 4),
            "passes": self.passes,
        }


def _vote_pass(indptr, indices, col, policy, n_cats):
    """One synchronous pass; returns the new column and the ids that were filled."""
    new = col.copy()
    filled = []
    for x in np.flatnonzero(col == MISSING).tolist():
        votes = col[indices[indptr[x]:indptr[x + 1]]]
        votes = votes[votes != MISSING]
        total = len(votes)
        if total == 0:
            continue
        tally = np.bincount(votes, minlength=n_cats)
        # ties go to the lowest category code
        winner = int(np.argmax(tally))
        top = int(tally[winner])
        if top >= policy.f_min and top / total >= policy.t_min:
            new[x] = winner
            filled.append(x)
    return new, filled


def impute(g, tab: AttributeTable, attr: str, policy: ImputationPolicy,
           passes: int = 1, truth: AttributeTable | None = None):
    """Fill missing values of ``attr`` by neighbor majority vote.

    Every neighbor with a known value casts one vote for it.  A missing
    node receives the top-voted value only if that value has at least
    ``policy.f_min`` votes and at least ``policy.t_min`` of all votes cast.
    Within a pass all decisions are taken from the table as it was at the
    start of the pass.

    Parameters
    ----------
    g : Graph
    tab : AttributeTable
    attr : str
    policy : ImputationPolicy
    passes : int
        Number of synchronous passes; later passes may use values filled
        by earlier ones.
    truth : AttributeTable, optional
        Reference table; when given, precision over the predicted nodes
        whose true value is known is recorded in the report.

    Returns
    -------
    (AttributeTable, ImputationReport)
    """
    if tab.node_count != g.node_count:
        raise InputError("graph and attribute table disagree on node count")
    if passes < 1:
        raise InputError("passes must be >= 1")
    col = tab.codes(attr)
    n_cats = len(tab.categories[attr])
    before = int(np.count_nonzero(col == MISSING))
    filled: list[int] = []
    cur = col
    for _ in range(passes):
        cur, got = _vote_pass(g.indptr, g.indices, cur, policy, n_cats)
        filled.extend(got)
        if not got:
            break
    out = tab.with_codes(attr, cur)
    report = ImputationReport(attr, policy.f_min, policy.t_min, before, len(filled),
                              before - len(filled), passes=passes)
    if truth is not None:
        report.correct, judged = _score_against(truth, tab, attr, cur, filled)
        report.precision = report.correct / judged if judged else None
    return out, report


def _score_against(truth, tab, attr, predicted_col, filled):
    # categories may be coded differently in the two tables: compare raw values
    true_vals = truth.values(attr)
    cats = tab.categories[attr]
    correct = judged = 0
    for x in filled:
        tv = true_vals[x]
        if tv is None:
            continue
        judged += 1
        correct += int(cats[predicted_col[x]] == tv)
    return correct, judged


def threshold_score(precision: float, correct: int) -> float:
    """Tuning objective ``precision * ln(correct)``; needs ``correct >= 1``."""
    if correct < 1:
        raise ValueError("objective undefined for zero correct predictions")
    return precision * math.log(correct)


def tune_thresholds(g, tab: AttributeTable, attr: str, f_grid: Sequence[int],
                    t_grid: Sequence[float], holdout_fraction: float = 0.2,
                    seed: int = 0):
    """Grid-search ``(f, t)`` on a hidden subset of the labelled nodes.

    A random ``holdout_fraction`` of the labelled nodes is hidden, each grid
    point is imputed once, and the policy maximising
    :func:`threshold_score` on the hidden nodes is returned.  Ties prefer
    higher precision, then smaller ``f``, then larger ``t``.

    Returns
    -------
    (ImputationPolicy, list of dict)
        The winner and one score row per grid point.

    Raises
    ------
    NoViablePolicyError
        If no grid point predicts at least one hidden label correctly.
    """
    if not (0.0 < holdout_fraction < 1.0):
        raise InputError("holdout_fraction must be in (0, 1)")
    col = tab.codes(attr)
    labeled = np.flatnonzero(col != MISSING)
    k = int(round(holdout_fraction * len(labeled)))
    if k < 1:
        raise InputError(f"attribute {attr!r} has too few labelled nodes to hold out")
    rng = np.random.default_rng(seed)
    hidden = np.sort(rng.choice(labeled, size=k, replace=False))
    masked = col.copy()
    masked[hidden] = MISSING
    train_tab = tab.with_codes(attr, masked)
    hidden_set = set(hidden.tolist())

    rows = []
    best_key, best = None, None
    for f in f_grid:
        for t in t_grid:
            policy = ImputationPolicy(int(f), float(t))
            new, rep = impute(g, train_tab, attr, policy)
            pred = [x for x in np.flatnonzero((masked == MISSING) & (new.codes(attr) != MISSING)).tolist()
                    if x in hidden_set]
            new_col = new.codes(attr)
            correct = sum(1 for x in pred if new_col[x] == col[x])
            precision = correct / len(pred) if pred else 0.0
            score = threshold_score(precision, correct) if correct >= 1 else None
            rows.append({"f": policy.f_min, "t": policy.t_min, "predicted": len(pred),
                         "correct": correct, "precision": precision, "score": score})
            if score is None:
                continue
            key = (score, precision, -policy.f_min, policy.t_min)
            if best_key is None or key > best_key:
                best_key, best = key, policy
    if best is None:
        raise NoViablePolicyError("no viable policy: no grid point made a correct prediction")
    return best, rows
