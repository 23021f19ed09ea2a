"""Per-attribute categorical similarity between two nodes."""
from __future__ import annotations

import math
from enum import Enum

from .attributes import MISSING, AttributeTable
from .errors import InputError


class HomophilyMetricKind(str, Enum):
    OVERLAP = "overlap"
    GOODALL = "goodall"
    ESKIN = "eskin"
    IOF = "iof"
    OF = "of"

    @classmethod
    def parse(cls, value) -> "HomophilyMetricKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputError(f"unknown homophily metric {value!r}") from None


def homophily_score(tab: AttributeTable, kind, attr: str, x: int, y: int) -> float | None:
    """Similarity of the ``attr`` values of ``x`` and ``y``, or None if either is missing.

    Frequencies ``f`` are counted over the current table, ``N`` is the number
    of labelled nodes and ``d`` the number of distinct observed values.
    On a mismatch:

    * overlap: 0
    * eskin: ``d^2 / (d^2 + 2)``
    * iof: ``1 / (1 + ln f(X) ln f(Y))``
    * of: ``1 / (1 + ln(N/f(X)) ln(N/f(Y)))``
    * goodall (Goodall3): 0

    On a match every kind returns 1 except goodall, which returns
    ``1 - f(X)(f(X)-1) / (N(N-1))`` so that rare shared values count more.
    """
    kind = HomophilyMetricKind.parse(kind)
    col = tab.codes(attr)
    a, b = int(col[x]), int(col[y])
    if a == MISSING or b == MISSING:
        return None
    return _score(kind, tab.frequencies(attr), a, b)


def _score(kind, freq, a, b) -> float:
    if a == b:
        if kind is HomophilyMetricKind.GOODALL:
            big_n = int(freq.sum())
            fa = int(freq[a])
            if big_n < 2:
                return 1.0
            return 1.0 - fa * (fa - 1) / (big_n * (big_n - 1))
        return 1.0
    if kind is HomophilyMetricKind.OVERLAP or kind is HomophilyMetricKind.GOODALL:
        return 0.0
    if kind is HomophilyMetricKind.ESKIN:
        d2 = float(int((freq > 0).sum())) ** 2
        return d2 / (d2 + 2.0)
    fa, fb = float(freq[a]), float(freq[b])
    if kind is HomophilyMetricKind.IOF:
        return 1.0 / (1.0 + math.log(fa) * math.log(fb))
    big_n = float(freq.sum())
    return 1.0 / (1.0 + math.log(big_n / fa) * math.log(big_n / fb))
