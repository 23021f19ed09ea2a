"""Edge-list, attribute CSV and pair-list readers and writers.

Edge list: one edge per line, two labels separated by commas or
whitespace, optional integer timestamp in a third column; ``#`` starts a
comment line.  Attribute CSV: header ``node,<attr1>,...``; an empty field or
``NA`` is a missing value.
"""
from __future__ import annotations

import csv
import logging
import re
from pathlib import Path

from .attributes import MISSING, AttributeTable
from .errors import InputError
from .graph import Graph, build_graph

logger = logging.getLogger(__name__)

_SPLIT = re.compile(r"[,\s]+")


def _rows(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, _SPLIT.split(line)


def read_edge_list(path):
    """Return ``(pairs, timestamps)``; ``timestamps`` is None when absent."""
    pairs, stamps = [], []
    has_ts = None
    for lineno, fields in _rows(path):
        if len(fields) < 2 or len(fields) > 3:
            raise InputError(f"{path}:{lineno}: expected 2 or 3 fields, got {len(fields)}")
        row_ts = len(fields) == 3
        if has_ts is None:
            has_ts = row_ts
        elif has_ts != row_ts:
            raise InputError(f"{path}:{lineno}: timestamp column present on some rows only")
        pairs.append((fields[0], fields[1]))
        if row_ts:
            try:
                stamps.append(int(fields[2]))
            except ValueError:
                raise InputError(f"{path}:{lineno}: timestamp {fields[2]!r} is not an integer") from None
    return pairs, (stamps if has_ts else None)


def load_graph(path, directed: bool = False) -> Graph:
    pairs, stamps = read_edge_list(path)
    if not pairs:
        raise InputError(f"{path}: empty graph")
    g = build_graph(pairs, directed_input=directed, timestamps=stamps)
    s = g.build_stats
    if s.self_loops or s.duplicates:
        logger.warning("%s: dropped %d self-loops, %d duplicate edges", path, s.self_loops, s.duplicates)
    return g


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes={g.node_count} edges={g.edge_count}\n")
        labels = g.labels
        if g.timestamps is None:
            for u, v in g.edges.tolist():
                fh.write(f"{labels[u]}\t{labels[v]}\n")
        else:
            for (u, v), t in zip(g.edges.tolist(), g.timestamps.tolist()):
                fh.write(f"{labels[u]}\t{labels[v]}\t{t}\n")


def read_attributes(path, g: Graph) -> AttributeTable:
    """Read an attribute CSV aligned to the node ids of ``g``.

    Graph nodes absent from the file get missing values; rows for labels
    not in the graph are skipped with a warning.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty attribute file") from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0] != "node":
            raise InputError(f"{path}:1: header must be 'node,<attr1>,...'")
        names = header[1:]
        if len(set(names)) != len(names):
            raise InputError(f"{path}:1: duplicate attribute names")
        columns = {a: [None] * g.node_count for a in names}
        seen = set()
        skipped = 0
        for lineno, row in enumerate(reader, 2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                i = g.node_id(row[0].strip())
            except InputError:
                skipped += 1
                continue
            if i in seen:
                raise InputError(f"{path}:{lineno}: duplicate row for node {row[0]!r}")
            seen.add(i)
            for a, val in zip(names, row[1:]):
                columns[a][i] = val.strip()
    if skipped:
        logger.warning("%s: skipped %d rows for nodes not in the graph", path, skipped)
    return AttributeTable.from_columns(columns, g.node_count)


def write_attributes(tab: AttributeTable, g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", *tab.names])
        cols = [tab.values(a) for a in tab.names]
        for i, label in enumerate(g.labels):
            w.writerow([label, *("NA" if c[i] is None else c[i] for c in cols)])


def read_pairs(path, g: Graph) -> list[tuple[int, int]]:
    out = []
    for lineno, fields in _rows(path):
        if len(fields) < 2:
            raise InputError(f"{path}:{lineno}: expected two labels")
        try:
            out.append((g.node_id(fields[0]), g.node_id(fields[1])))
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    return out


def ensure_parent(path) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True)
    return p


__all__ = ["read_edge_list", "load_graph", "write_edge_list", "read_attributes",
           "write_attributes", "read_pairs", "MISSING"]
