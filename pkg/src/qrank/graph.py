"""Directed web graphs and the matrices built from them.

Orientation is column-stochastic throughout: entry ``(i, j)`` of every
matrix here is the probability of hopping from node ``j`` to node ``i``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ParseError, ValidationError

DEFAULT_ALPHA = 0.85
COLUMN_SUM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WebGraph:
    """Directed graph on dense 0-based node ids.

    Self-loops are allowed. Labels are presentation metadata only and do
    not take part in equality.
    """

    node_count: int
    edges: frozenset[tuple[int, int]]
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.node_count) < 1:
            raise ValidationError(f"node_count must be positive, got {self.node_count}")
        edges = frozenset((int(s), int(t)) for s, t in self.edges)
        for s, t in edges:
            if not (0 <= s < self.node_count and 0 <= t < self.node_count):
                raise ValidationError(
                    f"edge ({s}, {t}) has an endpoint outside [0, {self.node_count})"
                )
        if self.labels is not None and len(self.labels) != self.node_count:
            raise ValidationError("labels must have one entry per node")
        object.__setattr__(self, "node_count", int(self.node_count))
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], node_count: int | None = None):
        edges = list(edges)
        if node_count is None:
            node_count = 1 + max((max(e) for e in edges), default=0)
        return cls(node_count, frozenset(edges))

    def out_degree(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=int)
        for s, _ in self.edges:
            deg[s] += 1
        return deg

    def backlinks(self, i: int) -> frozenset[int]:
        """Nodes with an edge pointing at ``i``."""
        return frozenset(s for s, t in self.edges if t == i)


def parse_edge_list(text) -> WebGraph:
    """Parse the edge-list text format.

    Accepts a string or a text stream. Grammar, one item per line:
    ``# comment``, blank, ``nodes N`` (at most once, before any edge), or
    ``source target`` as non-negative integers.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    declared = None
    edges = set()
    for lineno, raw in enumerate(text, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "nodes":
            if declared is not None:
                raise ParseError("duplicate 'nodes' header", lineno)
            if edges:
                raise ParseError("'nodes' header must precede all edges", lineno)
            if len(parts) != 2:
                raise ParseError(f"expected 'nodes N', got {line!r}", lineno)
            try:
                declared = int(parts[1])
            except ValueError:
                raise ParseError(f"node count is not an integer: {parts[1]!r}", lineno) from None
            if declared < 1:
                raise ParseError(f"node count must be positive, got {declared}", lineno)
            continue
        if len(parts) != 2:
            raise ParseError(f"expected 'source target', got {line!r}", lineno)
        try:
            s, t = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"node ids must be integers: {line!r}", lineno) from None
        if s < 0 or t < 0:
            raise ParseError(f"negative node id in {line!r}", lineno)
        edges.add((s, t))
    if declared is None:
        if not edges:
            raise ParseError("empty graph: no edges and no 'nodes' header")
        declared = 1 + max(max(e) for e in edges)
    for s, t in edges:
        if s >= declared or t >= declared:
            raise ValidationError(f"edge ({s}, {t}) exceeds declared node count {declared}")
    return WebGraph(declared, frozenset(edges))


def serialize_edge_list(g: WebGraph) -> str:
    lines = [f"nodes {g.node_count}"]
    lines += [f"{s} {t}" for s, t in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def hyperlink_matrix(g: WebGraph) -> np.ndarray:
    n = g.node_count
    h = np.zeros((n, n))
    deg = g.out_degree()
    for s, t in g.edges:
        h[t, s] = 1.0 / deg[s]
    return h


def check_stochastic(m: np.ndarray, tol: float = COLUMN_SUM_TOL) -> np.ndarray:
    """Validate a column-stochastic matrix and return it as a float array."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if np.any(m < 0) or np.any(m > 1 + tol):
        raise ValidationError("stochastic matrix entries must lie in [0, 1]")
    sums = m.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        raise ValidationError(f"column {bad[0]} sums to {sums[bad[0]]!r}, not 1")
    return m


def patch_dangling(h: np.ndarray) -> np.ndarray:
    """Replace all-zero (dangling) columns with the uniform column 1/N."""
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    sums = h.sum(axis=0)
    zero = np.abs(sums) <= COLUMN_SUM_TOL
    one = np.abs(sums - 1.0) <= COLUMN_SUM_TOL
    bad = np.flatnonzero(~(zero | one))
    if bad.size:
        raise ValidationError(
            f"column {bad[0]} sums to {sums[bad[0]]!r}; expected 0 (dangling) or 1"
        )
    e = h.copy()
    e[:, zero] = 1.0 / n
    return check_stochastic(e)


@dataclass(frozen=True, eq=False)
class GoogleMatrix:
    matrix: np.ndarray
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(check_stochastic(self.matrix)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def google_matrix(e: np.ndarray, alpha: float = DEFAULT_ALPHA) -> GoogleMatrix:
    """Mix link-following and uniform teleportation: G = alpha*E + (1-alpha)/N."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    e = check_stochastic(e)
    n = e.shape[0]
    return GoogleMatrix(alpha * e + (1.0 - alpha) / n, float(alpha))


def google_from_graph(g: WebGraph, alpha: float = DEFAULT_ALPHA) -> GoogleMatrix:
    return google_matrix(patch_dangling(hyperlink_matrix(g)), alpha)


def matrix_to_csv(m: np.ndarray) -> str:
    """Row-major CSV dump at 17 significant digits."""
    m = np.asarray(m)
    out = []
    for row in m:
        if np.iscomplexobj(row):
            out.append(",".join(f"{complex(x):.17g}" for x in row))
        else:
            out.append(",".join(f"{float(x):.17g}" for x in row))
    return "\n".join(out) + "\n"


def random_graph(n: int, rng: np.random.Generator, edge_prob: float = 0.3) -> WebGraph:
    """Erdős-Rényi style directed graph without self-loops (may have dangling nodes)."""
    mask = rng.random((n, n)) < edge_prob
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return WebGraph(n, frozenset(zip(src.tolist(), dst.tolist())))
