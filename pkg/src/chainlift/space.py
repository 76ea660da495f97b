"""Finite metric spaces, scale entourages, and scale graphs.

A finite metric space stands in for a continuum sampled at some
resolution.  At a scale ``epsilon`` the pairs closer than ``epsilon``
(strict inequality) form the edge set of the scale graph, on which all
chain and homotopy computations run.

Threshold comparisons are exact: for coordinate-based spaces squared
distances are compared as exact rationals, otherwise stored doubles are
compared with no tolerance.  Pick ``epsilon`` away from realized
distances; ties at exactly ``epsilon`` are excluded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Optional, Sequence, Union

from .errors import ChainliftError, ParseError

EUCLIDEAN = "euclidean-from-coordinates"
EXPLICIT = "explicit-table"
GRAPH_HOP = "graph-hop"

_TRIANGLE_SLACK = 1e-9


class FiniteMetricSpace:
    """Points with a symmetric distance table.

    ``coords`` is present only for euclidean spaces.  ``basepoint`` is a
    default basepoint for scale graphs built on this space (index 0
    unless an input file says otherwise).
    """

    def __init__(
        self,
        dist: Sequence[Sequence[float]],
        metric_kind: str,
        coords: Optional[Sequence[Sequence[float]]] = None,
        basepoint: int = 0,
    ):
        self.dist = tuple(tuple(float(x) for x in row) for row in dist)
        self.n_points = len(self.dist)
        self.metric_kind = metric_kind
        self.coords = (
            tuple(tuple(float(x) for x in c) for c in coords)
            if coords is not None
            else None
        )
        self.basepoint = basepoint
        self._sq_coords: Optional[tuple[tuple[Fraction, ...], ...]] = None
        self.validate()

    @property
    def points(self) -> range:
        return range(self.n_points)

    def validate(self) -> None:
        n = self.n_points
        if n == 0:
            raise ParseError("no points")
        if not (0 <= self.basepoint < n):
            raise ChainliftError(f"basepoint {self.basepoint} out of range")
        for i in range(n):
            if len(self.dist[i]) != n:
                raise ChainliftError(f"distance table row {i} has wrong length")
            if self.dist[i][i] != 0.0:
                raise ChainliftError(f"dist({i},{i}) != 0")
            for j in range(i + 1, n):
                d = self.dist[i][j]
                if d != self.dist[j][i]:
                    raise ChainliftError(f"distance table asymmetric at ({i},{j})")
                if d <= 0.0:
                    raise ChainliftError(
                        f"duplicate points: dist({i},{j}) = 0 for distinct indices {i}, {j}"
                    )
        for i in range(n):
            for j in range(n):
                dij = self.dist[i][j]
                for k in range(n):
                    if dij > self.dist[i][k] + self.dist[k][j] + _TRIANGLE_SLACK * (
                        1.0 + dij
                    ):
                        raise ChainliftError(
                            f"triangle inequality fails for ({i},{k},{j})"
                        )

    def _squared(self, p: int, q: int) -> Fraction:
        if self._sq_coords is None:
            assert self.coords is not None
            self._sq_coords = tuple(
                tuple(Fraction(x) for x in c) for c in self.coords
            )
        a, b = self._sq_coords[p], self._sq_coords[q]
        return sum(((x - y) * (x - y) for x, y in zip(a, b)), Fraction(0))

    def closer_than(self, p: int, q: int, epsilon: float) -> bool:
        """Strict threshold test; exact for coordinate-based spaces."""
        if p == q:
            return True
        if self.metric_kind == EUCLIDEAN:
            return self._squared(p, q) < Fraction(epsilon) ** 2
        return self.dist[p][q] < epsilon


@dataclass(frozen=True)
class ScaleEntourage:
    """Metric entourage at a scale: the pairs with dist < epsilon."""

    epsilon: float

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ChainliftError("epsilon must be positive")

    def contains(self, space: FiniteMetricSpace, p: int, q: int) -> bool:
        return space.closer_than(p, q, self.epsilon)


class ScaleGraph:
    """A finite metric space with the edge relation at one scale."""

    def __init__(self, space: FiniteMetricSpace, epsilon: float, basepoint: int):
        if epsilon <= 0:
            raise ChainliftError("epsilon must be positive")
        if not (0 <= basepoint < space.n_points):
            raise ChainliftError(f"basepoint {basepoint} is not a point index")
        self.space = space
        self.epsilon = float(epsilon)
        self.entourage = ScaleEntourage(self.epsilon)
        self.basepoint = basepoint
        edges = []
        for p in range(space.n_points):
            for q in range(p + 1, space.n_points):
                if space.closer_than(p, q, self.epsilon):
                    edges.append((p, q))
        self.edges: tuple[tuple[int, int], ...] = tuple(edges)
        self._edge_set = set(self.edges)
        adjacency: list[list[int]] = [[] for _ in range(space.n_points)]
        for p, q in self.edges:
            adjacency[p].append(q)
            adjacency[q].append(p)
        self.adjacency = tuple(tuple(sorted(a)) for a in adjacency)

    @property
    def vertices(self) -> range:
        return self.space.points

    def has_edge(self, p: int, q: int) -> bool:
        return (min(p, q), max(p, q)) in self._edge_set

    def step_ok(self, p: int, q: int) -> bool:
        """Chain step condition: an edge or a repeated point."""
        return p == q or self.has_edge(p, q)

    def neighbors(self, p: int) -> tuple[int, ...]:
        return self.adjacency[p]

    def hop_neighborhood(self, p: int, k: int) -> set[int]:
        """Points reachable from p in at most k edge steps."""
        seen = {p}
        frontier = [p]
        for _ in range(k):
            nxt = []
            for v in frontier:
                for w in self.adjacency[v]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return seen

    def same_scale(self, other: "ScaleGraph") -> bool:
        return (
            self.space is other.space
            and self.epsilon == other.epsilon
            and self.basepoint == other.basepoint
        )


def build_scale_graph(
    space: FiniteMetricSpace, epsilon: float, basepoint: Optional[int] = None
) -> ScaleGraph:
    """Scale graph with all strict-threshold pairs as edges."""
    if basepoint is None:
        basepoint = space.basepoint
    return ScaleGraph(space, epsilon, basepoint)


def is_chain_connected(graph: ScaleGraph) -> bool:
    """True iff every pair of points is joined by a chain in the graph."""
    n = graph.space.n_points
    seen = {graph.basepoint}
    frontier = [graph.basepoint]
    while frontier:
        nxt = []
        for v in frontier:
            for w in graph.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return len(seen) == n


# -- generators -------------------------------------------------------------


def sample_circle(n: int, radius: float) -> FiniteMetricSpace:
    """n points equally spaced on a circle, chordal (euclidean) metric."""
    if n < 3:
        raise ChainliftError("need at least 3 points on the circle")
    if radius <= 0:
        raise ChainliftError("radius must be positive")
    coords = [
        (radius * math.cos(2.0 * math.pi * k / n), radius * math.sin(2.0 * math.pi * k / n))
        for k in range(n)
    ]
    return FiniteMetricSpace(_euclidean_table(coords), EUCLIDEAN, coords=coords)


def wedge_graph_space(cycle_lengths: Sequence[int]) -> FiniteMetricSpace:
    """Cycles of unit edges glued at a common basepoint vertex, hop metric.

    ``[m, m]`` is the figure-eight on 2m-1 vertices.
    """
    if not cycle_lengths:
        raise ChainliftError("need at least one cycle")
    for m in cycle_lengths:
        if m < 3:
            raise ChainliftError("each cycle length must be at least 3")
    edges: list[tuple[int, int]] = []
    n = 1
    for m in cycle_lengths:
        ring = [0] + list(range(n, n + m - 1))
        n += m - 1
        for i in range(m):
            a, b = ring[i], ring[(i + 1) % m]
            edges.append((min(a, b), max(a, b)))
    dist = _hop_table(n, edges)
    return FiniteMetricSpace(dist, GRAPH_HOP)


def _euclidean_table(coords: Sequence[Sequence[float]]) -> list[list[float]]:
    n = len(coords)
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            s = sum((a - b) ** 2 for a, b in zip(coords[i], coords[j]))
            dist[i][j] = dist[j][i] = math.sqrt(s)
    return dist


def _hop_table(n: int, edges: Iterable[tuple[int, int]]) -> list[list[float]]:
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    dist = [[math.inf] * n for _ in range(n)]
    for src in range(n):
        dist[src][src] = 0.0
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for w in adjacency[v]:
                    if dist[src][w] == math.inf:
                        dist[src][w] = float(d)
                        nxt.append(w)
            frontier = nxt
    for row in dist:
        if math.inf in row:
            raise ChainliftError("hop metric requires a connected graph")
    return dist


# -- ingestion and export ----------------------------------------------------


def load_point_cloud(source: Union[str, bytes, IO], format: str) -> FiniteMetricSpace:
    """Read a point cloud from CSV or JSON (see the formats below).

    CSV: one point per line, comma-separated real coordinates, uniform
    dimension, lines starting with '#' skipped.  JSON: object with
    "points" (array of coordinate arrays), optional "dist" (full
    symmetric matrix, overrides coordinates) and "basepoint" (index,
    default 0).
    """
    text = _as_text(source)
    if format == "csv":
        return _load_csv(text)
    if format == "json":
        return _load_json(text)
    raise ChainliftError(f"unknown format {format!r}")


def _as_text(source: Union[str, bytes, IO]) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def _load_csv(text: str) -> FiniteMetricSpace:
    coords: list[tuple[float, ...]] = []
    dim: Optional[int] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        try:
            row = tuple(float(p) for p in parts)
        except ValueError:
            raise ParseError(f"cannot parse {raw!r} as coordinates", line=lineno)
        if any(not math.isfinite(x) for x in row):
            raise ParseError("coordinates must be finite", line=lineno)
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise ParseError(
                f"expected {dim} coordinates, got {len(row)}", line=lineno
            )
        coords.append(row)
    if not coords:
        raise ParseError("no points")
    return FiniteMetricSpace(_euclidean_table(coords), EUCLIDEAN, coords=coords)


def _load_json(text: str) -> FiniteMetricSpace:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno)
    if not isinstance(obj, dict) or "points" not in obj:
        raise ParseError('JSON input must be an object with a "points" array')
    pts = obj["points"]
    if not pts:
        raise ParseError("no points")
    coords = [tuple(float(x) for x in row) for row in pts]
    if any(not math.isfinite(x) for row in coords for x in row):
        raise ParseError("coordinates must be finite")
    if len({len(row) for row in coords}) > 1:
        raise ParseError("points must share one dimension")
    basepoint = int(obj.get("basepoint", 0))
    if "dist" in obj:
        dist = [[float(x) for x in row] for row in obj["dist"]]
        return FiniteMetricSpace(dist, EXPLICIT, basepoint=basepoint)
    return FiniteMetricSpace(
        _euclidean_table(coords), EUCLIDEAN, coords=coords, basepoint=basepoint
    )


def space_to_csv(space: FiniteMetricSpace) -> str:
    """Coordinates as CSV; round-trips bit-for-bit through load_point_cloud."""
    if space.coords is None:
        raise ChainliftError("only coordinate-based spaces export to CSV")
    lines = ["# chainlift point cloud"]
    for c in space.coords:
        lines.append(",".join(repr(x) for x in c))
    return "\n".join(lines) + "\n"
