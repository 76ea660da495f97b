"""Truncated inverse systems of covers: towers, joins, and limit decks.

A tower is a finite chain of covers of one base scale graph in which
each level admits a bonding map onto the previous one.  Depth-d
truncations stand in for the full inverse limit: limit points are
coherent vertex threads, the limit deck is the group of coherent deck
threads under componentwise multiplication.  Solenoid towers over a
circle sample use degree-p cyclic covers at every level.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .covers import (
    CoverGraph,
    GroupHom,
    bonding_map,
    build_cover,
    lift_chain,
)
from .errors import CatalogBoundError, ChainliftError
from .groups import FiniteGroupTable, cyclic_group, mulclose
from .homotopy import Chain, presentation_at_scale
from .space import ScaleGraph, build_scale_graph, sample_circle


@dataclass(frozen=True)
class TowerLevel:
    """One stage of a tower and its bonding data to the stage below.

    ``hom_to_previous`` maps deck elements of this level onto the deck of
    the previous level (the base counts as a level with trivial deck);
    ``graph_map_to_previous`` maps this level's cover vertices onto the
    previous level's vertices (or base vertices at depth 1).
    """

    depth: int
    cover: CoverGraph
    hom_to_previous: tuple[int, ...]
    graph_map_to_previous: tuple[int, ...]


class TowerTruncation:
    """Finite initial segment of an inverse system of covers."""

    def __init__(self, base: ScaleGraph, levels: Sequence[TowerLevel]):
        self.base = base
        self.levels = list(levels)
        self.vertex_threads = self._vertex_threads()
        self.deck_threads = self._deck_threads()

    @property
    def depth(self) -> int:
        return len(self.levels)

    def _vertex_threads(self) -> list[tuple[int, ...]]:
        """Coherent vertex threads (base vertex first), one per deepest vertex."""
        if not self.levels:
            return [(v,) for v in self.base.vertices]
        threads = []
        for idx in range(self.levels[-1].cover.n_vertices):
            thread = [idx]
            for k in range(self.depth - 1, -1, -1):
                thread.append(self.levels[k].graph_map_to_previous[thread[-1]])
            thread.reverse()
            threads.append(tuple(thread))
        return threads

    def _deck_threads(self) -> list[tuple[int, ...]]:
        """Coherent deck threads, one per deepest deck element."""
        if not self.levels:
            return [()]
        threads = []
        for g in range(self.levels[-1].cover.group.order):
            thread = [g]
            for k in range(self.depth - 1, 0, -1):
                thread.append(self.levels[k].hom_to_previous[thread[-1]])
            thread.reverse()
            threads.append(tuple(thread))
        return threads

    def verify(self) -> None:
        """Full verification of the level invariants and thread coherence."""
        previous: Optional[TowerLevel] = None
        for k, level in enumerate(self.levels, start=1):
            if level.depth != k:
                raise ChainliftError(f"level {k} carries depth {level.depth}")
            cover = level.cover
            if not cover.base.same_scale(self.base):
                raise ChainliftError(f"level {k} does not cover the tower base")
            gmap = level.graph_map_to_previous
            hmap = level.hom_to_previous
            if previous is None:
                if len(set(hmap)) != 1 or hmap[0] != 0:
                    raise ChainliftError("depth-1 deck map must be trivial")
                for idx in range(cover.n_vertices):
                    if gmap[idx] != cover.project(idx):
                        raise ChainliftError(
                            "depth-1 graph map must be the cover projection"
                        )
            else:
                prev_cover = previous.cover
                if set(hmap) != set(range(prev_cover.group.order)):
                    raise ChainliftError(f"level {k} deck map is not surjective")
                for a in range(cover.group.order):
                    for b in range(cover.group.order):
                        if hmap[cover.group.mult[a][b]] != prev_cover.group.mult[
                            hmap[a]
                        ][hmap[b]]:
                            raise ChainliftError(
                                f"level {k} deck map is not a homomorphism"
                            )
                edge_set = set(prev_cover.edges)
                for a, b in cover.edges:
                    ia, ib = gmap[a], gmap[b]
                    if ia != ib and (min(ia, ib), max(ia, ib)) not in edge_set:
                        raise ChainliftError(
                            f"level {k} graph map does not preserve edges"
                        )
                for idx in range(cover.n_vertices):
                    if prev_cover.project(gmap[idx]) != cover.project(idx):
                        raise ChainliftError(
                            f"level {k} graph map does not commute with projections"
                        )
                for g in range(cover.group.order):
                    for idx in range(cover.n_vertices):
                        if gmap[cover.deck_act(g, idx)] != prev_cover.deck_act(
                            hmap[g], gmap[idx]
                        ):
                            raise ChainliftError(
                                f"level {k} compatibility condition fails"
                            )
            previous = level
        thread_set = self._deck_thread_set()
        for thread in self.deck_threads:
            for a in self.deck_threads:
                if self.deck_mul(thread, a) not in thread_set:
                    raise ChainliftError("deck threads are not closed under product")
        for g in self.deck_threads:
            if g == self.identity_thread():
                continue
            for t in self.vertex_threads:
                if self.deck_act(g, t) == t:
                    raise ChainliftError("limit deck action is not free")

    def identity_thread(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.levels)

    def _deck_thread_set(self) -> set[tuple[int, ...]]:
        return set(self.deck_threads)

    def deck_mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple(
            lvl.cover.group.mult[x][y] for lvl, x, y in zip(self.levels, a, b)
        )

    def deck_act(self, g: Sequence[int], thread: Sequence[int]) -> tuple[int, ...]:
        moved = [thread[0]]
        for lvl, gk, idx in zip(self.levels, g, thread[1:]):
            moved.append(lvl.cover.deck_act(gk, idx))
        return tuple(moved)

    @staticmethod
    def from_covers(base: ScaleGraph, covers: Sequence[CoverGraph]) -> "TowerTruncation":
        """Assemble a tower, deriving bonding maps between adjacent covers."""
        levels = []
        previous: Optional[CoverGraph] = None
        for k, cover in enumerate(covers, start=1):
            if previous is None:
                hmap = tuple(0 for _ in range(cover.group.order))
                gmap = tuple(cover.project(i) for i in range(cover.n_vertices))
            else:
                hmap, gmap = bonding_map(cover, previous)
            levels.append(TowerLevel(k, cover, hmap, gmap))
            previous = cover
        tower = TowerTruncation(base, levels)
        tower.verify()
        return tower


def build_solenoid_tower(
    circle_n: int,
    p: int,
    depth: int,
    radius: float = 1.0,
    catalog_max: int = 16,
) -> TowerTruncation:
    """Tower of degree-p cyclic covers over a circle sample.

    Level k is the p^k-fold cover (a cycle of circle_n * p^k vertices)
    with deck maps reducing residues mod p^(k-1).
    """
    if p < 2:
        raise ChainliftError("p must be at least 2")
    if depth < 0:
        raise ChainliftError("depth must be nonnegative")
    if depth and p**depth > catalog_max:
        raise CatalogBoundError(
            f"deck order p^depth = {p ** depth} exceeds the bound {catalog_max}"
        )
    space = sample_circle(circle_n, radius)
    c1 = 2.0 * radius * math.sin(math.pi / circle_n)
    c2 = 2.0 * radius * math.sin(2.0 * math.pi / circle_n)
    graph = build_scale_graph(space, (c1 + c2) / 2.0, 0)
    presentation = presentation_at_scale(graph)
    if presentation.rank != 1 or presentation.relators:
        raise ChainliftError("circle sample did not present a rank-1 free group")
    covers = []
    for k in range(1, depth + 1):
        deck = cyclic_group(p**k)
        covers.append(build_cover(graph, presentation, GroupHom(presentation, deck, [1])))
    return TowerTruncation.from_covers(graph, covers)


def tower_join(cover_i: CoverGraph, cover_j: CoverGraph) -> CoverGraph:
    """A cover dominating both inputs, via the image in the product group.

    The deck group is the subgroup of the direct product generated by the
    paired generator images; bonding maps onto both inputs are
    constructed and compatibility-verified before returning.
    """
    if not cover_i.base.same_scale(cover_j.base):
        raise ChainliftError("covers must share the base scale graph and basepoint")
    if cover_i.presentation is not cover_j.presentation:
        if cover_i.presentation.generators != cover_j.presentation.generators:
            raise ChainliftError("covers must share the base presentation")
    gi, gj = cover_i.group, cover_j.group
    paired = [
        a * gj.order + b for a, b in zip(cover_i.hom.images, cover_j.hom.images)
    ]
    product_mult = [
        [
            gi.mult[a1][a2] * gj.order + gj.mult[b1][b2]
            for a2 in range(gi.order)
            for b2 in range(gj.order)
        ]
        for a1 in range(gi.order)
        for b1 in range(gj.order)
    ]
    product = FiniteGroupTable(f"{gi.name}x{gj.name}", product_mult)
    image = mulclose(product, paired)
    sub, elems = product.subgroup(image)
    pos = {e: i for i, e in enumerate(elems)}
    hom = GroupHom(cover_i.presentation, sub, [pos[x] for x in paired])
    join = build_cover(cover_i.base, cover_i.presentation, hom)
    bonding_map(join, cover_i)
    bonding_map(join, cover_j)
    return join


def lift_through_tower(tower: TowerTruncation, chain: Chain) -> list[int]:
    """Endpoints of the iterated lifts of a basepoint chain, per level.

    The endpoint list is a coherent thread under the tower's graph maps
    (verified); for loops the deck coordinates of the endpoints are the
    holonomy residues.
    """
    if chain.start != tower.base.basepoint:
        raise ChainliftError("chain must start at the tower basepoint")
    if not tower.base.same_scale(chain.graph):
        raise ChainliftError("chain does not live on the tower base")
    endpoints = []
    for level in tower.levels:
        lifted = lift_chain(level.cover, chain, level.cover.basepoint_index)
        endpoints.append(lifted[-1])
    for k in range(1, len(endpoints)):
        mapped = tower.levels[k].graph_map_to_previous[endpoints[k]]
        if mapped != endpoints[k - 1]:
            raise ChainliftError("lift endpoints are not a coherent thread")
    return endpoints


@dataclass(frozen=True)
class ProfiniteTruncation:
    """The limit deck at finite depth: coherent threads and their table."""

    threads: tuple[tuple[int, ...], ...]
    table: FiniteGroupTable


def profinite_truncation(tower: TowerTruncation) -> ProfiniteTruncation:
    """Group table of the coherent deck threads (componentwise product)."""
    threads = [tuple(t) for t in tower.deck_threads]
    pos = {t: i for i, t in enumerate(threads)}
    identity = tower.identity_thread()
    ordered = [identity] + sorted(t for t in threads if t != identity)
    pos = {t: i for i, t in enumerate(ordered)}
    mult = [
        [pos[tower.deck_mul(a, b)] for b in ordered]
        for a in ordered
    ]
    table = FiniteGroupTable(f"limit-deck-d{tower.depth}", mult)
    table.validate()
    return ProfiniteTruncation(tuple(ordered), table)


def snark_surjectivity_check(tower: TowerTruncation) -> bool:
    """Are all bonding deck maps and all limit projections surjective?"""
    for k, level in enumerate(tower.levels):
        prev_order = 1 if k == 0 else tower.levels[k - 1].cover.group.order
        if len(set(level.hom_to_previous)) != prev_order:
            return False
        prev_count = (
            tower.base.space.n_points
            if k == 0
            else tower.levels[k - 1].cover.n_vertices
        )
        if len(set(level.graph_map_to_previous)) != prev_count:
            return False
    for k in range(tower.depth):
        if len({t[k] for t in tower.deck_threads}) != tower.levels[k].cover.group.order:
            return False
        if (
            len({t[k + 1] for t in tower.vertex_threads})
            != tower.levels[k].cover.n_vertices
        ):
            return False
    if len({t[0] for t in tower.vertex_threads}) != tower.base.space.n_points:
        return False
    return True


def tower_report(tower: TowerTruncation) -> dict:
    """Per-level degree, deck order, and relative minimal displacement.

    The displacement at level k is taken over the kernel of the bonding
    deck map, i.e. the deck transformations the previous level cannot
    see, measured in level k's hop metric.
    """
    levels = []
    for k, level in enumerate(tower.levels):
        cover = level.cover
        prev_order = 1 if k == 0 else tower.levels[k - 1].cover.group.order
        degree = cover.group.order // prev_order
        kernel = [g for g in range(cover.group.order) if level.hom_to_previous[g] == 0]
        hops = cover.hop_table()
        min_disp: Optional[int] = None
        for g in kernel:
            if g == 0:
                continue
            for idx in range(cover.n_vertices):
                d = hops[idx][cover.deck_act(g, idx)]
                if d >= 0 and (min_disp is None or d < min_disp):
                    min_disp = d
        levels.append(
            {
                "degree": degree,
                "deck_order": cover.group.order,
                "min_displacement": min_disp,
            }
        )
    return {
        "base_points": tower.base.space.n_points,
        "depth": tower.depth,
        "levels": levels,
        "deck_threads": [list(t) for t in tower.deck_threads],
    }


def tower_report_json(tower: TowerTruncation) -> str:
    return json.dumps(tower_report(tower), sort_keys=True, separators=(",", ":"))
