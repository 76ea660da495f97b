"""Regular covering graphs with explicit finite deck actions.

A cover is built from a surjection of the scale-graph loop group onto a
finite group table: vertices are (base vertex, group element) pairs,
every base edge lifts with its tree-path normal-form label (tree edges
carry the identity, non-tree edges their generator image), and the deck
group acts by left multiplication on the group coordinate.  Chain
lifting is then a pure table lookup and homotopic chains lift to chains
with a common endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ChainliftError
from .groups import FiniteGroupTable, mulclose
from .homotopy import Chain, GroupPresentation, Word, chain_to_word
from .space import GRAPH_HOP, FiniteMetricSpace, ScaleGraph, build_scale_graph


class GroupHom:
    """Homomorphism from a presented loop group to a finite group table."""

    def __init__(
        self,
        source: GroupPresentation,
        target: FiniteGroupTable,
        images: Sequence[int],
    ):
        if len(images) != source.rank:
            raise ChainliftError(
                f"expected {source.rank} generator images, got {len(images)}"
            )
        for x in images:
            if not (0 <= x < target.order):
                raise ChainliftError(f"image {x} is not an element index")
        self.source = source
        self.target = target
        self.images = tuple(int(x) for x in images)
        self._image_subgroup: Optional[list[int]] = None

    def __repr__(self) -> str:
        return f"GroupHom(->{self.target.name}, images={self.images})"

    def evaluate(self, word: Word) -> int:
        g = 0
        for sym, exp in word.letters:
            x = self.images[sym]
            if exp < 0:
                x = self.target.inverse[x]
            g = self.target.mult[g][x]
        return g

    def failing_relator(self) -> Optional[Word]:
        for rel in self.source.relators:
            if self.evaluate(rel) != 0:
                return rel
        return None

    def image_subgroup(self) -> list[int]:
        if self._image_subgroup is None:
            self._image_subgroup = mulclose(self.target, self.images)
        return self._image_subgroup

    def is_surjective(self) -> bool:
        return len(self.image_subgroup()) == self.target.order


@dataclass(frozen=True)
class RootScaleReport:
    """Smallest hop displacement of the deck action and the root radius.

    ``max_root_scale`` is the largest hop radius r with 2r strictly below
    the minimal displacement.  A trivial deck group has no displacement;
    the report then carries the infinite marker.
    """

    infinite: bool
    min_displacement: Optional[int] = None
    max_root_scale: Optional[int] = None
    certificate: Optional[tuple[int, int, int]] = None  # (vertex, deck g, image)


class CoverGraph:
    """Covering graph of a scale graph with deck group acting freely."""

    def __init__(
        self, base: ScaleGraph, presentation: GroupPresentation, hom: GroupHom
    ):
        if hom.source is not presentation:
            raise ChainliftError("hom must be defined on the given presentation")
        if presentation.graph is not base and not presentation.graph.same_scale(base):
            raise ChainliftError("presentation and cover base disagree")
        rel = hom.failing_relator()
        if rel is not None:
            raise ChainliftError(
                f"hom is ill-defined: relator {rel.format(presentation.symbols)} "
                "does not map to the identity"
            )
        self.base = base
        self.presentation = presentation
        self.hom = hom
        self.group = hom.target
        order = self.group.order
        self.n_vertices = base.space.n_points * order
        self.vertices = tuple(
            (v, g) for v in range(base.space.n_points) for g in range(order)
        )
        self.basepoint_index = self._index(base.basepoint, 0)
        self.connected = hom.is_surjective()

        # Edge labels in tree-path normal form.
        self._step_label: dict[tuple[int, int], int] = {}
        for u, v in base.edges:
            letter = presentation.step_letter(u, v)
            lab = 0 if letter is None else hom.images[letter[0]]
            self._step_label[(u, v)] = lab
            self._step_label[(v, u)] = self.group.inverse[lab]

        adjacency: list[dict[int, int]] = [dict() for _ in range(self.n_vertices)]
        edges = set()
        for u, v in base.edges:
            lab = self._step_label[(u, v)]
            for g in range(order):
                a = self._index(u, g)
                b = self._index(v, self.group.mult[g][lab])
                adjacency[a][v] = b
                adjacency[b][u] = a
                edges.add((min(a, b), max(a, b)))
        self.adjacency = tuple(adjacency)
        self.edges = tuple(sorted(edges))
        self._hops: Optional[tuple[tuple[int, ...], ...]] = None
        self.verify()

    def _index(self, v: int, g: int) -> int:
        return v * self.group.order + g

    def project(self, idx: int) -> int:
        return idx // self.group.order

    def deck_of(self, idx: int) -> int:
        return idx % self.group.order

    def fiber(self, v: int) -> list[int]:
        return [self._index(v, g) for g in range(self.group.order)]

    def deck_act(self, h: int, idx: int) -> int:
        v, g = divmod(idx, self.group.order)
        return self._index(v, self.group.mult[h][g])

    def lift_step(self, idx: int, w: int) -> int:
        """The unique neighbor of a cover vertex over base vertex w."""
        v, g = divmod(idx, self.group.order)
        if v == w:
            return idx
        lab = self._step_label.get((v, w))
        if lab is None:
            raise ChainliftError(f"({v},{w}) is not a base edge")
        return self._index(w, self.group.mult[g][lab])

    def verify(self) -> None:
        """Regularity scan: free deck action mapping edges to edges."""
        edge_set = set(self.edges)
        for h in range(1, self.group.order):
            for idx in range(self.n_vertices):
                if self.deck_act(h, idx) == idx:
                    raise ChainliftError("deck action is not free")
            for a, b in self.edges:
                ha, hb = self.deck_act(h, a), self.deck_act(h, b)
                if (min(ha, hb), max(ha, hb)) not in edge_set:
                    raise ChainliftError("deck action does not preserve edges")
        fiber = set(self.fiber(self.base.basepoint))
        orbit = {self.deck_act(h, self.basepoint_index) for h in range(self.group.order)}
        if orbit != fiber:
            raise ChainliftError("deck action is not transitive on the basepoint fiber")

    def hop_table(self) -> tuple[tuple[int, ...], ...]:
        """All-pairs hop distances in the cover graph (-1 when unreachable)."""
        if self._hops is None:
            rows = []
            for src in range(self.n_vertices):
                dist = [-1] * self.n_vertices
                dist[src] = 0
                frontier = [src]
                d = 0
                while frontier:
                    d += 1
                    nxt = []
                    for a in frontier:
                        for b in self.adjacency[a].values():
                            if dist[b] < 0:
                                dist[b] = d
                                nxt.append(b)
                    frontier = nxt
                rows.append(tuple(dist))
            self._hops = tuple(rows)
        return self._hops

    def components(self) -> list[tuple[int, ...]]:
        """Connected components as sorted vertex tuples, by least vertex."""
        seen: set[int] = set()
        comps = []
        for start in range(self.n_vertices):
            if start in seen:
                continue
            comp = {start}
            frontier = [start]
            while frontier:
                nxt = []
                for a in frontier:
                    for b in self.adjacency[a].values():
                        if b not in comp:
                            comp.add(b)
                            nxt.append(b)
                frontier = nxt
            seen |= comp
            comps.append(tuple(sorted(comp)))
        return comps


def build_cover(
    graph: ScaleGraph, presentation: GroupPresentation, hom: GroupHom
) -> CoverGraph:
    """Covering graph of the scale graph determined by the surjection.

    A non-surjective hom still builds, flagged disconnected; restrict with
    components_and_stabilizer.
    """
    return CoverGraph(graph, presentation, hom)


def lift_chain(cover: CoverGraph, chain: Chain, start: int) -> list[int]:
    """The unique stepwise lift of a base chain from a cover vertex."""
    if not cover.base.same_scale(chain.graph):
        raise ChainliftError("chain does not live on the cover's base graph")
    if cover.project(start) != chain.points[0]:
        raise ChainliftError(
            f"start vertex lies over {cover.project(start)}, "
            f"not over the chain start {chain.points[0]}"
        )
    lifted = [start]
    for w in chain.points[1:]:
        lifted.append(cover.lift_step(lifted[-1], w))
    return lifted


def homotopy_lift_check(cover: CoverGraph, alpha: Chain, beta: Chain) -> bool:
    """True iff the lifts from a common start end at the same cover vertex.

    Cross-checked against equality of the chains' word images under the
    cover's hom.
    """
    if alpha.start != beta.start or alpha.end != beta.end:
        raise ChainliftError("chains must share endpoints")
    start = cover._index(alpha.start, 0)
    same_end = lift_chain(cover, alpha, start)[-1] == lift_chain(cover, beta, start)[-1]
    wa = cover.hom.evaluate(chain_to_word(cover.presentation, alpha))
    wb = cover.hom.evaluate(chain_to_word(cover.presentation, beta))
    if same_end != (wa == wb):
        raise ChainliftError("lift endpoints disagree with hom images")
    return same_end


def deck_compatibility_check(cover: CoverGraph, chain: Chain, g: int) -> bool:
    """Lifting from a translated start lands on the translated endpoint."""
    if chain.start != cover.base.basepoint:
        raise ChainliftError("chain must start at the base basepoint")
    start = cover.basepoint_index
    end = lift_chain(cover, chain, start)[-1]
    translated_end = lift_chain(cover, chain, cover.deck_act(g, start))[-1]
    return translated_end == cover.deck_act(g, end)


def root_scale(cover: CoverGraph) -> RootScaleReport:
    """Minimal hop displacement over nontrivial deck elements."""
    if cover.group.order == 1:
        return RootScaleReport(infinite=True)
    hops = cover.hop_table()
    best: Optional[int] = None
    cert: Optional[tuple[int, int, int]] = None
    for g in range(1, cover.group.order):
        for idx in range(cover.n_vertices):
            moved = cover.deck_act(g, idx)
            d = hops[idx][moved]
            if d < 0:
                continue
            if best is None or d < best:
                best, cert = d, (idx, g, moved)
    if best is None:
        return RootScaleReport(infinite=True)
    return RootScaleReport(
        infinite=False,
        min_displacement=best,
        max_root_scale=(best + 1) // 2 - 1,
        certificate=cert,
    )


def evenly_covered_check(cover: CoverGraph, ball_radius: int) -> bool:
    """Do hop balls of this radius lift to disjoint bijective sheets?"""
    if ball_radius < 1:
        raise ChainliftError("ball radius must be at least 1")
    base = cover.base
    n = base.space.n_points
    order = cover.group.order
    edge_set = set(cover.edges)
    for x in range(n):
        dist = {x: 0}
        frontier = [x]
        d = 0
        while frontier and d < ball_radius:
            d += 1
            nxt = []
            for a in frontier:
                for b in base.neighbors(a):
                    if b not in dist:
                        dist[b] = d
                        nxt.append(b)
            frontier = nxt
        ball = set(dist)
        preimage = {idx for v in ball for idx in cover.fiber(v)}
        comps = []
        seen: set[int] = set()
        for s in sorted(preimage):
            if s in seen:
                continue
            comp = {s}
            frontier = [s]
            while frontier:
                nxt = []
                for a in frontier:
                    for b in cover.adjacency[a].values():
                        if b in preimage and b not in comp:
                            comp.add(b)
                            nxt.append(b)
                frontier = nxt
            seen |= comp
            comps.append(comp)
        if len(comps) != order:
            return False
        for comp in comps:
            if len(comp) != len(ball):
                return False
            if {cover.project(idx) for idx in comp} != ball:
                return False
    return True


@dataclass(frozen=True)
class ComponentRecord:
    """One component of a possibly disconnected cover."""

    vertices: tuple[int, ...]
    stabilizer: tuple[int, ...]
    restricted: "CoverGraph"


def components_and_stabilizer(cover: CoverGraph) -> list[ComponentRecord]:
    """Components with stabilizer subgroups and their regular-cover model.

    Component count is the index of the image subgroup; the restricted
    cover is the canonical model built from the hom restricted onto its
    image, shared by every component up to a deck translate.
    """
    image = cover.hom.image_subgroup()
    sub_table, elems = cover.group.subgroup(image)
    pos = {e: i for i, e in enumerate(elems)}
    restricted_hom = GroupHom(
        cover.presentation, sub_table, [pos[x] for x in cover.hom.images]
    )
    restricted = build_cover(cover.base, cover.presentation, restricted_hom)
    records = []
    for comp in cover.components():
        comp_set = set(comp)
        stab = tuple(
            h
            for h in range(cover.group.order)
            if all(cover.deck_act(h, idx) in comp_set for idx in comp)
        )
        records.append(ComponentRecord(comp, stab, restricted))
    expected = cover.group.order // len(image)
    if len(records) != expected:
        raise ChainliftError(
            f"component count {len(records)} != image subgroup index {expected}"
        )
    return records


def induced_quotient(
    cover: CoverGraph, normal_subgroup: Iterable[int]
) -> tuple[CoverGraph, tuple[int, ...]]:
    """Intermediate cover by a normal subgroup of the deck group.

    Returns the intermediate cover and the deck quotient map (element ->
    coset index).  The composite of the two projections equals the
    original projection vertexwise.
    """
    subset = sorted(set(normal_subgroup))
    closed = mulclose(cover.group, subset)
    if closed != subset:
        raise ChainliftError("subset is not a subgroup of the deck group")
    ok, counterexample = cover.group.is_normal(subset)
    if not ok:
        g, k = counterexample
        raise ChainliftError(
            f"subset is not normal: conjugating {k} by {g} gives "
            f"{cover.group.conj(g, k)}"
        )
    quotient, coset_of = cover.group.quotient(subset)
    hom = GroupHom(
        cover.presentation, quotient, [coset_of[x] for x in cover.hom.images]
    )
    intermediate = build_cover(cover.base, cover.presentation, hom)
    deck_map = tuple(coset_of)
    # Vertex map (v, g) -> (v, gK) must send cover edges to intermediate edges.
    edge_set = set(intermediate.edges)
    for a, b in cover.edges:
        va, ga = divmod(a, cover.group.order)
        vb, gb = divmod(b, cover.group.order)
        ia = intermediate._index(va, deck_map[ga])
        ib = intermediate._index(vb, deck_map[gb])
        if ia != ib and (min(ia, ib), max(ia, ib)) not in edge_set:
            raise ChainliftError("induced quotient does not preserve edges")
    return intermediate, deck_map


def equivalence_check(cover1: CoverGraph, cover2: CoverGraph) -> bool:
    """Kernel equality of the two surjections.

    Decided by attempting to build the compatibility isomorphism between
    the deck groups that matches generator images; for catalog targets
    this agrees with scanning the automorphism list.
    """
    if not cover1.base.same_scale(cover2.base):
        raise ChainliftError("covers must share the base scale graph and basepoint")
    g1, g2 = cover1.group, cover2.group
    if len(cover1.hom.image_subgroup()) != len(cover2.hom.image_subgroup()):
        return False
    sigma = {0: 0}
    pairs = list(zip(cover1.hom.images, cover2.hom.images))
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for a, b in frontier:
            for x, y in pairs:
                ax, by = g1.mult[a][x], g2.mult[b][y]
                if ax in sigma:
                    if sigma[ax] != by:
                        return False
                else:
                    sigma[ax] = by
                    nxt.append((ax, by))
        frontier = nxt
    if len(set(sigma.values())) != len(sigma):
        return False
    for a in sigma:
        for b in sigma:
            if sigma[g1.mult[a][b]] != g2.mult[sigma[a]][sigma[b]]:
                return False
    return True


def bonding_map(
    finer: CoverGraph, coarser: CoverGraph
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Deck surjection and vertex map from a finer cover onto a coarser one.

    Exists iff the finer kernel is contained in the coarser one; the maps
    satisfy vertex_map(g . w) = theta(g) . vertex_map(w) and commute with
    the projections to the base.
    """
    if not finer.base.same_scale(coarser.base):
        raise ChainliftError("covers must share the base scale graph and basepoint")
    gf, gc = finer.group, coarser.group
    theta = {0: 0}
    pairs = list(zip(finer.hom.images, coarser.hom.images))
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for a, b in frontier:
            for x, y in pairs:
                ax, by = gf.mult[a][x], gc.mult[b][y]
                if ax in theta:
                    if theta[ax] != by:
                        raise ChainliftError(
                            "no bonding map: finer kernel is not contained "
                            "in the coarser kernel"
                        )
                else:
                    theta[ax] = by
                    nxt.append((ax, by))
        frontier = nxt
    if len(theta) != gf.order:
        raise ChainliftError("bonding map needs a surjective finer hom")
    theta_t = tuple(theta[g] for g in range(gf.order))
    if set(theta_t) != set(range(gc.order)):
        raise ChainliftError("bonding deck map is not surjective")
    vertex_map = tuple(
        coarser._index(finer.project(idx), theta_t[finer.deck_of(idx)])
        for idx in range(finer.n_vertices)
    )
    edge_set = set(coarser.edges)
    for a, b in finer.edges:
        ia, ib = vertex_map[a], vertex_map[b]
        if ia != ib and (min(ia, ib), max(ia, ib)) not in edge_set:
            raise ChainliftError("bonding vertex map does not preserve edges")
    for g in range(gf.order):
        for idx in range(finer.n_vertices):
            if vertex_map[finer.deck_act(g, idx)] != coarser.deck_act(
                theta_t[g], vertex_map[idx]
            ):
                raise ChainliftError("bonding maps violate deck compatibility")
    return theta_t, vertex_map


def cover_to_scale_graph(cover: CoverGraph, epsilon: float = 1.5) -> ScaleGraph:
    """The cover as a scale graph in its own hop metric.

    Vertex i of the result is cover vertex i; any epsilon in (1, 2)
    reproduces exactly the cover edges.
    """
    hops = cover.hop_table()
    if any(d < 0 for row in hops for d in row):
        raise ChainliftError("cover is disconnected; restrict to a component first")
    dist = [[float(d) for d in row] for row in hops]
    space = FiniteMetricSpace(dist, GRAPH_HOP, basepoint=cover.basepoint_index)
    return build_scale_graph(space, epsilon, cover.basepoint_index)


def compose_covers(upper: CoverGraph, lower: CoverGraph) -> CoverGraph:
    """Composite of a cover over a cover as a single cover of the base.

    ``upper`` must be built over ``cover_to_scale_graph(lower)`` (vertex i
    of its base is lower vertex i).  The composite deck group has order
    |upper deck| * |lower deck|, contains the upper deck group as the
    kernel of the explicit deck surjection onto the lower deck group, and
    is realized by path lifting in the composite graph.
    """
    n_lower = lower.n_vertices
    if upper.base.space.n_points != n_lower:
        raise ChainliftError("upper base does not match the lower total graph")
    if set(upper.base.edges) != set(lower.edges):
        raise ChainliftError("upper base edges do not match the lower total graph")
    if upper.base.basepoint != lower.basepoint_index:
        raise ChainliftError("basepoints of the tower stages do not match")

    def proj(idx: int) -> int:
        return lower.project(upper.project(idx))

    # Unique-lift lookup: composite vertex x base neighbor -> composite vertex.
    step: list[dict[int, int]] = [dict() for _ in range(upper.n_vertices)]
    for a in range(upper.n_vertices):
        for b in upper.adjacency[a].values():
            w = proj(b)
            if w in step[a]:
                raise ChainliftError("composite is not a graph covering")
            step[a][w] = b

    base_bp = lower.base.basepoint
    fiber = [upper.basepoint_index] + sorted(
        idx
        for idx in range(upper.n_vertices)
        if proj(idx) == base_bp and idx != upper.basepoint_index
    )

    # Breadth-first tree of the composite graph, deterministic order.
    parent: dict[int, int] = {}
    order = [upper.basepoint_index]
    seen = {upper.basepoint_index}
    for a in order:
        for b in sorted(upper.adjacency[a].values()):
            if b not in seen:
                seen.add(b)
                parent[b] = a
                order.append(b)
    if len(seen) != upper.n_vertices:
        raise ChainliftError("composite cover is disconnected")

    def deck_from(z: int) -> tuple[int, ...]:
        out = [-1] * upper.n_vertices
        out[upper.basepoint_index] = z
        for w in order[1:]:
            out[w] = step[out[parent[w]]][proj(w)]
        return tuple(out)

    maps = [deck_from(z) for z in fiber]
    pos = {m[upper.basepoint_index]: i for i, m in enumerate(maps)}
    upper_edges = set(
        (min(a, b), max(a, b))
        for a in range(upper.n_vertices)
        for b in upper.adjacency[a].values()
    )
    for m in maps:
        if len(set(m)) != upper.n_vertices:
            raise ChainliftError("composite deck candidate is not a bijection")
        for idx in range(upper.n_vertices):
            if proj(m[idx]) != proj(idx):
                raise ChainliftError("composite deck candidate moves fibers")
        for a, b in upper_edges:
            if (min(m[a], m[b]), max(m[a], m[b])) not in upper_edges:
                raise ChainliftError("composite deck candidate breaks edges")
    mult = [[0] * len(maps) for _ in range(len(maps))]
    for i, mi in enumerate(maps):
        for j, mj in enumerate(maps):
            k = pos[mi[mj[upper.basepoint_index]]]
            if tuple(mi[mj[idx]] for idx in range(upper.n_vertices)) != maps[k]:
                raise ChainliftError("composite deck transformations do not close")
            mult[i][j] = k
    table = FiniteGroupTable(
        f"{upper.group.name}.{lower.group.name}", mult
    )
    table.validate()

    # Deck surjection onto the lower deck group, kernel = upper deck group.
    theta = tuple(lower.deck_of(upper.project(z)) for z in fiber)
    for i in range(len(maps)):
        for j in range(len(maps)):
            if theta[mult[i][j]] != lower.group.mult[theta[i]][theta[j]]:
                raise ChainliftError("deck surjection onto the lower deck fails")
    if set(theta) != set(range(lower.group.order)):
        raise ChainliftError("deck surjection onto the lower deck is not onto")
    kernel = [i for i, t in enumerate(theta) if t == 0]
    if len(kernel) != upper.group.order:
        raise ChainliftError("kernel of the deck surjection has the wrong order")
    for i in kernel:
        h = upper.deck_of(fiber[i])
        if maps[i] != tuple(
            upper.deck_act(h, idx) for idx in range(upper.n_vertices)
        ):
            raise ChainliftError("kernel does not realize the upper deck group")

    # Holonomy of the base presentation generators in the composite.
    images = []
    for i in range(lower.presentation.rank):
        loop = lower.presentation.generator_loop(i)
        at = upper.basepoint_index
        for prev, w in zip(loop, loop[1:]):
            if prev == w:
                continue
            at = step[at][w]
        images.append(pos[at])
    hom = GroupHom(lower.presentation, table, images)
    composite = build_cover(lower.base, lower.presentation, hom)
    if not composite.connected:
        raise ChainliftError("composite holonomy does not generate the deck group")
    return composite


def cover_to_dot(cover: CoverGraph) -> str:
    """DOT rendering with deck orbits colored by group element index."""
    order = cover.group.order
    lines = ["graph cover {"]
    for idx in range(cover.n_vertices):
        v, g = divmod(idx, order)
        hue = g / order
        lines.append(f'  "v{v}_g{g}" [color="{hue:.4f} 1.0 0.8"];')
    for a, b in cover.edges:
        va, ga = divmod(a, order)
        vb, gb = divmod(b, order)
        lines.append(f'  "v{va}_g{ga}" -- "v{vb}_g{gb}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
