"""Chains at a scale, basic moves, and scale-graph fundamental groups.

The group of homotopy classes of loops at a scale is presented from the
scale graph: a breadth-first spanning tree rooted at the basepoint, one
generator per non-tree edge, and one relator per triangle.  Basic moves
(insert or remove one interior chain point) become triangle relators, so
homotopic chains map to equal elements of the presented group; on
triangle-free graphs the freely reduced word is a complete invariant.

No word-problem solver is attempted: equality of classes is decided
exactly in the relator-free case and otherwise soundly through the
abelianization and through finite quotients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import ChainliftError, ChainValidationError, DisconnectedGraphError
from .space import ScaleGraph, build_scale_graph


@dataclass(frozen=True)
class Word:
    """Freely reduced word in presentation generators.

    ``letters`` is a tuple of (generator index, exponent) with exponent
    +1 or -1 and no adjacent inverse pairs.
    """

    letters: tuple[tuple[int, int], ...]
    reduced: bool = True

    @staticmethod
    def from_letters(letters: Iterable[tuple[int, int]]) -> "Word":
        stack: list[tuple[int, int]] = []
        for sym, exp in letters:
            if stack and stack[-1][0] == sym and stack[-1][1] == -exp:
                stack.pop()
            else:
                stack.append((sym, exp))
        return Word(tuple(stack))

    @staticmethod
    def identity() -> "Word":
        return Word(())

    def __mul__(self, other: "Word") -> "Word":
        return Word.from_letters(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((s, -e) for s, e in reversed(self.letters)))

    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def format(self, symbols: Sequence[str]) -> str:
        return " ".join(
            symbols[s] if e == 1 else f"{symbols[s]}^-1" for s, e in self.letters
        )


@dataclass(frozen=True)
class Chain:
    """A point sequence whose consecutive pairs are edges or repeats."""

    graph: ScaleGraph
    points: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ChainliftError("a chain needs at least one point")
        for i in range(len(self.points) - 1):
            p, q = self.points[i], self.points[i + 1]
            if not self.graph.step_ok(p, q):
                raise ChainValidationError("not a chain at this scale", i, (p, q))

    @property
    def start(self) -> int:
        return self.points[0]

    @property
    def end(self) -> int:
        return self.points[-1]

    def is_loop(self) -> bool:
        return self.start == self.end

    def reversed(self) -> "Chain":
        return Chain(self.graph, tuple(reversed(self.points)))


def validate_chain(graph: ScaleGraph, points: Sequence[int]) -> Chain:
    """Wrap a point list as a chain, reporting the first offending pair."""
    for p in points:
        if not (0 <= p < graph.space.n_points):
            raise ChainliftError(f"{p} is not a point index")
    return Chain(graph, tuple(points))


@dataclass(frozen=True)
class BasicMove:
    """Insert or remove a single interior chain point."""

    kind: str  # "insert" | "remove"
    position: int
    point: Optional[int] = None


def apply_basic_move(chain: Chain, move: BasicMove) -> Chain:
    """Apply one basic move; endpoints are never altered."""
    pts = chain.points
    n = len(pts)
    if move.kind == "insert":
        if not 1 <= move.position <= n - 1:
            raise ChainliftError(
                f"insert position {move.position} would alter an endpoint"
            )
        if move.point is None:
            raise ChainliftError("insert move needs a point")
        new_pts = pts[: move.position] + (move.point,) + pts[move.position :]
    elif move.kind == "remove":
        if not 1 <= move.position <= n - 2:
            raise ChainliftError(
                f"remove position {move.position} would alter an endpoint"
            )
        new_pts = pts[: move.position] + pts[move.position + 1 :]
    else:
        raise ChainliftError(f"unknown move kind {move.kind!r}")
    return Chain(chain.graph, new_pts)


class GroupPresentation:
    """Presentation of the loop group of a connected scale graph."""

    def __init__(self, graph: ScaleGraph):
        from .space import is_chain_connected

        if not is_chain_connected(graph):
            raise DisconnectedGraphError(
                "scale graph is disconnected; restrict to a chain component "
                "of the basepoint"
            )
        self.graph = graph
        self.basepoint = graph.basepoint
        self.tree_parent: dict[int, int] = {}
        order = [self.basepoint]
        seen = {self.basepoint}
        for v in order:
            for w in graph.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    self.tree_parent[w] = v
                    order.append(w)
        self.tree_edges = {
            (min(v, p), max(v, p)) for v, p in self.tree_parent.items()
        }
        self.generators: tuple[tuple[int, int], ...] = tuple(
            e for e in graph.edges if e not in self.tree_edges
        )
        self._gen_index = {e: i for i, e in enumerate(self.generators)}
        self.symbols = tuple(f"g{i + 1}" for i in range(len(self.generators)))
        self.relators: tuple[Word, ...] = tuple(self._triangle_relators())

    @property
    def rank(self) -> int:
        return len(self.generators)

    def step_letter(self, p: int, q: int) -> Optional[tuple[int, int]]:
        """Generator letter of one chain step; None for repeats and tree edges."""
        if p == q:
            return None
        e = (min(p, q), max(p, q))
        if e in self.tree_edges:
            return None
        idx = self._gen_index.get(e)
        if idx is None:
            raise ChainValidationError("step is not an edge of the scale graph", 0, (p, q))
        return (idx, 1 if p < q else -1)

    def _triangle_relators(self) -> list[Word]:
        adjacency = {v: set(self.graph.neighbors(v)) for v in self.graph.vertices}
        relators = []
        for a, b in self.graph.edges:
            for c in sorted(adjacency[a] & adjacency[b]):
                if c <= b:
                    continue
                letters = []
                for p, q in ((a, b), (b, c), (c, a)):
                    letter = self.step_letter(p, q)
                    if letter is not None:
                        letters.append(letter)
                word = Word.from_letters(letters)
                if not word.is_identity():
                    relators.append(word)
        return relators

    def tree_path(self, v: int) -> list[int]:
        """Vertices of the tree path from the basepoint to v."""
        path = [v]
        while path[-1] != self.basepoint:
            path.append(self.tree_parent[path[-1]])
        path.reverse()
        return path

    def generator_loop(self, i: int) -> list[int]:
        """The loop at the basepoint realizing generator i as a chain."""
        u, v = self.generators[i]
        return self.tree_path(u) + list(reversed(self.tree_path(v)))

    def export_text(self) -> str:
        lines = ["gens: " + " ".join(self.symbols) if self.symbols else "gens:"]
        for rel in self.relators:
            lines.append("rel: " + rel.format(self.symbols))
        return "\n".join(lines) + "\n"


def presentation_at_scale(graph: ScaleGraph) -> GroupPresentation:
    """Spanning-tree presentation of the loop group at this scale."""
    return GroupPresentation(graph)


def chain_to_word(presentation: GroupPresentation, chain: Chain) -> Word:
    """Freely reduced word of a chain (tree-conjugated for non-loops).

    Tree edges carry no letter, so conjugating by tree paths to and from
    the basepoint is already implicit.
    """
    if not presentation.graph.same_scale(chain.graph):
        raise ChainliftError("chain and presentation use different scale graphs")
    letters = []
    for i in range(len(chain.points) - 1):
        letter = presentation.step_letter(chain.points[i], chain.points[i + 1])
        if letter is not None:
            letters.append(letter)
    return Word.from_letters(letters)


# -- abelianization ----------------------------------------------------------


def _smith_invariants(rows: list[list[int]], ncols: int) -> list[int]:
    """Nonzero diagonal of the Smith normal form (divisibility-ordered)."""
    m = [row[:] for row in rows if any(row)]
    diag: list[int] = []
    t = 0
    while m and t < ncols:
        pivot = None
        best = None
        for i in range(len(m)):
            for j in range(t, ncols):
                v = abs(m[i][j])
                if v and (best is None or v < best):
                    best, pivot = v, (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        m[0], m[pi] = m[pi], m[0]
        for row in m:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = m[0][t]
            done = True
            for i in range(1, len(m)):
                if m[i][t]:
                    q = m[i][t] // p
                    m[i] = [a - q * b for a, b in zip(m[i], m[0])]
                    if m[i][t]:
                        m[0], m[i] = m[i], m[0]
                        done = False
                        break
            if not done:
                continue
            for j in range(t + 1, ncols):
                if m[0][j]:
                    q = m[0][j] // p
                    for row in m:
                        row[j] -= q * row[t]
                    if m[0][j]:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        done = False
                        break
            if done:
                break
        diag.append(abs(m[0][t]))
        m = m[1:]
        m = [row for row in m if any(row)]
        t += 1
    # Normalize to a divisibility chain: diag(a, b) ~ diag(gcd, lcm).
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            a, b = diag[i], diag[j]
            g = gcd(a, b)
            diag[i], diag[j] = g, a * b // g
    return diag


def abelianization(presentation: GroupPresentation) -> list[int]:
    """Invariant factors of the abelianized group.

    Torsion coefficients in divisibility order followed by one 0 per
    free factor, e.g. [0] for the free group of rank 1 and [2] for the
    group with a single generator g and relator g^2.
    """
    return abelian_invariants(presentation.rank, presentation.relators)


def abelian_invariants(rank: int, relators: Sequence[Word]) -> list[int]:
    rows = []
    for rel in relators:
        row = [0] * rank
        for sym, exp in rel.letters:
            row[sym] += exp
        rows.append(row)
    diag = _smith_invariants(rows, rank)
    torsion = [d for d in diag if d > 1]
    free_rank = rank - len(diag)
    return torsion + [0] * free_rank


def free_rank(invariants: Sequence[int]) -> int:
    return sum(1 for d in invariants if d == 0)


def torsion(invariants: Sequence[int]) -> list[int]:
    return [d for d in invariants if d != 0]


# -- scale-to-scale maps -------------------------------------------------------


@dataclass(frozen=True)
class ScaleMapRecord:
    """Images of fine-scale generators as coarse-scale words.

    Records the downward map between loop groups when every fine-scale
    edge is also a coarse-scale edge.
    """

    fine_epsilon: float
    coarse_epsilon: float
    generator_images: tuple[Word, ...]

    def apply(self, word: Word) -> Word:
        """Push a fine-scale word through to the coarse scale."""
        out = Word.identity()
        for sym, exp in word.letters:
            img = self.generator_images[sym]
            out = out * (img if exp == 1 else img.inverse())
        return out


def scale_map(
    fine: GroupPresentation, coarse: GroupPresentation
) -> ScaleMapRecord:
    """Re-express each fine generator loop in the coarse presentation."""
    if fine.graph.space is not coarse.graph.space:
        raise ChainliftError("scale map needs presentations over one space")
    if fine.basepoint != coarse.basepoint:
        raise ChainliftError("scale map needs a common basepoint")
    if fine.graph.epsilon > coarse.graph.epsilon:
        raise ChainliftError("fine scale must not exceed coarse scale")
    images = []
    for i in range(fine.rank):
        loop = Chain(coarse.graph, tuple(fine.generator_loop(i)))
        images.append(chain_to_word(coarse, loop))
    return ScaleMapRecord(
        fine.graph.epsilon, coarse.graph.epsilon, tuple(images)
    )


# -- explicit homotopies --------------------------------------------------------


def close_chain_homotopy(
    alpha: Chain, beta: Chain, witness_scale: float
) -> list[BasicMove]:
    """Interleaving move sequence from alpha to beta at a coarser scale.

    The chains must share endpoints and length (pad by duplicating
    points) and be pointwise within their own scale.  Every intermediate
    sequence is validated as a chain at ``witness_scale``; the move list
    is empty when the chains already agree.
    """
    ga, gb = alpha.graph, beta.graph
    if ga.space is not gb.space or ga.epsilon != gb.epsilon:
        raise ChainliftError("chains live at different scales")
    if alpha.start != beta.start or alpha.end != beta.end:
        raise ChainliftError("chains must share endpoints")
    if len(alpha.points) != len(beta.points):
        raise ChainliftError("chains must share length; pad by duplicating points")
    for i, (p, q) in enumerate(zip(alpha.points, beta.points)):
        if not ga.space.closer_than(p, q, ga.epsilon):
            raise ChainliftError(
                f"chains are not pointwise close at position {i}: ({p},{q})"
            )
    if alpha.points == beta.points:
        return []
    witness = build_scale_graph(ga.space, witness_scale, ga.basepoint)
    current = Chain(witness, alpha.points)
    moves: list[BasicMove] = []
    for i in range(1, len(alpha.points) - 1):
        insert = BasicMove("insert", i, beta.points[i])
        current = apply_basic_move(current, insert)
        remove = BasicMove("remove", i + 1)
        current = apply_basic_move(current, remove)
        moves.extend((insert, remove))
    if current.points != beta.points:
        raise ChainliftError("move replay did not terminate at the target chain")
    return moves


# -- net-loop generator harvest ---------------------------------------------------


def net_generators(
    graph_fine: ScaleGraph, graph_coarse: ScaleGraph, net: Sequence[int]
) -> list[Word]:
    """Coarse-scale words of short net-center loops.

    Centers within three fine-scale hops are linked; every non-tree link
    of the resulting net graph yields a loop (out along the spanning
    tree, across the link, back along the tree) of at most 2*|net|+1
    points.  Loop words generate the image of the fine-scale loop group
    in the coarse presentation.  Requires the fine scale to be at most a
    sixth of the coarse scale and the net to cover the space.
    """
    space = graph_fine.space
    if space is not graph_coarse.space:
        raise ChainliftError("scale graphs must share one space")
    if Fraction(graph_fine.epsilon) * 6 > Fraction(graph_coarse.epsilon):
        raise ChainliftError("fine scale must be at most coarse scale / 6")
    centers = sorted(set(net))
    for c in centers:
        if not (0 <= c < space.n_points):
            raise ChainliftError(f"net center {c} is not a point index")
    basepoint = graph_coarse.basepoint
    if basepoint not in centers:
        raise ChainliftError("net must include the basepoint")
    for p in space.points:
        if not any(space.closer_than(p, c, graph_fine.epsilon) for c in centers):
            raise ChainliftError(f"net does not cover point {p} at the fine scale")

    presentation = presentation_at_scale(graph_coarse)
    links: dict[int, list[int]] = {}
    center_set = set(centers)
    for u in centers:
        hood = graph_fine.hop_neighborhood(u, 3)
        links[u] = sorted(v for v in hood if v != u and v in center_set)

    parent: dict[int, int] = {}
    order = [basepoint]
    seen = {basepoint}
    for v in order:
        for w in links[v]:
            if w not in seen:
                seen.add(w)
                parent[w] = v
                order.append(w)

    def path(v: int) -> list[int]:
        out = [v]
        while out[-1] != basepoint:
            out.append(parent[out[-1]])
        out.reverse()
        return out

    tree_links = {(min(v, p), max(v, p)) for v, p in parent.items()}
    words = set()
    for u in centers:
        if u not in seen:
            continue
        for v in links[u]:
            if v <= u or (u, v) in tree_links:
                continue
            if v not in seen:
                continue
            loop = path(u) + list(reversed(path(v)))
            word = chain_to_word(presentation, Chain(graph_coarse, tuple(loop)))
            if not word.is_identity():
                words.add(word.letters)
    return [Word(w) for w in sorted(words, key=lambda w: (len(w), w))]
