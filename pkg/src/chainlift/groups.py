"""Finite groups as explicit multiplication tables.

Elements are indices 0..order-1 with the identity always at index 0.
Tables are small (catalog bound is order 16), so every structural
question is answered by a full scan.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Optional, Sequence


class FiniteGroupTable:
    """A finite group given by its full multiplication table.

    ``mult[a][b]`` is the product, index 0 is the identity.  The complete
    automorphism list is computed lazily and cached.
    """

    def __init__(self, name: str, mult: Sequence[Sequence[int]]):
        self.name = name
        self.mult = tuple(tuple(row) for row in mult)
        self.order = len(self.mult)
        self.inverse = self._compute_inverses()
        self._automorphisms: Optional[list[tuple[int, ...]]] = None
        self._orders: Optional[tuple[int, ...]] = None

    def __repr__(self) -> str:
        return f"FiniteGroupTable({self.name!r}, order={self.order})"

    def _compute_inverses(self) -> tuple[int, ...]:
        inv = [-1] * self.order
        for a in range(self.order):
            for b in range(self.order):
                if self.mult[a][b] == 0:
                    inv[a] = b
                    break
            if inv[a] < 0:
                raise ValueError(f"{self.name}: element {a} has no inverse")
        return tuple(inv)

    def mul(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, g: int, a: int) -> int:
        """g * a * g^-1."""
        return self.mult[self.mult[g][a]][self.inverse[g]]

    def validate(self) -> None:
        """Full-scan check of the group axioms."""
        n = self.order
        for a in range(n):
            if self.mult[0][a] != a or self.mult[a][0] != a:
                raise ValueError(f"{self.name}: index 0 is not an identity")
            if sorted(self.mult[a]) != list(range(n)):
                raise ValueError(f"{self.name}: row {a} is not a permutation")
        for a in range(n):
            for b in range(n):
                ab = self.mult[a][b]
                for c in range(n):
                    if self.mult[ab][c] != self.mult[a][self.mult[b][c]]:
                        raise ValueError(
                            f"{self.name}: associativity fails at ({a},{b},{c})"
                        )

    def element_order(self, a: int) -> int:
        x, k = a, 1
        while x != 0:
            x = self.mult[x][a]
            k += 1
        return k

    def element_orders(self) -> tuple[int, ...]:
        if self._orders is None:
            self._orders = tuple(self.element_order(a) for a in range(self.order))
        return self._orders

    def order_profile(self) -> tuple[tuple[int, int], ...]:
        """Sorted (element order, multiplicity) pairs; an isomorphism invariant."""
        counts: dict[int, int] = {}
        for o in self.element_orders():
            counts[o] = counts.get(o, 0) + 1
        return tuple(sorted(counts.items()))

    def is_abelian(self) -> bool:
        return all(
            self.mult[a][b] == self.mult[b][a]
            for a in range(self.order)
            for b in range(a + 1, self.order)
        )

    def center(self) -> list[int]:
        return [
            a
            for a in range(self.order)
            if all(self.mult[a][b] == self.mult[b][a] for b in range(self.order))
        ]

    def derived_subgroup(self) -> list[int]:
        comms = {
            self.mult[self.mult[a][b]][self.mult[self.inverse[a]][self.inverse[b]]]
            for a in range(self.order)
            for b in range(self.order)
        }
        return mulclose(self, comms)

    def invariant_key(self) -> tuple:
        """Cheap isomorphism invariants used to separate catalog entries."""
        derived = self.derived_subgroup()
        center = self.center()
        center_profile = tuple(sorted(self.element_order(a) for a in center))
        quotient, _ = self.quotient(derived)
        return (
            self.order,
            self.is_abelian(),
            self.order_profile(),
            len(center),
            center_profile,
            len(derived),
            quotient.order_profile(),
        )

    # -- substructures ----------------------------------------------------

    def subgroup(self, elements: Iterable[int]) -> tuple["FiniteGroupTable", list[int]]:
        """Reindexed table of a subgroup; returns (table, element list).

        The element list maps new indices to indices in this group, with
        the identity first.
        """
        elems = sorted(set(elements))
        if not elems or elems[0] != 0:
            raise ValueError("subgroup must contain the identity")
        pos = {e: i for i, e in enumerate(elems)}
        for a in elems:
            if self.inverse[a] not in pos:
                raise ValueError(f"subset not closed under inversion at {a}")
            for b in elems:
                if self.mult[a][b] not in pos:
                    raise ValueError(f"subset not closed under product at ({a},{b})")
        mult = [[pos[self.mult[a][b]] for b in elems] for a in elems]
        return FiniteGroupTable(f"{self.name}|sub{len(elems)}", mult), elems

    def is_normal(self, elements: Iterable[int]) -> tuple[bool, Optional[tuple[int, int]]]:
        """Check normality; on failure return a conjugation counterexample (g, k)."""
        subset = set(elements)
        for g in range(self.order):
            for k in subset:
                if self.conj(g, k) not in subset:
                    return False, (g, k)
        return True, None

    def quotient(self, normal: Iterable[int]) -> tuple["FiniteGroupTable", list[int]]:
        """Quotient by a normal subgroup; returns (table, coset index per element).

        Cosets are ordered by their least member, so the identity coset
        keeps index 0.
        """
        sub = sorted(set(normal))
        seen: dict[int, int] = {}
        cosets: list[list[int]] = []
        for g in range(self.order):
            if g in seen:
                continue
            coset = sorted(self.mult[g][k] for k in sub)
            idx = len(cosets)
            cosets.append(coset)
            for x in coset:
                seen[x] = idx
        order_pairs = sorted(range(len(cosets)), key=lambda i: cosets[i][0])
        relabel = {old: new for new, old in enumerate(order_pairs)}
        coset_of = [relabel[seen[g]] for g in range(self.order)]
        reps = [0] * len(cosets)
        for old, new in relabel.items():
            reps[new] = cosets[old][0]
        mult = [
            [coset_of[self.mult[a][b]] for b in reps]
            for a in reps
        ]
        return FiniteGroupTable(f"{self.name}/{len(sub)}", mult), coset_of

    # -- automorphisms -----------------------------------------------------

    def generating_sequence(self) -> list[int]:
        """Greedy minimal generating sequence (deterministic)."""
        gens: list[int] = []
        closure = {0}
        while len(closure) < self.order:
            g = min(a for a in range(self.order) if a not in closure)
            gens.append(g)
            closure = set(mulclose(self, closure | {g}))
        return gens

    def automorphisms(self) -> list[tuple[int, ...]]:
        """The complete automorphism list, each a permutation tuple."""
        if self._automorphisms is None:
            self._automorphisms = [
                tuple(m) for m in _isomorphisms(self, self, all_maps=True)
            ]
            self._automorphisms.sort()
        return self._automorphisms


def mulclose(group: FiniteGroupTable, seed: Iterable[int]) -> list[int]:
    """Closure of a subset under multiplication (sorted; always contains 0)."""
    els = set(seed) | {0}
    frontier = list(els)
    while frontier:
        nxt = []
        for a in list(els):
            for b in frontier:
                c = group.mult[a][b]
                if c not in els:
                    els.add(c)
                    nxt.append(c)
                c = group.mult[b][a]
                if c not in els:
                    els.add(c)
                    nxt.append(c)
        frontier = nxt
    return sorted(els)


def _expression_table(
    group: FiniteGroupTable, gens: Sequence[int]
) -> tuple[list[tuple[int, int]], list[int]]:
    """Per element a (parent, generator position) pair, plus discovery order.

    Entry for the identity is (-1, -1); every other element is
    parent * gens[pos] for a parent discovered earlier.
    """
    expr: dict[int, tuple[int, int]] = {0: (-1, -1)}
    discovery = [0]
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for i, g in enumerate(gens):
                b = group.mult[a][g]
                if b not in expr:
                    expr[b] = (a, i)
                    discovery.append(b)
                    nxt.append(b)
        frontier = nxt
    if len(expr) != group.order:
        raise ValueError("sequence does not generate the group")
    return [expr[a] for a in range(group.order)], discovery


def _isomorphisms(a: FiniteGroupTable, b: FiniteGroupTable, all_maps: bool):
    """Isomorphisms a -> b as element maps; empty when none exist."""
    results: list[list[int]] = []
    if a.order != b.order:
        return results
    gens = a.generating_sequence()
    if not gens:
        return [[0]]
    expr, discovery = _expression_table(a, gens)
    orders_a = [a.element_order(g) for g in gens]
    candidates = [
        [y for y in range(b.order) if b.element_order(y) == o] for o in orders_a
    ]
    for images in product(*candidates):
        phi = [-1] * a.order
        phi[0] = 0
        for x in discovery[1:]:
            parent, pos = expr[x]
            phi[x] = b.mult[phi[parent]][images[pos]]
        if len(set(phi)) != a.order:
            continue
        ok = True
        for x in range(a.order):
            for i in range(len(gens)):
                if phi[a.mult[x][gens[i]]] != b.mult[phi[x]][images[i]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            results.append(phi)
            if not all_maps:
                return results
    return results


def find_isomorphism(a: FiniteGroupTable, b: FiniteGroupTable) -> Optional[list[int]]:
    """An isomorphism a -> b as an element map, or None."""
    if a.order != b.order or a.order_profile() != b.order_profile():
        return None
    maps = _isomorphisms(a, b, all_maps=False)
    return maps[0] if maps else None


def is_isomorphic(a: FiniteGroupTable, b: FiniteGroupTable) -> bool:
    return find_isomorphism(a, b) is not None


# -- constructions ---------------------------------------------------------


def cyclic_group(n: int, name: Optional[str] = None) -> FiniteGroupTable:
    if n <= 0:
        raise ValueError("order must be positive")
    mult = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroupTable(name or f"C{n}", mult)


def direct_product(
    a: FiniteGroupTable, b: FiniteGroupTable, name: Optional[str] = None
) -> FiniteGroupTable:
    """Product group with elements packed as i*|b| + j (identity stays at 0)."""
    nb = b.order
    size = a.order * nb
    mult = [[0] * size for _ in range(size)]
    for (i, j), (k, l) in product(
        product(range(a.order), range(nb)), repeat=2
    ):
        mult[i * nb + j][k * nb + l] = a.mult[i][k] * nb + b.mult[j][l]
    return FiniteGroupTable(name or f"{a.name}x{b.name}", mult)


def semidirect_cyclic(
    n: int, m: int, r: int, name: Optional[str] = None
) -> FiniteGroupTable:
    """C_n : C_m with the generator of C_m acting by a -> a^r.

    Elements a^i b^j are packed as i + n*j.  Requires r^m = 1 mod n.
    """
    if pow(r, m, n) != 1 % n:
        raise ValueError(f"r={r} does not define an order-{m} action on C{n}")
    powers = [pow(r, j, n) for j in range(m)]
    size = n * m
    mult = [[0] * size for _ in range(size)]
    for i, j, k, l in product(range(n), range(m), range(n), range(m)):
        mult[i + n * j][k + n * l] = (i + k * powers[j]) % n + n * ((j + l) % m)
    return FiniteGroupTable(name or f"C{n}:C{m}", mult)


def dihedral_group(n: int) -> FiniteGroupTable:
    """Symmetries of the n-gon (order 2n)."""
    return semidirect_cyclic(n, 2, n - 1, name=f"D{n}")


def dicyclic_group(n: int, name: Optional[str] = None) -> FiniteGroupTable:
    """Dicyclic group of order 4n: <a,b | a^(2n), b^2 = a^n, b a b^-1 = a^-1>."""
    two_n = 2 * n
    size = 4 * n
    mult = [[0] * size for _ in range(size)]
    for i, j, k, l in product(range(two_n), range(2), range(two_n), range(2)):
        if j == 0:
            res = ((i + k) % two_n, l)
        elif l == 0:
            res = ((i - k) % two_n, 1)
        else:
            res = ((i - k + n) % two_n, 0)
        mult[i + two_n * j][k + two_n * l] = res[0] + two_n * res[1]
    return FiniteGroupTable(name or f"Dic{n}", mult)


def from_permutation_gens(
    gens: Sequence[Sequence[int]], name: str
) -> FiniteGroupTable:
    """Group generated by permutations (as tuples acting on 0..d-1)."""
    degree = len(gens[0])
    identity = tuple(range(degree))
    els = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(p[g[i]] for i in range(degree))
                if q not in els:
                    els.add(q)
                    nxt.append(q)
        frontier = nxt
    ordered = [identity] + sorted(els - {identity})
    pos = {p: i for i, p in enumerate(ordered)}
    mult = [
        [pos[tuple(p[q[i]] for i in range(degree))] for q in ordered]
        for p in ordered
    ]
    return FiniteGroupTable(name, mult)


def alternating4() -> FiniteGroupTable:
    return from_permutation_gens([(1, 2, 0, 3), (1, 0, 3, 2)], "A4")


def _pauli16() -> FiniteGroupTable:
    """Central product D4 o C4: (D4 x C4) / <(r^2, z^2)>."""
    d4 = dihedral_group(4)
    big = direct_product(d4, cyclic_group(4))
    # r = a^1 b^0 in D4 packs to 1; r^2 packs to 2; z^2 is 2 in C4.
    glue = big.mult[2 * 4 + 0][0 * 4 + 2]  # (r^2, e) * (e, z^2) = (r^2, z^2)
    q, _ = big.quotient([0, glue])
    q.name = "C4oD4"
    return q


def _sg16_3() -> FiniteGroupTable:
    """(C4 x C2) : C2 where the involution sends a -> a*b, b -> b."""
    size = 16
    mult = [[0] * size for _ in range(size)]

    def phi(x: tuple[int, int]) -> tuple[int, int]:
        return (x[0], (x[0] + x[1]) % 2)

    def pack(x: tuple[int, int], j: int) -> int:
        return x[0] + 4 * x[1] + 8 * j

    for i, k, j in product(range(4), range(2), range(2)):
        for i2, k2, j2 in product(range(4), range(2), range(2)):
            y = (i2, k2)
            if j == 1:
                y = phi(y)
            prod_base = ((i + y[0]) % 4, (k + y[1]) % 2)
            mult[pack((i, k), j)][pack((i2, k2), j2)] = pack(prod_base, (j + j2) % 2)
    return FiniteGroupTable("C4xC2:C2", mult)
