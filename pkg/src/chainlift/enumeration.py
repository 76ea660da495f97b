"""Catalog of small groups and enumeration of finite-index kernels.

Covers at index n correspond to surjections of the presented loop group
onto groups of order n, up to post-composition with an automorphism of
the target.  The catalog carries one table per isomorphism class of
order at most 16; kernel records canonicalize the generator-image tuple
over the automorphism orbit, which decides kernel equality exactly.

Enumeration is a full scan over generator-image tuples and therefore
exponential in the presentation rank; it is meant for the small
presentations (rank a handful) this package targets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from math import factorial
from typing import Optional, Sequence

from . import groups as _g
from .covers import CoverGraph, GroupHom, build_cover, equivalence_check
from .errors import CatalogBoundError, ChainliftError
from .groups import FiniteGroupTable, find_isomorphism, mulclose
from .homotopy import GroupPresentation, presentation_at_scale
from .space import ScaleGraph

CATALOG_MAX_ORDER = 16


def _catalog_groups() -> list[FiniteGroupTable]:
    c = _g.cyclic_group
    d = _g.direct_product
    entries = [
        c(1), c(2), c(3),
        c(4), d(c(2), c(2)),
        c(5),
        c(6), _g.dihedral_group(3),
        c(7),
        c(8), d(c(4), c(2)), d(c(2), d(c(2), c(2))),
        _g.dihedral_group(4), _g.dicyclic_group(2, "Q8"),
        c(9), d(c(3), c(3)),
        c(10), _g.dihedral_group(5),
        c(11),
        c(12), d(c(6), c(2)), _g.dihedral_group(6), _g.alternating4(),
        _g.dicyclic_group(3, "Dic3"),
        c(13),
        c(14), _g.dihedral_group(7),
        c(15),
        c(16), d(c(8), c(2)), d(c(4), c(4)), d(c(4), d(c(2), c(2))),
        d(c(2), d(c(2), d(c(2), c(2)))),
        _g.dihedral_group(8), _g.semidirect_cyclic(8, 2, 3, "SD16"),
        _g.dicyclic_group(4, "Q16"), _g.semidirect_cyclic(8, 2, 5, "M16"),
        d(_g.dihedral_group(4), c(2)), d(_g.dicyclic_group(2, "Q8"), c(2)),
        _g.semidirect_cyclic(4, 4, 3, "C4:C4"), _g._sg16_3(), _g._pauli16(),
    ]
    return entries


class SmallGroupCatalog:
    """Every isomorphism class of order <= max_order, with automorphisms."""

    def __init__(self, max_order: int = CATALOG_MAX_ORDER):
        if max_order > CATALOG_MAX_ORDER:
            raise CatalogBoundError(
                f"catalog covers orders up to {CATALOG_MAX_ORDER}, not {max_order}"
            )
        self.max_order = max_order
        self.groups = [
            g for g in _catalog_groups() if g.order <= max_order
        ]
        self.groups.sort(key=lambda g: (g.order, g.name))

    def groups_of_order(self, n: int) -> list[FiniteGroupTable]:
        if n > self.max_order:
            raise CatalogBoundError(
                f"order {n} exceeds the catalog bound {self.max_order}"
            )
        return [g for g in self.groups if g.order == n]

    def find_class(self, table: FiniteGroupTable) -> Optional[FiniteGroupTable]:
        """The catalog representative isomorphic to the table, if in range."""
        for g in self.groups_of_order(table.order):
            if find_isomorphism(table, g) is not None:
                return g
        return None


_DEFAULT_CATALOG: Optional[SmallGroupCatalog] = None


def small_group_catalog() -> SmallGroupCatalog:
    global _DEFAULT_CATALOG
    if _DEFAULT_CATALOG is None:
        _DEFAULT_CATALOG = SmallGroupCatalog()
    return _DEFAULT_CATALOG


@dataclass(frozen=True)
class KernelRecord:
    """A normal subgroup of finite index, named by its quotient data.

    ``signature`` is the minimum of the generator-image tuple over the
    automorphism orbit of the target; two records are equal exactly when
    the kernels coincide.
    """

    index: int
    target: FiniteGroupTable
    hom: GroupHom
    signature: tuple[int, ...]

    def label(self) -> str:
        return f"{self.target.name}:" + ",".join(str(x) for x in self.signature)


def surjections_onto(
    presentation: GroupPresentation, target: FiniteGroupTable
) -> list[GroupHom]:
    """All relator-respecting generator-image tuples that generate the target."""
    homs = []
    for images in product(range(target.order), repeat=presentation.rank):
        hom = GroupHom(presentation, target, images)
        if hom.failing_relator() is not None:
            continue
        if len(mulclose(target, images)) != target.order:
            continue
        homs.append(hom)
    return homs


def canonical_signature(hom: GroupHom) -> tuple[int, ...]:
    return min(
        tuple(sigma[x] for x in hom.images)
        for sigma in hom.target.automorphisms()
    )


def normal_subgroups_of_index(
    presentation: GroupPresentation,
    n: int,
    catalog: Optional[SmallGroupCatalog] = None,
) -> list[KernelRecord]:
    """Distinct index-n normal subgroups as kernels of catalog surjections."""
    if n < 1:
        raise ChainliftError("index must be positive")
    catalog = catalog or small_group_catalog()
    records = []
    for target in catalog.groups_of_order(n):
        seen: dict[tuple[int, ...], GroupHom] = {}
        for hom in surjections_onto(presentation, target):
            sig = canonical_signature(hom)
            if sig not in seen:
                seen[sig] = hom
        for sig in sorted(seen):
            records.append(KernelRecord(n, target, seen[sig], sig))
    return records


def count_nfold_covers(
    graph: ScaleGraph,
    n: int,
    catalog: Optional[SmallGroupCatalog] = None,
) -> tuple[int, list[CoverGraph]]:
    """One connected cover per index-n kernel; pairwise non-equivalent."""
    presentation = presentation_at_scale(graph)
    records = normal_subgroups_of_index(presentation, n, catalog)
    covers = [build_cover(graph, presentation, rec.hom) for rec in records]
    for i in range(len(covers)):
        if not covers[i].connected:
            raise ChainliftError("enumerated cover is not connected")
        for j in range(i + 1, len(covers)):
            if equivalence_check(covers[i], covers[j]):
                raise ChainliftError("enumerated covers are not pairwise distinct")
    return len(covers), covers


def factor_bound_report(
    graph: ScaleGraph,
    n_max: int,
    catalog: Optional[SmallGroupCatalog] = None,
) -> list[dict]:
    """Cover counts against the n! bound, reported but never asserted.

    A flagged row means the count exceeds n! for that n; the report
    records the excess as a warning instead of failing, since the
    figure-eight already shows three distinct double covers.
    """
    presentation = presentation_at_scale(graph)
    report = []
    for n in range(1, n_max + 1):
        records = normal_subgroups_of_index(presentation, n, catalog)
        count = len(records)
        bound = factorial(n)
        row = {
            "n": n,
            "count": count,
            "bound": bound,
            "flagged": count > bound,
            "kernels": [rec.label() for rec in records],
        }
        if row["flagged"]:
            row["warning"] = (
                f"count {count} exceeds the n! bound {bound}; "
                "recorded for review, not treated as a failure"
            )
        report.append(row)
    return report


def report_to_json(report: Sequence[dict]) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"))
