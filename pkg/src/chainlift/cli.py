"""Command-line surface: pi, covers, lift, and tower subcommands.

Output is deterministic: JSON uses sorted keys and compact separators,
floats print in shortest round-trip form, and repeated runs with equal
inputs produce byte-identical bytes.  Exit codes: 0 success, 1 input or
domain error, 2 disconnected-space condition.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .covers import GroupHom, build_cover, cover_to_dot, lift_chain
from .enumeration import (
    CATALOG_MAX_ORDER,
    factor_bound_report,
    normal_subgroups_of_index,
    report_to_json,
    small_group_catalog,
)
from .errors import CatalogBoundError, ChainliftError, DisconnectedGraphError
from .homotopy import presentation_at_scale, validate_chain
from .space import (
    FiniteMetricSpace,
    build_scale_graph,
    is_chain_connected,
    load_point_cloud,
    sample_circle,
    wedge_graph_space,
)
from .tower import build_solenoid_tower, tower_report_json

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DISCONNECTED = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the input-error code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _catalog_max() -> int:
    raw = os.environ.get("CHAINLIFT_CATALOG_MAX")
    if raw is None:
        return CATALOG_MAX_ORDER
    try:
        value = int(raw)
    except ValueError:
        raise ChainliftError(f"CHAINLIFT_CATALOG_MAX={raw!r} is not an integer")
    return min(value, CATALOG_MAX_ORDER)


def _add_space_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--circle", type=int, metavar="N", help="circle sample size")
    source.add_argument(
        "--wedge", metavar="M1,M2,...", help="cycle lengths of a wedge of cycles"
    )
    source.add_argument("--points", metavar="PATH", help="point cloud file")
    parser.add_argument("--radius", type=float, default=1.0, help="circle radius")
    parser.add_argument(
        "--format", choices=("csv", "json"), help="point file format (default: extension)"
    )
    parser.add_argument("--basepoint", type=int, default=None)


def _space_from_args(args: argparse.Namespace) -> FiniteMetricSpace:
    if args.circle is not None:
        return sample_circle(args.circle, args.radius)
    if args.wedge is not None:
        try:
            lengths = [int(x) for x in args.wedge.split(",") if x]
        except ValueError:
            raise ChainliftError(f"cannot parse wedge lengths {args.wedge!r}")
        return wedge_graph_space(lengths)
    path = Path(args.points)
    fmt = args.format or ("json" if path.suffix.lower() == ".json" else "csv")
    return load_point_cloud(path.read_text(), fmt)


def _graph_from_args(args: argparse.Namespace):
    space = _space_from_args(args)
    basepoint = args.basepoint if args.basepoint is not None else space.basepoint
    return build_scale_graph(space, args.epsilon, basepoint)


def cmd_pi(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    if not is_chain_connected(graph):
        print(
            "graph disconnected at this scale; restrict to a chain component",
            file=sys.stderr,
        )
        return EXIT_DISCONNECTED
    presentation = presentation_at_scale(graph)
    sys.stdout.write(presentation.export_text())
    return EXIT_OK


def cmd_covers(args: argparse.Namespace) -> int:
    bound = _catalog_max()
    if args.n > bound:
        raise CatalogBoundError(f"--n {args.n} exceeds the catalog bound {bound}")
    graph = _graph_from_args(args)
    report = factor_bound_report(graph, args.n)
    for row in report:
        if row["flagged"]:
            print(f"warning: {row['warning']} (n={row['n']})", file=sys.stderr)
    print(report_to_json(report))
    if args.emit_dot:
        out = Path(args.emit_dot)
        out.mkdir(parents=True, exist_ok=True)
        presentation = presentation_at_scale(graph)
        for n in range(1, args.n + 1):
            records = normal_subgroups_of_index(presentation, n)
            for k, rec in enumerate(records):
                cover = build_cover(graph, presentation, rec.hom)
                (out / f"cover_{n}_{k}.dot").write_text(cover_to_dot(cover))
    return EXIT_OK


def _parse_cover_spec(spec: str, presentation) -> GroupHom:
    name, sep, raw_images = spec.partition(":")
    if not sep:
        raise ChainliftError(
            f"cover spec {spec!r} must look like NAME:img1,img2,..."
        )
    catalog = small_group_catalog()
    target = next((g for g in catalog.groups if g.name == name), None)
    if target is None:
        raise ChainliftError(f"unknown catalog group {name!r}")
    try:
        images = [int(x) for x in raw_images.split(",") if x]
    except ValueError:
        raise ChainliftError(f"cannot parse generator images {raw_images!r}")
    return GroupHom(presentation, target, images)


def cmd_lift(args: argparse.Namespace) -> int:
    graph = _graph_from_args(args)
    presentation = presentation_at_scale(graph)
    hom = _parse_cover_spec(args.cover, presentation)
    cover = build_cover(graph, presentation, hom)
    try:
        points = [int(x) for x in args.chain.split(",") if x]
    except ValueError:
        raise ChainliftError(f"cannot parse chain {args.chain!r}")
    chain = validate_chain(graph, points)
    lifted = lift_chain(cover, chain, cover.basepoint_index)
    v, g = cover.vertices[lifted[-1]]
    print(f"endpoint: v{v}_g{g}")
    print(f"deck: {g}")
    return EXIT_OK


def cmd_tower(args: argparse.Namespace) -> int:
    tower = build_solenoid_tower(
        args.circle, args.p, args.depth, radius=args.radius,
        catalog_max=_catalog_max(),
    )
    print(tower_report_json(tower))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="chainlift")
    sub = parser.add_subparsers(dest="command", required=True)

    p_pi = sub.add_parser("pi", parents=[], help="presentation of the loop group")
    _add_space_flags(p_pi)
    p_pi.add_argument("--epsilon", type=float, required=True)
    p_pi.set_defaults(func=cmd_pi)

    p_cov = sub.add_parser("covers", help="n-fold cover counts and kernels")
    _add_space_flags(p_cov)
    p_cov.add_argument("--epsilon", type=float, required=True)
    p_cov.add_argument("--n", type=int, required=True)
    p_cov.add_argument("--emit-dot", metavar="DIR", help="write DOT files here")
    p_cov.set_defaults(func=cmd_covers)

    p_lift = sub.add_parser("lift", help="lift a chain through a cover")
    _add_space_flags(p_lift)
    p_lift.add_argument("--epsilon", type=float, required=True)
    p_lift.add_argument("--cover", required=True, metavar="NAME:IMG,IMG,...")
    p_lift.add_argument("--chain", required=True, metavar="P0,P1,...")
    p_lift.set_defaults(func=cmd_lift)

    p_tower = sub.add_parser("tower", help="solenoid tower report")
    p_tower.add_argument("--circle", type=int, required=True)
    p_tower.add_argument("--radius", type=float, default=1.0)
    p_tower.add_argument("--p", type=int, required=True)
    p_tower.add_argument("--depth", type=int, required=True)
    p_tower.set_defaults(func=cmd_tower)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DisconnectedGraphError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DISCONNECTED
    except ChainliftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
