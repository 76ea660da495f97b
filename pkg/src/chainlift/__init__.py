"""Discrete fundamental groups of finite metric spaces at a scale.

Scale graphs of finite metric spaces carry chains and basic moves; their
loop groups are presented from a spanning tree; surjections onto small
finite groups realize regular covering graphs with explicit deck
actions; towers of such covers truncate the inverse systems behind
solenoids and profinite deck groups.
"""

from .covers import (
    ComponentRecord,
    CoverGraph,
    GroupHom,
    RootScaleReport,
    bonding_map,
    build_cover,
    components_and_stabilizer,
    compose_covers,
    cover_to_dot,
    cover_to_scale_graph,
    deck_compatibility_check,
    equivalence_check,
    evenly_covered_check,
    homotopy_lift_check,
    induced_quotient,
    lift_chain,
    root_scale,
)
from .enumeration import (
    KernelRecord,
    SmallGroupCatalog,
    count_nfold_covers,
    factor_bound_report,
    normal_subgroups_of_index,
    report_to_json,
    small_group_catalog,
    surjections_onto,
)
from .errors import (
    CatalogBoundError,
    ChainliftError,
    ChainValidationError,
    DisconnectedGraphError,
    ParseError,
)
from .groups import FiniteGroupTable, cyclic_group, find_isomorphism
from .homotopy import (
    BasicMove,
    Chain,
    GroupPresentation,
    ScaleMapRecord,
    Word,
    abelianization,
    apply_basic_move,
    chain_to_word,
    close_chain_homotopy,
    free_rank,
    net_generators,
    presentation_at_scale,
    scale_map,
    torsion,
    validate_chain,
)
from .space import (
    FiniteMetricSpace,
    ScaleEntourage,
    ScaleGraph,
    build_scale_graph,
    is_chain_connected,
    load_point_cloud,
    sample_circle,
    space_to_csv,
    wedge_graph_space,
)
from .tower import (
    ProfiniteTruncation,
    TowerLevel,
    TowerTruncation,
    build_solenoid_tower,
    lift_through_tower,
    profinite_truncation,
    snark_surjectivity_check,
    tower_join,
    tower_report,
    tower_report_json,
)

__version__ = "0.1.0"
