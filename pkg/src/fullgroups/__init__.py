"""Exact prefix-exchange toolkit for topological full groups of graph
groupoids, with explicit embeddings into the binary full group (Thompson's
group V) and generator-level algebra maps."""

from .graph import (
    OMEGA,
    EdgeFamily,
    Graph,
    LeveledGraph,
    TemplateFamily,
    Verdict,
    check_cofinal,
    check_condition_K,
    check_condition_L,
    check_condition_T,
    check_condition_W,
    check_condition_infinity,
    check_minimal,
    check_strongly_connected,
    condition_report,
    count_paths_capped,
    degenerate_vertices,
    graph_from_json,
    graph_to_json,
    has_sinks,
    has_semi_tails,
    isolated_point_witnesses,
    reaches,
    validate_graph,
)
from .pathspace import (
    BoundaryPoint,
    CompactOpen,
    CylinderAtom,
    FinitePath,
    atom,
    atom_intersect,
    atom_split,
    atom_subtract,
    co_contains_point,
    co_equals,
    co_from_json,
    co_intersect,
    co_is_empty,
    co_make,
    co_subtract,
    co_to_json,
    co_union,
    concat,
    extend,
    finite_point,
    format_path,
    format_point,
    full_space,
    make_path,
    parse_path,
    parse_point,
    periodic_point,
    point_equal,
    point_in_atom,
    shift_point,
    tail_equivalent,
    trivial_path,
    witness_point,
)
from .tables import (
    Arrow,
    Piece,
    Table,
    apply,
    arrow_consistent,
    canonicalize,
    commutator,
    compose,
    contains_arrow,
    extend_by_identity,
    format_arrow,
    germ_equal,
    identity,
    inverse,
    involution_hat,
    is_identity,
    make_piece,
    make_table,
    parse_arrow,
    random_table,
    support,
    table_from_json,
    table_image,
    table_to_json,
    transposition_for_arrow,
    validate_table,
)
from .embed import (
    E2,
    FormalSum,
    GeneratorImage,
    Labeling,
    Monomial,
    code_word,
    binary_path,
    binary_point,
    ck_check,
    code_partition_check,
    default_labeling,
    embed_table,
    emit_generators,
    format_generator_image,
    mono_mult,
    point_map,
    require_admissible,
    word_of_edges,
    word_of_path,
    word_of_vertex,
)
from .bratteli import (
    BratteliDiagram,
    GammaElement,
    af_to_v,
    bratteli_from_json,
    bratteli_to_json,
    gamma_element_from_json,
    gamma_to_table,
)

__version__ = "0.1.0"
