"""Secluded paths and Steiner trees: connect terminals while exposing as few
nodes as possible (exposure = weight of the closed neighborhood)."""

from .approx import (
    AlgorithmTag,
    ApproxOutcome,
    approx_secluded_path,
    approx_secluded_steiner,
    approx_steiner_sqrt2n,
    klein_ravi_node_weighted_steiner,
    min_degcost_path,
    min_degcost_steiner_approx,
)
from .errors import (
    BudgetError,
    InfeasibleError,
    InputError,
    ParameterError,
    ParseError,
    SecludedError,
    UnsupportedError,
)
from .graph import (
    CostReport,
    Graph,
    PathSeq,
    SteinerSolution,
    closed_neighborhood,
    cost,
    diff,
    emit_graph,
    exposure,
    parse_graph,
    read_graph,
    validate_path,
    validate_steiner,
    write_graph,
)
from .oracle import OptResult, RbscInstance, exact_rbsc, exact_secluded_path, exact_secluded_steiner, exact_vertex_cover
from .skeleton import secluded_steiner_fixed_k
from .suffix_dp import secluded_path_bounded_degree
from .treewidth import TreeDecomposition, min_fill_tree_decomposition, solve_treewidth_secluded_steiner

__version__ = "0.1.0"
