"""Enumerate, count and sample graphs with prescribed degree sequences."""

from .core import Graph, Kind, canonical_key, graph_violation, group, validate_graph, z_vector
from .count import CountTable, build_table, count, count_bipartite, count_directed, count_undirected
from .enumerate import brute_force, collect, enumerate_bipartite, enumerate_directed, enumerate_graphs, enumerate_undirected
from .errors import (
    BudgetExceeded,
    DegseqError,
    EmptyInput,
    Infeasible,
    InfeasibleState,
    MemoryBudgetExceeded,
    UnknownSupport,
)
from .feasibility import bipartite_interval, digraph_feasible, directed_interval, erdos_gallai, gale_ryser
from .sample import (
    EfficientSampler,
    SampleTrace,
    UniformSampler,
    importance_estimate,
    make_rng,
    sample_bipartite_efficient,
    sample_bipartite_uniform,
    sample_directed_efficient,
    sample_directed_uniform,
    sample_many,
    sample_undirected_efficient,
    sample_undirected_uniform,
)

__version__ = "0.1.0"
