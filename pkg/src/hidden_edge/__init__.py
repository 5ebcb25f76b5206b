"""Find an edge of a hidden graph using counted independent-set queries."""

from .graph import (
    Edge,
    FindOutcome,
    HiddenGraph,
    Status,
    VertexSet,
    is_query,
    outcome_correct,
    read_graph,
    sample_subset,
    write_graph,
)
from .oracle import Answers, OracleSession, SessionError, SessionState
from .plan import QueryBatch, RoundPlan
from .rng import make_rng

__version__ = "0.1.0"

__all__ = [
    "Answers",
    "Edge",
    "FindOutcome",
    "HiddenGraph",
    "OracleSession",
    "QueryBatch",
    "RoundPlan",
    "SessionError",
    "SessionState",
    "Status",
    "VertexSet",
    "is_query",
    "make_rng",
    "outcome_correct",
    "read_graph",
    "sample_subset",
    "write_graph",
]
