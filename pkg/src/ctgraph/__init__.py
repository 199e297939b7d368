"""Graph algorithms for ancestry pairs, cycle entrances, and path groupoids."""
from .graphcore import (
    EPPath,
    Edge,
    GraphPresentation,
    ParseError,
    Path,
    dump_graph,
    enumerate_paths,
    parse_graph,
    shift,
)
from .verdict import InfiniteFamily, OracleViolation, Verdict

__version__ = "0.1.0"
