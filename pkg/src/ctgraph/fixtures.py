"""Named example presentations and generated graph corpora."""
from __future__ import annotations

import itertools
import random
from typing import Iterator

from .graphcore import Edge, GraphPresentation, parse_graph
from .kgraph import ColoredKGraph, ProductKGraph, parse_kgraph

__all__ = [
    "GRAPHS",
    "KGRAPHS",
    "graph",
    "kgraph",
    "all_graphs",
    "exhaustive_graphs",
    "random_graphs",
]

GRAPHS: dict[str, str] = {
    "loop": """
        vertex v
        edge e : v -> v
    """,
    "two_cycle": """
        vertex u
        vertex v
        edge a : u -> v
        edge b : v -> u
    """,
    "feed": """
        vertex u
        vertex v
        edge e : u -> u
        edge a : u -> v
    """,
    "feed_chain": """
        vertex u
        vertex v
        vertex w
        edge e : u -> u
        edge a : u -> v
        edge c : v -> w
        edge d : u -> w
    """,
    "two_loops": """
        vertex u
        vertex v
        edge e : u -> u
        edge f : v -> v
    """,
    "loop_entrance": """
        vertex u
        vertex v
        edge e : v -> v
        edge g : u -> v
        edge h : u -> u
    """,
    "double_loop": """
        vertex v
        edge e : v -> v
        edge f : v -> v
    """,
    "source": """
        vertex v
        vertex w
        edge e : w -> v
    """,
    "loop_source_entrance": """
        vertex u
        vertex v
        edge e : v -> v
        edge g : u -> v
    """,
    "diamond": """
        vertex s
        vertex a
        vertex b
        vertex t
        edge p : s -> a
        edge q : s -> b
        edge x : a -> t
        edge y : b -> t
    """,
    "omega": """
        vertex u
        vertex v
        bundle b : u => v
    """,
    "omega_plain": """
        vertex u
        vertex v
        bundle b : u => v
        edge a : u -> v
        edge c : v -> v
    """,
    "omega_loop": """
        vertex v
        bundle b : v => v
    """,
    "omega_cycle": """
        vertex u
        vertex v
        bundle b : u => v
        edge h : v -> u
    """,
    "uhf2": """
        bratteli uhf2
        repeat [[2]]
    """,
    "line": """
        bratteli line
        repeat [[1]]
    """,
    "two_lines": """
        bratteli two_lines
        repeat [[1, 0], [0, 1]]
    """,
    "merge": """
        bratteli merge
        prefix [[[1, 1]]]
        repeat [[1, 0], [0, 1]]
    """,
    "golden": """
        bratteli golden
        repeat [[1, 1], [1, 0]]
    """,
    "compact": """
        bratteli compact
        repeat [[1, 0], [1, 1]]
    """,
}

KGRAPHS: dict[str, str] = {
    "torus": """
        vertex v
        blue b : v -> v
        red r : v -> v
        square b r ~ r b
    """,
    "twoblue": """
        vertex v
        blue b1 : v -> v
        blue b2 : v -> v
        red r : v -> v
        square b1 r ~ r b1
        square b2 r ~ r b2
    """,
    "flip": """
        vertex v
        blue b1 : v -> v
        blue b2 : v -> v
        red r1 : v -> v
        red r2 : v -> v
        square b1 r1 ~ r1 b1
        square b1 r2 ~ r2 b2
        square b2 r1 ~ r1 b2
        square b2 r2 ~ r2 b1
    """,
}

PRODUCTS: dict[str, tuple[str, str]] = {
    "line_line": ("line", "line"),
    "uhf_line": ("uhf2", "line"),
    "loop_line": ("loop", "line"),
    "loop_loop": ("loop", "loop"),
}


def graph(name: str) -> GraphPresentation:
    text = GRAPHS[name]
    g = parse_graph(text)
    return GraphPresentation(name, g.vertices, g.edges, g.bundles, g.tails, g.fans, g.bratteli)


def kgraph(name: str) -> ColoredKGraph | ProductKGraph:
    if name in PRODUCTS:
        a, b = PRODUCTS[name]
        return ProductKGraph(name, graph(a), graph(b))
    k = parse_kgraph(KGRAPHS[name])
    k.name = name
    return k


def all_graphs() -> list[str]:
    return list(GRAPHS)


def _connected(n: int, pairs) -> bool:
    adj = {i: set() for i in range(n)}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen, todo = {0}, [0]
    while todo:
        for j in adj[todo.pop()]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return len(seen) == n


def _build(name: str, n: int, pairs) -> GraphPresentation:
    vs = tuple(f"v{i}" for i in range(n))
    edges = tuple(Edge(f"e{k}", vs[a], vs[b]) for k, (a, b) in enumerate(pairs))
    return GraphPresentation(name, vs, edges)


def exhaustive_graphs(max_vertices: int = 3, max_edges: int = 4) -> Iterator[GraphPresentation]:
    """Every weakly connected graph (loops and parallel edges allowed) on
    labelled vertices, as multisets of (source, range) pairs."""
    for n in range(1, max_vertices + 1):
        slots = list(itertools.product(range(n), repeat=2))
        for m in range(max_edges + 1):
            for pairs in itertools.combinations_with_replacement(slots, m):
                if _connected(n, pairs):
                    yield _build(f"g{n}_{'_'.join(f'{a}{b}' for a, b in pairs)}", n, pairs)


def random_graphs(count: int = 500, max_vertices: int = 6, max_edges: int = 10,
                  seed: int = 20240601) -> Iterator[GraphPresentation]:
    rng = random.Random(seed)
    for i in range(count):
        n = rng.randint(1, max_vertices)
        m = rng.randint(0, max_edges)
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(m)]
        yield _build(f"r{i}", n, pairs)
