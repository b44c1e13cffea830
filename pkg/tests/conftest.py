"""Shared generators and independent reference implementations.

The helpers here deliberately avoid the library's optimized paths so tests
compare two genuinely different routes to the same answer.
"""
import itertools
import random

from gallai.graphs import Graph
from gallai.templates import Template


def random_graph(rng: random.Random, n: int) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
    return Graph.from_edges(n, edges)


def random_template(rng: random.Random, n: int, r: int) -> Template:
    from math import comb
    masks = tuple(rng.randrange(1 << r) for _ in range(comb(n, 2)))
    return Template(n, r, masks)


def brute_triangles(graph: Graph) -> list[tuple[int, int, int]]:
    return [
        (a, b, c)
        for a, b, c in itertools.combinations(range(graph.n), 3)
        if graph.has_edge(a, b) and graph.has_edge(a, c) and graph.has_edge(b, c)
    ]


def assignment_is_gallai(triangles, edge_pos, colors) -> bool:
    for a, b, c in triangles:
        x = colors[edge_pos[(a, b)]]
        y = colors[edge_pos[(a, c)]]
        z = colors[edge_pos[(b, c)]]
        if x != y and y != z and x != z:
            return False
    return True


def constrained_count(template: Template, graph: Graph, cap: int = 500_000):
    """Count colorings of the graph inside the template by direct product
    enumeration.  Returns None when the palette product exceeds the cap."""
    edges = graph.edges()
    choices = []
    for u, v in edges:
        cols = sorted(template.palette_colors(u, v))
        if not cols:
            return 0
        choices.append(cols)
    size = 1
    for cols in choices:
        size *= len(cols)
        if size > cap:
            return None
    edge_pos = {e: i for i, e in enumerate(edges)}
    triangles = brute_triangles(graph)
    return sum(
        1 for combo in itertools.product(*choices)
        if assignment_is_gallai(triangles, edge_pos, combo)
    )


def brute_count_gallai(graph: Graph, r: int) -> int:
    """Plain product-loop count, independent of the array scan and the
    backtracking counter."""
    edges = graph.edges()
    edge_pos = {e: i for i, e in enumerate(edges)}
    triangles = brute_triangles(graph)
    return sum(
        1 for combo in itertools.product(range(1, r + 1), repeat=len(edges))
        if assignment_is_gallai(triangles, edge_pos, combo)
    )
