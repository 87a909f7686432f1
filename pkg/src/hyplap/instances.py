"""Small named hypergraphs and seeded random families used by checks and tests."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .hypergraph import Hypergraph, build_hypergraph
from .sheaf import CellularSheaf, constant_sheaf, skyscraper_sheaf, twisted_sheaf


def figure_one() -> Hypergraph:
    """Two 4-vertex hyperedges sharing the pair {v2, v3}."""
    return build_hypergraph(
        [f"v{i}" for i in range(6)],
        {"e": ["v0", "v1", "v2", "v3"], "e2": ["v2", "v3", "v4", "v5"]},
    )


def single_edge() -> Hypergraph:
    return build_hypergraph(["a", "b"], {"ab": ["a", "b"]})


def triangle() -> Hypergraph:
    """The 3-cycle: three vertices, three 2-vertex edges, no 2-cell."""
    return build_hypergraph(["a", "b", "c"], {"ab": ["a", "b"], "bc": ["b", "c"], "ac": ["a", "c"]})


def random_hypergraph(
    rng: np.random.Generator, max_vertices: int = 6, max_edges: int = 4, max_edge_size: int = 4
) -> Hypergraph:
    n = int(rng.integers(3, max_vertices + 1))
    names = [f"x{i}" for i in range(n)]
    m = int(rng.integers(1, max_edges + 1))
    edges = {}
    for j in range(m):
        size = int(rng.integers(2, min(n, max_edge_size) + 1))
        members = rng.choice(n, size=size, replace=False)
        edges[f"e{j}"] = [names[i] for i in sorted(members)]
    return build_hypergraph(names, edges)


def random_asc(rng: np.random.Generator, max_vertices: int = 6, max_dim: int = 2) -> Hypergraph:
    """A random abstract simplicial complex, every face listed as a hyperedge."""
    n = int(rng.integers(3, max_vertices + 1))
    names = [f"u{i}" for i in range(n)]
    faces: set[tuple[int, ...]] = set()
    for _ in range(int(rng.integers(1, 5))):
        size = int(rng.integers(2, max_dim + 2))
        top = tuple(sorted(int(i) for i in rng.choice(n, size=size, replace=False)))
        for r in range(2, len(top) + 1):
            faces.update(combinations(top, r))
    edges = {"s" + "_".join(map(str, f)): [names[i] for i in f] for f in sorted(faces)}
    return build_hypergraph(names, edges)


def sheaf_family(h: Hypergraph, seed: int) -> list[tuple[str, CellularSheaf]]:
    """Constant d=1, constant d=2, twisted d=2 and a skyscraper on one support."""
    rng = np.random.default_rng(seed)
    maximal = h.maximal_supports()
    top = maximal[int(rng.integers(len(maximal)))]
    base = top[: max(1, len(top) - 1)] if len(top) > 1 else top
    return [
        ("constant:d=1", constant_sheaf(h, 1)),
        ("constant:d=2", constant_sheaf(h, 2)),
        ("twisted:d=2", twisted_sheaf(h, 2, seed)),
        (f"skyscraper:base={h.key(base)},d=1", skyscraper_sheaf(h, base, 1)),
    ]


def acceptance_hypergraphs(n_random: int = 20, seed: int = 2024) -> list[tuple[str, Hypergraph]]:
    rng = np.random.default_rng(seed)
    out = [("single_edge", single_edge()), ("triangle", triangle()), ("figure_one", figure_one())]
    out += [(f"random_{i}", random_hypergraph(rng)) for i in range(n_random)]
    return out
