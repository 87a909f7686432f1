"""Hypergraphs, their extended structure map and the support poset.

Vertices are identified internally by their position in the total order
``Hypergraph.vertices``; a *support* is a strictly increasing tuple of such
positions. Everything downstream (simplices, sheaves, cochains) is keyed on
these integer tuples, and names only reappear at the I/O boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .config import DEFAULT_BASIS_CAP
from .errors import InputError, LimitError

Support = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """A finite hypergraph with a total order on its vertices.

    ``vertices`` lists the vertex names in the chosen total order (lexicographic
    unless overridden). ``edges`` maps each edge name to its vertex set, stored
    as a support (sorted vertex indices).
    """

    vertices: tuple[str, ...]
    edges: Mapping[str, Support]
    _index: dict[str, int] = field(init=False, repr=False)
    _maximal: tuple[frozenset[int], ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})
        sets = sorted({frozenset(s) for s in self.edges.values()}, key=len, reverse=True)
        maximal: list[frozenset[int]] = []
        for s in sets:
            if not any(s <= m for m in maximal):
                maximal.append(s)
        object.__setattr__(self, "_maximal", tuple(maximal))

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.vertices == other.vertices and dict(self.edges) == dict(other.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def vertex_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InputError(f"unknown vertex {name!r}") from None

    def support(self, names: Iterable[str]) -> Support:
        """Canonical support for a collection of vertex names (validity checked)."""
        s = tuple(sorted({self.vertex_index(n) for n in names}))
        if not s:
            raise InputError("empty support")
        if not self.is_valid_support(s):
            raise InputError(f"support {self.names(s)} lies in no hyperedge")
        return s

    def names(self, s: Iterable[int]) -> list[str]:
        return [self.vertices[i] for i in s]

    def key(self, s: Iterable[int]) -> str:
        """``"|"``-joined vertex names, the support key used in sheaf files."""
        return "|".join(self.names(s))

    def maximal_supports(self) -> list[Support]:
        """Inclusion-maximal images of the extended structure map."""
        covered = set().union(*self._maximal) if self._maximal else set()
        out = [tuple(sorted(m)) for m in self._maximal]
        out += [(v,) for v in range(self.n_vertices) if v not in covered]
        return sorted(out, key=lambda s: (len(s), s))

    def is_valid_support(self, s: Iterable[int]) -> bool:
        s = frozenset(s)
        if not s:
            return False
        if len(s) == 1:
            (v,) = s
            return 0 <= v < self.n_vertices
        return any(s <= m for m in self._maximal)

    def neighbourhood(self, s: Iterable[int]) -> frozenset[int]:
        """Union of all extended-structure images that contain ``s``.

        Vertex images count too, so a degenerate simplex on an isolated vertex
        still sees that vertex.
        """
        s = frozenset(s)
        out = set()
        for m in self._maximal:
            if s <= m:
                out |= m
        if len(s) == 1:
            out |= s
        return frozenset(out)


def _reject_duplicate_keys(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise InputError(f"duplicate name {k!r}")
        seen[k] = v
    return seen


def build_hypergraph(
    vertices: Sequence[str],
    edges: Mapping[str, Iterable[str]],
    order: Sequence[str] | None = None,
) -> Hypergraph:
    """Validate raw vertex/edge data and return a canonical :class:`Hypergraph`."""
    names = list(vertices)
    for v in names:
        if not isinstance(v, str):
            raise InputError(f"vertex name {v!r} is not a string")
    seen: set[str] = set()
    for v in names:
        if v in seen:
            raise InputError(f"duplicate vertex {v!r}")
        seen.add(v)
    if order is None:
        ordered = sorted(names)
    else:
        ordered = list(order)
        if sorted(ordered) != sorted(names) or len(set(ordered)) != len(ordered):
            raise InputError("vertex order must be a permutation of the vertices")
    index = {v: i for i, v in enumerate(ordered)}

    canon: dict[str, Support] = {}
    for name in sorted(edges):
        if not isinstance(name, str):
            raise InputError(f"edge name {name!r} is not a string")
        if name in index:
            raise InputError(f"duplicate name {name!r} (used by a vertex and an edge)")
        members = edges[name]
        if isinstance(members, str) or not isinstance(members, Iterable):
            raise InputError(f"edge {name!r} must list its vertices")
        idx = set()
        for v in members:
            if v not in index:
                raise InputError(f"edge {name!r} references unknown vertex {v!r}")
            idx.add(index[v])
        if len(idx) < 2:
            raise InputError(f"edge {name!r} has fewer than 2 distinct vertices")
        canon[name] = tuple(sorted(idx))
    return Hypergraph(tuple(ordered), canon)


def parse_hypergraph(text: str, order: Sequence[str] | None = None) -> Hypergraph:
    """Parse the hypergraph JSON document ``{"vertices": [...], "edges": {...}}``."""
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("hypergraph document must be a JSON object")
    for key in ("vertices", "edges"):
        if key not in doc:
            raise InputError(f"missing key {key!r}")
    if not isinstance(doc["vertices"], list):
        raise InputError("'vertices' must be a list")
    if not isinstance(doc["edges"], dict):
        raise InputError("'edges' must be an object")
    return build_hypergraph(doc["vertices"], doc["edges"], order)


def serialize_hypergraph(h: Hypergraph) -> str:
    doc = {
        "vertices": sorted(h.vertices),
        "edges": {e: sorted(h.names(s)) for e, s in sorted(h.edges.items())},
    }
    return json.dumps(doc, sort_keys=True)


def extended_structure(h: Hypergraph, x: str) -> Support:
    """Image of an edge or vertex name under the extended structure map."""
    if x in h.edges:
        return h.edges[x]
    if x in h._index:
        return (h._index[x],)
    raise InputError(f"unknown edge or vertex name {x!r}")


@dataclass(frozen=True, eq=False)
class SupportPoset:
    """Valid supports ordered by inclusion, with their Hasse covers."""

    nodes: tuple[Support, ...]
    covers: tuple[tuple[Support, Support], ...]
    index: dict[Support, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {s: i for i, s in enumerate(self.nodes)})

    def __contains__(self, s) -> bool:
        return s in self.index

    def __len__(self) -> int:
        return len(self.nodes)

    def up(self, s: Support) -> list[Support]:
        """All nodes containing ``s`` (the basic open of ``s``), in node order."""
        fs = set(s)
        return [t for t in self.nodes if len(t) >= len(s) and fs.issubset(t)]


def support_poset(h: Hypergraph, cap: int = DEFAULT_BASIS_CAP) -> SupportPoset:
    maximal = h.maximal_supports()
    bound = sum(2 ** len(m) - 1 for m in maximal)
    if bound > cap:
        raise LimitError("support poset", bound, cap)
    nodes: set[Support] = set()
    for m in maximal:
        for r in range(1, len(m) + 1):
            nodes.update(combinations(m, r))
    ordered = tuple(sorted(nodes, key=lambda s: (len(s), s)))
    covers = []
    for t in ordered:
        if len(t) < 2:
            continue
        for i in range(len(t)):
            covers.append((t[:i] + t[i + 1 :], t))
    covers.sort(key=lambda c: (len(c[0]), c[0], c[1]))
    return SupportPoset(ordered, tuple(covers))
