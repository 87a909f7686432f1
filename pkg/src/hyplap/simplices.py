"""The symmetric simplicial set induced by a hypergraph.

An n-simplex is an (n+1)-tuple of vertex indices whose underlying set is a
valid support. Two labelled tuples carrying the same entries are identified,
so the tuple itself is the canonical representative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Callable, Sequence

from .config import DEFAULT_BASIS_CAP
from .errors import InputError, LimitError
from .hypergraph import Hypergraph, Support, support_poset

Simplex = tuple[int, ...]


def support_of(s: Simplex) -> Support:
    return tuple(sorted(set(s)))


@dataclass(frozen=True)
class FunctionMap:
    """An arbitrary function ``[m] -> [n]`` (a morphism of the symmetric simplex category)."""

    values: tuple[int, ...]
    target: int  # n, so values lie in range(n + 1)

    def __post_init__(self):
        if not self.values:
            raise InputError("function map needs at least one value")
        if any(not 0 <= v <= self.target for v in self.values):
            raise InputError(f"function map values {self.values} outside [0, {self.target}]")

    @property
    def source(self) -> int:
        return len(self.values) - 1

    def __call__(self, i: int) -> int:
        return self.values[i]

    def then(self, nu: "FunctionMap") -> "FunctionMap":
        """The composite ``nu o self``."""
        if self.target != nu.source:
            raise InputError("composition arity mismatch")
        return FunctionMap(tuple(nu.values[v] for v in self.values), nu.target)


def identity_map(n: int) -> FunctionMap:
    return FunctionMap(tuple(range(n + 1)), n)


def coface_map(n: int, l: int) -> FunctionMap:
    """``d^l : [n-1] -> [n]``, the injection skipping ``l``."""
    return FunctionMap(tuple(k if k < l else k + 1 for k in range(n)), n)


def constant_map(n: int, l: int) -> FunctionMap:
    """``(l) : [0] -> [n]``; its action is the vertex projection ``p_l``."""
    return FunctionMap((l,), n)


def simplex_count(h: Hypergraph, k: int, cap: int = DEFAULT_BASIS_CAP) -> int:
    """Number of k-simplices, counted by surjections onto each valid support."""
    sizes: dict[int, int] = {}
    for s in support_poset(h, cap).nodes:
        sizes[len(s)] = sizes.get(len(s), 0) + 1
    return sum(n * _surjections(k + 1, j) for j, n in sizes.items())


def _surjections(n: int, j: int) -> int:
    return sum((-1) ** i * comb(j, i) * (j - i) ** n for i in range(j + 1))


def enumerate_simplices(h: Hypergraph, k: int, cap: int = DEFAULT_BASIS_CAP) -> list[Simplex]:
    """All k-simplices of the induced simplicial set, sorted lexicographically."""
    if k < 0:
        raise InputError(f"degree must be nonnegative, got {k}")
    count = simplex_count(h, k, cap)
    if count > cap:
        raise LimitError(f"degree {k} simplices", count, cap)
    out: set[Simplex] = set()
    for m in h.maximal_supports():
        out.update(product(m, repeat=k + 1))
    return sorted(out)


def increasing_simplices(h: Hypergraph, k: int, cap: int = DEFAULT_BASIS_CAP) -> list[Simplex]:
    """Strictly increasing k-simplices, i.e. valid supports of size k+1."""
    if k < 0:
        raise InputError(f"degree must be nonnegative, got {k}")
    return [s for s in support_poset(h, cap).nodes if len(s) == k + 1]


def apply_map(s: Simplex, mu: FunctionMap) -> Simplex:
    if mu.target != len(s) - 1:
        raise InputError(f"map into [{mu.target}] applied to a {len(s) - 1}-simplex")
    return tuple(s[i] for i in mu.values)


def face(s: Simplex, l: int) -> Simplex:
    if len(s) < 2:
        raise InputError("a 0-simplex has no faces")
    if not 0 <= l < len(s):
        raise InputError(f"face index {l} out of range for a {len(s) - 1}-simplex")
    return s[:l] + s[l + 1 :]


def join(h: Hypergraph, s: Simplex, t: Simplex, l: int) -> Simplex:
    """Splice ``t`` into ``s`` before position ``l``."""
    if not 0 <= l <= len(s):
        raise InputError(f"join position {l} out of range for a {len(s) - 1}-simplex")
    if not h.is_valid_support(set(s) | set(t)):
        raise InputError(f"support {h.names(support_of(s + t))} lies in no hyperedge")
    return s[:l] + t + s[l:]


def permutation_sign(g: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(g)) for j in range(i + 1, len(g)) if g[i] > g[j])
    return -1 if inversions % 2 else 1


def permute(s: Simplex, g: Sequence[int]) -> tuple[Simplex, int]:
    """``g . s = (s[g(0)], ..., s[g(m)])`` together with ``sgn(g)``."""
    g = tuple(g)
    if sorted(g) != list(range(len(s))):
        raise InputError(f"{g} is not a permutation of [{len(s) - 1}]")
    return tuple(s[i] for i in g), permutation_sign(g)


def leq(a: Simplex, b: Simplex) -> bool:
    return set(a) <= set(b)


def intersect_basic_opens(h: Hypergraph, i: Support, j: Support) -> Support | None:
    """Support generating ``W_i & W_j``, or None when the intersection is empty."""
    u = support_of(i + j)
    return u if h.is_valid_support(u) else None


@dataclass
class CechReport:
    max_dim: int
    closed: bool = True
    cech: bool = True
    counts: dict[int, int] = field(default_factory=dict)
    nerve_counts: dict[int, int] = field(default_factory=dict)
    witnesses: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.closed and self.cech

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "closed": self.closed,
            "cech": self.cech,
            "simplices": {str(k): v for k, v in self.counts.items()},
            "nerve": {str(k): v for k, v in self.nerve_counts.items()},
            "witnesses": self.witnesses[:20],
        }


def _nerve(vertex_opens: list[int], n: int) -> set[Simplex]:
    """Tuples of vertices whose basic opens meet, by depth-first search."""
    out: set[Simplex] = set()
    everything = -1

    def grow(prefix, mask):
        if len(prefix) == n + 1:
            out.add(prefix)
            return
        for v, u in enumerate(vertex_opens):
            m = mask & u
            if m:
                grow(prefix + (v,), m)

    grow((), everything)
    return out


def verify_cech(
    h: Hypergraph,
    max_dim: int,
    cap: int = DEFAULT_BASIS_CAP,
    enumerate_fn: Callable[..., list[Simplex]] = enumerate_simplices,
    n_maps: int = 6,
    seed: int = 0,
) -> CechReport:
    """Check closedness and the Cech property on simplices of dimension <= max_dim.

    Basic opens are computed as bitmasks over the enumerated simplices (truncated
    at ``max_dim``) straight from the preorder, so the check does not lean on
    the support validity rule it is meant to confirm.
    """
    report = CechReport(max_dim)
    degrees = [enumerate_fn(h, k, cap) for k in range(max_dim + 1)]
    flat = [s for deg in degrees for s in deg]
    for k, deg in enumerate(degrees):
        report.counts[k] = len(deg)

    groups: dict[frozenset, int] = {}
    for pos, s in enumerate(flat):
        key = frozenset(s)
        groups[key] = groups.get(key, 0) | (1 << pos)
    opens: dict[frozenset, int] = {}
    for a in groups:
        mask = 0
        for b, bits in groups.items():
            if a <= b:
                mask |= bits
        opens[a] = mask
    basic = set(opens.values())

    # closedness
    keys = list(opens)
    for x in range(len(keys)):
        for y in range(x, len(keys)):
            a, b = keys[x], keys[y]
            m = opens[a] & opens[b]
            if m and m not in basic:
                report.closed = False
                report.witnesses.append(f"U{sorted(a)} & U{sorted(b)} is not basic")
            claimed = intersect_basic_opens(h, support_of(tuple(a)), support_of(tuple(b)))
            if len(a | b) <= max_dim + 1 and (claimed is None) != (m == 0):
                report.closed = False
                report.witnesses.append(f"intersect_basic_opens wrong on {sorted(a)}, {sorted(b)}")

    # Cech: psi_n is a bijection onto the nerve
    vertex_opens = [opens.get(frozenset((v,)), 0) for v in range(h.n_vertices)]
    k0 = set(degrees[0])
    for n, deg in enumerate(degrees):
        nerve = _nerve(vertex_opens, n)
        report.nerve_counts[n] = len(nerve)
        images = []
        for y in deg:
            psi = tuple(apply_map(y, constant_map(n, l))[0] for l in range(n + 1))
            if any((v,) not in k0 for v in psi):
                report.cech = False
                report.witnesses.append(f"vertex projection of {h.names(y)} not a 0-simplex")
            images.append(psi)
        if len(set(images)) != len(images):
            report.cech = False
            report.witnesses.append(f"psi_{n} is not injective")
        missing = nerve - set(images)
        extra = set(images) - nerve
        for t in sorted(missing)[:5]:
            report.cech = False
            report.witnesses.append(f"nerve tuple {h.names(t)} has no preimage under psi_{n}")
        for t in sorted(extra)[:5]:
            report.cech = False
            report.witnesses.append(f"psi_{n} image {h.names(t)} is not in the nerve")

    # naturality of psi on sampled function maps
    rng = random.Random(seed)
    top = min(3, max_dim)
    sets = [set(d) for d in degrees]
    for n in range(top + 1):
        for m in range(top + 1):
            for _ in range(n_maps):
                mu = FunctionMap(tuple(rng.randint(0, n) for _ in range(m + 1)), n)
                for y in degrees[n]:
                    z = apply_map(y, mu)
                    if z not in sets[m]:
                        report.cech = False
                        report.witnesses.append(f"{h.names(y)} . {mu.values} left the simplicial set")
                        continue
                    lhs = tuple(y[i] for i in mu.values)  # nerve action on psi_n(y)
                    rhs = tuple(apply_map(z, constant_map(m, l))[0] for l in range(m + 1))
                    if lhs != rhs:
                        report.cech = False
                        report.witnesses.append(f"psi not natural at {h.names(y)}, {mu.values}")
    return report

