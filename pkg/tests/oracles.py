"""Independent brute-force references used by the test suite.

Nothing here calls the enumeration or assembly code under test; each helper
recomputes its answer from the raw vertex and edge sets.
"""

from itertools import combinations, product

import numpy as np


def edge_sets(h):
    return [set(s) for s in h.edges.values()]


def fits(h, members):
    members = set(members)
    return len(members) == 1 or any(members <= e for e in edge_sets(h))


def brute_simplices(h, k):
    """Every (k+1)-tuple of vertex indices whose set is a singleton or inside an edge."""
    n = len(h.vertices)
    return [t for t in product(range(n), repeat=k + 1) if fits(h, t)]


def brute_supports(h):
    n = len(h.vertices)
    out = []
    for r in range(1, n + 1):
        out += [c for c in combinations(range(n), r) if fits(h, c)]
    return out


def brute_restriction(f, s, t):
    """Compose Hasse maps along one fixed chain, adding missing vertices from the top down."""
    m = np.eye(f.stalk_dim[s])
    cur = s
    for v in sorted(set(t) - set(s), reverse=True):
        nxt = tuple(sorted(cur + (v,)))
        m = f.hasse_maps[(cur, nxt)] @ m
        cur = nxt
    return m


def straight_line_ordered_coboundary(f, k):
    """Ordered coboundary of an ordered simplicial complex, written out directly.

    Rows are increasing (k+1)-simplices, columns increasing k-simplices, both
    sorted by (length, tuple). Block (z, z minus its l-th vertex) is
    ``(-1)^l`` times the restriction from the face to z.
    """
    h = f.h
    supports = sorted(brute_supports(h), key=lambda s: (len(s), s))
    cols = [s for s in supports if len(s) == k + 1]
    rows = [s for s in supports if len(s) == k + 2]
    col_off = np.concatenate(([0], np.cumsum([f.stalk_dim[s] for s in cols]))).astype(int)
    row_off = np.concatenate(([0], np.cumsum([f.stalk_dim[s] for s in rows]))).astype(int)
    col_at = {s: i for i, s in enumerate(cols)}
    out = np.zeros((row_off[-1], col_off[-1]))
    for i, z in enumerate(rows):
        for l in range(len(z)):
            y = z[:l] + z[l + 1 :]
            j = col_at[y]
            block = f.hasse_maps[(y, z)]
            sign = 1.0 if l % 2 == 0 else -1.0
            out[row_off[i] : row_off[i + 1], col_off[j] : col_off[j + 1]] = sign * block
    return out
