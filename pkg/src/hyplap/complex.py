"""Cochain spaces and coboundary matrices in the three variants.

``unordered``   basis indexed by every k-simplex (all valid tuples).
``ordered``     basis indexed by strictly increasing tuples.
``alternating`` sign-equivariant unordered cochains, parameterised by their
                values on strictly increasing tuples; ``alt_inclusion`` embeds
                this parameterisation into the unordered space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
import scipy.sparse as sp

from .config import DEFAULT_BASIS_CAP
from .errors import InputError, LimitError
from .sheaf import CellularSheaf
from .simplices import Simplex, enumerate_simplices, face, increasing_simplices, permutation_sign, support_of

VARIANTS = ("unordered", "alternating", "ordered")


@dataclass(eq=False)
class CochainSpace:
    degree: int
    variant: str
    simplices: list[Simplex]
    dims: np.ndarray
    offsets: np.ndarray = field(init=False)
    index: dict[Simplex, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.offsets = np.concatenate(([0], np.cumsum(self.dims))).astype(int)
        self.index = {s: i for i, s in enumerate(self.simplices)}

    @property
    def total_dim(self) -> int:
        return int(self.offsets[-1])

    def block(self, s: Simplex) -> slice:
        i = self.index[s]
        return slice(self.offsets[i], self.offsets[i + 1])

    def basis(self) -> list[tuple[Simplex, int]]:
        """``(simplex, stalk coordinate)`` for every basis vector, in order."""
        return [(s, c) for s, d in zip(self.simplices, self.dims) for c in range(int(d))]


@dataclass(eq=False)
class AssembledMatrix:
    rows: CochainSpace
    cols: CochainSpace
    matrix: sp.csr_matrix

    def __post_init__(self):
        if self.matrix.shape != (self.rows.total_dim, self.cols.total_dim):
            raise InputError(
                f"matrix shape {self.matrix.shape} does not match spaces "
                f"({self.rows.total_dim}, {self.cols.total_dim})"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def triplets(self) -> list[tuple[int, int, float]]:
        """Nonzero entries, row-major by codomain then domain index."""
        m = self.matrix.tocoo()
        order = np.lexsort((m.col, m.row))
        return [(int(m.row[i]), int(m.col[i]), float(m.data[i])) for i in order]


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")


def cochain_space(f: CellularSheaf, k: int, variant: str, cap: int = DEFAULT_BASIS_CAP) -> CochainSpace:
    _check_variant(variant)
    key = ("space", k, variant, cap)
    if key in f._cache:
        return f._cache[key]
    if variant == "unordered":
        simplices = enumerate_simplices(f.h, k, cap)
    else:
        simplices = increasing_simplices(f.h, k, cap)
    dims = np.array([f.stalk_dim[support_of(s)] for s in simplices], dtype=int)
    total = int(dims.sum())
    if total > cap:
        raise LimitError(f"degree {k} {variant} cochains", total, cap)
    f._cache[key] = space = CochainSpace(k, variant, simplices, dims)
    return space


class _Triplets:
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, r0: int, c0: int, block: np.ndarray) -> None:
        nr, nc = block.shape
        if nr == 0 or nc == 0:
            return
        rr, cc = np.meshgrid(np.arange(r0, r0 + nr), np.arange(c0, c0 + nc), indexing="ij")
        self.rows.append(rr.ravel())
        self.cols.append(cc.ravel())
        self.vals.append(np.asarray(block, dtype=float).ravel())

    def build(self, shape: tuple[int, int]) -> sp.csr_matrix:
        if self.rows:
            r, c, v = (np.concatenate(x) for x in (self.rows, self.cols, self.vals))
        else:
            r = c = np.zeros(0, dtype=int)
            v = np.zeros(0)
        m = sp.coo_matrix((v, (r, c)), shape=shape).tocsr()
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        return m


def signed_face_matrix(f: CellularSheaf, dom: CochainSpace, cod: CochainSpace) -> sp.csr_matrix:
    """Assemble ``sum_l (-1)^l F(d_l z <= z)`` into block (z, d_l z) for every codomain z.

    Repeated faces of degenerate simplices are summed as they come; nothing is
    cancelled ahead of time.
    """
    acc = _Triplets()
    for z in cod.simplices:
        r0 = cod.offsets[cod.index[z]]
        sz = support_of(z)
        for l in range(len(z)):
            y = face(z, l)
            block = f.restriction(support_of(y), sz)
            acc.add(r0, dom.offsets[dom.index[y]], block if l % 2 == 0 else -block)
    return acc.build((cod.total_dim, dom.total_dim))


def alt_inclusion(f: CellularSheaf, k: int, cap: int = DEFAULT_BASIS_CAP) -> AssembledMatrix:
    """Embed alternating cochains (given on increasing tuples) into unordered cochains."""
    full = cochain_space(f, k, "unordered", cap)
    alt = cochain_space(f, k, "alternating", cap)
    acc = _Triplets()
    for t in alt.simplices:
        c0 = alt.offsets[alt.index[t]]
        d = f.stalk_dim[support_of(t)]
        for g in permutations(range(k + 1)):
            image = tuple(t[i] for i in g)
            acc.add(full.offsets[full.index[image]], c0, permutation_sign(g) * np.eye(d))
    return AssembledMatrix(full, alt, acc.build((full.total_dim, alt.total_dim)))


def increasing_readout(f: CellularSheaf, k: int, cap: int = DEFAULT_BASIS_CAP) -> AssembledMatrix:
    """Read off the coordinates of an unordered cochain at increasing tuples."""
    full = cochain_space(f, k, "unordered", cap)
    alt = cochain_space(f, k, "alternating", cap)
    acc = _Triplets()
    for t in alt.simplices:
        d = f.stalk_dim[support_of(t)]
        acc.add(alt.offsets[alt.index[t]], full.offsets[full.index[t]], np.eye(d))
    return AssembledMatrix(alt, full, acc.build((alt.total_dim, full.total_dim)))


def coboundary(f: CellularSheaf, k: int, variant: str, cap: int = DEFAULT_BASIS_CAP) -> AssembledMatrix:
    """The degree-k coboundary ``C^k -> C^{k+1}`` of the requested variant."""
    _check_variant(variant)
    key = ("coboundary", k, variant, cap)
    if key not in f._cache:
        f._cache[key] = _assemble_coboundary(f, k, variant, cap)
    return f._cache[key]


def _assemble_coboundary(f: CellularSheaf, k: int, variant: str, cap: int) -> AssembledMatrix:
    dom = cochain_space(f, k, variant, cap)
    cod = cochain_space(f, k + 1, variant, cap)
    if variant == "alternating":
        delta = coboundary(f, k, "unordered", cap).matrix
        m = increasing_readout(f, k + 1, cap).matrix @ delta @ alt_inclusion(f, k, cap).matrix
        m = sp.csr_matrix(m)
        m.eliminate_zeros()
        m.sort_indices()
        return AssembledMatrix(cod, dom, m)
    return AssembledMatrix(cod, dom, signed_face_matrix(f, dom, cod))
