"""Adjoints, Hodge Laplacians, spectra and harmonic cochains.

Two independent routes build the degree-k Laplacian:

* ``oracle``  - products of assembled coboundaries and their adjoints;
* ``formula`` - entry-by-entry assembly from the closed-form sums over
  coface insertions ``y v_l v`` and faces ``d_l``, without ever forming a
  coboundary matrix.

For the alternating variant the oracle is the ambient unordered Laplacian
restricted to alternating cochains, read back in increasing-tuple
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complex import (
    AssembledMatrix,
    CochainSpace,
    _check_variant,
    alt_inclusion,
    coboundary,
    cochain_space,
    increasing_readout,
)
from .config import DEFAULT_BASIS_CAP, DEFAULT_TOLERANCES, Tolerances
from .errors import InputError, UnsupportedError
from .sheaf import CellularSheaf
from .simplices import Simplex, face, support_of

DENSE_LIMIT = 2000
SPARSE_EIGENPAIRS = 32


@dataclass(eq=False)
class InnerProductStructure:
    """Block-diagonal Gram matrix of a cochain space.

    Alternating cochains carry the inner product they inherit as unordered
    cochains, which is ``(k+1)!`` times the blockwise stalk product in
    increasing-tuple coordinates.
    """

    space: CochainSpace
    gram: sp.csr_matrix
    identity: bool

    def inverse(self) -> sp.csr_matrix:
        if self.identity:
            return self.gram
        blocks = [np.linalg.inv(b) for b in _blocks(self.gram, self.space)]
        return sp.csr_matrix(sp.block_diag(blocks, format="csr")) if blocks else self.gram


def _blocks(g: sp.csr_matrix, space: CochainSpace) -> list[np.ndarray]:
    dense = []
    for i, d in enumerate(space.dims):
        if d:
            a, b = space.offsets[i], space.offsets[i + 1]
            dense.append(g[a:b, a:b].toarray())
    return dense


def inner_product(f: CellularSheaf, space: CochainSpace) -> InnerProductStructure:
    scale = float(factorial(space.degree + 1)) if space.variant == "alternating" else 1.0
    n = space.total_dim
    if not f.has_gram:
        return InnerProductStructure(space, sp.identity(n, format="csr") * scale, scale == 1.0)
    blocks = [f.gram_of(support_of(s)) * scale for s, d in zip(space.simplices, space.dims) if d]
    g = sp.csr_matrix(sp.block_diag(blocks, format="csr")) if blocks else sp.csr_matrix((n, n))
    return InnerProductStructure(space, g, False)


def adjoint(
    delta: AssembledMatrix,
    ip_dom: InnerProductStructure | None = None,
    ip_cod: InnerProductStructure | None = None,
) -> AssembledMatrix:
    """``G_dom^{-1} delta^T G_cod``; plain transpose when both products are standard."""
    dt = delta.matrix.T.tocsr()
    if ip_dom is not None and ip_dom.space.total_dim != delta.cols.total_dim:
        raise InputError("domain inner product does not match the coboundary")
    if ip_cod is not None and ip_cod.space.total_dim != delta.rows.total_dim:
        raise InputError("codomain inner product does not match the coboundary")
    if ip_cod is not None and not ip_cod.identity:
        dt = dt @ ip_cod.gram
    if ip_dom is not None and not ip_dom.identity:
        dt = ip_dom.inverse() @ dt
    return AssembledMatrix(delta.cols, delta.rows, sp.csr_matrix(dt))


def variant_adjoint(f: CellularSheaf, k: int, variant: str, cap: int = DEFAULT_BASIS_CAP) -> AssembledMatrix:
    """Adjoint of the degree-k coboundary for the variant's own inner products."""
    delta = coboundary(f, k, variant, cap)
    return adjoint(delta, inner_product(f, delta.cols), inner_product(f, delta.rows))


def _finish(m, space: CochainSpace) -> AssembledMatrix:
    m = sp.csr_matrix(m)
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return AssembledMatrix(space, space, m)


def laplacian_parts(
    f: CellularSheaf, k: int, variant: str, cap: int = DEFAULT_BASIS_CAP
) -> tuple[AssembledMatrix, AssembledMatrix]:
    """Oracle up- and down-Laplacians ``(delta^* delta, delta delta^*)``."""
    _check_variant(variant)
    if variant == "alternating":
        e = alt_inclusion(f, k, cap).matrix
        p = increasing_readout(f, k, cap).matrix
        up, down = laplacian_parts(f, k, "unordered", cap)
        space = cochain_space(f, k, "alternating", cap)
        return _finish(p @ up.matrix @ e, space), _finish(p @ down.matrix @ e, space)
    space = cochain_space(f, k, variant, cap)
    delta = coboundary(f, k, variant, cap)
    up = variant_adjoint(f, k, variant, cap).matrix @ delta.matrix
    if k == 0:
        down = sp.csr_matrix((space.total_dim, space.total_dim))
    else:
        down = coboundary(f, k - 1, variant, cap).matrix @ variant_adjoint(f, k - 1, variant, cap).matrix
    return _finish(up, space), _finish(down, space)


def laplacian(
    f: CellularSheaf,
    k: int,
    variant: str,
    route: str = "oracle",
    cap: int = DEFAULT_BASIS_CAP,
) -> AssembledMatrix:
    _check_variant(variant)
    if route == "oracle":
        up, down = laplacian_parts(f, k, variant, cap)
        return _finish(up.matrix + down.matrix, up.rows)
    if route == "formula":
        return formula_laplacian(f, k, variant, cap)
    raise InputError(f"unknown route {route!r}; choose 'oracle' or 'formula'")


# -- closed-form assembly ----------------------------------------------------


class _Blocks:
    def __init__(self, space: CochainSpace):
        self.space = space
        self.acc: dict[tuple[int, int], np.ndarray] = {}

    def add(self, y: Simplex, w: Simplex, block: np.ndarray) -> None:
        if block.size == 0:
            return
        key = (self.space.index[y], self.space.index[w])
        if key in self.acc:
            self.acc[key] = self.acc[key] + block
        else:
            self.acc[key] = block

    def build(self) -> AssembledMatrix:
        space = self.space
        rows, cols, vals = [], [], []
        for (i, j), block in self.acc.items():
            r0, c0 = space.offsets[i], space.offsets[j]
            rr, cc = np.meshgrid(
                np.arange(r0, r0 + block.shape[0]), np.arange(c0, c0 + block.shape[1]), indexing="ij"
            )
            rows.append(rr.ravel())
            cols.append(cc.ravel())
            vals.append(block.ravel())
        n = space.total_dim
        if rows:
            m = sp.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
            )
        else:
            m = sp.coo_matrix((n, n))
        return _finish(m, space)


def _insert(y: Simplex, v: int, l: int) -> Simplex:
    return y[:l] + (v,) + y[l:]


def _alt_coordinate(t: Simplex) -> tuple[Simplex, int] | None:
    """Express an alternating cochain's value at ``t`` via its increasing reordering."""
    if len(set(t)) < len(t):
        return None
    inversions = sum(1 for i in range(len(t)) for j in range(i + 1, len(t)) if t[i] > t[j])
    return tuple(sorted(t)), -1 if inversions % 2 else 1


def formula_laplacian(
    f: CellularSheaf,
    k: int,
    variant: str,
    cap: int = DEFAULT_BASIS_CAP,
    down_scope: str = "face",
) -> AssembledMatrix:
    """Entrywise closed-form Laplacian (orthonormal stalk bases only).

    The down part of row ``y`` sums insertions ``d_l(y) v_l' v`` over the
    neighbourhood of the face ``d_l(y)``. ``down_scope="simplex"`` instead uses
    the neighbourhood of ``y`` itself; that misses cofaces of faces whose
    support is smaller than ``y``'s and is kept only so tests can show the
    difference.
    """
    _check_variant(variant)
    if f.has_gram:
        raise UnsupportedError("formula route requires identity stalk inner products")
    if down_scope not in ("face", "simplex"):
        raise InputError(f"unknown down_scope {down_scope!r}")
    space = cochain_space(f, k, variant, cap)
    cochain_space(f, k + 1, variant, cap)  # cap check on the coface degree
    h = f.h
    res = f.restriction
    acc = _Blocks(space)

    def hood(s: Simplex) -> list[int]:
        return sorted(h.neighbourhood(s))

    for y in space.simplices:
        sy = support_of(y)
        vy = hood(sy)
        faces = [face(y, l) for l in range(k + 1)] if k > 0 else []

        if variant == "unordered":
            for v in vy:
                for l in range(k + 2):
                    z = _insert(y, v, l)
                    sz = support_of(z)
                    left = res(sy, sz).T
                    for lp in range(k + 2):
                        w = face(z, lp)
                        sign = -1.0 if (l + lp) % 2 else 1.0
                        acc.add(y, w, sign * (left @ res(support_of(w), sz)))
            for l, w in enumerate(faces):
                sw = support_of(w)
                left = res(sw, sy)
                for v in hood(sw) if down_scope == "face" else vy:
                    for lp in range(k + 1):
                        u = _insert(w, v, lp)
                        sign = -1.0 if (l + lp) % 2 else 1.0
                        acc.add(y, u, sign * (left @ res(sw, support_of(u)).T))

        elif variant == "alternating":
            for v in vy:
                z = (v,) + y
                sz = support_of(z)
                left = res(sy, sz).T
                for l in range(k + 2):
                    coord = _alt_coordinate(face(z, l))
                    if coord is None:
                        continue
                    w, sgn = coord
                    sign = -sgn if l % 2 else sgn
                    acc.add(y, w, (k + 2) * sign * (left @ res(support_of(w), sz)))
            for l, w in enumerate(faces):
                sw = support_of(w)
                left = res(sw, sy)
                for v in hood(sw) if down_scope == "face" else vy:
                    coord = _alt_coordinate((v,) + w)
                    if coord is None:
                        continue
                    u, sgn = coord
                    sign = -sgn if l % 2 else sgn
                    acc.add(y, u, (k + 1) * sign * (left @ res(sw, support_of(u)).T))

        else:  # ordered
            for v in vy:
                if v in sy:
                    continue
                lv = sum(1 for a in y if a < v)
                z = _insert(y, v, lv)
                sz = z
                left = res(sy, sz).T
                for l in range(k + 2):
                    w = face(z, l)
                    sign = -1.0 if (l + lv) % 2 else 1.0
                    acc.add(y, w, sign * (left @ res(w, sz)))
            for l, w in enumerate(faces):
                left = res(w, sy)
                for v in hood(w) if down_scope == "face" else vy:
                    if v in w:
                        continue
                    lv = sum(1 for a in w if a < v)
                    u = _insert(w, v, lv)
                    sign = -1.0 if (l + lv) % 2 else 1.0
                    acc.add(y, u, sign * (left @ res(w, u).T))
    return acc.build()


# -- spectra -----------------------------------------------------------------


@dataclass
class SpectralReport:
    degree: int
    variant: str
    eigenvalues: np.ndarray
    betti: int
    harmonic: np.ndarray
    rank_betti: int
    complete: bool = True  # False when only the lowest eigenpairs were computed

    def as_dict(self, n_eigen: int | None = None, harmonic: bool = False) -> dict:
        ev = self.eigenvalues if n_eigen is None else self.eigenvalues[:n_eigen]
        out = {
            "degree": self.degree,
            "variant": self.variant,
            "betti": self.betti,
            "rank_betti": self.rank_betti,
            "eigenvalues": [float(x) for x in ev],
            "complete_spectrum": self.complete,
        }
        if harmonic:
            out["harmonic"] = self.harmonic.tolist()
        return out


def matrix_rank(a, tol_rank: float) -> int:
    a = a.toarray() if sp.issparse(a) else np.asarray(a)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(sv > tol_rank * max(1.0, sv[0])))


def rank_nullity_betti(
    f: CellularSheaf, k: int, variant: str, tol: Tolerances = DEFAULT_TOLERANCES, cap: int = DEFAULT_BASIS_CAP
) -> int:
    """``dim C^k - rank delta^k - rank delta^{k-1}``."""
    dim = cochain_space(f, k, variant, cap).total_dim
    rank_up = matrix_rank(coboundary(f, k, variant, cap).matrix, tol.tol_rank)
    rank_down = matrix_rank(coboundary(f, k - 1, variant, cap).matrix, tol.tol_rank) if k > 0 else 0
    return dim - rank_up - rank_down


def betti_numbers(
    f: CellularSheaf, max_dim: int, variant: str, tol: Tolerances = DEFAULT_TOLERANCES, cap: int = DEFAULT_BASIS_CAP
) -> dict[int, int]:
    return {k: rank_nullity_betti(f, k, variant, tol, cap) for k in range(max_dim + 1)}


def _eig(lap: AssembledMatrix, ip: InnerProductStructure) -> tuple[np.ndarray, np.ndarray, bool]:
    n = lap.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0)), True
    if n <= DENSE_LIMIT:
        if ip.identity:
            a = lap.toarray()
            w, v = scipy.linalg.eigh((a + a.T) / 2)
        else:
            g = ip.gram.toarray()
            a = g @ lap.toarray()
            w, v = scipy.linalg.eigh((a + a.T) / 2, (g + g.T) / 2)
        return w, v, True
    a = lap.matrix if ip.identity else ip.gram @ lap.matrix
    a = ((a + a.T) / 2).tocsc()
    m = None if ip.identity else ip.gram.tocsc()
    nev = min(SPARSE_EIGENPAIRS, n - 2)
    w, v = spla.eigsh(a, k=nev, M=m, sigma=-1e-3, which="LM")
    order = np.argsort(w)
    return w[order], v[:, order], False


def spectral_report(
    f: CellularSheaf,
    k: int,
    variant: str,
    route: str = "oracle",
    tol: Tolerances = DEFAULT_TOLERANCES,
    cap: int = DEFAULT_BASIS_CAP,
) -> SpectralReport:
    lap = laplacian(f, k, variant, route, cap)
    ip = inner_product(f, lap.rows)
    w, v, complete = _eig(lap, ip)
    top = float(w[-1]) if w.size else 0.0
    if not complete:
        a = lap.matrix if ip.identity else ip.gram @ lap.matrix
        top = float(spla.eigsh(((a + a.T) / 2).tocsc(), k=1, which="LA", return_eigenvectors=False)[0])
    zero = w <= tol.tol_rank * max(1.0, top)
    return SpectralReport(
        degree=k,
        variant=variant,
        eigenvalues=w,
        betti=int(np.sum(zero)),
        harmonic=v[:, zero],
        rank_betti=rank_nullity_betti(f, k, variant, tol, cap),
        complete=complete,
    )


def harmonic_residuals(
    f: CellularSheaf, k: int, variant: str, vectors: np.ndarray, cap: int = DEFAULT_BASIS_CAP
) -> tuple[float, float]:
    """Largest ``|delta^k v|`` and ``|(delta^{k-1})^* v|`` over the given columns."""
    if vectors.size == 0:
        return 0.0, 0.0
    up = coboundary(f, k, variant, cap).matrix @ vectors
    r_up = float(np.max(np.linalg.norm(up, axis=0))) if up.size else 0.0
    r_down = 0.0
    if k > 0:
        down = variant_adjoint(f, k - 1, variant, cap).matrix @ vectors
        r_down = float(np.max(np.linalg.norm(down, axis=0))) if down.size else 0.0
    return r_up, r_down
