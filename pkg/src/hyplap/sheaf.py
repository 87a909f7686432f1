"""Cellular sheaves of real inner-product spaces on the support poset.

Simplices with equal support are mutually related in the preorder, so a
cellular sheaf is constant on each support class; stalks and restriction maps
are therefore stored per support. Only the Hasse covers carry explicit maps;
longer restrictions are composed along a canonical chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import FunctorialityError, InputError
from .hypergraph import Hypergraph, Support, SupportPoset, support_poset

Cover = tuple[Support, Support]


@dataclass(eq=False)
class CellularSheaf:
    h: Hypergraph
    poset: SupportPoset
    stalk_dim: dict[Support, int]
    hasse_maps: dict[Cover, np.ndarray]
    gram: dict[Support, np.ndarray] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def dim(self, s: Support) -> int:
        return self.stalk_dim[s]

    @property
    def has_gram(self) -> bool:
        return self.gram is not None

    def gram_of(self, s: Support) -> np.ndarray:
        if self.gram is None or s not in self.gram:
            return np.eye(self.stalk_dim[s])
        return self.gram[s]

    def restriction(self, s: Support, t: Support) -> np.ndarray:
        """Restriction map from the stalk at ``s`` to the stalk at ``t`` (``s`` within ``t``).

        Composed along the chain that adds the missing vertices in increasing
        order, so the result is deterministic.
        """
        key = (s, t)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not set(s) <= set(t):
            raise InputError(f"{self.h.key(s)} is not contained in {self.h.key(t)}")
        if s == t:
            out = np.eye(self.stalk_dim[s])
        else:
            out = None
            cur = s
            for v in sorted(set(t) - set(s)):
                nxt = tuple(sorted(cur + (v,)))
                m = self.hasse_maps[(cur, nxt)]
                out = m if out is None else m @ out
                cur = nxt
        out.flags.writeable = False
        self._cache[key] = out
        return out


def restriction(f: CellularSheaf, s: Support, t: Support) -> np.ndarray:
    return f.restriction(s, t)


def squares(poset: SupportPoset) -> Iterable[tuple[Support, Support, Support, Support]]:
    """Commuting squares ``s < s+a, s+b < s+a+b`` of the support poset."""
    for top in poset.nodes:
        if len(top) < 3:
            continue
        for i in range(len(top)):
            for j in range(i + 1, len(top)):
                a, b = top[i], top[j]
                base = tuple(v for v in top if v not in (a, b))
                sa = tuple(sorted(base + (a,)))
                sb = tuple(sorted(base + (b,)))
                yield base, sa, sb, top


def functoriality_residual(f: CellularSheaf) -> tuple[float, tuple | None]:
    """Worst entrywise disagreement over all squares, with the offending square."""
    worst, where = 0.0, None
    for base, sa, sb, top in squares(f.poset):
        left = f.hasse_maps[(sa, top)] @ f.hasse_maps[(base, sa)]
        right = f.hasse_maps[(sb, top)] @ f.hasse_maps[(base, sb)]
        if left.size == 0:
            continue
        r = float(np.max(np.abs(left - right)))
        if r > worst:
            worst, where = r, (base, sa, sb, top)
    return worst, where


def validate_sheaf(f: CellularSheaf, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    for s in f.poset.nodes:
        if s not in f.stalk_dim:
            raise InputError(f"missing stalk for {f.h.key(s)}")
        if f.stalk_dim[s] < 0:
            raise InputError(f"negative stalk dimension at {f.h.key(s)}")
    for s, t in f.poset.covers:
        if (s, t) not in f.hasse_maps:
            raise InputError(f"missing map {f.h.key(s)}->{f.h.key(t)}")
        shape = (f.stalk_dim[t], f.stalk_dim[s])
        if f.hasse_maps[(s, t)].shape != shape:
            raise InputError(
                f"map {f.h.key(s)}->{f.h.key(t)} has shape "
                f"{f.hasse_maps[(s, t)].shape}, expected {shape}"
            )
    if f.gram is not None:
        for s, g in f.gram.items():
            d = f.stalk_dim[s]
            if g.shape != (d, d):
                raise InputError(f"gram at {f.h.key(s)} has shape {g.shape}, expected {(d, d)}")
            if d and (np.max(np.abs(g - g.T)) > tol.tol_fun or np.linalg.eigvalsh(g)[0] <= 0):
                raise InputError(f"gram at {f.h.key(s)} is not symmetric positive definite")
    worst, where = functoriality_residual(f)
    if worst > tol.tol_fun:
        raise FunctorialityError(" < ".join(f.h.key(s) for s in where), worst)


def _matrix(value, shape, label) -> np.ndarray:
    try:
        m = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{label} is not a numeric matrix") from None
    if m.size == 0 and shape[0] * shape[1] == 0:
        return np.zeros(shape)
    if m.shape != shape:
        raise InputError(f"{label} has shape {m.shape}, expected {shape}")
    return m


def load_sheaf(
    text: str,
    h: Hypergraph,
    poset: SupportPoset | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CellularSheaf:
    """Read the sheaf JSON document and validate it against the support poset."""
    poset = poset if poset is not None else support_poset(h)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict) or "stalks" not in doc:
        raise InputError("missing key 'stalks'")

    def node(key: str) -> Support:
        s = h.support(key.split("|"))
        if s not in poset:
            raise InputError(f"{key!r} is not a support of the hypergraph")
        return s

    dims: dict[Support, int] = {}
    for key, d in doc["stalks"].items():
        if not isinstance(d, int) or isinstance(d, bool):
            raise InputError(f"stalk {key!r} must be an integer dimension")
        dims[node(key)] = d
    for s in poset.nodes:
        if s not in dims:
            raise InputError(f"missing stalk for {h.key(s)!r}")

    covers = set(poset.covers)
    maps: dict[Cover, np.ndarray] = {}
    for key, value in doc.get("maps", {}).items():
        if "->" not in key:
            raise InputError(f"map key {key!r} must look like 'S->T'")
        a, b = key.split("->", 1)
        s, t = node(a), node(b)
        if (s, t) not in covers:
            raise InputError(f"map key {key!r} is not a cover relation")
        maps[(s, t)] = _matrix(value, (dims[t], dims[s]), f"map {key!r}")
    for s, t in poset.covers:
        if (s, t) not in maps:
            raise InputError(f"missing map {h.key(s)}->{h.key(t)}")

    gram = None
    if doc.get("gram"):
        gram = {}
        for key, value in doc["gram"].items():
            s = node(key)
            gram[s] = _matrix(value, (dims[s], dims[s]), f"gram {key!r}")
    f = CellularSheaf(h, poset, dims, maps, gram)
    validate_sheaf(f, tol)
    return f


def dump_sheaf(f: CellularSheaf) -> str:
    h = f.h
    doc = {
        "stalks": {h.key(s): f.stalk_dim[s] for s in f.poset.nodes},
        "maps": {
            f"{h.key(s)}->{h.key(t)}": f.hasse_maps[(s, t)].tolist() for s, t in f.poset.covers
        },
    }
    if f.gram is not None:
        doc["gram"] = {h.key(s): g.tolist() for s, g in f.gram.items()}
    return json.dumps(doc)


# -- generators -------------------------------------------------------------

MAX_CONDITION = 1e4


def constant_sheaf(h: Hypergraph, d: int, poset: SupportPoset | None = None) -> CellularSheaf:
    poset = poset if poset is not None else support_poset(h)
    eye = np.eye(d)
    eye.flags.writeable = False
    return CellularSheaf(h, poset, {s: d for s in poset.nodes}, {c: eye for c in poset.covers})


def gauge_frames(poset: SupportPoset, d: int, seed: int) -> dict[Support, np.ndarray]:
    """One random orthogonal frame per support.

    A uniform [-1, 1] draw is rejected when badly conditioned, then replaced by
    the orthogonal factor of its QR decomposition (sign-normalised) so that the
    gauge is an isometry of each stalk.
    """
    rng = np.random.default_rng(seed)
    frames = {}
    for s in poset.nodes:
        while True:
            a = rng.uniform(-1.0, 1.0, size=(d, d))
            if d == 0 or np.linalg.cond(a) <= MAX_CONDITION:
                break
        q, r = np.linalg.qr(a)
        frames[s] = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    return frames


def twisted_sheaf(h: Hypergraph, d: int, seed: int, poset: SupportPoset | None = None) -> CellularSheaf:
    poset = poset if poset is not None else support_poset(h)
    q = gauge_frames(poset, d, seed)
    maps = {(s, t): q[t] @ q[s].T for s, t in poset.covers}
    return CellularSheaf(h, poset, {s: d for s in poset.nodes}, maps)


def skyscraper_sheaf(
    h: Hypergraph, base: Support, d: int, poset: SupportPoset | None = None
) -> CellularSheaf:
    """Stalk R^d on every support containing ``base``, zero elsewhere."""
    poset = poset if poset is not None else support_poset(h)
    if base not in poset:
        raise InputError(f"skyscraper base {h.key(base)!r} is not a support")
    inside = {s: set(base) <= set(s) for s in poset.nodes}
    dims = {s: d if inside[s] else 0 for s in poset.nodes}
    maps = {}
    for s, t in poset.covers:
        maps[(s, t)] = np.eye(d) if inside[s] else np.zeros((dims[t], 0))
    return CellularSheaf(h, poset, dims, maps)


def direct_sum(*summands: CellularSheaf) -> CellularSheaf:
    first = summands[0]
    poset = first.poset
    dims = {s: sum(f.stalk_dim[s] for f in summands) for s in poset.nodes}
    maps = {c: scipy.linalg.block_diag(*(f.hasse_maps[c] for f in summands)) for c in poset.covers}
    for c, m in maps.items():
        maps[c] = m.reshape(dims[c[1]], dims[c[0]])
    gram = None
    if any(f.has_gram for f in summands):
        gram = {
            s: scipy.linalg.block_diag(*(f.gram_of(s) for f in summands)).reshape(dims[s], dims[s])
            for s in poset.nodes
        }
    return CellularSheaf(first.h, poset, dims, maps, gram)


def parse_generator(spec: str) -> tuple[str, dict]:
    """Parse ``KIND:PARAMS``, e.g. ``twisted:d=2,seed=7`` or
    ``direct_sum:constant:d=1+skyscraper:base=a|b,d=1``."""
    kind, _, rest = spec.partition(":")
    if kind == "direct_sum":
        parts = [p for p in rest.split("+") if p]
        if len(parts) < 2:
            raise InputError("direct_sum needs at least two summands joined by '+'")
        return kind, {"summands": [parse_generator(p) for p in parts]}
    params: dict = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise InputError(f"generator parameter {item!r} must be key=value")
        params[key.strip()] = value.strip()
    return kind, params


def _int_param(params: Mapping, key: str, default=None) -> int:
    if key not in params:
        if default is None:
            raise InputError(f"generator parameter {key!r} is required")
        return default
    try:
        value = int(params[key])
    except (TypeError, ValueError):
        raise InputError(f"generator parameter {key!r} must be an integer") from None
    if value < 0:
        raise InputError(f"generator parameter {key!r} must be nonnegative")
    return value


def generate_sheaf(
    kind: str,
    params: Mapping,
    seed: int,
    h: Hypergraph,
    poset: SupportPoset | None = None,
) -> CellularSheaf:
    poset = poset if poset is not None else support_poset(h)
    if kind == "constant":
        return constant_sheaf(h, _int_param(params, "d"), poset)
    if kind == "twisted":
        return twisted_sheaf(h, _int_param(params, "d"), _int_param(params, "seed", seed), poset)
    if kind == "skyscraper":
        base = params.get("base")
        if base is None:
            raise InputError("generator parameter 'base' is required")
        names = base.split("|") if isinstance(base, str) else list(base)
        return skyscraper_sheaf(h, h.support(names), _int_param(params, "d", 1), poset)
    if kind == "direct_sum":
        summands = params.get("summands") or []
        if len(summands) < 2:
            raise InputError("direct_sum needs at least two summands")
        return direct_sum(
            *(generate_sheaf(k, p, seed + i, h, poset) for i, (k, p) in enumerate(summands))
        )
    raise InputError(f"unknown sheaf generator {kind!r}")


# -- sections ---------------------------------------------------------------


def null_space(a: np.ndarray, tol_rank: float) -> np.ndarray:
    """Orthonormal kernel basis; singular values below tol_rank*max(1, smax) count as zero."""
    n = a.shape[1]
    if a.shape[0] == 0 or n == 0:
        return np.eye(n)
    _, sv, vt = np.linalg.svd(a)
    cutoff = tol_rank * max(1.0, sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > cutoff))
    return vt[rank:].T.copy()


def sections(
    f: CellularSheaf, generators: Iterable[Support], tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[int, np.ndarray]:
    """Sections over the union of the basic opens of ``generators``.

    A section is a family of stalk vectors compatible with every restriction
    inside the open set. The open set is up-closed, so compatibility along its
    Hasse covers already implies it for every comparable pair.
    """
    gens = list(generators)
    if not gens:
        raise InputError("open set must have at least one generator")
    members: set[Support] = set()
    for g in gens:
        if g not in f.poset:
            raise InputError(f"{f.h.key(g)!r} is not a support")
        members.update(f.poset.up(g))
    nodes = [s for s in f.poset.nodes if s in members]
    offset, pos = {}, 0
    for s in nodes:
        offset[s] = pos
        pos += f.stalk_dim[s]
    rows = []
    for s, t in f.poset.covers:
        if s in members and t in members:
            block = np.zeros((f.stalk_dim[t], pos))
            block[:, offset[s] : offset[s] + f.stalk_dim[s]] = f.hasse_maps[(s, t)]
            block[:, offset[t] : offset[t] + f.stalk_dim[t]] -= np.eye(f.stalk_dim[t])
            rows.append(block)
    a = np.vstack(rows) if rows else np.zeros((0, pos))
    basis = null_space(a, tol.tol_rank)
    return basis.shape[1], basis
