"""Command-line front end: ``hyplap <subcommand> --hypergraph H.json ...``.

Exit status: 0 success, 1 a mathematical check failed, 2 bad input or a size
limit was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import __version__
from .complex import VARIANTS, AssembledMatrix, CochainSpace, coboundary, cochain_space
from .config import DEFAULT_BASIS_CAP, DEFAULT_MAX_DIM, Tolerances
from .errors import FunctorialityError, HyplapError, InputError
from .hypergraph import Hypergraph, parse_hypergraph, serialize_hypergraph, support_poset
from .laplacian import (
    betti_numbers,
    harmonic_residuals,
    laplacian,
    matrix_rank,
    spectral_report,
)
from .sheaf import (
    CellularSheaf,
    functoriality_residual,
    generate_sheaf,
    load_sheaf,
    parse_generator,
    sections,
)
from .simplices import enumerate_simplices, verify_cech

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    hypergraph: str | None = None
    sheaf: str | None = None
    generate: str = "constant:d=1"
    max_dim: int = DEFAULT_MAX_DIM
    degree: int = 0
    variant: str | None = None
    route: str = "oracle"
    tolerances: Tolerances = field(default_factory=Tolerances)
    cap: int = DEFAULT_BASIS_CAP
    seed: int = 0
    out: str | None = None
    csv: bool = False
    vertex_order: str | None = None

    def __post_init__(self):
        if self.max_dim < 0:
            raise InputError("--max-dim must be nonnegative")
        if self.degree < 0:
            raise InputError("--degree must be nonnegative")
        if self.cap <= 0:
            raise InputError("--cap must be positive")

    def echo(self) -> dict:
        t = self.tolerances
        return {
            "hypergraph": self.hypergraph,
            "sheaf": self.sheaf,
            "generate": None if self.sheaf else self.generate,
            "max_dim": self.max_dim,
            "degree": self.degree,
            "variant": self.variant,
            "route": self.route,
            "tol_fun": t.tol_fun,
            "tol_rank": t.tol_rank,
            "tol_spec": t.tol_spec,
            "cap": self.cap,
            "seed": self.seed,
            "vertex_order": self.vertex_order,
        }


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_hypergraph(cfg: RunConfig) -> Hypergraph:
    if cfg.hypergraph is None:
        raise InputError("--hypergraph is required")
    order = None
    if cfg.vertex_order:
        text = _read(cfg.vertex_order)
        try:
            order = json.loads(text)
        except json.JSONDecodeError:
            order = text.split()
        if not isinstance(order, list):
            raise InputError("vertex order file must hold a list of vertex names")
    return parse_hypergraph(_read(cfg.hypergraph), order)


def load_input_sheaf(cfg: RunConfig, h: Hypergraph) -> CellularSheaf:
    poset = support_poset(h, cfg.cap)
    if cfg.sheaf:
        return load_sheaf(_read(cfg.sheaf), h, poset, cfg.tolerances)
    kind, params = parse_generator(cfg.generate)
    return generate_sheaf(kind, params, cfg.seed, h, poset)


def _variants(cfg: RunConfig, default=("ordered",)) -> list[str]:
    return [cfg.variant] if cfg.variant else list(default)


def _manifest(h: Hypergraph, space: CochainSpace) -> list[dict]:
    return [{"simplex": h.names(s), "coord": c} for s, c in space.basis()]


def matrix_doc(h: Hypergraph, m: AssembledMatrix, **extra) -> dict:
    return {
        **extra,
        "shape": list(m.shape),
        "rows": _manifest(h, m.rows),
        "cols": _manifest(h, m.cols),
        "triplets": [list(t) for t in m.triplets()],
    }


# -- subcommands -------------------------------------------------------------


def cmd_validate(cfg: RunConfig) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    f = load_input_sheaf(cfg, h)
    worst, _ = functoriality_residual(f)
    return EXIT_OK, {
        "hypergraph": json.loads(serialize_hypergraph(h)),
        "order": list(h.vertices),
        "supports": len(f.poset),
        "covers": len(f.poset.covers),
        "functoriality_residual": worst,
    }


def cmd_simplices(cfg: RunConfig, listing: bool = False) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    out = {}
    for k in range(cfg.max_dim + 1):
        simplices = enumerate_simplices(h, k, cfg.cap)
        entry = {"count": len(simplices)}
        if listing:
            entry["simplices"] = [h.names(s) for s in simplices]
        out[str(k)] = entry
    return EXIT_OK, {"degrees": out}


def cmd_coboundary(cfg: RunConfig) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    f = load_input_sheaf(cfg, h)
    variant = _variants(cfg)[0]
    m = coboundary(f, cfg.degree, variant, cfg.cap)
    return EXIT_OK, matrix_doc(h, m, kind="coboundary", degree=cfg.degree, variant=variant)


def cmd_laplacian(cfg: RunConfig) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    f = load_input_sheaf(cfg, h)
    variant = _variants(cfg)[0]
    m = laplacian(f, cfg.degree, variant, cfg.route, cfg.cap)
    return EXIT_OK, matrix_doc(
        h, m, kind="laplacian", degree=cfg.degree, variant=variant, route=cfg.route
    )


def cmd_betti(cfg: RunConfig) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    f = load_input_sheaf(cfg, h)
    variant = _variants(cfg)[0]
    b = betti_numbers(f, cfg.max_dim, variant, cfg.tolerances, cfg.cap)
    return EXIT_OK, {"variant": variant, "betti": {str(k): v for k, v in b.items()}}


def cmd_spectrum(cfg: RunConfig) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    f = load_input_sheaf(cfg, h)
    variant = _variants(cfg)[0]
    r = spectral_report(f, cfg.degree, variant, cfg.route, cfg.tolerances, cfg.cap)
    return EXIT_OK, r.as_dict()


def cmd_sections(cfg: RunConfig, opens: list[str]) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    f = load_input_sheaf(cfg, h)
    gens = [h.support(o.split("|")) for o in opens] or [(v,) for v in range(h.n_vertices)]
    dim, basis = sections(f, gens, cfg.tolerances)
    return EXIT_OK, {"open": [h.key(g) for g in gens], "dimension": dim}


def _check(name: str, passed: bool, **detail) -> dict:
    return {"check": name, "passed": bool(passed), **detail}


def cmd_check(cfg: RunConfig) -> tuple[int, dict]:
    """Run every invariant suite; exit 0 only when all pass."""
    tol = cfg.tolerances
    h = load_hypergraph(cfg)
    checks = []
    again = parse_hypergraph(serialize_hypergraph(h), list(h.vertices))
    checks.append(_check("hypergraph_roundtrip", again == h))

    cech = verify_cech(h, cfg.max_dim + 1, cfg.cap)
    detail = {k: v for k, v in cech.as_dict().items() if k != "passed"}
    checks.append(_check("cech_closed", cech.passed, **detail))

    try:
        f = load_input_sheaf(cfg, h)
    except FunctorialityError as exc:
        checks.append(_check("sheaf_functoriality", False, square=exc.square, residual=exc.residual))
        return EXIT_CHECK, {"passed": False, "checks": checks}
    worst, _ = functoriality_residual(f)
    checks.append(_check("sheaf_functoriality", worst <= tol.tol_fun, residual=worst))

    top = cfg.max_dim
    for variant in VARIANTS:
        residual = 0.0
        for k in range(top):
            dd = coboundary(f, k + 1, variant, cfg.cap).matrix @ coboundary(f, k, variant, cfg.cap).matrix
            residual = max(residual, float(abs(dd).max()) if dd.nnz else 0.0)
        checks.append(_check(f"coboundary_squared_{variant}", residual <= 1e-12, residual=residual))

    bettis = {}
    for variant in VARIANTS:
        if f.has_gram:
            checks.append(_check(f"formula_vs_oracle_{variant}", True, skipped="non-identity gram"))
        else:
            gap = 0.0
            for k in range(top + 1):
                a = laplacian(f, k, variant, "oracle", cfg.cap).matrix
                b = laplacian(f, k, variant, "formula", cfg.cap).matrix
                d = a - b
                gap = max(gap, float(abs(d).max()) if d.nnz else 0.0)
            checks.append(_check(f"formula_vs_oracle_{variant}", gap <= 1e-10, residual=gap))
        b, harm = {}, 0.0
        for k in range(top + 1):
            r = spectral_report(f, k, variant, "oracle", tol, cfg.cap)
            b[k] = r.betti
            harm = max(harm, *harmonic_residuals(f, k, variant, r.harmonic, cfg.cap))
            if r.betti != r.rank_betti:
                checks.append(_check(f"rank_nullity_{variant}_{k}", False, spectral=r.betti, ranks=r.rank_betti))
        bettis[variant] = b
        checks.append(_check(f"harmonic_{variant}", harm <= 1e-9, residual=harm))
    same = len({tuple(sorted(b.items())) for b in bettis.values()}) == 1
    checks.append(
        _check(
            "betti_cross_variant",
            same,
            betti={v: {str(k): n for k, n in b.items()} for v, b in bettis.items()},
        )
    )
    passed = all(c["passed"] for c in checks)
    return (EXIT_OK if passed else EXIT_CHECK), {"passed": passed, "checks": checks}


def cmd_report(cfg: RunConfig, harmonic: bool = False) -> tuple[int, dict]:
    h = load_hypergraph(cfg)
    f = load_input_sheaf(cfg, h)
    out = {}
    for variant in _variants(cfg, VARIANTS):
        per = {}
        for k in range(cfg.max_dim + 1):
            space = cochain_space(f, k, variant, cfg.cap)
            delta = coboundary(f, k, variant, cfg.cap)
            r = spectral_report(f, k, variant, "oracle", cfg.tolerances, cfg.cap)
            entry = {
                "dim": space.total_dim,
                "coboundary_nnz": int(delta.matrix.nnz),
                "betti": r.betti,
                "eigenvalues": [float(x) for x in r.eigenvalues[:8]],
            }
            if harmonic:
                entry["harmonic"] = r.harmonic.tolist()
            per[str(k)] = entry
        out[variant] = per
    return EXIT_OK, {"variants": out}


def cmd_verify(files: list[str], tol: Tolerances) -> tuple[int, dict]:
    """Betti numbers from coboundary matrices previously written by ``coboundary``."""
    by_degree: dict[int, dict] = {}
    variant = None
    for path in files:
        try:
            doc = json.loads(_read(path))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: malformed JSON: {exc}") from None
        if doc.get("kind") != "coboundary":
            raise InputError(f"{path} is not a coboundary document")
        if variant is not None and doc["variant"] != variant:
            raise InputError("coboundary files mix variants")
        variant = doc["variant"]
        by_degree[int(doc["degree"])] = doc
    ranks, dims = {}, {}
    for k, doc in by_degree.items():
        r, c = doc["shape"]
        trip = np.array(doc["triplets"], dtype=float).reshape(-1, 3)
        m = sp.coo_matrix((trip[:, 2], (trip[:, 0].astype(int), trip[:, 1].astype(int))), shape=(r, c))
        ranks[k] = matrix_rank(m, tol.tol_rank)
        dims[k], dims[k + 1] = c, r
    betti = {}
    for k in sorted(by_degree):
        if k == 0:
            betti[0] = dims[0] - ranks[0]
        elif k - 1 in ranks:
            betti[k] = dims[k] - ranks[k] - ranks[k - 1]
    return EXIT_OK, {"variant": variant, "betti": {str(k): v for k, v in betti.items()}}


# -- output ------------------------------------------------------------------


def to_csv(command: str, result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command in ("coboundary", "laplacian"):
        w.writerow(["row", "col", "value"])
        w.writerows(result["triplets"])
    elif command in ("betti", "verify"):
        w.writerow(["degree", "betti"])
        w.writerows(result["betti"].items())
    elif command == "spectrum":
        w.writerow(["index", "eigenvalue"])
        w.writerows(enumerate(result["eigenvalues"]))
    elif command == "simplices":
        w.writerow(["degree", "count"])
        w.writerows((k, v["count"]) for k, v in result["degrees"].items())
    elif command == "report":
        w.writerow(["variant", "degree", "dim", "coboundary_nnz", "betti", "eigenvalues"])
        for variant, per in result["variants"].items():
            for k, e in per.items():
                ev = ";".join(repr(x) for x in e["eigenvalues"])
                w.writerow([variant, k, e["dim"], e["coboundary_nnz"], e["betti"], ev])
    elif command == "check":
        w.writerow(["check", "passed", "residual"])
        w.writerows((c["check"], c["passed"], c.get("residual", "")) for c in result["checks"])
    elif command == "sections":
        w.writerow(["open", "dimension"])
        w.writerow([" ".join(result["open"]), result["dimension"]])
    else:
        w.writerow(["key", "value"])
        w.writerows((k, json.dumps(v)) for k, v in result.items())
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hypergraph", metavar="PATH")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--sheaf", metavar="PATH")
    src.add_argument("--generate", metavar="KIND:PARAMS", default="constant:d=1")
    common.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
    common.add_argument("--degree", type=int, default=0)
    common.add_argument("--variant", choices=VARIANTS)
    common.add_argument("--route", choices=("oracle", "formula"), default="oracle")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=DEFAULT_BASIS_CAP)
    common.add_argument("--tol-fun", type=float, default=1e-9)
    common.add_argument("--tol-rank", type=float, default=1e-9)
    common.add_argument("--tol-spec", type=float, default=1e-8)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--csv", action="store_true")
    common.add_argument("--vertex-order", metavar="PATH")

    parser = argparse.ArgumentParser(prog="hyplap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hyplap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "coboundary", "laplacian", "betti", "spectrum", "check"):
        sub.add_parser(name, parents=[common])
    sub.add_parser("simplices", parents=[common]).add_argument("--list", action="store_true")
    sub.add_parser("sections", parents=[common]).add_argument(
        "--open", action="append", default=[], metavar="SUPPORT", help="generator like 'v0|v2'"
    )
    sub.add_parser("report", parents=[common]).add_argument("--harmonic", action="store_true")
    sub.add_parser("verify", parents=[common]).add_argument("files", nargs="+", metavar="COBOUNDARY_JSON")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        hypergraph=args.hypergraph,
        sheaf=args.sheaf,
        generate=args.generate,
        max_dim=args.max_dim,
        degree=args.degree,
        variant=args.variant,
        route=args.route,
        tolerances=Tolerances(args.tol_fun, args.tol_rank, args.tol_spec),
        cap=args.cap,
        seed=args.seed,
        out=args.out,
        csv=args.csv,
        vertex_order=args.vertex_order,
    )


def execute(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    """Execute one command; returns the exit status, the rendered output and the --out path."""
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        cfg = _config(args)
        if command == "simplices":
            status, result = cmd_simplices(cfg, args.list)
        elif command == "sections":
            status, result = cmd_sections(cfg, args.open)
        elif command == "report":
            status, result = cmd_report(cfg, args.harmonic)
        elif command == "verify":
            status, result = cmd_verify(args.files, cfg.tolerances)
        else:
            status, result = globals()[f"cmd_{command}"](cfg)
    except FunctorialityError as exc:
        status, result = EXIT_CHECK, {"error": str(exc), "square": exc.square}
        cfg = None
    except (HyplapError, ValueError) as exc:
        status, result = EXIT_INPUT, {"error": str(exc)}
        cfg = None
    if cfg is not None and cfg.csv:
        text = to_csv(command, result)
    else:
        doc = {"tool": "hyplap", "version": __version__, "command": command}
        if cfg is not None:
            doc["config"] = cfg.echo()
        doc.update(result)
        text = json.dumps(doc, indent=1) + "\n"
    out = cfg.out if cfg is not None else None
    if out:
        Path(out).write_text(text, encoding="utf-8")
    return status, text, out


def run(argv: list[str] | None = None) -> tuple[int, str]:
    status, text, _ = execute(argv)
    return status, text


def main(argv: list[str] | None = None) -> int:
    status, text, out = execute(argv)
    if status == EXIT_INPUT:
        sys.stderr.write(text)
    elif not out:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
