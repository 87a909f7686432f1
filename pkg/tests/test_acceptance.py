"""Acceptance gate: one test and one PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``.
"""

import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from hyplap.complex import VARIANTS, coboundary
from hyplap.hypergraph import support_poset
from hyplap.instances import acceptance_hypergraphs, figure_one, random_asc, sheaf_family, single_edge, triangle
from hyplap.laplacian import harmonic_residuals, laplacian, spectral_report
from hyplap.sheaf import constant_sheaf, twisted_sheaf
from hyplap.simplices import enumerate_simplices, verify_cech

from oracles import brute_simplices, brute_supports, straight_line_ordered_coboundary

TOL_DD = 1e-12
TOL_FORMULA = 1e-10
TOL_HARMONIC = 1e-9
TOL_SPECTRUM = 1e-8
TOL_GAUGE = 1e-8
COUNT_SECONDS = 1.0
DD_SECONDS = 30.0
DEGREES = range(3)


def line(name: str, passed: bool, detail: str) -> str:
    return f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"


@pytest.fixture
def report(capsys):
    def emit(name: str, passed: bool, detail: str) -> None:
        with capsys.disabled():
            print("\n" + line(name, passed, detail))

    return emit


@lru_cache(maxsize=None)
def instances():
    out = []
    for i, (hname, h) in enumerate(acceptance_hypergraphs()):
        for sname, f in sheaf_family(h, seed=100 + i):
            out.append((f"{hname}/{sname}", f))
    return tuple(out)


def max_abs(m) -> float:
    if hasattr(m, "nnz"):
        return float(abs(m).max()) if m.nnz else 0.0
    return float(np.abs(m).max()) if m.size else 0.0


def test_figure_one_counts(report):
    h = figure_one()
    start = time.perf_counter()
    counts = [len(enumerate_simplices(h, k)) for k in range(3)]
    n_supports = len(support_poset(h))
    elapsed = time.perf_counter() - start
    oracle = [len(brute_simplices(h, k)) for k in range(3)]
    oracle_supports = len(brute_supports(h))
    passed = (
        counts == oracle == [6, 28, 120] and n_supports == oracle_supports == 27 and elapsed < COUNT_SECONDS
    )
    report(
        "figure-1 counts",
        passed,
        f"simplices {counts} (oracle {oracle}), supports {n_supports} (oracle {oracle_supports}), {elapsed:.3f}s",
    )
    assert passed


def test_coboundary_squares_to_zero(report):
    start = time.perf_counter()
    worst = 0.0
    for _, f in instances():
        for variant in VARIANTS:
            for k in (0, 1):
                dd = coboundary(f, k + 1, variant).matrix @ coboundary(f, k, variant).matrix
                worst = max(worst, max_abs(dd))
    elapsed = time.perf_counter() - start
    passed = worst <= TOL_DD and elapsed < DD_SECONDS
    report("coboundary squared", passed, f"max |dd| = {worst:.2e} over {len(instances())} instances, {elapsed:.1f}s")
    assert passed


def test_formula_matches_oracle(report):
    worst, where = 0.0, None
    for name, f in instances():
        for variant in VARIANTS:
            for k in DEGREES:
                gap = max_abs(laplacian(f, k, variant, "oracle").matrix - laplacian(f, k, variant, "formula").matrix)
                if gap > worst:
                    worst, where = gap, (name, variant, k)
    passed = worst <= TOL_FORMULA
    report("formula vs oracle Laplacian", passed, f"max entry gap {worst:.2e} at {where}")
    assert passed


@lru_cache(maxsize=None)
def spectra():
    return {
        (name, variant, k): spectral_report(f, k, variant)
        for name, f in instances()
        for variant in VARIANTS
        for k in DEGREES
    }


def test_betti_equal_across_variants(report):
    bad = []
    for name, _ in instances():
        for k in DEGREES:
            b = {spectra()[(name, v, k)].betti for v in VARIANTS}
            ranks = {spectra()[(name, v, k)].rank_betti for v in VARIANTS}
            if len(b) != 1 or b != ranks:
                bad.append((name, k, b, ranks))
    passed = not bad
    report("betti across variants", passed, f"{len(instances())} instances, degrees 0-2, mismatches {bad[:3]}")
    assert passed


def test_harmonic_vectors_satisfy_kernel_identity(report):
    worst, count = 0.0, 0
    for (name, variant, k), r in spectra().items():
        f = dict(instances())[name]
        up, down = harmonic_residuals(f, k, variant, r.harmonic)
        worst = max(worst, up, down)
        count += r.harmonic.shape[1]
    passed = worst <= TOL_HARMONIC
    report("harmonic kernel identity", passed, f"{count} harmonic vectors, max residual {worst:.2e}")
    assert passed


def test_simplicial_complex_coboundary_is_exact(report):
    rng = np.random.default_rng(77)
    mismatches, checked = [], 0
    for i in range(10):
        h = random_asc(rng)
        f = twisted_sheaf(h, 2, seed=i)
        for k in range(2):
            ours = coboundary(f, k, "ordered").toarray()
            ref = straight_line_ordered_coboundary(f, k)
            checked += 1
            if not np.array_equal(ours, ref):
                mismatches.append((i, k))
    passed = not mismatches
    report("simplicial complex coboundary", passed, f"{checked} matrices bitwise equal, mismatches {mismatches}")
    assert passed


def test_cech_verification(report):
    failed = []
    for name, h in acceptance_hypergraphs():
        r = verify_cech(h, 3)
        if not r.passed:
            failed.append((name, r.witnesses[:2]))
    passed = not failed
    report("closed and cech", passed, f"{len(acceptance_hypergraphs())} hypergraphs up to degree 3, failures {failed}")
    assert passed


def test_concrete_spectra(report):
    edge = spectral_report(constant_sheaf(single_edge(), 1), 0, "ordered").eigenvalues
    tri = spectral_report(constant_sheaf(triangle(), 1), 1, "ordered").eigenvalues
    # hand-checked: [[1,-1],[-1,1]] and the 3-cycle's 3x3 down-Laplacian
    ok_edge = edge.shape == (2,) and np.allclose(edge, [0, 2], rtol=0, atol=TOL_SPECTRUM)
    ok_tri = tri.shape == (3,) and np.allclose(tri, [0, 3, 3], rtol=0, atol=TOL_SPECTRUM)
    passed = ok_edge and ok_tri
    report("concrete spectra", passed, f"single edge {np.round(edge, 12)}, triangle {np.round(tri, 12)}")
    assert passed


def test_gauge_invariance(report):
    worst, where = 0.0, None
    for i, (name, h) in enumerate(acceptance_hypergraphs()):
        poset = support_poset(h)
        plain, twisted = constant_sheaf(h, 2, poset), twisted_sheaf(h, 2, 500 + i, poset)
        for variant in VARIANTS:
            for k in DEGREES:
                x = spectral_report(plain, k, variant).eigenvalues
                y = spectral_report(twisted, k, variant).eigenvalues
                if x.shape != y.shape:
                    worst, where = np.inf, (name, variant, k)
                    continue
                rel = max_abs(x - y) / max(1.0, max_abs(x))
                if rel > worst:
                    worst, where = rel, (name, variant, k)
    passed = worst <= TOL_GAUGE
    report("gauge invariance", passed, f"max relative spectral gap {worst:.2e} at {where}")
    assert passed


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
