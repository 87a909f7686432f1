from itertools import permutations

import numpy as np
import pytest

from hyplap.complex import alt_inclusion, coboundary, cochain_space, increasing_readout
from hyplap.errors import InputError, LimitError
from hyplap.instances import figure_one, single_edge
from hyplap.sheaf import constant_sheaf, skyscraper_sheaf, twisted_sheaf
from hyplap.simplices import permutation_sign


def test_cochain_space_dimensions():
    f = constant_sheaf(single_edge(), 1)
    assert cochain_space(f, 1, "unordered").total_dim == 4
    assert cochain_space(f, 1, "ordered").total_dim == 1
    assert cochain_space(f, 1, "alternating").total_dim == 1
    assert cochain_space(constant_sheaf(figure_one(), 1), 1, "unordered").total_dim == 28


def test_cochain_space_basis_order():
    f = constant_sheaf(single_edge(), 2)
    space = cochain_space(f, 1, "unordered")
    assert space.simplices == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert space.basis()[:3] == [((0, 0), 0), ((0, 0), 1), ((0, 1), 0)]


def test_unknown_variant():
    with pytest.raises(InputError, match="unknown variant"):
        cochain_space(constant_sheaf(single_edge(), 1), 0, "cubical")


def test_cochain_cap():
    f = constant_sheaf(figure_one(), 2)
    with pytest.raises(LimitError, match="basis size 240 exceeds cap 200"):
        cochain_space(f, 2, "unordered", cap=200)


def test_single_edge_ordered_coboundary():
    delta = coboundary(constant_sheaf(single_edge(), 1), 0, "ordered")
    assert np.array_equal(delta.toarray(), [[-1.0, 1.0]])
    assert delta.triplets() == [(0, 0, -1.0), (0, 1, 1.0)]


def test_skyscraper_coboundary_is_zero():
    delta = coboundary(skyscraper_sheaf(single_edge(), (0, 1), 1), 0, "ordered")
    assert delta.shape == (1, 0)
    f = skyscraper_sheaf(single_edge(), (0, 1), 1)
    assert coboundary(f, 0, "unordered").matrix.nnz == 0


def test_unordered_degenerate_faces_cancel_literally():
    delta = coboundary(constant_sheaf(single_edge(), 1), 0, "unordered").toarray()
    # row (a, a): +a - a = 0
    assert np.array_equal(delta, [[0, 0], [-1, 1], [1, -1], [0, 0]])


def test_alt_inclusion_sign_rule():
    f = constant_sheaf(single_edge(), 1)
    e = alt_inclusion(f, 1).toarray()
    assert np.array_equal(e[:, 0], [0, 1, -1, 0])
    assert np.array_equal(alt_inclusion(f, 0).toarray(), np.eye(2))
    assert np.array_equal(increasing_readout(f, 1).toarray(), [[0, 1, 0, 0]])


@pytest.mark.parametrize("k", [0, 1, 2])
def test_alt_inclusion_image_is_alternating(k):
    f = twisted_sheaf(figure_one(), 2, 4)
    e = alt_inclusion(f, k)
    full = e.rows
    image = e.toarray()
    for s in full.simplices:
        for g in permutations(range(k + 1)):
            gs = tuple(s[i] for i in g)
            assert np.array_equal(image[full.block(gs)], permutation_sign(g) * image[full.block(s)])


@pytest.mark.parametrize("variant", ["unordered", "alternating", "ordered"])
def test_coboundary_squares_to_zero(variant):
    f = twisted_sheaf(figure_one(), 2, 9)
    for k in range(2):
        dd = coboundary(f, k + 1, variant).matrix @ coboundary(f, k, variant).matrix
        assert (abs(dd).max() if dd.nnz else 0.0) <= 1e-12


def test_alternating_matches_ordered_numerically():
    f = twisted_sheaf(figure_one(), 2, 2)
    for k in range(3):
        a = coboundary(f, k, "alternating").toarray()
        o = coboundary(f, k, "ordered").toarray()
        assert np.allclose(a, o, atol=1e-14)
