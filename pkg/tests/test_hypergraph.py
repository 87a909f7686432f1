import json

import pytest

from hyplap.errors import InputError, LimitError
from hyplap.hypergraph import (
    build_hypergraph,
    extended_structure,
    parse_hypergraph,
    serialize_hypergraph,
    support_poset,
)
from hyplap.instances import figure_one, single_edge

from oracles import brute_supports

FIG1 = '{"vertices":["v0","v1","v2","v3","v4","v5"],"edges":{"e":["v0","v1","v2","v3"],"e2":["v2","v3","v4","v5"]}}'


def test_parse_figure_one():
    h = parse_hypergraph(FIG1)
    assert h.n_vertices == 6
    assert len(h.edges) == 2
    assert h.edges["e"] == (0, 1, 2, 3)


def test_parse_single_edge():
    h = parse_hypergraph('{"vertices":["a","b"],"edges":{"ab":["a","b"]}}')
    assert h.vertices == ("a", "b")
    assert h.edges == {"ab": (0, 1)}


def test_edge_with_one_vertex_rejected():
    with pytest.raises(InputError, match="edge 'bad' has fewer than 2 distinct vertices"):
        parse_hypergraph('{"vertices":["a"],"edges":{"bad":["a"]}}')


def test_repeated_vertex_in_edge_counts_once():
    with pytest.raises(InputError, match="fewer than 2 distinct"):
        parse_hypergraph('{"vertices":["a","b"],"edges":{"bad":["a","a"]}}')


@pytest.mark.parametrize(
    "text, message",
    [
        ("{", "malformed JSON"),
        ('{"vertices":["a"]}', "missing key 'edges'"),
        ('{"vertices":["a","a"],"edges":{}}', "duplicate"),
        ('{"vertices":["a","b"],"edges":{"x":["a","c"]}}', "unknown vertex 'c'"),
        ('{"vertices":["a","b"],"edges":{"x":["a","b"],"x":["a","b"]}}', "duplicate"),
        ('{"vertices":["a","b"],"edges":{"a":["a","b"]}}', "a"),
    ],
)
def test_malformed_documents(text, message):
    with pytest.raises(InputError, match=message):
        parse_hypergraph(text)


def test_vertices_are_sorted_by_default():
    h = parse_hypergraph('{"vertices":["c","a","b"],"edges":{"x":["c","a"]}}')
    assert h.vertices == ("a", "b", "c")
    assert h.edges["x"] == (0, 2)


def test_explicit_vertex_order():
    h = parse_hypergraph('{"vertices":["a","b","c"],"edges":{"x":["c","a"]}}', order=["c", "b", "a"])
    assert h.vertices == ("c", "b", "a")
    assert h.edges["x"] == (0, 2)
    with pytest.raises(InputError):
        parse_hypergraph('{"vertices":["a","b"],"edges":{}}', order=["a"])


def test_serialize_round_trip():
    h = figure_one()
    again = parse_hypergraph(serialize_hypergraph(h))
    assert again == h
    assert json.loads(serialize_hypergraph(h)) == json.loads(FIG1)


def test_extended_structure():
    h = figure_one()
    assert extended_structure(h, "e") == (0, 1, 2, 3)
    assert extended_structure(h, "v4") == (4,)
    with pytest.raises(InputError, match="unknown"):
        extended_structure(h, "nope")


def test_support_poset_figure_one_matches_oracle():
    h = figure_one()
    poset = support_poset(h)
    # 15 + 15 - 3 nonempty subsets
    assert len(poset) == len(brute_supports(h)) == 27
    assert set(poset.nodes) == set(brute_supports(h))


def test_support_poset_single_edge():
    poset = support_poset(single_edge())
    assert list(poset.nodes) == [(0,), (1,), (0, 1)]
    assert sorted(poset.covers) == [((0,), (0, 1)), ((1,), (0, 1))]


def test_isolated_vertex_has_no_cover_above():
    h = build_hypergraph(["a", "b", "c"], {"ab": ["a", "b"]})
    poset = support_poset(h)
    assert (2,) in poset
    assert poset.up((2,)) == [(2,)]
    assert not any(s == (2,) for s, _ in poset.covers)
    assert sorted(h.maximal_supports()) == [(0, 1), (2,)]


def test_covers_generate_inclusion():
    h = figure_one()
    poset = support_poset(h)
    above = {s: {s} for s in poset.nodes}
    for s in reversed(poset.nodes):
        for a, b in poset.covers:
            if a == s:
                above[s] |= above[b]
    for s in poset.nodes:
        assert above[s] == {t for t in poset.nodes if set(s) <= set(t)}
    for s, t in poset.covers:
        assert len(t) == len(s) + 1


def test_support_poset_cap():
    with pytest.raises(LimitError, match="exceeds cap 10"):
        support_poset(figure_one(), cap=10)


def test_neighbourhood():
    h = build_hypergraph(["a", "b", "c", "d"], {"ab": ["a", "b"], "bc": ["b", "c"]})
    assert h.neighbourhood((1,)) == frozenset({0, 1, 2})
    assert h.neighbourhood((0, 1)) == frozenset({0, 1})
    assert h.neighbourhood((3,)) == frozenset({3})
