import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from outerfp.bass_serre import translation_length
from outerfp.factor_systems import build_thistle
from outerfp.graphs import (
    StructuralError,
    build_graph,
    covolume,
    graph_from_json,
    graph_to_json,
    rank_and_factors,
    relabel,
    rescale,
    to_fraction,
    validate_graph_of_groups,
)
from outerfp.groups import FiniteGroup, GroupTableError, cyclic, group_from_json, group_from_shorthand, symmetric3
from outerfp.words import parse_word

from conftest import Z2, Z3, edge23, rose2, star3


def test_group_tables_satisfy_axioms():
    for name in ["Z1", "Z2", "Z5", "Z12", "S3"]:
        g = group_from_shorthand(name)
        assert g.associativity_violations() == []
        for a in g.elements():
            assert g.mul(a, g.inv(a)) == g.identity
    s3 = symmetric3()
    assert s3.order == 6 and any(s3.mul(a, b) != s3.mul(b, a) for a in s3.elements() for b in s3.elements())


def test_group_table_errors():
    with pytest.raises(GroupTableError):
        FiniteGroup(((0, 1), (1, 1)))
    with pytest.raises(GroupTableError):
        group_from_json({"order": 3, "table": [[0, 1], [1, 0]]})
    assert group_from_json("trivial") is None
    assert group_from_json({"order": 1, "table": [[0]]}) is None


def test_isomorphisms_count():
    assert len(list(Z3.isomorphisms_to(Z3))) == 2
    assert len(list(symmetric3().isomorphisms_to(symmetric3()))) == 6
    assert list(Z2.isomorphisms_to(Z3)) == []


def test_to_fraction_is_exact():
    assert to_fraction("1/3") == Fraction(1, 3)
    assert to_fraction("0.25") == Fraction(1, 4)
    with pytest.raises(TypeError):
        to_fraction(0.1)


def test_validate_examples():
    assert validate_graph_of_groups(edge23()).ok
    rose1 = build_graph({"c": None}, [("x", "x'", "c", "c", 1)])
    rep = validate_graph_of_groups(rose1)
    assert "free vertex of degree 2: c" in rep.messages()
    seg = build_graph({"a": Z2, "b": None}, [("e", "e'", "a", "b", 1)])
    rep = validate_graph_of_groups(seg)
    assert "degree 1 vertex is free: b" in rep.messages()
    assert rep.codes() == {"free-degree-1"}


def test_validate_structural_problems():
    bad = build_graph({"a": Z2, "b": Z2}, [("e", "e'", "a", "b", 0)])
    assert "nonpositive-length" in validate_graph_of_groups(bad).codes()
    disc = build_graph({"a": Z2, "b": Z2, "c": Z2}, [("e", "e'", "a", "b", 1)])
    assert "disconnected" in validate_graph_of_groups(disc).codes()
    tree = build_graph({"a": Z2, "b": Z2}, [("e", "e'", "a", "b", 1)], spanning_tree=[])
    assert "bad-spanning-tree" in validate_graph_of_groups(tree).codes()
    point = build_thistle([Z2], 0)
    assert "isolated-vertex" in validate_graph_of_groups(point).codes()


def _small_graphs(max_edges=3):
    """Every connected multigraph on <= 3 vertices with <= max_edges edges and
    every free/non-free labelling."""
    for nv in (1, 2, 3):
        verts = [f"u{i}" for i in range(nv)]
        pairs = [(a, b) for a, b in itertools.combinations_with_replacement(verts, 2)]
        for ne in range(1, max_edges + 1):
            for chosen in itertools.combinations_with_replacement(pairs, ne):
                edges = [(f"f{i}", f"f{i}'", a, b, 1) for i, (a, b) in enumerate(chosen)]
                for labels in itertools.product([None, Z2], repeat=nv):
                    X = build_graph(dict(zip(verts, labels)), edges)
                    if X.graph.structure_problems():
                        continue
                    yield X


def test_validate_degree_rules_exhaustive():
    count = 0
    for X in _small_graphs():
        count += 1
        g = X.graph
        expect = set()
        for v in g.vertices:
            deg = sum(1 for e in g.edges if g.initial[e] == v)
            if X.groups[v] is None and deg == 1:
                expect.add("free-degree-1")
            if X.groups[v] is None and deg == 2:
                expect.add("free-degree-2")
        assert validate_graph_of_groups(X).codes() == expect
    assert count > 100


def test_rank_and_factors():
    assert rank_and_factors(rose2(Z2)) == (1, 2)
    assert rank_and_factors(star3()) == (3, 0)
    assert rank_and_factors(build_thistle([Z2, Z3], 1)) == (2, 1)
    with pytest.raises(StructuralError):
        rank_and_factors(build_graph({"c": None}, [("x", "x'", "c", "c", 1)]))


def test_rank_invariant_under_relabel():
    X = build_thistle([Z2, Z3], 1)
    vmap = {v: "n" + v for v in X.vertices}
    emap = {e: "E" + e for e in X.graph.edges}
    assert rank_and_factors(relabel(X, vmap, emap)) == rank_and_factors(X)


def test_covolume_examples():
    assert covolume(edge23(1)) == 1
    assert covolume(star3()) == 1
    X = build_graph({"a": Z2, "b": Z2, "c": Z2}, [("e", "e'", "a", "b", "1/4"), ("f", "f'", "b", "c", "1/2")])
    assert covolume(X) == Fraction(3, 4)
    assert covolume(rescale(X, Fraction(4, 3))) == 1
    assert rescale(X, 1) == X
    with pytest.raises(ValueError):
        rescale(X, 0)


@given(st.fractions(min_value=Fraction(1, 100), max_value=10))
def test_rescale_covolume(mu):
    X = build_thistle([Z2, Z3], 1, ["1/5", "2/5", "2/5"])
    assert covolume(rescale(X, mu)) == mu * covolume(X)
    u = parse_word("v1.g1*p1*v2.g1", X)
    assert translation_length(u, rescale(X, mu)) == mu * translation_length(u, X)


def test_default_tree_and_canonical_ids():
    X = build_thistle([Z2, Z3], 1)
    assert X.spanning_tree == frozenset({"e1", "e2"})
    assert X.nontree_edges == ("p1",)
    assert X.graph.canonical("p1'") == "p1"
    assert X.basepoint == "v1"


def test_json_round_trip():
    X = build_thistle([Z2, Z3, symmetric3()], 1, ["1/7", "2/7", "3/7", "1/7"])
    text = json.dumps(graph_to_json(X))
    Y = graph_from_json(json.loads(text))
    assert Y == X


def test_json_spec_format():
    obj = {
        "vertices": [{"id": "v1", "group": {"order": 2, "table": [[0, 1], [1, 0]]}}, {"id": "w", "group": "trivial"}],
        "edges": [{"id": "e1", "reverse": "E1", "from": "v1", "to": "w", "length": "1/3"}],
    }
    X = graph_from_json(obj)
    assert X.length("E1") == Fraction(1, 3)
    assert X.graph.canonical("e1") == "E1"  # lexicographically smaller id
    assert validate_graph_of_groups(X).codes() == {"free-degree-1"}
