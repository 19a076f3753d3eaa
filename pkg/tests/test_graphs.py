from collections import Counter

import pytest

from liestar.graphs import (
    Graph,
    GraphError,
    bidiff_of_graph,
    canonical_classes,
    canonicalize,
    classify,
    decompose,
    enumerate_graphs,
    has_internal_cycle,
    parse_graph,
    wheel1_graph,
    wheel2_graph,
)
from liestar.algebra import catalog, poisson_tensor
from liestar.poly import parse_poly


def test_enumeration_counts():
    assert len(enumerate_graphs(0)) == 1
    assert len(enumerate_graphs(1)) == 2
    assert len(enumerate_graphs(2)) == 36
    assert len(enumerate_graphs(3)) == 1728


def test_enumeration_cap():
    with pytest.raises(GraphError):
        enumerate_graphs(5)


def test_no_loops_or_parallel_edges():
    with pytest.raises(GraphError):
        parse_graph("1:(1,R)")  # loop
    with pytest.raises(GraphError):
        parse_graph("2:(L,L)(R,1)")  # parallel pair


def test_encode_round_trip():
    text = "3:(L,2)(3,L)(R,2)"
    assert parse_graph(text).encode() == text


def test_parse_errors():
    for bad in ["2:(L,R)", "1:(L,Q)", "1:(L,2)", "x:(L,R)"]:
        with pytest.raises(GraphError):
            parse_graph(bad)


def test_two_vertex_census():
    census = Counter(canonicalize(g).key for g in enumerate_graphs(2))
    by_kind = Counter()
    for key, count in census.items():
        kind = classify(parse_graph(key))
        by_kind[str(kind)] += count
    assert by_kind["union[1:(L,R), 1:(L,R)]"] == 4
    assert by_kind["other"] == 16  # the two Gamma_2-type classes, 8 each
    assert by_kind["wheel1(2)"] == 8
    # wheel2(2)'s four members are also bad graphs, giving 8 with weight zero
    assert by_kind["bad"] + by_kind["wheel2(2)"] == 8


def test_classify_examples():
    assert str(classify(parse_graph("2:(R,2)(R,1)"))) == "wheel2(2)"
    assert str(classify(parse_graph("2:(L,2)(R,1)"))) == "wheel1(2)"
    assert str(classify(parse_graph("2:(L,2)(L,1)"))) == "bad"
    assert str(classify(parse_graph("2:(L,R)(L,R)"))) == "union[1:(L,R), 1:(L,R)]"
    assert str(classify(parse_graph("1:(L,R)"))) == "other"


def test_wheel_constructors():
    assert wheel1_graph(2).encode() == "2:(L,2)(R,1)"
    assert wheel2_graph(2).encode() == "2:(R,2)(R,1)"
    w3 = wheel1_graph(3)
    assert str(classify(w3)) == "wheel1(3)"
    assert str(classify(wheel2_graph(3))) == "wheel2(3)"


def test_bad_detection():
    assert parse_graph("2:(L,2)(L,1)").is_bad()
    assert not parse_graph("2:(L,R)(L,R)").is_bad()
    assert not parse_graph("1:(L,R)").is_bad()  # n < 2 never bad


def test_canonicalize_is_lex_min_and_stable():
    g = parse_graph("2:(2,L)(R,L)")
    cls = canonicalize(g)
    assert cls.key == canonicalize(cls.representative).key
    assert cls.symmetry_count == 8
    # every member of the orbit canonicalizes to the same representative
    for member in enumerate_graphs(2):
        if canonicalize(member).key == cls.key:
            assert canonicalize(member).representative == cls.representative


def test_canonicalize_sign_of_edge_swap():
    a = parse_graph("1:(L,R)")
    b = parse_graph("1:(R,L)")
    ca, cb = canonicalize(a), canonicalize(b)
    assert ca.key == cb.key
    assert ca.sign == -cb.sign


def test_symmetry_counts_partition_the_census():
    classes = canonical_classes(enumerate_graphs(2))
    assert sum(c.symmetry_count for c in classes) == 36
    assert len(classes) == 6


def test_decompose():
    g = parse_graph("2:(L,R)(L,R)")
    comps = decompose(g)
    assert [c.encode() for c in comps] == ["1:(L,R)", "1:(L,R)"]
    assert len(decompose(parse_graph("2:(L,2)(R,1)"))) == 1


def test_decompose_three_components():
    g = parse_graph("3:(L,R)(L,R)(L,R)")
    assert len(decompose(g)) == 3


def test_has_internal_cycle():
    assert has_internal_cycle(wheel1_graph(2))
    assert has_internal_cycle(wheel2_graph(3))
    assert not has_internal_cycle(parse_graph("2:(L,R)(L,R)"))
    assert not has_internal_cycle(parse_graph("2:(2,L)(R,L)"))


def test_bidiff_of_single_edge_pair():
    pi = poisson_tensor(catalog("so3"))
    op = bidiff_of_graph(parse_graph("1:(L,R)"), pi)
    f = parse_poly("x1", 3)
    g = parse_poly("x2", 3)
    assert op.apply(f, g) == parse_poly("x3", 3)
    assert op.apply(g, f) == parse_poly("-x3", 3)


def test_bidiff_empty_graph_is_multiplication():
    pi = poisson_tensor(catalog("so3"))
    op = bidiff_of_graph(Graph(0, ()), pi)
    f = parse_poly("x1*x2", 3)
    g = parse_poly("x3^2", 3)
    assert op.apply(f, g) == f * g


def test_bidiff_class_invariance():
    """w(G) B_G is constant on a class: vertex relabel preserves B, edge swap
    flips it."""
    pi = poisson_tensor(catalog("sl2"))
    g = parse_graph("2:(2,L)(R,L)")
    cls = canonicalize(g)
    b_g = bidiff_of_graph(g, pi)
    b_rep = bidiff_of_graph(cls.representative, pi)
    f = parse_poly("x1^2*x2", 3)
    h = parse_poly("x2*x3", 3)
    assert (b_g * cls.sign).apply(f, h) == b_rep.apply(f, h)
