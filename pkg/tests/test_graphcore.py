import pytest
from hypothesis import given, settings, strategies as st

from ctgraph import fixtures as F
from ctgraph.graphcore import (
    Edge,
    EPPath,
    ParseError,
    Path,
    dump_graph,
    enumerate_paths,
    parse_graph,
    shift,
)


def ids(paths):
    return {str(p) for p in paths}


def test_loop_graph_shape():
    g = parse_graph("vertex v\nedge e : v -> v\n")
    assert g.vertices == ("v",)
    assert [e.id for e in g.edges] == ["e"]
    assert not g.sources() and not g.infinite_receivers()


def test_bundle_makes_infinite_receiver():
    g = F.graph("omega")
    assert g.infinite_receivers() == ["v"]
    assert g.has_omega


def test_uhf_levels():
    g = parse_graph("bratteli uhf\nprefix []\nrepeat [[2]]\nend\n")
    br = g.bratteli
    assert br.level_size(1) == br.level_size(7) == 1
    assert [e.id for e in g.in_edges("v1")] == ["e1", "f1"]
    assert all(e.source == "v2" for e in g.in_edges("v1"))


@pytest.mark.parametrize("text, line", [
    ("vertex v\nedge e : v -> w\n", 2),
    ("vertex v\nvertex v\n", 2),
    ("vertex v\nfrobnicate\n", 2),
    ("vertex v\nedge e v v\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_graph(text)
    assert f"line {line}" in str(exc.value)


def test_bratteli_shape_errors():
    with pytest.raises(ParseError):
        parse_graph("bratteli b\nrepeat [[1, 1]]\n")
    with pytest.raises(ParseError):
        parse_graph("bratteli b\nprefix [[[1]]]\nrepeat [[1, 0], [0, 1]]\n")


@pytest.mark.parametrize("name", F.all_graphs())
def test_dump_parse_roundtrip(name):
    g = F.graph(name)
    h = parse_graph(dump_graph(g))
    assert dump_graph(h) == dump_graph(g)


def test_paths_loop():
    g = F.graph("loop")
    assert ids(enumerate_paths(g, "v", 2)) == {"v", "e", "e e"}
    assert ids(enumerate_paths(g, "v", 2, cycle_free=True)) == {"v"}


def test_paths_uhf():
    g = F.graph("uhf2")
    got = ids(enumerate_paths(g, "v1", 2))
    assert got == {"v1", "e1", "f1", "e1 e2", "e1 f2", "f1 e2", "f1 f2"}


def test_path_slicing_and_product():
    e, g = Edge("e", "v", "v"), Edge("g", "v", "u")
    p = Path.of([g, e, e])
    assert p.range == "u" and p.source == "v"
    assert p[:1] * p[1:] == p
    assert p[0:0] == Path.vertex("u")
    with pytest.raises(ValueError):
        Path.of([e, g])


def test_shift_examples():
    e = Edge("e", "v", "v")
    g = Edge("g", "v", "u")
    loop = EPPath.periodic(Path.of([e]))
    assert shift(loop, 1) == loop
    assert shift(EPPath(Path.of([g]), Path.of([e])), 1) == loop
    a, b, h = Edge("a", "u", "v"), Edge("b", "v", "u"), Edge("h", "v", "w")
    x = EPPath(Path.of([h]), Path.of([a, b]))
    # |prefix| = 1, |cycle| = 2: the rotation is (p - 1) mod 2
    assert shift(x, 3) == EPPath.periodic(Path.of([a, b]))
    assert shift(x, 4) == EPPath.periodic(Path.of([b, a]))


def test_epp_canonical_and_agreement():
    e = Edge("e", "v", "v")
    x = EPPath(Path.of([e, e]), Path.of([e, e]))
    y = EPPath.periodic(Path.of([e]))
    assert x == y and hash(x) == hash(y)
    assert x.agrees_with(y)


@st.composite
def cycle_paths(draw):
    # words over two loops at one vertex
    es = [Edge("a", "v", "v"), Edge("b", "v", "v")]
    pre = draw(st.lists(st.sampled_from(es), max_size=4))
    cyc = draw(st.lists(st.sampled_from(es), min_size=1, max_size=4))
    prefix = Path.of(pre) if pre else Path.vertex("v")
    return EPPath(prefix, Path.of(cyc))


@settings(max_examples=200, deadline=None)
@given(cycle_paths(), st.integers(0, 12))
def test_shift_matches_truncation(x, p):
    y = shift(x, p)
    assert y.truncate(10) == x.truncate(p + 10)[p:]
    assert (x == y) == x.agrees_with(y)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 499))
def test_enumerated_paths_compose(i):
    g = next(g for k, g in enumerate(F.random_graphs()) if k == i)
    for v in g.vertices:
        for p in enumerate_paths(g, v, 3):
            assert p.range == v
            for a, b in zip(p.edges, p.edges[1:]):
                assert a.source == b.range
