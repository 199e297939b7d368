import pytest
from hypothesis import given, settings, strategies as st

from ctgraph import fixtures as F
from ctgraph.ancestry import (
    AncestryPair,
    count_minimal_pairs_bruteforce,
    extends,
    finite_ancestry,
    is_minimal,
    minimal_cycle_free_pairs,
    strip_to_minimal,
)
from ctgraph.bratteli import count_bratteli_pairs, unroll
from ctgraph.graphcore import Edge, Path, parse_graph
from ctgraph.verdict import InfiniteFamily

E = Edge("e", "v", "v")
V = Path.vertex("v")


def P(*edges):
    return Path.of(edges)


def test_minimality_examples():
    assert is_minimal(AncestryPair(P(E), V))
    assert not is_minimal(AncestryPair(P(E, E), P(E)))
    assert is_minimal(AncestryPair(V, V))


def test_strip_examples():
    assert strip_to_minimal(AncestryPair(P(E, E), P(E))) == AncestryPair(P(E), V)
    assert strip_to_minimal(AncestryPair(P(E), V)) == AncestryPair(P(E), V)
    br = F.graph("uhf2").bratteli
    e1, f1, e2 = br.edge(1, 0, 0, 0), br.edge(1, 0, 0, 1), br.edge(2, 0, 0, 0)
    assert (e1.id, f1.id, e2.id) == ("e1", "f1", "e2")
    assert strip_to_minimal(AncestryPair(P(f1, e2), P(e1, e2))) == AncestryPair(P(f1), P(e1))


def test_pairs_examples():
    assert [str(p) for p in minimal_cycle_free_pairs(F.graph("loop"), "v", "v")] == ["(v, v)"]
    g = parse_graph("vertex u\nvertex v\nedge a : u -> v\n")
    assert [str(p) for p in minimal_cycle_free_pairs(g, "v", "u")] == ["(a, u)"]
    assert len(minimal_cycle_free_pairs(F.graph("line"), "v1", "v1")) == 1


def test_uhf_pairs_are_infinite():
    with pytest.raises(InfiniteFamily) as exc:
        minimal_cycle_free_pairs(F.graph("uhf2"), "v1", "v1")
    assert exc.value.certificate["type"] == "pumping"


def test_unknown_vertex():
    with pytest.raises(KeyError):
        minimal_cycle_free_pairs(F.graph("loop"), "v", "nope")


@pytest.mark.parametrize("name, answer", [
    ("loop", "yes"), ("feed_chain", "yes"), ("diamond", "yes"),
    ("uhf2", "no"), ("line", "yes"), ("two_lines", "yes"), ("merge", "yes"),
    ("golden", "no"), ("compact", "no"),
    ("omega", "no"), ("omega_loop", "yes"), ("omega_cycle", "no"),
])
def test_finite_ancestry_verdicts(name, answer):
    assert finite_ancestry(F.graph(name)).answer == answer


def test_finite_graphs_exact_with_counts():
    v = finite_ancestry(F.graph("diamond"))
    assert v.depth == "exact"
    assert v.certificate["counts"]["t,t"] == 3  # (t,t), (x p, y q) and its swap


def test_omega_family_members_are_minimal():
    v = finite_ancestry(F.graph("omega"))
    assert v.certificate["type"] == "omega-family"


@pytest.mark.parametrize("name", ["uhf2", "golden", "compact", "two_lines", "merge"])
def test_automaton_count_matches_brute_force(name):
    g = F.graph(name)
    vs = [g.bratteli.vertex(1, i) for i in range(g.bratteli.level_size(1))]
    for v in vs:
        for w in vs:
            for L in range(1, 9):
                assert count_bratteli_pairs(g, v, w, L) == count_minimal_pairs_bruteforce(g, v, w, L)


def test_unroll_uhf():
    g = F.graph("uhf2")
    cert = finite_ancestry(g).certificate
    for k in range(1, 5):
        p = unroll(g, cert, k)
        assert p.minimal and p.cycle_free
        assert len(p.lam) == len(p.mu) == 2 * k


def words(max_size=5):
    es = [Edge("a", "v", "v"), Edge("b", "v", "v")]
    return st.lists(st.sampled_from(es), max_size=max_size).map(
        lambda w: Path.of(w) if w else Path.vertex("v"))


@settings(max_examples=300, deadline=None)
@given(words(), words(), words())
def test_strip_properties(a, b, eps):
    p = AncestryPair(a * eps, b * eps)
    s = strip_to_minimal(p)
    assert strip_to_minimal(s) == s
    assert s.minimal
    assert extends(p, s) is not None
