import pytest

from ctgraph import fixtures as F
from ctgraph.groupoid import (
    CylinderPair,
    TruncatedGroupoid,
    check_cover,
    check_lemma2,
    check_lemma3,
    continuous_trace,
    cylinders_intersect,
    isotropy,
    pi_r_images_intersect,
    properness_cover,
)
from ctgraph.graphcore import Edge, EPPath, Path
from ctgraph.verdict import InfiniteFamily

E = Edge("e", "v", "v")
V = Path.vertex("v")
EP = Path.of([E])
EE = Path.of([E, E])


def test_cylinder_intersection_examples():
    ok, eps = cylinders_intersect(CylinderPair(EP, V), CylinderPair(EE, EP))
    assert ok and eps == EP
    assert not cylinders_intersect(CylinderPair(EP, V), CylinderPair(V, EP))[0]
    ok, eps = cylinders_intersect(CylinderPair(V, V), CylinderPair(V, V))
    assert ok and eps == V


def test_pi_r_examples():
    g = F.graph("loop")
    v = pi_r_images_intersect(g, CylinderPair(EP, V), CylinderPair(V, EP), depth=4)
    # (v, e) is not cycle-free, so only the brute force answer is binding
    assert v.answer == "yes" and not v.certificate["hypothesis"]
    assert v.certificate["criterion"]["cycle"] == ["e", "e"]
    u = F.graph("uhf2")
    br = u.bratteli
    e1, f1 = Path.of([br.edge(1, 0, 0, 0)]), Path.of([br.edge(1, 0, 0, 1)])
    assert pi_r_images_intersect(u, CylinderPair(e1, f1), CylinderPair(f1, e1)).answer == "no"
    assert pi_r_images_intersect(u, CylinderPair(e1, f1), CylinderPair(e1, f1)).answer == "yes"


def test_isotropy_examples():
    g = Edge("g", "v", "u")
    a, b = Edge("a", "u", "v"), Edge("b", "v", "u")
    assert isotropy(EPPath.periodic(EP)) == {"generator": 1}
    assert isotropy(EPPath(Path.of([g]), EP)) == {"generator": 1}
    assert isotropy(EPPath.periodic(Path.of([a, b]))) == {"generator": 2}
    assert isotropy(EPPath.periodic(Path.of([E, E, E]))) == {"generator": 1}


def test_cover_examples():
    r = properness_cover(F.graph("loop"), "v", "v", depth=4)
    assert r["cover_size"] == 1 and r["equal"]
    r = properness_cover(F.graph("line"), "v1", "v1", depth=6)
    assert r["cover_size"] == 1 and r["equal"]
    with pytest.raises(InfiniteFamily):
        properness_cover(F.graph("uhf2"), "v1", "v1")


@pytest.mark.parametrize("name, answer", [
    ("loop", "yes"), ("two_cycle", "yes"), ("feed", "yes"),
    ("loop_entrance", "no"), ("uhf2", "no"), ("line", "yes"), ("golden", "no"),
    ("source", "yes"), ("loop_source_entrance", "no"), ("omega", "no"),
])
def test_continuous_trace(name, answer):
    assert continuous_trace(F.graph(name)).answer == answer


def test_groupoid_small_loop():
    G = TruncatedGroupoid(F.graph("loop"), 2, ("v",))
    assert len(G.units) == 1
    # lags -2..2 on the single unit
    assert sorted(n for _, n, _ in G.elements) == [-2, -1, 0, 1, 2]
    assert G.cylinder_generated() == G.elements
    assert G.axiom_violations() == []


def test_groupoid_inverse_and_compose():
    G = TruncatedGroupoid(F.graph("two_cycle"), 3, ("u", "v"))
    for a in G.elements:
        assert G.compose(a, G.inverse(a)) == (a[0], 0, a[0])


@pytest.mark.parametrize("name", ["loop", "feed_chain", "uhf2", "golden", "omega"])
def test_lemma2(name):
    assert check_lemma2(F.graph(name))["violations"] == []


def test_lemma3_and_cover_applicability():
    assert check_lemma3(F.graph("loop_entrance"))["applicable"] is False
    r = check_lemma3(F.graph("feed"))
    assert r["applicable"] and r["violations"] == []
    assert check_cover(F.graph("feed"))["violations"] == []
