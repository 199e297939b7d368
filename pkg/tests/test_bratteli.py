from hypothesis import given, settings, strategies as st

from ctgraph import fixtures as F
from ctgraph.ancestry import count_minimal_pairs_bruteforce, finite_ancestry
from ctgraph.bratteli import PairAutomaton, bratteli_pairs, count_bratteli_pairs, unroll
from ctgraph.graphcore import BratteliPresentation, GraphPresentation


def diagram(prefix, repeat):
    return GraphPresentation("h", bratteli=BratteliPresentation(prefix, repeat))


def test_uhf_certificate_shape():
    cert = finite_ancestry(F.graph("uhf2")).certificate
    assert cert["type"] == "pumping"
    assert cert["query"] == ["v1", "v1"]
    assert cert["cycle"] == [[0, 1, 0, 0], [0, 0, 0, 1]]


def test_uhf_unroll_words():
    g = F.graph("uhf2")
    cert = finite_ancestry(g).certificate
    p = unroll(g, cert, 3)
    assert p.lam.ids == ("f1", "e2", "f3", "e4", "f5", "e6")
    assert p.mu.ids == ("e1", "f2", "e3", "f4", "e5", "f6")


def test_line_pairs_and_yes_certificate():
    g = F.graph("line")
    v = finite_ancestry(g)
    assert v.answer == "yes" and v.certificate["type"] == "automaton"
    assert [str(p) for p in bratteli_pairs(g, "v1", "v2")] == ["(e1, v2)"]


def test_two_lines_off_diagonal_empty():
    g = F.graph("two_lines")
    assert bratteli_pairs(g, "v1_1", "v1_2") == []


def test_pumping_is_none_when_finite():
    br = F.graph("merge").bratteli
    assert PairAutomaton(br).pumping("v1", "v1") is None


@st.composite
def diagrams(draw):
    n = draw(st.integers(1, 2))
    entry = st.integers(0, 2)
    rep = tuple(tuple(draw(entry) for _ in range(n)) for _ in range(n))
    # every vertex receives and emits at least one edge
    if any(sum(r) == 0 for r in rep) or any(sum(r[j] for r in rep) == 0 for j in range(n)):
        rep = tuple(tuple(x or int(i == j) for j, x in enumerate(r)) for i, r in enumerate(rep))
    prefix = ()
    if draw(st.booleans()):
        m = draw(st.integers(1, 2))
        prefix = (tuple(tuple(draw(st.integers(1, 2)) for _ in range(n)) for _ in range(m)),)
    return diagram(prefix, rep)


@settings(max_examples=25, deadline=None)
@given(diagrams())
def test_count_matches_brute_force(g):
    br = g.bratteli
    vs = [br.vertex(1, i) for i in range(br.level_size(1))]
    for v in vs:
        for w in vs:
            for L in (2, 5, 8):
                assert count_bratteli_pairs(g, v, w, L) == count_minimal_pairs_bruteforce(g, v, w, L)


@settings(max_examples=40, deadline=None)
@given(diagrams())
def test_pumping_examples_are_minimal_and_distinct(g):
    v = finite_ancestry(g)
    if v.answer == "yes":
        return
    cert = v.certificate
    seen = set()
    for k in (1, 2, 3):
        p = unroll(g, cert, k)
        assert p.minimal and p.cycle_free
        assert p.ranges == tuple(cert["query"])
        seen.add((p.lam.ids, p.mu.ids))
    assert len(seen) == 3
