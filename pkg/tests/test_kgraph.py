import itertools

import pytest

from ctgraph import fixtures as F
from ctgraph.graphcore import ParseError
from ctgraph.kgraph import (
    ProductKGraph,
    ctrace_k,
    embed_1graph,
    enumerate_lambda_n,
    factorize,
    find_generalized_cycle_with_entrance,
    gen_cycle_has_entrance,
    is_generalized_cycle,
    is_tight,
    minimal_ancestry_pairs_k,
    parse_kgraph,
    strictly_aperiodic,
    strong_finite_ancestry,
    validate_2graph,
)

COLORED = list(F.KGRAPHS)


def path(k, v, word):
    by = {e.id: e for e in k.blue + k.red}
    return k.make(tuple(by[x] for x in word.split()), v)


@pytest.mark.parametrize("name", COLORED + list(F.PRODUCTS))
def test_fixtures_valid(name):
    assert validate_2graph(F.kgraph(name))["valid"]


def test_non_injective_squares_invalid():
    k = parse_kgraph("""
        vertex v
        blue b1 : v -> v
        blue b2 : v -> v
        red r : v -> v
        square b1 r ~ r b1
        square b2 r ~ r b1
    """)
    r = validate_2graph(k)
    assert not r["valid"]
    assert any("not injective" in p for p in r["problems"])


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_kgraph("vertex v\nblue b : v -> w\n")
    with pytest.raises(ParseError):
        parse_kgraph("vertex v\nblue b : v -> v\nred r : v -> v\nsquare r b ~ b r\n")


def test_lambda_n_examples():
    torus, twoblue = F.kgraph("torus"), F.kgraph("twoblue")
    assert len(enumerate_lambda_n(torus, "v", (1, 1))) == 1
    got = {" ".join(p.ids[0]) for p in enumerate_lambda_n(twoblue, "v", (2, 0))}
    assert got == {"b1 b1", "b1 b2", "b2 b1", "b2 b2"}
    for k in (torus, twoblue):
        assert [p.degree for p in enumerate_lambda_n(k, "v", (0, 0))] == [(0, 0)]


def test_factorize_examples():
    k = F.kgraph("torus")
    lam = enumerate_lambda_n(k, "v", (1, 1))[0]
    mu, nu = factorize(k, lam, (1, 0), (0, 1))
    assert (str(mu), str(nu)) == ("b", "r")
    mu, nu = factorize(k, lam, (0, 1), (1, 0))
    assert (str(mu), str(nu)) == ("r", "b")
    mu, nu = factorize(k, lam, (0, 0), (1, 1))
    assert mu.degree == (0, 0) and nu == lam
    with pytest.raises(ValueError):
        factorize(k, lam, (1, 0), (1, 0))


@pytest.mark.parametrize("name", COLORED)
def test_factorization_uniqueness(name):
    k = F.kgraph(name)
    for v in k.vertices():
        for d in itertools.product(range(4), repeat=2):
            for lam in k.paths(v, d):
                for m in itertools.product(range(d[0] + 1), range(d[1] + 1)):
                    n = (d[0] - m[0], d[1] - m[1])
                    mu, nu = k.factorize(lam, m, n)
                    assert mu.degree == m and nu.degree == n
                    assert k.compose(mu, nu) == lam


@pytest.mark.parametrize("name", COLORED + ["line_line", "uhf_line"])
def test_degree_sum_consistency(name):
    k = F.kgraph(name)
    for v in k.vertices()[:4]:
        for m in itertools.product(range(3), repeat=2):
            for n in itertools.product(range(2), repeat=2):
                direct = {p for p in k.paths(v, (m[0] + n[0], m[1] + n[1]))}
                ext = {q for p in k.paths(v, m) for q in k.extensions(p, n)}
                assert ext == direct


def test_minimal_pairs_examples():
    torus = F.kgraph("torus")
    pairs, complete = minimal_ancestry_pairs_k(torus, "v", "v", (2, 2))
    assert not complete
    s = {(str(a), str(b)) for a, b in pairs}
    assert {("b", "r"), ("b b", "r"), ("b", "r r"), ("v", "v")} <= s
    assert minimal_ancestry_pairs_k(torus, "v", "v", (0, 0))[0] == [
        (torus.vertex_path("v"), torus.vertex_path("v"))]
    ll = F.kgraph("line_line")
    for v in ll.vertices(1):
        pairs, complete = minimal_ancestry_pairs_k(ll, v, v, (2, 2))
        assert complete and len(pairs) == 1


def test_generalized_cycle_examples():
    torus, twoblue = F.kgraph("torus"), F.kgraph("twoblue")
    b = path(torus, "v", "b")
    v = torus.vertex_path("v")
    assert is_generalized_cycle(torus, b, v)
    assert not gen_cycle_has_entrance(torus, b, v)
    b1 = path(twoblue, "v", "b1")
    w = twoblue.vertex_path("v")
    assert is_generalized_cycle(twoblue, b1, w)
    assert not is_generalized_cycle(twoblue, w, b1)
    assert gen_cycle_has_entrance(twoblue, b1, w)
    assert not gen_cycle_has_entrance(twoblue, b1, b1)


@pytest.mark.parametrize("name", COLORED)
def test_generalized_cycle_brute_force(name):
    k = F.kgraph(name)
    for v in k.vertices():
        for d in [(1, 0), (0, 1), (1, 1), (2, 0)]:
            for lam in k.paths(v, d):
                if lam.source != v:
                    continue
                vp = k.vertex_path(v)
                assert is_generalized_cycle(k, lam, vp)
                other = [p for p in k.paths(v, d) if p != lam]
                assert gen_cycle_has_entrance(k, lam, vp) == bool(other)


def test_verdict_examples():
    torus, twoblue, ll = F.kgraph("torus"), F.kgraph("twoblue"), F.kgraph("line_line")
    t = is_tight(torus)
    assert t.answer == "yes" and t.certificate["rule"] == "heuristic"
    assert is_tight(twoblue).answer == "no"
    assert is_tight(ll).answer == "yes" and is_tight(ll).exact
    assert strong_finite_ancestry(ll).answer == "yes"
    sfa = strong_finite_ancestry(torus)
    assert sfa.answer == "no" and sfa.certificate["family"] == ["b", "r"]
    assert strong_finite_ancestry(F.kgraph("uhf_line")).answer == "no"
    assert strictly_aperiodic(ll).answer == "yes"
    assert strictly_aperiodic(torus).answer == "no"
    assert strictly_aperiodic(F.kgraph("loop_line")).answer == "no"
    assert ctrace_k(ll).answer == "yes"
    assert ctrace_k(torus).answer == "unknown"
    c = ctrace_k(twoblue)
    assert c.answer == "no"
    assert find_generalized_cycle_with_entrance(twoblue, 1) is not None


@pytest.mark.parametrize("name", COLORED)
def test_no_finite_sourceless_2graph_has_sfa(name):
    assert strong_finite_ancestry(F.kgraph(name)).answer == "no"


def test_embedding_requires_finite_graph():
    with pytest.raises(ValueError):
        embed_1graph(F.graph("omega"))


def test_product_overlap_disjoint():
    # distinct minimal pairs of a strictly aperiodic product have disjoint
    # cylinders; infinite paths here are determined by their range
    ll = F.kgraph("line_line")
    assert isinstance(ll, ProductKGraph)
    seen = {}
    for v in ll.vertices(2):
        for w in ll.vertices(2):
            for a, b in minimal_ancestry_pairs_k(ll, v, w, (2, 2))[0]:
                lag = (a.degree[0] - b.degree[0], a.degree[1] - b.degree[1])
                key = (a.range, lag, b.range)
                assert key not in seen, (seen[key], (a, b))
                seen[key] = (a, b)
