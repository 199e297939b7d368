import itertools

import pytest

from ctgraph import fixtures as F
from ctgraph.cyclecheck import (
    CycleWitness,
    canonical_rotation,
    is_acyclic,
    no_cycle_has_entrance,
    simple_cycles,
)
from ctgraph.graphcore import Edge, Path, enumerate_paths


def test_simple_cycles_examples():
    assert [str(c) for c in simple_cycles(F.graph("loop"))] == ["e"]
    assert simple_cycles(F.graph("uhf2")) == []
    assert {str(c) for c in simple_cycles(F.graph("two_cycle"))} == {"a b", "b a"}


def test_entrance_examples():
    assert no_cycle_has_entrance(F.graph("loop")).answer == "yes"
    v = no_cycle_has_entrance(F.graph("loop_entrance"))
    assert v.answer == "no"
    assert v.certificate["entrance"] in {"g", "h"}
    assert no_cycle_has_entrance(F.graph("uhf2")).answer == "yes"
    # entrance along a bundle
    assert no_cycle_has_entrance(F.graph("omega_plain")).answer == "no"
    assert no_cycle_has_entrance(F.graph("omega_loop")).answer == "no"


def test_witness_validation():
    e, g = Edge("e", "v", "v"), Edge("g", "u", "v")
    CycleWitness(Path.of([e]), g)
    with pytest.raises(ValueError):
        CycleWitness(Path.of([e]), e)
    with pytest.raises(ValueError):
        CycleWitness(Path.of([g]))


def test_canonical_rotation():
    a, b = Edge("a", "u", "v"), Edge("b", "v", "u")
    assert canonical_rotation(Path.of([b, a])).ids == ("a", "b")


def _closed_walk_entrance(g, bound):
    """Brute force: some closed walk of length <= bound has an entrance."""
    for v in g.vertices:
        for p in enumerate_paths(g, v, bound):
            if len(p) and p.source == v:
                own = set(p.edges)
                for c in p.edges:
                    if any(e not in own for e in g.in_edges(c.range)):
                        return True
    return False


def test_entrance_matches_brute_force_on_small_graphs():
    for g in itertools.islice(F.exhaustive_graphs(3, 4), None):
        brute = _closed_walk_entrance(g, len(g.vertices))
        assert (no_cycle_has_entrance(g).answer == "no") == brute, g.name


def test_acyclic_matches_cycle_list():
    for g in F.random_graphs(100):
        assert is_acyclic(g) == (not simple_cycles(g))
