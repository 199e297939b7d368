"""Simple cycles and the "no cycle has an entrance" condition.

Infinite families are folded into a finite skeleton before searching: a
bundle becomes one edge, and an edge or fan landing on a tail vertex becomes
an edge into the tail's attachment vertex (the concrete cycle runs down the
tail).  Cycles through such skeleton edges always have an entrance: a sibling
bundle copy, or the next tail edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphcore import Edge, GraphPresentation, Path, tail_edge
from .verdict import Verdict

__all__ = [
    "CycleWitness",
    "simple_cycles",
    "canonical_rotation",
    "no_cycle_has_entrance",
    "is_acyclic",
]


@dataclass(frozen=True)
class CycleWitness:
    cycle: Path
    entrance: Optional[Edge] = None

    def __post_init__(self):
        if len(self.cycle) == 0 or self.cycle.range != self.cycle.source:
            raise ValueError("witness cycle is not a cycle")
        if self.entrance is not None and not self.is_entrance(self.entrance):
            raise ValueError(f"{self.entrance.id} is not an entrance to {self.cycle}")

    def is_entrance(self, e: Edge) -> bool:
        return any(e.range == c.range and e != c for c in self.cycle.edges)

    def to_json(self):
        return {
            "cycle": list(self.cycle.ids),
            "entrance": None if self.entrance is None else self.entrance.id,
        }


@dataclass(frozen=True)
class _SkelEdge:
    kind: str  # "edge", "bundle", "routed", "fan"
    source: str
    range: str
    segment: tuple[Edge, ...]  # concrete edges, range end first
    entrance: Optional[Edge]  # forced entrance for non-plain kinds

    @property
    def key(self):
        return self.segment[0].id, self.segment[-1].id


def _skeleton(g: GraphPresentation) -> dict[str, list[_SkelEdge]]:
    into: dict[str, list[_SkelEdge]] = {v: [] for v in g.vertices}
    for e in sorted(g.edges):
        tp = g.tail_position(e.range)
        if tp is None:
            into[e.range].append(_SkelEdge("edge", e.source, e.range, (e,), None))
        else:
            attach, k = tp
            seg = tuple(tail_edge(attach, i) for i in range(1, k + 1)) + (e,)
            into[attach].append(_SkelEdge("routed", e.source, attach, seg, tail_edge(attach, k + 1)))
    for b in sorted(g.bundles):
        into[b.range].append(_SkelEdge("bundle", b.source, b.range, (b.copy(1),), b.copy(2)))
    for f in sorted(g.fans):
        p = f.position(1)
        seg = tuple(tail_edge(f.attach, i) for i in range(1, p + 1)) + (f.copy(1),)
        into[f.attach].append(_SkelEdge("fan", f.source, f.attach, seg, tail_edge(f.attach, p + 1)))
    return into


def _skeleton_cycles(g: GraphPresentation) -> list[list[_SkelEdge]]:
    into = _skeleton(g)
    found: list[list[_SkelEdge]] = []

    def walk(base: str, here: str, trail: list[_SkelEdge], seen: set[str]):
        for se in into[here]:
            if se.source == base:
                found.append(trail + [se])
            elif se.source not in seen:
                seen.add(se.source)
                walk(base, se.source, trail + [se], seen)
                seen.discard(se.source)

    for v in sorted(g.vertices):
        walk(v, v, [], {v})
    return found


def _concrete(cyc: list[_SkelEdge]) -> Path:
    return Path.of([e for se in cyc for e in se.segment])


def simple_cycles(g: GraphPresentation) -> list[Path]:
    """Every simple cycle, once per base vertex (rotations are listed).

    Bundle and fan families are represented by their first copy.
    """
    if g.is_bratteli:
        return []
    return sorted({_concrete(c) for c in _skeleton_cycles(g)}, key=Path.sort_key)


def canonical_rotation(cycle: Path) -> Path:
    edges = cycle.edges
    rots = [edges[i:] + edges[:i] for i in range(len(edges))]
    return Path.of(min(rots, key=lambda es: tuple(e.id for e in es)))


def is_acyclic(g: GraphPresentation) -> bool:
    return g.is_bratteli or not _skeleton_cycles(g)


def no_cycle_has_entrance(g: GraphPresentation) -> Verdict:
    reduction = "an entrance to any cycle is an entrance to a simple subcycle"
    if g.is_bratteli:
        return Verdict("yes", {"type": "entrance-free", "reduction": reduction,
                               "simple_cycles": [], "reason": "leveled graph has no cycles"})
    cycles = _skeleton_cycles(g)
    seen: set[tuple[str, ...]] = set()
    for cyc in cycles:
        path = _concrete(cyc)
        key = canonical_rotation(path).ids
        if key in seen:
            continue
        seen.add(key)
        for se in cyc:
            if se.kind != "edge":
                w = CycleWitness(path, se.entrance)
                return Verdict("no", {"type": "cycle-entrance", **w.to_json(), "rule": se.kind})
        for se in cyc:
            own = se.segment[-1]
            for e in g.in_edges(se.range, width=2):
                if e != own:
                    w = CycleWitness(path, e)
                    return Verdict("no", {"type": "cycle-entrance", **w.to_json(), "rule": "edge"})
    return Verdict("yes", {
        "type": "entrance-free",
        "reduction": reduction,
        "simple_cycles": sorted(list(k) for k in seen),
    })
