"""Ancestry pairs, minimality, and the finite-ancestry decision.

An ancestry pair for ``(v, w)`` is a pair of paths ``(lam, mu)`` with
``r(lam) == v``, ``r(mu) == w`` and a common source.  It is minimal when no
nontrivial common path can be stripped from the source end.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

from .graphcore import Edge, GraphPresentation, Path, enumerate_paths, tail_edge
from .verdict import InfiniteFamily, Verdict

__all__ = [
    "AncestryPair",
    "is_minimal",
    "strip_to_minimal",
    "extends",
    "minimal_cycle_free_pairs",
    "finite_ancestry",
    "count_minimal_pairs_bruteforce",
]


@dataclass(frozen=True, repr=False)
class AncestryPair:
    lam: Path
    mu: Path

    def __post_init__(self):
        if self.lam.source != self.mu.source:
            raise ValueError(f"paths {self.lam} and {self.mu} have different sources")

    @property
    def source(self) -> str:
        return self.lam.source

    @property
    def ranges(self) -> tuple[str, str]:
        return self.lam.range, self.mu.range

    @property
    def minimal(self) -> bool:
        return is_minimal(self)

    @property
    def cycle_free(self) -> bool:
        return not (self.lam.has_cycle() or self.mu.has_cycle())

    def swapped(self) -> "AncestryPair":
        return AncestryPair(self.mu, self.lam)

    def sort_key(self):
        return (len(self.lam) + len(self.mu), self.lam.sort_key(), self.mu.sort_key())

    def __lt__(self, other: "AncestryPair") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"({self.lam}, {self.mu})"

    def to_json(self):
        return [self.lam.to_json(), self.mu.to_json()]


def is_minimal(p: AncestryPair) -> bool:
    if not p.lam.edges or not p.mu.edges:
        return True
    return p.lam.edges[-1] != p.mu.edges[-1]


def strip_to_minimal(p: AncestryPair) -> AncestryPair:
    """Remove the longest common source-end factor."""
    k = 0
    la, mu = p.lam.edges, p.mu.edges
    while k < min(len(la), len(mu)) and la[len(la) - 1 - k] == mu[len(mu) - 1 - k]:
        k += 1
    if k == 0:
        return p
    return AncestryPair(p.lam[: len(la) - k], p.mu[: len(mu) - k])


def extends(p: AncestryPair, q: AncestryPair) -> Optional[Path]:
    """The path ``eps`` with ``p == (q.lam eps, q.mu eps)``, if any."""
    k = len(p.lam) - len(q.lam)
    if k < 0 or len(p.mu) - len(q.mu) != k:
        return None
    if p.lam[: len(q.lam)] != q.lam or p.mu[: len(q.mu)] != q.mu:
        return None
    eps_l = p.lam[len(q.lam):]
    eps_m = p.mu[len(q.mu):]
    if eps_l.edges != eps_m.edges or eps_l.range != eps_m.range:
        return None
    return eps_l


def _pairs_from_paths(from_v: list[Path], from_w: list[Path]) -> list[AncestryPair]:
    by_source: dict[str, list[Path]] = defaultdict(list)
    for mu in from_w:
        by_source[mu.source].append(mu)
    out = []
    for lam in from_v:
        for mu in by_source.get(lam.source, ()):
            p = AncestryPair(lam, mu)
            if is_minimal(p):
                out.append(p)
    out.sort()
    return out


def _count_minimal(from_v: list[Path], from_w: list[Path]) -> int:
    total: dict[str, int] = defaultdict(int)
    by_last: dict[tuple[str, Edge], int] = defaultdict(int)
    for mu in from_w:
        total[mu.source] += 1
        if mu.edges:
            by_last[mu.source, mu.edges[-1]] += 1
    n = 0
    for lam in from_v:
        n += total.get(lam.source, 0)
        if lam.edges:
            n -= by_last.get((lam.source, lam.edges[-1]), 0)
    return n


def count_minimal_pairs_bruteforce(
    g: GraphPresentation, v: str, w: str, max_len: int, cycle_free: bool = True
) -> int:
    """Count minimal pairs with both lengths <= max_len by direct enumeration."""
    return _count_minimal(
        enumerate_paths(g, v, max_len, cycle_free=cycle_free),
        enumerate_paths(g, w, max_len, cycle_free=cycle_free),
    )


# -- omega presentations --------------------------------------------------

def _omega_limits(g: GraphPresentation, *query: str) -> tuple[int, int]:
    qpos = max((g.tail_position(v) or ("", 0))[1] for v in query)
    reach = max([f.start + 2 * f.step for f in g.fans] + [0])
    routed = max([(g.tail_position(e.range) or ("", 0))[1] for e in g.edges] + [0])
    return 3, qpos + reach + routed + 1


def _uses_copy(p: AncestryPair) -> bool:
    return any("#" in e.id for e in p.lam.edges + p.mu.edges)


def _omega_family(g: GraphPresentation) -> Optional[dict]:
    """Certificate for an omega family that forces infinitely many cycle-free
    minimal pairs, or None."""
    for b in sorted(g.bundles):
        if b.source == b.range:
            continue
        pairs = [
            AncestryPair(Path.of([b.copy(i)]), Path.of([b.copy(j)]))
            for i, j in ((1, 2), (1, 3), (2, 3))
        ]
        return {"type": "omega-family", "family": b.id, "kind": "bundle",
                "query": [b.range, b.range], "pairs": [p.to_json() for p in pairs]}
    for f in sorted(g.fans):
        q = 1 if f.source == f.attach else 0
        first = f.index_at(max(q, f.start)) or 1
        while f.position(first) < q:
            first += 1
        pairs = []
        for i, j in ((first, first + 1), (first, first + 2), (first + 1, first + 2)):
            paths = []
            for n in (i, j):
                p = f.position(n)
                paths.append(Path.of([tail_edge(f.attach, k) for k in range(q + 1, p + 1)] + [f.copy(n)]))
            pairs.append(AncestryPair(*paths))
        start = paths[0].range
        return {"type": "omega-family", "family": f.id, "kind": "fan",
                "query": [start, start], "pairs": [p.to_json() for p in pairs]}
    return None


def _omega_pairs(g: GraphPresentation, v: str, w: str) -> list[AncestryPair]:
    width, limit = _omega_limits(g, v, w)
    from_v = enumerate_paths(g, v, cycle_free=True, width=width, tail_limit=limit)
    from_w = enumerate_paths(g, w, cycle_free=True, width=width, tail_limit=limit)
    pairs = _pairs_from_paths(from_v, from_w)
    witness = [p for p in pairs if _uses_copy(p)]
    if witness:
        raise InfiniteFamily(
            f"({v}, {w}) has infinitely many cycle-free minimal pairs",
            {"type": "omega-family", "query": [v, w], "pairs": [p.to_json() for p in witness[:3]]},
        )
    return pairs


# -- public entry points --------------------------------------------------

def minimal_cycle_free_pairs(g: GraphPresentation, v: str, w: str) -> list[AncestryPair]:
    """The complete (sorted) set of cycle-free minimal ancestry pairs for
    ``(v, w)``; raises InfiniteFamily when that set is infinite."""
    for x in (v, w):
        if not g.has_vertex(x):
            raise KeyError(f"unknown vertex {x!r}")
    if g.is_bratteli:
        from .bratteli import bratteli_pairs

        return bratteli_pairs(g, v, w)
    if g.is_finite:
        return _pairs_from_paths(
            enumerate_paths(g, v, cycle_free=True), enumerate_paths(g, w, cycle_free=True)
        )
    return _omega_pairs(g, v, w)


def finite_ancestry(g: GraphPresentation, counts: bool = True) -> Verdict:
    if g.is_bratteli:
        from .bratteli import bratteli_finite_ancestry

        return bratteli_finite_ancestry(g)
    if g.is_finite:
        cert = {"type": "enumeration",
                "reason": "cycle-free paths are shorter than the number of vertices"}
        if counts:
            paths = {v: enumerate_paths(g, v, cycle_free=True) for v in g.vertices}
            cert["counts"] = {
                f"{v},{w}": _count_minimal(paths[v], paths[w])
                for v in sorted(g.vertices) for w in sorted(g.vertices)
            }
        return Verdict("yes", cert)
    fam = _omega_family(g)
    if fam is not None:
        return Verdict("no", fam)
    cert = {"type": "enumeration",
            "reason": "no bundle or fan contributes to a cycle-free minimal pair"}
    if counts:
        cert["counts"] = {
            f"{v},{w}": len(_omega_pairs(g, v, w))
            for v in sorted(g.vertices) for w in sorted(g.vertices)
        }
    return Verdict("yes", cert)
