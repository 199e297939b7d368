"""Desingularization: tails at sources and infinite receivers.

Orientation is range-first, so a tail ``v <- v~1 <- v~2 <- ...`` points toward
the singular vertex.  At an infinite receiver ``v`` the received edges are
listed (plain edges by identifier, then bundle copies round-robin by index)
and the j-th one (0-based) is moved to land on ``v~j``.  Plain edges become
``<id>~g``; a bundle ``b`` becomes the fan ``b~g``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graphcore import (
    Edge,
    Fan,
    GraphPresentation,
    Path,
    _COPY,
    _TAIL_EDGE,
    enumerate_paths,
    tail_edge,
    tail_vertex,
)

__all__ = [
    "Desingularization",
    "desingularize",
    "phi",
    "phi_inverse",
    "transfer_check",
    "bijection_check",
]


@dataclass(frozen=True)
class Desingularization:
    base: GraphPresentation
    result: GraphPresentation
    tail_map: dict[str, str] = field(default_factory=dict)
    # base edge id (plain) or bundle id -> replacement edge or fan id
    redirect_map: dict[str, str] = field(default_factory=dict)

    @property
    def identity(self) -> bool:
        return not self.tail_map

    def redirect_lines(self) -> list[str]:
        return [f"redirect {a} -> {b}" for a, b in sorted(self.redirect_map.items())]


def desingularize(g: GraphPresentation) -> Desingularization:
    if g.is_bratteli:
        raise ValueError("bratteli diagrams are row-finite and are not desingularized here")
    receivers = g.infinite_receivers()
    clash = sorted(set(receivers) & set(g.tails))
    if clash:
        raise ValueError(f"infinite receiver already carries a tail: {', '.join(clash)}")
    sources = g.sources()
    if not sources and not receivers:
        return Desingularization(g, g)

    edges: list[Edge] = []
    fans: list[Fan] = list(g.fans)
    redirect: dict[str, str] = {}
    recv = set(receivers)
    by_range: dict[str, list[Edge]] = {}
    for e in sorted(g.edges):
        if e.range in recv:
            by_range.setdefault(e.range, []).append(e)
        else:
            edges.append(e)
    for v in receivers:
        plain = by_range.get(v, [])
        for k, e in enumerate(plain):
            new = Edge(f"{e.id}~g", e.source, tail_vertex(v, k))
            edges.append(new)
            redirect[e.id] = new.id
        bundles = sorted(b for b in g.bundles if b.range == v)
        for k, b in enumerate(bundles):
            fan = Fan(f"{b.id}~g", b.source, v, len(plain) + k, len(bundles))
            fans.append(fan)
            redirect[b.id] = fan.id

    result = GraphPresentation(
        name=f"{g.name}~d",
        vertices=g.vertices,
        edges=tuple(edges),
        bundles=(),
        tails=tuple(sorted(set(g.tails) | set(sources) | recv)),
        fans=tuple(sorted(fans)),
    )
    tail_map = {v: v for v in sorted(set(sources) | recv)}
    return Desingularization(g, result, tail_map, redirect)


def _phi_edge(d: Desingularization, e: Edge) -> list[Edge]:
    m = _COPY.match(e.id)
    if m and m.group("base") in d.redirect_map:
        fid = d.redirect_map[m.group("base")]
        f = next(f for f in d.result.fans if f.id == fid)
        i = int(m.group("i"))
        return [tail_edge(f.attach, k) for k in range(1, f.position(i) + 1)] + [f.copy(i)]
    if e.id in d.redirect_map:
        new = d.result.edge(d.redirect_map[e.id])
        attach, p = d.result.tail_position(new.range) or (new.range, 0)
        return [tail_edge(attach, k) for k in range(1, p + 1)] + [new]
    return [e]


def phi(d: Desingularization, p: Path) -> Path:
    if not d.base.has_vertex(p.range) or any(not _is_base_edge(d.base, e) for e in p.edges):
        raise ValueError(f"{p} is not a path of the base graph")
    if not p.edges:
        return p
    out: list[Edge] = []
    for e in p.edges:
        out.extend(_phi_edge(d, e))
    return Path.of(out)


def _is_base_edge(g: GraphPresentation, e: Edge) -> bool:
    try:
        return g.edge(e.id) == e
    except KeyError:
        return False


def phi_inverse(d: Desingularization, q: Path) -> Path:
    """The unique base path mapped onto ``q``."""
    base = d.base
    if not (base.has_vertex(q.range) and base.has_vertex(q.source)):
        raise ValueError(f"endpoints of {q} are not base vertices")
    back = {new: old for old, new in d.redirect_map.items()}
    fans = {f.id: f for f in d.result.fans}
    out: list[Edge] = []
    es = list(q.edges)
    i = 0
    while i < len(es):
        e = es[i]
        m = _TAIL_EDGE.match(e.id)
        if m and m.group("base") in d.tail_map and m.group("base") not in base.tails:
            # walk down a tail created by desingularization
            attach = m.group("base")
            depth = 0
            while i < len(es) and es[i] == tail_edge(attach, depth + 1):
                depth += 1
                i += 1
            if i == len(es):
                raise ValueError(f"{q} stops inside the tail at {attach}")
            e = es[i]
            pos = (d.result.tail_position(e.range) or ("", 0))[1]
            if pos != depth:
                raise ValueError(f"{q} leaves the tail at {attach} inconsistently")
        cm = _COPY.match(e.id)
        if cm and cm.group("base") in fans and cm.group("base") in back:
            out.append(base.edge(f"{back[cm.group('base')]}#{cm.group('i')}"))
        elif e.id in back:
            out.append(base.edge(back[e.id]))
        elif _is_base_edge(base, e):
            out.append(e)
        else:
            raise ValueError(f"{e.id} is not in the image of the base graph")
        i += 1
    if not out:
        return Path.vertex(q.range)
    return Path.of(out)


def transfer_check(d: Desingularization) -> dict:
    """Compare the entrance, finite-ancestry and continuous-trace verdicts of
    the base and desingularized graphs."""
    from .ancestry import finite_ancestry
    from .cyclecheck import no_cycle_has_entrance
    from .groupoid import continuous_trace

    rows = {}
    for name, fn in (
        ("no_cycle_has_entrance", no_cycle_has_entrance),
        ("finite_ancestry", lambda g: finite_ancestry(g, counts=False)),
        ("continuous_trace", continuous_trace),
    ):
        a, b = fn(d.base).answer, fn(d.result).answer
        rows[name] = {"base": a, "result": b, "equal": a == b}
    return {"passed": all(r["equal"] for r in rows.values()), "verdicts": rows}


def bijection_check(d: Desingularization, max_len: int = 6) -> list[str]:
    """Problems found when checking that phi is a bijection preserving range
    and source, on base paths and on result paths between base vertices."""
    problems: list[str] = []
    base, res = d.base, d.result
    for v in sorted(base.vertices):
        for p in enumerate_paths(base, v, max_len, width=3):
            q = phi(d, p)
            if (q.range, q.source) != (p.range, p.source):
                problems.append(f"phi({p}) = {q} moves endpoints")
            elif phi_inverse(d, q) != p:
                problems.append(f"phi_inverse(phi({p})) != {p}")
        limit = max_len + 1
        for q in enumerate_paths(res, v, max_len, width=3, tail_limit=limit):
            if not base.is_core(q.source):
                continue
            try:
                p = phi_inverse(d, q)
            except ValueError as exc:
                problems.append(f"{q}: {exc}")
                continue
            if phi(d, p) != q:
                problems.append(f"phi(phi_inverse({q})) != {q}")
    return problems

