"""Finitely presented directed graphs, finite paths and eventually periodic
infinite paths.

Orientation: an edge ``e`` has a source ``s(e)`` and a range ``r(e)``; a path
``e1 e2 ... en`` satisfies ``s(e_i) == r(e_{i+1})``, its range is ``r(e1)`` and
its source is ``s(en)``.  Paths are therefore read from the range end, and the
infinite paths of a vertex ``v`` are obtained by walking *backwards* along
edges whose range is the current vertex.

Three kinds of presentation are supported:

* finite graphs (``vertex`` / ``edge`` records);
* finite graphs decorated with infinite families: ``bundle`` (infinitely many
  parallel edges, copies ``b#1, b#2, ...``), ``tail`` (an infinite chain
  ``v <- v~1 <- v~2 <- ...`` with edges ``v~f1, v~f2, ...``) and ``fan``
  (edges ``g#i`` from a vertex into the tail positions
  ``start + step*(i-1)``; produced by desingularization);
* eventually periodic Bratteli diagrams (a list of prefix incidence matrices
  followed by one matrix repeated forever).
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

__all__ = [
    "Edge",
    "Bundle",
    "Fan",
    "BratteliPresentation",
    "GraphPresentation",
    "Path",
    "EPPath",
    "ParseError",
    "parse_graph",
    "dump_graph",
    "enumerate_paths",
    "shift",
]

Matrix = tuple[tuple[int, ...], ...]

_ID = r"[A-Za-z0-9_.']+"
_REF = r"[A-Za-z0-9_.'~]+"
_TAIL_VERTEX = re.compile(r"^(?P<base>.+)~(?P<k>\d+)$")
_TAIL_EDGE = re.compile(r"^(?P<base>.+)~f(?P<k>\d+)$")
_COPY = re.compile(r"^(?P<base>.+)#(?P<i>\d+)$")
_BRATTELI_VERTEX = re.compile(r"^v(?P<n>\d+)(?:_(?P<i>\d+))?$")
_COPY_LETTERS = "efghijklmnopqrstu"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True, order=True)
class Edge:
    id: str
    source: str
    range: str

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True, order=True)
class Bundle:
    """Countably many parallel edges ``id#1, id#2, ...`` from source to range."""

    id: str
    source: str
    range: str

    def copy(self, i: int) -> Edge:
        if i < 1:
            raise ValueError("bundle copies are numbered from 1")
        return Edge(f"{self.id}#{i}", self.source, self.range)


@dataclass(frozen=True, order=True)
class Fan:
    """Edges ``id#i`` from ``source`` into position ``start + step*(i-1)`` of
    the tail attached at ``attach`` (position 0 is ``attach`` itself)."""

    id: str
    source: str
    attach: str
    start: int
    step: int

    def position(self, i: int) -> int:
        return self.start + self.step * (i - 1)

    def copy(self, i: int) -> Edge:
        if i < 1:
            raise ValueError("fan copies are numbered from 1")
        return Edge(f"{self.id}#{i}", self.source, tail_vertex(self.attach, self.position(i)))

    def index_at(self, pos: int) -> Optional[int]:
        q, rem = divmod(pos - self.start, self.step)
        if pos < self.start or rem:
            return None
        return q + 1


def tail_vertex(attach: str, k: int) -> str:
    return attach if k == 0 else f"{attach}~{k}"


def tail_edge(attach: str, k: int) -> Edge:
    """The k-th tail edge, from position k to position k-1 (k >= 1)."""
    return Edge(f"{attach}~f{k}", tail_vertex(attach, k), tail_vertex(attach, k - 1))


@dataclass(frozen=True)
class BratteliPresentation:
    """Eventually periodic Bratteli diagram.

    ``matrix(n)[i][j]`` counts edges with range the i-th vertex of level ``n``
    and source the j-th vertex of level ``n + 1``.  Levels are numbered from 1.
    """

    prefix: tuple[Matrix, ...]
    repeat: Matrix

    def __post_init__(self):
        mats = list(self.prefix) + [self.repeat]
        for m in mats:
            if not m or any(len(row) != len(m[0]) for row in m) or not m[0]:
                raise ValueError("bratteli matrices must be non-empty and rectangular")
            if any(x < 0 for row in m for x in row):
                raise ValueError("bratteli matrix entries must be >= 0")
        for a, b in zip(mats, mats[1:]):
            if len(a[0]) != len(b):
                raise ValueError("bratteli matrix dimensions do not chain between levels")
        if len(self.repeat) != len(self.repeat[0]):
            raise ValueError("bratteli repeat matrix must be square")

    @property
    def template_level(self) -> int:
        """First level whose incoming edges use the repeat matrix."""
        return len(self.prefix) + 1

    def matrix(self, n: int) -> Matrix:
        if n < 1:
            raise ValueError("levels are numbered from 1")
        return self.prefix[n - 1] if n <= len(self.prefix) else self.repeat

    def level_size(self, n: int) -> int:
        return len(self.matrix(n))

    def vertex(self, n: int, i: int) -> str:
        return f"v{n}" if self.level_size(n) == 1 else f"v{n}_{i + 1}"

    def locate(self, v: str) -> Optional[tuple[int, int]]:
        m = _BRATTELI_VERTEX.match(v)
        if not m:
            return None
        n = int(m.group("n"))
        if n < 1:
            return None
        size = self.level_size(n)
        if m.group("i") is None:
            return (n, 0) if size == 1 else None
        i = int(m.group("i")) - 1
        return (n, i) if size > 1 and 0 <= i < size else None

    def edge(self, n: int, i: int, j: int, c: int) -> Edge:
        letter = _COPY_LETTERS[c] if c < len(_COPY_LETTERS) else f"x{c}_"
        if self.level_size(n) == 1 and self.level_size(n + 1) == 1:
            eid = f"{letter}{n}"
        else:
            eid = f"{letter}{n}_{i + 1}_{j + 1}"
        return Edge(eid, self.vertex(n + 1, j), self.vertex(n, i))

    def in_edges(self, n: int, i: int) -> list[Edge]:
        row = self.matrix(n)[i]
        return [self.edge(n, i, j, c) for j, k in enumerate(row) for c in range(k)]

    def edge_coords(self, e: Edge) -> tuple[int, int, int, int]:
        """(level, range index, source index, copy) of a diagram edge."""
        n, i = self.locate(e.range)
        _, j = self.locate(e.source)
        for c, f in enumerate(self.in_edges(n, i)):
            if f == e:
                break
        else:
            raise KeyError(e.id)
        return n, i, j, sum(1 for f in self.in_edges(n, i)[:c] if f.source == e.source)

    def extendable(self) -> list[set[int]]:
        """For each level up to the template level, the vertex indices that
        are the range of an infinite path."""
        rep = self.repeat
        good = set(range(len(rep)))
        while True:
            nxt = {i for i in good if any(rep[i][j] for j in good)}
            if nxt == good:
                break
            good = nxt
        levels: list[set[int]] = [good]
        for n in range(len(self.prefix), 0, -1):
            m = self.matrix(n)
            below = levels[0]
            levels.insert(0, {i for i in range(len(m)) if any(m[i][j] for j in below)})
        return levels


@dataclass(frozen=True)
class GraphPresentation:
    name: str = "graph"
    vertices: tuple[str, ...] = ()
    edges: tuple[Edge, ...] = ()
    bundles: tuple[Bundle, ...] = ()
    tails: tuple[str, ...] = ()
    fans: tuple[Fan, ...] = ()
    bratteli: Optional[BratteliPresentation] = None

    def __post_init__(self):
        if self.bratteli is not None and (
            self.vertices or self.edges or self.bundles or self.tails or self.fans
        ):
            raise ValueError("a bratteli presentation cannot carry core records")
        seen: set[str] = set()
        for ident in list(self.vertices) + [e.id for e in self.edges] + [
            b.id for b in self.bundles
        ] + [f.id for f in self.fans]:
            if ident in seen:
                raise ValueError(f"duplicate identifier {ident!r}")
            seen.add(ident)
        if len(set(self.tails)) != len(self.tails):
            raise ValueError("duplicate tail record")
        for t in self.tails:
            if t not in self.vertices:
                raise ValueError(f"tail attached at undeclared vertex {t!r}")
        for e in self.edges:
            if e.source not in self.vertices:
                raise ValueError(f"edge {e.id!r} must leave a declared vertex, not {e.source!r}")
            if not self.has_vertex(e.range):
                raise ValueError(f"edge {e.id!r} names unknown vertex {e.range!r}")
        for b in self.bundles:
            for v in (b.source, b.range):
                if v not in self.vertices:
                    raise ValueError(f"bundle {b.id!r} names unknown vertex {v!r}")
        for f in self.fans:
            if f.source not in self.vertices or f.attach not in self.tails:
                raise ValueError(f"fan {f.id!r} needs a declared source and a tail at {f.attach!r}")
            if f.start < 0 or f.step < 1:
                raise ValueError(f"fan {f.id!r} needs start >= 0 and step >= 1")

    # -- classification -------------------------------------------------
    @property
    def is_bratteli(self) -> bool:
        return self.bratteli is not None

    @property
    def is_finite(self) -> bool:
        return not (self.bratteli or self.bundles or self.tails or self.fans)

    @property
    def has_omega(self) -> bool:
        """True when some vertex is the range of infinitely many edges."""
        return bool(self.bundles or self.fans)

    def has_vertex(self, v: str) -> bool:
        if self.bratteli is not None:
            return self.bratteli.locate(v) is not None
        if v in self._vertex_set:
            return True
        m = _TAIL_VERTEX.match(v)
        return bool(m) and m.group("base") in self._tail_set and int(m.group("k")) >= 1

    def tail_position(self, v: str) -> Optional[tuple[str, int]]:
        """(attach vertex, position) for tail vertices, None otherwise."""
        if v in self._vertex_set:
            return None
        m = _TAIL_VERTEX.match(v)
        if m and m.group("base") in self._tail_set:
            return m.group("base"), int(m.group("k"))
        return None

    def is_core(self, v: str) -> bool:
        return self.bratteli is None and v in self._vertex_set

    @cached_property
    def _vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def _tail_set(self) -> frozenset[str]:
        return frozenset(self.tails)

    @cached_property
    def _plain_in(self) -> dict[str, list[Edge]]:
        idx: dict[str, list[Edge]] = {}
        for e in sorted(self.edges):
            idx.setdefault(e.range, []).append(e)
        return idx

    def in_edges(self, v: str, width: int = 2) -> list[Edge]:
        """Edges with range ``v``; bundles contribute their first ``width``
        copies, fans the copy landing at ``v`` (if any)."""
        if self.bratteli is not None:
            loc = self.bratteli.locate(v)
            if loc is None:
                raise KeyError(v)
            return self.bratteli.in_edges(*loc)
        if not self.has_vertex(v):
            raise KeyError(v)
        out = list(self._plain_in.get(v, ()))
        for b in sorted(self.bundles):
            if b.range == v:
                out.extend(b.copy(i) for i in range(1, width + 1))
        tp = self.tail_position(v)
        attach, pos = tp if tp else (v, 0)
        if attach in self._tail_set:
            out.append(tail_edge(attach, pos + 1))
            for f in sorted(self.fans):
                if f.attach == attach:
                    i = f.index_at(pos)
                    if i is not None:
                        out.append(f.copy(i))
        return out

    def edge(self, eid: str) -> Edge:
        """Resolve an edge identifier, including synthetic copies and tail edges."""
        if self.bratteli is not None:
            raise KeyError("edge lookup by id is not supported for bratteli diagrams")
        for e in self.edges:
            if e.id == eid:
                return e
        m = _COPY.match(eid)
        if m:
            i = int(m.group("i"))
            for b in self.bundles:
                if b.id == m.group("base") and i >= 1:
                    return b.copy(i)
            for f in self.fans:
                if f.id == m.group("base") and i >= 1:
                    return f.copy(i)
        m = _TAIL_EDGE.match(eid)
        if m and m.group("base") in self._tail_set and int(m.group("k")) >= 1:
            return tail_edge(m.group("base"), int(m.group("k")))
        raise KeyError(eid)

    # -- singular structure ---------------------------------------------
    def sources(self) -> list[str]:
        if self.bratteli is not None:
            return []
        return [v for v in sorted(self.vertices) if not self.in_edges(v, width=1)]

    def infinite_receivers(self) -> list[str]:
        if self.bratteli is not None:
            return []
        return sorted({b.range for b in self.bundles})

    def singular_vertices(self) -> list[str]:
        return sorted(set(self.sources()) | set(self.infinite_receivers()))

    @cached_property
    def _extendable(self) -> frozenset[str]:
        # core vertices that are the range of an infinite path
        good = set(self.vertices)
        while True:
            nxt = set()
            for v in good:
                if v in self._tail_set:
                    nxt.add(v)
                    continue
                for e in self.in_edges(v, width=1):
                    if e.source in good:
                        nxt.add(v)
                        break
            if nxt == good:
                return frozenset(good)
            good = nxt

    def has_infinite_path(self, v: str) -> bool:
        if self.bratteli is not None:
            n, i = self.bratteli.locate(v)
            levels = self.bratteli.extendable()
            return i in levels[min(n, len(levels)) - 1]
        if self.tail_position(v) is not None:
            return True
        return v in self._extendable

    def __str__(self) -> str:
        return dump_graph(self)


@dataclass(frozen=True, repr=False)
class Path:
    """A finite path ``e1 ... en``; length-0 paths are vertices."""

    edges: tuple[Edge, ...]
    base: str

    def __post_init__(self):
        if self.edges and self.edges[0].range != self.base:
            raise ValueError("path base must be the range of its first edge")
        for a, b in zip(self.edges, self.edges[1:]):
            if a.source != b.range:
                raise ValueError(f"edges {a.id} and {b.id} are not composable")

    @classmethod
    def vertex(cls, v: str) -> "Path":
        return cls((), v)

    @classmethod
    def of(cls, edges: Sequence[Edge]) -> "Path":
        edges = tuple(edges)
        if not edges:
            raise ValueError("use Path.vertex for length-0 paths")
        return cls(edges, edges[0].range)

    @property
    def range(self) -> str:
        return self.base

    @property
    def source(self) -> str:
        return self.edges[-1].source if self.edges else self.base

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)

    def __mul__(self, other: "Path") -> "Path":
        if self.source != other.range:
            raise ValueError(f"cannot compose: s={self.source} but r={other.range}")
        return Path(self.edges + other.edges, self.base)

    def __getitem__(self, s: slice) -> "Path":
        if not isinstance(s, slice):
            raise TypeError("paths are sliced, not indexed; use .edges")
        start, stop, _ = s.indices(len(self.edges))
        sub = self.edges[start:stop]
        if sub:
            return Path(sub, sub[0].range)
        if start == 0:
            return Path.vertex(self.base)
        return Path.vertex(self.edges[min(start, len(self.edges)) - 1].source)

    def vertices(self) -> list[str]:
        return [self.base] + [e.source for e in self.edges]

    def has_cycle(self) -> bool:
        vs = self.vertices()
        return len(set(vs)) != len(vs)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def sort_key(self):
        return (len(self.edges), self.ids, self.base)

    def __lt__(self, other: "Path") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return " ".join(self.ids) if self.edges else self.base

    def __repr__(self) -> str:
        return f"Path({self})"

    def to_json(self):
        return list(self.ids) if self.edges else self.base


def _primitive_root(cycle: tuple[Edge, ...]) -> tuple[Edge, ...]:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            return cycle[:d]
    return cycle


class EPPath:
    """The eventually periodic infinite path ``prefix . cycle^infinity``.

    Values compare equal exactly when they denote the same infinite path; the
    canonical form has the shortest prefix and a primitive cycle.
    """

    __slots__ = ("prefix", "cycle", "_key")

    def __init__(self, prefix: Path, cycle: Path):
        if len(cycle) < 1:
            raise ValueError("cycle must have length >= 1")
        if cycle.range != cycle.source:
            raise ValueError("cycle must be closed")
        if prefix.source != cycle.range:
            raise ValueError("prefix is not composable with cycle")
        self.prefix = prefix
        self.cycle = cycle
        self._key = None

    @classmethod
    def periodic(cls, cycle: Path) -> "EPPath":
        return cls(Path.vertex(cycle.range), cycle)

    def canonical(self) -> "EPPath":
        pre = list(self.prefix.edges)
        cyc = list(self.cycle.edges)
        while pre and pre[-1] == cyc[-1]:
            pre.pop()
            cyc = [cyc[-1]] + cyc[:-1]
        cyc = list(_primitive_root(tuple(cyc)))
        prefix = Path(tuple(pre), pre[0].range) if pre else Path.vertex(cyc[0].range)
        out = EPPath(prefix, Path.of(cyc))
        out._key = (out.prefix.ids, out.prefix.base, out.cycle.ids)
        return out

    @property
    def key(self):
        if self._key is None:
            self._key = self.canonical()._key
        return self._key

    @property
    def range(self) -> str:
        return self.prefix.range

    def edge_at(self, i: int) -> Edge:
        if i < len(self.prefix):
            return self.prefix.edges[i]
        return self.cycle.edges[(i - len(self.prefix)) % len(self.cycle)]

    def truncate(self, d: int) -> Path:
        if d == 0:
            return Path.vertex(self.range)
        return Path(tuple(self.edge_at(i) for i in range(d)), self.range)

    def agrees_with(self, other: "EPPath") -> bool:
        """Equality by truncation at the depth fixed by the canonicalization
        contract; independent of ``canonical``."""
        d = len(self.prefix) + len(other.prefix) + 2 * math.lcm(len(self.cycle), len(other.cycle))
        return self.range == other.range and self.truncate(d) == other.truncate(d)

    def __eq__(self, other) -> bool:
        return isinstance(other, EPPath) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        c = self.canonical()
        pre = f"{c.prefix} " if len(c.prefix) else ""
        return f"EPPath({pre}({c.cycle})^inf)"

    def to_json(self):
        c = self.canonical()
        return {"prefix": c.prefix.to_json(), "cycle": list(c.cycle.ids)}


def shift(x: EPPath, p: int) -> EPPath:
    """Remove the first ``p`` edges of ``x``."""
    if p < 0:
        raise ValueError("shift amount must be >= 0")
    if p <= len(x.prefix):
        rest = x.prefix[p:]
        return EPPath(rest, x.cycle).canonical()
    k = (p - len(x.prefix)) % len(x.cycle)
    cyc = x.cycle.edges[k:] + x.cycle.edges[:k]
    return EPPath.periodic(Path.of(cyc)).canonical()


def enumerate_paths(
    g: GraphPresentation,
    from_range: str,
    max_len: Optional[int] = None,
    cycle_free: bool = False,
    width: int = 2,
    tail_limit: Optional[int] = None,
) -> list[Path]:
    """All paths with range ``from_range`` and length <= ``max_len``.

    ``width`` caps how many copies of each bundle are materialized and
    ``tail_limit`` how deep tails are followed.  ``max_len`` may be omitted
    for cycle-free enumeration on graphs whose cycle-free paths are bounded
    (finite graphs, or any graph once ``tail_limit`` is given).
    """
    if not g.has_vertex(from_range):
        raise KeyError(f"unknown vertex {from_range!r}")
    if max_len is None:
        bounded = cycle_free and (g.is_finite or (tail_limit is not None and not g.is_bratteli))
        if not bounded:
            raise ValueError("max_len is required for this presentation")
    out: list[Path] = []

    def allowed(v: str) -> bool:
        if tail_limit is None:
            return True
        tp = g.tail_position(v)
        return tp is None or tp[1] <= tail_limit

    def walk(edges: list[Edge], seen: set[str], here: str):
        out.append(Path(tuple(edges), from_range))
        if max_len is not None and len(edges) >= max_len:
            return
        for e in g.in_edges(here, width=width):
            nxt = e.source
            if cycle_free and nxt in seen:
                continue
            if not allowed(nxt):
                continue
            edges.append(e)
            seen.add(nxt)
            walk(edges, seen, nxt)
            edges.pop()
            if cycle_free:
                seen.discard(nxt)

    walk([], {from_range}, from_range)
    out.sort(key=Path.sort_key)
    return out


# -- text format ---------------------------------------------------------

_EDGE_RE = re.compile(rf"^edge\s+({_REF})\s*:\s*({_REF})\s*->\s*({_REF})$")
_BUNDLE_RE = re.compile(rf"^bundle\s+({_ID})\s*:\s*({_ID})\s*=>\s*({_ID})$")
_FAN_RE = re.compile(rf"^fan\s+({_REF})\s*:\s*({_ID})\s*=>\s*({_ID})\s*@\s*(\d+)\s*\+\s*(\d+)$")


def _parse_matrix(text: str, lineno: int) -> Matrix:
    try:
        m = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad matrix {text!r}: {exc.msg}", lineno) from None
    if not (isinstance(m, list) and m and all(isinstance(r, list) for r in m)):
        raise ParseError(f"matrix must be a list of rows: {text!r}", lineno)
    if not all(isinstance(x, int) and not isinstance(x, bool) for r in m for x in r):
        raise ParseError(f"matrix entries must be integers: {text!r}", lineno)
    return tuple(tuple(r) for r in m)


def _parse_prefix(text: str, lineno: int) -> tuple[Matrix, ...]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ParseError("prefix must be written [M1; M2; ...]", lineno)
    inner = body[1:-1].strip()
    if not inner:
        return ()
    return tuple(_parse_matrix(part.strip(), lineno) for part in inner.split(";"))


def parse_graph(text: str) -> GraphPresentation:
    """Parse the line-oriented graph format (``#`` starts a comment)."""
    name = "graph"
    kind: Optional[str] = None
    vertices: list[str] = []
    edges: list[Edge] = []
    bundles: list[Bundle] = []
    tails: list[str] = []
    fans: list[Fan] = []
    prefix: Optional[tuple[Matrix, ...]] = None
    repeat: Optional[Matrix] = None
    ids: dict[str, int] = {}
    ended = False

    def claim(ident: str, lineno: int):
        if ident in ids:
            raise ParseError(f"duplicate identifier {ident!r} (first on line {ids[ident]})", lineno)
        ids[ident] = lineno

    def need(k: str, lineno: int):
        nonlocal kind
        if kind is None:
            kind = k
        elif kind != k:
            raise ParseError(f"{k} record inside a {kind} block", lineno)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            raise ParseError("content after 'end'", lineno)
        word = line.split()[0]
        if word in ("graph", "bratteli"):
            parts = line.split()
            if len(parts) > 2:
                raise ParseError(f"expected '{word} <name>'", lineno)
            need(word, lineno)
            if len(parts) == 2:
                name = parts[1]
        elif word == "end":
            ended = True
        elif word == "vertex":
            need("graph", lineno)
            parts = line.split()
            if len(parts) != 2 or not re.fullmatch(_ID, parts[1]):
                raise ParseError("expected 'vertex <id>'", lineno)
            claim(parts[1], lineno)
            vertices.append(parts[1])
        elif word == "edge":
            need("graph", lineno)
            m = _EDGE_RE.match(line)
            if not m:
                raise ParseError("expected 'edge <id> : <src> -> <rng>'", lineno)
            if _TAIL_EDGE.match(m.group(1)):
                raise ParseError(f"reserved edge identifier {m.group(1)!r}", lineno)
            claim(m.group(1), lineno)
            edges.append(Edge(m.group(1), m.group(2), m.group(3)))
        elif word == "bundle":
            need("graph", lineno)
            m = _BUNDLE_RE.match(line)
            if not m:
                raise ParseError("expected 'bundle <id> : <src> => <rng>'", lineno)
            claim(m.group(1), lineno)
            bundles.append(Bundle(m.group(1), m.group(2), m.group(3)))
        elif word == "tail":
            need("graph", lineno)
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'tail <vertex>'", lineno)
            if parts[1] in tails:
                raise ParseError(f"duplicate tail at {parts[1]!r}", lineno)
            tails.append(parts[1])
        elif word == "fan":
            need("graph", lineno)
            m = _FAN_RE.match(line)
            if not m:
                raise ParseError("expected 'fan <id> : <src> => <attach> @ <start> + <step>'", lineno)
            claim(m.group(1), lineno)
            fans.append(Fan(m.group(1), m.group(2), m.group(3), int(m.group(4)), int(m.group(5))))
        elif word == "prefix":
            need("bratteli", lineno)
            prefix = _parse_prefix(line[len("prefix"):], lineno)
        elif word == "repeat":
            need("bratteli", lineno)
            body = line[len("repeat"):].strip()
            repeat = _parse_matrix(body, lineno)
        else:
            raise ParseError(f"unknown record {word!r}", lineno)

    if kind == "bratteli":
        if repeat is None:
            raise ParseError("bratteli block needs a 'repeat' matrix")
        try:
            br = BratteliPresentation(prefix or (), repeat)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        return GraphPresentation(name=name, bratteli=br)

    declared = set(vertices)
    tail_set = set(tails)

    def known(v: str) -> bool:
        m = _TAIL_VERTEX.match(v)
        return v in declared or (bool(m) and m.group("base") in tail_set and int(m.group("k")) >= 1)

    def where(ident: str) -> int:
        return ids.get(ident)

    for e in edges:
        if e.source not in declared:
            raise ParseError(f"edge {e.id!r} must leave a declared vertex, not {e.source!r}", where(e.id))
        if not known(e.range):
            raise ParseError(f"edge {e.id!r} names undeclared vertex {e.range!r}", where(e.id))
    for b in bundles:
        for v in (b.source, b.range):
            if v not in declared:
                raise ParseError(f"bundle {b.id!r} names undeclared vertex {v!r}", where(b.id))
    for t in tails:
        if t not in declared:
            raise ParseError(f"tail attached at undeclared vertex {t!r}")
    for f in fans:
        if f.source not in declared:
            raise ParseError(f"fan {f.id!r} names undeclared vertex {f.source!r}", where(f.id))
        if f.attach not in tail_set:
            raise ParseError(f"fan {f.id!r} needs a tail at {f.attach!r}", where(f.id))
        if f.step < 1:
            raise ParseError(f"fan {f.id!r} needs step >= 1", where(f.id))
    return GraphPresentation(
        name=name,
        vertices=tuple(vertices),
        edges=tuple(edges),
        bundles=tuple(bundles),
        tails=tuple(tails),
        fans=tuple(fans),
    )


def _matrix_text(m: Matrix) -> str:
    return json.dumps([list(r) for r in m], separators=(",", ","))


def dump_graph(g: GraphPresentation) -> str:
    if g.bratteli is not None:
        pre = "; ".join(_matrix_text(m) for m in g.bratteli.prefix)
        return (
            f"bratteli {g.name}\nprefix [{pre}]\nrepeat {_matrix_text(g.bratteli.repeat)}\nend\n"
        )
    lines = [f"graph {g.name}"]
    lines += [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e.id} : {e.source} -> {e.range}" for e in g.edges]
    lines += [f"bundle {b.id} : {b.source} => {b.range}" for b in g.bundles]
    lines += [f"tail {t}" for t in g.tails]
    lines += [f"fan {f.id} : {f.source} => {f.attach} @ {f.start} + {f.step}" for f in g.fans]
    lines.append("end")
    return "\n".join(lines) + "\n"
