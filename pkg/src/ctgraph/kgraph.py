"""Rank-2 graphs: colored presentations with squares, and products of 1-graphs.

A colored path is stored in blue-then-red normal form, range end first.  A
square ``b r ~ r' b'`` says the blue-red word ``b r`` equals the red-blue word
``r' b'``; normalizing a word moves blue edges toward the range end using the
squares backwards.  A product path is a pair of factor paths.

Both kinds expose the same small interface (``vertices``, ``paths``,
``compose``, ``factorize``), and the ancestry, generalized-cycle and tightness
searches are written against it.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterator, Optional

from .ancestry import finite_ancestry
from .cyclecheck import is_acyclic, no_cycle_has_entrance
from .graphcore import GraphPresentation, ParseError, Path, enumerate_paths, parse_graph
from .verdict import Verdict

__all__ = [
    "KEdge",
    "KPath",
    "KGraph2",
    "ColoredKGraph",
    "ProductKGraph",
    "parse_kgraph",
    "embed_1graph",
    "validate_2graph",
    "enumerate_lambda_n",
    "factorize",
    "compose",
    "is_minimal_k",
    "minimal_ancestry_pairs_k",
    "strong_finite_ancestry",
    "is_generalized_cycle",
    "gen_cycle_has_entrance",
    "find_generalized_cycle_with_entrance",
    "is_tight",
    "strictly_aperiodic",
    "ctrace_k",
]

Degree = tuple[int, int]
BLUE, RED = "blue", "red"


@dataclass(frozen=True, order=True)
class KEdge:
    id: str
    source: str
    range: str
    color: str

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class KPath:
    """``first``/``second`` are the blue/red words of a colored path, or the
    two coordinate paths of a product path."""

    first: tuple
    second: tuple
    range: Hashable
    source: Hashable

    @property
    def degree(self) -> Degree:
        return (len(self.first), len(self.second))

    @property
    def ids(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return tuple(e.id for e in self.first), tuple(e.id for e in self.second)

    def __str__(self) -> str:
        a, b = self.ids
        if not a and not b:
            return _vname(self.range)
        if isinstance(self.range, tuple):
            return f"({' '.join(a) or _vname(self.range[0])} | {' '.join(b) or _vname(self.range[1])})"
        return " ".join(a + b)

    __repr__ = __str__

    def to_json(self):
        a, b = self.ids
        return {"first": list(a), "second": list(b), "range": _vname(self.range),
                "source": _vname(self.source)}


def _vname(v) -> str:
    return f"({v[0]},{v[1]})" if isinstance(v, tuple) else str(v)


def _leq(a: Degree, b: Degree) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


def _sub(a: Degree, b: Degree) -> Degree:
    return (a[0] - b[0], a[1] - b[1])


def _add(a: Degree, b: Degree) -> Degree:
    return (a[0] + b[0], a[1] + b[1])


def _degrees(bound: Degree) -> list[Degree]:
    return sorted(((i, j) for i in range(bound[0] + 1) for j in range(bound[1] + 1)),
                  key=lambda n: (n[0] + n[1], n))


class KGraph2:
    """Interface shared by colored and product presentations."""

    def vertices(self) -> list:
        raise NotImplementedError

    def paths(self, v, n: Degree) -> list[KPath]:
        raise NotImplementedError

    def compose(self, mu: KPath, nu: KPath) -> KPath:
        raise NotImplementedError

    def factorize(self, lam: KPath, m: Degree, n: Degree) -> tuple[KPath, KPath]:
        raise NotImplementedError

    def vertex_path(self, v) -> KPath:
        return KPath((), (), v, v)

    @property
    def colors(self) -> tuple[bool, bool]:
        """Which degree directions carry edges."""
        return (True, True)

    def extensions(self, lam: KPath, n: Degree) -> list[KPath]:
        return [self.compose(lam, nu) for nu in self.paths(lam.source, n)]


# -- colored presentations ------------------------------------------------------

@dataclass
class ColoredKGraph(KGraph2):
    name: str
    verts: tuple[str, ...]
    blue: tuple[KEdge, ...]
    red: tuple[KEdge, ...]
    squares: dict  # (blue, red) -> (red, blue), by edge

    def __post_init__(self):
        self._cache: dict = {}

    def vertices(self) -> list[str]:
        return sorted(self.verts)

    @property
    def colors(self) -> tuple[bool, bool]:
        return (bool(self.blue), bool(self.red))

    @cached_property
    def _into(self) -> dict:
        idx: dict = {}
        for e in sorted(self.blue + self.red):
            idx.setdefault((e.range, e.color), []).append(e)
        return idx

    @cached_property
    def _inverse(self) -> dict:
        return {v: k for k, v in self.squares.items()}

    def into(self, v: str, color: str) -> list[KEdge]:
        return self._into.get((v, color), [])

    def _words(self, v: str, n: int, color: str) -> list[tuple[KEdge, ...]]:
        out = [()]
        ends = {(): v}
        for _ in range(n):
            nxt = []
            for w in out:
                for e in self.into(ends[w], color):
                    w2 = w + (e,)
                    ends[w2] = e.source
                    nxt.append(w2)
            out = nxt
        return out

    def paths(self, v: str, n: Degree) -> list[KPath]:
        key = (v, n)
        if key not in self._cache:
            res = []
            for bw in self._words(v, n[0], BLUE):
                mid = bw[-1].source if bw else v
                for rw in self._words(mid, n[1], RED):
                    src = rw[-1].source if rw else mid
                    res.append(KPath(bw, rw, v, src))
            self._cache[key] = res
        return self._cache[key]

    def make(self, word: tuple[KEdge, ...], base: Optional[str] = None) -> KPath:
        """Normal form of an arbitrary composable word."""
        if not word:
            return self.vertex_path(base)
        w = self.normalize(word)
        k = sum(1 for e in w if e.color == BLUE)
        return KPath(tuple(w[:k]), tuple(w[k:]), w[0].range, w[-1].source)

    def normalize(self, word) -> list[KEdge]:
        w = list(word)
        for a, b in zip(w, w[1:]):
            if a.source != b.range:
                raise ValueError(f"{a.id} {b.id} is not composable")
        changed = True
        while changed:
            changed = False
            for i in range(len(w) - 1):
                if w[i].color == RED and w[i + 1].color == BLUE:
                    w[i], w[i + 1] = self._inverse[(w[i], w[i + 1])]
                    changed = True
        return w

    def _word(self, p: KPath) -> tuple[KEdge, ...]:
        return tuple(p.first) + tuple(p.second)

    def compose(self, mu: KPath, nu: KPath) -> KPath:
        if mu.source != nu.range:
            raise ValueError(f"cannot compose {mu} with {nu}")
        w = self._word(mu) + self._word(nu)
        return self.make(w, mu.range)

    def factorize(self, lam: KPath, m: Degree, n: Degree) -> tuple[KPath, KPath]:
        if _add(m, n) != lam.degree:
            raise ValueError(f"degree {lam.degree} is not {m} + {n}")
        b1, b2 = lam.first[: m[0]], lam.first[m[0]:]
        r1, r2 = lam.second[: m[1]], lam.second[m[1]:]
        mid = list(b2 + r1)
        # move the first m[1] reds past the remaining blues
        changed = True
        while changed:
            changed = False
            for i in range(len(mid) - 1):
                if mid[i].color == BLUE and mid[i + 1].color == RED:
                    mid[i], mid[i + 1] = self.squares[(mid[i], mid[i + 1])]
                    changed = True
        r1p, b2p = tuple(mid[: m[1]]), tuple(mid[m[1]:])
        mu_src = r1p[-1].source if r1p else (b1[-1].source if b1 else lam.range)
        mu = KPath(tuple(b1), r1p, lam.range, mu_src)
        nu = KPath(b2p, tuple(r2), mu_src, lam.source)
        return mu, nu

    def all_words(self, max_blue: int, max_red: int) -> Iterator[tuple[KEdge, ...]]:
        """Every composable word with at most the given number of each color."""
        edges = sorted(self.blue + self.red)

        def grow(w: tuple, nb: int, nr: int):
            yield w
            here = w[-1].source
            for e in edges:
                if e.range != here:
                    continue
                if e.color == BLUE and nb < max_blue:
                    yield from grow(w + (e,), nb + 1, nr)
                elif e.color == RED and nr < max_red:
                    yield from grow(w + (e,), nb, nr + 1)

        for e in edges:
            yield from grow((e,), int(e.color == BLUE), int(e.color == RED))


# -- products -------------------------------------------------------------------

@dataclass
class ProductKGraph(KGraph2):
    name: str
    g1: GraphPresentation
    g2: GraphPresentation

    def __post_init__(self):
        self._cache: dict = {}

    def vertices(self, max_level: int = 2) -> list[tuple]:
        def vs(g):
            if g.is_bratteli:
                br = g.bratteli
                return [br.vertex(n, i) for n in range(1, max_level + 1) for i in range(br.level_size(n))]
            return sorted(g.vertices)

        return [(a, b) for a in vs(self.g1) for b in vs(self.g2)]

    def _factor_paths(self, g, v, n) -> list[Path]:
        key = (id(g), v, n)
        if key not in self._cache:
            self._cache[key] = [p for p in enumerate_paths(g, v, n) if len(p) == n]
        return self._cache[key]

    def paths(self, v, n: Degree) -> list[KPath]:
        out = []
        for p in self._factor_paths(self.g1, v[0], n[0]):
            for q in self._factor_paths(self.g2, v[1], n[1]):
                out.append(KPath(p.edges, q.edges, v, (p.source, q.source)))
        return out

    def compose(self, mu: KPath, nu: KPath) -> KPath:
        if mu.source != nu.range:
            raise ValueError(f"cannot compose {mu} with {nu}")
        return KPath(mu.first + nu.first, mu.second + nu.second, mu.range, nu.source)

    def factorize(self, lam: KPath, m: Degree, n: Degree) -> tuple[KPath, KPath]:
        if _add(m, n) != lam.degree:
            raise ValueError(f"degree {lam.degree} is not {m} + {n}")
        a1, a2 = lam.first[: m[0]], lam.first[m[0]:]
        b1, b2 = lam.second[: m[1]], lam.second[m[1]:]
        mid = (a1[-1].source if a1 else lam.range[0], b1[-1].source if b1 else lam.range[1])
        return KPath(a1, b1, lam.range, mid), KPath(a2, b2, mid, lam.source)

    def factor_pair(self, p: KPath) -> tuple[Path, Path]:
        first = Path(tuple(p.first), p.range[0]) if p.first else Path.vertex(p.range[0])
        second = Path(tuple(p.second), p.range[1]) if p.second else Path.vertex(p.range[1])
        return first, second


# -- parsing ---------------------------------------------------------------------

def parse_kgraph(text: str, base_dir: Optional[str] = None) -> KGraph2:
    name = "kgraph"
    verts: list[str] = []
    blue: list[KEdge] = []
    red: list[KEdge] = []
    sq_lines: list[tuple[int, list[str]]] = []
    prod: Optional[tuple[str, str]] = None
    ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(":", " : ").replace("->", " -> ").split()
        word = parts[0]
        if word == "kgraph":
            if len(parts) > 2:
                raise ParseError("expected 'kgraph <name>'", lineno)
            if len(parts) == 2:
                name = parts[1]
        elif word == "end":
            break
        elif word == "vertex":
            if len(parts) != 2 or parts[1] in ids:
                raise ParseError("expected 'vertex <id>' with a fresh id", lineno)
            ids.add(parts[1])
            verts.append(parts[1])
        elif word in (BLUE, RED):
            if len(parts) != 6 or parts[2] != ":" or parts[4] != "->":
                raise ParseError(f"expected '{word} <id> : <src> -> <rng>'", lineno)
            if parts[1] in ids:
                raise ParseError(f"duplicate identifier {parts[1]!r}", lineno)
            ids.add(parts[1])
            (blue if word == BLUE else red).append(KEdge(parts[1], parts[3], parts[5], word))
        elif word == "square":
            if len(parts) != 6 or parts[3] != "~":
                raise ParseError("expected 'square <b> <r> ~ <r'> <b'>'", lineno)
            sq_lines.append((lineno, parts[1:3] + parts[4:6]))
        elif word == "product":
            if len(parts) != 3:
                raise ParseError("expected 'product <file1> <file2>'", lineno)
            prod = (parts[1], parts[2])
        else:
            raise ParseError(f"unknown record {word!r}", lineno)
    if prod is not None:
        if verts or blue or red or sq_lines:
            raise ParseError("a product record cannot be mixed with colored records")
        gs = []
        for f in prod:
            path = f if base_dir is None or os.path.isabs(f) else os.path.join(base_dir, f)
            try:
                with open(path) as fh:
                    gs.append(parse_graph(fh.read()))
            except OSError as exc:
                raise ParseError(f"cannot read factor {f!r}: {exc.strerror}") from None
        return ProductKGraph(name, gs[0], gs[1])
    byid = {e.id: e for e in blue + red}
    vset = set(verts)
    for e in blue + red:
        if e.source not in vset or e.range not in vset:
            raise ParseError(f"edge {e.id!r} names an undeclared vertex")
    squares = {}
    for lineno, (b, r, r2, b2) in sq_lines:
        try:
            eb, er, er2, eb2 = byid[b], byid[r], byid[r2], byid[b2]
        except KeyError as exc:
            raise ParseError(f"unknown edge {exc.args[0]!r} in square", lineno) from None
        if (eb.color, er.color, er2.color, eb2.color) != (BLUE, RED, RED, BLUE):
            raise ParseError("square must read 'blue red ~ red blue'", lineno)
        if (eb, er) in squares:
            raise ParseError(f"second square for {b} {r}", lineno)
        squares[(eb, er)] = (er2, eb2)
    return ColoredKGraph(name, tuple(verts), tuple(blue), tuple(red), squares)


def embed_1graph(g: GraphPresentation) -> ColoredKGraph:
    """A finite 1-graph as a colored graph with no red edges."""
    if not g.is_finite:
        raise ValueError("only finite graphs can be embedded")
    blue = tuple(KEdge(e.id, e.source, e.range, BLUE) for e in g.edges)
    return ColoredKGraph(g.name, tuple(g.vertices), blue, (), {})


# -- validation ---------------------------------------------------------------------

def validate_2graph(k: KGraph2, max_degree: Degree = (3, 3)) -> dict:
    problems: list[str] = []
    if isinstance(k, ProductKGraph):
        for i, g in enumerate((k.g1, k.g2), start=1):
            if g.has_omega:
                problems.append(f"factor {i} is not row-finite")
            if g.sources():
                problems.append(f"factor {i} has sources: {', '.join(g.sources())}")
        return {"valid": not problems, "kind": "product", "problems": problems}
    assert isinstance(k, ColoredKGraph)
    blue_present, red_present = k.colors
    for v in k.vertices():
        if blue_present and not k.into(v, BLUE):
            problems.append(f"vertex {v} receives no blue edge")
        if red_present and not k.into(v, RED):
            problems.append(f"vertex {v} receives no red edge")
    br = [(b, r) for b in k.blue for r in k.red if b.source == r.range]
    rb = [(r, b) for r in k.red for b in k.blue if r.source == b.range]
    for pair in br:
        if pair not in k.squares:
            problems.append(f"no square for {pair[0].id} {pair[1].id}")
    images: dict = {}
    for (b, r), (r2, b2) in k.squares.items():
        if b.source != r.range or r2.source != b2.range:
            problems.append(f"square {b.id} {r.id} ~ {r2.id} {b2.id} has non-composable sides")
            continue
        if b.range != r2.range or r.source != b2.source:
            problems.append(f"square {b.id} {r.id} ~ {r2.id} {b2.id} has mismatched endpoints")
        images.setdefault((r2, b2), []).append((b, r))
    for img, pre in images.items():
        if len(pre) > 1:
            names = ", ".join(f"{b.id} {r.id}" for b, r in pre)
            problems.append(f"squares not injective: {names} all map to {img[0].id} {img[1].id}")
    for pair in rb:
        if pair not in images:
            problems.append(f"red-blue word {pair[0].id} {pair[1].id} is not hit by a square")
    words = 0
    if not problems:
        for w in k.all_words(*max_degree):
            words += 1
            forms = _all_normal_forms(k, w)
            if len(forms) != 1:
                problems.append(f"word {' '.join(e.id for e in w)} has {len(forms)} normal forms")
                break
    return {"valid": not problems, "kind": "colored", "words_checked": words, "problems": problems}


def _all_normal_forms(k: ColoredKGraph, word) -> set:
    """Normal forms reachable by applying square moves in every order."""
    inv = k._inverse
    seen = {tuple(word)}
    todo = deque([tuple(word)])
    forms = set()
    while todo:
        w = todo.popleft()
        moved = False
        for i in range(len(w) - 1):
            if w[i].color == RED and w[i + 1].color == BLUE:
                moved = True
                a, b = inv[(w[i], w[i + 1])]
                w2 = w[:i] + (a, b) + w[i + 2:]
                if w2 not in seen:
                    seen.add(w2)
                    todo.append(w2)
        if not moved:
            forms.add(w)
    return forms


def enumerate_lambda_n(k: KGraph2, v, n: Degree) -> list[KPath]:
    return list(k.paths(v, n))


def factorize(k: KGraph2, lam: KPath, m: Degree, n: Degree) -> tuple[KPath, KPath]:
    return k.factorize(lam, m, n)


def compose(k: KGraph2, mu: KPath, nu: KPath) -> KPath:
    return k.compose(mu, nu)


# -- ancestry ---------------------------------------------------------------------

def is_minimal_k(k: KGraph2, lam: KPath, mu: KPath) -> bool:
    top = (min(lam.degree[0], mu.degree[0]), min(lam.degree[1], mu.degree[1]))
    for n in _degrees(top):
        if n == (0, 0):
            continue
        _, nu1 = k.factorize(lam, _sub(lam.degree, n), n)
        _, nu2 = k.factorize(mu, _sub(mu.degree, n), n)
        if nu1 == nu2:
            return False
    return True


def minimal_ancestry_pairs_k(k: KGraph2, v, w, bound: Degree) -> tuple[list[tuple[KPath, KPath]], bool]:
    """Minimal ancestry pairs with both degrees <= bound, and whether the list
    is known to be the complete set."""
    into_v = [p for n in _degrees(bound) for p in k.paths(v, n)]
    into_w: dict = {}
    for n in _degrees(bound):
        for p in k.paths(w, n):
            into_w.setdefault(p.source, []).append(p)
    out = [(a, b) for a in into_v for b in into_w.get(a.source, ()) if is_minimal_k(k, a, b)]
    complete = False
    if isinstance(k, ProductKGraph):
        complete = _product_complete(k, v, w, bound)
    return out, complete


def _product_complete(k: ProductKGraph, v, w, bound: Degree) -> bool:
    from .ancestry import _count_minimal

    for g, a, b, n in ((k.g1, v[0], w[0], bound[0]), (k.g2, v[1], w[1], bound[1])):
        if not (is_acyclic(g) and finite_ancestry(g, counts=False).answer == "yes"):
            return False
        # every minimal pair fits in the bound iff none has a coordinate of length n + 1
        pa = [p for p in enumerate_paths(g, a, n + 1)]
        pb = [p for p in enumerate_paths(g, b, n + 1)]
        if _count_minimal(pa, pb) != _count_minimal(
            [p for p in pa if len(p) <= n], [p for p in pb if len(p) <= n]
        ):
            return False
    return True


def _closed_paths(k: ColoredKGraph, bound: Degree) -> list[KPath]:
    out = []
    for v in k.vertices():
        for n in _degrees(bound):
            if n == (0, 0):
                continue
            out.extend(p for p in k.paths(v, n) if p.source == v)
    return out


def _power(k: KGraph2, p: KPath, m: int) -> KPath:
    out = k.vertex_path(p.range)
    for _ in range(m):
        out = k.compose(out, p)
    return out


def strong_finite_ancestry(k: KGraph2, depth: int = 3) -> Verdict:
    if isinstance(k, ProductKGraph):
        factors = []
        ok = True
        for g in (k.g1, k.g2):
            acyclic = is_acyclic(g)
            fa = finite_ancestry(g, counts=False).answer
            factors.append({"acyclic": acyclic, "finite_ancestry": fa})
            ok = ok and acyclic and fa == "yes"
        return Verdict("yes" if ok else "no",
                       {"rule": "product: each factor acyclic with finite ancestry",
                        "factors": factors})
    closed = _closed_paths(k, (depth, depth))
    if not closed:
        pairs = 0
        bound = (len(k.verts), len(k.verts))
        for v in k.vertices():
            for w in k.vertices():
                pairs += len(minimal_ancestry_pairs_k(k, v, w, bound)[0])
        return Verdict("yes", {"rule": "no closed paths: finitely many paths",
                               "pairs": pairs})
    family = None
    for v in k.vertices():
        blues = [p for p in closed if p.range == v and p.degree[1] == 0]
        reds = [p for p in closed if p.range == v and p.degree[0] == 0]
        if blues and reds:
            family = (blues[0], reds[0])
            break
    rule = "(beta^m, rho^m) for closed blue and red paths at one vertex"
    if family is None:
        family = (closed[0], k.vertex_path(closed[0].range))
        rule = "(omega^m, v) for a closed path omega at v"
    examples = []
    for m in (1, 2, 3):
        a = _power(k, family[0], m)
        b = _power(k, family[1], m) if family[1].degree != (0, 0) else family[1]
        if not is_minimal_k(k, a, b):
            raise AssertionError(f"family member {a}, {b} is not minimal")
        examples.append([str(a), str(b)])
    return Verdict("no", {"rule": rule, "family": [str(family[0]), str(family[1])],
                          "examples": examples}, depth)


# -- generalized cycles ------------------------------------------------------------

def is_generalized_cycle(k: KGraph2, lam: KPath, mu: KPath) -> bool:
    """Endpoints match and Z(lam) is contained in Z(mu)."""
    if lam.range != mu.range or lam.source != mu.source:
        return False
    join = (max(lam.degree[0], mu.degree[0]), max(lam.degree[1], mu.degree[1]))
    for nu in k.extensions(lam, _sub(join, lam.degree)):
        head, _ = k.factorize(nu, mu.degree, _sub(join, mu.degree))
        if head != mu:
            return False
    return True


def gen_cycle_has_entrance(k: KGraph2, lam: KPath, mu: KPath) -> bool:
    if not is_generalized_cycle(k, lam, mu):
        raise ValueError(f"({lam}, {mu}) is not a generalized cycle")
    return not is_generalized_cycle(k, mu, lam)


def find_generalized_cycle_with_entrance(k: KGraph2, depth: int) -> Optional[tuple[KPath, KPath]]:
    degs = _degrees((depth, depth))
    for v in k.vertices():
        by_src: dict = {}
        for n in degs:
            for p in k.paths(v, n):
                by_src.setdefault(p.source, []).append(p)
        for src in sorted(by_src, key=str):
            ps = by_src[src]
            for lam in ps:
                for mu in ps:
                    if lam != mu and is_generalized_cycle(k, lam, mu) and not is_generalized_cycle(k, mu, lam):
                        return lam, mu
    return None


# -- periodic paths and tightness ---------------------------------------------------

@dataclass
class _Periodic:
    """x = omega omega omega ... for a closed path omega."""

    k: KGraph2
    omega: KPath
    _pow: dict = field(default_factory=dict)

    def seg(self, m: Degree, n: Degree) -> KPath:
        """x(m, n)."""
        a, b = self.omega.degree
        reps = 1
        while not _leq(n, (a * reps, b * reps)):
            reps += 1
        if reps not in self._pow:
            self._pow[reps] = _power(self.k, self.omega, reps)
        full = self._pow[reps]
        head, _ = self.k.factorize(full, n, _sub(full.degree, n))
        _, mid = self.k.factorize(head, m, _sub(n, m))
        return mid

    def shifted_equal(self, p: Degree, q: Degree) -> bool:
        per = self.omega.degree
        return self.seg(p, _add(p, per)) == self.seg(q, _add(q, per))


def _window_agree(k: KGraph2, alpha: KPath, beta: KPath, w: Degree) -> Optional[KPath]:
    """A continuation nu of degree w with (alpha nu) and (beta nu) differing on
    their common initial segment, or None."""
    common = (min(alpha.degree[0], beta.degree[0]) + w[0], min(alpha.degree[1], beta.degree[1]) + w[1])
    for nu in k.paths(alpha.source, w):
        a = k.compose(alpha, nu)
        b = k.compose(beta, nu)
        ha, _ = k.factorize(a, common, _sub(a.degree, common))
        hb, _ = k.factorize(b, common, _sub(b.degree, common))
        if ha != hb:
            return nu
    return None


def _mask(k: KGraph2, n: Degree) -> Degree:
    bp, rp = k.colors
    return (n[0] if bp else 0, n[1] if rp else 0)


def _tight_search(k: ColoredKGraph, depth: int, window: int) -> tuple[Optional[dict], int]:
    """First uncovered isotropy element found, and how many were checked."""
    bp, rp = k.colors
    checked = 0
    for omega in _closed_paths(k, (depth, depth)):
        a, b = omega.degree
        if (bp and a == 0) or (rp and b == 0):
            continue  # omega^infinity would not be an infinite path
        x = _Periodic(k, omega)
        box = [(i, j) for i in range(2 * a + 1) for j in range(2 * b + 1)]
        lags = set()
        for p in box:
            for q in box:
                if p != q and x.shifted_equal(p, q):
                    lags.add(_sub(p, q))
        for n in sorted(lags, key=lambda n: (abs(n[0]) + abs(n[1]), -n[0], -n[1])):
            checked += 1
            witness = None
            for q in box:
                p = _add(q, n)
                if min(p) < 0 or not x.shifted_equal(p, q):
                    continue
                alpha, beta = x.seg((0, 0), p), x.seg((0, 0), q)
                if alpha.source != beta.source:
                    continue
                if _window_agree(k, alpha, beta, _mask(k, (window, window))) is None:
                    witness = (alpha, beta)
                    break
            if witness is None:
                return {"omega": str(omega), "lag": list(n)}, checked
    return None, checked


def is_tight(k: KGraph2, depth: int = 3) -> Verdict:
    if isinstance(k, ProductKGraph):
        ent = [no_cycle_has_entrance(g).answer for g in (k.g1, k.g2)]
        ok = all(a == "yes" for a in ent)
        return Verdict("yes" if ok else "no",
                       {"rule": "product: tight iff no factor cycle has an entrance",
                        "factors": ent})
    window = depth + 1
    bad, checked = _tight_search(k, depth, window)
    if bad is not None:
        return Verdict("no", {"rule": "isotropy element without a uniform witness",
                              "uncovered": bad, "window": window}, depth)
    bad2, _ = _tight_search(k, depth, window + 1)
    if bad2 is None:
        return Verdict("yes", {"rule": "heuristic", "stabilized": True,
                               "isotropy_checked": checked, "window": window}, depth)
    return Verdict("unknown", {"rule": "agreement did not stabilize", "uncovered": bad2}, depth)


def strictly_aperiodic(k: KGraph2, depth: int = 3) -> Verdict:
    if isinstance(k, ProductKGraph):
        acyc = [is_acyclic(g) for g in (k.g1, k.g2)]
        return Verdict("yes" if all(acyc) else "no",
                       {"rule": "product: strictly aperiodic iff both factors are acyclic",
                        "acyclic": acyc})
    bp, rp = k.colors
    for omega in _closed_paths(k, (depth, depth)):
        a, b = omega.degree
        if (bp and a == 0) or (rp and b == 0):
            continue
        return Verdict("no", {"rule": "periodic path", "omega": str(omega),
                              "period": [a, b]}, depth)
    if not _closed_paths(k, (len(k.verts), len(k.verts))):
        return Verdict("yes", {"rule": "no closed paths, hence no infinite paths"})
    return Verdict("unknown", {"rule": "no periodic path within depth"}, depth)


def ctrace_k(k: KGraph2, depth: int = 3) -> Verdict:
    cert: dict = {}
    gc = find_generalized_cycle_with_entrance(k, depth)
    if gc is not None:
        lam, mu = gc
        cert["generalized_cycle"] = {
            "lambda": str(lam), "mu": str(mu), "entrance": True, "range": lam.range,
            "lambda_ids": list(lam.ids[0] + lam.ids[1]), "mu_ids": list(mu.ids[0] + mu.ids[1]),
        }
        return Verdict("no", cert, depth)
    sa = strictly_aperiodic(k, depth)
    sfa = strong_finite_ancestry(k, depth)
    tight = is_tight(k, depth)
    cert.update({
        "generalized_cycle": None,
        "strictly_aperiodic": sa.to_json(),
        "strong_finite_ancestry": sfa.to_json(),
        "tight": tight.to_json(),
    })
    if sa.answer == "yes" and sfa.answer == "no":
        cert["rule"] = "strictly aperiodic without strong finite ancestry"
        return Verdict("no", cert, depth)
    certified = tight.exact or tight.certificate.get("stabilized")
    if sfa.answer == "yes" and tight.answer == "yes" and certified:
        cert["rule"] = "strong finite ancestry and tight"
        exact = sfa.exact and tight.exact
        return Verdict("yes", cert, "exact" if exact else depth)
    cert["rule"] = "no sufficient or necessary condition decided"
    return Verdict("unknown", cert, depth)

