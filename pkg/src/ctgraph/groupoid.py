"""Depth-bounded model of the path groupoid, used as an independent oracle.

Infinite paths are modelled by their length-``D`` truncations that extend to
an infinite path.  Two truncations ``x``, ``y`` are related with lag
``n = p - q`` (``p, q <= d``) when ``x[p:]`` and ``y[q:]`` agree on their
common length; because the longer suffix extends, this is exactly the image of
the true relation ``sigma^p x = sigma^q y``.

The continuous-trace verdict itself does not use this model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional

from .ancestry import AncestryPair, extends, finite_ancestry, is_minimal, minimal_cycle_free_pairs, strip_to_minimal
from .cyclecheck import no_cycle_has_entrance
from .graphcore import EPPath, Edge, GraphPresentation, Path, enumerate_paths
from .verdict import InfiniteFamily, OracleViolation, Verdict

__all__ = [
    "CylinderPair",
    "cylinders_intersect",
    "lemma1_factorization",
    "pi_r_images_intersect",
    "TruncatedGroupoid",
    "isotropy",
    "properness_cover",
    "continuous_trace",
    "continuations",
    "check_lemma1",
    "check_lemma2",
    "check_lemma3",
    "check_axioms",
    "check_cover",
]

Word = tuple[Edge, ...]


@dataclass(frozen=True)
class CylinderPair:
    alpha: Path
    beta: Path

    def __post_init__(self):
        if self.alpha.source != self.beta.source:
            raise ValueError(f"{self.alpha} and {self.beta} have different sources")

    @property
    def degree(self) -> int:
        return len(self.alpha) - len(self.beta)

    @classmethod
    def of(cls, p: AncestryPair) -> "CylinderPair":
        return cls(p.lam, p.mu)

    def __repr__(self) -> str:
        return f"Z({self.alpha}, {self.beta})"


def cylinders_intersect(p1: CylinderPair, p2: CylinderPair) -> tuple[bool, Optional[Path]]:
    """Z(p1) and Z(p2) meet iff one pair is a common extension of the other."""
    a = AncestryPair(p1.alpha, p1.beta)
    b = AncestryPair(p2.alpha, p2.beta)
    eps = extends(a, b)
    if eps is None:
        eps = extends(b, a)
    return eps is not None, eps


# -- continuations ----------------------------------------------------------

def continuations(g: GraphPresentation, v: str, length: int, width: int = 2) -> list[Word]:
    """Paths of exactly ``length`` edges with range ``v`` whose source is the
    range of an infinite path."""
    limit = None if g.is_finite or g.is_bratteli else length + 1
    out = []
    for p in enumerate_paths(g, v, length, width=width, tail_limit=limit):
        if len(p) == length and g.has_infinite_path(p.source):
            out.append(p.edges)
    return out


class _Images:
    """Cached truncated pi_R-images of cylinder pairs."""

    def __init__(self, g: GraphPresentation, depth: int):
        self.g = g
        self.depth = depth
        self._cont: dict[str, list[Word]] = {}
        self._img: dict = {}

    def cont(self, v: str) -> list[Word]:
        if v not in self._cont:
            self._cont[v] = continuations(self.g, v, self.depth)
        return self._cont[v]

    def image(self, p: CylinderPair, m1: int, m2: int) -> frozenset:
        key = (p.alpha.ids, p.alpha.range, p.beta.ids, p.beta.range, m1, m2)
        if key not in self._img:
            a, b = p.alpha.edges, p.beta.edges
            self._img[key] = frozenset(
                ((a + z)[:m1], (b + z)[:m2]) for z in self.cont(p.alpha.source)
            )
        return self._img[key]


def lemma1_factorization(p1: CylinderPair, p2: CylinderPair, simple: bool = True) -> Optional[dict]:
    """The factorization witness making the two images meet, or None.  With
    ``simple=False`` the closing cycle need not be simple."""
    if (p1.alpha, p1.beta) == (p2.alpha, p2.beta):
        return {"kind": "identical"}
    for (a, b), (c, d), tag in (((p1.alpha, p1.beta), (p2.alpha, p2.beta), "first"),
                                ((p2.alpha, p2.beta), (p1.alpha, p1.beta), "second")):
        # a = c a', d = b d', lambda = a' d' a simple cycle
        if len(a) < len(c) or a[: len(c)] != c or len(d) < len(b) or d[: len(b)] != b:
            continue
        a1, d1 = a[len(c):], d[len(b):]
        if not a1.edges and not d1.edges:
            continue
        if a1.range != d1.source:
            continue
        lam = a1 * d1
        if lam.range == lam.source and lam.edges and (_simple(lam) or not simple):
            return {"kind": "factorization", "order": tag,
                    "cycle": list(lam.ids), "split": len(a1)}
    return None


def _simple(c: Path) -> bool:
    vs = [e.range for e in c.edges]
    return len(set(vs)) == len(vs)


def pi_r_images_intersect(
    g: GraphPresentation, p1: CylinderPair, p2: CylinderPair, depth: int = 6, _cache=None
) -> Verdict:
    """Brute force against the factorization criterion.  When both pairs are
    cycle-free and minimal the two must agree, else OracleViolation; outside
    that case the criterion is only reported."""
    imgs = _cache or _Images(g, depth)
    m1 = min(len(p1.alpha), len(p2.alpha)) + depth
    m2 = min(len(p1.beta), len(p2.beta)) + depth
    brute = not imgs.image(p1, m1, m2).isdisjoint(imgs.image(p2, m1, m2))
    hyp = all(AncestryPair(p.alpha, p.beta).cycle_free and AncestryPair(p.alpha, p.beta).minimal
              for p in (p1, p2))
    crit = lemma1_factorization(p1, p2, simple=hyp)
    if hyp and brute != (crit is not None):
        raise OracleViolation(
            f"{p1} vs {p2}: brute force says {brute}, factorization says {crit is not None}"
        )
    return Verdict("yes" if brute else "no",
                   {"brute_force": brute, "criterion": crit, "hypothesis": hyp}, depth)


# -- truncated groupoid -----------------------------------------------------

# (range unit index, lag, source unit index)
Element = tuple[int, int, int]


@dataclass
class TruncatedGroupoid:
    g: GraphPresentation
    depth: int
    ranges: tuple[str, ...]
    units: list[Word] = field(init=False)
    elements: set = field(init=False)

    def __post_init__(self):
        self.units = sorted(
            {w for v in self.ranges for w in continuations(self.g, v, self.D)},
            key=lambda w: tuple(e.id for e in w),
        )
        self._uid = {w: i for i, w in enumerate(self.units)}
        self.elements = self._shift_defined()

    @property
    def D(self) -> int:
        return 2 * self.depth

    def _shift_defined(self) -> set:
        d, D = self.depth, self.D
        index: dict[tuple, list[tuple[int, int]]] = {}
        # bucket units by their suffix from position q, truncated to D - d
        for j, y in enumerate(self.units):
            for q in range(d + 1):
                index.setdefault(y[q: q + D - d], []).append((j, q))
        out = set()
        for i, x in enumerate(self.units):
            for p in range(d + 1):
                for j, q in index.get(x[p: p + D - d], ()):
                    if _agree(x[p:], self.units[j][q:]):
                        out.add((i, p - q, j))
        return out

    def cylinder_generated(self) -> set:
        """Elements (alpha z, |alpha| - |beta|, beta z) built directly from
        cylinder pairs with |alpha|, |beta| <= d."""
        d, D = self.depth, self.D
        limit = None if self.g.is_finite or self.g.is_bratteli else D + 1
        into: dict[str, list[Path]] = {}
        for v in self.ranges:
            for p in enumerate_paths(self.g, v, d, width=2, tail_limit=limit):
                into.setdefault(p.source, []).append(p)
        conts: dict[tuple[str, int], list[Word]] = {}
        out = set()
        for src, paths in into.items():
            for a, b in product(paths, paths):
                n = D - min(len(a), len(b))
                if (src, n) not in conts:
                    conts[src, n] = continuations(self.g, src, n)
                for z in conts[src, n]:
                    x, y = (a.edges + z)[:D], (b.edges + z)[:D]
                    out.add((self._uid.get(x, x), len(a) - len(b), self._uid.get(y, y)))
        return out

    def compose(self, a: Element, b: Element) -> Optional[Element]:
        if a[2] != b[0]:
            return None
        c = (a[0], a[1] + b[1], b[2])
        return c if c in self.elements else None

    @staticmethod
    def inverse(a: Element) -> Element:
        return (a[2], -a[1], a[0])

    def words(self, a: Element) -> tuple[Word, int, Word]:
        return self.units[a[0]], a[1], self.units[a[2]]

    def axiom_violations(self, limit: int = 10, triples: int = 50_000) -> list[str]:
        """Inverse and unit laws for every element; associativity on at most
        ``triples`` composable triples, taken in sorted order."""
        bad: list[str] = []
        by_range: dict[int, list[Element]] = {}
        for a in sorted(self.elements):
            by_range.setdefault(a[0], []).append(a)
        budget = triples
        self.triples_checked = 0
        for a in sorted(self.elements):
            inv = self.inverse(a)
            if inv not in self.elements:
                bad.append(f"inverse of {self._fmt(a)} missing")
            unit_r, unit_s = (a[0], 0, a[0]), (a[2], 0, a[2])
            if self.compose(a, inv) != unit_r or self.compose(inv, a) != unit_s:
                bad.append(f"inverse law fails at {self._fmt(a)}")
            if self.compose(unit_r, a) != a or self.compose(a, unit_s) != a:
                bad.append(f"unit law fails at {self._fmt(a)}")
            for b in by_range.get(a[2], ()):
                if budget <= 0:
                    break
                ab = self.compose(a, b)
                if ab is None:
                    continue
                for c in by_range.get(b[2], ())[:8]:
                    budget -= 1
                    bc = self.compose(b, c)
                    if bc is None:
                        continue
                    left, right = self.compose(ab, c), self.compose(a, bc)
                    if left != right:
                        bad.append(
                            f"associativity fails at {self._fmt(a)}, {self._fmt(b)}, {self._fmt(c)}"
                        )
            if len(bad) >= limit:
                break
        self.triples_checked = triples - max(budget, 0)
        return bad[:limit]

    def _fmt(self, a: Element) -> str:
        x, n, y = self.words(a)
        return f"({' '.join(e.id for e in x)}, {n}, {' '.join(e.id for e in y)})"


def _agree(u: Word, w: Word) -> bool:
    n = min(len(u), len(w))
    return u[:n] == w[:n]


def isotropy(x: EPPath) -> dict:
    c = x.canonical()
    return {"generator": len(c.cycle)}


# -- properness cover -------------------------------------------------------

def _pair_image(pairs: Iterable[AncestryPair], conts, D: int) -> set:
    out = set()
    for p in pairs:
        for z in conts(p.source):
            out.add(((p.lam.edges + z)[:D], (p.mu.edges + z)[:D]))
    return out


def properness_cover(g: GraphPresentation, v: str, w: str, depth: int = 4) -> dict:
    """Compare the lag-bounded relation at (v, w) with the union of images of
    cycle-free minimal pairs.  Raises InfiniteFamily when there are infinitely
    many such pairs."""
    pairs = minimal_cycle_free_pairs(g, v, w)
    longest = max([max(len(p.lam), len(p.mu)) for p in pairs] + [0])
    d = max(depth, longest)
    D = 2 * d
    xs = continuations(g, v, D)
    ys = continuations(g, w, D)
    rel = set()
    index: dict[tuple, list[tuple[Word, int]]] = {}
    for y in ys:
        for q in range(d + 1):
            index.setdefault(y[q: q + D - d], []).append((y, q))
    for x in xs:
        for p in range(d + 1):
            for y, q in index.get(x[p: p + D - d], ()):
                if _agree(x[p:], y[q:]):
                    rel.add((x, y))
    cache: dict[str, list[Word]] = {}

    def conts(s: str):
        if s not in cache:
            cache[s] = continuations(g, s, D)
        return cache[s]

    union = _pair_image(pairs, conts, D)
    missing = sorted(rel - union, key=str)[:3]
    extra = sorted(union - rel, key=str)[:3]
    return {
        "query": [v, w],
        "depth": d,
        "cover_size": len(pairs),
        "cover": [p.to_json() for p in pairs],
        "relation_size": len(rel),
        "equal": rel == union,
        "missing": [[[e.id for e in a], [e.id for e in b]] for a, b in missing],
        "extra": [[[e.id for e in a], [e.id for e in b]] for a, b in extra],
    }


# -- continuous trace ---------------------------------------------------------

def continuous_trace(g: GraphPresentation) -> Verdict:
    """Continuous trace holds iff no cycle has an entrance and the graph has
    finite ancestry; singular graphs are desingularized first."""
    cert: dict = {"desingularized": False}
    h = g
    if not g.is_bratteli and g.singular_vertices():
        from .desingular import desingularize

        h = desingularize(g).result
        cert["desingularized"] = True
    ent = no_cycle_has_entrance(h)
    fa = finite_ancestry(h, counts=False)
    cert["no_cycle_has_entrance"] = ent.to_json()
    cert["finite_ancestry"] = fa.to_json()
    ans = "yes" if ent.answer == "yes" and fa.answer == "yes" else "no"
    return Verdict(ans, cert)


# -- lemma checks ---------------------------------------------------------------

def _query_vertices(g: GraphPresentation, max_level: int = 1) -> list[str]:
    if g.is_bratteli:
        br = g.bratteli
        return [br.vertex(n, i) for n in range(1, max_level + 1) for i in range(br.level_size(n))]
    return sorted(g.vertices)


def _bounded_minimal_pairs(g, v, w, max_len, cycle_free=True):
    from .ancestry import _pairs_from_paths

    width = 2
    limit = None if g.is_finite or g.is_bratteli else max_len + 1
    pv = enumerate_paths(g, v, max_len, cycle_free=cycle_free, width=width, tail_limit=limit)
    pw = enumerate_paths(g, w, max_len, cycle_free=cycle_free, width=width, tail_limit=limit)
    return _pairs_from_paths(pv, pw)


def check_lemma1(g: GraphPresentation, depth: int = 6, max_len: int = 5) -> dict:
    imgs = _Images(g, depth)
    checked = 0
    violations = []
    qs = _query_vertices(g, 1)
    for v in qs:
        for w in qs:
            pairs = [
                CylinderPair.of(p)
                for p in _bounded_minimal_pairs(g, v, w, max_len)
                if g.has_infinite_path(p.source)  # otherwise the cylinder is empty
            ]
            for i, p1 in enumerate(pairs):
                for p2 in pairs[i:]:
                    checked += 1
                    try:
                        pi_r_images_intersect(g, p1, p2, depth, imgs)
                    except OracleViolation as exc:
                        violations.append(str(exc))
    return {"check": "lemma1", "pairs_checked": checked, "violations": violations[:10]}


def check_lemma2(g: GraphPresentation, max_len: int = 6) -> dict:
    """Each ancestry pair lies above exactly one minimal pair, the stripped one."""
    checked = 0
    violations = []
    qs = _query_vertices(g, 1)
    limit = None if g.is_finite or g.is_bratteli else max_len + 1
    for v in qs:
        for w in qs:
            pv = enumerate_paths(g, v, max_len, tail_limit=limit)
            pw = enumerate_paths(g, w, max_len, tail_limit=limit)
            by_src: dict[str, list[Path]] = {}
            for mu in pw:
                by_src.setdefault(mu.source, []).append(mu)
            for lam in pv:
                for mu in by_src.get(lam.source, ()):
                    p = AncestryPair(lam, mu)
                    checked += 1
                    s = strip_to_minimal(p)
                    if not is_minimal(s) or strip_to_minimal(s) != s:
                        violations.append(f"strip({p}) = {s} is not a minimal fixed point")
                    # every pair below p is p with a common source-end block removed
                    owners = []
                    for k in range(min(len(lam), len(mu)) + 1):
                        if lam.edges[len(lam) - k:] != mu.edges[len(mu) - k:]:
                            break
                        q = AncestryPair(lam[: len(lam) - k], mu[: len(mu) - k])
                        if extends(p, q) is not None and is_minimal(q):
                            owners.append(q)
                    if owners != [s]:
                        violations.append(f"{p}: minimal pairs below it are {owners}, strip gives {s}")
    return {"check": "lemma2", "pairs_checked": checked, "violations": violations[:10]}


def check_lemma3(g: GraphPresentation, depth: int = 4, max_len: int = 6) -> dict:
    """Every pair containing a cycle has its image inside the image of one
    cycle-free minimal pair (needs: no cycle has an entrance)."""
    applicable = no_cycle_has_entrance(g).answer == "yes"
    checked = 0
    violations = []
    D = max_len + depth
    cache: dict[str, list[Word]] = {}

    def conts(s: str):
        if s not in cache:
            cache[s] = continuations(g, s, D)
        return cache[s]

    qs = _query_vertices(g, 1)
    for v in qs:
        for w in qs:
            try:
                cover = minimal_cycle_free_pairs(g, v, w)
            except InfiniteFamily:
                continue
            cover_imgs = [_pair_image([c], conts, D) for c in cover]
            for p in _bounded_minimal_pairs(g, v, w, max_len, cycle_free=False):
                if p.cycle_free:
                    continue
                img = _pair_image([p], conts, D)
                if not img:
                    continue
                checked += 1
                if not any(img <= ci for ci in cover_imgs):
                    violations.append(f"{p} is not absorbed by a cycle-free minimal pair")
    if not applicable:
        return {"check": "lemma3", "applicable": False, "pairs_checked": checked,
                "not_absorbed": violations[:10], "violations": []}
    return {"check": "lemma3", "applicable": True, "pairs_checked": checked,
            "violations": violations[:10]}


def check_axioms(g: GraphPresentation, depth: int = 4) -> dict:
    ranges = tuple(_query_vertices(g, 1))
    G = TruncatedGroupoid(g, depth, ranges)
    violations = G.axiom_violations()
    gen = G.cylinder_generated()
    if gen != G.elements:
        violations.append(
            f"cylinder-generated set ({len(gen)}) differs from shift-defined set ({len(G.elements)})"
        )
    return {"check": "axioms", "units": len(G.units), "elements": len(G.elements),
            "triples": G.triples_checked, "violations": violations}


def check_cover(g: GraphPresentation, depth: int = 4) -> dict:
    applicable = no_cycle_has_entrance(g).answer == "yes"
    reports = []
    violations = []
    for v in _query_vertices(g, 1):
        for w in _query_vertices(g, 1):
            try:
                r = properness_cover(g, v, w, depth)
            except InfiniteFamily as exc:
                reports.append({"query": [v, w], "infinite": exc.certificate.get("type")})
                continue
            reports.append({k: r[k] for k in ("query", "cover_size", "relation_size", "equal")})
            if applicable and not r["equal"]:
                violations.append(f"cover mismatch at ({v}, {w}): missing {r['missing']}")
    return {"check": "cover", "applicable": applicable, "reports": reports,
            "violations": violations}
