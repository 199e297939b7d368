"""``ctgraph`` command line.

Exit status: 2 for unreadable or malformed input, 1 when an oracle check or a
``--verify`` replay fails, 0 otherwise.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional, Union

from . import groupoid
from .ancestry import AncestryPair, is_minimal, minimal_cycle_free_pairs
from .bratteli import unroll
from .cyclecheck import CycleWitness, no_cycle_has_entrance
from .config import DEFAULT
from .desingular import desingularize
from .graphcore import GraphPresentation, ParseError, Path, dump_graph, parse_graph
from .kgraph import (
    ColoredKGraph,
    KGraph2,
    ctrace_k,
    is_generalized_cycle,
    minimal_ancestry_pairs_k,
    parse_kgraph,
    validate_2graph,
)
from .verdict import InfiniteFamily, OracleViolation, Verdict

__all__ = ["Report", "main", "load"]


@dataclass
class Report:
    question: str
    answer: str
    certificate: dict[str, Any] = field(default_factory=dict)
    depth: Union[int, str] = "exact"
    timing_ms: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Report":
        return cls(**data)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def summary(self) -> str:
        depth = "" if self.depth == "exact" else f" (searched to depth {self.depth})"
        lines = [f"{self.question}: {self.answer}{depth}"]
        for key in sorted(self.certificate):
            val = self.certificate[key]
            text = json.dumps(val, sort_keys=True)
            if len(text) > 100:
                text = text[:97] + "..."
            lines.append(f"  {key}: {text}")
        return "\n".join(lines)


def load(path: str) -> Union[GraphPresentation, KGraph2]:
    with open(path) as fh:
        text = fh.read()
    first = ""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            first = line.split()[0]
            break
    if path.endswith(".kgraph") or first in ("kgraph", "blue", "red", "square", "product"):
        return parse_kgraph(text, os.path.dirname(os.path.abspath(path)))
    return parse_graph(text)


def _timed(question: str, fn: Callable[[], Verdict]) -> Report:
    t0 = time.perf_counter()
    v = fn()
    ms = (time.perf_counter() - t0) * 1000.0
    return Report(question, v.answer, v.certificate, v.depth, round(ms, 3))


# -- commands ---------------------------------------------------------------------

def cmd_analyze(g, depth: int) -> Report:
    if isinstance(g, KGraph2):
        val = validate_2graph(g)
        if not val["valid"]:
            raise ParseError("invalid 2-graph: " + "; ".join(val["problems"]))
        return _timed("ctrace_k", lambda: ctrace_k(g, depth))
    return _timed("continuous_trace", lambda: groupoid.continuous_trace(g))


def _ancestry_verdict(g, v: str, w: str, depth: int) -> Verdict:
    if isinstance(g, KGraph2):
        conv = (lambda s: tuple(s.split(",", 1))) if not isinstance(g, ColoredKGraph) else (lambda s: s)
        pairs, complete = minimal_ancestry_pairs_k(g, conv(v), conv(w), (depth, depth))
        cert = {"type": "enumeration", "complete": complete,
                "pairs": [[str(a), str(b)] for a, b in pairs]}
        return Verdict("yes" if complete else "unknown", cert, "exact" if complete else depth)
    try:
        pairs = minimal_cycle_free_pairs(g, v, w)
    except InfiniteFamily as exc:
        return Verdict("no", exc.certificate)
    return Verdict("yes", {"type": "enumeration", "query": [v, w],
                           "pairs": [p.to_json() for p in pairs]})


def cmd_ancestry(g, v: str, w: str, depth: int) -> Report:
    return _timed("finite_ancestry_pairs", lambda: _ancestry_verdict(g, v, w, depth))


def cmd_desingularize(g: GraphPresentation, out: str) -> Report:
    t0 = time.perf_counter()
    d = desingularize(g)
    text = dump_graph(d.result)
    if d.redirect_map:
        text += "".join(f"# {line}\n" for line in d.redirect_lines())
    with open(out, "w") as fh:
        fh.write(text)
    ms = (time.perf_counter() - t0) * 1000.0
    cert = {"output": out, "tails": sorted(d.tail_map), "redirects": dict(sorted(d.redirect_map.items()))}
    return Report("desingularize", "yes", cert, "exact", round(ms, 3))


_O = DEFAULT.oracle
CHECKS = {
    "lemma1": lambda g, d: groupoid.check_lemma1(g, depth=d or _O.lemma1_depth,
                                                 max_len=_O.lemma1_max_len),
    "lemma2": lambda g, d: groupoid.check_lemma2(g, max_len=d or _O.lemma2_max_len),
    "lemma3": lambda g, d: groupoid.check_lemma3(g, depth=d or _O.lemma3_depth),
    "axioms": lambda g, d: groupoid.check_axioms(g, depth=d or _O.axioms_depth),
    "cover": lambda g, d: groupoid.check_cover(g, depth=d or _O.cover_depth),
}


def cmd_oracle(g, check: str, depth: Optional[int]) -> Report:
    t0 = time.perf_counter()
    if isinstance(g, KGraph2):
        if check != "axioms":
            raise ValueError(f"check {check!r} needs a 1-graph or Bratteli input")
        deg = (depth, depth) if depth else DEFAULT.kgraph.validate_degree
        rep = validate_2graph(g, deg)
        rep["violations"] = rep.pop("problems")
    else:
        rep = CHECKS[check](g, depth)
    ms = (time.perf_counter() - t0) * 1000.0
    ans = "no" if rep["violations"] else "yes"
    return Report(f"oracle:{check}", ans, rep, depth if depth is not None else "exact", round(ms, 3))


# -- certificate replay ---------------------------------------------------------

def _path_of(g: GraphPresentation, ids: list[str], base: str) -> Path:
    if not ids:
        return Path.vertex(base)
    return Path.of([g.edge(i) for i in ids])


def _replay_entrance(g: GraphPresentation, cert: dict) -> None:
    if cert.get("type") == "cycle-entrance":
        cyc = Path.of([g.edge(i) for i in cert["cycle"]])
        CycleWitness(cyc, g.edge(cert["entrance"]))  # validates
    elif cert.get("type") == "entrance-free":
        for ids in cert.get("simple_cycles", []):
            cyc = Path.of([g.edge(i) for i in ids])
            own = {e.range: e for e in cyc.edges}
            for v, e in own.items():
                for f in g.in_edges(v, width=2):
                    if f != e:
                        raise OracleViolation(f"{f.id} enters the listed cycle {' '.join(ids)}")


def _replay_ancestry(g: GraphPresentation, cert: dict) -> None:
    kind = cert.get("type")
    if kind == "pumping":
        v, w = cert["query"]
        seen = set()
        for k in (1, 2, 3, 4):
            p = unroll(g, cert, k)
            if p.ranges != (v, w) or not is_minimal(p) or not p.cycle_free:
                raise OracleViolation(f"unrolled member {p} is not a cycle-free minimal pair for ({v}, {w})")
            seen.add(repr(p))
        if len(seen) != 4:
            raise OracleViolation("pumped pairs are not distinct")
    elif kind == "omega-family":
        v, w = cert["query"]
        reps = set()
        for lam_ids, mu_ids in cert["pairs"]:
            p = AncestryPair(_path_of(g, lam_ids, v), _path_of(g, mu_ids, w))
            if p.ranges != (v, w) or not is_minimal(p) or not p.cycle_free:
                raise OracleViolation(f"{p} is not a cycle-free minimal pair for ({v}, {w})")
            reps.add(repr(p))
        if len(reps) != len(cert["pairs"]):
            raise OracleViolation("family members are not distinct")
    elif kind == "enumeration" and "pairs" in cert:
        v, w = cert["query"]
        for lam_ids, mu_ids in cert["pairs"]:
            p = AncestryPair(_path_of(g, lam_ids, v), _path_of(g, mu_ids, w))
            if p.ranges != (v, w) or not is_minimal(p) or not p.cycle_free:
                raise OracleViolation(f"{p} is not a cycle-free minimal pair for ({v}, {w})")


def _replay_kgraph(k: KGraph2, cert: dict) -> None:
    gc = cert.get("generalized_cycle")
    if gc and isinstance(k, ColoredKGraph):
        byid = {e.id: e for e in k.blue + k.red}
        lam = k.make(tuple(byid[i] for i in gc["lambda_ids"]), gc["range"])
        mu = k.make(tuple(byid[i] for i in gc["mu_ids"]), gc["range"])
        if not is_generalized_cycle(k, lam, mu) or is_generalized_cycle(k, mu, lam):
            raise OracleViolation(f"({lam}, {mu}) is not a generalized cycle with entrance")


def verify(g, report: Report, rerun: Callable[[], Report]) -> None:
    """Replay the certificate against the input, then check determinism."""
    cert = report.certificate
    if report.question == "continuous_trace":
        h = desingularize(g).result if cert.get("desingularized") else g
        _replay_entrance(h, cert["no_cycle_has_entrance"]["certificate"])
        _replay_ancestry(h, cert["finite_ancestry"]["certificate"])
    elif report.question == "finite_ancestry_pairs" and isinstance(g, GraphPresentation):
        _replay_ancestry(g, cert)
    elif report.question == "ctrace_k":
        _replay_kgraph(g, cert)
    again = rerun()
    a = {k: v for k, v in report.to_json().items() if k != "timing_ms"}
    b = {k: v for k, v in again.to_json().items() if k != "timing_ms"}
    if json.dumps(a, sort_keys=True) != json.dumps(b, sort_keys=True):
        raise OracleViolation("re-running the analysis gave a different report")
    if Report.from_json(json.loads(report.dumps())) != report:
        raise OracleViolation("report does not survive a JSON round trip")


# -- entry point ----------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the report as JSON")
    common.add_argument("--depth", type=int, default=argparse.SUPPRESS,
                        help="search depth for bounded procedures")
    common.add_argument("--verify", action="store_true", default=argparse.SUPPRESS,
                        help="replay the certificate against the input")
    ap = argparse.ArgumentParser(prog="ctgraph", parents=[common],
                                 description="Decide continuous trace for graph presentations.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="continuous-trace verdict")
    p.add_argument("file")
    p = sub.add_parser("ancestry", parents=[common], help="minimal cycle-free ancestry pairs")
    p.add_argument("file")
    p.add_argument("v")
    p.add_argument("w")
    p = sub.add_parser("desingularize", parents=[common], help="attach tails at singular vertices")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p = sub.add_parser("oracle", parents=[common], help="brute-force oracle checks")
    p.add_argument("file")
    p.add_argument("--check", required=True, choices=sorted(CHECKS))
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = _parser().parse_args(argv)
    as_json = getattr(args, "json", False)
    depth = getattr(args, "depth", None)
    want_verify = getattr(args, "verify", False)
    try:
        g = load(args.file)
    except OSError as exc:
        print(f"ctgraph: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"ctgraph: parse error in {args.file}: {exc}", file=sys.stderr)
        return 2
    d = depth if depth is not None else DEFAULT.kgraph.depth

    def run() -> Report:
        if args.command == "analyze":
            return cmd_analyze(g, d)
        if args.command == "ancestry":
            return cmd_ancestry(g, args.v, args.w, d)
        if args.command == "desingularize":
            if not isinstance(g, GraphPresentation):
                raise ValueError("only 1-graph presentations can be desingularized")
            return cmd_desingularize(g, args.output)
        return cmd_oracle(g, args.check, depth)

    try:
        report = run()
        if want_verify and args.command != "desingularize":
            verify(g, report, run)
            report.certificate = dict(report.certificate, verified=True)
    except ParseError as exc:
        print(f"ctgraph: {exc}", file=sys.stderr)
        return 2
    except OracleViolation as exc:
        print(f"ctgraph: oracle violation: {exc}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as exc:
        print(f"ctgraph: {exc}", file=sys.stderr)
        return 2
    print(report.dumps() if as_json else report.summary())
    if report.question.startswith("oracle:") and report.answer == "no":
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
