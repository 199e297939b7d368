"""Tabulate verdicts over the named fixtures and the generated corpora."""
import argparse
import collections
import time

from ctgraph import fixtures as F
from ctgraph.ancestry import finite_ancestry
from ctgraph.cyclecheck import no_cycle_has_entrance
from ctgraph.groupoid import continuous_trace


def row(g):
    return (no_cycle_has_entrance(g).answer, finite_ancestry(g, counts=False).answer,
            continuous_trace(g).answer)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--random", type=int, default=500, help="number of random graphs")
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    print(f"{'fixture':<22} {'entrance-free':<14} {'finite anc.':<12} ctrace")
    for name in F.all_graphs():
        e, a, c = row(F.graph(name))
        print(f"{name:<22} {e:<14} {a:<12} {c}")

    for label, gen in (("exhaustive", F.exhaustive_graphs(3, 4)),
                       ("random", F.random_graphs(args.random, 6, seed=args.seed))):
        t0 = time.perf_counter()
        tally = collections.Counter(row(g) for g in gen)
        dt = time.perf_counter() - t0
        print(f"\n{label}: {sum(tally.values())} graphs in {dt:.2f}s")
        for (e, a, c), n in sorted(tally.items()):
            print(f"  entrance-free={e} finite-ancestry={a} ctrace={c}: {n}")


if __name__ == "__main__":
    main()
