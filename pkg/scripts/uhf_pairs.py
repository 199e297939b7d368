"""Print the pumping certificate for a Bratteli diagram and its first unrollings."""
import argparse
import json

from ctgraph.ancestry import finite_ancestry
from ctgraph.bratteli import unroll
from ctgraph.graphcore import parse_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("file", nargs="?", default="tests/data/uhf2.bratteli")
    ap.add_argument("-k", type=int, default=4, help="number of unrollings")
    args = ap.parse_args()

    with open(args.file) as fh:
        g = parse_graph(fh.read())
    v = finite_ancestry(g)
    if v.answer == "yes":
        print("finite ancestry: yes")
        print(json.dumps(v.certificate, indent=2, sort_keys=True))
        return
    cert = v.certificate
    print(f"finite ancestry: no at {tuple(cert['query'])}")
    for k in range(1, args.k + 1):
        p = unroll(g, cert, k)
        print(f"  k={k}: ({' '.join(p.lam.ids)}, {' '.join(p.mu.ids)})")


if __name__ == "__main__":
    main()
