#!/usr/bin/env python3
"""Scan seeded random tableaux for non-involutive but 2-acyclic instances.

These make good prolongation-tower fixtures: the tower must step past level
zero before the Cartan test closes.  Seed 33 with the default bounds yields
the single-generator n=3, s=3 example frozen into the pds tests.
"""

import argparse
import sys

from lietableaux.spencer import is_2acyclic
from lietableaux.tableau import cartan_test, involutivity_order, random_tableau


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--max-order", type=int, default=3)
    ns = ap.parse_args()

    hits = 0
    for seed in range(ns.start, ns.start + ns.seeds):
        A = random_tableau(seed)
        if A.dim == 0 or cartan_test(A).involutive:
            continue
        verdict = is_2acyclic(A)
        if verdict.status != "certified":
            continue
        order = involutivity_order(A, max_h=ns.max_order)
        hits += 1
        print(f"seed {seed}: n={A.n} s={A.s} dim={A.dim} "
              f"involutive at level {order}")
        for g in A.generators:
            print(f"    {[ [str(x) for x in row] for row in g.data ]}")
    print(f"{hits} non-involutive 2-acyclic tableaux in "
          f"[{ns.start}, {ns.start + ns.seeds})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
