#!/usr/bin/env python3
"""Recompute every catalog expectation and print a one-line-per-entry table.

Covers the fixed entries, a full tableau, and a few members of the conformal
family.  Exit status 1 when any expectation mismatches, so this doubles as a
cheap regression probe outside the test suite.
"""

import argparse
import sys

from lietableaux import catalog
from lietableaux.cli import VERIFY_ALL_NAMES


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("names", nargs="*", default=list(VERIFY_ALL_NAMES))
    ns = ap.parse_args()

    width = max(len(n) for n in ns.names)
    bad = 0
    for name in ns.names:
        entry = catalog.get(name)
        rep = catalog.verify_entry(entry, trials=ns.trials, seed=ns.seed)
        cert = rep.certification
        chars = ",".join(str(x) for x in cert.characters.s_list)
        print(f"{name:<{width}}  dim {cert.dim:>2}  s=({chars})"
              f"  cond2={'y' if cert.condition2.holds else 'n'}"
              f"  certified={'y' if cert.ok else 'n'}"
              f"  expectations={'ok' if rep.ok else 'MISMATCH'}")
        for m in rep.mismatches:
            bad += 1
            print(f"    {m}")
    print(f"{len(ns.names)} entries, {bad} mismatched expectations")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
