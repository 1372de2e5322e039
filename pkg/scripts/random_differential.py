#!/usr/bin/env python3
"""Differential testing of the solvers against brute-force oracles on
randomly generated models.

Generates random transition systems and MDPs, solves each with every
applicable engine, and compares verdicts with the oracle.  Any mismatch is
reported with a serialized reproducer.

Usage: python scripts/random_differential.py [--seed N] [--kripke N] [--mdp N]
"""

import argparse
import dataclasses
import random
import sys
import time

sys.path.insert(0, str(__import__("pathlib").Path(__file__).resolve().parent.parent / "tests"))
from util import random_kripke, random_mdp  # noqa: E402

from ltpdr.cli import serialize_kripke, serialize_mdp  # noqa: E402
from ltpdr.engine import Verdict  # noqa: E402
from ltpdr.kripke import pdr_fkr, pdr_ibkr  # noqa: E402
from ltpdr.mdp import pdr_ibmdp  # noqa: E402
from ltpdr.oracles import NoConvergence, bfs_safe, vi_max_reach  # noqa: E402


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kripke", type=int, default=200)
    ap.add_argument("--mdp", type=int, default=50)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    mismatches = 0

    t0 = time.perf_counter()
    for i in range(args.kripke):
        K = random_kripke(rng)
        expected = bfs_safe(K).verdict
        for name, solve in (("fkr", pdr_fkr), ("ibkr", pdr_ibkr)):
            ans = solve(K, debug=True)
            got = ans.verdict is Verdict.TRUE
            if ans.verdict not in (Verdict.TRUE, Verdict.FALSE) or got != expected:
                mismatches += 1
                print(f"MISMATCH kripke #{i} engine={name} got={ans.verdict} "
                      f"expected={expected}\n{serialize_kripke(K)}")
    print(f"kripke: {args.kripke} models x 2 engines, "
          f"{time.perf_counter() - t0:.1f}s")

    t0 = time.perf_counter()
    for i in range(args.mdp):
        M = random_mdp(rng)
        try:
            gt = vi_max_reach(M).value
        except NoConvergence:
            continue
        if gt <= 1e-6:
            continue
        for lam, expected in ((min(gt + 0.1, 1.0), True),
                              (gt - 0.1 if gt >= 0.1 else gt / 2, False)):
            Mx = dataclasses.replace(M, threshold=lam)
            ans = pdr_ibmdp(Mx, debug=True)
            if ans.verdict is Verdict.BUDGET_EXHAUSTED:
                continue
            got = ans.verdict is Verdict.TRUE
            if got != expected:
                mismatches += 1
                print(f"MISMATCH mdp #{i} lambda={lam} got={ans.verdict} "
                      f"expected={expected}\n{serialize_mdp(Mx)}")
    print(f"mdp: {args.mdp} models x 2 thresholds, "
          f"{time.perf_counter() - t0:.1f}s")

    print("mismatches:", mismatches)
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
