#!/usr/bin/env python3
"""Run every model in the corpus through the solver and its oracle.

Prints one line per (model, engine) pair with the verdict, the oracle
verdict, step count, and wall time.  Exits nonzero if any solver verdict
disagrees with its oracle.

Usage: python scripts/run_corpus.py [--models DIR] [--budget N]
"""

import argparse
import pathlib
import sys
import time

from ltpdr.cli import parse_kripke, parse_mdp, parse_mrm
from ltpdr.engine import Verdict
from ltpdr.kripke import pdr_fkr, pdr_ibkr, pdr_opdual
from ltpdr.mdp import pdr_ibmdp
from ltpdr.mrm import pdr_mrm
from ltpdr.oracles import bfs_safe, vi_expected_reward, vi_max_reach


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", default=str(
        pathlib.Path(__file__).resolve().parent.parent / "models"))
    ap.add_argument("--budget", type=int, default=100000)
    args = ap.parse_args(argv)

    runners = {
        ".kr": (parse_kripke, bfs_safe,
                [("fkr", pdr_fkr), ("ibkr", pdr_ibkr), ("opdual", pdr_opdual)]),
        ".mdp": (parse_mdp, vi_max_reach, [("ibmdp", pdr_ibmdp)]),
        ".mrm": (parse_mrm, vi_expected_reward, [("mrm", pdr_mrm)]),
    }
    failures = 0
    for path in sorted(pathlib.Path(args.models).iterdir()):
        if path.suffix not in runners:
            continue
        parse, oracle, engines = runners[path.suffix]
        model = parse(path.read_text())
        expected = oracle(model).verdict
        for name, solve in engines:
            t0 = time.perf_counter()
            ans = solve(model, budget=args.budget)
            dt = time.perf_counter() - t0
            agree = "-"
            if ans.verdict in (Verdict.TRUE, Verdict.FALSE):
                agree = str((ans.verdict is Verdict.TRUE) == expected)
                if agree == "False":
                    failures += 1
            print(f"{path.name:24s} {name:8s} {ans.verdict.value:16s} "
                  f"oracle={expected!s:8s} agree={agree:5s} "
                  f"steps={ans.stats.steps:6d} t={dt:.3f}s")
    if failures:
        print(f"{failures} disagreement(s)", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
