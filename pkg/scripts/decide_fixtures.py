"""Bounded countermodel search on a fixed list of formulas and classes."""

import argparse
import time

from mgrz.decision import Countermodel, SearchConfig, decide
from mgrz.syntax import parse_formula

FIXTURES = [
    ("<>Ep -> E<>p", "MGrz"),
    ("[]([](p -> []p) -> p) -> p", "MGrz"),
    ("[]([](p -> []p) -> p) -> p", "MS4"),
    ("<>Ap -> A<>p", "MGrz"),
    ("p -> Ep", "MGrz"),
    ("EEp -> Ep", "MGrz"),
    ("Ep -> AEp", "MGrz"),
    ("<>q -> Eq", "GrzU"),
    ("<>q -> Eq", "MGrz"),
    ("<>Ep -> E<>p", "MGrzB"),
    ("<>p -> <>(p & [](p -> []p))", "MGL"),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-worlds", type=int, default=4)
    ap.add_argument("--dedup", choices=("none", "canonical-hash"), default="none")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    for text, cls in FIXTURES:
        cfg = SearchConfig(cls, args.max_worlds, dedup=args.dedup, jobs=args.jobs)
        start = time.perf_counter()
        v = decide(parse_formula(text), cfg)
        took = time.perf_counter() - start
        if isinstance(v, Countermodel):
            verdict = f"countermodel, size {v.size}"
        else:
            verdict = f"none up to {v.max_worlds}"
        print(f"{cls:9} {text:32} {verdict:22} {v.frames_checked:6} frames  {took:6.2f}s")


if __name__ == "__main__":
    main()
