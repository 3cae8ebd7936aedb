"""Compare frame semantics with bundle semantics of the predicate translation.

Runs over every MK frame up to a size, for formulas given on the command line
(or a small default list).
"""

import argparse

from mgrz.decision import enumerate_frames
from mgrz.semantics import check_translation_equivalence
from mgrz.syntax import parse_formula, render_predicate, translate_t

DEFAULT = ["<>Ep -> E<>p", "E(p & <>q) -> A<>p", "[]([](p -> []p) -> p) -> p"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("formulas", nargs="*", default=DEFAULT)
    ap.add_argument("--max-worlds", type=int, default=3)
    ap.add_argument("--trials", type=int, help="sample valuations instead of all")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    frames = [F for n in range(1, args.max_worlds + 1) for F in enumerate_frames("MK", n)]
    for text in args.formulas:
        f = parse_formula(text)
        checked = bad = 0
        for F in frames:
            r = check_translation_equivalence(F, f, trials=args.trials, seed=args.seed)
            checked += r.checked
            bad += len(r.disagreements)
        print(f"{render_predicate(translate_t(f))}")
        print(f"  {len(frames)} frames, {checked} comparisons, {bad} disagreements")


if __name__ == "__main__":
    main()
