"""Exhaustive round trips between frames and bundles.

Frames: every MK frame up to ``--frames`` worlds.  Bundles: every bundle with
at most ``--bundles`` individuals (one projection per base relabelling at the
largest size).
"""

import argparse
import time

from mgrz.bundles import iter_bundles, roundtrip_iso_check
from mgrz.decision import enumerate_frames


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=4)
    ap.add_argument("--bundles", type=int, default=4)
    args = ap.parse_args()

    start = time.perf_counter()
    total = bad = 0
    for n in range(1, args.frames + 1):
        for F in enumerate_frames("MK", n):
            total += 1
            bad += not roundtrip_iso_check(F).passed
    print(f"frames:  {total} checked, {bad} failures ({time.perf_counter() - start:.1f}s)")

    start = time.perf_counter()
    total = bad = 0
    for k in range(1, args.bundles + 1):
        for m in range(1, k + 1):
            for B in iter_bundles(k, m, canonical_pi=k == args.bundles and k >= 4):
                total += 1
                bad += not roundtrip_iso_check(B).passed
    print(f"bundles: {total} checked, {bad} failures ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
