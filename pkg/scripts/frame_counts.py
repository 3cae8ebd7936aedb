"""Table of frame counts per class and size, optionally against brute force."""

import argparse

from mgrz.decision import SEARCH_CLASSES, brute_force_count, count_frames


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-worlds", type=int, default=3)
    ap.add_argument("--dedup", action="store_true", help="also count up to isomorphism")
    ap.add_argument("--brute-force", action="store_true",
                    help="compare with the naive filter (slow beyond 3 worlds)")
    args = ap.parse_args()

    sizes = range(1, args.max_worlds + 1)
    print("class     " + "".join(f"{n:>10}" for n in sizes))
    for cls in SEARCH_CLASSES:
        row = []
        for n in sizes:
            if cls == "MK" and n > 4:
                row.append("-")
                continue
            cell = str(count_frames(cls, n))
            if args.dedup:
                cell += f"/{count_frames(cls, n, 'canonical-hash')}"
            if args.brute_force:
                cell += "" if brute_force_count(cls, n) == int(cell.split("/")[0]) else "!"
            row.append(cell)
        print(f"{cls:10}" + "".join(f"{c:>10}" for c in row))


if __name__ == "__main__":
    main()
