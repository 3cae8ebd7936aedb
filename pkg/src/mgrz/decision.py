"""Bounded countermodel search over finite frames of a class.

Frames of size ``n`` come out in a fixed order: relations in increasing
bitmask order (bit ``x*n + y`` encodes ``x R y``), and for each relation the
partitions in restricted-growth order.  The first countermodel in that order
is the answer, whatever the worker count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

from . import bits
from .errors import BudgetExceeded, InputError
from .frames import MKFrame, frames_isomorphic
from .semantics import VALUATION_BUDGET_BITS, CounterValuation, frame_validity
from .syntax import Formula, parse_formula, render_formula

MAX_WORLDS_CAP = 6
# classes whose relations are unconstrained get a smaller cap (2^(n*n) relations)
FREE_RELATION_CAP = 4

SEARCH_CLASSES = ("MK", "MS4", "MGrz", "GrzU", "MPlusGrz", "MGL", "MGrzB")

_ALIASES = {c.lower(): c for c in SEARCH_CLASSES}
_ALIASES.update({"m+grz": "MPlusGrz", "grz_u": "GrzU", "barcan": "MGrzB"})

# which relations to enumerate for a class
_RELATION_KIND = {
    "MK": "any",
    "MS4": "preorder",
    "MGrz": "poset",
    "GrzU": "poset",
    "MPlusGrz": "poset",
    "MGrzB": "poset",
    "MGL": "strict",
}


def canonical_class(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise InputError(
            f"unknown frame class {name!r}; expected one of {', '.join(SEARCH_CLASSES)}"
        ) from None


@dataclass(frozen=True)
class SearchConfig:
    frame_class: str = "MGrz"
    max_worlds: int = 4
    budget_bits: int = VALUATION_BUDGET_BITS
    dedup: str = "none"  # or "canonical-hash"
    jobs: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame_class", canonical_class(self.frame_class))
        if self.max_worlds < 1:
            raise InputError("max_worlds must be at least 1")
        if self.dedup not in ("none", "canonical-hash"):
            raise InputError(f"unknown dedup mode {self.dedup!r}")
        if self.jobs < 1:
            raise InputError("jobs must be at least 1")


# --------------------------------------------------------------------------
# relations


def encode(rows: tuple[int, ...]) -> int:
    n = len(rows)
    return sum(row << (x * n) for x, row in enumerate(rows))


def decode(code: int, n: int) -> tuple[int, ...]:
    full = bits.full(n)
    return tuple((code >> (x * n)) & full for x in range(n))


def _extend_orders(n: int, reflexive: bool, antisymmetric: bool) -> list[tuple[int, ...]]:
    """Transitive relations on ``n`` points built one point at a time: the new
    point ``k`` gets a down-closed set below it and an up-closed set above it."""
    current: list[tuple[int, ...]] = [()]
    for k in range(n):
        nxt = []
        for rows in current:
            preds = bits.transpose(rows) if rows else ()
            for down in range(1 << k):
                # down-closed: predecessors of members are members
                if any(preds[x] & ~down for x in bits.bits(down)):
                    continue
                for up in range(1 << k):
                    if antisymmetric and down & up:
                        continue
                    if any(rows[y] & ~up for y in bits.bits(up)):
                        continue
                    # everything below k must reach everything above k
                    if any(up & ~rows[x] for x in bits.bits(down)):
                        continue
                    new = [row | (1 << k) if down >> x & 1 else row for x, row in enumerate(rows)]
                    new.append(up | ((1 << k) if reflexive else 0))
                    nxt.append(tuple(new))
        current = nxt
    return current


@lru_cache(maxsize=None)
def relation_codes(kind: str, n: int) -> tuple[int, ...]:
    """Relations of a kind on ``n`` points, as sorted bitmask codes."""
    if kind == "any":
        return tuple(range(1 << (n * n)))
    if kind == "preorder":
        rels = _extend_orders(n, True, False)
    elif kind == "poset":
        rels = _extend_orders(n, True, True)
    elif kind == "strict":
        rels = _extend_orders(n, False, True)
    else:
        raise ValueError(kind)
    return tuple(sorted(encode(r) for r in rels))


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """Restricted-growth strings of length ``n`` in lexicographic order."""
    out = []

    def rec(prefix: list[int], top: int) -> None:
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for b in range(top + 2):
            rec(prefix + [b], max(top, b))

    rec([], -1)
    return tuple(out)


# --------------------------------------------------------------------------
# class filters


def _commutes(rows: tuple[int, ...], blocks: tuple[int, ...]) -> bool:
    """E-equivalent worlds R-reach exactly the same blocks."""
    reach = [0] * len(rows)
    for x, row in enumerate(rows):
        for y in bits.bits(row):
            reach[x] |= 1 << blocks[y]
    seen: dict[int, int] = {}
    for x, b in enumerate(blocks):
        if seen.setdefault(b, reach[x]) != reach[x]:
            return False
    return True


def _class_filter(cls: str, rows: tuple[int, ...], blocks: tuple[int, ...]) -> bool:
    if not _commutes(rows, blocks):
        return False
    n = len(rows)
    if cls == "GrzU":
        return all(blocks[x] == blocks[y] for x in range(n) for y in bits.bits(rows[x]))
    if cls == "MPlusGrz":
        return all(blocks[x] != blocks[y] for x in range(n) for y in bits.bits(rows[x]) if x != y)
    if cls == "MGL":
        return all(blocks[x] != blocks[y] for x in range(n) for y in bits.bits(rows[x]))
    if cls == "MGrzB":
        F = MKFrame(n, rows, blocks)
        return bits.compose(F.E, F.R) == bits.compose(F.R, F.E)
    return True


def check_size(cls: str, n: int) -> None:
    cap = FREE_RELATION_CAP if _RELATION_KIND[cls] == "any" else MAX_WORLDS_CAP
    if n > cap:
        raise BudgetExceeded(f"frame enumeration for {cls} is capped at {cap} worlds, asked for {n}")


def _invariant_key(F: MKFrame) -> tuple:
    sig = []
    for x in range(F.n):
        sig.append((
            F.R[x] >> x & 1,
            F.R[x].bit_count(),
            F.r_preimage(1 << x).bit_count(),
            F.E[x].bit_count(),
            F.Q[x].bit_count(),
            tuple(sorted(F.R[y].bit_count() for y in bits.bits(F.R[x]))),
        ))
    return tuple(sorted(sig))


def enumerate_frames(cls: str, n: int, dedup: str = "none") -> Iterator[MKFrame]:
    """All frames of class ``cls`` with exactly ``n`` worlds, in search order.

    With ``dedup="canonical-hash"`` a frame is skipped only after an exact
    isomorphism check against an earlier frame with the same invariant key.
    """
    cls = canonical_class(cls)
    check_size(cls, n)
    seen: dict[tuple, list[MKFrame]] = {}
    for code in relation_codes(_RELATION_KIND[cls], n):
        rows = decode(code, n)
        for blocks in partitions(n):
            if not _class_filter(cls, rows, blocks):
                continue
            F = MKFrame(n, rows, blocks)
            if dedup == "canonical-hash":
                key = _invariant_key(F)
                bucket = seen.setdefault(key, [])
                if any(frames_isomorphic(F, G) is not None for G in bucket):
                    continue
                bucket.append(F)
            yield F


def count_frames(cls: str, n: int, dedup: str = "none") -> int:
    return sum(1 for _ in enumerate_frames(cls, n, dedup))


# --------------------------------------------------------------------------
# search


@dataclass(frozen=True)
class Countermodel:
    frame: MKFrame
    valuation: dict[str, int]
    world: int
    size: int
    frames_checked: int


@dataclass(frozen=True)
class NoCountermodelUpTo:
    max_worlds: int
    frames_checked: int


Verdict = Union[Countermodel, NoCountermodelUpTo]


def refute_on_frame(
    F: MKFrame, f: Formula, budget_bits: int = VALUATION_BUDGET_BITS
) -> Optional[tuple[dict[str, int], int]]:
    result = frame_validity(F, f, budget_bits=budget_bits)
    if isinstance(result, CounterValuation):
        return result.valuation, result.world
    return None


def _scan_chunk(args) -> Optional[tuple[int, dict[str, int], int]]:
    text, n, frames, budget = args
    f = parse_formula(text)
    for idx, (rows, blocks) in frames:
        hit = refute_on_frame(MKFrame(n, rows, blocks), f, budget)
        if hit is not None:
            return idx, hit[0], hit[1]
    return None


def decide(f: Formula, cfg: SearchConfig = SearchConfig()) -> Verdict:
    """Scan sizes ``1..max_worlds`` and return the first countermodel in order."""
    checked = 0
    for n in range(1, cfg.max_worlds + 1):
        frames = enumerate_frames(cfg.frame_class, n, cfg.dedup)
        try:
            if cfg.jobs == 1:
                for F in frames:
                    checked += 1
                    hit = refute_on_frame(F, f, cfg.budget_bits)
                    if hit is not None:
                        return Countermodel(F, hit[0], hit[1], n, checked)
            else:
                listed = list(frames)
                hit = _parallel_scan(f, n, listed, cfg)
                if hit is not None:
                    idx, val, world = hit
                    return Countermodel(listed[idx], val, world, n, checked + idx + 1)
                checked += len(listed)
        except BudgetExceeded as exc:
            raise BudgetExceeded(
                f"{exc} (searched all sizes below {n}, {checked} frames, no countermodel)"
            ) from None
    return NoCountermodelUpTo(cfg.max_worlds, checked)


def _parallel_scan(f: Formula, n: int, frames: list[MKFrame], cfg: SearchConfig):
    if not frames:
        return None
    items = [(i, (F.R, F.blocks)) for i, F in enumerate(frames)]
    size = max(1, -(-len(items) // (cfg.jobs * 4)))
    chunks = [items[i:i + size] for i in range(0, len(items), size)]
    text = render_formula(f)
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        results = list(pool.map(_scan_chunk, [(text, n, c, cfg.budget_bits) for c in chunks]))
    # each chunk reports its first hit; the smallest index wins
    hits = [r for r in results if r is not None]
    return min(hits, key=lambda r: r[0]) if hits else None


def brute_force_count(cls: str, n: int) -> int:
    """Independent count: every relation and every partition, filtered by the
    frame-class report."""
    from .frames import in_class

    cls = canonical_class(cls)
    total = 0
    for code in range(1 << (n * n)):
        rows = decode(code, n)
        for blocks in itertools.product(range(n), repeat=n):
            # one labelling per partition: first occurrences in increasing order
            if list(dict.fromkeys(blocks)) != list(range(len(set(blocks)))):
                continue
            F = MKFrame(n, rows, blocks)
            if cls == "MGrzB":
                ok = in_class(F, "MGrz") and in_class(F, "Barcan")
            else:
                ok = in_class(F, cls)
            total += ok
    return total
