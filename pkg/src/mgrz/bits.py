"""Bitmask helpers for relations on ``{0, ..., n-1}``.

A world set is an ``int`` whose bit ``i`` marks world ``i``.  A binary
relation is a tuple of rows, row ``x`` being the bitmask of ``R[x]``.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

Rows = tuple[int, ...]


def full(n: int) -> int:
    return (1 << n) - 1


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_list(mask: int) -> list[int]:
    return list(bits(mask))


def from_iter(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        mask |= 1 << i
    return mask


def lowest(mask: int) -> int:
    """Index of the lowest set bit; ``mask`` must be nonzero."""
    return (mask & -mask).bit_length() - 1


def rows_from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> Rows:
    rows = [0] * n
    for i, j in pairs:
        rows[i] |= 1 << j
    return tuple(rows)


def pairs_of(rows: Sequence[int]) -> list[tuple[int, int]]:
    return [(i, j) for i, row in enumerate(rows) for j in bits(row)]


def image(rows: Sequence[int], mask: int) -> int:
    """``R[U]``: everything reachable in one step from ``U``."""
    out = 0
    for i in bits(mask):
        out |= rows[i]
    return out


def preimage(rows: Sequence[int], mask: int) -> int:
    """``R^{-1}[U]``: everything with a step into ``U``."""
    out = 0
    for i, row in enumerate(rows):
        if row & mask:
            out |= 1 << i
    return out


def compose(first: Sequence[int], second: Sequence[int]) -> Rows:
    """Relational composite: ``x (first;second) y`` iff ``x first z second y``."""
    return tuple(image(second, row) for row in first)


def transpose(rows: Sequence[int]) -> Rows:
    n = len(rows)
    out = [0] * n
    for i, row in enumerate(rows):
        for j in bits(row):
            out[j] |= 1 << i
    return tuple(out)


def identity(n: int) -> Rows:
    return tuple(1 << i for i in range(n))


def transitive_closure(rows: Sequence[int]) -> Rows:
    out = list(rows)
    n = len(out)
    for k in range(n):
        kbit = 1 << k
        krow = out[k]
        for i in range(n):
            if out[i] & kbit:
                out[i] |= krow
    return tuple(out)


def reflexive_transitive_closure(rows: Sequence[int]) -> Rows:
    return transitive_closure([row | (1 << i) for i, row in enumerate(rows)])


def is_reflexive(rows: Sequence[int]) -> bool:
    return all(row >> i & 1 for i, row in enumerate(rows))


def is_transitive(rows: Sequence[int]) -> bool:
    return all(image(rows, row) & ~row == 0 for row in rows)


def is_antisymmetric(rows: Sequence[int]) -> bool:
    for i, row in enumerate(rows):
        for j in bits(row & ~(1 << i)):
            if rows[j] >> i & 1:
                return False
    return True


def longest_chain(rows: Sequence[int], within: int) -> int:
    """Cardinality of the longest chain of a partial order restricted to ``within``.

    ``rows`` must be reflexive, transitive and antisymmetric on ``within``.
    """
    memo: dict[int, int] = {}

    def depth(x: int) -> int:
        if x not in memo:
            above = rows[x] & within & ~(1 << x)
            memo[x] = 1 + max((depth(y) for y in bits(above)), default=0)
        return memo[x]

    return max((depth(x) for x in bits(within)), default=0)
