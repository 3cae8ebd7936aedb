"""Seeded random frames, models and formulas for tests and experiments."""

from __future__ import annotations

import random
from typing import Sequence

from . import bits
from .frames import MKFrame, _first_commutativity
from .semantics import Model, eval
from .syntax import UNARY, And, Bot, Box, Dia, Ex, Fa, Formula, Impl, Letter, Not, Or, Top, size

DEFAULT_LETTERS = ("p", "q")


def random_partition(rng: random.Random, n: int) -> tuple[int, ...]:
    k = rng.randint(1, n)
    return tuple(rng.randrange(k) for _ in range(n))


def random_relation(rng: random.Random, n: int, density: float = 0.3) -> tuple[int, ...]:
    return tuple(
        bits.from_iter(j for j in range(n) if rng.random() < density) for _ in range(n)
    )


def random_frame(rng: random.Random, n: int, density: float = 0.3) -> MKFrame:
    """A frame with arbitrary R and E (not necessarily MK)."""
    return MKFrame(n, random_relation(rng, n, density), random_partition(rng, n))


def random_mk_frame(rng: random.Random, n: int, density: float = 0.3) -> MKFrame:
    """Arbitrary R, then merge E-blocks until commutativity holds."""
    R = random_relation(rng, n, density)
    blocks = list(random_partition(rng, n))
    while True:
        F = MKFrame(n, R, tuple(blocks))
        bad = _first_commutativity(F)
        if bad is None:
            return F
        x, _, z = bad
        # some u in R[x] joins the block of z; with R[x] empty, add an edge instead
        if F.R[x]:
            u = rng.choice(bits.to_list(F.R[x]))
            old = blocks[u]
            blocks = [blocks[z] if b == old else b for b in blocks]
        else:
            R = tuple(row | (1 << z) if i == x else row for i, row in enumerate(R))


def random_poset(rng: random.Random, n: int, density: float = 0.35) -> tuple[int, ...]:
    order = list(range(n))
    rng.shuffle(order)
    rows = [1 << i for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                rows[order[a]] |= 1 << order[b]
    return bits.reflexive_transitive_closure(rows)


def random_mgrz_frame(rng: random.Random, n: int, density: float = 0.35) -> MKFrame:
    """Random finite poset and partition, repaired until commutativity holds.

    A violation ``x E y R z`` is repaired by adding ``x R z`` when that keeps R
    antisymmetric and by merging the blocks of ``x`` and ``z`` otherwise (or by
    coin flip when both are possible).
    """
    R = random_poset(rng, n, density)
    blocks = list(random_partition(rng, n))
    while True:
        F = MKFrame(n, R, tuple(blocks))
        bad = _first_commutativity(F)
        if bad is None:
            return F
        x, _, z = bad
        can_add = not F.R[z] >> x & 1
        if can_add and rng.random() < 0.5:
            rows = list(R)
            rows[x] |= 1 << z
            R = bits.reflexive_transitive_closure(rows)
        else:
            old = blocks[z]
            blocks = [blocks[x] if b == old else b for b in blocks]


def random_valuation(rng: random.Random, n: int, names: Sequence[str]) -> dict[str, int]:
    return {p: rng.getrandbits(n) for p in names}


_UNARY_CHOICES = (Not, Dia, Box, Ex, Fa)
_BINARY_CHOICES = (And, Or, Impl)


def random_formula(
    rng: random.Random, max_nodes: int, names: Sequence[str] = DEFAULT_LETTERS
) -> Formula:
    """A random formula with at most ``max_nodes`` AST nodes."""
    size = rng.randint(1, max_nodes)
    return _grow(rng, size, names)


def _grow(rng: random.Random, size: int, names: Sequence[str]) -> Formula:
    if size <= 1:
        r = rng.random()
        if r < 0.06:
            return Top()
        if r < 0.12:
            return Bot()
        return Letter(rng.choice(names))
    if size == 2 or rng.random() < 0.5:
        return rng.choice(_UNARY_CHOICES)(_grow(rng, size - 1, names))
    left = rng.randint(1, size - 2)
    return rng.choice(_BINARY_CHOICES)(
        _grow(rng, left, names), _grow(rng, size - 1 - left, names)
    )


def random_refuting_instance(
    rng: random.Random,
    max_worlds: int = 8,
    max_nodes: int = 10,
    names: Sequence[str] = DEFAULT_LETTERS,
    attempts: int = 1000,
) -> tuple[Model, Formula]:
    """A random MGrz model together with a random formula it refutes."""
    for _ in range(attempts):
        n = rng.randint(1, max_worlds)
        F = random_mgrz_frame(rng, n)
        M = Model(F, random_valuation(rng, n, names))
        phi = random_formula(rng, max_nodes, names)
        if eval(M, phi) != F.full:
            return M, phi
    raise RuntimeError("no refuting instance found")


def is_unary(f: Formula) -> bool:
    return isinstance(f, UNARY)


def witness_heavy_formula(
    rng: random.Random, max_nodes: int, names: Sequence[str] = DEFAULT_LETTERS
) -> Formula:
    """``~g`` where ``g`` conjoins formulas of the shapes ``<>a``, ``E a`` and
    ``E(a & <>b)``, so a refutation needs witnesses in several clusters."""
    parts = []
    budget = max(4, max_nodes - 1)
    while budget > 3 and (not parts or rng.random() < 0.5):
        shape = rng.randrange(3)
        if shape == 2 and budget >= 6:
            a = _grow(rng, rng.randint(1, 2), names)
            b = _grow(rng, rng.randint(1, 2), names)
            part = Ex(And(a, Dia(b)))
        else:
            body = _grow(rng, rng.randint(1, 3), names)
            part = Dia(body) if shape == 0 else Ex(body)
        parts.append(part)
        budget -= size(part) + 1
    g = parts[0]
    for h in parts[1:]:
        g = And(g, h)
    return Not(g)


def random_witness_heavy_instance(
    rng: random.Random,
    max_worlds: int = 8,
    max_nodes: int = 12,
    names: Sequence[str] = DEFAULT_LETTERS,
    attempts: int = 1000,
) -> tuple[Model, Formula]:
    for _ in range(attempts):
        n = rng.randint(2, max_worlds)
        F = random_mgrz_frame(rng, n)
        M = Model(F, random_valuation(rng, n, names))
        phi = witness_heavy_formula(rng, max_nodes, names)
        if eval(M, phi) != F.full:
            return M, phi
    raise RuntimeError("no refuting instance found")
