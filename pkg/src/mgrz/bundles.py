"""Kripke bundles, the frame/bundle correspondence and n-th levels.

A bundle is an onto p-morphism ``pi`` from a total Kripke frame ``(X, R)``
onto a base frame ``(X0, R0)``.  Fibers ``pi^-1(w)`` are the individual
domains.  :func:`bundle_of_frame` and :func:`frame_of_bundle` are the object
parts of the two functors; the round-trip checks verify their unit and counit
on concrete instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Sequence

from . import bits
from .bits import Rows
from .errors import BudgetExceeded, InputError, InvalidBundle, InvariantViolation
from .frames import MKFrame, e_skeleton, is_mk, require_class
from .syntax import Formula, has_quantifier

LEVEL_BUDGET = 10**6


@dataclass(frozen=True)
class KripkeFrame:
    n: int
    R: Rows

    def __post_init__(self) -> None:
        object.__setattr__(self, "R", tuple(self.R))
        if len(self.R) != self.n or any(row >> self.n for row in self.R):
            raise ValueError("relation rows do not fit the world count")


@dataclass(frozen=True)
class KripkeBundle:
    total: KripkeFrame
    base: KripkeFrame
    pi: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pi", tuple(self.pi))
        if len(self.pi) != self.total.n or any(not 0 <= w < self.base.n for w in self.pi):
            raise ValueError("pi must map every total world to a base world")

    @cached_property
    def fibers(self) -> tuple[int, ...]:
        out = [0] * self.base.n
        for x, w in enumerate(self.pi):
            out[w] |= 1 << x
        return tuple(out)

    def project(self, mask: int) -> int:
        return bits.from_iter(self.pi[x] for x in bits.bits(mask))


def bundle_problems(B: KripkeBundle) -> list[tuple[str, int]]:
    """Violations of the bundle invariants as ``(clause, world)`` pairs."""
    out = []
    for w, fiber in enumerate(B.fibers):
        if not fiber:
            out.append(("onto", w))
    for x in range(B.total.n):
        if B.project(B.total.R[x]) != B.base.R[B.pi[x]]:
            out.append(("p-morphism", x))
    return out


def validate_bundle(B: KripkeBundle) -> None:
    problems = bundle_problems(B)
    if problems:
        clause, w = problems[0]
        kind = "base world" if clause == "onto" else "total world"
        raise InvalidBundle(f"pi is not an onto p-morphism: {clause} fails at {kind} {w}")


def bundle_of_frame(F: MKFrame) -> KripkeBundle:
    """Total frame ``(X, R)``, base the E-skeleton, ``pi`` the quotient map."""
    require_class(F, "MK")
    sk = e_skeleton(F)
    return KripkeBundle(KripkeFrame(F.n, F.R), KripkeFrame(sk.n, sk.R), sk.quotient)


def frame_of_bundle(B: KripkeBundle) -> MKFrame:
    """``(X, R, E_pi)`` where ``x E_pi y`` iff ``pi(x) = pi(y)``."""
    validate_bundle(B)
    F = MKFrame(B.total.n, B.total.R, B.pi)
    if not is_mk(F):
        raise InvariantViolation("frame of a valid bundle fails commutativity")
    return F


# --------------------------------------------------------------------------
# morphisms


@dataclass
class CheckReport:
    passed: bool
    failures: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "failures": [{"clause": c, "witness": list(w)} for c, w in self.failures],
        }


def check_bundle_morphism(
    B: KripkeBundle, B2: KripkeBundle, f: Sequence[int], g: Sequence[int]
) -> CheckReport:
    """Clauses: both maps are p-morphisms, the square commutes, and ``f`` maps
    each fiber onto the fiber over the image base world."""
    failures: list[tuple[str, tuple[int, ...]]] = []
    for x in range(B.total.n):
        img = bits.from_iter(f[y] for y in bits.bits(B.total.R[x]))
        if img != B2.total.R[f[x]]:
            failures.append(("f p-morphism", (x,)))
    for w in range(B.base.n):
        img = bits.from_iter(g[v] for v in bits.bits(B.base.R[w]))
        if img != B2.base.R[g[w]]:
            failures.append(("g p-morphism", (w,)))
    for x in range(B.total.n):
        if g[B.pi[x]] != B2.pi[f[x]]:
            failures.append(("square", (x,)))
    for w in range(B.base.n):
        img = bits.from_iter(f[x] for x in bits.bits(B.fibers[w]))
        if img != B2.fibers[g[w]]:
            failures.append(("fiber onto", (w,)))
    return CheckReport(not failures, failures)


def induced_base_map(F: MKFrame, G: MKFrame, f: Sequence[int]) -> tuple[int, ...]:
    """The skeleton map ``[x] -> [f(x)]`` induced by an MK-morphism."""
    out = [0] * len(F.block_masks)
    for x in range(F.n):
        out[F.blocks[x]] = G.blocks[f[x]]
    return tuple(out)


# --------------------------------------------------------------------------
# round trips


def roundtrip_frame(F: MKFrame) -> CheckReport:
    """The frame built from the bundle of ``F`` has the same carrier, R and E."""
    G = frame_of_bundle(bundle_of_frame(F))
    failures = []
    if G.n != F.n:
        failures.append(("carrier", (F.n, G.n)))
    else:
        for x in range(F.n):
            if G.R[x] != F.R[x]:
                failures.append(("R", (x,)))
            if G.E[x] != F.E[x]:
                failures.append(("E", (x,)))
    return CheckReport(not failures, failures)


def counit(B: KripkeBundle) -> tuple[KripkeBundle, tuple[int, ...], tuple[int, ...]]:
    """The comparison ``(id, p0)`` from ``B`` to the bundle of its frame,
    where ``p0(w)`` is the block ``pi^-1(w)``."""
    target = bundle_of_frame(frame_of_bundle(B))
    ident = tuple(range(B.total.n))
    p0 = tuple(target.pi[bits.lowest(fiber)] for fiber in B.fibers)
    return target, ident, p0


def roundtrip_bundle(B: KripkeBundle) -> CheckReport:
    """``(id, p0)`` is a bundle isomorphism onto the bundle of the frame of ``B``."""
    target, ident, p0 = counit(B)
    report = check_bundle_morphism(B, target, ident, p0)
    failures = list(report.failures)
    if sorted(p0) != list(range(target.base.n)):
        failures.append(("p0 bijective", p0))
    # relations reflected, as a bijective p-morphism might still add edges
    for w in range(B.base.n):
        back = bits.from_iter(v for v in range(B.base.n) if target.base.R[p0[w]] >> p0[v] & 1)
        if back != B.base.R[w]:
            failures.append(("p0 reflects R0", (w,)))
    if target.total.R != B.total.R:
        failures.append(("total R", ()))
    return CheckReport(not failures, failures)


def roundtrip_iso_check(obj) -> CheckReport:
    if isinstance(obj, MKFrame):
        return roundtrip_frame(obj)
    if isinstance(obj, KripkeBundle):
        return roundtrip_bundle(obj)
    raise TypeError("expected an MKFrame or a KripkeBundle")


def iter_bundles(k: int, m: int, canonical_pi: bool = False) -> Iterator[KripkeBundle]:
    """Every bundle with ``k`` total and ``m`` base worlds.

    With ``canonical_pi`` only projections whose fiber minima increase are
    produced, one representative per relabelling of the base.
    """
    for pi in itertools.product(range(m), repeat=k):
        if len(set(pi)) != m:
            continue
        if canonical_pi and list(dict.fromkeys(pi)) != list(range(m)):
            continue
        fibers = [bits.from_iter(x for x in range(k) if pi[x] == w) for w in range(m)]
        for r0 in itertools.product(range(1 << m), repeat=m):
            choices = []
            for x in range(k):
                # R[x] meets each fiber over R0[pi(x)] and nothing else
                per_fiber = [
                    [s for s in _submasks(fibers[v]) if s] for v in bits.bits(r0[pi[x]])
                ]
                choices.append([_union(c) for c in itertools.product(*per_fiber)])
            for rows in itertools.product(*choices):
                yield KripkeBundle(KripkeFrame(k, rows), KripkeFrame(m, r0), pi)


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _union(masks: Sequence[int]) -> int:
    out = 0
    for s in masks:
        out |= s
    return out


# --------------------------------------------------------------------------
# n-th levels


@dataclass(frozen=True)
class LevelFrame:
    """Level ``level`` of a bundle; worlds are base worlds (level 0) or tuples."""

    level: int
    worlds: tuple
    R: Rows

    @property
    def n(self) -> int:
        return len(self.worlds)

    def as_frame(self) -> MKFrame:
        """The level as an MK-frame with identity E."""
        return MKFrame(self.n, self.R, tuple(range(self.n)))


def nth_level(B: KripkeBundle, n: int, budget: int = LEVEL_BUDGET) -> LevelFrame:
    """``X^n`` with componentwise R restricted to subordinate tuple pairs."""
    if n < 0:
        raise InputError("level index must be non-negative")
    if n == 0:
        return LevelFrame(0, tuple(range(B.base.n)), B.base.R)
    k = B.total.n
    if k**n > budget:
        raise BudgetExceeded(f"level {n} has {k}^{n} tuples, budget is {budget}")
    R = B.total.R
    worlds = tuple(itertools.product(range(k), repeat=n))
    rows = []
    for t in worlds:
        # positions holding the same individual must move to the same inheritor
        groups: dict[int, list[int]] = {}
        for i, x in enumerate(t):
            groups.setdefault(x, []).append(i)
        keys = list(groups)
        row = 0
        for targets in itertools.product(*(bits.to_list(R[x]) for x in keys)):
            idx = 0
            values = [0] * n
            for x, y in zip(keys, targets):
                for i in groups[x]:
                    values[i] = y
            for y in values:
                idx = idx * k + y
            row |= 1 << idx
        rows.append(row)
    return LevelFrame(n, worlds, tuple(rows))


def subordinate(x: Sequence[int], y: Sequence[int]) -> bool:
    return all(y[i] == y[j] for i in range(len(x)) for j in range(len(x)) if x[i] == x[j])


@dataclass
class StrongValidityReport:
    up_to: int
    holds: bool
    failing_level: Optional[int] = None
    valuation: Optional[dict[str, int]] = None
    world: Optional[int] = None
    levels_checked: list[int] = field(default_factory=list)

    def verdict(self) -> str:
        if self.holds:
            return f"holds up to {self.up_to}"
        return f"fails at level {self.failing_level}"


def bounded_strong_validity(
    B: KripkeBundle, f: Formula, N: int, budget_bits: Optional[int] = None
) -> StrongValidityReport:
    """Check ``f`` on levels ``0..N``.  Strong validity quantifies over every
    level, so a positive answer only holds up to ``N``."""
    from .semantics import VALUATION_BUDGET_BITS, Valid, frame_validity

    if has_quantifier(f):
        raise InputError("strong validity is defined here for formulas without E/A")
    validate_bundle(B)
    bits_budget = VALUATION_BUDGET_BITS if budget_bits is None else budget_bits
    report = StrongValidityReport(N, True)
    for n in range(N + 1):
        level = nth_level(B, n)
        result = frame_validity(level.as_frame(), f, budget_bits=bits_budget)
        report.levels_checked.append(n)
        if not isinstance(result, Valid):
            report.holds = False
            report.failing_level = n
            report.valuation = result.valuation
            report.world = result.world
            break
    return report
