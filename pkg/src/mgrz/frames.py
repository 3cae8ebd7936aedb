"""Finite MK-frames ``(X, R, E)``, frame-class checks and maximal-point machinery.

Worlds are ``0..n-1``.  ``R`` is stored exactly as given (rows of bitmasks);
``E`` is stored as a block id per world.  Every subset of a finite frame is
clopen, so the point notions below take arbitrary world sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from . import bits
from .bits import Rows
from .errors import BudgetExceeded, FrameClassError, NotMKFrame

DEFAULT_SUBSET_CAP = 14

CLASS_NAMES = ("MK", "MS4", "MGrz", "GrzU", "MPlusGrz", "MGL", "Barcan")

# defining conditions per class, checked in this order
CLASS_CONDITIONS: dict[str, tuple[str, ...]] = {
    "MK": ("commutativity",),
    "MS4": ("commutativity", "reflexive", "transitive"),
    "MGrz": ("commutativity", "reflexive", "transitive", "antisymmetric"),
    "GrzU": ("commutativity", "reflexive", "transitive", "antisymmetric", "r_within_e"),
    "MPlusGrz": ("commutativity", "reflexive", "transitive", "antisymmetric", "e_r_identity"),
    "MGL": ("commutativity", "irreflexive", "transitive", "e_excludes_r"),
    "Barcan": ("commutativity", "barcan"),
}


def _normalize_blocks(blocks: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    return tuple(relabel.setdefault(b, len(relabel)) for b in blocks)


@dataclass(frozen=True)
class MKFrame:
    """A finite frame with accessibility ``R`` and equivalence ``E``.

    ``blocks[x]`` is the E-block of world ``x``; blocks are renumbered in order
    of first occurrence so equal partitions compare equal.  Commutativity is not
    assumed, see :func:`validate_mk`.
    """

    n: int
    R: Rows
    blocks: tuple[int, ...]
    names: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a frame needs at least one world")
        if len(self.R) != self.n or len(self.blocks) != self.n:
            raise ValueError("R and blocks must have one entry per world")
        if any(row >> self.n for row in self.R):
            raise ValueError("R mentions a world outside the frame")
        object.__setattr__(self, "R", tuple(self.R))
        object.__setattr__(self, "blocks", _normalize_blocks(self.blocks))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @classmethod
    def from_pairs(
        cls,
        n: int,
        pairs: Iterable[tuple[int, int]],
        partition: Optional[Iterable[Iterable[int]]] = None,
        names: Optional[Sequence[str]] = None,
    ) -> "MKFrame":
        """Build from R-pairs and a list of E-blocks (identity partition if omitted)."""
        if partition is None:
            block_of = list(range(n))
        else:
            block_of = [-1] * n
            for b, block in enumerate(partition):
                for x in block:
                    block_of[x] = b
            if -1 in block_of:
                raise ValueError("E-blocks must cover every world")
        return cls(n, bits.rows_from_pairs(n, pairs), tuple(block_of),
                   tuple(names) if names else None)

    @cached_property
    def full(self) -> int:
        return bits.full(self.n)

    @cached_property
    def block_masks(self) -> tuple[int, ...]:
        masks = [0] * (max(self.blocks) + 1)
        for x, b in enumerate(self.blocks):
            masks[b] |= 1 << x
        return tuple(masks)

    @cached_property
    def E(self) -> Rows:
        return tuple(self.block_masks[b] for b in self.blocks)

    @cached_property
    def Q(self) -> Rows:
        return q_relation(self)

    def partition(self) -> list[list[int]]:
        return [bits.to_list(m) for m in self.block_masks]

    def name(self, x: int) -> str:
        return self.names[x] if self.names else str(x)

    def e_image(self, mask: int) -> int:
        """``E[U]``, the E-saturation of ``U``."""
        out = 0
        for b in self.block_masks:
            if b & mask:
                out |= b
        return out

    def r_image(self, mask: int) -> int:
        return bits.image(self.R, mask)

    def r_preimage(self, mask: int) -> int:
        return bits.preimage(self.R, mask)

    def with_closure(self) -> "MKFrame":
        """Same frame with R replaced by its reflexive-transitive closure."""
        return MKFrame(self.n, bits.reflexive_transitive_closure(self.R), self.blocks, self.names)

    def relabel(self, perm: Sequence[int]) -> "MKFrame":
        """Image of the frame under the bijection ``x -> perm[x]``."""
        rows = [0] * self.n
        block_of = [0] * self.n
        for x in range(self.n):
            rows[perm[x]] = bits.from_iter(perm[y] for y in bits.bits(self.R[x]))
            block_of[perm[x]] = self.blocks[x]
        return MKFrame(self.n, tuple(rows), tuple(block_of))


@dataclass(frozen=True)
class Witness:
    condition: str
    worlds: tuple[int, ...]


@dataclass
class FrameClassReport:
    flags: dict[str, bool]
    witnesses: dict[str, Witness]

    def to_json(self) -> dict:
        return {
            "flags": dict(self.flags),
            "witnesses": {
                k: {"condition": w.condition, "worlds": list(w.worlds)}
                for k, w in self.witnesses.items()
            },
        }


@dataclass(frozen=True)
class Skeleton:
    """The E-skeleton: quotient frame ``(X0, R0)`` and the quotient map."""

    n: int
    R: Rows
    quotient: tuple[int, ...]


# --------------------------------------------------------------------------
# defining conditions


def _first_commutativity(F: MKFrame) -> Optional[tuple[int, ...]]:
    E, R = F.E, F.R
    for x in range(F.n):
        for y in bits.bits(E[x]):
            for z in bits.bits(R[y]):
                if not R[x] & E[z]:
                    return (x, y, z)
    return None


def _first_barcan(F: MKFrame) -> Optional[tuple[int, ...]]:
    # x R y, y E z, but no u with x E u R z
    E, R = F.E, F.R
    er = bits.compose(E, R)
    for x in range(F.n):
        for y in bits.bits(R[x]):
            for z in bits.bits(E[y]):
                if not er[x] >> z & 1:
                    return (x, y, z)
    return None


def _first_reflexive(F: MKFrame) -> Optional[tuple[int, ...]]:
    for x in range(F.n):
        if not F.R[x] >> x & 1:
            return (x,)
    return None


def _first_irreflexive(F: MKFrame) -> Optional[tuple[int, ...]]:
    for x in range(F.n):
        if F.R[x] >> x & 1:
            return (x,)
    return None


def _first_transitive(F: MKFrame) -> Optional[tuple[int, ...]]:
    R = F.R
    for x in range(F.n):
        for y in bits.bits(R[x]):
            missing = R[y] & ~R[x]
            if missing:
                return (x, y, bits.lowest(missing))
    return None


def _first_antisymmetric(F: MKFrame) -> Optional[tuple[int, ...]]:
    R = F.R
    for x in range(F.n):
        for y in bits.bits(R[x] & ~((2 << x) - 1)):
            if R[y] >> x & 1:
                return (x, y)
    return None


def _first_r_within_e(F: MKFrame) -> Optional[tuple[int, ...]]:
    for x in range(F.n):
        out = F.R[x] & ~F.E[x]
        if out:
            return (x, bits.lowest(out))
    return None


def _first_e_r_identity(F: MKFrame) -> Optional[tuple[int, ...]]:
    for x in range(F.n):
        bad = F.R[x] & F.E[x] & ~(1 << x)
        if bad:
            return (x, bits.lowest(bad))
    return None


def _first_e_excludes_r(F: MKFrame) -> Optional[tuple[int, ...]]:
    for x in range(F.n):
        bad = F.R[x] & F.E[x]
        if bad:
            return (x, bits.lowest(bad))
    return None


_FINDERS = {
    "commutativity": _first_commutativity,
    "barcan": _first_barcan,
    "reflexive": _first_reflexive,
    "irreflexive": _first_irreflexive,
    "transitive": _first_transitive,
    "antisymmetric": _first_antisymmetric,
    "r_within_e": _first_r_within_e,
    "e_r_identity": _first_e_r_identity,
    "e_excludes_r": _first_e_excludes_r,
}


def violates(F: MKFrame, condition: str, worlds: Sequence[int]) -> bool:
    """Replay a witness: True iff ``worlds`` violate ``condition`` in ``F``."""
    R, E = F.R, F.E

    def r(a: int, b: int) -> bool:
        return bool(R[a] >> b & 1)

    def e(a: int, b: int) -> bool:
        return bool(E[a] >> b & 1)

    if condition == "commutativity":
        x, y, z = worlds
        return e(x, y) and r(y, z) and not (R[x] & E[z])
    if condition == "barcan":
        x, y, z = worlds
        return r(x, y) and e(y, z) and not any(r(u, z) for u in bits.bits(E[x]))
    if condition == "reflexive":
        return not r(worlds[0], worlds[0])
    if condition == "irreflexive":
        return r(worlds[0], worlds[0])
    if condition == "transitive":
        x, y, z = worlds
        return r(x, y) and r(y, z) and not r(x, z)
    if condition == "antisymmetric":
        x, y = worlds
        return x != y and r(x, y) and r(y, x)
    if condition == "r_within_e":
        x, y = worlds
        return r(x, y) and not e(x, y)
    if condition == "e_r_identity":
        x, y = worlds
        return x != y and r(x, y) and e(x, y)
    if condition == "e_excludes_r":
        x, y = worlds
        return r(x, y) and e(x, y)
    raise ValueError(f"unknown condition {condition!r}")


def _report(F: MKFrame, classes: Sequence[str]) -> FrameClassReport:
    found: dict[str, Optional[tuple[int, ...]]] = {}
    flags: dict[str, bool] = {}
    witnesses: dict[str, Witness] = {}
    for cls in classes:
        flags[cls] = True
        for cond in CLASS_CONDITIONS[cls]:
            if cond not in found:
                found[cond] = _FINDERS[cond](F)
            if found[cond] is not None:
                flags[cls] = False
                witnesses[cls] = Witness(cond, found[cond])
                break
    return FrameClassReport(flags, witnesses)


def validate_mk(F: MKFrame) -> FrameClassReport:
    """Check the commutativity condition ``x E y R z => exists u: x R u E z``."""
    return _report(F, ("MK",))


def is_mk(F: MKFrame) -> bool:
    return _first_commutativity(F) is None


def classify(F: MKFrame) -> FrameClassReport:
    """Evaluate every frame class; failed classes carry a minimal witness."""
    return _report(F, CLASS_NAMES)


def in_class(F: MKFrame, cls: str) -> bool:
    return all(_FINDERS[c](F) is None for c in CLASS_CONDITIONS[cls])


def require_class(F: MKFrame, cls: str) -> None:
    report = _report(F, (cls,))
    if not report.flags[cls]:
        w = report.witnesses[cls]
        message = f"frame is not a {cls} frame: {w.condition} fails at {list(w.worlds)}"
        if w.condition == "commutativity":
            raise NotMKFrame(message)
        raise FrameClassError(message)


# --------------------------------------------------------------------------
# Q, skeleton, maximal points


def q_relation(F: MKFrame) -> Rows:
    """``x Q y`` iff ``x R z`` and ``z E y`` for some ``z``."""
    return tuple(F.e_image(row) for row in F.R)


def e_skeleton(F: MKFrame) -> Skeleton:
    """Quotient by E with ``[x] R0 [y]`` iff ``x Q y``."""
    require_class(F, "MK")
    nb = len(F.block_masks)
    rows = [0] * nb
    Q = F.Q
    for x in range(F.n):
        for y in bits.bits(Q[x]):
            rows[F.blocks[x]] |= 1 << F.blocks[y]
    return Skeleton(nb, tuple(rows), F.blocks)


def max_set(F: MKFrame, U: int) -> int:
    """Points of ``U`` whose only R-successor inside ``U`` is themselves."""
    out = 0
    for x in bits.bits(U):
        if not F.R[x] & U & ~(1 << x):
            out |= 1 << x
    return out


def qmax_set(F: MKFrame, U: int) -> int:
    """Points of ``U`` R-related back by every R-successor inside ``U``."""
    out = 0
    for x in bits.bits(U):
        if all(F.R[y] >> x & 1 for y in bits.bits(F.R[x] & U)):
            out |= 1 << x
    return out


def smax_set(F: MKFrame, U: int) -> int:
    """Maximal points ``x`` of ``U`` such that ``x Q y`` with ``y`` in ``U`` forces ``x E y``."""
    out = 0
    Q, E = F.Q, F.E
    for x in bits.bits(max_set(F, U)):
        if not Q[x] & U & ~E[x]:
            out |= 1 << x
    return out


def passive_set(F: MKFrame, U: int) -> int:
    """Points of ``U`` that cannot leave ``U`` and come back along R."""
    out = 0
    for x in bits.bits(U):
        outside = F.R[x] & ~U
        if not (F.r_image(outside) & U):
            out |= 1 << x
    return out


def eq_clusters(F: MKFrame) -> list[int]:
    """Classes of mutual reachability along ``Q`` (the Q-clusters)."""
    reach = bits.reflexive_transitive_closure(F.Q)
    seen = 0
    out = []
    for x in range(F.n):
        if seen >> x & 1:
            continue
        cls = 0
        for y in bits.bits(reach[x]):
            if reach[y] >> x & 1:
                cls |= 1 << y
        out.append(cls)
        seen |= cls
    return out


@dataclass
class FineEsakiaReport:
    passed: bool
    method: str
    witness: Optional[tuple[int, int]]  # (subset mask U, world x)
    exhaustive: Optional[bool] = None
    antisymmetric: Optional[bool] = None

    @property
    def methods_agree(self) -> Optional[bool]:
        if self.exhaustive is None or self.antisymmetric is None:
            return None
        return self.exhaustive == self.antisymmetric


def fine_esakia_check(F: MKFrame, exhaustive: bool = False,
                      cap: int = DEFAULT_SUBSET_CAP) -> FineEsakiaReport:
    """Check that every point of every ``U`` R-sees a maximal point of ``U``.

    Non-exhaustive mode uses the finite equivalent, antisymmetry of R.  The
    exhaustive mode scans all subsets and also runs the antisymmetry check.
    """
    require_class(F, "MS4")
    pair = _first_antisymmetric(F)
    anti_ok = pair is None
    anti_witness = None if anti_ok else (bits.from_iter(pair), pair[0])
    if not exhaustive:
        return FineEsakiaReport(anti_ok, "antisymmetry", anti_witness, None, anti_ok)
    if F.n > cap:
        raise BudgetExceeded(f"exhaustive subset scan needs n <= {cap}, got {F.n}")
    witness = None
    for U in range(1, 1 << F.n):
        m = max_set(F, U)
        bad = (qmax_set(F, U) & ~m) | bits.from_iter(
            x for x in bits.bits(U) if not F.R[x] & m
        )
        if bad:
            witness = (U, bits.lowest(bad))
            break
    ok = witness is None
    return FineEsakiaReport(ok, "exhaustive", witness, ok, anti_ok)


def smax_theorem_check(F: MKFrame, U: int) -> bool:
    """Every point of ``U`` Q-sees a strongly maximal point of ``U``."""
    s = smax_set(F, U)
    return all(F.Q[x] & s for x in bits.bits(U))


# --------------------------------------------------------------------------
# morphisms and isomorphism


def is_p_morphism(rows: Sequence[int], rows2: Sequence[int], f: Sequence[int]) -> bool:
    """``f(R[x]) = R'[f(x)]`` for every ``x``."""
    for x, row in enumerate(rows):
        if bits.from_iter(f[y] for y in bits.bits(row)) != rows2[f[x]]:
            return False
    return True


def is_mk_morphism(F: MKFrame, G: MKFrame, f: Sequence[int]) -> bool:
    return is_p_morphism(F.R, G.R, f) and is_p_morphism(F.E, G.E, f)


def _signature(rels: Sequence[Rows], x: int) -> tuple:
    out = []
    for rows in rels:
        out.append(rows[x] >> x & 1)
        out.append(rows[x].bit_count())
        out.append(sum(row >> x & 1 for row in rows))
    return tuple(out)


def relational_isomorphism(
    n: int, rels_f: Sequence[Rows], rels_g: Sequence[Rows]
) -> Optional[tuple[int, ...]]:
    """A bijection ``perm`` with ``x S y`` iff ``perm[x] S' perm[y]`` for each paired relation."""
    sf = [_signature(rels_f, x) for x in range(n)]
    sg = [_signature(rels_g, x) for x in range(n)]
    if sorted(sf) != sorted(sg):
        return None
    perm = [-1] * n
    used = [False] * n
    pairs = list(zip(rels_f, rels_g))

    def consistent(x: int, y: int) -> bool:
        for rf, rg in pairs:
            if (rf[x] >> x & 1) != (rg[y] >> y & 1):
                return False
            for a in range(x):
                b = perm[a]
                if (rf[x] >> a & 1) != (rg[y] >> b & 1) or (rf[a] >> x & 1) != (rg[b] >> y & 1):
                    return False
        return True

    def extend(x: int) -> bool:
        if x == n:
            return True
        for y in range(n):
            if not used[y] and sf[x] == sg[y] and consistent(x, y):
                perm[x] = y
                used[y] = True
                if extend(x + 1):
                    return True
                used[y] = False
        perm[x] = -1
        return False

    return tuple(perm) if extend(0) else None


def frames_isomorphic(F: MKFrame, G: MKFrame) -> Optional[tuple[int, ...]]:
    """Return a bijection ``F -> G`` preserving and reflecting R and E, if any."""
    if F.n != G.n:
        return None
    return relational_isomorphism(F.n, (F.R, F.E, F.Q), (G.R, G.E, G.Q))
