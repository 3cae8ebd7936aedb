"""Model checking on MK-frames and on Kripke bundles.

``eval`` labels the subformula closure bottom-up with extension bitmasks;
``eval_naive`` is the textbook recursion and serves as its oracle.  On the
bundle side ``eval_pred`` follows the satisfaction clauses pointwise, and
``pred_extension`` computes whole extensions for exhaustive checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

from . import bits
from .bundles import KripkeBundle, bundle_of_frame, frame_of_bundle
from .errors import BudgetExceeded, InputError
from .frames import MKFrame
from .syntax import (
    And, Bot, Box, Dia, Ex, ExX, Fa, FaX, Formula, Impl, Letter, Not, Or, PAnd, PBot, PBox,
    PDia, PImpl, PNot, POr, PTop, Pred, PredicateFormula, Top, free_x, letters,
    subformula_closure, translate_t,
)

VALUATION_BUDGET_BITS = 24


@dataclass(frozen=True)
class Model:
    frame: MKFrame
    valuation: Mapping[str, int]

    def __post_init__(self) -> None:
        for p, mask in self.valuation.items():
            if mask >> self.frame.n:
                raise InputError(f"valuation of {p} mentions a world outside the frame")

    def value(self, p: str) -> int:
        return self.valuation.get(p, 0)


# --------------------------------------------------------------------------
# frame side


def _step(F: MKFrame, g: Formula, ext: Mapping[Formula, int], val: Mapping[str, int]) -> int:
    full = F.full
    if isinstance(g, Letter):
        return val.get(g.name, 0)
    if isinstance(g, Top):
        return full
    if isinstance(g, Bot):
        return 0
    if isinstance(g, Not):
        return full & ~ext[g.sub]
    if isinstance(g, And):
        return ext[g.left] & ext[g.right]
    if isinstance(g, Or):
        return ext[g.left] | ext[g.right]
    if isinstance(g, Impl):
        return full & (~ext[g.left] | ext[g.right])
    if isinstance(g, Dia):
        return F.r_preimage(ext[g.sub])
    if isinstance(g, Box):
        return full & ~F.r_preimage(full & ~ext[g.sub])
    if isinstance(g, Ex):
        return F.e_image(ext[g.sub])
    if isinstance(g, Fa):
        return full & ~F.e_image(full & ~ext[g.sub])
    raise TypeError(f"not a formula: {g!r}")


def extensions(M: Model, f: Formula) -> dict[Formula, int]:
    """Extension of every member of the subformula closure of ``f``."""
    ext: dict[Formula, int] = {}
    for g in subformula_closure(f):
        ext[g] = _step(M.frame, g, ext, M.valuation)
    return ext


def eval(M: Model, f: Formula) -> int:  # noqa: A001 - the operation's name
    """The extension of ``f`` as a world bitmask."""
    return extensions(M, f)[f]


def eval_naive(M: Model, f: Formula, x: int) -> bool:
    """Truth of ``f`` at ``x`` by plain structural recursion."""
    F = M.frame
    if isinstance(f, Letter):
        return bool(M.value(f.name) >> x & 1)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not eval_naive(M, f.sub, x)
    if isinstance(f, And):
        return eval_naive(M, f.left, x) and eval_naive(M, f.right, x)
    if isinstance(f, Or):
        return eval_naive(M, f.left, x) or eval_naive(M, f.right, x)
    if isinstance(f, Impl):
        return (not eval_naive(M, f.left, x)) or eval_naive(M, f.right, x)
    if isinstance(f, Dia):
        return any(eval_naive(M, f.sub, y) for y in range(F.n) if F.R[x] >> y & 1)
    if isinstance(f, Box):
        return all(eval_naive(M, f.sub, y) for y in range(F.n) if F.R[x] >> y & 1)
    if isinstance(f, Ex):
        return any(eval_naive(M, f.sub, y) for y in range(F.n) if F.blocks[y] == F.blocks[x])
    if isinstance(f, Fa):
        return all(eval_naive(M, f.sub, y) for y in range(F.n) if F.blocks[y] == F.blocks[x])
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True)
class Valid:
    valuations_checked: int


@dataclass(frozen=True)
class CounterValuation:
    valuation: dict[str, int]
    world: int


ValidityResult = Union[Valid, CounterValuation]


def iter_valuations(F: MKFrame, names: list[str]) -> Iterator[dict[str, int]]:
    """All valuations over ``names`` in counter order; the first name holds the
    least significant ``n`` bits."""
    n, full = F.n, F.full
    for c in range(1 << (n * len(names))):
        yield {p: (c >> (i * n)) & full for i, p in enumerate(names)}


def frame_validity(
    F: MKFrame, f: Formula, budget_bits: int = VALUATION_BUDGET_BITS
) -> ValidityResult:
    """Valid, or the first counter-valuation with its lowest refuting world."""
    names = sorted(letters(f))
    if len(names) * F.n > budget_bits:
        raise BudgetExceeded(
            f"{len(names)} letters x {F.n} worlds exceeds the {budget_bits}-bit valuation budget"
        )
    closure = subformula_closure(f)
    checked = 0
    for val in iter_valuations(F, names):
        ext: dict[Formula, int] = {}
        for g in closure:
            ext[g] = _step(F, g, ext, val)
        checked += 1
        bad = F.full & ~ext[f]
        if bad:
            return CounterValuation(val, bits.lowest(bad))
    return Valid(checked)


# --------------------------------------------------------------------------
# bundle side


@dataclass(frozen=True)
class BundleModel:
    """A bundle with ``interp[w][P]`` a subset of the fiber over ``w``."""

    bundle: KripkeBundle
    interp: Mapping[int, Mapping[str, int]]

    def __post_init__(self) -> None:
        for w, table in self.interp.items():
            if not 0 <= w < self.bundle.base.n:
                raise InputError(f"interpretation mentions base world {w} outside the bundle")
            for P, mask in table.items():
                if mask & ~self.bundle.fibers[w]:
                    raise InputError(f"I_{w}({P}) leaves the fiber over {w}")

    def I(self, w: int, P: str) -> int:
        return self.interp.get(w, {}).get(P, 0)

    def predicate_mask(self, P: str) -> int:
        out = 0
        for table in self.interp.values():
            out |= table.get(P, 0)
        return out


def push_valuation(
    F: MKFrame, valuation: Mapping[str, int], bundle: Optional[KripkeBundle] = None
) -> BundleModel:
    """``I_{pi(a)}(p*) = v(p) & E[a]`` over the bundle of ``F``."""
    B = bundle_of_frame(F) if bundle is None else bundle
    interp = {
        w: {p + "*": valuation[p] & fiber for p in sorted(valuation)}
        for w, fiber in enumerate(B.fibers)
    }
    return BundleModel(B, interp)


def pull_valuation(BM: BundleModel, frame: Optional[MKFrame] = None) -> Model:
    """``v(p)`` is the union of the ``I_w(p*)``, on the frame of the bundle."""
    names = sorted({P for table in BM.interp.values() for P in table})
    val = {P[:-1] if P.endswith("*") else P: BM.predicate_mask(P) for P in names}
    return Model(frame_of_bundle(BM.bundle) if frame is None else frame, val)


def eval_pred(BM: BundleModel, g: PredicateFormula, w: int, a: Optional[int] = None) -> bool:
    """``w |= g[a/x]``.  The diamond moves to a successor ``v`` of ``w`` and
    replaces ``a`` by an inheritor ``b in R[a]`` lying over ``v``; quantifiers
    range over the fiber of the current world."""
    B = BM.bundle
    if free_x(g) and (a is None or B.pi[a] != w):
        raise InputError(f"individual {a} is not in the fiber over base world {w}")
    return _pred(BM, g, w, a)


def _pred(BM: BundleModel, g: PredicateFormula, w: int, a: Optional[int]) -> bool:
    B = BM.bundle
    if isinstance(g, Pred):
        return bool(BM.I(w, g.name) >> a & 1)
    if isinstance(g, PTop):
        return True
    if isinstance(g, PBot):
        return False
    if isinstance(g, PNot):
        return not _pred(BM, g.sub, w, a)
    if isinstance(g, PAnd):
        return _pred(BM, g.left, w, a) and _pred(BM, g.right, w, a)
    if isinstance(g, POr):
        return _pred(BM, g.left, w, a) or _pred(BM, g.right, w, a)
    if isinstance(g, PImpl):
        return (not _pred(BM, g.left, w, a)) or _pred(BM, g.right, w, a)
    if isinstance(g, (PDia, PBox)):
        results = (_pred(BM, g.sub, v, b) for v, b in _successors(B, g.sub, w, a))
        return any(results) if isinstance(g, PDia) else all(results)
    if isinstance(g, (ExX, FaX)):
        results = (_pred(BM, g.sub, w, b) for b in bits.bits(B.fibers[w]))
        return any(results) if isinstance(g, ExX) else all(results)
    raise TypeError(f"not a predicate formula: {g!r}")


def _successors(B: KripkeBundle, sub: PredicateFormula, w: int, a: Optional[int]):
    if a is None or not free_x(sub):
        for v in bits.bits(B.base.R[w]):
            yield v, None
        return
    for v in bits.bits(B.base.R[w]):
        for b in bits.bits(B.total.R[a] & B.fibers[v]):
            yield v, b


def _lift(B: KripkeBundle, base_mask: int) -> int:
    out = 0
    for w in bits.bits(base_mask):
        out |= B.fibers[w]
    return out


def pred_extension(BM: BundleModel, g: PredicateFormula) -> int:
    """Extension of ``g``: total worlds ``a`` with ``pi(a) |= g[a/x]`` when ``x``
    is free, base worlds otherwise."""
    return _pext(BM, g)[0]


def _pext(BM: BundleModel, g: PredicateFormula) -> tuple[int, bool]:
    B = BM.bundle
    full_x, full_0 = bits.full(B.total.n), bits.full(B.base.n)
    if isinstance(g, Pred):
        return BM.predicate_mask(g.name), True
    if isinstance(g, PTop):
        return full_0, False
    if isinstance(g, PBot):
        return 0, False
    if isinstance(g, PNot):
        m, free = _pext(BM, g.sub)
        return (full_x if free else full_0) & ~m, free
    if isinstance(g, (PAnd, POr, PImpl)):
        (l, lf), (r, rf) = _pext(BM, g.left), _pext(BM, g.right)
        free = lf or rf
        if free:
            l, r = (l if lf else _lift(B, l)), (r if rf else _lift(B, r))
        full = full_x if free else full_0
        if isinstance(g, PAnd):
            return l & r, free
        if isinstance(g, POr):
            return l | r, free
        return full & (~l | r), free
    if isinstance(g, (PDia, PBox)):
        m, free = _pext(BM, g.sub)
        rows, full = (B.total.R, full_x) if free else (B.base.R, full_0)
        if isinstance(g, PDia):
            return bits.preimage(rows, m), free
        return full & ~bits.preimage(rows, full & ~m), free
    if isinstance(g, (ExX, FaX)):
        m, free = _pext(BM, g.sub)
        if not free:
            return m, False
        if isinstance(g, ExX):
            return B.project(m), False
        return full_0 & ~B.project(full_x & ~m), False
    raise TypeError(f"not a predicate formula: {g!r}")


def truth_at_individuals(BM: BundleModel, g: PredicateFormula) -> int:
    """Total worlds ``a`` with ``pi(a) |= g[a/x]`` (sentences lifted along fibers)."""
    m, free = _pext(BM, g)
    return m if free else _lift(BM.bundle, m)


# --------------------------------------------------------------------------
# translation correspondence


@dataclass
class TranslationReport:
    checked: int = 0
    disagreements: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def _interpretations(B: KripkeBundle, names: list[str]) -> Iterator[dict[int, dict[str, int]]]:
    """All interpretations of ``p*`` for ``p`` in ``names``, fiber by fiber."""
    slots = [(w, p) for p in names for w in range(B.base.n)]
    options = [list(_subsets(B.fibers[w])) for w, _ in slots]

    def rec(i: int, acc: dict[int, dict[str, int]]):
        if i == len(slots):
            yield {w: dict(t) for w, t in acc.items()}
            return
        w, p = slots[i]
        for s in options[i]:
            acc.setdefault(w, {})[p + "*"] = s
            yield from rec(i + 1, acc)

    yield from rec(0, {})


def _subsets(mask: int) -> Iterator[int]:
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def check_translation_equivalence(
    F: MKFrame,
    f: Formula,
    trials: Optional[int] = None,
    seed: int = 0,
    literal: bool = False,
) -> TranslationReport:
    """Compare ``a |=_v f`` with ``pi(a) |=_I f^t[a/x]`` at every world.

    The push direction runs over valuations ``v`` with ``I = push(v)``; the pull
    direction runs over interpretations ``I`` with ``v = pull(I)``.  Both are
    exhaustive unless ``trials`` asks for that many random samples each.
    ``literal`` uses the pointwise clause evaluator instead of extensions.
    """
    names = sorted(letters(f))
    g = translate_t(f)
    B = bundle_of_frame(F)
    report = TranslationReport()

    def bundle_truth(BM: BundleModel) -> int:
        if not literal:
            return truth_at_individuals(BM, g)
        return bits.from_iter(
            a for a in range(F.n) if eval_pred(BM, g, B.pi[a], a if free_x(g) else None)
        )

    def compare(direction: str, M: Model, BM: BundleModel) -> None:
        report.checked += 1
        lhs = eval(M, f)
        rhs = bundle_truth(BM)
        if lhs != rhs:
            report.disagreements.append({
                "direction": direction,
                "valuation": {p: bits.to_list(M.value(p)) for p in names},
                "worlds": bits.to_list(lhs ^ rhs),
            })

    if trials is None:
        vals: Iterator[dict[str, int]] = iter_valuations(F, names)
        interps: Iterator[dict] = _interpretations(B, names)
    else:
        rng = random.Random(seed)
        vals = ({p: rng.getrandbits(F.n) for p in names} for _ in range(trials))
        interps = (
            {w: {p + "*": rng.getrandbits(F.n) & B.fibers[w] for p in names}
             for w in range(B.base.n)}
            for _ in range(trials)
        )
    for val in vals:
        compare("push", Model(F, val), push_valuation(F, val, B))
    G = frame_of_bundle(B)
    for interp in interps:
        BM = BundleModel(B, interp)
        compare("pull", pull_valuation(BM, G), BM)
    return report
