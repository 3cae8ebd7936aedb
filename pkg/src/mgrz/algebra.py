"""Finite mm-algebras and their duality with finite MK-frames.

A finite Boolean algebra is the powerset of ``m`` atoms, elements are bitmasks.
An operator that preserves finite joins is fixed by its atom images, so
``dia[i]`` and ``ex[i]`` are the images of atom ``i``.  The circle operator of
the S4 and Grz inequalities is read as the diamond.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import bits
from .bits import Rows
from .errors import AxiomFailure, BudgetExceeded
from .frames import MKFrame, relational_isomorphism

ELEMENT_CAP = 16
MAX_WITNESSES = 8

AXIOM_CLASSES = ("modal", "S4", "S5", "MM", "Grz")


@dataclass(frozen=True)
class FiniteMMAlgebra:
    m: int
    dia: Rows
    ex: Rows

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("an algebra needs at least one atom")
        if len(self.dia) != self.m or len(self.ex) != self.m:
            raise ValueError("dia and ex need one image per atom")
        top = bits.full(self.m)
        if any(img & ~top for img in self.dia + self.ex):
            raise ValueError("operator image mentions an unknown atom")

    @property
    def top(self) -> int:
        return bits.full(self.m)

    def apply_dia(self, a: int) -> int:
        return bits.image(self.dia, a)

    def apply_ex(self, a: int) -> int:
        return bits.image(self.ex, a)

    def neg(self, a: int) -> int:
        return self.top & ~a


def clop_dual(F: MKFrame) -> FiniteMMAlgebra:
    """The powerset algebra with ``dia U = R^-1[U]`` and ``ex U = E[U]``."""
    dia = tuple(F.r_preimage(1 << w) for w in range(F.n))
    return FiniteMMAlgebra(F.n, dia, F.E)


def _first_s5_failure(A: FiniteMMAlgebra) -> Optional[tuple[str, int]]:
    for name, holds in (
        ("reflexivity", lambda i: A.ex[i] >> i & 1),
        ("transitivity", lambda i: not A.apply_ex(A.ex[i]) & ~A.ex[i]),
        ("symmetry", lambda i: all(A.ex[j] >> i & 1 for j in bits.bits(A.ex[i]))),
    ):
        for i in range(A.m):
            if not holds(i):
                return name, i
    return None


def uf_dual(A: FiniteMMAlgebra) -> MKFrame:
    """Frame of principal ultrafilters: atoms ``a R b`` iff ``a <= dia(b)``.

    ``a E b`` iff the atoms lie under exactly the same ``ex``-images.  For an S5
    operator this is ``ex(a) = ex(b)``; anything else is rejected with the
    failing axiom named.
    """
    fail = _first_s5_failure(A)
    if fail is not None:
        axiom, atom = fail
        raise AxiomFailure(axiom, f"ex is not an S5 operator: {axiom} fails at atom {atom}")
    rows = [0] * A.m
    for b in range(A.m):
        for a in bits.bits(A.dia[b]):
            rows[a] |= 1 << b
    above = [bits.from_iter(i for i in range(A.m) if A.ex[i] >> a & 1) for a in range(A.m)]
    keys: dict[int, int] = {}
    blocks = tuple(keys.setdefault(t, len(keys)) for t in above)
    return MKFrame(A.m, tuple(rows), blocks)


@dataclass
class AxiomReport:
    axiom: str
    passed: bool
    scanned: str  # "atoms" or "elements"
    failures: list[tuple[str, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "passed": self.passed,
            "scanned": self.scanned,
            "failures": [{"inequality": n, "element": bits.to_list(e)} for n, e in self.failures],
        }


def _inequalities(A: FiniteMMAlgebra, axiom: str):
    d, e, neg = A.apply_dia, A.apply_ex, A.neg
    if axiom == "modal":
        return [("dia 0 = 0", lambda a: 0, lambda a: d(0)), ("ex 0 = 0", lambda a: 0, lambda a: e(0))]
    if axiom == "S4":
        return [
            ("a <= dia a", lambda a: a, d),
            ("dia dia a <= dia a", lambda a: d(d(a)), d),
        ]
    if axiom == "S5":
        return [
            ("a <= ex a", lambda a: a, e),
            ("ex ex a <= ex a", lambda a: e(e(a)), e),
            ("a <= ~ex~ex a", lambda a: a, lambda a: neg(e(neg(e(a))))),
        ]
    if axiom == "MM":
        return [("ex dia a <= dia ex a", lambda a: e(d(a)), lambda a: d(e(a)))]
    if axiom == "Grz":
        return [("a <= dia(a & ~dia(dia a & ~a))", lambda a: a,
                 lambda a: d(a & neg(d(d(a) & neg(a)))))]
    raise ValueError(f"unknown axiom class {axiom!r}")


def check_axioms(A: FiniteMMAlgebra, axiom: str, cap: int = ELEMENT_CAP) -> AxiomReport:
    """Evaluate the inequalities of ``axiom``.

    All inequalities except Grz survive passing to joins, so they are checked on
    atoms; Grz is checked on all ``2^m`` elements.
    """
    ineqs = _inequalities(A, axiom)
    if axiom == "Grz":
        if A.m > cap:
            raise BudgetExceeded(f"element scan needs m <= {cap}, got {A.m}")
        elements = range(1 << A.m)
        scanned = "elements"
    else:
        elements = [1 << i for i in range(A.m)]
        scanned = "atoms"
    failures = []
    for a in elements:
        for name, lhs, rhs in ineqs:
            if lhs(a) & ~rhs(a):
                failures.append((name, a))
        if len(failures) >= MAX_WITNESSES:
            break
    return AxiomReport(axiom, not failures, scanned, failures)


# algebra counterparts of the frame classes
ALGEBRA_CLASSES = {
    "MS4": ("modal", "S4", "S5", "MM"),
    "MGrz": ("modal", "S4", "S5", "MM", "Grz"),
}


def algebra_in_class(A: FiniteMMAlgebra, cls: str) -> bool:
    return all(check_axioms(A, ax).passed for ax in ALGEBRA_CLASSES[cls])


def algebras_isomorphic(A: FiniteMMAlgebra, B: FiniteMMAlgebra) -> Optional[tuple[int, ...]]:
    """Atom bijection carrying both operator tables of ``A`` onto those of ``B``."""
    if A.m != B.m:
        return None
    return relational_isomorphism(A.m, (A.dia, A.ex), (B.dia, B.ex))


def algebra_from_json(m: int, dia: Sequence[Sequence[int]], ex: Sequence[Sequence[int]]) -> FiniteMMAlgebra:
    return FiniteMMAlgebra(m, tuple(bits.from_iter(s) for s in dia), tuple(bits.from_iter(s) for s in ex))


def algebra_to_json(A: FiniteMMAlgebra) -> dict:
    return {
        "atoms": A.m,
        "dia": [bits.to_list(x) for x in A.dia],
        "ex": [bits.to_list(x) for x in A.ex],
    }
