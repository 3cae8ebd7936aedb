"""Formulas of the bimodal language with ``<>``/``[]`` and ``E``/``A``.

Concrete syntax (ASCII)::

    formula := disj ( "->" formula )?          right associative
    disj    := conj ( "|" conj )*
    conj    := unary ( "&" unary )*
    unary   := ( "~" | "<>" | "[]" | "E" | "A" ) unary | atom
    atom    := letter | "T" | "F" | "(" formula ")"
    letter  := [a-z][a-z0-9_]*

Derived connectives are kept as their own nodes; nothing is rewritten.
The one-variable predicate translation lives here as well.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import FormulaSyntaxError

LETTER_RE = re.compile(r"[a-z][a-z0-9_]*")


@dataclass(frozen=True)
class Letter:
    name: str

    def __post_init__(self) -> None:
        if not LETTER_RE.fullmatch(self.name):
            raise ValueError(f"bad letter name {self.name!r}")


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Dia:
    sub: "Formula"


@dataclass(frozen=True)
class Box:
    sub: "Formula"


@dataclass(frozen=True)
class Ex:
    sub: "Formula"


@dataclass(frozen=True)
class Fa:
    sub: "Formula"


Formula = Union[Letter, Top, Bot, Not, And, Or, Impl, Dia, Box, Ex, Fa]

UNARY = (Not, Dia, Box, Ex, Fa)
BINARY = (And, Or, Impl)

_UNARY_TOKEN = {"~": Not, "<>": Dia, "[]": Box, "E": Ex, "A": Fa}
_UNARY_TEXT = {Not: "~", Dia: "<>", Box: "[]", Ex: "E", Fa: "A"}
_BINARY_TEXT = {And: "&", Or: "|", Impl: "->"}
_PREC = {Impl: 1, Or: 2, And: 3}
_ATOM_PREC = 5
_UNARY_PREC = 4


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, UNARY):
        return (f.sub,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(f))


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in children(f)), default=0)


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(->|<>|\[\]|[~&|()ETFA])|([a-z][a-z0-9_]*))")
_START = frozenset({"~", "<>", "[]", "E", "A", "T", "F", "(", "letter"})
_EOF = "end of input"


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(
                f"unexpected character {text[pos]!r}", _byte_offset(text, pos), _START
            )
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            tokens.append((m.group(1), m.group(1), _byte_offset(text, start)))
        else:
            tokens.append(("letter", m.group(2), _byte_offset(text, start)))
        pos = m.end()
    tokens.append((_EOF, "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: frozenset[str]) -> FormulaSyntaxError:
        kind, value, offset = self.tokens[self.i]
        shown = _EOF if kind == _EOF else repr(value)
        return FormulaSyntaxError(f"unexpected {shown}", offset, expected)

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.advance()
            return Impl(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind = self.peek()
        if kind in _UNARY_TOKEN:
            self.advance()
            return _UNARY_TOKEN[kind](self.unary())
        if kind == "letter":
            return Letter(self.advance()[1])
        if kind == "T":
            self.advance()
            return Top()
        if kind == "F":
            self.advance()
            return Bot()
        if kind == "(":
            self.advance()
            f = self.formula()
            if self.peek() != ")":
                raise self.fail(frozenset({")", "&", "|", "->"}))
            self.advance()
            return f
        raise self.fail(_START)


def parse_formula(text: str) -> Formula:
    """Parse ``text``; raises :class:`FormulaSyntaxError` with a byte offset."""
    parser = _Parser(text)
    f = parser.formula()
    if parser.peek() != _EOF:
        raise parser.fail(frozenset({"&", "|", "->", _EOF}))
    return f


# --------------------------------------------------------------------------
# printing


def _prec(f) -> int:
    if isinstance(f, BINARY) or isinstance(f, _PBINARY):
        return _PREC[_BIN_KIND[type(f)]]
    if isinstance(f, UNARY) or isinstance(f, _PUNARY):
        return _UNARY_PREC
    return _ATOM_PREC


def render_formula(f: Formula) -> str:
    """Print with the fewest parentheses that still parse back to ``f``."""
    if isinstance(f, Letter):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, UNARY):
        inner = render_formula(f.sub)
        if _prec(f.sub) < _UNARY_PREC:
            inner = f"({inner})"
        return _UNARY_TEXT[type(f)] + inner
    return _render_binary(f, _BINARY_TEXT[type(f)], render_formula)


def _render_binary(f, op: str, render) -> str:
    p = _prec(f)
    left, right = render(f.left), render(f.right)
    right_assoc = _BIN_KIND[type(f)] is Impl
    lp, rp = _prec(f.left), _prec(f.right)
    if lp < p or (lp == p and right_assoc):
        left = f"({left})"
    if rp < p or (rp == p and not right_assoc):
        right = f"({right})"
    return f"{left} {op} {right}"


# --------------------------------------------------------------------------
# analysis


def subformula_closure(f: Formula) -> tuple[Formula, ...]:
    """Subformulas of ``f`` in post-order, keeping first occurrences."""
    seen: dict[Formula, None] = {}

    def visit(g: Formula) -> None:
        for c in children(g):
            visit(c)
        if g not in seen:
            seen[g] = None

    visit(f)
    return tuple(seen)


def letters(f: Formula) -> frozenset[str]:
    if isinstance(f, Letter):
        return frozenset({f.name})
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= letters(c)
    return out


def iter_nodes(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from iter_nodes(c)


def has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, (Ex, Fa)) for g in iter_nodes(f))


def formula_to_json(f: Formula) -> dict:
    if isinstance(f, Letter):
        return {"letter": f.name}
    if isinstance(f, (Top, Bot)):
        return {"const": "T" if isinstance(f, Top) else "F"}
    return {"op": type(f).__name__.lower(), "args": [formula_to_json(c) for c in children(f)]}


# --------------------------------------------------------------------------
# one-variable predicate formulas


@dataclass(frozen=True)
class Pred:
    """Monadic atom ``name(x)``; ``name`` is ``<letter>*``."""

    name: str


@dataclass(frozen=True)
class PTop:
    pass


@dataclass(frozen=True)
class PBot:
    pass


@dataclass(frozen=True)
class PNot:
    sub: "PredicateFormula"


@dataclass(frozen=True)
class PAnd:
    left: "PredicateFormula"
    right: "PredicateFormula"


@dataclass(frozen=True)
class POr:
    left: "PredicateFormula"
    right: "PredicateFormula"


@dataclass(frozen=True)
class PImpl:
    left: "PredicateFormula"
    right: "PredicateFormula"


@dataclass(frozen=True)
class PDia:
    sub: "PredicateFormula"


@dataclass(frozen=True)
class PBox:
    sub: "PredicateFormula"


@dataclass(frozen=True)
class ExX:
    sub: "PredicateFormula"


@dataclass(frozen=True)
class FaX:
    sub: "PredicateFormula"


PredicateFormula = Union[Pred, PTop, PBot, PNot, PAnd, POr, PImpl, PDia, PBox, ExX, FaX]

_PUNARY = (PNot, PDia, PBox, ExX, FaX)
_PBINARY = (PAnd, POr, PImpl)
_BIN_KIND = {And: And, Or: Or, Impl: Impl, PAnd: And, POr: Or, PImpl: Impl}
_P_UNARY_TEXT = {PNot: "~", PDia: "<>", PBox: "[]", ExX: "Ex x. ", FaX: "Fa x. "}
_P_BINARY_TEXT = {PAnd: "&", POr: "|", PImpl: "->"}

_TRANSLATE = {
    Not: PNot, And: PAnd, Or: POr, Impl: PImpl, Dia: PDia, Box: PBox, Ex: ExX, Fa: FaX,
}


def translate_t(f: Formula) -> PredicateFormula:
    """Translate into the one-variable predicate language: ``p`` becomes ``p*(x)``,
    ``E``/``A`` become quantifiers over the single variable ``x``."""
    if isinstance(f, Letter):
        return Pred(f.name + "*")
    if isinstance(f, Top):
        return PTop()
    if isinstance(f, Bot):
        return PBot()
    cls = _TRANSLATE[type(f)]
    return cls(*(translate_t(c) for c in children(f)))


def pchildren(g: PredicateFormula) -> tuple[PredicateFormula, ...]:
    if isinstance(g, _PUNARY):
        return (g.sub,)
    if isinstance(g, _PBINARY):
        return (g.left, g.right)
    return ()


def free_x(g: PredicateFormula) -> bool:
    """Whether ``x`` occurs free in ``g``."""
    if isinstance(g, Pred):
        return True
    if isinstance(g, (ExX, FaX)):
        return False
    return any(free_x(c) for c in pchildren(g))


def predicates(g: PredicateFormula) -> frozenset[str]:
    if isinstance(g, Pred):
        return frozenset({g.name})
    out: frozenset[str] = frozenset()
    for c in pchildren(g):
        out |= predicates(c)
    return out


def render_predicate(g: PredicateFormula) -> str:
    if isinstance(g, Pred):
        return f"{g.name}(x)"
    if isinstance(g, PTop):
        return "T"
    if isinstance(g, PBot):
        return "F"
    if isinstance(g, _PUNARY):
        inner = render_predicate(g.sub)
        if _prec(g.sub) < _UNARY_PREC:
            inner = f"({inner})"
        op = _P_UNARY_TEXT[type(g)]
        if isinstance(g.sub, (ExX, FaX)) and not op.endswith(" "):
            op += " "
        return op + inner
    return _render_binary(g, _P_BINARY_TEXT[type(g)], render_predicate)
