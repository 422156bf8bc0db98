"""Formulas of the hybrid languages H, H(@) and H(E).

The AST has exactly eight node kinds.  Everything else (top, or, implies,
iff, box, the universal modality) is expanded by the parser and recovered by
the printer, so semantic code only ever has to handle the core cases.

Concrete grammar, loosest binding first::

    iff      := impl ('<->' impl)*            left associative
    impl     := disj ('->' impl)?             right associative
    disj     := conj ('|' conj)*
    conj     := unary ('&' unary)*
    unary    := ('~' | '<>' | '[]' | 'E' | 'A' | '@' NOM) unary | atom
    atom     := 'bot' | 'top' | PROP | NOM | '(' iff ')'

PROP names match ``[pqr][0-9]*`` and NOM names match ``[ijk][0-9]*``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .errors import FormulaSyntaxError, LanguageError

__all__ = [
    "Bot", "Prop", "Nom", "Neg", "Conj", "Diamond", "Sat", "Exists", "Formula",
    "Lang", "Equation", "SubstitutionMap",
    "parse", "show", "expand_sugar", "sorted_substitute", "occurs",
    "props_of", "noms_of", "check_language", "language_of",
    "to_json", "from_json", "TOP", "top", "disj", "implies", "iff", "box",
    "univ", "dia_pow", "box_pow", "subformulas",
]


@dataclass(frozen=True, slots=True)
class Bot:
    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Prop:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Nom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Neg:
    child: "Formula"

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Conj:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Diamond:
    child: "Formula"

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Sat:
    """``@_nominal child``; the subscript is always a nominal name."""

    nominal: str
    child: "Formula"

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Exists:
    child: "Formula"

    def __str__(self) -> str:
        return show(self)


Formula = Union[Bot, Prop, Nom, Neg, Conj, Diamond, Sat, Exists]


class Lang(enum.Enum):
    H = "H"
    H_AT = "H_AT"
    H_E = "H_E"

    @classmethod
    def coerce(cls, value: "Lang | str") -> "Lang":
        if isinstance(value, Lang):
            return value
        aliases = {"H@": "H_AT", "H(@)": "H_AT", "H(E)": "H_E", "HE": "H_E"}
        return cls(aliases.get(value, value))


@dataclass(frozen=True)
class Equation:
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return f"{show(self.lhs)} = {show(self.rhs)}"


@dataclass(frozen=True)
class SubstitutionMap:
    """Simultaneous sorted substitution; identity outside the given keys."""

    props: Mapping[str, Formula] = field(default_factory=dict)
    noms: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for target in self.noms.values():
            if not isinstance(target, str) or not _NOM_RE.fullmatch(target):
                raise LanguageError(f"nominals must map to nominal names, got {target!r}")

    def then(self, other: "SubstitutionMap") -> "SubstitutionMap":
        """The substitution that applies ``self`` first and ``other`` second."""
        props = {p: sorted_substitute(f, other) for p, f in self.props.items()}
        for p, f in other.props.items():
            props.setdefault(p, f)
        noms = {i: other.noms.get(j, j) for i, j in self.noms.items()}
        for i, j in other.noms.items():
            noms.setdefault(i, j)
        return SubstitutionMap(props, noms)


BOT = Bot()
TOP = Neg(BOT)


def top() -> Formula:
    return TOP


def implies(a: Formula, b: Formula) -> Formula:
    return Neg(Conj(a, Neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Neg(Conj(Neg(a), Neg(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return Conj(implies(a, b), implies(b, a))


def box(a: Formula) -> Formula:
    return Neg(Diamond(Neg(a)))


def univ(a: Formula) -> Formula:
    return Neg(Exists(Neg(a)))


def dia_pow(n: int, a: Formula) -> Formula:
    for _ in range(n):
        a = Diamond(a)
    return a


def box_pow(n: int, a: Formula) -> Formula:
    for _ in range(n):
        a = box(a)
    return a


# --------------------------------------------------------------------------
# tokenizer / parser

_PROP_RE = re.compile(r"[pqr][0-9]*")
_NOM_RE = re.compile(r"[ijk][0-9]*")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><->|->|<>|\[\]|[~&|()@])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise FormulaSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = "op" if m.group("op") else "ident"
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, lang: Lang):
        self.tokens = _tokenize(text)
        self.i = 0
        self.lang = lang

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, tok, pos = self.take()
        if tok != value or kind == "end":
            raise FormulaSyntaxError(f"expected {value!r}, found {tok or 'end of input'!r}", pos)

    def parse(self) -> Formula:
        f = self.iff()
        kind, tok, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected {tok!r}", pos)
        return f

    def iff(self) -> Formula:
        f = self.impl()
        while self.peek()[1] == "<->" and self.peek()[0] == "op":
            self.take()
            f = iff(f, self.impl())
        return f

    def impl(self) -> Formula:
        f = self.disj()
        if self.peek()[1] == "->" and self.peek()[0] == "op":
            self.take()
            return implies(f, self.impl())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|" and self.peek()[0] == "op":
            self.take()
            f = disj(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&" and self.peek()[0] == "op":
            self.take()
            f = Conj(f, self.unary())
        return f

    def _gate(self, needed: Lang, what: str, pos: int) -> None:
        if self.lang is not needed:
            raise LanguageError(f"{what} at position {pos} is not part of {self.lang.value}")

    def unary(self) -> Formula:
        kind, tok, pos = self.peek()
        if kind == "op":
            if tok == "~":
                self.take()
                return Neg(self.unary())
            if tok == "<>":
                self.take()
                return Diamond(self.unary())
            if tok == "[]":
                self.take()
                return box(self.unary())
            if tok == "@":
                self.take()
                self._gate(Lang.H_AT, "'@'", pos)
                nkind, name, npos = self.take()
                if nkind != "ident" or not _NOM_RE.fullmatch(name):
                    raise FormulaSyntaxError("'@' must be followed by a nominal", npos)
                return Sat(name, self.unary())
            if tok == "(":
                self.take()
                f = self.iff()
                self.expect(")")
                return f
        if kind == "ident":
            if tok == "E":
                self.take()
                self._gate(Lang.H_E, "'E'", pos)
                return Exists(self.unary())
            if tok == "A":
                self.take()
                self._gate(Lang.H_E, "'A'", pos)
                return univ(self.unary())
            return self.atom()
        raise FormulaSyntaxError(f"unexpected {tok or 'end of input'!r}", pos)

    def atom(self) -> Formula:
        _, tok, pos = self.take()
        if tok == "bot":
            return BOT
        if tok == "top":
            return TOP
        if _PROP_RE.fullmatch(tok):
            return Prop(tok)
        if _NOM_RE.fullmatch(tok):
            return Nom(tok)
        raise FormulaSyntaxError(f"unknown symbol {tok!r}", pos)


def parse(text: str, lang: "Lang | str" = Lang.H) -> Formula:
    """Parse ``text`` as a formula of ``lang``."""
    if not text or not text.strip():
        raise FormulaSyntaxError("empty formula", 0)
    return _Parser(text, Lang.coerce(lang)).parse()


def expand_sugar(source: "str | Formula", lang: "Lang | str" = Lang.H_E) -> Formula:
    """Core AST for ``source``.  Core ASTs are returned unchanged (idempotence)."""
    if isinstance(source, str):
        lang = Lang.coerce(lang)
        try:
            return parse(source, lang)
        except LanguageError:
            # sugar expansion is language-neutral; fall back to the richer language
            return parse(source, Lang.H_AT if lang is Lang.H_E else Lang.H_E)
    return source


# --------------------------------------------------------------------------
# printing


def _is_impl(f: Formula):
    if isinstance(f, Neg) and isinstance(f.child, Conj) and isinstance(f.child.right, Neg):
        return f.child.left, f.child.right.child
    return None


def show(f: Formula, sugar: bool = True) -> str:
    """Print ``f`` so that ``parse(show(f), lang) == f``."""
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, (Prop, Nom)):
        return f.name
    if isinstance(f, Neg):
        c = f.child
        if sugar:
            if isinstance(c, Bot):
                return "top"
            if isinstance(c, Diamond) and isinstance(c.child, Neg):
                return "[]" + show(c.child.child, sugar)
            if isinstance(c, Exists) and isinstance(c.child, Neg):
                return "A " + show(c.child.child, sugar)
            if isinstance(c, Conj) and isinstance(c.left, Neg) and isinstance(c.right, Neg):
                return f"({show(c.left.child, sugar)} | {show(c.right.child, sugar)})"
            pair = _is_impl(f)
            if pair:
                return f"({show(pair[0], sugar)} -> {show(pair[1], sugar)})"
        return "~" + show(c, sugar)
    if isinstance(f, Conj):
        if sugar:
            l, r = _is_impl(f.left), _is_impl(f.right)
            if l and r and l[0] == r[1] and l[1] == r[0]:
                return f"({show(l[0], sugar)} <-> {show(l[1], sugar)})"
        return f"({show(f.left, sugar)} & {show(f.right, sugar)})"
    if isinstance(f, Diamond):
        return "<>" + show(f.child, sugar)
    if isinstance(f, Sat):
        return f"@{f.nominal} " + show(f.child, sugar)
    if isinstance(f, Exists):
        return "E " + show(f.child, sugar)
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# traversal, substitution, occurrence


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, Conj):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, (Neg, Diamond, Sat, Exists)):
            stack.append(g.child)


def props_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Prop)}


def noms_of(f: Formula) -> set[str]:
    """Nominal names in ``f``, including @ subscripts."""
    out = set()
    for g in subformulas(f):
        if isinstance(g, Nom):
            out.add(g.name)
        elif isinstance(g, Sat):
            out.add(g.nominal)
    return out


def occurs(symbol: str, f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, (Prop, Nom)) and g.name == symbol:
            return True
        if isinstance(g, Sat) and g.nominal == symbol:
            return True
    return False


def language_of(f: Formula) -> Lang:
    """Smallest language tag admitting ``f``; LanguageError if it mixes @ and E."""
    has_sat = has_e = False
    for g in subformulas(f):
        has_sat |= isinstance(g, Sat)
        has_e |= isinstance(g, Exists)
    if has_sat and has_e:
        raise LanguageError("formula uses both @ and E")
    return Lang.H_AT if has_sat else Lang.H_E if has_e else Lang.H


def check_language(f: Formula, lang: "Lang | str") -> None:
    lang = Lang.coerce(lang)
    for g in subformulas(f):
        if isinstance(g, Sat) and lang is not Lang.H_AT:
            raise LanguageError(f"@ is not part of {lang.value}")
        if isinstance(g, Exists) and lang is not Lang.H_E:
            raise LanguageError(f"E is not part of {lang.value}")


def sorted_substitute(f: Formula, sigma: SubstitutionMap) -> Formula:
    props, noms = sigma.props, sigma.noms
    if not props and not noms:
        return f

    def go(g: Formula) -> Formula:
        if isinstance(g, Prop):
            return props.get(g.name, g)
        if isinstance(g, Nom):
            return Nom(noms.get(g.name, g.name))
        if isinstance(g, Bot):
            return g
        if isinstance(g, Neg):
            return Neg(go(g.child))
        if isinstance(g, Conj):
            return Conj(go(g.left), go(g.right))
        if isinstance(g, Diamond):
            return Diamond(go(g.child))
        if isinstance(g, Sat):
            return Sat(noms.get(g.nominal, g.nominal), go(g.child))
        if isinstance(g, Exists):
            return Exists(go(g.child))
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


# --------------------------------------------------------------------------
# JSON form


def to_json(f: Formula) -> dict:
    if isinstance(f, Bot):
        return {"kind": "bot"}
    if isinstance(f, Prop):
        return {"kind": "prop", "name": f.name}
    if isinstance(f, Nom):
        return {"kind": "nom", "name": f.name}
    if isinstance(f, Neg):
        return {"kind": "neg", "args": [to_json(f.child)]}
    if isinstance(f, Conj):
        return {"kind": "conj", "args": [to_json(f.left), to_json(f.right)]}
    if isinstance(f, Diamond):
        return {"kind": "diamond", "args": [to_json(f.child)]}
    if isinstance(f, Sat):
        return {"kind": "sat", "nominal": f.nominal, "args": [to_json(f.child)]}
    if isinstance(f, Exists):
        return {"kind": "exists", "args": [to_json(f.child)]}
    raise TypeError(f"not a formula: {f!r}")


_UNARY = {"neg": Neg, "diamond": Diamond, "exists": Exists}


def from_json(obj: Mapping) -> Formula:
    kind = obj.get("kind")
    if kind == "bot":
        return BOT
    if kind == "prop":
        return Prop(obj["name"])
    if kind == "nom":
        return Nom(obj["name"])
    args = [from_json(a) for a in obj.get("args", [])]
    if kind in _UNARY and len(args) == 1:
        return _UNARY[kind](args[0])
    if kind == "conj" and len(args) == 2:
        return Conj(args[0], args[1])
    if kind == "sat" and len(args) == 1:
        return Sat(obj["nominal"], args[0])
    raise ValueError(f"malformed formula JSON: {obj!r}")
