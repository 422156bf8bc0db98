"""Assignments, meaning of formulas and truth of equations on finite structures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from hybrix import kernels
from hybrix.algebra import FiniteBAO, HybridStructure, Kind, all_baos, bits, hybrid
from hybrix.errors import AlgebraMismatch, BudgetExceeded, LanguageError, UnboundSymbol
from hybrix.syntax import (
    TOP,
    Bot,
    Conj,
    Diamond,
    Equation,
    Exists,
    Formula,
    Neg,
    Nom,
    Prop,
    Sat,
    noms_of,
    props_of,
)

DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class Assignment:
    """Values of propositional variables and nominals (elements as bitmasks)."""

    props: Mapping[str, int] = field(default_factory=dict)
    noms: Mapping[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "props": {p: bits(v) for p, v in sorted(self.props.items())},
            "noms": {i: bits(v) for i, v in sorted(self.noms.items())},
        }

    @classmethod
    def from_json(cls, obj: Mapping, bao: FiniteBAO) -> "Assignment":
        from hybrix.algebra import element_from_json

        return cls({p: element_from_json(v, bao) for p, v in obj.get("props", {}).items()},
                   {i: element_from_json(v, bao) for i, v in obj.get("noms", {}).items()})


def _reject_exists(phi: Formula) -> None:
    stack = [phi]
    while stack:
        g = stack.pop()
        if isinstance(g, Exists):
            raise LanguageError("E has no algebraic semantics; use the relational module")
        if isinstance(g, Conj):
            stack += [g.left, g.right]
        elif isinstance(g, (Neg, Diamond, Sat)):
            stack.append(g.child)


def _has_sat(phi: Formula) -> bool:
    stack = [phi]
    while stack:
        g = stack.pop()
        if isinstance(g, Sat):
            return True
        if isinstance(g, Conj):
            stack += [g.left, g.right]
        elif isinstance(g, (Neg, Diamond, Exists)):
            stack.append(g.child)
    return False


class Compiled:
    """A formula pair compiled against one structure, ready for the kernels."""

    def __init__(self, h: HybridStructure, formulas: Sequence[Formula]):
        for f in formulas:
            _reject_exists(f)
            if h.kind in (Kind.GROUNDED, Kind.DEGENERATE) and _has_sat(f):
                raise LanguageError(f"@ is not interpreted on {h.kind.value} structures")
        self.h = h
        props: set[str] = set()
        noms: set[str] = set()
        for f in formulas:
            props |= props_of(f)
            noms |= noms_of(f)
        self.props = sorted(props)
        self.noms = [] if h.kind is Kind.ORTHODOX else sorted(noms)
        self.index = {name: i for i, name in enumerate(self.props + self.noms)}
        self.explicit_at = bool(h.at_table)
        self.programs = [self._compile(f) for f in formulas]
        self.attable = h.at_flat()

    def _first(self, name: str, out: list) -> None:
        if self.h.kind is Kind.ORTHODOX:
            out += (kernels.OP_CONST, self.h.constant(name))
        else:
            out += (kernels.OP_VAR, self.index[name])

    def _compile(self, f: Formula) -> list[int]:
        out: list[int] = []

        def go(g):
            if isinstance(g, Bot):
                out.extend((kernels.OP_BOT, 0))
            elif isinstance(g, Prop):
                out.extend((kernels.OP_VAR, self.index[g.name]))
            elif isinstance(g, Nom):
                self._first(g.name, out)
            elif isinstance(g, Neg):
                go(g.child)
                out.extend((kernels.OP_NEG, 0))
            elif isinstance(g, Conj):
                go(g.left)
                go(g.right)
                out.extend((kernels.OP_AND, 0))
            elif isinstance(g, Diamond):
                go(g.child)
                out.extend((kernels.OP_DIA, 0))
            elif isinstance(g, Sat):
                self._first(g.nominal, out)
                go(g.child)
                out.extend((kernels.OP_SATT if self.explicit_at else kernels.OP_SAT, 0))
            else:
                raise TypeError(f"not a formula: {g!r}")

        go(f)
        return out

    def domains(self) -> list[list[int]]:
        h = self.h
        elems = list(h.bao.elements())
        nom_range = [] if h.kind is Kind.ORTHODOX else h.nominal_range()
        return [elems] * len(self.props) + [nom_range] * len(self.noms)

    def values(self, v: Assignment) -> list[int]:
        h = self.h
        out = []
        for p in self.props:
            if p not in v.props:
                raise UnboundSymbol(p)
            h.bao.check(v.props[p])
            out.append(v.props[p])
        if self.noms:
            allowed = set(h.nominal_range())
            for i in self.noms:
                if i not in v.noms:
                    raise UnboundSymbol(i)
                if v.noms[i] not in allowed:
                    raise AlgebraMismatch(f"nominal {i} must denote one of {[bits(a) for a in sorted(allowed)]}")
                out.append(v.noms[i])
        return out

    def assignment(self, vals: Sequence[int]) -> Assignment:
        n = len(self.props)
        return Assignment(dict(zip(self.props, vals[:n])), dict(zip(self.noms, vals[n:])))

    def count(self) -> int:
        total = 1
        for d in self.domains():
            total *= len(d)
        return total

    def run(self, which: int, vals: Sequence[int]) -> int:
        bao = self.h.bao
        return kernels.evaluate(self.programs[which], list(vals), bao.diamond_table, bao.top, self.attable)


def meaning(h: HybridStructure, v: Assignment, phi: Formula) -> int:
    """The element denoted by ``phi`` under ``v``."""
    c = Compiled(h, [phi])
    return c.run(0, c.values(v))


@dataclass(frozen=True)
class EquationResult:
    holds: bool
    falsifier: Optional[Assignment] = None
    assignments: int = 0

    def __bool__(self) -> bool:
        return self.holds


def _as_equation(eq) -> Equation:
    if isinstance(eq, Equation):
        return eq
    return Equation(eq, TOP)


def equation_true(h: HybridStructure, eq, budget: int = DEFAULT_BUDGET) -> EquationResult:
    """Whether ``eq`` holds under every assignment; a bare formula means ``phi = top``.

    Assignments are enumerated in lexicographic order of the sorted variables
    (propositional variables first, then nominals, the last varying fastest)
    and the first falsifier is reported.
    """
    eq = _as_equation(eq)
    c = Compiled(h, [eq.lhs, eq.rhs])
    total = c.count()
    if total > budget:
        raise BudgetExceeded(f"{total} assignments exceed the budget of {budget}")
    bao = h.bao
    found = kernels.find_falsifier(c.programs[0], c.programs[1], c.domains(), bao.diamond_table, bao.top, c.attable)
    if found is None:
        return EquationResult(True, None, total)
    return EquationResult(False, c.assignment(found), total)


def validates_theory(h: HybridStructure, sigma: Iterable[Formula], budget: int = DEFAULT_BUDGET) -> bool:
    """Truth of every ``phi = top`` for ``phi`` in ``sigma``."""
    return all(equation_true(h, Equation(phi, TOP), budget).holds for phi in sigma)


def all_assignments(h: HybridStructure, formulas: Sequence[Formula]):
    """Every assignment to the symbols of ``formulas``, in enumeration order."""
    c = Compiled(h, list(formulas))
    for vals in itertools.product(*c.domains()):
        yield c.assignment(vals)


@dataclass(frozen=True)
class Countermodel:
    structure: HybridStructure
    assignment: Assignment


def countermodel_search(eq, max_atoms: int = 2, budget: int = DEFAULT_BUDGET) -> Optional[Countermodel]:
    """First hybrid algebra (by atom count, operator table, designated mask) refuting ``eq``."""
    eq = _as_equation(eq)
    for k in range(1, max_atoms + 1):
        for bao in all_baos(k):
            for xmask in range(1, 1 << k):
                h = hybrid(bao, bits(xmask))
                res = equation_true(h, eq, budget)
                if not res.holds:
                    return Countermodel(h, res.falsifier)
    return None
