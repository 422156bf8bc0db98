"""Finite Boolean algebras with an operator, hybrid structures and their arithmetic.

A finite Boolean algebra with ``k`` atoms is the powerset of ``{0, .., k-1}``.
Elements are ints used as bitmasks: bit ``y`` set means atom ``y`` is below the
element, so atom ``y`` itself is ``1 << y``, bottom is ``0`` and top is
``(1 << k) - 1``.  The operator is stored by its value on atoms and extended
additively.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from hybrix import kernels
from hybrix.errors import AlgebraMismatch, KindError, NotDesignated, StructureError

MAX_ATOMS = 20


def bits(a: int) -> list[int]:
    """Indices of the atoms below ``a``, ascending."""
    out = []
    while a:
        low = a & -a
        out.append(low.bit_length() - 1)
        a ^= low
    return out


def mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def is_atom_mask(a: int) -> bool:
    return a != 0 and a & (a - 1) == 0


def _converse(on_atoms: Sequence[int], k: int) -> tuple[int, ...]:
    # atom y lies below the converse diamond of x  iff  x lies below diamond y
    return tuple(mask(y for y in range(k) if on_atoms[y] >> x & 1) for x in range(k))


@dataclass(frozen=True)
class FiniteBAO:
    """Powerset algebra on ``k`` atoms with a normal additive operator.

    ``on_atoms[y]`` is the value of the diamond on atom ``y``.  The derived atom
    relation is ``x R y iff x <= diamond(y)``.
    """

    k: int
    on_atoms: tuple[int, ...]
    _dtable: tuple = field(init=False, repr=False, compare=False)
    _itable: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise StructureError("an algebra needs at least one atom")
        if self.k > MAX_ATOMS:
            raise StructureError(f"at most {MAX_ATOMS} atoms are supported")
        on_atoms = tuple(int(v) for v in self.on_atoms)
        if len(on_atoms) != self.k:
            raise StructureError(f"diamond needs one value per atom ({self.k}), got {len(on_atoms)}")
        top = (1 << self.k) - 1
        for v in on_atoms:
            if v < 0 or v & ~top:
                raise AlgebraMismatch(f"diamond value {v} is not an element")
        object.__setattr__(self, "on_atoms", on_atoms)
        object.__setattr__(self, "_dtable", tuple(kernels.diamond_table(on_atoms, self.k)))
        inverse = _converse(on_atoms, self.k)
        object.__setattr__(self, "_itable", tuple(kernels.diamond_table(inverse, self.k)))

    # construction -----------------------------------------------------------

    @classmethod
    def from_relation(cls, k: int, pairs: Iterable[tuple[int, int]]) -> "FiniteBAO":
        """Algebra whose atom relation is ``pairs`` (``(x, y)`` means ``x <= diamond y``)."""
        on = [0] * k
        for x, y in pairs:
            on[y] |= 1 << x
        return cls(k, tuple(on))

    @classmethod
    def from_lists(cls, diamond: Sequence[Sequence[int]]) -> "FiniteBAO":
        return cls(len(diamond), tuple(mask(row) for row in diamond))

    @classmethod
    def identity(cls, k: int) -> "FiniteBAO":
        return cls(k, tuple(1 << y for y in range(k)))

    # carrier ---------------------------------------------------------------

    @property
    def top(self) -> int:
        return (1 << self.k) - 1

    @property
    def bottom(self) -> int:
        return 0

    @property
    def size(self) -> int:
        return 1 << self.k

    def elements(self) -> range:
        return range(self.size)

    def atoms(self) -> list[int]:
        return [1 << y for y in range(self.k)]

    def check(self, *elems: int) -> None:
        top = self.top
        for a in elems:
            if not isinstance(a, int) or a < 0 or a & ~top:
                raise AlgebraMismatch(f"{a!r} is not an element of a {self.k}-atom algebra")

    def is_atom(self, a: int) -> bool:
        self.check(a)
        return is_atom_mask(a)

    def atoms_below(self, a: int) -> list[int]:
        self.check(a)
        return [1 << y for y in bits(a)]

    # Boolean arithmetic ------------------------------------------------------

    def meet(self, a: int, b: int) -> int:
        self.check(a, b)
        return a & b

    def join(self, a: int, b: int) -> int:
        self.check(a, b)
        return a | b

    def complement(self, a: int) -> int:
        self.check(a)
        return self.top ^ a

    def leq(self, a: int, b: int) -> bool:
        self.check(a, b)
        return a & ~b == 0

    # operators -------------------------------------------------------------

    def diamond(self, b: int) -> int:
        self.check(b)
        return self._dtable[b]

    def box(self, b: int) -> int:
        self.check(b)
        return self.top ^ self._dtable[self.top ^ b]

    def diamond_inv(self, b: int) -> int:
        """Converse diamond; the left adjoint of ``box``."""
        self.check(b)
        return self._itable[b]

    def box_inv(self, b: int) -> int:
        """Converse box; the right adjoint of ``diamond``."""
        self.check(b)
        return self.top ^ self._itable[self.top ^ b]

    def diamond_pow(self, b: int, n: int) -> int:
        for _ in range(n):
            b = self.diamond(b)
        return b

    def box_pow(self, b: int, n: int) -> int:
        for _ in range(n):
            b = self.box(b)
        return b

    def diamond_inv_pow(self, b: int, n: int) -> int:
        for _ in range(n):
            b = self.diamond_inv(b)
        return b

    @property
    def diamond_table(self) -> tuple[int, ...]:
        return self._dtable

    @property
    def inverse_table(self) -> tuple[int, ...]:
        return self._itable

    def relation(self) -> frozenset[tuple[int, int]]:
        return frozenset((x, y) for y in range(self.k) for x in bits(self.on_atoms[y]))

    def pointwise_box_inv(self, b: int) -> int:
        """Right adjoint of diamond via the join of all ``a`` with ``diamond(a) <= b``."""
        out = 0
        for a in self.elements():
            if self._dtable[a] & ~b == 0:
                out |= a
        return out

    def pointwise_diamond_inv(self, b: int) -> int:
        """Left adjoint of box via the meet of all ``a`` with ``b <= box(a)``."""
        out = self.top
        for a in self.elements():
            if b & ~self.box(a) == 0:
                out &= a
        return out

    def power_tables(self) -> list[tuple[int, ...]]:
        """Distinct tables of diamond^0, diamond^1, ... until the first repeat.

        Every power diamond^n equals one of the returned tables.
        """
        seen = {}
        tables = []
        current = tuple(range(self.size))
        while current not in seen:
            seen[current] = len(tables)
            tables.append(current)
            current = tuple(self._dtable[v] for v in current)
        return tables

    def power_horizon(self) -> int:
        """Index ``r`` such that diamond^r repeats an earlier power; exponents 0..r cover all behaviour."""
        return len(self.power_tables())

    # JSON ------------------------------------------------------------------

    def diamond_lists(self) -> list[list[int]]:
        return [bits(v) for v in self.on_atoms]


def all_baos(k: int) -> Iterator[FiniteBAO]:
    """Every operator on the ``k``-atom algebra, in lexicographic order of the atom table."""
    for table in itertools.product(range(1 << k), repeat=k):
        yield FiniteBAO(k, table)


class Kind(str, enum.Enum):
    HYBRID = "hybrid"
    GROUNDED = "grounded"
    DEGENERATE = "degenerate"
    ORTHODOX = "orthodox"


def _freeze_pairs(items) -> tuple:
    if items is None:
        return ()
    if isinstance(items, Mapping):
        items = items.items()
    return tuple(sorted((k, v) for k, v in items))


@dataclass(frozen=True)
class HybridStructure:
    """A finite BAO together with a way of interpreting nominals.

    * ``hybrid``: nominals range over the designated atoms (nonempty).
    * ``grounded``: nominals range over the designated atoms and bottom.
    * ``degenerate``: no designated atoms.
    * ``orthodox``: nominals are constants; ``constants`` lists them and every
      other nominal denotes ``default_constant`` (top unless given).

    ``designated`` holds atom indices.  ``at_table`` optionally gives an @
    operator explicitly as ``(first, row)`` pairs where ``row[a]`` is the value
    of ``@_first a``; without it @ is the canonical two-valued operator.
    """

    bao: FiniteBAO
    designated: frozenset = frozenset()
    kind: Kind = Kind.HYBRID
    constants: tuple = ()
    default_constant: Optional[int] = None
    at_table: tuple = ()

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        designated = frozenset(int(x) for x in self.designated)
        object.__setattr__(self, "designated", designated)
        object.__setattr__(self, "constants", _freeze_pairs(self.constants))
        object.__setattr__(self, "at_table", tuple(sorted((f, tuple(r)) for f, r in _freeze_pairs(self.at_table))))
        bao = self.bao
        for x in designated:
            if not 0 <= x < bao.k:
                raise StructureError(f"designated atom index {x} out of range")
        if kind is Kind.HYBRID and not designated:
            raise StructureError("a hybrid algebra needs at least one designated atom")
        if kind is Kind.DEGENERATE and designated:
            raise StructureError("a degenerate structure has no designated atoms")
        if kind is Kind.ORTHODOX:
            if self.default_constant is None:
                object.__setattr__(self, "default_constant", bao.top)
            bao.check(self.default_constant, *(v for _, v in self.constants))
        elif self.constants or self.default_constant is not None:
            raise StructureError("constants are only meaningful for orthodox structures")
        if self.at_table:
            if kind in (Kind.GROUNDED, Kind.DEGENERATE):
                raise KindError(f"@ is not defined on {kind.value} structures")
            firsts = {f for f, _ in self.at_table}
            required = set(self.at_firsts())
            if not required <= firsts:
                raise StructureError("at_table must give a row for every possible first argument")
            for f, row in self.at_table:
                if len(row) != bao.size:
                    raise StructureError("every at_table row needs one entry per element")
                bao.check(f, *row)

    # nominal interpretation --------------------------------------------------

    @property
    def designated_mask(self) -> int:
        return mask(self.designated)

    def nominal_range(self) -> list[int]:
        """Elements a nominal may denote (not used for orthodox structures)."""
        atoms = [1 << x for x in sorted(self.designated)]
        if self.kind is Kind.GROUNDED:
            return [0] + atoms
        if self.kind is Kind.ORTHODOX:
            raise KindError("orthodox structures interpret nominals as constants")
        return atoms

    def constant(self, name: str) -> int:
        if self.kind is not Kind.ORTHODOX:
            raise KindError("only orthodox structures have constants")
        return dict(self.constants).get(name, self.default_constant)

    def constant_values(self) -> list[int]:
        """Distinct constants, including the default one."""
        vals = {v for _, v in self.constants}
        vals.add(self.default_constant)
        return sorted(vals)

    def at_firsts(self) -> list[int]:
        """Elements that may appear as the first argument of @."""
        if self.kind is Kind.ORTHODOX:
            return self.constant_values()
        return [1 << x for x in sorted(self.designated)]

    def at(self, x: int, a: int) -> int:
        """Value of ``@_x a`` (explicit table if present, canonical otherwise)."""
        self.bao.check(x, a)
        if x not in self.at_firsts():
            raise NotDesignated(f"{bits(x)} is not a possible first argument of @")
        if self.at_table:
            return dict(self.at_table)[x][a]
        return self.bao.top if x & ~a == 0 else 0

    def at_flat(self) -> Optional[list[int]]:
        """Explicit @ table flattened to ``first * size + a`` for the kernels."""
        if not self.at_table:
            return None
        size = self.bao.size
        flat = [0] * (size * size)
        for f, row in self.at_table:
            flat[f * size: (f + 1) * size] = row
        return flat

    def with_at_table(self, rows: Mapping[int, Sequence[int]]) -> "HybridStructure":
        return HybridStructure(self.bao, self.designated, self.kind, self.constants,
                               self.default_constant if self.kind is Kind.ORTHODOX else None, tuple(rows.items()))

    def describe(self) -> str:
        rel = sorted(self.bao.relation())
        return f"{self.kind.value}(k={self.bao.k}, R={rel}, X={sorted(self.designated)})"


def hybrid(bao: FiniteBAO, designated: Iterable[int]) -> HybridStructure:
    return HybridStructure(bao, frozenset(designated), Kind.HYBRID)


def degenerate(bao: FiniteBAO) -> HybridStructure:
    return HybridStructure(bao, frozenset(), Kind.DEGENERATE)


def orthodox(bao: FiniteBAO, constants: Mapping[str, int], default: Optional[int] = None,
             at_table: Optional[Mapping[int, Sequence[int]]] = None) -> HybridStructure:
    return HybridStructure(bao, frozenset(), Kind.ORTHODOX, tuple(constants.items()),
                           bao.top if default is None else default,
                           tuple((at_table or {}).items()))


def all_hybrid(k: int) -> Iterator[HybridStructure]:
    """Every hybrid algebra on ``k`` atoms: operator tables outer, designated masks (ascending) inner."""
    for bao in all_baos(k):
        for xmask in range(1, 1 << k):
            yield hybrid(bao, bits(xmask))


# --------------------------------------------------------------------------
# permeation


@dataclass(frozen=True)
class PermeationResult:
    holds: bool
    condition: Optional[int] = None      # 1 or 2 when it fails
    witness: tuple = ()                  # (a,) for condition 1, (x, a) for condition 2

    def __bool__(self) -> bool:
        return self.holds


def is_permeated(h: HybridStructure) -> PermeationResult:
    """Check both permeation conditions exhaustively."""
    if h.kind is not Kind.HYBRID:
        raise KindError(f"permeation is defined for hybrid algebras, not {h.kind.value}")
    bao = h.bao
    xmask = h.designated_mask
    for a in range(1, bao.size):
        if a & xmask == 0:
            return PermeationResult(False, 1, (a,))
    for xi in sorted(h.designated):
        x = 1 << xi
        for a in bao.elements():
            if bao.diamond(a) & x:
                if not any(bao.diamond(1 << y) & x for y in bits(a & xmask)):
                    return PermeationResult(False, 2, (x, a))
    return PermeationResult(True)


# --------------------------------------------------------------------------
# products and grounding


def product(h1: HybridStructure, h2: HybridStructure) -> HybridStructure:
    """Product structure.  Left atoms keep their indices, right atoms are shifted by ``h1.bao.k``.

    The pair ``(a, b)`` is encoded as ``a | b << h1.bao.k``.
    """
    for h in (h1, h2):
        if h.kind not in (Kind.HYBRID, Kind.DEGENERATE):
            raise KindError(f"products are formed from hybrid or degenerate structures, not {h.kind.value}")
        if h.at_table:
            raise KindError("products of structures with an explicit @ table are not supported")
    k1 = h1.bao.k
    on = h1.bao.on_atoms + tuple(v << k1 for v in h2.bao.on_atoms)
    bao = FiniteBAO(k1 + h2.bao.k, on)
    designated = set(h1.designated) | {y + k1 for y in h2.designated}
    if designated:
        return HybridStructure(bao, frozenset(designated), Kind.HYBRID)
    return HybridStructure(bao, frozenset(), Kind.DEGENERATE)


def pair(h1: HybridStructure, a: int, b: int) -> int:
    """Encode ``(a, b)`` as an element of ``product(h1, _)``."""
    return a | b << h1.bao.k


def unpair(h1: HybridStructure, c: int) -> tuple[int, int]:
    k1 = h1.bao.k
    return c & ((1 << k1) - 1), c >> k1


def grounded(h: HybridStructure) -> HybridStructure:
    """Associated grounded structure: nominals may also denote bottom.  Idempotent."""
    if h.kind is Kind.GROUNDED:
        return h
    if h.kind not in (Kind.HYBRID, Kind.DEGENERATE):
        raise KindError(f"cannot ground a {h.kind.value} structure")
    return HybridStructure(h.bao, h.designated, Kind.GROUNDED)


# --------------------------------------------------------------------------
# the satisfaction operator


def at_operator(h: HybridStructure, x: int, a: int) -> int:
    """Canonical ``@_x a``: top if ``x <= a`` else bottom.  ``x`` must be designated."""
    h.bao.check(x, a)
    if not is_atom_mask(x) or not (x.bit_length() - 1) in h.designated:
        raise NotDesignated(f"{bits(x)} is not a designated atom")
    return h.bao.top if x & ~a == 0 else 0


def canonical_at_rows(h: HybridStructure) -> dict[int, tuple[int, ...]]:
    top = h.bao.top
    firsts = h.at_firsts()
    return {x: tuple(top if x & ~a == 0 else 0 for a in h.bao.elements()) for x in firsts}


@dataclass(frozen=True)
class AtViolation:
    axiom: str
    params: tuple   # (x, a), (x, a, b) or (x, y, a)

    def __str__(self):
        return f"{self.axiom} fails at {self.params}"


AT_AXIOMS = ("K@", "self-dual", "agree", "ref", "introduction", "back")


def row_violations(bao: FiniteBAO, x: int, row: Sequence[int], limit: Optional[int] = None) -> list[AtViolation]:
    """Violations of the axioms that mention a single first argument ``x``.

    ``agree`` is checked here only for ``y = x``; cross-row instances need :func:`check_at_axioms`.
    """
    top = bao.top
    dt = bao.diamond_table
    out = []

    def add(v):
        out.append(v)
        return limit is not None and len(out) >= limit

    if row[x] != top:
        if add(AtViolation("ref", (x,))):
            return out
    for a in bao.elements():
        ra = row[a]
        if row[top ^ a] != top ^ ra and add(AtViolation("self-dual", (x, a))):
            return out
        if x & a & ~ra and add(AtViolation("introduction", (x, a))):
            return out
        if dt[ra] & ~ra and add(AtViolation("back", (x, a))):
            return out
        if row[ra] & ~ra and add(AtViolation("agree", (x, x, a))):
            return out
        for b in bao.elements():
            if row[(top ^ a) | b] & ~((top ^ ra) | row[b]) and add(AtViolation("K@", (x, a, b))):
                return out
    return out


def check_at_axioms(h: HybridStructure, rows: Optional[Mapping[int, Sequence[int]]] = None,
                    limit: Optional[int] = None) -> list[AtViolation]:
    """Exhaustively check the six @ axioms; empty list iff all hold.

    ``rows`` defaults to the structure's explicit table, or to the canonical one.
    First arguments range over the designated atoms (or the constants of an
    orthodox structure).
    """
    if rows is None:
        rows = dict(h.at_table) if h.at_table else canonical_at_rows(h)
    bao = h.bao
    out: list[AtViolation] = []
    firsts = h.at_firsts()
    for x in firsts:
        out.extend(row_violations(bao, x, rows[x], None if limit is None else limit - len(out)))
        if limit is not None and len(out) >= limit:
            return out
    for x in firsts:
        for y in firsts:
            if x == y:
                continue
            rx, ry = rows[x], rows[y]
            for a in bao.elements():
                if rx[ry[a]] & ~ry[a]:
                    out.append(AtViolation("agree", (x, y, a)))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


# --------------------------------------------------------------------------
# the Nom schema for orthodox constants


def nom_schema_violation(bao: FiniteBAO, s: int) -> Optional[tuple[int, int, int]]:
    """First ``(n, m, a)`` with ``diamond^n(s & a)`` not below ``box^m(~s | a)``, or None.

    ``n`` and ``m`` range over the exponents of the distinct powers of the
    diamond, which covers every natural number.
    """
    tables = bao.power_tables()
    top = bao.top
    for n, pn in enumerate(tables):
        for m, pm in enumerate(tables):
            for a in bao.elements():
                # box^m(~s | a) = ~diamond^m(s & ~a)
                if pn[s & a] & pm[s & (top ^ a)]:
                    return n, m, a
    return None


def nom_schema_holds(h: HybridStructure, nominal: Optional[str] = None) -> bool:
    """Whether the constant of ``nominal`` (every constant when omitted) satisfies the Nom schema."""
    if h.kind is not Kind.ORTHODOX:
        raise KindError("the Nom schema concerns orthodox constants")
    values = [h.constant(nominal)] if nominal is not None else h.constant_values()
    return all(nom_schema_violation(h.bao, s) is None for s in values)


# --------------------------------------------------------------------------
# isomorphism


def isomorphic(h1: HybridStructure, h2: HybridStructure) -> Optional[tuple[int, ...]]:
    """An atom bijection ``f`` (``f[i]`` is the image of atom ``i``) preserving R and X, or None."""
    b1, b2 = h1.bao, h2.bao
    if b1.k != b2.k or len(h1.designated) != len(h2.designated) or h1.kind != h2.kind:
        return None
    r1, r2 = b1.relation(), b2.relation()
    if len(r1) != len(r2):
        return None
    for perm in itertools.permutations(range(b1.k)):
        if any((x in h1.designated) != (perm[x] in h2.designated) for x in range(b1.k)):
            continue
        if all((perm[x], perm[y]) in r2 for x, y in r1):
            return perm
    return None


def map_element(perm: Sequence[int], a: int) -> int:
    return mask(perm[i] for i in bits(a))


# --------------------------------------------------------------------------
# JSON


def element_to_json(a: int) -> list[int]:
    return bits(a)


def element_from_json(value, bao: FiniteBAO) -> int:
    if isinstance(value, int) and not isinstance(value, bool):
        raise AlgebraMismatch("elements are written as lists of atom indices")
    a = mask(int(i) for i in value)
    bao.check(a)
    return a


def structure_to_json(h: HybridStructure) -> dict:
    out = {
        "atoms": h.bao.k,
        "diamond": h.bao.diamond_lists(),
        "designated": sorted(h.designated),
        "kind": h.kind.value,
    }
    if h.kind is Kind.ORTHODOX:
        out["constants"] = {name: bits(v) for name, v in h.constants}
        out["default_constant"] = bits(h.default_constant)
    if h.at_table:
        out["at"] = [{"first": bits(f), "row": [bits(v) for v in row]} for f, row in h.at_table]
    return out


def structure_from_json(obj: Mapping) -> HybridStructure:
    try:
        k = int(obj["atoms"])
        diamond = obj.get("diamond", [[] for _ in range(k)])
        if len(diamond) != k:
            raise StructureError(f"'diamond' must list {k} rows")
        bao = FiniteBAO(k, tuple(mask(row) for row in diamond))
        kind = Kind(obj.get("kind", "hybrid"))
        designated = frozenset(int(x) for x in obj.get("designated", []))
        at = tuple((element_from_json(e["first"], bao), tuple(element_from_json(v, bao) for v in e["row"]))
                   for e in obj.get("at", []))
        if kind is Kind.ORTHODOX:
            consts = {name: element_from_json(v, bao) for name, v in obj.get("constants", {}).items()}
            default = obj.get("default_constant")
            default = bao.top if default is None else element_from_json(default, bao)
            return HybridStructure(bao, designated, kind, tuple(consts.items()), default, at)
        return HybridStructure(bao, designated, kind, (), None, at)
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed algebra JSON: {exc}") from exc
