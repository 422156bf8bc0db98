"""Kripke models, two-sorted general frames and their model checking.

Worlds are arbitrary hashable, sortable labels.  Internally a frame indexes its
worlds ``0 .. n-1`` in the given order and handles world sets as bitmasks.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from hybrix import kernels
from hybrix.algebra import bits, mask
from hybrix.errors import BudgetExceeded, FrameError, NotClosed, UnboundSymbol
from hybrix.syntax import Bot, Conj, Diamond, Exists, Formula, Neg, Nom, Prop, Sat, noms_of, props_of

COMPACTNESS_LIMIT = 16


# --------------------------------------------------------------------------
# Kripke models


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple
    relation: frozenset
    valuation: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "relation", frozenset(tuple(p) for p in self.relation))
        object.__setattr__(self, "valuation", {k: frozenset(v) for k, v in self.valuation.items()})
        ws = set(self.worlds)
        if not ws:
            raise FrameError("a model needs at least one world")
        for u, v in self.relation:
            if u not in ws or v not in ws:
                raise FrameError(f"relation pair {(u, v)} leaves the domain")
        for name, ext in self.valuation.items():
            if not ext <= ws:
                raise FrameError(f"valuation of {name} leaves the domain")
            if name[:1] in "ijk" and len(ext) != 1:
                raise FrameError(f"nominal {name} must denote a single world")

    def successors(self, w) -> list:
        return [v for u, v in self.relation if u == w]


def extension(model: KripkeModel, phi: Formula) -> frozenset:
    """Set of worlds where ``phi`` holds."""
    W = frozenset(model.worlds)

    def lookup(name):
        if name not in model.valuation:
            raise UnboundSymbol(name)
        return model.valuation[name]

    def go(g) -> frozenset:
        if isinstance(g, Bot):
            return frozenset()
        if isinstance(g, (Prop, Nom)):
            return lookup(g.name)
        if isinstance(g, Neg):
            return W - go(g.child)
        if isinstance(g, Conj):
            return go(g.left) & go(g.right)
        if isinstance(g, Diamond):
            target = go(g.child)
            return frozenset(u for u, v in model.relation if v in target)
        if isinstance(g, Sat):
            (v,) = lookup(g.nominal)
            return W if v in go(g.child) else frozenset()
        if isinstance(g, Exists):
            return W if go(g.child) else frozenset()
        raise TypeError(f"not a formula: {g!r}")

    return go(phi)


def satisfies(model: KripkeModel, world, phi: Formula) -> bool:
    if world not in model.worlds:
        raise FrameError(f"{world!r} is not a world of the model")
    return world in extension(model, phi)


# --------------------------------------------------------------------------
# two-sorted general frames


def _closure_violation(n: int, dia: Sequence[int], sets: frozenset) -> Optional[str]:
    full = (1 << n) - 1
    for a in sets:
        if full ^ a not in sets:
            return f"complement of {bits(a)} missing"
        if dia[a] not in sets:
            return f"<R>{bits(a)} missing"
        for b in sets:
            if a & b not in sets:
                return f"intersection of {bits(a)} and {bits(b)} missing"
    return None


@dataclass(frozen=True)
class TwoSortedFrame:
    """``(W, R, A, B)``: admissible sets ``A`` and admissible points ``B``.

    ``admissible`` is a family of world sets, or ``None`` for the full powerset.
    """

    worlds: tuple
    relation: frozenset
    admissible: Optional[frozenset] = None
    points: frozenset = frozenset()
    _n: int = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)
    _rel: frozenset = field(init=False, repr=False, compare=False)
    _pred: tuple = field(init=False, repr=False, compare=False)
    _dia: tuple = field(init=False, repr=False, compare=False)
    _A: tuple = field(init=False, repr=False, compare=False)
    _B: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        worlds = tuple(self.worlds)
        if not worlds:
            raise FrameError("a frame needs at least one world")
        if len(set(worlds)) != len(worlds):
            raise FrameError("duplicate world labels")
        index = {w: i for i, w in enumerate(worlds)}
        relation = frozenset(tuple(p) for p in self.relation)
        for u, v in relation:
            if u not in index or v not in index:
                raise FrameError(f"relation pair {(u, v)} leaves the domain")
        n = len(worlds)
        rel = frozenset((index[u], index[v]) for u, v in relation)
        # pred[v] = worlds u with u R v; <R>X is the join of pred over X
        pred = tuple(mask(u for u, x in rel if x == v) for v in range(n))
        dia = tuple(kernels.diamond_table(pred, n))
        if self.admissible is None:
            A = tuple(range(1 << n))
        else:
            fam = set()
            for a in self.admissible:
                a = frozenset(a)
                if not a <= set(worlds):
                    raise FrameError(f"admissible set {sorted(a)} leaves the domain")
                fam.add(mask(index[w] for w in a))
            if not fam:
                raise FrameError("the family of admissible sets must be nonempty")
            why = _closure_violation(n, dia, frozenset(fam))
            if why:
                raise NotClosed(why)
            A = tuple(sorted(fam))
        points = frozenset(self.points)
        if not points:
            raise FrameError("a two-sorted frame needs at least one admissible point")
        Aset = set(A)
        for w in points:
            if w not in index:
                raise FrameError(f"admissible point {w!r} is not a world")
            if 1 << index[w] not in Aset:
                raise FrameError(f"singleton of admissible point {w!r} is not admissible")
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "points", points)
        if self.admissible is not None:
            object.__setattr__(self, "admissible", frozenset(frozenset(worlds[i] for i in bits(a)) for a in A))
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_rel", rel)
        object.__setattr__(self, "_pred", pred)
        object.__setattr__(self, "_dia", dia)
        object.__setattr__(self, "_A", A)
        object.__setattr__(self, "_B", mask(index[w] for w in points))

    @classmethod
    def kripke(cls, worlds: Sequence, relation: Iterable, points: Optional[Iterable] = None) -> "TwoSortedFrame":
        """Full powerset frame; every world is an admissible point unless ``points`` is given."""
        worlds = tuple(worlds)
        return cls(worlds, frozenset(relation), None, frozenset(worlds if points is None else points))

    # bitmask views ---------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def full(self) -> int:
        return (1 << self._n) - 1

    @property
    def admissible_masks(self) -> tuple[int, ...]:
        return self._A

    @property
    def point_mask(self) -> int:
        return self._B

    @property
    def rel_pairs(self) -> frozenset:
        return self._rel

    @property
    def pred_masks(self) -> tuple[int, ...]:
        return self._pred

    def diamond_mask(self, a: int) -> int:
        return self._dia[a]

    def world_set(self, a: int) -> frozenset:
        return frozenset(self.worlds[i] for i in bits(a))

    def to_mask(self, ws: Iterable) -> int:
        return mask(self._index[w] for w in ws)

    def is_full_powerset(self) -> bool:
        return len(self._A) == 1 << self._n

    def to_json(self) -> dict:
        adm = "powerset" if self.admissible is None else sorted(sorted(self.world_set(a)) for a in self._A)
        return {
            "worlds": list(self.worlds),
            "rel": sorted([list(p) for p in self.relation]),
            "admissible": adm,
            "points": sorted(self.points),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "TwoSortedFrame":
        try:
            worlds = tuple(obj["worlds"])
            rel = frozenset(tuple(p) for p in obj.get("rel", []))
            adm = obj.get("admissible", "powerset")
            family = None if adm == "powerset" else frozenset(frozenset(a) for a in adm)
            return cls(worlds, rel, family, frozenset(obj.get("points", [])))
        except (KeyError, TypeError) as exc:
            raise FrameError(f"malformed frame JSON: {exc}") from exc


# --------------------------------------------------------------------------
# validity on frames


def _frame_program(g: TwoSortedFrame, phi: Formula):
    props = sorted(props_of(phi))
    noms = sorted(noms_of(phi))
    index = {name: i for i, name in enumerate(props + noms)}
    out: list[int] = []

    def go(f):
        if isinstance(f, Bot):
            out.extend((kernels.OP_BOT, 0))
        elif isinstance(f, (Prop, Nom)):
            out.extend((kernels.OP_VAR, index[f.name]))
        elif isinstance(f, Neg):
            go(f.child)
            out.extend((kernels.OP_NEG, 0))
        elif isinstance(f, Conj):
            go(f.left)
            go(f.right)
            out.extend((kernels.OP_AND, 0))
        elif isinstance(f, Diamond):
            go(f.child)
            out.extend((kernels.OP_DIA, 0))
        elif isinstance(f, Sat):
            out.extend((kernels.OP_VAR, index[f.nominal]))
            go(f.child)
            out.extend((kernels.OP_SAT, 0))
        elif isinstance(f, Exists):
            go(f.child)
            out.extend((kernels.OP_EXISTS, 0))
        else:
            raise TypeError(f"not a formula: {f!r}")

    go(phi)
    singles = [1 << i for i in bits(g.point_mask)]
    domains = [list(g.admissible_masks)] * len(props) + [singles] * len(noms)
    return out, domains, props, noms


@dataclass(frozen=True)
class FrameVerdict:
    holds: bool
    valuation: Optional[dict] = None    # symbol -> world set, for a refuting admissible valuation
    world: Optional[Hashable] = None

    def __bool__(self) -> bool:
        return self.holds


def frame_check(g: TwoSortedFrame, phi: Formula, budget: int = 5_000_000) -> FrameVerdict:
    """Validity of ``phi`` at every world under every admissible valuation, with a witness."""
    prog, domains, props, noms = _frame_program(g, phi)
    total = 1
    for d in domains:
        total *= len(d)
    if total > budget:
        raise BudgetExceeded(f"{total} valuations exceed the budget of {budget}")
    full = g.full
    found = kernels.find_falsifier(prog, [kernels.OP_CONST, full], domains, g._dia, full, None)
    if found is None:
        return FrameVerdict(True)
    val = {name: g.world_set(v) for name, v in zip(props + noms, found)}
    ext = kernels.evaluate(prog, found, g._dia, full, None)
    bad = bits(full & ~ext)[0]
    return FrameVerdict(False, val, g.worlds[bad])


def frame_validates(g: TwoSortedFrame, phi: Formula) -> bool:
    return frame_check(g, phi).holds


def model_from_valuation(g: TwoSortedFrame, valuation: Mapping[str, Iterable]) -> KripkeModel:
    return KripkeModel(g.worlds, g.relation, {k: frozenset(v) for k, v in valuation.items()})


def admissible_models(g: TwoSortedFrame, props: Sequence[str], noms: Sequence[str]) -> Iterator[KripkeModel]:
    singles = [1 << i for i in bits(g.point_mask)]
    domains = [g.admissible_masks] * len(props) + [singles] * len(noms)
    names = list(props) + list(noms)
    for vals in itertools.product(*domains):
        yield model_from_valuation(g, {n: g.world_set(v) for n, v in zip(names, vals)})


# --------------------------------------------------------------------------
# descriptive frames


def is_differentiated(g: TwoSortedFrame) -> bool:
    for w in range(g.n):
        for v in range(g.n):
            if w != v and not any(a >> w & 1 and not a >> v & 1 for a in g.admissible_masks):
                return False
    return True


def is_tight(g: TwoSortedFrame) -> bool:
    """``uRv`` iff ``u`` lies in ``<R>a`` for every admissible ``a`` containing ``v``.

    The left-to-right direction always holds, so only the converse can fail.
    """
    for v in range(g.n):
        common = g.full
        for a in g.admissible_masks:
            if a >> v & 1:
                common &= g.diamond_mask(a)
        if common != g.pred_masks[v]:
            return False
    return True


@functools.lru_cache(maxsize=4096)
def _compact(family: tuple[int, ...]) -> bool:
    m = len(family)
    if m > COMPACTNESS_LIMIT:
        raise BudgetExceeded(f"compactness check over {m} admissible sets exceeds {COMPACTNESS_LIMIT}")
    count = 1 << m
    meet = [0] * count
    fip = [False] * count
    meet[0] = -1             # empty intersection: everything
    fip[0] = True
    for sub in range(1, count):
        low = sub & -sub
        rest = sub ^ low
        meet[sub] = meet[rest] & family[low.bit_length() - 1]
        # FIP: every finite subfamily has a nonempty meet; by induction it suffices
        # to check the proper subfamilies obtained by dropping one member plus the meet itself
        ok = meet[sub] != 0
        r = sub
        while ok and r:
            b = r & -r
            ok = fip[sub ^ b]
            r ^= b
        fip[sub] = ok
    # a finite family with FIP has its (finite) meet among the checked meets
    return all(meet[s] != 0 for s in range(1, count) if fip[s])


def is_compact(g: TwoSortedFrame) -> bool:
    """Every subfamily of ``A`` with the finite intersection property has a common point."""
    return _compact(tuple(g.admissible_masks))


def is_descriptive(g: TwoSortedFrame) -> bool:
    return is_differentiated(g) and is_tight(g) and is_compact(g)


def strong_condition_violation(g: TwoSortedFrame) -> Optional[tuple]:
    """First failure of conditions (i)/(ii): ``("i", a)`` or ``("ii", a, u)``; None if both hold."""
    B = g.point_mask
    for a in g.admissible_masks:
        if a and not a & B:
            return ("i", a)
    for a in g.admissible_masks:
        for u in bits(B):
            succ = mask(v for v in range(g.n) if (u, v) in g.rel_pairs)
            if a & succ and not a & succ & B:
                return ("ii", a, u)
    return None


def is_strongly_descriptive(g: TwoSortedFrame) -> bool:
    return is_descriptive(g) and strong_condition_violation(g) is None


def descriptive_report(g: TwoSortedFrame) -> dict:
    viol = strong_condition_violation(g)
    return {
        "differentiated": is_differentiated(g),
        "tight": is_tight(g),
        "compact": is_compact(g),
        "descriptive": is_descriptive(g),
        "strongly_descriptive": is_descriptive(g) and viol is None,
        "strong_violation": None if viol is None else [viol[0], sorted(g.world_set(viol[1]))] + [g.worlds[x] for x in viol[2:]],
    }


# --------------------------------------------------------------------------
# enumeration


def _partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def all_frames(n: int, powerset_only: bool = False) -> Iterator[TwoSortedFrame]:
    """Every valid two-sorted frame on worlds ``0 .. n-1``.

    Order: relation masks ascending (bit ``u*n + v`` means ``uRv``), then the
    admissible families in partition order (powerset first), then nonempty
    point sets ascending.
    """
    worlds = tuple(range(n))
    pairs = [(u, v) for u in range(n) for v in range(n)]
    parts = sorted(_partitions(list(range(n))), key=lambda p: (-len(p), sorted(map(sorted, p))))
    for rmask in range(1 << len(pairs)):
        rel = frozenset(p for i, p in enumerate(pairs) if rmask >> i & 1)
        pred = [mask(u for u, x in rel if x == v) for v in range(n)]
        dia = kernels.diamond_table(pred, n)
        for part in parts:
            blocks = [mask(b) for b in part]
            if powerset_only and len(blocks) != n:
                continue
            family = frozenset(mask_union(blocks, s) for s in range(1 << len(blocks)))
            if any(dia[a] not in family for a in family):
                continue
            singles = [bits(b)[0] for b in blocks if is_single(b)]
            adm = None if len(blocks) == n else frozenset(frozenset(bits(a)) for a in family)
            for bmask in range(1, 1 << len(singles)):
                pts = frozenset(singles[i] for i in bits(bmask))
                yield TwoSortedFrame(worlds, rel, adm, pts)


def mask_union(blocks: Sequence[int], sel: int) -> int:
    out = 0
    for i in bits(sel):
        out |= blocks[i]
    return out


def is_single(a: int) -> bool:
    return a != 0 and a & (a - 1) == 0
