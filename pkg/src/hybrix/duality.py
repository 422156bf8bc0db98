"""Finite duality between hybrid algebras and two-sorted general frames."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Union

from hybrix.algebra import FiniteBAO, HybridStructure, Kind, bits, hybrid, is_permeated, isomorphic, mask
from hybrix.errors import KindError, StructureError
from hybrix.relational import TwoSortedFrame, is_descriptive, is_strongly_descriptive


def atom_blocks(g: TwoSortedFrame) -> list[int]:
    """Minimal nonempty admissible sets (as world masks), ordered by their least world."""
    fam = [a for a in g.admissible_masks if a]
    minimal = [a for a in fam if not any(b != a and b & ~a == 0 for b in fam)]
    return sorted(minimal, key=lambda a: (a & -a).bit_length())


def underlying_algebra(g: TwoSortedFrame) -> HybridStructure:
    """The algebra of admissible sets with ``<R>``, designating the singletons of admissible points."""
    blocks = atom_blocks(g)
    index = {b: i for i, b in enumerate(blocks)}

    def encode(a: int) -> int:
        out = 0
        for i, b in enumerate(blocks):
            if a & b:
                if a & b != b:
                    raise StructureError(f"admissible set {bits(a)} is not a union of minimal admissible sets")
                out |= 1 << i
        if a & ~mask_of(blocks, out):
            raise StructureError(f"{bits(a)} is not covered by minimal admissible sets")
        return out

    on = tuple(encode(g.diamond_mask(b)) for b in blocks)
    designated = [index[1 << w] for w in bits(g.point_mask)]
    return hybrid(FiniteBAO(len(blocks), on), designated)


def mask_of(blocks, sel: int) -> int:
    out = 0
    for i in bits(sel):
        out |= blocks[i]
    return out


def ultrafilters(bao: FiniteBAO) -> list[frozenset]:
    """The ultrafilters of a finite Boolean algebra: one principal filter per atom."""
    return [frozenset(a for a in bao.elements() if a >> x & 1) for x in range(bao.k)]


def ultrafilter_frame(h: HybridStructure) -> TwoSortedFrame:
    """Worlds are atom indices standing for their principal ultrafilters.

    The relation is computed from the defining clause ``Q u v iff diamond a is in u for
    every a in v``, and the admissible family from ``a^ = {u : a in u}``.
    """
    if h.kind is not Kind.HYBRID:
        raise KindError(f"ultrafilter frames are built from hybrid algebras, not {h.kind.value}")
    bao = h.bao
    ufs = ultrafilters(bao)
    worlds = tuple(range(bao.k))
    rel = frozenset((u, v) for u in worlds for v in worlds
                    if all(bao.diamond(a) in ufs[u] for a in ufs[v]))
    family = frozenset(frozenset(u for u in worlds if a in ufs[u]) for a in bao.elements())
    return TwoSortedFrame(worlds, rel, family, frozenset(h.designated))


def frame_isomorphism(g1: TwoSortedFrame, g2: TwoSortedFrame) -> Optional[dict]:
    """A world bijection preserving R, the admissible family and the points, or None."""
    if g1.n != g2.n or len(g1.admissible_masks) != len(g2.admissible_masks):
        return None
    if len(g1.rel_pairs) != len(g2.rel_pairs) or bin(g1.point_mask).count("1") != bin(g2.point_mask).count("1"):
        return None
    fam2 = set(g2.admissible_masks)
    for perm in itertools.permutations(range(g1.n)):
        if any((perm[u], perm[v]) not in g2.rel_pairs for u, v in g1.rel_pairs):
            continue
        if any((g1.point_mask >> w & 1) != (g2.point_mask >> perm[w] & 1) for w in range(g1.n)):
            continue
        if all(mask(perm[w] for w in bits(a)) in fam2 for a in g1.admissible_masks):
            return {g1.worlds[w]: g2.worlds[perm[w]] for w in range(g1.n)}
    return None


@dataclass(frozen=True)
class ItemResult:
    holds: bool
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DualityReport:
    items: dict

    @property
    def ok(self) -> bool:
        return all(r.holds for r in self.items.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "items": {str(k): {"holds": v.holds, **v.detail} for k, v in sorted(self.items.items())}}


def _algebra_valid(h: HybridStructure) -> ItemResult:
    # re-run the structural checks independently of the constructor
    ok = h.kind is Kind.HYBRID and bool(h.designated) and all(0 <= x < h.bao.k for x in h.designated)
    bao = h.bao
    ok = ok and bao.diamond(0) == 0 and all(
        bao.diamond(a | b) == bao.diamond(a) | bao.diamond(b) for a in bao.elements() for b in bao.elements())
    return ItemResult(ok, {"atoms": bao.k, "designated": sorted(h.designated)})


def report_for_algebra(h: HybridStructure) -> DualityReport:
    frame = ultrafilter_frame(h)
    back = underlying_algebra(frame)
    iso = isomorphic(back, h)
    perm = is_permeated(h).holds
    sd = is_strongly_descriptive(frame)
    items = {
        1: ItemResult(is_descriptive(frame), {"frame": frame.to_json()}),
        2: _algebra_valid(back),
        3: ItemResult(iso is not None, {"isomorphism": None if iso is None else list(iso)}),
        5: ItemResult((not perm) or sd, {"permeated": perm, "strongly_descriptive": sd}),
    }
    return DualityReport(items)


def report_for_frame(g: TwoSortedFrame) -> DualityReport:
    alg = underlying_algebra(g)
    back = ultrafilter_frame(alg)
    blocks = atom_blocks(g)
    iso = frame_isomorphism(back, g)
    desc = is_descriptive(g)
    sd = is_strongly_descriptive(g)
    perm = is_permeated(alg).holds
    items = {
        2: _algebra_valid(alg),
        4: ItemResult((iso is not None) == desc, {
            "descriptive": desc,
            "round_trip_isomorphic": iso is not None,
            "isomorphism": None if iso is None else [[k, v] for k, v in sorted(iso.items(), key=str)],
            "atoms": [sorted(g.world_set(b), key=str) for b in blocks],
        }),
        6: ItemResult((not sd) or perm, {"strongly_descriptive": sd, "permeated": perm}),
    }
    return DualityReport(items)


def duality_report(obj: Union[HybridStructure, TwoSortedFrame]) -> DualityReport:
    if isinstance(obj, TwoSortedFrame):
        return report_for_frame(obj)
    return report_for_algebra(obj)
