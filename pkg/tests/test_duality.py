import pytest

from hybrix.algebra import FiniteBAO, Kind, all_hybrid, degenerate, hybrid, isomorphic, is_permeated
from hybrix.duality import (
    atom_blocks,
    duality_report,
    frame_isomorphism,
    ultrafilter_frame,
    ultrafilters,
    underlying_algebra,
)
from hybrix.errors import KindError
from hybrix.evaluation import equation_true
from hybrix.relational import TwoSortedFrame, all_frames, frame_validates, is_descriptive
from hybrix.syntax import parse


def test_ultrafilters_are_principal():
    bao = FiniteBAO.identity(2)
    ufs = ultrafilters(bao)
    assert ufs == [frozenset({1, 3}), frozenset({2, 3})]


def test_ultrafilter_frame_relation_matches_atoms():
    for h in all_hybrid(2):
        g = ultrafilter_frame(h)
        assert g.rel_pairs == h.bao.relation()
        assert g.is_full_powerset()
        assert g.point_mask == h.designated_mask


def test_round_trip_algebra():
    for h in all_hybrid(2):
        back = underlying_algebra(ultrafilter_frame(h))
        assert isomorphic(back, h) is not None


def test_non_descriptive_frame_does_not_round_trip():
    g = TwoSortedFrame((0, 1, 2), {(0, 0)},
                       {frozenset(), frozenset({0}), frozenset({1, 2}), frozenset({0, 1, 2})}, {0})
    assert not is_descriptive(g)
    assert frame_isomorphism(ultrafilter_frame(underlying_algebra(g)), g) is None
    rep = duality_report(g)
    assert rep.ok and rep.items[4].detail["descriptive"] is False
    assert [sorted(b) for b in rep.items[4].detail["atoms"]] == [[0], [1, 2]]
    assert atom_blocks(g) == [1, 6]


def test_separating_frame_algebra():
    g = TwoSortedFrame(("u", "v"), {("u", "u")}, None, {"v"})
    h = underlying_algebra(g)
    assert h.kind is Kind.HYBRID
    assert equation_true(h, parse("j -> []bot")).holds
    assert not equation_true(h, parse("[]bot")).holds
    assert not is_permeated(h).holds


def test_validity_transfers_between_duals():
    formulas = [parse(t) for t in ["<>i1 -> i1", "i1 -> <>i1", "<>(i1 & p) -> [](i1 -> p)", "p -> <>p"]]
    for g in all_frames(2):
        h = underlying_algebra(g)
        for f in formulas:
            assert frame_validates(g, f) == equation_true(h, f).holds


def test_degenerate_rejected():
    with pytest.raises(KindError):
        ultrafilter_frame(degenerate(FiniteBAO.identity(1)))


def test_report_json():
    rep = duality_report(hybrid(FiniteBAO.identity(1), [0]))
    data = rep.to_json()
    assert data["ok"] and set(data["items"]) == {"1", "2", "3", "5"}
