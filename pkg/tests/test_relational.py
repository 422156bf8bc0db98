import pytest

from hybrix.errors import FrameError, NotClosed
from hybrix.relational import (
    KripkeModel,
    TwoSortedFrame,
    admissible_models,
    all_frames,
    descriptive_report,
    extension,
    frame_check,
    frame_validates,
    is_compact,
    is_descriptive,
    is_differentiated,
    is_strongly_descriptive,
    is_tight,
    satisfies,
)
from hybrix.syntax import Lang, noms_of, parse, props_of


@pytest.fixture
def separating_frame():
    return TwoSortedFrame(("u", "v"), {("u", "u")}, None, {"v"})


def test_kripke_model_clauses():
    m = KripkeModel((0, 1, 2), {(0, 1), (1, 2)}, {"p": {2}, "i": {1}})
    assert extension(m, parse("<>p")) == {1}
    assert extension(m, parse("<><>p")) == {0}
    assert extension(m, parse("@i <>p", Lang.H_AT)) == {0, 1, 2}
    assert extension(m, parse("E (i & p)", Lang.H_E)) == frozenset()
    assert satisfies(m, 0, parse("<>i"))
    with pytest.raises(FrameError):
        KripkeModel((0, 1), set(), {"i": {0, 1}})


def test_separating_frame_verdicts(separating_frame):
    assert frame_validates(separating_frame, parse("j -> []bot"))
    verdict = frame_check(separating_frame, parse("[]bot"))
    assert not verdict.holds and verdict.world == "u"


def test_frame_validity_matches_model_oracle():
    formulas = [parse(t, Lang.H_E) for t in ["<>i -> E i", "E (i & p) -> A (i -> p)", "p -> <>p", "A <>i"]]
    formulas += [parse(t, Lang.H_AT) for t in ["@i <>j -> <>@i j", "@i p -> <>@i p"]]
    for n in (1, 2):
        for g in all_frames(n):
            for f in formulas:
                props, noms = sorted(props_of(f)), sorted(noms_of(f))
                oracle = all(extension(m, f) == frozenset(g.worlds) for m in admissible_models(g, props, noms))
                assert frame_validates(g, f) == oracle


def test_frame_validation_errors():
    with pytest.raises(FrameError):
        TwoSortedFrame((0, 1), set(), None, set())
    with pytest.raises(NotClosed):
        TwoSortedFrame((0, 1), {(0, 1)}, {frozenset(), frozenset({0, 1}), frozenset({1})}, {1})
    with pytest.raises(FrameError):
        # point whose singleton is not admissible
        TwoSortedFrame((0, 1), set(), {frozenset(), frozenset({0, 1})}, {0})


def test_frame_counts():
    assert sum(1 for _ in all_frames(1, powerset_only=True)) == 2
    assert sum(1 for _ in all_frames(1)) == 2
    assert sum(1 for _ in all_frames(2, powerset_only=True)) == 16 * 3


def test_descriptive_properties():
    # worlds 1 and 2 share every admissible set: not differentiated
    g = TwoSortedFrame((0, 1, 2), {(0, 0)}, {frozenset(), frozenset({0}), frozenset({1, 2}), frozenset({0, 1, 2})}, {0})
    assert not is_differentiated(g)
    assert is_compact(g)
    assert not is_descriptive(g)
    k = TwoSortedFrame.kripke((0, 1), {(0, 1)})
    assert is_tight(k) and is_descriptive(k) and is_strongly_descriptive(k)


def test_tightness_failure():
    # every admissible set containing 1 also contains 0, and 0 R 0, yet 1 has no predecessor
    g = TwoSortedFrame((0, 1, 2), {(0, 0), (1, 0)},
                       {frozenset(), frozenset({0, 1}), frozenset({2}), frozenset({0, 1, 2})}, {2})
    assert not is_tight(g)


def test_strong_condition_report(separating_frame):
    rep = descriptive_report(separating_frame)
    assert rep["descriptive"] and not rep["strongly_descriptive"]
    assert rep["strong_violation"] == ["i", ["u"]]


def test_json_round_trip(separating_frame):
    assert TwoSortedFrame.from_json(separating_frame.to_json()) == separating_frame
    g = next(g for g in all_frames(3) if g.admissible is not None)
    assert TwoSortedFrame.from_json(g.to_json()) == g
