import pytest

from hybrix.algebra import FiniteBAO, Kind, all_baos, bits, degenerate, hybrid, orthodox
from hybrix.errors import (
    BoxDViolation,
    KindError,
    NoConstantAvailable,
    NotAtom,
    NotRefuted,
    SchemaUnchecked,
)
from hybrix.evaluation import Assignment, equation_true, meaning
from hybrix.relativization import (
    classify_constants,
    compute_D,
    compute_D_trace,
    hybridize_counterexample,
    lemma_suite,
    permeation_witnesses,
    relativize,
    relativize_seeds,
)
from hybrix.syntax import parse


def reachable_oracle(bao, seeds):
    """Worlds reachable from the seeds along R-successor steps (x R y, x in the set => y)."""
    rel = bao.relation()
    seen = set(y for s in seeds for y in bits(s))
    frontier = list(seen)
    while frontier:
        x = frontier.pop()
        for a, b in rel:
            if a == x and b not in seen:
                seen.add(b)
                frontier.append(b)
    return sum(1 << y for y in seen)


def test_compute_d_examples():
    assert compute_D(FiniteBAO.identity(2), [1]) == 1
    bao = FiniteBAO.from_relation(2, [(0, 1)])        # a0 <= diamond a1
    assert bao.diamond_inv(1) == 2 and bao.diamond_inv(2) == 0
    assert compute_D(bao, [1]) == 3
    assert compute_D(bao, [2]) == 2


@pytest.mark.parametrize("k", [1, 2, 3])
def test_compute_d_matches_reachability(k):
    for bao in all_baos(k):
        for s in range(1, 1 << k):
            seeds = [1 << y for y in bits(s)]
            assert compute_D(bao, seeds) == reachable_oracle(bao, seeds)


def test_seed_must_be_atom():
    with pytest.raises(NotAtom):
        compute_D(FiniteBAO.identity(2), [3])


def test_relativize_identity_example():
    r = relativize(FiniteBAO.identity(2), 1)
    assert r.bao.k == 1 and r.bao.diamond(1) == 1
    assert r.atoms_of_D == (0,)


def test_relativize_to_top_is_base():
    for bao in all_baos(2):
        if bao.box(bao.top) == bao.top:
            assert relativize(bao, bao.top).bao == bao


def test_box_d_violation():
    bao = FiniteBAO.from_relation(2, [(0, 1)])
    with pytest.raises(BoxDViolation):
        relativize(bao, 1)


def test_classification_examples():
    bao = FiniteBAO.identity(2)
    h = orthodox(bao, {"i": 1}, 1)
    assert classify_constants(relativize_seeds(h, [1]))["i"] == "atom"
    h = orthodox(bao, {"i": 2}, 1)
    assert classify_constants(relativize_seeds(h, [1]))["i"] == "bottom"


def test_schema_unchecked():
    full = FiniteBAO.from_relation(2, [(x, y) for x in range(2) for y in range(2)])
    h = orthodox(full, {"i": 3}, 3)       # top breaks Nom over the universal relation
    with pytest.raises(SchemaUnchecked):
        classify_constants(relativize_seeds(h, [1]))


def test_hybridize_case_1():
    h = orthodox(FiniteBAO.identity(1), {}, 1)
    out = hybridize_counterexample(h, Assignment({"p": 0}), parse("p"))
    assert out.case == 1 and out.structure.bao.k == 1
    assert not equation_true(out.structure, parse("p")).holds
    assert permeation_witnesses(out.structure).permeated


def test_hybridize_case_2():
    h = orthodox(FiniteBAO.identity(2), {"j": 2}, 1)
    phi = parse("j")
    out = hybridize_counterexample(h, equation_true(h, phi).falsifier, phi)
    assert out.case == 2 and out.structure.kind is Kind.HYBRID
    assert meaning(out.structure, out.assignment, phi) != out.structure.bao.top


def test_hybridize_case_3():
    # the refutation lives at a1, which no constant reaches; a0 carries the constant
    bao = FiniteBAO.identity(2)
    h = orthodox(bao, {}, 1)
    phi = parse("<>i1 | p")
    v = Assignment({"p": 1})
    assert meaning(h, v, phi) == 1
    out = hybridize_counterexample(h, v, phi)
    assert out.case == 3 and out.second_D == 1
    assert not equation_true(out.structure, phi).holds


def test_hybridize_bot_and_errors():
    h = orthodox(FiniteBAO.identity(2), {"j": 2}, 1)
    out = hybridize_counterexample(h, Assignment(), parse("bot"))
    assert not equation_true(out.structure, parse("bot")).holds
    with pytest.raises(NotRefuted):
        hybridize_counterexample(h, Assignment(), parse("top"))
    zero = orthodox(FiniteBAO.identity(1), {}, 0)
    with pytest.raises(NoConstantAvailable):
        hybridize_counterexample(zero, Assignment(), parse("<>i1"))


def test_sigma_preservation_flag():
    h = orthodox(FiniteBAO.identity(2), {"j": 2}, 1)
    out = hybridize_counterexample(h, Assignment(), parse("j"), sigma=[parse("~j | i")])
    assert isinstance(out.sigma_preserved, bool)
    out = hybridize_counterexample(h, Assignment(), parse("j"), sigma=[parse("p -> <>p")])
    assert out.sigma_preserved


@pytest.mark.parametrize("k", [1, 2])
def test_lemma_suite_clean(k):
    for bao in all_baos(k):
        for s in range(1, 1 << k):
            assert lemma_suite(bao, [1 << y for y in bits(s)]).ok


def test_lemma_examples():
    rep = lemma_suite(FiniteBAO.identity(2), [1])
    assert rep.ok and rep.checked["box-diamond"] > 0


def test_trace_records_steps():
    bao = FiniteBAO.from_relation(3, [(0, 1), (1, 2)])
    t = compute_D_trace(bao, [1])
    assert t.D == 7 and t.steps == 2


def test_permeation_witness_report():
    rep = permeation_witnesses(hybrid(FiniteBAO.identity(2), [0]))
    assert not rep.permeated and rep.failure[0] == 1
    with pytest.raises(KindError):
        permeation_witnesses(degenerate(FiniteBAO.identity(1)))
