import pytest

from hybrix.algebra import FiniteBAO, all_hybrid, degenerate, grounded, hybrid, orthodox, product
from hybrix.errors import AlgebraMismatch, BudgetExceeded, LanguageError, UnboundSymbol
from hybrix.evaluation import (
    Assignment,
    all_assignments,
    countermodel_search,
    equation_true,
    meaning,
)
from hybrix.relational import KripkeModel, extension
from hybrix.syntax import Equation, Lang, parse


def test_meaning_basic(two_element):
    v = Assignment({"p": 0}, {"i1": 1})
    assert meaning(two_element, v, parse("<>i1")) == 1
    assert meaning(two_element, v, parse("p | ~p")) == 1
    with pytest.raises(UnboundSymbol):
        meaning(two_element, Assignment(), parse("p"))
    with pytest.raises(AlgebraMismatch):
        meaning(two_element, Assignment({}, {"i1": 0}), parse("i1"))


def test_e_rejected_on_algebras(two_element):
    with pytest.raises(LanguageError):
        equation_true(two_element, parse("E p", Lang.H_E))


def test_at_rejected_on_grounded(two_element):
    with pytest.raises(LanguageError):
        equation_true(grounded(two_element), parse("@i p", Lang.H_AT))


def test_orthodox_substitution_failure():
    h = orthodox(FiniteBAO.identity(1), {"j": 0})
    assert equation_true(h, parse("<>i")).holds
    assert not equation_true(h, parse("<>j")).holds


def test_product_failure(two_element):
    assert equation_true(two_element, parse("<>i1")).holds
    res = equation_true(product(two_element, two_element), parse("<>i1"))
    assert not res.holds and res.falsifier.noms["i1"] in (1, 2)


def test_degenerate_vacuous_nominals():
    assert equation_true(degenerate(FiniteBAO.identity(1)), parse("~i1")).holds


def test_budget():
    h = hybrid(FiniteBAO.identity(3), [0])
    with pytest.raises(BudgetExceeded):
        equation_true(h, parse("p & q & r & p1 & p2 & p3 & p4 & p5"), budget=1000)


def kripke_oracle(h, phi):
    """Complex-algebra semantics through an independent Kripke evaluator on the atom frame."""
    worlds = list(range(h.bao.k))
    rel = h.bao.relation()
    for v in all_assignments(h, [phi]):
        val = {p: frozenset(w for w in worlds if a >> w & 1) for p, a in v.props.items()}
        val.update({i: frozenset(w for w in worlds if a >> w & 1) for i, a in v.noms.items()})
        if extension(KripkeModel(worlds, rel, val), phi) != frozenset(worlds):
            return False
    return True


@pytest.mark.parametrize("text", ["<>(i1 & p) -> [](i1 -> p)", "p -> <>p", "@i1 <>p -> <>@i1 p", "<>i1 -> i1"])
def test_equation_truth_matches_kripke_oracle(text):
    phi = parse(text, Lang.H_AT)
    for k in (1, 2):
        for h in all_hybrid(k):
            if set(h.designated) == set(range(k)):
                assert equation_true(h, phi).holds == kripke_oracle(h, phi)


def test_first_falsifier_is_lexicographic():
    h = hybrid(FiniteBAO.identity(2), [0, 1])
    res = equation_true(h, Equation(parse("p"), parse("q")))
    # p ranges slowest; first mismatch is p=0, q=1
    assert res.falsifier.props == {"p": 0, "q": 1}


def test_countermodel_search():
    found = countermodel_search(parse("<>i1"), max_atoms=2)
    assert found is not None and found.structure.bao.k == 1
    assert not equation_true(found.structure, parse("<>i1")).holds
    assert countermodel_search(parse("@i1 p -> (i1 -> p)", Lang.H_AT), max_atoms=2) is None
