import json
import warnings

import pytest

from hybrix.algebra import FiniteBAO, all_hybrid, hybrid
from hybrix.corpus import derivation, derivations
from hybrix.duality import underlying_algebra
from hybrix.proof import (
    AXIOMS,
    LOGIC_AXIOMS,
    LOGIC_RULES,
    NON_ORTHODOX_IN_BASE,
    NOT_TAUTOLOGY,
    PREMISE_SHAPE,
    RULE_UNAVAILABLE,
    AxiomStep,
    Derivation,
    Logic,
    RuleStep,
    SigmaStep,
    StepError,
    canonical_axiom,
    canonical_rule,
    is_tautology_instance,
    match_axiom,
    proof_from_json,
    proof_to_json,
    soundness_audit,
    verify,
)
from hybrix.relational import TwoSortedFrame
from hybrix.syntax import Lang, parse

ENTRIES = derivations()


def test_corpus_size_and_names_unique():
    assert len(ENTRIES) == 50
    assert len({e.name for e in ENTRIES}) == 50


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_corpus_derivation_verifies(entry):
    res = verify(entry.derivation, entry.logic)
    assert res.ok, res.error
    assert res.conclusion == entry.derivation.conclusion


@pytest.mark.parametrize("entry", [e for e in ENTRIES if e.mutants], ids=lambda e: e.name)
def test_mutants_rejected_at_expected_step(entry):
    for mutant, (index, reason) in entry.mutants:
        res = verify(mutant, entry.logic)
        assert not res.ok
        assert res.error == StepError(index, reason)


def test_mutant_count():
    assert sum(len(e.mutants) for e in ENTRIES) >= 15


def test_corpus_covers_every_axiom_and_rule():
    for lang in Lang:
        used_ax = {canonical_axiom(s.schema) for e in ENTRIES if e.logic.base is lang
                   for s in e.derivation.steps if isinstance(s, AxiomStep)}
        used_rules = {canonical_rule(s.rule) for e in ENTRIES if e.logic.base is lang
                      for s in e.derivation.steps if isinstance(s, RuleStep)}
        assert set(LOGIC_AXIOMS[lang]) <= used_ax, lang
        orth, non = LOGIC_RULES[lang]
        assert orth | non <= used_rules, lang


def test_name_rule_rejected_in_base_logic():
    e = derivation("name-separation")
    base = Logic(Lang.H, False, e.logic.sigma)
    res = verify(e.derivation, base)
    assert res.error == StepError(2, NON_ORTHODOX_IN_BASE)


def test_rule_from_other_language():
    d = Derivation((AxiomStep("Taut", parse("p | ~p")), RuleStep("Nec@", (1,), parse("p | ~p"), {"j": "i"})))
    res = verify(d, Logic(Lang.H))
    assert res.error.index == 2 and res.error.reason == RULE_UNAVAILABLE


def test_taut():
    assert is_tautology_instance(parse("<>p | ~<>p"))
    assert is_tautology_instance(parse("(i -> []q) -> (~[]q -> ~i)"))
    assert not is_tautology_instance(parse("<>p -> p"))
    res = verify(Derivation((AxiomStep("Taut", parse("p -> q")),)), Logic())
    assert res.error == StepError(1, NOT_TAUTOLOGY)


def test_mp_premise_not_matching_conclusion():
    d = Derivation((
        AxiomStep("Taut", parse("p -> p")),
        AxiomStep("Taut", parse("(p -> p) -> (q | ~q)")),
        RuleStep("MP", (2, 1), parse("q")),
    ))
    assert verify(d, Logic()).error == StepError(3, PREMISE_SHAPE)


def test_match_axiom_with_params():
    assert match_axiom("Nom", parse("<><>(i & p) -> [](i -> p)"), {"n": 2, "m": 1}) is not None
    assert match_axiom("Nom", parse("<><>(i & p) -> [](i -> p)"), {"n": 1}) is None
    assert match_axiom("Back", parse("<>@i q -> @i q", Lang.H_AT)) is not None
    assert match_axiom("K", parse("[]p -> p")) is None


def test_every_schema_has_a_language():
    listed = set().union(*LOGIC_AXIOMS.values())
    assert set(AXIOMS) <= listed


def test_step_error_json():
    err = StepError(3, "x")
    assert err.to_json() == {"index": 3, "reason": "x"}


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_json_round_trip(entry):
    obj = proof_to_json(entry.derivation, entry.logic)
    d, logic = proof_from_json(json.loads(json.dumps(obj)))
    assert logic == entry.logic
    assert verify(d, logic).ok
    assert d.conclusion == entry.derivation.conclusion


def test_sigma_index_checked():
    d = Derivation((SigmaStep(1, parse("p")),))
    res = verify(d, Logic(Lang.H, False, (parse("p"),)))
    assert not res.ok and res.error.index == 1


def test_audit_base_logic_clean():
    e = derivation("nom-nec-k")
    rep = soundness_audit(e.derivation, e.logic, all_hybrid(2))
    assert rep.ok and rep.checked > 0


def test_audit_excludes_unpermeated_algebra():
    e = derivation("name-separation")
    unpermeated = underlying_algebra(TwoSortedFrame(("u", "v"), {("u", "u")}, None, {"v"}))
    rep = soundness_audit(e.derivation, e.logic, [unpermeated])
    assert rep.ok and rep.checked == 0 and rep.excluded == 1


def test_audit_plus_logic_on_permeated():
    e = derivation("name-separation")
    corpus = [h for h in all_hybrid(2)]
    rep = soundness_audit(e.derivation, e.logic, corpus)
    assert rep.ok and rep.checked + rep.excluded == len(corpus)


def test_audit_empty_corpus_warns():
    e = derivation("k")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = soundness_audit(e.derivation, e.logic, [])
    assert rep.ok and rep.checked == 0 and rep.warnings
    assert caught


def test_audit_rejects_unverified():
    d = Derivation((AxiomStep("Taut", parse("p")),))
    with pytest.raises(StepError):
        soundness_audit(d, Logic(), [hybrid(FiniteBAO.identity(1), [0])])
