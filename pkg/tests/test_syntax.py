import pytest
from hypothesis import given, strategies as st

from hybrix.errors import FormulaSyntaxError, LanguageError
from hybrix.syntax import (
    BOT,
    TOP,
    Conj,
    Diamond,
    Exists,
    Lang,
    Neg,
    Nom,
    Prop,
    Sat,
    SubstitutionMap,
    box,
    check_language,
    from_json,
    implies,
    language_of,
    noms_of,
    occurs,
    parse,
    props_of,
    show,
    sorted_substitute,
    to_json,
)


def formulas(lang):
    leaves = st.one_of(
        st.just(BOT),
        st.sampled_from(["p", "q", "r1"]).map(Prop),
        st.sampled_from(["i", "j", "k2"]).map(Nom),
    )

    def extend(children):
        options = [
            children.map(Neg),
            children.map(Diamond),
            st.tuples(children, children).map(lambda t: Conj(*t)),
        ]
        if lang is Lang.H_AT:
            options.append(st.tuples(st.sampled_from(["i", "j"]), children).map(lambda t: Sat(*t)))
        if lang is Lang.H_E:
            options.append(children.map(Exists))
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=12)


@pytest.mark.parametrize("lang", list(Lang))
@given(data=st.data())
def test_show_parse_round_trip(lang, data):
    f = data.draw(formulas(lang))
    assert parse(show(f), lang) == f
    assert parse(show(f, sugar=False), lang) == f


@given(formulas(Lang.H_AT))
def test_json_round_trip(f):
    assert from_json(to_json(f)) == f


def test_sugar_expands_to_core():
    assert parse("p -> q") == implies(Prop("p"), Prop("q"))
    assert parse("[]p") == box(Prop("p"))
    assert parse("top") == TOP
    assert parse("A p", Lang.H_E) == Neg(Exists(Neg(Prop("p"))))


def test_precedence():
    # conjunction binds tighter than implication, which associates to the right
    assert parse("p & q -> r") == implies(Conj(Prop("p"), Prop("q")), Prop("r"))
    assert parse("p -> q -> r") == implies(Prop("p"), implies(Prop("q"), Prop("r")))
    assert parse("<>p & q") == Conj(Diamond(Prop("p")), Prop("q"))


def test_language_errors():
    with pytest.raises(LanguageError):
        parse("E p1", Lang.H)
    with pytest.raises(LanguageError):
        parse("@i p", Lang.H_E)
    with pytest.raises(LanguageError):
        check_language(parse("E p", Lang.H_E), Lang.H_AT)
    assert language_of(parse("@i p", Lang.H_AT)) is Lang.H_AT


@pytest.mark.parametrize("text", ["", "p &", "(p", "p q", "@ p", "x1"])
def test_syntax_errors(text):
    with pytest.raises((FormulaSyntaxError, LanguageError)):
        parse(text, Lang.H_AT)


def test_symbols_and_occurrence():
    f = parse("@j (p & <>i)", Lang.H_AT)
    assert props_of(f) == {"p"}
    assert noms_of(f) == {"i", "j"}
    assert occurs("j", f) and not occurs("k", f)


def test_sorted_substitution():
    f = parse("@j (p & <>i)", Lang.H_AT)
    sub = SubstitutionMap({"p": parse("<>q")}, {"j": "k"})
    assert sorted_substitute(f, sub) == parse("@k (<>q & <>i)", Lang.H_AT)
    with pytest.raises(LanguageError):
        SubstitutionMap({}, {"i": "p"})


def test_substitution_composition():
    s1 = SubstitutionMap({"p": parse("q")}, {"i": "j"})
    s2 = SubstitutionMap({"q": parse("<>r")}, {"j": "k"})
    f = parse("p & i & q")
    assert sorted_substitute(f, s1.then(s2)) == sorted_substitute(sorted_substitute(f, s1), s2)
