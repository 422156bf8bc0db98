"""Fixed corpora of equations, formulas and derivations used by the suites."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from hybrix.proof import (
    DISTINCT_I_J,
    FRESH_I_PHI,
    FRESH_J_PHI,
    FRESH_J_PSI,
    AxiomStep,
    Derivation,
    Logic,
    RuleStep,
    SigmaStep,
)
from hybrix.syntax import Equation, Lang, SubstitutionMap, parse

# equations over the basic language, as "lhs = rhs" (a bare formula means "= top")
EQUATION_TEXTS = (
    "<>i1",
    "i1 -> <>i1",
    "<>i1 -> i1",
    "<>(i1 & p) -> [](i1 -> p)",
    "<><>(i1 & p) -> [](i1 -> p)",
    "(i1 & p) -> [][](i1 -> p)",
    "i1 -> ~<>i1",
    "i1 -> []<>i1",
    "<>i1 -> []<>i1",
    "p -> <>p",
    "<><>p -> <>p",
    "<>(i1 & <>j1) -> <>j1",
    "i1 | ~i1",
    "~i1",
    "<>p -> []p",
    "<>(i1 & j1) -> (i1 -> j1)",
    "<>top",
    "(i1 & <>i1) -> <>(i1 & p) | []~p",
    "<>(p & q) = <>p & <>q",
    "<>i1 & <>j1 = <>(i1 | j1)",
)

# formulas used for turning orthodox counterexamples into hybrid ones
FORMULA_TEXTS = (
    "<>i1",
    "~i1",
    "i1",
    "i1 -> <>i1",
    "<>i1 -> i1",
    "i1 -> ~<>i1",
    "p -> <>p",
    "<>p -> p",
    "<>(i1 & p) -> [](i1 -> p)",
    "<>j1 -> []j1",
    "i1 -> j1",
    "<>(i1 & <>p) -> <>p",
    "<><>i1 -> <>i1",
    "[]bot",
    "(i1 & p) | <>(j1 & ~p) | k1",
)


def _split_equation(text: str) -> Equation:
    if " = " in text:
        lhs, rhs = text.split(" = ")
        return Equation(parse(lhs), parse(rhs))
    return Equation(parse(text), parse("top"))


def equation_corpus() -> list[Equation]:
    return [_split_equation(t) for t in EQUATION_TEXTS]


def formula_corpus() -> list:
    return [parse(t) for t in FORMULA_TEXTS]


# --------------------------------------------------------------------------
# derivations


@dataclass(frozen=True)
class Entry:
    name: str
    logic: Logic
    derivation: Derivation
    mutants: tuple = ()       # (derivation, (index, reason)) pairs that must be rejected


def _steps(lang: Lang, spec) -> Derivation:
    out = []
    for row in spec:
        kind = row[0]
        if kind == "ax":
            _, schema, text, *rest = row
            out.append(AxiomStep(schema, parse(text, lang), rest[0] if rest else {}))
        elif kind == "sigma":
            _, index, text, *rest = row
            sub = None
            if rest:
                props, noms = rest[0]
                sub = SubstitutionMap({p: parse(v, lang) for p, v in props.items()}, noms)
            out.append(SigmaStep(index, parse(text, lang), sub))
        else:
            _, rule, prems, text, *rest = row
            out.append(RuleStep(rule, tuple(prems), parse(text, lang), rest[0] if rest else {}))
    return Derivation(tuple(out))


def _entry(name, lang, plus, spec, sigma=(), mutants=()):
    logic = Logic(lang, plus, tuple(parse(s, lang) for s in sigma))
    return Entry(name, logic, _steps(lang, spec),
                 tuple((_steps(lang, m), expected) for m, expected in mutants))


H, AT, E = Lang.H, Lang.H_AT, Lang.H_E


def derivations() -> list[Entry]:
    """Fifty derivations covering every axiom schema and every rule."""
    d = [
        # basic logic
        _entry("taut-excluded-middle", H, False, [("ax", "Taut", "p | ~p")]),
        _entry("dual", H, False, [("ax", "Dual", "<>(p & i) <-> ~[]~(p & i)")]),
        _entry("k", H, False, [("ax", "K", "[](p -> q) -> ([]p -> []q)")]),
        _entry("nom-0-0", H, False, [("ax", "Nom", "(i & p) -> (i -> p)", {"n": 0, "m": 0})]),
        _entry("nom-2-1", H, False, [("ax", "Nom", "<><>(i & p) -> [](i -> p)", {"n": 2, "m": 1})]),
        _entry("nom-1-2", H, False, [("ax", "Nom", "<>(i & <>q) -> [][](i -> <>q)")]),
        _entry("nec-taut", H, False, [("ax", "Taut", "p | ~p"), ("rule", "Nec", [1], "[](p | ~p)")]),
        _entry("box-monotone", H, False, [
            ("ax", "Taut", "(p & q) -> p"),
            ("rule", "Nec", [1], "[]((p & q) -> p)"),
            ("ax", "K", "[]((p & q) -> p) -> ([](p & q) -> []p)"),
            ("rule", "MP", [3, 2], "[](p & q) -> []p"),
        ]),
        _entry("subst-nom", H, False, [
            ("ax", "Nom", "<>(i & p) -> [](i -> p)"),
            ("rule", "Subst", [1], "<>(j & (q & r)) -> [](j -> (q & r))",
             {"props": {"p": "q & r"}, "noms": {"i": "j"}}),
        ]),
        _entry("subst-k", H, False, [
            ("ax", "K", "[](p -> q) -> ([]p -> []q)"),
            ("rule", "Subst", [1], "[](<>p -> q) -> ([]<>p -> []q)", {"props": {"p": "<>p"}}),
        ]),
        _entry("dual-mp", H, False, [
            ("ax", "Dual", "<>p <-> ~[]~p"),
            ("ax", "Taut", "(<>p <-> ~[]~p) -> (<>p -> ~[]~p)"),
            ("rule", "MP", [2, 1], "<>p -> ~[]~p"),
        ]),
        _entry("namelite", H, False, [("sigma", 0, "~j"), ("rule", "NameLite", [1], "bot")], sigma=["~j"]),
        _entry("namelite-subst", H, False, [
            ("sigma", 0, "~j"),
            ("rule", "Subst", [1], "~k", {"noms": {"j": "k"}}),
            ("rule", "NameLite", [2], "bot", {"i": "k"}),
        ], sigma=["~j"]),
        _entry("sigma-reflexive-nec", H, False, [
            ("sigma", 0, "(q & r) -> <>(q & r)", ({"p": "q & r"}, {})),
            ("rule", "Nec", [1], "[]((q & r) -> <>(q & r))"),
        ], sigma=["p -> <>p"]),
        _entry("sigma-t-instance", H, False, [
            ("sigma", 0, "[]<>q -> <>q", ({"p": "<>q"}, {})),
        ], sigma=["[]p -> p"]),
        _entry("nom-nec-k", H, False, [
            ("ax", "Nom", "<>(i & p) -> [](i -> p)"),
            ("rule", "Nec", [1], "[](<>(i & p) -> [](i -> p))"),
            ("ax", "K", "[](<>(i & p) -> [](i -> p)) -> ([]<>(i & p) -> [][](i -> p))"),
            ("rule", "MP", [3, 2], "[]<>(i & p) -> [][](i -> p)"),
        ]),
        # non-orthodox rules of the basic logic
        _entry("name-separation", H, True, [("sigma", 0, "j -> []bot"), ("rule", "Name", [1], "[]bot")],
               sigma=["j -> []bot"],
               mutants=[([("sigma", 0, "j -> []bot"),
                          ("ax", "Taut", "(j -> []bot) -> (j -> ([]bot & ~(j & ~j)))"),
                          ("rule", "MP", [2, 1], "j -> ([]bot & ~(j & ~j))"),
                          ("rule", "Name", [3], "[]bot & ~(j & ~j)")], (4, FRESH_I_PHI))]),
        _entry("name-taut", H, True, [("ax", "Taut", "i -> (p | ~p)"), ("rule", "Name", [1], "p | ~p")],
               mutants=[([("ax", "Taut", "i -> (i | ~i)"), ("rule", "Name", [1], "i | ~i")], (2, FRESH_I_PHI))]),
        _entry("name-sigma", H, True, [
            ("sigma", 0, "i -> (p -> <>p)"),
            ("rule", "Name", [1], "p -> <>p"),
        ], sigma=["i -> (p -> <>p)"],
            mutants=[([("sigma", 0, "i -> (p -> <>p)"),
                       ("rule", "Subst", [1], "i -> (<>i -> <><>i)", {"props": {"p": "<>i"}}),
                       ("rule", "Name", [2], "<>i -> <><>i")], (3, FRESH_I_PHI))]),
        _entry("paste-0", H, True, [
            ("ax", "Taut", "(i & <>(j & p)) -> i"),
            ("rule", "Paste", [1], "(i & <>p) -> i"),
        ], mutants=[
            ([("ax", "Taut", "(i & <>(j & p)) -> (i | j)"), ("rule", "Paste", [1], "(i & <>p) -> (i | j)")],
             (2, FRESH_J_PSI)),
            ([("ax", "Taut", "(i & <>(j & (p & j))) -> i"), ("rule", "Paste", [1], "(i & <>(p & j)) -> i")],
             (2, FRESH_J_PHI)),
            ([("ax", "Taut", "(i & <>(i & p)) -> i"), ("rule", "Paste", [1], "(i & <>p) -> i")],
             (2, DISTINCT_I_J)),
        ]),
        _entry("paste-1", H, True, [
            ("ax", "Taut", "<>(i & <>(j & p)) -> (q | ~q)"),
            ("rule", "Paste", [1], "<>(i & <>p) -> (q | ~q)"),
        ], mutants=[
            ([("ax", "Taut", "<>(i & <>(j & p)) -> (j | ~j)"), ("rule", "Paste", [1], "<>(i & <>p) -> (j | ~j)")],
             (2, FRESH_J_PSI)),
        ]),
        _entry("paste-2-nec", H, True, [
            ("ax", "Taut", "<><>(i & <>(j & p)) -> ~bot"),
            ("rule", "Paste", [1], "<><>(i & <>p) -> ~bot"),
            ("rule", "Nec", [2], "[](<><>(i & <>p) -> ~bot)"),
        ]),
        _entry("name-after-subst", H, True, [
            ("ax", "Taut", "k -> (p -> p)"),
            ("rule", "Subst", [1], "k -> (<>q -> <>q)", {"props": {"p": "<>q"}}),
            ("rule", "Name", [2], "<>q -> <>q"),
        ]),
        # satisfaction operator
        _entry("k-at", AT, False, [("ax", "K@", "@j (p -> q) -> (@j p -> @j q)")]),
        _entry("selfdual", AT, False, [("ax", "Selfdual", "~@j p <-> @j ~p")]),
        _entry("intro", AT, False, [("ax", "Intro", "(j & p) -> @j p")]),
        _entry("ref", AT, False, [("ax", "Ref", "@j j")]),
        _entry("agree", AT, False, [("ax", "Agree", "@i @j p -> @j p")]),
        _entry("back", AT, False, [("ax", "Back", "<>@j p -> @j p")]),
        _entry("nec-at-taut", AT, False, [("ax", "Taut", "p | ~p"), ("rule", "Nec@", [1], "@j (p | ~p)")]),
        _entry("k-dual-taut-at", AT, False, [
            ("ax", "K", "[](@j p -> q) -> ([]@j p -> []q)"),
            ("ax", "Dual", "<>@j p <-> ~[]~@j p"),
            ("ax", "Taut", "@j p -> @j p"),
        ]),
        _entry("intro-nec", AT, False, [
            ("ax", "Intro", "(j & p) -> @j p"),
            ("rule", "Nec", [1], "[]((j & p) -> @j p)"),
        ]),
        _entry("ref-subst", AT, False, [("ax", "Ref", "@j j"), ("rule", "Subst", [1], "@k k", {"noms": {"j": "k"}})]),
        _entry("agree-ref-mp", AT, False, [
            ("ax", "Ref", "@j j"),
            ("rule", "Nec@", [1], "@i @j j"),
            ("ax", "Agree", "@i @j j -> @j j", {"i": "i", "j": "j"}),
            ("rule", "MP", [3, 2], "@j j"),
        ]),
        _entry("name-at", AT, True, [
            ("ax", "Taut", "p | ~p"),
            ("rule", "Nec@", [1], "@j (p | ~p)"),
            ("rule", "Name@", [2], "p | ~p"),
        ], mutants=[([("ax", "Taut", "j | ~j"), ("rule", "Nec@", [1], "@j (j | ~j)"),
                      ("rule", "Name@", [2], "j | ~j")], (3, FRESH_J_PHI))]),
        _entry("name-at-sigma", AT, True, [
            ("sigma", 0, "@j (p -> <>p)"),
            ("rule", "Name@", [1], "p -> <>p"),
        ], sigma=["@j (p -> <>p)"]),
        _entry("bg-at", AT, True, [
            ("ax", "Taut", "(@i <>j & @j p) -> (q | ~q)"),
            ("rule", "BG@", [1], "@i <>p -> (q | ~q)"),
        ], mutants=[
            ([("ax", "Taut", "(@i <>j & @j p) -> (j | ~j)"), ("rule", "BG@", [1], "@i <>p -> (j | ~j)")],
             (2, FRESH_J_PSI)),
            ([("ax", "Taut", "(@i <>i & @i p) -> (q | ~q)"), ("rule", "BG@", [1], "@i <>p -> (q | ~q)")],
             (2, DISTINCT_I_J)),
        ]),
        _entry("bg-at-selfimp", AT, True, [
            ("ax", "Taut", "(@i <>j & @j <>p) -> (@i <><>p -> @i <><>p)"),
            ("rule", "BG@", [1], "@i <><>p -> (@i <><>p -> @i <><>p)"),
        ], mutants=[
            ([("ax", "Taut", "(@i <>j & @j (p & j)) -> (q | ~q)"), ("rule", "BG@", [1], "@i <>(p & j) -> (q | ~q)")],
             (2, FRESH_J_PHI)),
        ]),
        # global modality
        _entry("k-a", E, False, [("ax", "K_A", "A (p -> q) -> (A p -> A q)")]),
        _entry("dual-a", E, False, [("ax", "Dual_A", "E p <-> ~A ~p")]),
        _entry("incl-j", E, False, [("ax", "Incl_j", "E j")]),
        _entry("nom-e", E, False, [("ax", "Nom_E", "E (i & p) -> A (i -> p)")]),
        _entry("te", E, False, [("ax", "TE", "p -> E p")]),
        _entry("4e", E, False, [("ax", "4E", "E E p -> E p")]),
        _entry("be", E, False, [("ax", "BE", "p -> A E p")]),
        _entry("incl-dia", E, False, [("ax", "Incl_dia", "<>p -> E p")]),
        _entry("nec-a-k-dual", E, False, [
            ("ax", "Taut", "E p | ~E p"),
            ("rule", "Nec_A", [1], "A (E p | ~E p)"),
            ("ax", "K", "[](p -> E p) -> ([]p -> []E p)"),
            ("ax", "Dual", "<>E p <-> ~[]~E p"),
            ("ax", "TE", "<>q -> E <>q"),
            ("rule", "Nec", [5], "[](<>q -> E <>q)"),
            ("ax", "TE", "q -> E q"),
            ("ax", "Taut", "(q -> E q) -> (~E q -> ~q)"),
            ("rule", "MP", [8, 7], "~E q -> ~q"),
            ("rule", "Subst", [9], "~E <>r -> ~<>r", {"props": {"q": "<>r"}}),
        ]),
        _entry("name-e", E, True, [("ax", "Taut", "i -> (p | ~p)"), ("rule", "Name_E", [1], "p | ~p")],
               mutants=[([("ax", "Taut", "i -> (E i | ~E i)"), ("rule", "Name_E", [1], "E i | ~E i")],
                         (2, FRESH_I_PHI))]),
        _entry("bg-e-diamond", E, True, [
            ("ax", "Taut", "(E (i & <>j) & E (j & p)) -> (q | ~q)"),
            ("rule", "BG_Ediamond", [1], "E (i & <>p) -> (q | ~q)"),
        ], mutants=[
            ([("ax", "Taut", "(E (i & <>j) & E (j & p)) -> (E j | ~E j)"),
              ("rule", "BG_Ediamond", [1], "E (i & <>p) -> (E j | ~E j)")], (2, FRESH_J_PSI)),
            ([("ax", "Taut", "(E (i & <>i) & E (i & p)) -> (q | ~q)"),
              ("rule", "BG_Ediamond", [1], "E (i & <>p) -> (q | ~q)")], (2, DISTINCT_I_J)),
        ]),
        _entry("bg-e-e", E, True, [
            ("ax", "Taut", "(E (i & E j) & E (j & p)) -> (q | ~q)"),
            ("rule", "BG_EE", [1], "E (i & E p) -> (q | ~q)"),
        ], mutants=[
            ([("ax", "Taut", "(E (i & E j) & E (j & (p | j))) -> (q | ~q)"),
              ("rule", "BG_EE", [1], "E (i & E (p | j)) -> (q | ~q)")], (2, FRESH_J_PHI)),
        ]),
    ]
    return d


def derivation(name: str) -> Optional[Entry]:
    for e in derivations():
        if e.name == name:
            return e
    return None
