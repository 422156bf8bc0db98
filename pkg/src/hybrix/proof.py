"""Checker for Hilbert-style derivations in the minimal hybrid logics and their extensions.

A derivation is a list of steps, each storing the formula it proves, so every
step can be checked locally.  Premises are referred to by 1-based step number.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence, Union

from hybrix.errors import BudgetExceeded, HybrixError, LanguageError
from hybrix.syntax import (
    TOP,
    Bot,
    Conj,
    Diamond,
    Equation,
    Exists,
    Formula,
    Lang,
    Neg,
    Nom,
    Prop,
    Sat,
    SubstitutionMap,
    box,
    check_language,
    iff,
    implies,
    occurs,
    parse,
    show,
    sorted_substitute,
    univ,
)


class StepError(HybrixError):
    """A step that does not verify; ``index`` is 1-based."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"step {index}: {reason}")
        self.index = index
        self.reason = reason

    def __eq__(self, other):
        return isinstance(other, StepError) and (self.index, self.reason) == (other.index, other.reason)

    def __hash__(self):
        return hash((self.index, self.reason))

    def to_json(self) -> dict:
        return {"index": self.index, "reason": self.reason}


# reasons reported for failed side conditions
NON_ORTHODOX_IN_BASE = "non-orthodox rule in base logic"
RULE_UNAVAILABLE = "rule not available in this logic"
AXIOM_UNAVAILABLE = "axiom not available in this logic"
OUTSIDE_LANGUAGE = "formula outside the language of the logic"
NOT_TAUTOLOGY = "not a tautology instance"
BAD_PREMISE_INDEX = "premise must be an earlier step"
WRONG_PREMISE_COUNT = "wrong number of premises"
PREMISE_SHAPE = "premise does not have the required shape"
CONCLUSION_MISMATCH = "formula is not the rule's conclusion"
SIGMA_INDEX = "no such member of sigma"
SIGMA_MISMATCH = "formula is not the stated substitution instance"
FRESH_I_PHI = "freshness: i occurs in phi"
FRESH_J_PHI = "freshness: j occurs in phi"
FRESH_J_PSI = "freshness: j occurs in psi"
DISTINCT_I_J = "distinctness: i equals j"


# --------------------------------------------------------------------------
# patterns


@dataclass(frozen=True)
class MetaFormula:
    name: str


@dataclass(frozen=True)
class MetaNom:
    name: str


@dataclass(frozen=True)
class DiaPow:
    """``<>^n child`` with ``n`` bound to the metavariable ``var``."""

    var: str
    child: object


@dataclass(frozen=True)
class BoxPow:
    """``[]^m child``; each box is peeled as ``~<>~``."""

    var: str
    child: object


@dataclass(frozen=True)
class PSat:
    nominal: MetaNom
    child: object


def _bind(env: dict, key: str, value) -> Optional[dict]:
    if key in env:
        return env if env[key] == value else None
    out = dict(env)
    out[key] = value
    return out


def match(pat, f: Formula, env: Optional[dict] = None) -> Iterator[dict]:
    """Every extension of ``env`` under which ``pat`` instantiates to ``f``."""
    env = {} if env is None else env
    if isinstance(pat, MetaFormula):
        e = _bind(env, pat.name, f)
        if e is not None:
            yield e
    elif isinstance(pat, MetaNom):
        if isinstance(f, Nom):
            e = _bind(env, pat.name, f.name)
            if e is not None:
                yield e
    elif isinstance(pat, DiaPow):
        n, g = 0, f
        while True:
            e = _bind(env, pat.var, n)
            if e is not None:
                yield from match(pat.child, g, e)
            if not isinstance(g, Diamond):
                break
            n, g = n + 1, g.child
    elif isinstance(pat, BoxPow):
        m, g = 0, f
        while True:
            e = _bind(env, pat.var, m)
            if e is not None:
                yield from match(pat.child, g, e)
            if not (isinstance(g, Neg) and isinstance(g.child, Diamond) and isinstance(g.child.child, Neg)):
                break
            m, g = m + 1, g.child.child.child
    elif isinstance(pat, PSat):
        if isinstance(f, Sat):
            e = _bind(env, pat.nominal.name, f.nominal)
            if e is not None:
                yield from match(pat.child, f.child, e)
    elif isinstance(pat, Bot):
        if isinstance(f, Bot):
            yield env
    elif isinstance(pat, (Neg, Diamond, Exists)):
        if type(f) is type(pat):
            yield from match(pat.child, f.child, env)
    elif isinstance(pat, Conj):
        if isinstance(f, Conj):
            for e in match(pat.left, f.left, env):
                yield from match(pat.right, f.right, e)
    else:
        raise TypeError(f"not a pattern: {pat!r}")


def instantiate(pat, env: Mapping) -> Formula:
    if isinstance(pat, MetaFormula):
        return env[pat.name]
    if isinstance(pat, MetaNom):
        return Nom(env[pat.name])
    if isinstance(pat, DiaPow):
        g = instantiate(pat.child, env)
        for _ in range(env[pat.var]):
            g = Diamond(g)
        return g
    if isinstance(pat, BoxPow):
        g = instantiate(pat.child, env)
        for _ in range(env[pat.var]):
            g = box(g)
        return g
    if isinstance(pat, PSat):
        return Sat(env[pat.nominal.name], instantiate(pat.child, env))
    if isinstance(pat, Bot):
        return pat
    if isinstance(pat, (Neg, Diamond, Exists)):
        return type(pat)(instantiate(pat.child, env))
    if isinstance(pat, Conj):
        return Conj(instantiate(pat.left, env), instantiate(pat.right, env))
    raise TypeError(f"not a pattern: {pat!r}")


p, q = MetaFormula("p"), MetaFormula("q")
phi, psi = MetaFormula("phi"), MetaFormula("psi")
i, j = MetaNom("i"), MetaNom("j")


def _A(x):
    return univ(x)


AXIOMS = {
    "Dual": iff(Diamond(p), Neg(box(Neg(p)))),
    "K": implies(box(implies(p, q)), implies(box(p), box(q))),
    "Nom": implies(DiaPow("n", Conj(i, p)), BoxPow("m", implies(i, p))),
    "K@": implies(PSat(j, implies(p, q)), implies(PSat(j, p), PSat(j, q))),
    "Selfdual": iff(Neg(PSat(j, p)), PSat(j, Neg(p))),
    "Intro": implies(Conj(j, p), PSat(j, p)),
    "Ref": PSat(j, j),
    "Agree": implies(PSat(i, PSat(j, p)), PSat(j, p)),
    "Back": implies(Diamond(PSat(j, p)), PSat(j, p)),
    "K_A": implies(_A(implies(p, q)), implies(_A(p), _A(q))),
    "Dual_A": iff(Exists(p), Neg(_A(Neg(p)))),
    "Incl_j": Exists(j),
    "Nom_E": implies(Exists(Conj(i, p)), _A(implies(i, p))),
    "TE": implies(p, Exists(p)),
    "4E": implies(Exists(Exists(p)), Exists(p)),
    "BE": implies(p, _A(Exists(p))),
    "Incl_dia": implies(Diamond(p), Exists(p)),
}
AXIOM_ALIASES = {"K_at": "K@", "Incl_diamond": "Incl_dia", "Incl_j": "Incl_j"}

LOGIC_AXIOMS = {
    Lang.H: ("Taut", "Dual", "K", "Nom"),
    Lang.H_AT: ("Taut", "K", "Dual", "K@", "Selfdual", "Intro", "Ref", "Agree", "Back"),
    Lang.H_E: ("Taut", "K", "Dual", "K_A", "Dual_A", "Incl_j", "Nom_E", "TE", "4E", "BE", "Incl_dia"),
}

# rule id -> (orthodox rules, non-orthodox rules) per base language
LOGIC_RULES = {
    Lang.H: ({"MP", "Subst", "Nec", "NameLite"}, {"Name", "Paste"}),
    Lang.H_AT: ({"MP", "Subst", "Nec", "Nec@"}, {"Name@", "BG@"}),
    Lang.H_E: ({"MP", "Subst", "Nec", "Nec_A"}, {"Name_E", "BG_Ediamond", "BG_EE"}),
}
RULE_ALIASES = {"ModusPonens": "MP", "Nec_at": "Nec@", "Name_at": "Name@", "BG_at": "BG@",
                "SortedSubstitution": "Subst"}
NON_ORTHODOX = set().union(*(rules[1] for rules in LOGIC_RULES.values()))


def canonical_axiom(schema: str) -> str:
    return AXIOM_ALIASES.get(schema, schema)


def canonical_rule(rule: str) -> str:
    return RULE_ALIASES.get(rule, rule)


def parse_any(text: str) -> Formula:
    """Parse in whichever language admits ``text``."""
    return parse(text, Lang.H_AT if "@" in text else Lang.H_E)


def _normalize_params(params: Mapping) -> dict:
    out = {}
    for k, v in (params or {}).items():
        if isinstance(v, str) and k in ("p", "q", "phi", "psi"):
            v = parse_any(v)
        out[k] = v
    return out


def match_axiom(schema: str, f: Formula, params: Optional[Mapping] = None) -> Optional[dict]:
    """Parameter map under which ``f`` instantiates ``schema``, or None.

    ``params`` fixes some metavariables in advance.
    """
    schema = canonical_axiom(schema)
    if schema == "Taut":
        return {} if is_tautology_instance(f) else None
    pat = AXIOMS.get(schema)
    if pat is None:
        raise KeyError(f"unknown axiom schema {schema!r}")
    for env in match(pat, f, _normalize_params(params)):
        return env
    return None


# --------------------------------------------------------------------------
# tautologies

TAUT_LETTER_LIMIT = 20


def is_tautology_instance(f: Formula) -> bool:
    """Truth-table check after abstracting maximal non-Boolean subformulas to letters."""
    letters: dict = {}

    def collect(g):
        if isinstance(g, Neg):
            collect(g.child)
        elif isinstance(g, Conj):
            collect(g.left)
            collect(g.right)
        elif not isinstance(g, Bot):
            letters.setdefault(g, len(letters))

    collect(f)
    n = len(letters)
    if n > TAUT_LETTER_LIMIT:
        raise BudgetExceeded(f"{n} propositional letters exceed the truth-table limit")
    rows = 1 << n
    full = (1 << rows) - 1
    # column for letter t: bit r is set iff bit t of r is set
    cols = []
    for t in range(n):
        block = (1 << (1 << t)) - 1
        pattern = 0
        period = 1 << (t + 1)
        for start in range(1 << t, rows, period):
            pattern |= block << start
        cols.append(pattern)

    def ev(g):
        if isinstance(g, Bot):
            return 0
        if isinstance(g, Neg):
            return full ^ ev(g.child)
        if isinstance(g, Conj):
            return ev(g.left) & ev(g.right)
        return cols[letters[g]]

    return ev(f) == full


# --------------------------------------------------------------------------
# logics and derivations


@dataclass(frozen=True)
class Logic:
    base: Lang = Lang.H
    plus: bool = False
    sigma: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "base", Lang.coerce(self.base))
        object.__setattr__(self, "sigma", tuple(self.sigma))
        for s in self.sigma:
            check_language(s, self.base)

    @property
    def name(self) -> str:
        base = {Lang.H: "H", Lang.H_AT: "H(@)", Lang.H_E: "H(E)"}[self.base]
        if self.plus:
            base = base.replace("H", "H+", 1)
        return base + (f" + {len(self.sigma)} axioms" if self.sigma else "")

    def to_json(self) -> dict:
        return {"base": self.base.value, "plus": self.plus, "sigma": [show(s) for s in self.sigma]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Logic":
        base = Lang.coerce(obj.get("base", "H"))
        return cls(base, bool(obj.get("plus", False)), tuple(parse(s, base) for s in obj.get("sigma", [])))


@dataclass(frozen=True)
class AxiomStep:
    schema: str
    formula: Formula
    params: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class SigmaStep:
    index: int
    formula: Formula
    substitution: Optional[SubstitutionMap] = None


@dataclass(frozen=True)
class RuleStep:
    rule: str
    premises: tuple
    formula: Formula
    params: Mapping = field(default_factory=dict)


Step = Union[AxiomStep, SigmaStep, RuleStep]


@dataclass(frozen=True)
class Derivation:
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def conclusion(self) -> Optional[Formula]:
        return self.steps[-1].formula if self.steps else None

    def replace(self, index: int, step: Step) -> "Derivation":
        """Copy with the 1-based step ``index`` replaced."""
        steps = list(self.steps)
        steps[index - 1] = step
        return Derivation(tuple(steps))


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    error: Optional[StepError] = None
    conclusion: Optional[Formula] = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "error": None if self.error is None else self.error.to_json(),
            "conclusion": None if self.conclusion is None else show(self.conclusion),
        }


# --------------------------------------------------------------------------
# rule checking

_NAME = implies(i, phi)
_PASTE_PREMISE = implies(DiaPow("n", Conj(i, Diamond(Conj(j, phi)))), psi)
_PASTE_CONCLUSION = implies(DiaPow("n", Conj(i, Diamond(phi))), psi)
_BG_AT_PREMISE = implies(Conj(PSat(i, Diamond(j)), PSat(j, phi)), psi)
_BG_AT_CONCLUSION = implies(PSat(i, Diamond(phi)), psi)
_BG_ED_PREMISE = implies(Conj(Exists(Conj(i, Diamond(j))), Exists(Conj(j, phi))), psi)
_BG_ED_CONCLUSION = implies(Exists(Conj(i, Diamond(phi))), psi)
_BG_EE_PREMISE = implies(Conj(Exists(Conj(i, Exists(j))), Exists(Conj(j, phi))), psi)
_BG_EE_CONCLUSION = implies(Exists(Conj(i, Exists(phi))), psi)

_BG_SHAPES = {
    "Paste": (_PASTE_PREMISE, _PASTE_CONCLUSION),
    "BG@": (_BG_AT_PREMISE, _BG_AT_CONCLUSION),
    "BG_Ediamond": (_BG_ED_PREMISE, _BG_ED_CONCLUSION),
    "BG_EE": (_BG_EE_PREMISE, _BG_EE_CONCLUSION),
}


def _params_consistent(env: Mapping, params: Mapping) -> bool:
    return all(env.get(k, v) == v for k, v in params.items())


def _check_bg(rule: str, prem: Formula, concl: Formula, params: Mapping) -> Optional[str]:
    """Paste and the BG rules: ``i != j`` and ``j`` fresh for ``phi`` and ``psi``."""
    ppat, cpat = _BG_SHAPES[rule]
    first = PREMISE_SHAPE
    for env in match(ppat, prem):
        if not _params_consistent(env, params):
            continue
        if instantiate(cpat, env) != concl:
            first = CONCLUSION_MISMATCH if first == PREMISE_SHAPE else first
            continue
        if env["i"] == env["j"]:
            reason = DISTINCT_I_J
        elif occurs(env["j"], env["phi"]):
            reason = FRESH_J_PHI
        elif occurs(env["j"], env["psi"]):
            reason = FRESH_J_PSI
        else:
            return None
        if first in (PREMISE_SHAPE, CONCLUSION_MISMATCH):
            first = reason
    return first


def _subst_from_params(params: Mapping) -> SubstitutionMap:
    props = {k: parse_any(v) if isinstance(v, str) else v for k, v in (params.get("props") or {}).items()}
    return SubstitutionMap(props, dict(params.get("noms") or {}))


def _check_rule(step: RuleStep, prems: list[Formula]) -> Optional[str]:
    rule = canonical_rule(step.rule)
    f = step.formula
    raw = {} if isinstance(step.params, SubstitutionMap) else step.params
    params = _normalize_params({k: v for k, v in raw.items() if k not in ("props", "noms")})
    arity = 2 if rule == "MP" else 1
    if len(prems) != arity:
        return WRONG_PREMISE_COUNT

    if rule == "MP":
        for imp, ante in (prems, prems[::-1]):
            if imp == implies(ante, f):
                return None
        return PREMISE_SHAPE
    (a,) = prems
    if rule == "Subst":
        sub = step.params if isinstance(step.params, SubstitutionMap) else _subst_from_params(step.params)
        return None if sorted_substitute(a, sub) == f else CONCLUSION_MISMATCH
    if rule == "Nec":
        return None if f == box(a) else CONCLUSION_MISMATCH
    if rule == "Nec_A":
        return None if f == univ(a) else CONCLUSION_MISMATCH
    if rule == "Nec@":
        if not isinstance(f, Sat) or f.child != a:
            return CONCLUSION_MISMATCH
        return None if params.get("j", f.nominal) == f.nominal else CONCLUSION_MISMATCH
    if rule == "NameLite":
        if not (isinstance(a, Neg) and isinstance(a.child, Nom)):
            return PREMISE_SHAPE
        if params.get("i", a.child.name) != a.child.name:
            return PREMISE_SHAPE
        return None if isinstance(f, Bot) else CONCLUSION_MISMATCH
    if rule in ("Name", "Name_E"):
        envs = [e for e in match(_NAME, a, {"phi": f}) if _params_consistent(e, params)]
        if not envs:
            return PREMISE_SHAPE
        return FRESH_I_PHI if occurs(envs[0]["i"], f) else None
    if rule == "Name@":
        if not isinstance(a, Sat) or a.child != f:
            return PREMISE_SHAPE
        if params.get("j", a.nominal) != a.nominal:
            return PREMISE_SHAPE
        return FRESH_J_PHI if occurs(a.nominal, f) else None
    if rule in _BG_SHAPES:
        return _check_bg(rule, a, f, params)
    return RULE_UNAVAILABLE


def _rule_status(rule: str, logic: Logic) -> Optional[str]:
    orthodox_rules, extra = LOGIC_RULES[logic.base]
    if rule in orthodox_rules:
        return None
    if rule in extra:
        return None if logic.plus else NON_ORTHODOX_IN_BASE
    return RULE_UNAVAILABLE


def check_step(step: Step, index: int, proved: Sequence[Formula], logic: Logic) -> None:
    """Raise :class:`StepError` unless ``step`` is correct given earlier formulas."""
    try:
        check_language(step.formula, logic.base)
    except LanguageError:
        raise StepError(index, OUTSIDE_LANGUAGE) from None
    if isinstance(step, AxiomStep):
        schema = canonical_axiom(step.schema)
        if schema not in LOGIC_AXIOMS[logic.base]:
            raise StepError(index, AXIOM_UNAVAILABLE)
        if schema == "Taut":
            if not is_tautology_instance(step.formula):
                raise StepError(index, NOT_TAUTOLOGY)
        elif match_axiom(schema, step.formula, step.params) is None:
            raise StepError(index, f"not an instance of {schema}")
    elif isinstance(step, SigmaStep):
        if not 0 <= step.index < len(logic.sigma):
            raise StepError(index, SIGMA_INDEX)
        expected = logic.sigma[step.index]
        if step.substitution is not None:
            expected = sorted_substitute(expected, step.substitution)
        if expected != step.formula:
            raise StepError(index, SIGMA_MISMATCH)
    elif isinstance(step, RuleStep):
        rule = canonical_rule(step.rule)
        status = _rule_status(rule, logic)
        if status:
            raise StepError(index, status)
        prems = []
        for k in step.premises:
            if not isinstance(k, int) or not 1 <= k < index:
                raise StepError(index, BAD_PREMISE_INDEX)
            prems.append(proved[k - 1])
        reason = _check_rule(step, prems)
        if reason:
            raise StepError(index, reason)
    else:
        raise StepError(index, f"unknown step type {type(step).__name__}")


def verify(d: Derivation, logic: Logic) -> VerifyResult:
    """Check every step; the first failing step is reported."""
    if not d.steps:
        return VerifyResult(False, StepError(0, "empty derivation"))
    proved: list[Formula] = []
    for n, step in enumerate(d.steps, start=1):
        try:
            check_step(step, n, proved, logic)
        except StepError as err:
            return VerifyResult(False, err)
        proved.append(step.formula)
    return VerifyResult(True, None, d.conclusion)


# --------------------------------------------------------------------------
# soundness audit


@dataclass(frozen=True)
class AuditReport:
    ok: bool
    checked: int
    excluded: int
    violators: tuple = ()
    warnings: tuple = ()

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "excluded": self.excluded,
                "violators": list(self.violators), "warnings": list(self.warnings)}


def soundness_audit(d: Derivation, logic: Logic, corpus: Sequence) -> AuditReport:
    """Check the conclusion of a verified derivation on every structure the logic is sound for.

    Members not validating sigma are excluded; for the plus logics only
    permeated algebras (strongly descriptive frames for E) are used.
    Members are hybrid structures, or two-sorted frames for E logics.
    Violators are reported by corpus position.
    """
    from hybrix.algebra import Kind, is_permeated
    from hybrix.evaluation import equation_true
    from hybrix.relational import TwoSortedFrame, frame_validates, is_strongly_descriptive

    res = verify(d, logic)
    if not res.ok:
        raise res.error
    notes = []
    if not corpus:
        notes.append("empty corpus: audit holds vacuously")
        warnings.warn(notes[-1])
    goal = d.conclusion
    checked = excluded = 0
    violators = []
    for pos, member in enumerate(corpus):
        if isinstance(member, TwoSortedFrame):
            valid = lambda f, g=member: frame_validates(g, f)  # noqa: E731
            eligible = (not logic.plus) or is_strongly_descriptive(member)
        else:
            if logic.base is Lang.H_E:
                raise LanguageError("E logics are audited on two-sorted frames")
            valid = lambda f, h=member: equation_true(h, Equation(f, TOP)).holds  # noqa: E731
            eligible = member.kind is Kind.HYBRID and ((not logic.plus) or is_permeated(member).holds)
        if not eligible or not all(valid(s) for s in logic.sigma):
            excluded += 1
            continue
        checked += 1
        if not valid(goal):
            violators.append(pos)
    return AuditReport(not violators, checked, excluded, tuple(violators), tuple(notes))


# --------------------------------------------------------------------------
# JSON


def _formula_json(f: Formula) -> str:
    return show(f)


def _param_json(v):
    if isinstance(v, (Bot, Prop, Nom, Neg, Conj, Diamond, Sat, Exists)):
        return show(v)
    return v


def step_to_json(step: Step) -> dict:
    if isinstance(step, AxiomStep):
        return {"kind": "axiom", "schema": step.schema, "formula": show(step.formula),
                "params": {k: _param_json(v) for k, v in step.params.items()}}
    if isinstance(step, SigmaStep):
        sub = None
        if step.substitution is not None:
            sub = {"props": {k: show(v) for k, v in step.substitution.props.items()},
                   "noms": dict(step.substitution.noms)}
        return {"kind": "sigma", "index": step.index, "formula": show(step.formula), "substitution": sub}
    params = step.params
    if isinstance(params, SubstitutionMap):
        params = {"props": {k: show(v) for k, v in params.props.items()}, "noms": dict(params.noms)}
    else:
        params = {k: (_param_json(v) if k not in ("props", "noms")
                      else {a: _param_json(b) for a, b in v.items()}) for k, v in params.items()}
    return {"kind": "rule", "rule": step.rule, "premises": list(step.premises),
            "formula": show(step.formula), "params": params}


def step_from_json(obj: Mapping, lang: Lang) -> Step:
    kind = obj.get("kind")
    f = parse(obj["formula"], lang)
    if kind == "axiom":
        return AxiomStep(obj["schema"], f, dict(obj.get("params") or {}))
    if kind == "sigma":
        sub = obj.get("substitution")
        if sub is not None:
            sub = SubstitutionMap({k: parse(v, lang) for k, v in (sub.get("props") or {}).items()},
                                  dict(sub.get("noms") or {}))
        return SigmaStep(int(obj["index"]), f, sub)
    if kind == "rule":
        return RuleStep(obj["rule"], tuple(obj.get("premises", [])), f, dict(obj.get("params") or {}))
    raise ValueError(f"unknown step kind {kind!r}")


def proof_to_json(d: Derivation, logic: Logic) -> dict:
    return {"logic": logic.to_json(), "steps": [step_to_json(s) for s in d.steps]}


def proof_from_json(obj: Mapping) -> tuple[Derivation, Logic]:
    logic = Logic.from_json(obj.get("logic", {}))
    return Derivation(tuple(step_from_json(s, logic.base) for s in obj.get("steps", []))), logic
