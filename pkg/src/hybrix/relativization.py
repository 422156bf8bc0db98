"""Relativization of a finite orthodox structure to the converse-diamond closure of seed atoms.

Given seed atoms, ``D`` is the least element above the seeds closed under the
converse diamond.  The relativized algebra has carrier ``{a & D}``, top ``D``,
complement ``~a & D`` and diamond ``diamond(a) & D``.  Since ``D`` is itself
an element of a finite powerset algebra, the relativized algebra is
re-indexed here as a :class:`FiniteBAO` over the atoms below ``D``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from hybrix.algebra import (
    FiniteBAO,
    HybridStructure,
    Kind,
    bits,
    check_at_axioms,
    degenerate,
    hybrid,
    is_atom_mask,
    is_permeated,
    nom_schema_holds,
    pair,
    product,
)
from hybrix.errors import (
    BoxDViolation,
    InternalInvariantBreach,
    KindError,
    NoConstantAvailable,
    NotAtom,
    NotRefuted,
    SchemaUnchecked,
)
from hybrix.evaluation import Assignment, equation_true, meaning
from hybrix.syntax import TOP, Equation, Formula, Sat, noms_of, props_of, subformulas

DEFAULT_NOMINAL = "*"   # stands for every nominal without an explicit constant


def _bao(base: Union[FiniteBAO, HybridStructure]) -> FiniteBAO:
    return base.bao if isinstance(base, HybridStructure) else base


@dataclass(frozen=True)
class DComputation:
    D: int
    per_seed: tuple          # (seed, D_i, steps) for each seed
    steps: int               # largest stabilization index over the seeds


def compute_D_trace(base, seeds: Iterable[int]) -> DComputation:
    bao = _bao(base)
    seeds = list(seeds)
    if not seeds:
        raise NotAtom("at least one seed atom is required")
    per_seed = []
    for d in seeds:
        bao.check(d)
        if not is_atom_mask(d):
            raise NotAtom(f"seed {bits(d)} is not an atom")
        acc, cur, steps = d, d, 0
        while True:
            cur = bao.diamond_inv(cur)
            if cur & ~acc == 0:
                break
            acc |= cur
            steps += 1
        per_seed.append((d, acc, steps))
    D = 0
    for _, Di, _ in per_seed:
        D |= Di
    return DComputation(D, tuple(per_seed), max(s for _, _, s in per_seed))


def compute_D(base, seeds: Iterable[int]) -> int:
    """Join of all converse-diamond iterates of the seed atoms."""
    return compute_D_trace(base, seeds).D


@dataclass(frozen=True)
class Relativization:
    """``base`` relativized to ``D``.

    ``atoms_of_D`` lists the base atom indices below ``D``; the relativized
    algebra uses them as its atoms ``0 .. len-1`` in that order.  ``algebra``
    is an orthodox structure when the base has constants.
    """

    base: Union[FiniteBAO, HybridStructure]
    D: int
    atoms_of_D: tuple
    algebra: Union[FiniteBAO, HybridStructure]
    at_mode: bool = False
    seeds: tuple = ()
    steps: int = 0

    @property
    def bao(self) -> FiniteBAO:
        return _bao(self.algebra)

    def h(self, a: int) -> int:
        """The homomorphism ``a -> a & D`` (result in base encoding)."""
        return a & self.D

    def to_sub(self, a: int) -> int:
        """Re-index an element below ``D`` into the relativized algebra."""
        out = 0
        for j, i in enumerate(self.atoms_of_D):
            if a >> i & 1:
                out |= 1 << j
        return out

    def from_sub(self, a: int) -> int:
        out = 0
        for j in bits(a):
            out |= 1 << self.atoms_of_D[j]
        return out

    def constant_D(self, name: str) -> int:
        """``s_name & D`` in base encoding."""
        return self.base.constant(name) & self.D


def _orthodox(base) -> Optional[HybridStructure]:
    return base if isinstance(base, HybridStructure) and base.kind is Kind.ORTHODOX else None


def relativize(base, D: int, seeds: Sequence[int] = (), steps: int = 0) -> Relativization:
    """Build the relativized algebra and verify its defining properties.

    Raises :class:`BoxDViolation` unless ``D <= box D``.  Closure of the
    carrier, the homomorphism equations and (with @) the @ homomorphism are
    checked exhaustively; a failure raises :class:`InternalInvariantBreach`.
    """
    bao = _bao(base)
    bao.check(D)
    if D == 0:
        raise BoxDViolation("D must be nonzero")
    if D & ~bao.box(D):
        raise BoxDViolation(f"D = {bits(D)} is not below box D = {bits(bao.box(D))}")
    atoms = tuple(bits(D))
    index = {i: j for j, i in enumerate(atoms)}

    def sub(a):
        out = 0
        for i in bits(a & D):
            out |= 1 << index[i]
        return out

    sub_bao = FiniteBAO(len(atoms), tuple(sub(bao.diamond(1 << i)) for i in atoms))
    top = bao.top
    # carrier closure and homomorphism equations, in base encoding
    for a in bao.elements():
        ha = a & D
        if (top ^ ha) & D != (top ^ a) & D:
            raise InternalInvariantBreach(f"complement homomorphism fails at {bits(a)}")
        if bao.diamond(ha) & D != bao.diamond(a) & D:
            raise InternalInvariantBreach(f"diamond homomorphism fails at {bits(a)}")
        if sub_bao.diamond(sub(ha)) != sub(bao.diamond(a)):
            raise InternalInvariantBreach(f"re-indexed diamond disagrees at {bits(a)}")

    ortho = _orthodox(base)
    at_mode = bool(ortho and ortho.at_table)
    if ortho is None:
        algebra: Union[FiniteBAO, HybridStructure] = sub_bao
    else:
        consts = {name: sub(v) for name, v in ortho.constants}
        default = sub(ortho.default_constant)
        rows = None
        if at_mode:
            rows = {}
            for s in set(consts.values()) | {default}:
                if not is_atom_mask(s):
                    raise InternalInvariantBreach(f"relativized constant {bits(s)} is not an atom; @ is undefined")
                rows[s] = tuple(sub_bao.top if s & ~a == 0 else 0 for a in sub_bao.elements())
            for s_base in ortho.constant_values():
                s = sub(s_base)
                for a in bao.elements():
                    # h(@_s a) = @^D_{h(s)} h(a)
                    if sub(ortho.at(s_base, a)) != rows[s][sub(a)]:
                        raise InternalInvariantBreach(f"@ homomorphism fails at s={bits(s_base)}, a={bits(a)}")
        algebra = HybridStructure(sub_bao, frozenset(), Kind.ORTHODOX, tuple(consts.items()), default,
                                  tuple(rows.items()) if rows else ())
    return Relativization(base, D, atoms, algebra, at_mode, tuple(seeds), steps)


def relativize_seeds(base, seeds: Sequence[int]) -> Relativization:
    trace = compute_D_trace(base, seeds)
    return relativize(base, trace.D, tuple(seeds), trace.steps)


def at_mode_seeds(base: HybridStructure, d: int) -> list[int]:
    """``d`` followed by the least atom below each nonzero constant (including the default)."""
    seeds = [d]
    for s in base.constant_values():
        if s:
            low = s & -s
            if low not in seeds:
                seeds.append(low)
    return seeds


# --------------------------------------------------------------------------
# classification of relativized constants


def _schema_mode(base: HybridStructure) -> str:
    if base.kind is not Kind.ORTHODOX:
        raise KindError("classification concerns orthodox structures")
    if base.at_table:
        if check_at_axioms(base, limit=1):
            raise SchemaUnchecked("the base does not satisfy the @ axioms")
        return "at"
    if not nom_schema_holds(base):
        raise SchemaUnchecked("the base does not satisfy the Nom schema")
    return "nom"


def classify_constants(r: Relativization, names: Optional[Iterable[str]] = None) -> dict[str, str]:
    """Map each nominal (default: every constant plus ``"*"`` for the default) to ``"bottom"`` or ``"atom"``."""
    base = r.base
    if not isinstance(base, HybridStructure):
        raise KindError("classification needs an orthodox base")
    mode = _schema_mode(base)
    if names is None:
        names = [n for n, _ in base.constants] + [DEFAULT_NOMINAL]
    out = {}
    for name in names:
        s = base.default_constant if name == DEFAULT_NOMINAL else base.constant(name)
        sD = s & r.D
        if sD == 0:
            if mode == "at":
                raise InternalInvariantBreach(f"relativized constant of {name} is bottom in @ mode")
            out[name] = "bottom"
        elif is_atom_mask(sD):
            out[name] = "atom"
        else:
            raise InternalInvariantBreach(f"relativized constant of {name} is {bits(sD)}, neither bottom nor an atom")
    return out


# --------------------------------------------------------------------------
# turning a refuting orthodox interpretation into a refuting hybrid algebra


@dataclass(frozen=True)
class HybridizeResult:
    structure: HybridStructure
    assignment: Assignment
    case: int
    d: int
    D: int
    classification: Mapping[str, str]
    sigma_preserved: bool
    sigma_failures: tuple = ()
    second_D: Optional[int] = None
    chosen_nominal: Optional[str] = None

    def to_json(self) -> dict:
        from hybrix.algebra import structure_to_json

        return {
            "case": self.case,
            "d": bits(self.d),
            "D": bits(self.D),
            "second_D": None if self.second_D is None else bits(self.second_D),
            "chosen_nominal": self.chosen_nominal,
            "classification": dict(self.classification),
            "structure": structure_to_json(self.structure),
            "assignment": self.assignment.to_json(),
            "sigma_preserved": self.sigma_preserved,
            "sigma_failures": list(self.sigma_failures),
        }


def _has_sat(phi: Formula) -> bool:
    return any(isinstance(g, Sat) for g in subformulas(phi))


def _nominal_set(base: HybridStructure, phi: Formula, sigma: Sequence[Formula]) -> list[str]:
    names = set(noms_of(phi)) | {n for n, _ in base.constants}
    for s in sigma:
        names |= noms_of(s)
    return sorted(names) + [DEFAULT_NOMINAL]


def _const(base: HybridStructure, name: str) -> int:
    return base.default_constant if name == DEFAULT_NOMINAL else base.constant(name)


def hybridize_counterexample(base: HybridStructure, nu: Assignment, phi: Formula,
                             sigma: Sequence[Formula] = ()) -> HybridizeResult:
    """From an orthodox interpretation refuting ``phi`` under ``nu``, build a hybrid algebra refuting it.

    Follows three cases on the relativized constants: all nonzero (the
    relativized algebra itself), some zero (its square), all zero (a product
    with a second relativization seeded below a nonzero constant).
    """
    mode = _schema_mode(base)
    bao = base.bao
    value = meaning(base, nu, phi)
    if value == bao.top:
        raise NotRefuted("the assignment does not refute the formula")
    if mode == "nom" and _has_sat(phi):
        raise KindError("@ formulas need a base with an @ table")
    d = (bao.top ^ value) & -(bao.top ^ value)
    names = _nominal_set(base, phi, sigma)

    if mode == "at":
        r = relativize_seeds(base, at_mode_seeds(base, d))
    else:
        r = relativize_seeds(base, [d])
    cls = classify_constants(r, names)
    sD = {n: r.to_sub(_const(base, n) & r.D) for n in names}
    nuD = {p: r.to_sub(v & r.D) for p, v in nu.props.items()}
    sub_bao = r.bao
    phi_noms = sorted(noms_of(phi))
    second_D = None
    chosen = None

    nonzero = [n for n in names if sD[n]]
    if len(nonzero) == len(names):
        case = 1
        X = {bits(sD[n])[0] for n in names}
        structure = hybrid(sub_bao, X)
        if mode == "at":
            structure = HybridStructure(sub_bao, frozenset(X), Kind.HYBRID)
        assignment = Assignment(dict(nuD), {i: sD[i] for i in phi_noms})
    elif nonzero:
        case = 2
        chosen = nonzero[0]
        A = hybrid(sub_bao, {bits(sD[n])[0] for n in nonzero})
        structure = product(A, A)
        props = {p: pair(A, v, v) for p, v in nuD.items()}
        noms = {i: pair(A, sD[i], 0) if sD[i] else pair(A, 0, sD[chosen]) for i in phi_noms}
        assignment = Assignment(props, noms)
    else:
        case = 3
        candidates = [n for n in names if _const(base, n)]
        if not candidates:
            raise NoConstantAvailable("every constant of the base is bottom")
        chosen = candidates[0]
        s_j = _const(base, chosen)
        d2 = s_j & -s_j
        r2 = relativize_seeds(base, [d2])
        second_D = r2.D
        classify_constants(r2, names)
        sD2 = {n: r2.to_sub(_const(base, n) & r2.D) for n in names}
        A = degenerate(sub_bao)
        B = hybrid(r2.bao, {bits(v)[0] for v in sD2.values() if v})
        structure = product(A, B)
        props = {p: pair(A, v, r2.to_sub(nu.props[p] & r2.D)) for p, v in nuD.items()}
        noms = {i: pair(A, 0, sD2[i] if sD2[i] else sD2[chosen]) for i in phi_noms}
        assignment = Assignment(props, noms)

    if structure.kind is not Kind.HYBRID:
        raise InternalInvariantBreach("hybridization produced a structure without designated atoms")
    needed = {p: assignment.props.get(p, 0) for p in props_of(phi)}
    if meaning(structure, Assignment(needed, assignment.noms), phi) == structure.bao.top:
        raise InternalInvariantBreach("hybridized structure does not refute the formula")

    failures = []
    for idx, s in enumerate(sigma):
        if equation_true(base, Equation(s, TOP)).holds and not equation_true(structure, Equation(s, TOP)).holds:
            failures.append(idx)
    return HybridizeResult(structure, assignment, case, d, r.D, cls, not failures, tuple(failures), second_D, chosen)


# --------------------------------------------------------------------------
# lemma suite


@dataclass(frozen=True)
class LemmaViolation:
    lemma: str
    witness: tuple


@dataclass(frozen=True)
class LemmaReport:
    D: int
    horizon: int
    checked: Mapping[str, int]
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "D": bits(self.D),
            "horizon": self.horizon,
            "checked": dict(self.checked),
            "violations": [{"lemma": v.lemma, "witness": list(v.witness)} for v in self.violations],
        }


def lemma_suite(base, seeds: Sequence[int]) -> LemmaReport:
    """Check the algebraic lemmas behind relativization exhaustively.

    Exponents run over ``0 .. r`` where ``r`` is the index at which the powers
    of the diamond start repeating, which covers every natural number.
    """
    bao = _bao(base)
    top = bao.top
    elems = list(bao.elements())
    atoms = bao.atoms()
    horizon = bao.power_horizon()
    dpow = [tuple(elems)]
    ipow = [tuple(elems)]
    for _ in range(horizon):
        dpow.append(tuple(bao.diamond_table[v] for v in dpow[-1]))
        ipow.append(tuple(bao.inverse_table[v] for v in ipow[-1]))
    bpow = [tuple(top ^ t[top ^ a] for a in elems) for t in dpow]
    viol: list[LemmaViolation] = []
    checked = {}

    def record(name, ok, witness):
        checked[name] = checked.get(name, 0) + 1
        if not ok:
            viol.append(LemmaViolation(name, witness))

    for m in range(horizon + 1):
        for a in atoms:
            for b in atoms:
                record("atom-adjoint", (a & ~ipow[m][b] == 0) == (b & ~dpow[m][a] == 0), (m, a, b))
        for a in elems:
            for b in atoms:
                record("nonbot", ((a & ipow[m][b]) != 0) == (b & ~dpow[m][a] == 0), (m, a, b))
            for b in elems:
                record("box-diamond", bpow[m][a] & dpow[m][b] & ~dpow[m][a & b] == 0, (m, a, b))
    for a in elems:
        for b in elems:
            record("adjunction-inverse", (bao.diamond_inv(a) & ~b == 0) == (a & ~bao.box(b) == 0), (a, b))
            record("adjunction-box-inverse", (bao.diamond(a) & ~b == 0) == (a & ~bao.box_inv(b) == 0), (a, b))
        record("pointwise-adjoints",
               bao.pointwise_box_inv(a) == bao.box_inv(a) and bao.pointwise_diamond_inv(a) == bao.diamond_inv(a), (a,))

    trace = compute_D_trace(bao, seeds)
    D = trace.D
    record("D-below-box-D", D & ~bao.box(D) == 0, (D,))
    for a in elems:
        aD = a & D
        record("carrier-closure", bao.diamond(aD) & D == bao.diamond(a) & D and ((top ^ a) & D) == ((top ^ aD) & D), (a,))
        record("homomorphism", (top ^ a) & D == (top ^ aD) & D and bao.diamond(a) & D == bao.diamond(aD) & D, (a,))
    record("surjective", all((a & D) & D == a & D for a in elems) and {a & D for a in elems} == {a for a in elems if a & ~D == 0}, (D,))
    # relativized diamond: d <= diamond^n a implies d <= (diamond^D)^n a for carrier elements a
    for d, _, _ in trace.per_seed:
        for a in elems:
            if a & ~D:
                continue
            cur_full = a
            cur_rel = a
            for n in range(1, horizon + 1):
                cur_full = bao.diamond(cur_full)
                cur_rel = bao.diamond(cur_rel) & D
                record("relativized-diamond", not (d & cur_full) or bool(d & cur_rel), (n, d, a))
    return LemmaReport(D, horizon, checked, tuple(viol))


# --------------------------------------------------------------------------
# permeation of relativized algebras


@dataclass(frozen=True)
class PermeationWitnessReport:
    permeated: bool
    failure: tuple = ()
    witnesses: Mapping[int, int] = field(default_factory=dict)   # b -> designated atom below b

    def to_json(self) -> dict:
        return {
            "permeated": self.permeated,
            "failure": [x if isinstance(x, int) and i == 0 else bits(x) for i, x in enumerate(self.failure)],
            "witnesses": {str(bits(b)): bits(x) for b, x in sorted(self.witnesses.items())},
        }


def permeation_witnesses(h: HybridStructure) -> PermeationWitnessReport:
    res = is_permeated(h)
    xmask = h.designated_mask
    wit = {}
    for b in range(1, h.bao.size):
        below = b & xmask
        if below:
            wit[b] = below & -below
    failure = () if res.holds else (res.condition,) + tuple(res.witness)
    return PermeationWitnessReport(res.holds, failure, wit)
