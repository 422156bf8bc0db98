"""Exhaustive property suites over small structures.

Each suite returns a :class:`SuiteResult` listing every violation with a
JSON witness.  Enumeration is sequential and deterministic, so identical
configurations give identical results.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Optional

from hybrix.algebra import (
    FiniteBAO,
    Kind,
    all_baos,
    all_hybrid,
    bits,
    canonical_at_rows,
    check_at_axioms,
    degenerate,
    grounded,
    is_permeated,
    nom_schema_violation,
    orthodox,
    product,
    row_violations,
    structure_to_json,
)
from hybrix.corpus import derivations, equation_corpus, formula_corpus
from hybrix.duality import report_for_algebra, report_for_frame
from hybrix.errors import HybrixError, InternalInvariantBreach, NoConstantAvailable
from hybrix.evaluation import DEFAULT_BUDGET, equation_true
from hybrix.proof import soundness_audit, verify
from hybrix.relational import all_frames
from hybrix.relativization import (
    DEFAULT_NOMINAL,
    at_mode_seeds,
    classify_constants,
    hybridize_counterexample,
    lemma_suite,
    relativize_seeds,
)
from hybrix.syntax import Lang, show


@dataclass(frozen=True)
class SuiteConfig:
    max_atoms: int = 3
    max_worlds: int = 3
    trials: int = 1000
    rng_seed: int = 0
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        for name in ("max_atoms", "max_worlds", "trials", "budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")

    @classmethod
    def from_json(cls, obj: Mapping) -> "SuiteConfig":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: int(v) for k, v in obj.items()})

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, witness: dict) -> None:
        self.failures.append(witness)

    def to_json(self) -> dict:
        return {"suite": self.name, "ok": self.ok, "checked": self.checked,
                "failures": self.failures, "stats": self.stats}


def _timed(fn: Callable[..., SuiteResult]) -> Callable[..., SuiteResult]:
    def run(cfg: Optional[SuiteConfig] = None) -> SuiteResult:
        start = time.perf_counter()
        res = fn(cfg or SuiteConfig())
        res.seconds = time.perf_counter() - start
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _bao_json(bao: FiniteBAO) -> dict:
    return {"atoms": bao.k, "diamond": bao.diamond_lists()}


# --------------------------------------------------------------------------


@_timed
def duality_suite(cfg: SuiteConfig) -> SuiteResult:
    """Round trips on every hybrid algebra and every two-sorted frame up to the size limits."""
    res = SuiteResult("duality")
    algebras = frames = descriptive = 0
    for k in range(1, cfg.max_atoms + 1):
        for h in all_hybrid(k):
            rep = report_for_algebra(h)
            algebras += 1
            if not rep.ok:
                res.fail({"algebra": structure_to_json(h), "report": rep.to_json(),
                          "replay": ["roundtrip", "--algebra", "WITNESS"]})
    for n in range(1, cfg.max_worlds + 1):
        for g in all_frames(n):
            rep = report_for_frame(g)
            frames += 1
            descriptive += rep.items[4].detail["descriptive"]
            if not rep.ok:
                res.fail({"frame": g.to_json(), "report": rep.to_json(),
                          "replay": ["roundtrip", "--frame", "WITNESS"]})
    res.checked = algebras + frames
    res.stats = {"algebras": algebras, "frames": frames, "descriptive_frames": descriptive,
                 "non_descriptive_frames": frames - descriptive}
    return res


@_timed
def lemma_suite_all(cfg: SuiteConfig) -> SuiteResult:
    """The relativization lemmas on every BAO and every nonempty seed set."""
    res = SuiteResult("lemmas")
    totals: dict = {}
    for k in range(1, cfg.max_atoms + 1):
        for bao in all_baos(k):
            for seedmask in range(1, 1 << k):
                seeds = [1 << y for y in bits(seedmask)]
                rep = lemma_suite(bao, seeds)
                res.checked += 1
                for name, count in rep.checked.items():
                    totals[name] = totals.get(name, 0) + count
                for v in rep.violations:
                    res.fail({"bao": _bao_json(bao), "seeds": [bits(s) for s in seeds],
                              "lemma": v.lemma, "witness": list(v.witness)})
    res.stats = {"instances": totals}
    return res


def orthodox_bases(k: int):
    """Single-constant orthodox structures passing the Nom schema: every nominal denotes ``s``."""
    for bao in all_baos(k):
        for s in bao.elements():
            if nom_schema_violation(bao, s) is None:
                yield orthodox(bao, {}, s)


def at_bases(k: int):
    """Orthodox structures whose constants (``i1`` and the default) are atoms, with canonical @."""
    for bao in all_baos(k):
        for s, t in itertools.product(bao.atoms(), repeat=2):
            h = orthodox(bao, {"i1": s}, t)
            yield h.with_at_table({c: tuple(bao.top if c & ~a == 0 else 0 for a in bao.elements())
                                   for c in h.constant_values()})


@_timed
def atom_or_bottom_suite(cfg: SuiteConfig) -> SuiteResult:
    """Relativized constants are bottom or atoms (Nom bases) and always atoms (@ bases)."""
    res = SuiteResult("atom-or-bottom")
    counts = {"bottom": 0, "atom": 0, "nom_bases": 0, "at_bases": 0}
    for k in range(1, cfg.max_atoms + 1):
        for h in orthodox_bases(k):
            counts["nom_bases"] += 1
            for d in h.bao.atoms():
                res.checked += 1
                r = relativize_seeds(h, [d])
                sD = h.default_constant & r.D
                if sD and sD & (sD - 1):
                    res.fail({"base": structure_to_json(h), "seed": bits(d), "D": bits(r.D), "sD": bits(sD)})
                    continue
                counts["atom" if sD else "bottom"] += 1
                try:
                    classify_constants(r)
                except InternalInvariantBreach as exc:
                    res.fail({"base": structure_to_json(h), "seed": bits(d), "error": str(exc)})
        for h in at_bases(k):
            counts["at_bases"] += 1
            for d in h.bao.atoms():
                res.checked += 1
                try:
                    r = relativize_seeds(h, at_mode_seeds(h, d))
                    kinds = classify_constants(r)
                except HybrixError as exc:
                    res.fail({"base": structure_to_json(h), "seed": bits(d), "error": str(exc)})
                    continue
                if set(kinds.values()) != {"atom"}:
                    res.fail({"base": structure_to_json(h), "seed": bits(d), "classification": kinds})
    res.stats = counts
    return res


def passing_at_tables(h, limit_rows: Optional[int] = None):
    """Every @ table on ``h`` satisfying the six axioms.

    Rows are filtered one at a time by the axioms that involve a single row,
    then whole tables are checked.
    """
    bao = h.bao
    size = bao.size
    candidates = []
    for xi in sorted(h.designated):
        x = 1 << xi
        rows = [row for row in itertools.product(range(size), repeat=size)
                if not row_violations(bao, x, row, limit=1)]
        candidates.append((x, rows))
    for combo in itertools.product(*(rows for _, rows in candidates)):
        table = {x: row for (x, _), row in zip(candidates, combo)}
        if not check_at_axioms(h, table, limit=1):
            yield table


@_timed
def at_characterization_suite(cfg: SuiteConfig) -> SuiteResult:
    """Canonical @ satisfies the axioms; on small algebras it is the only table that does."""
    res = SuiteResult("at-characterization")
    canon = converse = tables = 0
    for k in range(1, cfg.max_atoms + 1):
        for h in all_hybrid(k):
            canon += 1
            bad = check_at_axioms(h, limit=1)
            if bad:
                res.fail({"direction": "canonical", "algebra": structure_to_json(h), "violation": str(bad[0])})
    for k in range(1, min(cfg.max_atoms, 2) + 1):
        for h in all_hybrid(k):
            converse += 1
            expected = canonical_at_rows(h)
            for table in passing_at_tables(h):
                tables += 1
                if table != expected:
                    res.fail({"direction": "converse", "algebra": structure_to_json(h),
                              "table": {str(bits(x)): [bits(v) for v in row] for x, row in table.items()}})
    res.checked = canon + converse
    res.stats = {"canonical_checked": canon, "converse_algebras": converse, "passing_tables": tables}
    return res


@_timed
def preservation_suite(cfg: SuiteConfig) -> SuiteResult:
    """Products preserve equations valid on the grounded factors, and preserve permeation."""
    res = SuiteResult("preservation")
    eqs = equation_corpus()
    k_max = min(cfg.max_atoms, 2)
    hybrids = [h for k in range(1, k_max + 1) for h in all_hybrid(k)]
    degens = [degenerate(b) for k in range(1, k_max + 1) for b in all_baos(k)]
    g_valid = {}
    for h in hybrids + degens:
        g = grounded(h)
        g_valid[h] = [equation_true(g, e, cfg.budget).holds for e in eqs]
    h_valid = {h: [equation_true(h, e, cfg.budget).holds for e in eqs] for h in hybrids}
    stats = {"hybrid_pairs": 0, "degenerate_pairs": 0, "premises_met": 0, "permeated_pairs": 0}

    def check(a, b, premise_a, premise_b, variant):
        stats[variant + "_pairs"] += 1
        ab = None
        for idx, e in enumerate(eqs):
            if premise_a[idx] and premise_b[idx]:
                stats["premises_met"] += 1
                ab = ab or product(a, b)
                r = equation_true(ab, e, cfg.budget)
                res.checked += 1
                if not r.holds:
                    res.fail({"variant": variant, "left": structure_to_json(a), "right": structure_to_json(b),
                              "equation": str(e), "falsifier": r.falsifier.to_json()})

    for a in hybrids:
        for b in hybrids:
            check(a, b, g_valid[a], g_valid[b], "hybrid")
    for a in degens:
        for b in hybrids:
            check(a, b, g_valid[a], h_valid[b], "degenerate")
    permeated = [h for h in hybrids if is_permeated(h).holds]
    for a in permeated:
        for b in permeated:
            stats["permeated_pairs"] += 1
            res.checked += 1
            r = is_permeated(product(a, b))
            if not r.holds:
                res.fail({"variant": "permeation", "left": structure_to_json(a), "right": structure_to_json(b),
                          "condition": r.condition, "witness": [bits(w) for w in r.witness]})
    res.stats = stats
    return res


def hybridize_bases(k: int):
    """Orthodox bases with constants ``i1``, ``j1`` and a default, all over every element, passing Nom."""
    for bao in all_baos(k):
        ok = [s for s in bao.elements() if nom_schema_violation(bao, s) is None]
        for s1, s2, dflt in itertools.product(ok, repeat=3):
            yield orthodox(bao, {"i1": s1, "j1": s2}, dflt)


def expected_case(kinds: Mapping[str, str]) -> int:
    vals = set(kinds.values())
    if vals == {"atom"}:
        return 1
    if vals == {"bottom"}:
        return 3
    return 2


@_timed
def hybridize_suite(cfg: SuiteConfig) -> SuiteResult:
    """Every refuting orthodox base yields a refuting hybrid structure, routed by the classification."""
    res = SuiteResult("hybridize")
    formulas = formula_corpus()
    cases = {1: 0, 2: 0, 3: 0}
    no_constant = 0
    for k in range(1, min(cfg.max_atoms, 2) + 1):
        for base in hybridize_bases(k):
            for phi in formulas:
                r = equation_true(base, phi, cfg.budget)
                if r.holds:
                    continue
                res.checked += 1
                witness = {"base": structure_to_json(base), "formula": show(phi),
                           "assignment": r.falsifier.to_json()}
                try:
                    out = hybridize_counterexample(base, r.falsifier, phi)
                except NoConstantAvailable:
                    # only legitimate when the base interprets every nominal as bottom
                    if any(v for v in base.constant_values()):
                        res.fail({**witness, "error": "NoConstantAvailable with a nonzero constant"})
                    no_constant += 1
                    continue
                except HybrixError as exc:
                    res.fail({**witness, "error": f"{type(exc).__name__}: {exc}"})
                    continue
                refuted = not equation_true(out.structure, phi, cfg.budget).holds
                routed = out.case == expected_case(out.classification)
                if out.structure.kind is not Kind.HYBRID or not refuted or not routed:
                    res.fail({**witness, "case": out.case, "classification": dict(out.classification),
                              "refuted": refuted, "kind": out.structure.kind.value})
                cases[out.case] += 1
    res.stats = {"cases": {str(c): n for c, n in cases.items()}, "no_constant_available": no_constant}
    return res


@_timed
def kernel_suite(cfg: SuiteConfig) -> SuiteResult:
    """Corpus derivations verify, are sound on the algebra corpus, and freshness mutants are rejected."""
    from hybrix.algebra import all_hybrid as _all_hybrid

    res = SuiteResult("kernel")
    algebras = [h for k in range(1, cfg.max_atoms + 1) for h in _all_hybrid(k)]
    frames = [g for n in range(1, cfg.max_worlds + 1) for g in all_frames(n)]
    stats = {"derivations": 0, "mutants": 0, "audited_members": 0}
    for entry in derivations():
        stats["derivations"] += 1
        res.checked += 1
        v = verify(entry.derivation, entry.logic)
        if not v.ok:
            res.fail({"derivation": entry.name, "error": v.error.to_json()})
            continue
        corpus = frames if entry.logic.base is Lang.H_E else algebras
        audit = soundness_audit(entry.derivation, entry.logic, corpus)
        stats["audited_members"] += audit.checked
        if not audit.ok:
            res.fail({"derivation": entry.name, "violators": list(audit.violators[:5])})
        for mutant, (index, reason) in entry.mutants:
            stats["mutants"] += 1
            res.checked += 1
            m = verify(mutant, entry.logic)
            if m.ok or (m.error.index, m.error.reason) != (index, reason):
                res.fail({"derivation": entry.name, "mutant_expected": [index, reason],
                          "got": None if m.ok else m.error.to_json()})
    res.stats = stats
    return res


SUITES = {
    "duality": duality_suite,
    "lemmas": lemma_suite_all,
    "atom-or-bottom": atom_or_bottom_suite,
    "at-characterization": at_characterization_suite,
    "preservation": preservation_suite,
    "hybridize": hybridize_suite,
    "kernel": kernel_suite,
}


def write_witnesses(res: SuiteResult, directory) -> list[str]:
    """One JSON file per failure; returns the paths written."""
    import os

    os.makedirs(directory, exist_ok=True)
    paths = []
    for n, w in enumerate(res.failures):
        path = os.path.join(directory, f"{res.name}-{n:04d}.json")
        with open(path, "w") as fh:
            json.dump(w, fh, indent=2, sort_keys=True)
        paths.append(path)
    return paths


__all__ = ["SuiteConfig", "SuiteResult", "SUITES", "write_witnesses", "DEFAULT_NOMINAL"]
