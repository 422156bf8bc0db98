"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (visible with ``-s``,
and always when the module is run directly).  Time bounds are enforced.
"""

from __future__ import annotations

import itertools
import sys
import time

import pytest

from hybrix.algebra import (
    FiniteBAO,
    all_hybrid,
    canonical_at_rows,
    check_at_axioms,
    hybrid,
    is_permeated,
    orthodox,
    product,
)
from hybrix.corpus import derivation
from hybrix.duality import underlying_algebra
from hybrix.evaluation import equation_true
from hybrix.proof import NON_ORTHODOX_IN_BASE, Logic, StepError, verify
from hybrix.relational import TwoSortedFrame, frame_validates
from hybrix.suites import SUITES, SuiteConfig
from hybrix.syntax import Lang, parse

CFG = SuiteConfig(max_atoms=3, max_worlds=3)


def _suite(name, **overrides):
    cfg = SuiteConfig(**{**CFG.to_json(), **overrides})
    res = SUITES[name](cfg)
    detail = f"{res.checked} checks, {len(res.failures)} failures, {res.seconds:.1f}s"
    if res.failures:
        detail += f"; first: {res.failures[0]}"
    return res.ok, detail


def criterion_1():
    a = hybrid(FiniteBAO.identity(1), [0])
    phi = parse("<>i")
    on_a = equation_true(a, phi).holds
    r = equation_true(product(a, a), phi)
    fals = None if r.holds else r.falsifier.noms.get("i")
    ok = on_a and not r.holds and fals in (1, 2)
    return ok, f"A: {on_a}, AxA: {r.holds}, falsifier i -> {fals}"


def criterion_2():
    s = orthodox(FiniteBAO.identity(1), {"j": 0}, 1)
    di, dj = equation_true(s, parse("<>i")).holds, equation_true(s, parse("<>j")).holds
    return di and not dj, f"<>i: {di}, <>j: {dj}"


def criterion_3():
    g = TwoSortedFrame(("u", "v"), {("u", "u")}, None, {"v"})
    a = frame_validates(g, parse("j -> []bot")) and not frame_validates(g, parse("[]bot"))
    e = derivation("name-separation")
    b = len(e.derivation.steps) == 2 and verify(e.derivation, e.logic).ok
    base = Logic(Lang.H, False, e.logic.sigma)
    c = verify(e.derivation, base).error == StepError(2, NON_ORTHODOX_IN_BASE)
    h = underlying_algebra(g)
    d = (equation_true(h, parse("j -> []bot")).holds and not equation_true(h, parse("[]bot")).holds
         and not is_permeated(h).holds)
    return a and b and c and d, f"(a) {a} (b) {b} (c) {c} (d) {d}"


def criterion_4():
    return _suite("duality")


def criterion_5():
    return _suite("lemmas")


def criterion_6():
    return _suite("atom-or-bottom")


def _naive_converse(max_atoms: int, max_designated: int):
    """Brute force over whole @ tables with no row pruning."""
    checked = bad = 0
    for k in range(1, max_atoms + 1):
        for h in all_hybrid(k):
            if len(h.designated) > max_designated:
                continue
            elems = list(h.bao.elements())
            firsts = sorted(canonical_at_rows(h))
            expected = canonical_at_rows(h)
            rows = list(itertools.product(range(len(elems)), repeat=len(elems)))
            for combo in itertools.product(rows, repeat=len(firsts)):
                table = dict(zip(firsts, combo))
                checked += 1
                if not check_at_axioms(h, table, limit=1) and table != expected:
                    bad += 1
    return checked, bad


def criterion_7():
    ok, detail = _suite("at-characterization")
    checked, bad = _naive_converse(2, 1)
    return ok and bad == 0, f"{detail}; naive cross-check {checked} tables, {bad} extra"


def criterion_8():
    return _suite("preservation", max_atoms=2)


def criterion_9():
    return _suite("hybridize", max_atoms=2)


def criterion_10():
    return _suite("kernel")


CRITERIA = [
    (1, criterion_1, 1.0),
    (2, criterion_2, 1.0),
    (3, criterion_3, 1.0),
    (4, criterion_4, 300.0),
    (5, criterion_5, 300.0),
    (6, criterion_6, None),
    (7, criterion_7, None),
    (8, criterion_8, None),
    (9, criterion_9, None),
    (10, criterion_10, 120.0),
]


def run_criterion(fn, bound):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if bound is not None and elapsed >= bound:
        ok, detail = False, f"{detail}; took {elapsed:.2f}s, bound {bound}s"
    return ok, detail, elapsed


@pytest.mark.parametrize("num,fn,bound", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, fn, bound, capsys):
    ok, detail, elapsed = run_criterion(fn, bound)
    with capsys.disabled():
        print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {detail}")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, fn, bound in CRITERIA:
        ok, detail, elapsed = run_criterion(fn, bound)
        failed += not ok
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {detail}")
    sys.exit(1 if failed else 0)
