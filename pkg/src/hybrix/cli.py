"""Command line interface.

Every command writes a JSON verdict to stdout and a one-line summary to
stderr.  Exit status: 0 when the check holds, 1 when it fails (the JSON then
carries a witness), 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional, Sequence

from hybrix import kernels
from hybrix.algebra import (
    FiniteBAO,
    Kind,
    all_baos,
    bits,
    grounded,
    hybrid,
    is_permeated,
    mask,
    product,
    structure_from_json,
    structure_to_json,
)
from hybrix.duality import duality_report, ultrafilter_frame, underlying_algebra
from hybrix.errors import HybrixError, NotRefuted
from hybrix.evaluation import DEFAULT_BUDGET, Assignment, equation_true, meaning
from hybrix.relational import TwoSortedFrame, all_frames, frame_check
from hybrix.syntax import TOP, Equation, Lang, language_of, parse, show, to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(payload: dict, summary: str, code: int) -> int:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    sys.stderr.write(summary + "\n")
    return code


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _json_arg(text: str):
    """Inline JSON, or ``@file`` / a path to a JSON file."""
    if text.startswith("@"):
        return _load_json(text[1:])
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return _load_json(text)


def _structure(path: str):
    return structure_from_json(_load_json(path))


def _frame(path: str) -> TwoSortedFrame:
    return TwoSortedFrame.from_json(_load_json(path))


def _formula(text: str, lang: Optional[str] = None):
    if lang is not None:
        return parse(text, lang)
    # pick the language from the connectives used
    return parse(text, Lang.H_AT if "@" in text else Lang.H_E)


def _seed(bao: FiniteBAO, text: str) -> int:
    name = text[1:] if text.startswith("a") else text
    if not name.isdigit() or int(name) >= bao.k:
        raise UsageError(f"seed {text!r} is not an atom a0..a{bao.k - 1}")
    return 1 << int(name)


# --------------------------------------------------------------------------
# commands


def cmd_parse(args) -> int:
    f = parse(args.formula, args.lang)
    return _emit({"formula": show(f), "core": show(f, sugar=False), "ast": to_json(f),
                  "language": language_of(f).value}, show(f), EXIT_OK)


def cmd_eval(args) -> int:
    h = _structure(args.algebra)
    f = _formula(args.formula, args.lang)
    v = Assignment.from_json(_json_arg(args.assignment), h.bao) if args.assignment else Assignment()
    value = meaning(h, v, f)
    return _emit({"formula": show(f), "value": bits(value), "is_top": value == h.bao.top},
                 f"{show(f)} denotes {bits(value)}", EXIT_OK)


def cmd_valid(args) -> int:
    f = _formula(args.formula, args.lang)
    if args.frame:
        g = _frame(args.frame)
        verdict = frame_check(g, f, args.budget)
        payload = {"formula": show(f), "valid": verdict.holds}
        if not verdict.holds:
            payload["falsifier"] = {"valuation": {k: sorted(v, key=str) for k, v in verdict.valuation.items()},
                                    "world": verdict.world}
        return _emit(payload, f"frame {'validates' if verdict.holds else 'refutes'} {show(f)}",
                     EXIT_OK if verdict.holds else EXIT_FAIL)
    if not args.algebra:
        raise UsageError("valid needs --algebra or --frame")
    h = _structure(args.algebra)
    rhs = _formula(args.rhs, args.lang) if args.rhs else TOP
    res = equation_true(h, Equation(f, rhs), args.budget)
    payload = {"equation": f"{show(f)} = {show(rhs)}", "valid": res.holds, "assignments": res.assignments}
    if not res.holds:
        payload["falsifier"] = res.falsifier.to_json()
    summary = f"{h.describe()} {'validates' if res.holds else 'refutes'} {show(f)} = {show(rhs)}"
    return _emit(payload, summary, EXIT_OK if res.holds else EXIT_FAIL)


def cmd_perm(args) -> int:
    h = _structure(args.algebra)
    r = is_permeated(h)
    payload = {"permeated": r.holds}
    if not r.holds:
        payload["condition"] = r.condition
        payload["witness"] = [bits(w) for w in r.witness]
    return _emit(payload, "permeated" if r.holds else f"not permeated (condition {r.condition})",
                 EXIT_OK if r.holds else EXIT_FAIL)


def cmd_product(args) -> int:
    a, b = _structure(args.left), _structure(args.right)
    ab = product(a, b)
    payload = {"structure": structure_to_json(ab)}
    code = EXIT_OK
    if args.formula:
        f = _formula(args.formula, args.lang)
        # hybrid factors are checked grounded; with a degenerate left factor the right one is checked as is
        right = grounded(b) if a.kind is Kind.HYBRID else b
        premises = [equation_true(grounded(a), f, args.budget).holds, equation_true(right, f, args.budget).holds]
        res = equation_true(ab, f, args.budget)
        payload.update({"formula": show(f), "factors_grounded_valid": premises, "product_valid": res.holds})
        if not res.holds:
            payload["falsifier"] = res.falsifier.to_json()
            code = EXIT_FAIL
    return _emit(payload, ab.describe(), code)


def cmd_dualize(args) -> int:
    if args.to == "frame":
        g = ultrafilter_frame(_structure(args.input))
        return _emit({"frame": g.to_json()}, f"frame with {g.n} worlds", EXIT_OK)
    h = underlying_algebra(_frame(args.input))
    return _emit({"algebra": structure_to_json(h)}, h.describe(), EXIT_OK)


def cmd_roundtrip(args) -> int:
    if bool(args.algebra) == bool(args.frame):
        raise UsageError("roundtrip needs exactly one of --algebra and --frame")
    obj = _structure(args.algebra) if args.algebra else _frame(args.frame)
    rep = duality_report(obj)
    return _emit(rep.to_json(), "duality items hold" if rep.ok else "duality item fails",
                 EXIT_OK if rep.ok else EXIT_FAIL)


def cmd_relativize(args) -> int:
    from hybrix.relativization import (
        classify_constants,
        compute_D_trace,
        lemma_suite,
        relativize,
    )

    h = _structure(args.algebra)
    seeds = [_seed(h.bao, s) for s in args.seed]
    trace = compute_D_trace(h, seeds)
    r = relativize(h, trace.D, tuple(seeds), trace.steps)
    alg = r.algebra
    payload = {
        "D": bits(r.D),
        "steps": trace.steps,
        "atoms_of_D": list(r.atoms_of_D),
        "algebra": structure_to_json(alg) if not isinstance(alg, FiniteBAO) else
        {"atoms": alg.k, "diamond": alg.diamond_lists()},
    }
    if h.kind is Kind.ORTHODOX:
        payload["classification"] = classify_constants(r)
    rep = lemma_suite(h, seeds)
    payload["lemmas"] = rep.to_json()
    return _emit(payload, f"D = {bits(r.D)}", EXIT_OK if rep.ok else EXIT_FAIL)


def cmd_hybridize(args) -> int:
    from hybrix.relativization import hybridize_counterexample, permeation_witnesses

    h = _structure(args.algebra)
    f = _formula(args.formula, args.lang)
    sigma = []
    if args.sigma:
        sigma = [_formula(s, args.lang) for s in _load_json(args.sigma)]
    if args.assignment:
        v = Assignment.from_json(_json_arg(args.assignment), h.bao)
    else:
        res = equation_true(h, f, args.budget)
        if res.holds:
            raise NotRefuted("the base validates the formula")
        v = res.falsifier
    out = hybridize_counterexample(h, v, f, sigma)
    payload = out.to_json()
    payload["permeation"] = permeation_witnesses(out.structure).to_json()
    return _emit(payload, f"case {out.case}: {out.structure.describe()}", EXIT_OK)


def cmd_prove_check(args) -> int:
    from hybrix.proof import proof_from_json, soundness_audit, verify

    try:
        d, logic = proof_from_json(_load_json(args.proof))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed proof file: {exc}") from exc
    res = verify(d, logic)
    payload = res.to_json()
    if res.ok and args.audit:
        from hybrix.algebra import all_hybrid

        if logic.base is Lang.H_E:
            corpus = [g for n in range(1, args.max_size + 1) for g in all_frames(n)]
        else:
            corpus = [x for k in range(1, args.max_size + 1) for x in all_hybrid(k)]
        audit = soundness_audit(d, logic, corpus)
        payload["audit"] = audit.to_json()
        if not audit.ok:
            return _emit(payload, "verified but audit found violators", EXIT_FAIL)
    if res.ok:
        return _emit(payload, f"verified: {show(res.conclusion)}", EXIT_OK)
    return _emit(payload, str(res.error), EXIT_FAIL)


def _config(args):
    from hybrix.suites import SuiteConfig

    base = {}
    if args.config:
        base = _load_json(args.config)
        if not isinstance(base, dict):
            raise UsageError("suite config must be a JSON object")
    for key in ("max_atoms", "max_worlds", "trials", "rng_seed", "budget"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    try:
        return SuiteConfig.from_json(base)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_suite(args) -> int:
    from hybrix.suites import SUITES, write_witnesses

    cfg = _config(args)
    names = list(SUITES) if args.name == "all" else [args.name]
    results = []
    ok = True
    for name in names:
        r = SUITES[name](cfg)
        entry = r.to_json()
        if not r.ok and args.witness_dir:
            entry["witness_files"] = write_witnesses(r, args.witness_dir)
        results.append(entry)
        ok &= r.ok
        sys.stderr.write(f"{name}: {'pass' if r.ok else 'FAIL'} ({r.checked} checks, {r.seconds:.1f}s)\n")
    return _emit({"config": cfg.to_json(), "results": results}, "all suites pass" if ok else "suite failures",
                 EXIT_OK if ok else EXIT_FAIL)


def _gen_items(args):
    if args.kind == "frame":
        n = args.worlds
        if n is None or n < 1:
            raise UsageError("gen frame needs --worlds >= 1")
        for g in all_frames(n, powerset_only=args.powerset):
            yield g.to_json()
        return
    k = args.atoms
    if k is None or k < 1:
        raise UsageError(f"gen {args.kind} needs --atoms >= 1")
    for bao in all_baos(k):
        if args.kind == "bao":
            yield {"atoms": k, "diamond": bao.diamond_lists()}
        else:
            for xmask in range(1, 1 << k):
                yield structure_to_json(hybrid(bao, bits(xmask)))


def _random_items(args):
    rng = random.Random(args.seed)
    for _ in range(args.random):
        if args.kind == "frame":
            n = args.worlds or 1
            rel = [[u, v] for u in range(n) for v in range(n) if rng.random() < 0.5]
            pts = [w for w in range(n) if rng.random() < 0.5] or [rng.randrange(n)]
            yield {"worlds": list(range(n)), "rel": rel, "admissible": "powerset", "points": sorted(pts)}
            continue
        k = args.atoms or 1
        diamond = [[x for x in range(k) if rng.random() < 0.5] for _ in range(k)]
        if args.kind == "bao":
            yield {"atoms": k, "diamond": diamond}
        else:
            x = [y for y in range(k) if rng.random() < 0.5] or [rng.randrange(k)]
            yield structure_to_json(hybrid(FiniteBAO(k, tuple(mask(r) for r in diamond)), x))


def cmd_gen(args) -> int:
    items = list(_random_items(args) if args.random else _gen_items(args))
    return _emit({"kind": args.kind, "count": len(items), "items": items}, f"{len(items)} structures", EXIT_OK)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybrix", description="Hybrid algebras, frames and derivations.")
    sub = p.add_subparsers(dest="command", required=True)

    def lang_opt(sp, default=None):
        sp.add_argument("--lang", choices=["H", "H_AT", "H_E"], default=default,
                        help="formula language (default: inferred from the connectives)")

    sp = sub.add_parser("parse", help="parse a formula and print its core form")
    sp.add_argument("formula")
    lang_opt(sp, "H")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("eval", help="value of a formula under an assignment")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--assignment", help='JSON such as {"props": {"p": [0]}, "noms": {"i1": [1]}}')
    lang_opt(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("valid", help="truth of an equation on an algebra, or validity on a frame")
    sp.add_argument("--algebra")
    sp.add_argument("--frame")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--rhs", help="right-hand side (default top)")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    lang_opt(sp)
    sp.set_defaults(func=cmd_valid)

    sp = sub.add_parser("perm", help="check permeation")
    sp.add_argument("--algebra", required=True)
    sp.set_defaults(func=cmd_perm)

    sp = sub.add_parser("product", help="product of two structures, optionally checking a formula")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--formula")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    lang_opt(sp)
    sp.set_defaults(func=cmd_product)

    sp = sub.add_parser("dualize", help="ultrafilter frame of an algebra or algebra of a frame")
    sp.add_argument("--to", choices=["frame", "algebra"], required=True)
    sp.add_argument("input")
    sp.set_defaults(func=cmd_dualize)

    sp = sub.add_parser("roundtrip", help="duality report for an algebra or a frame")
    sp.add_argument("--algebra")
    sp.add_argument("--frame")
    sp.set_defaults(func=cmd_roundtrip)

    sp = sub.add_parser("relativize", help="relativize to the closure of seed atoms")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--seed", action="append", required=True, help="seed atom such as a0 (repeatable)")
    sp.set_defaults(func=cmd_relativize)

    sp = sub.add_parser("hybridize", help="turn an orthodox counterexample into a hybrid one")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--sigma", help="JSON file with a list of formulas")
    sp.add_argument("--assignment", help="refuting assignment (default: the first one found)")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    lang_opt(sp)
    sp.set_defaults(func=cmd_hybridize)

    sp = sub.add_parser("prove-check", help="verify a derivation file")
    sp.add_argument("proof")
    sp.add_argument("--audit", action="store_true", help="also audit the conclusion on small structures")
    sp.add_argument("--max-size", type=int, default=3)
    sp.set_defaults(func=cmd_prove_check)

    from hybrix.suites import SUITES

    sp = sub.add_parser("suite", help="run property suites")
    sp.add_argument("name", choices=sorted(SUITES) + ["all"])
    sp.add_argument("--config", help="JSON file with suite settings")
    for opt in ("max-atoms", "max-worlds", "trials", "rng-seed", "budget"):
        sp.add_argument(f"--{opt}", type=int, dest=opt.replace("-", "_"))
    sp.add_argument("--witness-dir", default="witnesses", help="where failure witnesses are written")
    sp.set_defaults(func=cmd_suite)

    sp = sub.add_parser("gen", help="enumerate or sample structures")
    sp.add_argument("kind", choices=["bao", "hybrid", "frame"])
    sp.add_argument("--atoms", type=int)
    sp.add_argument("--worlds", type=int)
    sp.add_argument("--powerset", action="store_true", help="frames with every subset admissible")
    sp.add_argument("--random", type=int, metavar="N", help="sample N structures instead of enumerating")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_gen)

    sub.add_parser("backend", help="report the kernel backend").set_defaults(
        func=lambda a: _emit({"backend": kernels.BACKEND}, kernels.BACKEND, EXIT_OK))
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NotRefuted as exc:
        return _emit({"error": type(exc).__name__, "message": str(exc)}, f"error: {exc}", EXIT_FAIL)
    except (UsageError, HybrixError) as exc:
        sys.stdout.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        sys.stderr.write(f"hybrix: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
