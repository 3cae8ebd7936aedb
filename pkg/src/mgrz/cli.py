"""Command-line front end.

Exit codes: 0 success or valid, 1 countermodel or refutation, 2 input error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Optional, Sequence

from . import bits, formats
from .algebra import AXIOM_CLASSES, FiniteMMAlgebra, check_axioms, clop_dual, uf_dual
from .bundles import (
    bounded_strong_validity,
    bundle_of_frame,
    frame_of_bundle,
    nth_level,
)
from .decision import Countermodel, SearchConfig, decide
from .errors import InputError, InvariantViolation
from .filtration import selective_filtration, verify_bounds, verify_truth_lemma
from .frames import MKFrame, classify
from .semantics import (
    Model,
    Valid,
    check_translation_equivalence,
    eval,
    frame_validity,
)
from .syntax import (
    depth,
    formula_to_json,
    letters,
    parse_formula,
    render_formula,
    render_predicate,
    size,
    subformula_closure,
    translate_t,
)

EXIT_OK, EXIT_REFUTED, EXIT_INPUT, EXIT_BUG = 0, 1, 2, 3


class Outcome:
    """Document to print and the exit code that goes with it."""

    def __init__(self, doc: dict, code: int = EXIT_OK, text: Optional[str] = None):
        self.doc = formats.versioned(doc)
        self.code = code
        self.text = text


# --------------------------------------------------------------------------
# helpers


def _frame(path: str, close: bool) -> MKFrame:
    F = formats.model_from_json(formats.load_json(path)).frame
    return F.with_closure() if close else F


def _model(path: str, close: bool) -> Model:
    M = formats.model_from_json(formats.load_json(path))
    return Model(M.frame.with_closure(), M.valuation) if close else M


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


# --------------------------------------------------------------------------
# commands


def cmd_parse(args) -> Outcome:
    f = parse_formula(args.formula)
    return Outcome({
        "formula": render_formula(f),
        "ast": formula_to_json(f),
        "letters": sorted(letters(f)),
        "size": size(f),
        "depth": depth(f),
        "subformulas": [render_formula(g) for g in subformula_closure(f)],
    })


def cmd_check(args) -> Outcome:
    M = _model(args.model, args.close)
    f = parse_formula(args.formula)
    ext = eval(M, f)
    refuting = M.frame.full & ~ext
    doc: dict[str, Any] = {"formula": render_formula(f), "extension": bits.to_list(ext)}
    if args.world is not None:
        if not 0 <= args.world < M.frame.n:
            raise InputError(f"world {args.world} is outside the frame")
        holds = bool(ext >> args.world & 1)
        doc.update({"world": args.world, "holds": holds})
    else:
        holds = not refuting
        doc.update({"holds_everywhere": holds, "refuted_at": bits.to_list(refuting)})
    return Outcome(doc, EXIT_OK if holds else EXIT_REFUTED)


def cmd_valid(args) -> Outcome:
    F = _frame(args.frame, args.close)
    f = parse_formula(args.formula)
    result = frame_validity(F, f, budget_bits=args.budget_bits)
    doc: dict[str, Any] = {"formula": render_formula(f)}
    if isinstance(result, Valid):
        doc.update({"valid": True, "valuations_checked": result.valuations_checked})
        return Outcome(doc)
    doc.update({
        "valid": False,
        "valuation": formats.valuation_to_json(result.valuation),
        "world": result.world,
    })
    return Outcome(doc, EXIT_REFUTED)


def cmd_classify(args) -> Outcome:
    F = _frame(args.frame, args.close)
    return Outcome({"worlds": F.n, **classify(F).to_json()})


def cmd_decide(args) -> Outcome:
    f = parse_formula(args.formula)
    cfg = SearchConfig(args.frame_class, args.max_worlds, args.budget_bits, args.dedup, args.jobs)
    verdict = decide(f, cfg)
    doc: dict[str, Any] = {
        "formula": render_formula(f),
        "class": cfg.frame_class,
        "max_worlds": cfg.max_worlds,
        "dedup": cfg.dedup,
    }
    if isinstance(verdict, Countermodel):
        M = Model(verdict.frame, verdict.valuation)
        doc.update({
            "verdict": "countermodel",
            "size": verdict.size,
            "world": verdict.world,
            "frames_checked": verdict.frames_checked,
            **formats.model_to_json(M),
        })
        if args.emit_countermodel:
            out = formats.versioned({**formats.model_to_json(M), "world": verdict.world})
            _write(args.emit_countermodel, formats.dumps(out))
        return Outcome(doc, EXIT_REFUTED)
    doc.update({
        "verdict": "no_countermodel_up_to",
        "frames_checked": verdict.frames_checked,
    })
    return Outcome(doc)


def cmd_filter(args) -> Outcome:
    M = _model(args.model, args.close)
    f = parse_formula(args.formula)
    result = selective_filtration(M, f, check=not args.no_check)
    S = subformula_closure(f)
    disagreements = verify_truth_lemma(M, result, S)
    if disagreements:
        raise InvariantViolation(f"truth lemma fails: {disagreements[0]}")
    bounds = verify_bounds(result, S)
    doc = {
        "formula": render_formula(f),
        "root": result.root,
        **formats.model_to_json(result.model),
        "origins": [
            {"point": i, "origin": o, "kind": k}
            for i, (o, k) in enumerate(zip(result.origins, result.kinds))
        ],
        "log": result.log,
        "stats": result.stats,
        "bounds": bounds.to_json(),
    }
    if args.dot:
        labels = {i: f"from {M.frame.name(o)}" for i, o in enumerate(result.origins)}
        _write(args.dot, formats.frame_to_dot(result.frame, valuation=result.valuation,
                                              labels=labels, name="filtration"))
    return Outcome(doc, EXIT_REFUTED)


def cmd_translate(args) -> Outcome:
    f = parse_formula(args.formula)
    g = translate_t(f)
    doc: dict[str, Any] = {"formula": render_formula(f), "translation": render_predicate(g)}
    if args.check:
        F = _frame(args.check, args.close)
        report = check_translation_equivalence(F, f, trials=args.trials, seed=args.seed)
        doc["check"] = {"checked": report.checked, "disagreements": report.disagreements}
        if not report.ok:
            raise InvariantViolation(f"translation disagreement: {report.disagreements[0]}")
    return Outcome(doc, text=render_predicate(g))


def cmd_bundle_to(args) -> Outcome:
    return Outcome(formats.bundle_to_json(bundle_of_frame(_frame(args.frame, args.close))))


def cmd_bundle_from(args) -> Outcome:
    B = formats.bundle_from_json(formats.load_json(args.bundle))
    return Outcome(formats.frame_to_json(frame_of_bundle(B)))


def cmd_bundle_level(args) -> Outcome:
    B = formats.bundle_from_json(formats.load_json(args.bundle))
    level = nth_level(B, args.n, budget=args.budget)
    if level.level == 0:
        names = [f"w{w}" for w in level.worlds]
    else:
        names = ["(" + ",".join(map(str, t)) + ")" for t in level.worlds]
    F = MKFrame(level.n, level.R, tuple(range(level.n)), tuple(names))
    return Outcome({"level": args.n, **formats.frame_to_json(F)})


def cmd_bundle_strong(args) -> Outcome:
    B = formats.bundle_from_json(formats.load_json(args.bundle))
    f = parse_formula(args.formula)
    report = bounded_strong_validity(B, f, args.up_to, budget_bits=args.budget_bits)
    doc: dict[str, Any] = {
        "formula": render_formula(f),
        "verdict": report.verdict(),
        "holds": report.holds,
        "levels_checked": report.levels_checked,
    }
    if not report.holds:
        doc.update({
            "failing_level": report.failing_level,
            "valuation": formats.valuation_to_json(report.valuation or {}),
            "world": report.world,
        })
        return Outcome(doc, EXIT_REFUTED)
    return Outcome(doc)


def _algebra_or_frame(path: str, close: bool):
    doc = formats.load_json(path)
    if isinstance(doc, dict) and "atoms" in doc:
        return formats.algebra_from_doc(doc)
    F = formats.model_from_json(doc).frame
    return F.with_closure() if close else F


def cmd_algebra_dual(args) -> Outcome:
    obj = _algebra_or_frame(args.input, args.close)
    if isinstance(obj, FiniteMMAlgebra):
        return Outcome({"direction": "algebra to frame", **formats.frame_to_json(uf_dual(obj))})
    return Outcome({"direction": "frame to algebra", **formats.algebra_doc(clop_dual(obj))})


def cmd_algebra_check(args) -> Outcome:
    obj = _algebra_or_frame(args.input, args.close)
    A = obj if isinstance(obj, FiniteMMAlgebra) else clop_dual(obj)
    axioms = args.axioms.split(",") if args.axioms else list(AXIOM_CLASSES)
    for ax in axioms:
        if ax not in AXIOM_CLASSES:
            raise InputError(f"unknown axiom class {ax!r}; expected one of {', '.join(AXIOM_CLASSES)}")
    reports = [check_axioms(A, ax).to_json() for ax in axioms]
    passed = all(r["passed"] for r in reports)
    return Outcome({"atoms": A.m, "passed": passed, "reports": reports},
                   EXIT_OK if passed else EXIT_REFUTED)


def cmd_dot(args) -> Outcome:
    M = _model(args.frame, args.close)
    text = formats.frame_to_dot(M.frame, loops=not args.no_loops, valuation=M.valuation or None)
    if args.output:
        _write(args.output, text)
    return Outcome({"dot": text}, text=text.rstrip("\n"))


# --------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--human", action="store_true", help="aligned text instead of JSON")
    p.add_argument("--close", action="store_true",
                   help="replace R by its reflexive-transitive closure when reading frames")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="mgrz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func, help: str, parent=sub):
        p = parent.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = add("parse", cmd_parse, "parse a formula and show its structure")
    p.add_argument("formula")

    p = add("check", cmd_check, "evaluate a formula in a model")
    p.add_argument("model", help="model JSON (frame and valuation)")
    p.add_argument("formula")
    p.add_argument("--world", type=int)

    p = add("valid", cmd_valid, "decide validity of a formula on a frame")
    p.add_argument("frame")
    p.add_argument("formula")
    p.add_argument("--budget-bits", type=int, default=24)

    p = add("classify", cmd_classify, "report frame-class membership with witnesses")
    p.add_argument("frame")

    p = add("decide", cmd_decide, "bounded countermodel search")
    p.add_argument("formula")
    p.add_argument("--class", dest="frame_class", default="MGrz")
    p.add_argument("--max-worlds", type=int, default=4)
    p.add_argument("--dedup", choices=("none", "canonical-hash"), default="none")
    p.add_argument("--budget-bits", type=int, default=24)
    p.add_argument("--emit-countermodel", metavar="PATH")

    p = add("filter", cmd_filter, "selective filtration of a refuting MGrz model")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--dot", metavar="PATH", help="also write the result as Graphviz")
    p.add_argument("--no-check", action="store_true", help="skip per-step invariant checks")

    p = add("translate", cmd_translate, "predicate translation of a formula")
    p.add_argument("formula")
    p.add_argument("--check", metavar="FRAME", help="compare frame and bundle semantics on FRAME")
    p.add_argument("--trials", type=int, help="sample this many valuations instead of all")

    bundle = sub.add_parser("bundle", help="Kripke bundles")
    bsub = bundle.add_subparsers(dest="bundle_command", required=True, metavar="ACTION")
    p = add("to", cmd_bundle_to, "bundle of a frame", bsub)
    p.add_argument("frame")
    p = add("from", cmd_bundle_from, "frame of a bundle", bsub)
    p.add_argument("bundle")
    p = add("level", cmd_bundle_level, "n-th level of a bundle", bsub)
    p.add_argument("bundle")
    p.add_argument("n", type=int)
    p.add_argument("--budget", type=int, default=10**6, help="maximum number of tuples")
    p = add("strong", cmd_bundle_strong, "bounded strong validity on levels 0..N", bsub)
    p.add_argument("bundle")
    p.add_argument("formula")
    p.add_argument("--up-to", type=int, default=2)
    p.add_argument("--budget-bits", type=int, default=24)

    algebra = sub.add_parser("algebra", help="finite mm-algebras")
    asub = algebra.add_subparsers(dest="algebra_command", required=True, metavar="ACTION")
    p = add("dual", cmd_algebra_dual, "dual of a frame or an algebra", asub)
    p.add_argument("input")
    p = add("check", cmd_algebra_check, "check algebra axioms", asub)
    p.add_argument("input", help="algebra JSON, or a frame (its dual algebra is checked)")
    p.add_argument("--axioms", help=f"comma-separated subset of {','.join(AXIOM_CLASSES)}")

    p = add("dot", cmd_dot, "Graphviz export with E-blocks as clusters")
    p.add_argument("frame")
    p.add_argument("--no-loops", action="store_true", help="omit reflexive loops")
    p.add_argument("-o", "--output", metavar="PATH")
    return parser


# --------------------------------------------------------------------------
# output


def _human(doc: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    items = [(k, v) for k, v in doc.items() if k != "format"]
    width = max((len(str(k)) for k, _ in items), default=0)
    for k, v in items:
        if isinstance(v, dict) and v:
            lines.append(f"{pad}{k}:")
            lines.extend(_human(v, indent + 1))
        elif isinstance(v, list) and v and all(isinstance(e, (dict, str)) for e in v):
            lines.append(f"{pad}{k}:")
            for e in v:
                if isinstance(e, dict):
                    lines.append(f"{pad}  - " + ", ".join(f"{a}={b}" for a, b in e.items()))
                else:
                    lines.append(f"{pad}  - {e}")
        else:
            lines.append(f"{pad}{str(k).ljust(width)}  {v}")
    return lines


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        outcome = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=err)
        return EXIT_BUG
    if args.human:
        print(outcome.text if outcome.text is not None else "\n".join(_human(outcome.doc)), file=out)
    else:
        out.write(formats.dumps(outcome.doc))
    return outcome.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
