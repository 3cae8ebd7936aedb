"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line; the lines are printed at the end
of the pytest run (see conftest) and when this file is run as a script.
"""

import io
import random
from functools import lru_cache

from mgrz import bits
from mgrz.algebra import check_axioms, clop_dual, uf_dual
from mgrz.bundles import bounded_strong_validity, iter_bundles, roundtrip_iso_check
from mgrz.cli import run
from mgrz.decision import (
    Countermodel,
    NoCountermodelUpTo,
    SearchConfig,
    brute_force_count,
    count_frames,
    decide,
    enumerate_frames,
)
from mgrz.errors import BoundViolation
from mgrz.filtration import selective_filtration, verify_bounds, verify_truth_lemma
from mgrz.frames import classify, frames_isomorphic, max_set, qmax_set, smax_set
from mgrz.generators import random_formula, random_mk_frame, random_refuting_instance, random_valuation
from mgrz.semantics import BundleModel, Model, check_translation_equivalence, eval, eval_naive, eval_pred
from mgrz.syntax import parse_formula, subformula_closure, translate_t

from fixtures import BARCAN, COMMUTATIVITY_FORMULA, COMMUTATIVITY_VALUATION, FOUR, SQUARE, TWO_POINT_BUNDLE

RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def mk_frames_up_to(n: int) -> tuple:
    return tuple(F for k in range(1, n + 1) for F in enumerate_frames("MK", k))


# 1 ------------------------------------------------------------------------


def test_criterion_1_bundle_example():
    BM = BundleModel(TWO_POINT_BUNDLE, {0: {"p*": 0b10}})  # I_w(P) = {b}
    dia_pa = eval_pred(BM, translate_t(parse_formula("<>p")), 0, 0)
    pa = eval_pred(BM, translate_t(parse_formula("p")), 0, 0)
    f = parse_formula("<>p -> p")
    level0 = bounded_strong_validity(TWO_POINT_BUNDLE, f, 0)
    up_to_1 = bounded_strong_validity(TWO_POINT_BUNDLE, f, 1)
    ok = dia_pa and not pa and level0.holds and not up_to_1.holds and up_to_1.failing_level == 1
    report(1, ok, f"w |= <>P(a): {dia_pa}, w |= P(a): {pa}, base valid: {level0.holds}, "
                  f"strong validity {up_to_1.verdict()}")


# 2 ------------------------------------------------------------------------


def test_criterion_2_round_trips():
    failures = 0
    exhaustive = mk_frames_up_to(4)
    failures += sum(not roundtrip_iso_check(F).passed for F in exhaustive)
    rng = random.Random(2)
    for _ in range(500):
        F = random_mk_frame(rng, rng.randint(1, 8))
        failures += not roundtrip_iso_check(F).passed
    bundles = 0
    for k in range(1, 5):
        for m in range(1, k + 1):
            for B in iter_bundles(k, m, canonical_pi=k == 4):
                bundles += 1
                failures += not roundtrip_iso_check(B).passed
    report(2, failures == 0, f"{len(exhaustive)} MK frames n<=4, 500 random n<=8, "
                             f"{bundles} bundles |X|<=4; {failures} failures")


# 3 ------------------------------------------------------------------------

CORPUS = [
    "p",
    "<>p -> p",
    "[]p -> p",
    "p -> []<>p",
    "<><>p -> <>p",
    "[]([](p -> []p) -> p) -> p",
    "Ep",
    "Ap -> p",
    "p -> Ep",
    "Ep -> AEp",
    "EEp -> Ep",
    "<>Ep -> E<>p",
    "E<>p -> <>Ep",
    "<>Ap -> A<>p",
    "A[]p -> []Ap",
    "E(p & <>q) -> A<>p",
    "[](p | q) -> []p | <>q",
    "~E(q & <>~q)",
    "<>q -> Eq",
    "A(p -> q) -> (Ep -> Eq)",
]


def test_criterion_3_translation():
    frames = mk_frames_up_to(3)
    checked = disagreements = 0
    for text in CORPUS:
        f = parse_formula(text)
        for F in frames:
            r = check_translation_equivalence(F, f)
            checked += r.checked
            disagreements += len(r.disagreements)
    report(3, disagreements == 0 and len(CORPUS) == 20,
           f"{len(CORPUS)} formulas x {len(frames)} MK frames n<=3, "
           f"{checked} valuation transfers; {disagreements} disagreements")


# 4 ------------------------------------------------------------------------


def _e_q_blocks(F):
    # E_Q[x] = Q[x] meet Q^-1[x], straight from the definition
    Q = F.Q
    return tuple(bits.from_iter(y for y in bits.bits(Q[x]) if Q[y] >> x & 1) for x in range(F.n))


def test_criterion_4_point_theorems():
    failures = frames = 0
    for n in range(1, 5):
        for F in enumerate_frames("MGrz", n):
            frames += 1
            failures += _e_q_blocks(F) != F.E
            for U in range(1, 1 << n):
                m = max_set(F, U)
                s = smax_set(F, U)
                failures += m != qmax_set(F, U)
                failures += any(not F.R[x] & m for x in bits.bits(U))
                failures += any(not F.Q[x] & s for x in bits.bits(U))
    report(4, failures == 0, f"{frames} MGrz frames n<=4, all subsets; {failures} failures")


# 5 ------------------------------------------------------------------------


def test_criterion_5_duality():
    mismatches = iso_failures = 0
    frames = mk_frames_up_to(4)
    for F in frames:
        A = clop_dual(F)
        is_mgrz = classify(F).flags["MGrz"]
        algebra_ok = check_axioms(A, "Grz").passed and check_axioms(A, "MM").passed
        mismatches += algebra_ok != is_mgrz
        iso_failures += frames_isomorphic(uf_dual(A), F) is None
    square_fails = not check_axioms(clop_dual(SQUARE), "Grz").passed
    ok = mismatches == 0 and iso_failures == 0 and square_fails
    report(5, ok, f"{len(frames)} MK frames n<=4: {mismatches} axiom/class mismatches, "
                  f"{iso_failures} uf(clop(F)) not iso F; Grz fails on X^2: {square_fails}")


# 6 ------------------------------------------------------------------------


def test_criterion_6_filtration():
    failures = aborts = 0
    for seed in range(1000):
        M, phi = random_refuting_instance(random.Random(seed), max_worlds=8, max_nodes=10)
        S = subformula_closure(phi)
        try:
            result = selective_filtration(M, phi)
        except BoundViolation:
            aborts += 1
            continue
        ok = (
            not verify_truth_lemma(M, result, S)
            and verify_bounds(result, S).passed
            and not eval(result.model, phi) >> result.root & 1
        )
        failures += not ok
    report(6, failures == 0 and aborts == 0,
           f"1000 seeded instances; {failures} failures, {aborts} bound-cap aborts")


# 7 ------------------------------------------------------------------------


def test_criterion_7_decision_fixtures():
    lines = []
    barcan = decide(parse_formula("<>Ep -> E<>p"), SearchConfig("MGrz", 4))
    ok = isinstance(barcan, Countermodel) and barcan.size == 3
    ok = ok and frames_isomorphic(barcan.frame, BARCAN) is not None
    lines.append(f"Barcan size {getattr(barcan, 'size', None)}")
    for text in ("[]([](p -> []p) -> p) -> p", "<>Ap -> A<>p",
                 "Ap -> p", "p -> Ep", "Ep -> AEp", "EEp -> Ep", "A(p -> q) -> (Ap -> Aq)"):
        v = decide(parse_formula(text), SearchConfig("MGrz", 4))
        ok = ok and isinstance(v, NoCountermodelUpTo) and v.max_worlds == 4
    lines.append("theorems: none up to 4")
    f = parse_formula("<>q -> Eq")
    grzu = decide(f, SearchConfig("GrzU", 4))
    mgrz = decide(f, SearchConfig("MGrz", 4))
    ok = ok and isinstance(grzu, NoCountermodelUpTo)
    ok = ok and isinstance(mgrz, Countermodel) and mgrz.size == 2
    lines.append(f"<>q -> Eq: GrzU none up to 4, MGrz size {getattr(mgrz, 'size', None)}")
    report(7, ok, "; ".join(lines))


# 8 ------------------------------------------------------------------------


def test_criterion_8_oracles():
    rng = random.Random(8)
    disagreements = 0
    for _ in range(10_000):
        n = rng.randint(1, 5)
        F = random_mk_frame(rng, n)
        M = Model(F, random_valuation(rng, n, ("p", "q")))
        f = random_formula(rng, 12)
        x = rng.randrange(n)
        disagreements += bool(eval(M, f) >> x & 1) != eval_naive(M, f, x)
    count_mismatch = []
    for cls in ("MK", "MS4", "MGrz", "GrzU", "MPlusGrz", "MGL", "MGrzB"):
        for n in (2, 3):
            a, b = count_frames(cls, n), brute_force_count(cls, n)
            if a != b:
                count_mismatch.append(f"{cls} n={n}: {a} vs {b}")
    report(8, disagreements == 0 and not count_mismatch,
           f"10000 triples, {disagreements} disagreements; counts n=2,3 for 7 classes, "
           f"mismatches: {count_mismatch or 'none'}")


# 9 ------------------------------------------------------------------------


def _cli(*argv) -> str:
    out = io.StringIO()
    run([str(a) for a in argv], out, io.StringIO())
    return out.getvalue()


def test_criterion_9_determinism(tmp_path):
    import json

    from mgrz.formats import model_to_json

    model = tmp_path / "four.json"
    model.write_text(json.dumps(model_to_json(Model(FOUR, COMMUTATIVITY_VALUATION))))
    runs = []
    for args in (
        ["decide", "<>Ep -> E<>p", "--max-worlds", 4],
        ["decide", "<>Ep -> E<>p", "--max-worlds", 4, "--dedup", "canonical-hash"],
        ["decide", "E<>p -> <>p & Ep", "--class", "MS4", "--max-worlds", 3],
        ["filter", model, COMMUTATIVITY_FORMULA],
    ):
        outputs = {_cli(*args, "--jobs", j) for j in (1, 2, 1, 2)}
        runs.append(len(outputs) == 1 and all(outputs))
    report(9, all(runs), f"{len(runs)} commands x jobs 1,2 twice each; byte-identical: {runs}")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for t in tests:
        try:
            if "tmp_path" in t.__code__.co_varnames[: t.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    t(Path(d))
            else:
                t()
        except AssertionError:
            pass
