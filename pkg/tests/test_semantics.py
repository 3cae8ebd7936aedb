import pytest
from hypothesis import given
from hypothesis import strategies as st

from mgrz import bits
from mgrz.algebra import clop_dual
from mgrz.bundles import bundle_of_frame
from mgrz.decision import enumerate_frames
from mgrz.errors import BudgetExceeded, InputError
from mgrz.frames import MKFrame
from mgrz.semantics import (
    BundleModel,
    CounterValuation,
    Model,
    Valid,
    check_translation_equivalence,
    eval,
    eval_naive,
    eval_pred,
    frame_validity,
    pull_valuation,
    push_valuation,
)
from mgrz.syntax import Bot, Dia, Ex, Letter, Top, parse_formula, translate_t

from fixtures import (
    BARCAN,
    BARCAN_FORMULA,
    BARCAN_VALUATION,
    CHAIN2,
    TWO_POINT_BUNDLE,
    X,
    Y,
)
from strategies import LETTERS, formulas, mk_frames, valuations

p = Letter("p")


def test_eval_examples():
    M = Model(CHAIN2, {"p": 0b10})
    assert eval(M, Dia(p)) == 0b11
    assert eval(M, Ex(p)) == 0b10
    assert eval(M, Top()) == 0b11
    assert eval(M, Bot()) == 0
    B = Model(BARCAN, BARCAN_VALUATION)
    assert eval(B, parse_formula("<>Ep")) >> Y & 1
    assert not eval(B, parse_formula("E<>p")) >> Y & 1
    assert eval_naive(B, parse_formula("<>Ep"), Y)
    assert not eval_naive(B, parse_formula("E<>p"), Y)


def test_valuation_outside_frame():
    with pytest.raises(InputError):
        Model(CHAIN2, {"p": 0b100})


def test_frame_validity_examples():
    result = frame_validity(BARCAN, parse_formula(BARCAN_FORMULA))
    assert result == CounterValuation({"p": 1 << X}, Y)
    assert isinstance(frame_validity(BARCAN, parse_formula("p -> Ep")), Valid)
    one = MKFrame(1, (1,), (0,))
    assert frame_validity(one, p) == CounterValuation({"p": 0}, 0)


def test_connecting_axiom_valid_on_small_mk_frames():
    f = parse_formula("E<>p -> <>Ep")
    for n in range(1, 4):
        for F in enumerate_frames("MK", n):
            assert isinstance(frame_validity(F, f), Valid)


def test_grz_axiom_valid_on_posets():
    f = parse_formula("[]([](p->[]p)->p)->p")
    for n in range(1, 5):
        for F in enumerate_frames("MGrz", n):
            assert isinstance(frame_validity(F, f), Valid)


def test_validity_budget():
    F = MKFrame(9, tuple(1 << i for i in range(9)), tuple(range(9)))
    with pytest.raises(BudgetExceeded):
        frame_validity(F, parse_formula("p & q & r"))


def test_push_examples():
    BM = push_valuation(BARCAN, {"p": 0})
    assert all(BM.I(w, "p*") == 0 for w in range(BM.bundle.base.n))
    F = CHAIN2
    BM = push_valuation(F, {"p": 0b10})
    B = BM.bundle
    for a in range(F.n):
        assert (BM.I(B.pi[a], "p*") == 1 << a) == bool(0b10 >> a & 1)


def test_bundle_example_from_two_point_bundle():
    BM = BundleModel(TWO_POINT_BUNDLE, {0: {"p*": 0b10}})
    assert eval_pred(BM, translate_t(Dia(p)), 0, 0)
    assert not eval_pred(BM, translate_t(p), 0, 0)
    lem = translate_t(parse_formula("p | ~p"))
    assert all(eval_pred(BM, lem, 0, a) for a in range(2))
    with pytest.raises(InputError):
        eval_pred(BM, translate_t(p), 0, None)


def test_interpretation_must_stay_in_fiber():
    B = bundle_of_frame(BARCAN)
    with pytest.raises(InputError):
        BundleModel(B, {0: {"p*": 1 << Y}})


def test_translation_examples():
    report = check_translation_equivalence(BARCAN, parse_formula(BARCAN_FORMULA))
    assert report.ok and report.checked > 0
    report = check_translation_equivalence(BARCAN, parse_formula(BARCAN_FORMULA), literal=True)
    assert report.ok
    # both sides refute the Barcan formula at y under v(p) = {x}
    BM = push_valuation(BARCAN, BARCAN_VALUATION)
    g = translate_t(parse_formula(BARCAN_FORMULA))
    assert not eval_pred(BM, g, BM.bundle.pi[Y], Y)
    ident = MKFrame(3, (0b011, 0b110, 0b100), (0, 1, 2))
    assert check_translation_equivalence(ident, parse_formula("<>p -> []q")).ok


def test_sampled_translation_check_is_seeded():
    f = parse_formula("E(p & <>q) -> A<>p")
    a = check_translation_equivalence(BARCAN, f, trials=20, seed=3)
    b = check_translation_equivalence(BARCAN, f, trials=20, seed=3)
    assert a.ok and a.checked == b.checked == 40


@given(mk_frames(), formulas(), st.data())
def test_eval_matches_naive(F, f, data):
    M = Model(F, data.draw(valuations(F)))
    ext = eval(M, f)
    for x in range(F.n):
        assert bool(ext >> x & 1) == eval_naive(M, f, x)


@given(mk_frames(), formulas(), st.data())
def test_modal_clauses_match_algebra(F, f, data):
    M = Model(F, data.draw(valuations(F)))
    A = clop_dual(F)
    ext = eval(M, f)
    assert eval(M, Dia(f)) == A.apply_dia(ext)
    assert eval(M, Ex(f)) == A.apply_ex(ext)


@given(mk_frames(), st.data())
def test_pull_push_round_trip(F, data):
    v = data.draw(valuations(F))
    M = pull_valuation(push_valuation(F, v))
    assert {q: M.value(q) for q in LETTERS} == v
    assert M.frame.R == F.R and M.frame.blocks == F.blocks


@given(mk_frames(max_worlds=4), formulas(letters=("p",), max_leaves=6))
def test_translation_equivalence_random(F, f):
    assert check_translation_equivalence(F, f).ok
