import pytest

from mgrz.decision import (
    Countermodel,
    NoCountermodelUpTo,
    SearchConfig,
    brute_force_count,
    count_frames,
    decide,
    decode,
    encode,
    enumerate_frames,
    partitions,
    refute_on_frame,
    relation_codes,
)
from mgrz.errors import BudgetExceeded, InputError
from mgrz.frames import frames_isomorphic, in_class
from mgrz.semantics import Model, eval
from mgrz.syntax import parse_formula

from fixtures import BARCAN, BARCAN_FORMULA


def test_encode_roundtrip():
    rows = (0b011, 0b010, 0b110)
    assert decode(encode(rows), 3) == rows
    assert encode((0b10, 0b00)) == 0b0010


def test_partitions_are_bell_numbers():
    assert [len(partitions(n)) for n in range(1, 6)] == [1, 2, 5, 15, 52]
    assert partitions(3) == ((0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2))


@pytest.mark.parametrize("kind,counts", [
    ("poset", [1, 3, 19, 219, 4231]),
    ("preorder", [1, 4, 29, 355, 6942]),
    ("strict", [1, 3, 19, 219]),
])
def test_relation_counts(kind, counts):
    for n, c in enumerate(counts, 1):
        codes = relation_codes(kind, n)
        assert len(codes) == c
        assert list(codes) == sorted(set(codes))


@pytest.mark.parametrize("cls", ["MK", "MS4", "MGrz", "GrzU", "MPlusGrz", "MGL", "MGrzB"])
@pytest.mark.parametrize("n", [1, 2])
def test_counts_match_brute_force(cls, n):
    assert count_frames(cls, n) == brute_force_count(cls, n)


@pytest.mark.parametrize("cls", ["MGrz", "MS4", "GrzU"])
def test_counts_match_brute_force_three(cls):
    assert count_frames(cls, 3) == brute_force_count(cls, 3)


def test_enumerated_frames_are_in_class():
    for cls in ("MGrz", "MGL", "MPlusGrz"):
        for F in enumerate_frames(cls, 3):
            assert in_class(F, cls)


def test_dedup_keeps_one_per_class():
    reps = list(enumerate_frames("MGrz", 3, "canonical-hash"))
    for i, F in enumerate(reps):
        for G in reps[:i]:
            assert frames_isomorphic(F, G) is None
    for F in enumerate_frames("MGrz", 3):
        assert any(frames_isomorphic(F, G) is not None for G in reps)


def test_caps():
    with pytest.raises(BudgetExceeded):
        count_frames("MK", 5)
    with pytest.raises(BudgetExceeded):
        count_frames("MGrz", 7)


def test_config_validation():
    assert SearchConfig("m+grz").frame_class == "MPlusGrz"
    for bad in (dict(frame_class="S5"), dict(max_worlds=0), dict(dedup="x"), dict(jobs=0)):
        with pytest.raises(InputError):
            SearchConfig(**bad)


def test_barcan_countermodel():
    v = decide(parse_formula(BARCAN_FORMULA), SearchConfig("MGrz", 3))
    assert isinstance(v, Countermodel)
    assert v.size == 3
    assert frames_isomorphic(v.frame, BARCAN) is not None
    M = Model(v.frame, v.valuation)
    assert not eval(M, parse_formula(BARCAN_FORMULA)) >> v.world & 1


@pytest.mark.parametrize("text", [
    "[]([](p -> []p) -> p) -> p",
    "<>Ap -> A<>p",
    "p -> Ep",
    "EEp -> Ep",
    "Ep -> AEp",
    "Ap -> p",
])
def test_theorems_have_no_countermodel(text):
    v = decide(parse_formula(text), SearchConfig("MGrz", 4))
    assert isinstance(v, NoCountermodelUpTo)
    assert v.max_worlds == 4
    assert v.frames_checked == 1 + 6 + 77 + 1833


def test_class_matters():
    f = parse_formula("<>q -> Eq")
    assert isinstance(decide(f, SearchConfig("GrzU", 4)), NoCountermodelUpTo)
    v = decide(f, SearchConfig("MGrz", 4))
    assert isinstance(v, Countermodel) and v.size == 2


def test_first_in_order_and_dedup_agree_on_size():
    f = parse_formula("E<>p -> <>p & Ep")
    plain = decide(f, SearchConfig("MGrz", 4))
    dedup = decide(f, SearchConfig("MGrz", 4, dedup="canonical-hash"))
    assert plain.size == dedup.size
    # nothing smaller refutes f
    for n in range(1, plain.size):
        assert all(refute_on_frame(F, f) is None for F in enumerate_frames("MGrz", n))


def test_jobs_do_not_change_answer():
    f = parse_formula(BARCAN_FORMULA)
    a = decide(f, SearchConfig("MGrz", 4, jobs=1))
    b = decide(f, SearchConfig("MGrz", 4, jobs=2))
    assert a == b


def test_refute_on_frame():
    assert refute_on_frame(BARCAN, parse_formula("p -> p")) is None
    val, world = refute_on_frame(BARCAN, parse_formula(BARCAN_FORMULA))
    assert not eval(Model(BARCAN, val), parse_formula(BARCAN_FORMULA)) >> world & 1


def test_budget_reports_progress():
    many = " & ".join(f"p{i}" for i in range(30))
    with pytest.raises(BudgetExceeded, match="frames"):
        decide(parse_formula(f"({many}) -> <>p0"), SearchConfig("MGrz", 2, budget_bits=8))
