import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mgrz import bits
from mgrz.errors import BudgetExceeded, FrameClassError, NotMKFrame
from mgrz.frames import (
    CLASS_NAMES,
    MKFrame,
    classify,
    e_skeleton,
    eq_clusters,
    fine_esakia_check,
    frames_isomorphic,
    in_class,
    is_mk,
    is_mk_morphism,
    max_set,
    passive_set,
    q_relation,
    qmax_set,
    require_class,
    smax_set,
    smax_theorem_check,
    validate_mk,
    violates,
)

from fixtures import BARCAN, CHAIN2, FOUR, SQUARE, A, B, C, D, X, Y, Z, refl
from strategies import any_frames, mgrz_frames, mk_frames, subsets


def m(*xs):
    return bits.from_iter(xs)


# --------------------------------------------------------------------------
# commutativity and classes


def test_identity_partition_is_mk():
    F = MKFrame(3, (0b110, 0, 0b001), (0, 1, 2))
    assert validate_mk(F).flags["MK"]


def test_commutativity_witness():
    F = MKFrame.from_pairs(2, [(0, 1)], [[0, 1]])
    report = validate_mk(F)
    assert report.flags == {"MK": False}
    assert report.witnesses["MK"].worlds == (1, 0, 1)


def test_four_point_frame_is_mgrz():
    assert is_mk(FOUR)
    assert in_class(FOUR, "MGrz")


def test_q_relation_examples():
    assert q_relation(CHAIN2) == CHAIN2.R
    assert q_relation(FOUR)[A] >> D & 1
    assert not q_relation(BARCAN)[X] >> Y & 1


def test_skeleton_examples():
    sk = e_skeleton(BARCAN)
    assert sk.n == 2
    assert sk.quotient == (0, 1, 0)
    # [x] sees only itself; [y] sees itself and [x]
    assert sk.R == (0b01, 0b11)
    sk = e_skeleton(CHAIN2)
    assert sk.R == CHAIN2.R
    one = MKFrame.from_pairs(2, refl(2), [[0, 1]])
    assert e_skeleton(one).R == (1,)


def test_skeleton_requires_mk():
    with pytest.raises(NotMKFrame):
        e_skeleton(MKFrame.from_pairs(2, [(0, 1)], [[0, 1]]))


def test_max_examples():
    assert qmax_set(SQUARE, 0b11) == 0b11
    assert max_set(SQUARE, 0b11) == 0
    antichain = MKFrame(3, (1, 2, 4), (0, 1, 2))
    assert max_set(antichain, 0b111) == 0b111
    assert max_set(FOUR, m(A, B, D)) == m(A, D)


def test_smax_examples():
    U = m(A, B, D)
    assert not smax_set(FOUR, U) >> A & 1
    assert smax_set(FOUR, U) == m(D)
    for u in range(4):
        assert smax_set(FOUR, 1 << u) == 1 << u


def test_passive_examples():
    chain3 = MKFrame(3, tuple(bits.reflexive_transitive_closure([0b010, 0b100, 0])), (0, 1, 2))
    U = m(0, 2)
    assert passive_set(chain3, U) == m(2)
    up = m(1, 2)
    assert passive_set(chain3, up) == up


def test_eq_clusters_examples():
    assert sorted(eq_clusters(FOUR)) == sorted(FOUR.block_masks)
    assert eq_clusters(CHAIN2) == [1, 2]
    assert eq_clusters(SQUARE) == [0b11]


def test_classify_examples():
    flags = classify(CHAIN2).flags
    assert flags == {
        "MK": True, "MS4": True, "MGrz": True, "GrzU": False,
        "MPlusGrz": True, "MGL": False, "Barcan": True,
    }
    report = classify(SQUARE)
    assert report.flags["MS4"] and not report.flags["MGrz"]
    report = classify(BARCAN)
    assert report.flags["MGrz"] and not report.flags["Barcan"]
    assert report.witnesses["Barcan"].worlds == (Y, Z, X)


def test_require_class():
    require_class(CHAIN2, "MGrz")
    with pytest.raises(FrameClassError):
        require_class(SQUARE, "MGrz")
    with pytest.raises(NotMKFrame):
        require_class(MKFrame.from_pairs(2, [(0, 1)], [[0, 1]]), "MGrz")


def test_fine_esakia_examples():
    assert fine_esakia_check(CHAIN2).passed
    assert fine_esakia_check(FOUR, exhaustive=True).passed
    report = fine_esakia_check(SQUARE, exhaustive=True)
    assert not report.passed
    assert report.witness == (0b11, 0)
    assert report.methods_agree
    big = MKFrame(15, tuple(1 << i for i in range(15)), tuple(range(15)))
    with pytest.raises(BudgetExceeded):
        fine_esakia_check(big, exhaustive=True)


def test_fine_esakia_methods_agree_small():
    # all preorders on up to 3 worlds with identity E
    for n in range(1, 4):
        for rows in itertools.product(range(1 << n), repeat=n):
            F = MKFrame(n, rows, tuple(range(n)))
            if not in_class(F, "MS4"):
                continue
            assert fine_esakia_check(F, exhaustive=True).methods_agree


def test_smax_theorem_examples():
    assert smax_theorem_check(FOUR, m(A, B, D))
    assert all(smax_theorem_check(FOUR, 1 << u) for u in range(4))


def test_isomorphism():
    perm = (2, 0, 1)
    G = BARCAN.relabel(perm)
    iso = frames_isomorphic(BARCAN, G)
    assert iso is not None
    assert is_mk_morphism(BARCAN, G, iso)
    assert frames_isomorphic(BARCAN, MKFrame(3, BARCAN.R, (0, 0, 0))) is None


# --------------------------------------------------------------------------
# properties


@given(any_frames())
def test_witnesses_replay(F):
    report = classify(F)
    for cls in CLASS_NAMES:
        if report.flags[cls]:
            assert cls not in report.witnesses
        else:
            w = report.witnesses[cls]
            assert violates(F, w.condition, w.worlds)


@given(any_frames())
def test_class_implications(F):
    flags = classify(F).flags
    if flags["MGrz"]:
        assert flags["MS4"]
    if flags["MS4"]:
        assert flags["MK"]
    if flags["GrzU"]:
        assert flags["Barcan"]
    if flags["Barcan"]:
        assert flags["MK"]


@given(mk_frames(), st.data())
def test_point_set_chain(F, data):
    U = data.draw(subsets(F))
    s, mx, q = smax_set(F, U), max_set(F, U), qmax_set(F, U)
    assert s & ~mx == 0
    assert mx & ~q == 0
    assert q & ~U == 0


@given(mgrz_frames(), st.data())
def test_mgrz_point_theorems(F, data):
    U = data.draw(subsets(F))
    assert max_set(F, U) == qmax_set(F, U)
    assert U & ~F.r_preimage(max_set(F, U)) == 0
    assert U & ~F.r_preimage(passive_set(F, U)) == 0
    assert max_set(F, U) & ~passive_set(F, U) == 0
    assert smax_theorem_check(F, U)
    assert sorted(eq_clusters(F)) == sorted(F.block_masks)
    saturated = F.e_image(U)
    assert smax_set(F, saturated) == max_set(F, saturated)
