from hypothesis import given
from hypothesis import strategies as st

from mgrz import bits


@st.composite
def relations(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    return n, tuple(draw(st.integers(0, bits.full(n))) for _ in range(n))


def naive_pairs(n, rows):
    return {(i, j) for i in range(n) for j in range(n) if rows[i] >> j & 1}


def test_basics():
    assert bits.full(3) == 0b111
    assert bits.to_list(0b1010) == [1, 3]
    assert bits.from_iter([0, 2]) == 0b101
    assert bits.lowest(0b1100) == 2


@given(relations(), st.integers(0, 63))
def test_image_and_preimage(rel, mask):
    n, rows = rel
    mask &= bits.full(n)
    P = naive_pairs(n, rows)
    assert bits.to_list(bits.image(rows, mask)) == sorted({j for i, j in P if mask >> i & 1})
    assert bits.to_list(bits.preimage(rows, mask)) == sorted({i for i, j in P if mask >> j & 1})


@given(relations(), relations())
def test_compose_and_transpose(a, b):
    n, r = a
    m, s = b
    if m != n:
        return
    P, Q = naive_pairs(n, r), naive_pairs(n, s)
    comp = {(i, k) for i, j in P for j2, k in Q if j == j2}
    assert naive_pairs(n, bits.compose(r, s)) == comp
    assert naive_pairs(n, bits.transpose(r)) == {(j, i) for i, j in P}


@given(relations())
def test_closures(rel):
    n, rows = rel
    T = bits.transitive_closure(rows)
    assert bits.is_transitive(T)
    RT = bits.reflexive_transitive_closure(rows)
    assert bits.is_reflexive(RT) and bits.is_transitive(RT)
    # closure is the least such relation: every pair has a path
    P = naive_pairs(n, rows)
    reach = {(i, i) for i in range(n)} | P
    changed = True
    while changed:
        new = {(i, k) for i, j in reach for j2, k in reach if j == j2}
        changed = not new <= reach
        reach |= new
    assert naive_pairs(n, RT) == reach


def test_longest_chain():
    chain = bits.reflexive_transitive_closure([0b010, 0b100, 0b000])
    assert bits.longest_chain(chain, 0b111) == 3
    assert bits.longest_chain(chain, 0b101) == 2
    assert bits.longest_chain(bits.identity(3), 0b111) == 1
