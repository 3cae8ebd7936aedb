"""Small frames and bundles that recur across the tests."""

from mgrz.bundles import KripkeBundle, KripkeFrame
from mgrz.frames import MKFrame

A, B, C, D = range(4)
X, Y, Z = range(3)


def refl(n):
    return [(i, i) for i in range(n)]


# a -> c, b -> d, reflexive; E-blocks {a, b}, {c, d}
FOUR = MKFrame.from_pairs(4, refl(4) + [(A, C), (B, D)], [[A, B], [C, D]], names=list("abcd"))

# X = {a, b}, R = X^2, E identity: MS4 but not MGrz
SQUARE = MKFrame.from_pairs(2, [(0, 0), (0, 1), (1, 0), (1, 1)], [[0], [1]], names=["a", "b"])

# R reflexive plus y -> z; E-blocks {x, z}, {y}; refutes the Barcan formula with v(p) = {x} at y
BARCAN = MKFrame.from_pairs(3, refl(3) + [(Y, Z)], [[X, Z], [Y]], names=["x", "y", "z"])
BARCAN_VALUATION = {"p": 1 << X}
BARCAN_FORMULA = "<>Ep -> E<>p"

# x < y, reflexive, E identity
CHAIN2 = MKFrame.from_pairs(2, refl(2) + [(0, 1)], [[0], [1]], names=["x", "y"])

# two individuals a, b over one world w; a R b
TWO_POINT_BUNDLE = KripkeBundle(
    KripkeFrame(2, (0b11, 0b10)),
    KripkeFrame(1, (0b1,)),
    (0, 0),
)

# FOUR with v(p) = {b}, v(q) = {c}; forces a commutativity repair
COMMUTATIVITY_VALUATION = {"p": 1 << B, "q": 1 << C}
COMMUTATIVITY_FORMULA = "~(Ep & <>q)"
