"""Frozen octonion multiplication table.

Generated by Cayley-Dickson doubling of the quaternions with
``(a, b)(c, d) = (ac - conj(d) b, da + b conj(c))`` and basis
``e0..e3 = 1, i, j, k``, ``e4 = (0, 1)``, ``e(4+m) = e(m) e4``.
Row ``i``, column ``j`` holds ``e_i e_j = SIGN[i][j] * e_{INDEX[i][j]}``.
"""

INDEX = (
    (0, 1, 2, 3, 4, 5, 6, 7),
    (1, 0, 3, 2, 5, 4, 7, 6),
    (2, 3, 0, 1, 6, 7, 4, 5),
    (3, 2, 1, 0, 7, 6, 5, 4),
    (4, 5, 6, 7, 0, 1, 2, 3),
    (5, 4, 7, 6, 1, 0, 3, 2),
    (6, 7, 4, 5, 2, 3, 0, 1),
    (7, 6, 5, 4, 3, 2, 1, 0),
)

SIGN = (
    (+1, +1, +1, +1, +1, +1, +1, +1),
    (+1, -1, +1, -1, +1, -1, -1, +1),
    (+1, -1, -1, +1, +1, +1, -1, -1),
    (+1, +1, -1, -1, +1, -1, +1, -1),
    (+1, -1, -1, -1, -1, +1, +1, +1),
    (+1, +1, -1, +1, -1, -1, -1, +1),
    (+1, +1, +1, -1, -1, +1, -1, -1),
    (+1, -1, +1, +1, -1, -1, +1, -1),
)
