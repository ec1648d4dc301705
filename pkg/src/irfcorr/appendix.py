"""Coefficient table for the four-site density matrix.

Each coefficient ``rho_k`` (``k = 9..14``) of the expansion of the four-site
density matrix in permutation operators has the form

``rho_k = sum_i A_i(l) w(pair_i) + sum_i B_i(l) w(pair) w(complementary pair)``

with the six pairs ``12, 13, 14, 23, 24, 34`` and the three pairings
``(12|34), (13|24), (14|23)``.  ``A_1`` and ``B_1`` are ``Q_1`` and ``Q_2``
divided by ``l13 l14 l23 l24``.  The remaining coefficients are ``A_1`` or
``B_1`` at permuted arguments plus an explicit correction term.  Everything
specific to a given ``k`` lives in two tables: :data:`PRINTED` is the
literal tabulated form and :data:`TABLE` is the version checked against
exact diagonalization.  The evaluation code below is generic.

All functions take the four spectral parameters as a tuple ``l`` and use the
differences ``d(i, j) = l[i-1] - l[j-1]``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Dict, Sequence

Fn = Callable[[Sequence[complex]], complex]

#: Argument permutations turning A_1 into A_2..A_6 (0-based positions).
A_PERMS = {2: (0, 2, 1, 3), 3: (0, 3, 2, 1), 4: (2, 1, 0, 3), 5: (3, 1, 2, 0), 6: (3, 2, 1, 0)}
#: Argument permutations turning B_1 into B_2, B_3.
B_PERMS = {2: (0, 2, 1, 3), 3: (0, 3, 2, 1)}

#: Spectral-parameter pairs multiplying A_1..A_6.
A_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
#: Pairings multiplying B_1..B_3.
B_PAIRS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def _d(l, i, j):
    return l[i - 1] - l[j - 1]


def _denominator(l):
    return _d(l, 1, 3) * _d(l, 1, 4) * _d(l, 2, 3) * _d(l, 2, 4)


@dataclass(frozen=True)
class CoefficientSet:
    """Closed-form coefficient functions for one ``rho_k``.

    Attributes
    ----------
    k : int
        Index in 9..14.
    Q1, Q2 : callable
        Numerators of ``A_1`` and ``B_1``.
    a_corr : dict
        Correction added to ``A_1`` at permuted arguments, keyed by ``i``.
    b_corr : dict
        Same for ``B_2``, ``B_3``.
    a1_corr : callable, optional
        Additive correction to ``A_1`` itself.
    """

    k: int
    Q1: Fn
    Q2: Fn
    a_corr: Dict[int, Fn]
    b_corr: Dict[int, Fn]

    a1_corr: Fn | None = None

    def A1(self, l):
        return self.Q1(l) / _denominator(l)

    def B1(self, l):
        return self.Q2(l) / _denominator(l)

    def A(self, i: int, l) -> complex:
        """Coefficient ``A_i`` at ``l``."""
        if i == 1:
            return self.A1(l) + (self.a1_corr(l) if self.a1_corr else 0.0)
        p = A_PERMS[i]
        base = self.A1(tuple(l[j] for j in p))
        return base + (self.a_corr[i](l) if i in self.a_corr else 0.0)

    def B(self, i: int, l) -> complex:
        """Coefficient ``B_i`` at ``l``."""
        if i == 1:
            return self.B1(l)
        p = B_PERMS[i]
        base = self.B1(tuple(l[j] for j in p))
        return base + (self.b_corr[i](l) if i in self.b_corr else 0.0)


# Shorthand used by the correction terms that recur across several k.
def _b2_shape(l):
    return (2 - _d(l, 1, 4) * _d(l, 2, 3) + _d(l, 1, 2) * _d(l, 3, 4))


def _b3_shape(l):
    return (2 - _d(l, 1, 3) * _d(l, 2, 4) - _d(l, 1, 2) * _d(l, 3, 4))


def _q2_9(l):
    d = lambda i, j: _d(l, i, j)
    return (-d(1, 4) * d(2, 4) / 90 * (2 - 3 * d(1, 2) ** 2 - 10 * d(1, 3) * d(2, 3))
            + d(2, 4) / (90 * d(1, 2)) * (22 + 2 * d(2, 3) ** 2 - 6 * d(1, 3) * d(1, 2)
                                          - 3 * d(1, 3) ** 2 * d(1, 2) ** 2)
            + d(1, 4) / (90 * d(1, 2)) * (22 + 2 * d(1, 3) ** 2 + 6 * d(2, 3) * d(1, 2)
                                          - 3 * d(2, 3) ** 2 * d(1, 2) ** 2))


def _q1_10(l):
    d = lambda i, j: _d(l, i, j)
    x = d(1, 2) ** 2 - 4
    inner = (-1 / 6 + x / (20 * d(1, 2) * d(1, 3) * d(2, 3) * d(1, 4))
             - x / (20 * d(1, 2) * d(1, 3) * d(2, 3) * d(2, 4)))
    return inner * _denominator(l)


PRINTED: Dict[int, CoefficientSet] = {
    9: CoefficientSet(
        9,
        Q1=lambda l: -(14 - _d(l, 1, 2) ** 2 + 10 * _d(l, 1, 3) * _d(l, 2, 3)) / 60,
        Q2=_q2_9,
        a_corr={
            2: lambda l: -1 / 6,
            3: lambda l: -(1 - 1 / (_d(l, 1, 3) * _d(l, 3, 4))) / 6,
            4: lambda l: -(1 - 1 / (_d(l, 2, 3) * _d(l, 2, 4))
                           + 1 / (_d(l, 2, 3) * _d(l, 3, 4))) / 6,
        },
        b_corr={
            2: lambda l: -_b2_shape(l) / (18 * _d(l, 1, 2) * _d(l, 3, 4)),
            3: lambda l: _b3_shape(l) / (18 * _d(l, 1, 2) * _d(l, 3, 4)),
        },
    ),
    10: CoefficientSet(
        10,
        Q1=_q1_10,
        Q2=lambda l: (_d(l, 1, 2) ** 2 - 4) * (_d(l, 3, 4) ** 2 - 4) / 90,
        a_corr={2: lambda l: 1 / 6, 3: lambda l: 1 / 6, 4: lambda l: 1 / 3,
                5: lambda l: 1 / 6, 6: lambda l: 1 / 6},
        b_corr={
            2: lambda l: _b2_shape(l) / (18 * _d(l, 1, 2) * _d(l, 3, 4)),
            3: lambda l: -_b3_shape(l) / (18 * _d(l, 1, 2) * _d(l, 3, 4)),
        },
    ),
    11: CoefficientSet(
        11,
        Q1=lambda l: -(_d(l, 1, 2) - 2) * (2 + _d(l, 1, 2) + 5 * (_d(l, 1, 3) + 1) * _d(l, 2, 3)) / 120,
        Q2=lambda l: ((_d(l, 1, 2) - 2) * (_d(l, 3, 4) - 2)
                      * (3 + _d(l, 2, 3) - _d(l, 1, 4) + 3 * _d(l, 1, 4) * _d(l, 2, 3)
                         + 2 * _d(l, 1, 3) * _d(l, 2, 4)) / 180),
        a_corr={
            2: lambda l: -(2 - _d(l, 1, 2) * _d(l, 1, 3))
            / (12 * _d(l, 1, 2) * _d(l, 1, 4) * _d(l, 3, 4)),
            3: lambda l: -((_d(l, 1, 2) - 1) * (2 + _d(l, 1, 3) - _d(l, 3, 4) - 2 * _d(l, 1, 3) * _d(l, 3, 4))
                           / (24 * _d(l, 1, 2) * _d(l, 1, 3) * _d(l, 3, 4))),
            4: lambda l: -((_d(l, 1, 2) - 1) * (_d(l, 2, 3) + 2)
                           / (24 * _d(l, 1, 2) * _d(l, 2, 4) * _d(l, 3, 4))),
            6: lambda l: (2 - _d(l, 2, 4) * _d(l, 3, 4))
            / (12 * _d(l, 1, 3) * _d(l, 1, 4) * _d(l, 2, 4)),
        },
        b_corr={
            2: lambda l: -_b2_shape(l) / (18 * _d(l, 1, 2) * _d(l, 1, 4) * _d(l, 3, 4)),
            3: lambda l: _b3_shape(l) / (36 * _d(l, 1, 2) * _d(l, 3, 4)),
        },
    ),
    12: CoefficientSet(
        12,
        Q1=lambda l: -(_d(l, 1, 2) - 2) * (8 - _d(l, 1, 2) + 5 * (_d(l, 1, 3) - 1) * _d(l, 2, 3)) / 120,
        Q2=lambda l: -((_d(l, 1, 2) - 2) * (_d(l, 3, 4) + 2)
                       * (7 + _d(l, 1, 2) - _d(l, 3, 4) + 3 * _d(l, 1, 4) * _d(l, 2, 3)
                          + 2 * _d(l, 1, 3) * _d(l, 2, 4)) / 180),
        a_corr={
            3: lambda l: -((_d(l, 1, 2) - 1) * (2 - _d(l, 1, 3) + _d(l, 3, 4) - 2 * _d(l, 1, 3) * _d(l, 3, 4))
                           / (24 * _d(l, 1, 2) * _d(l, 1, 3) * _d(l, 3, 4))),
            4: lambda l: -((_d(l, 1, 2) + 1) * (_d(l, 2, 3) + 2)
                           / (24 * _d(l, 1, 2) * _d(l, 2, 4) * _d(l, 3, 4))),
        },
        b_corr={
            3: lambda l: -((_d(l, 1, 3) - 2) * _b3_shape(l)
                           / (36 * _d(l, 1, 2) * _d(l, 1, 3) * _d(l, 3, 4))),
        },
    ),
    13: CoefficientSet(
        13,
        Q1=lambda l: (_d(l, 1, 2) + 2) * (8 + _d(l, 1, 2) + 5 * (_d(l, 1, 3) + 1) * _d(l, 2, 3)) / 120,
        Q2=lambda l: -((_d(l, 1, 2) + 2) * (_d(l, 3, 4) - 2)
                       * (7 - _d(l, 1, 2) + _d(l, 3, 4) + 3 * _d(l, 1, 4) * _d(l, 2, 3)
                          + 2 * _d(l, 1, 3) * _d(l, 2, 4)) / 180),
        a_corr={
            3: lambda l: -((_d(l, 1, 2) + 1) * (2 + _d(l, 1, 3) - _d(l, 3, 4) - 2 * _d(l, 1, 3) * _d(l, 3, 4))
                           / (24 * _d(l, 1, 2) * _d(l, 1, 3) * _d(l, 3, 4))),
            4: lambda l: ((_d(l, 1, 2) - 1) * (_d(l, 2, 3) - 2)
                          / (24 * _d(l, 1, 2) * _d(l, 2, 4) * _d(l, 3, 4))),
        },
        b_corr={
            3: lambda l: -((_d(l, 1, 3) + 2) * _b3_shape(l)
                           / (36 * _d(l, 1, 2) * _d(l, 1, 3) * _d(l, 3, 4))),
        },
    ),
    14: CoefficientSet(
        14,
        Q1=lambda l: (_d(l, 1, 2) + 2) * (2 - _d(l, 1, 2) + 5 * (_d(l, 1, 3) - 1) * _d(l, 2, 3)) / 120,
        Q2=lambda l: ((_d(l, 1, 2) + 2) * (_d(l, 3, 4) + 2)
                      * (3 - _d(l, 2, 3) + _d(l, 1, 4) + 3 * _d(l, 1, 4) * _d(l, 2, 3)
                         + 2 * _d(l, 1, 3) * _d(l, 2, 4)) / 180),
        a_corr={
            2: lambda l: (2 - _d(l, 1, 2) * _d(l, 1, 3))
            / (12 * _d(l, 1, 2) * _d(l, 1, 4) * _d(l, 3, 4)),
            3: lambda l: -((_d(l, 1, 2) + 1) * (2 - _d(l, 1, 3) + _d(l, 3, 4) - 2 * _d(l, 1, 3) * _d(l, 3, 4))
                           / (24 * _d(l, 1, 2) * _d(l, 1, 3) * _d(l, 3, 4))),
            4: lambda l: ((_d(l, 1, 2) + 1) * (_d(l, 2, 3) - 2)
                          / (24 * _d(l, 1, 2) * _d(l, 2, 4) * _d(l, 3, 4))),
            6: lambda l: -(2 - _d(l, 2, 4) * _d(l, 3, 4))
            / (12 * _d(l, 1, 3) * _d(l, 1, 4) * _d(l, 2, 4)),
        },
        b_corr={
            2: lambda l: _b2_shape(l) / (18 * _d(l, 1, 2) * _d(l, 1, 4) * _d(l, 3, 4)),
            3: lambda l: _b3_shape(l) / (36 * _d(l, 1, 2) * _d(l, 3, 4)),
        },
    ),
}


def _q2_9_verified(l):
    # the 1/l12 pole of the last two terms cancels only with a relative minus sign
    d = lambda i, j: _d(l, i, j)
    return (-d(1, 4) * d(2, 4) / 90 * (2 - 3 * d(1, 2) ** 2 - 10 * d(1, 3) * d(2, 3))
            + d(2, 4) / (90 * d(1, 2)) * (22 + 2 * d(2, 3) ** 2 - 6 * d(1, 3) * d(1, 2)
                                          - 3 * d(1, 3) ** 2 * d(1, 2) ** 2)
            - d(1, 4) / (90 * d(1, 2)) * (22 + 2 * d(1, 3) ** 2 + 6 * d(2, 3) * d(1, 2)
                                          - 3 * d(2, 3) ** 2 * d(1, 2) ** 2))


#: Table checked entry by entry against coefficients fitted from exact
#: diagonalization (see the test-suite).  Entries k = 11..14 are the tabulated
#: ones; k = 9 and k = 10 carry the corrections noted inline.
TABLE: Dict[int, CoefficientSet] = dict(PRINTED)
TABLE[9] = replace(
    PRINTED[9],
    Q2=_q2_9_verified,
    a_corr={
        3: PRINTED[9].a_corr[3],
        # tabulated: -(1 - 1/(l23 l24) + 1/(l23 l34))/6, and A_2 with -1/6
        4: lambda l: -(1 / (_d(l, 2, 3) * _d(l, 2, 4)) - 1 / (_d(l, 2, 3) * _d(l, 3, 4))) / 6,
    },
)
TABLE[10] = replace(
    PRINTED[10],
    # the tabulated A_1 lacks +1/6 and A_4 is tabulated with +1/3
    a1_corr=lambda l: 1 / 6,
    a_corr={2: lambda l: 1 / 6, 3: lambda l: 1 / 6, 4: lambda l: 1 / 6,
            5: lambda l: 1 / 6, 6: lambda l: 1 / 6},
)


def p0(k: int) -> float:
    """Constant term of ``rho_k``: ``1/16`` for ``k = 1`` and zero otherwise."""
    return 1 / 16 if k == 1 else 0.0
