"""Factorized density matrices of the XXX chain and the resulting correlators.

The two- and three-site density matrices are expanded in identity and
permutation operators with coefficients built from ``omega(l_i, l_j)``.
The face-model density matrix is two copies of the chain matrix,
``D_irf = D/2 (+) D/2``, in the block ordering of
:func:`irfcorr.exact_diag.direct_sum_permutation`.

For four sites only the coefficients ``rho_9 .. rho_14`` are tabulated
(:mod:`irfcorr.appendix`), which suffices for the three non-trivial
next-nearest-neighbour and three-point functions.

Sites are numbered from 1, site 1 being the most significant tensor
factor; every operator is a dense complex matrix in that basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence, Union

import numpy as np

from . import appendix
from .exact_diag import DIRECT_SUM_BASIS, DensityMatrix
from .omega import REQUIRED_ORDERS, OmegaJet, OmegaProvider

OmegaLike = Union[OmegaProvider, Callable[[complex, complex], complex]]

#: Correlator names in output order; the first five are the independent ones.
CORRELATOR_NAMES = ("x1", "x1x2", "x1x2x3", "x1x3", "y1y3", "z1z3", "yxy", "zxz")

COINCIDENCE_TOL = 1e-12


# ---------------------------------------------------------------------------
# permutation algebra


@lru_cache(maxsize=None)
def _transposition(n: int, i: int, j: int) -> np.ndarray:
    dim = 2**n
    P = np.zeros((dim, dim))
    for bits in product((0, 1), repeat=n):
        swapped = list(bits)
        swapped[i - 1], swapped[j - 1] = bits[j - 1], bits[i - 1]
        P[int("".join(map(str, swapped)), 2), int("".join(map(str, bits)), 2)] = 1.0
    P.setflags(write=False)
    return P


def permutation_operator(n: int, i: int, j: int) -> np.ndarray:
    """Operator exchanging the tensor factors ``i`` and ``j`` of ``n`` qubits."""
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"invalid transposition ({i}, {j}) on {n} sites")
    return _transposition(n, min(i, j), max(i, j)).copy()


def word_operator(n: int, word: Sequence[tuple]) -> np.ndarray:
    """Matrix product of transpositions taken in the written order."""
    out = np.eye(2**n)
    for i, j in word:
        out = out @ _transposition(n, min(i, j), max(i, j))
    return out


def three_site_operators() -> tuple:
    """The operators multiplying ``rho_1 .. rho_5`` in the three-site expansion.

    ``rho_4`` multiplies the product ``P12 P23`` and ``rho_5`` the product
    ``P23 P12`` (matrix products, rightmost factor acting first).
    """
    I = np.eye(8)
    P12, P23 = _transposition(3, 1, 2), _transposition(3, 2, 3)
    return I, P12, P23, P12 @ P23, P23 @ P12


#: Words of the fourteen four-site operators, as matrix products in written order.
FOUR_SITE_WORDS = (
    (), ((1, 2),), ((2, 3),), ((3, 4),), ((1, 2), (2, 3)), ((2, 3), (1, 2)),
    ((2, 3), (3, 4)), ((3, 4), (2, 3)), ((1, 2), (3, 4)), ((1, 3), (2, 4)),
    ((1, 2), (3, 4), (2, 3)), ((1, 2), (2, 3), (3, 4)), ((3, 4), (2, 3), (1, 2)),
    ((2, 3), (3, 4), (1, 2)),
)


def four_site_operators() -> list:
    """The fourteen operators ``P_1 .. P_14`` (with ``P_1`` the identity)."""
    return [word_operator(4, w) for w in FOUR_SITE_WORDS]


# ---------------------------------------------------------------------------
# helpers


def _evaluator(omega: OmegaLike) -> Callable:
    return omega.evaluate if isinstance(omega, OmegaProvider) else omega


def _check_distinct(lams: Sequence[complex]) -> None:
    for a, b in product(range(len(lams)), repeat=2):
        if a < b and abs(lams[a] - lams[b]) < COINCIDENCE_TOL:
            raise ValueError(
                f"spectral parameters {a + 1} and {b + 1} coincide; use the homogeneous branch")


def _homogeneous(lams: Sequence[complex]) -> bool:
    return all(abs(l) < COINCIDENCE_TOL for l in lams)


def _jet_of(omega: OmegaLike) -> OmegaJet:
    jet = getattr(omega, "jet", None)
    if jet is None:
        raise ValueError("the homogeneous branch needs a provider with a derivative jet")
    return jet


# ---------------------------------------------------------------------------
# two and three sites


def d2_xxx(omega12: complex) -> np.ndarray:
    """Two-site chain density matrix ``(1/4 - w/6) I + (w/3) P12``."""
    return (0.25 - omega12 / 6) * np.eye(4, dtype=complex) + (omega12 / 3) * _transposition(2, 1, 2)


def rho3_coefficients(omega: OmegaLike, l1: complex, l2: complex, l3: complex,
                      printed_rho5: bool = False) -> tuple:
    """Coefficients ``rho_1 .. rho_5`` of the three-site expansion.

    Parameters
    ----------
    omega : OmegaProvider or callable
    l1, l2, l3 : complex
        Pairwise distinct spectral parameters.
    printed_rho5 : bool
        Use the tabulated ``rho_5`` whose ``omega(l1, l2)`` bracket reads
        ``2/(l12 l23) - 2/(l12 l23) - 1/l13 + 1/l23``.  That form is not
        normalizable against exact diagonalization and is kept for
        reference only; the default bracket is ``(2 + l12)/(l13 l23)``.
    """
    _check_distinct((l1, l2, l3))
    w = _evaluator(omega)
    l12, l13, l23 = l1 - l2, l1 - l3, l2 - l3
    w12, w13, w23 = w(l1, l2), w(l1, l3), w(l2, l3)
    r1 = (1 / 8 - (1 - 1 / (l13 * l23)) * w12 / 12 + (1 - 1 / (l12 * l23)) * w13 / 12
          - (1 - 1 / (l12 * l13)) * w23 / 12)
    r2 = ((1 - 1 / (l13 * l23)) * w12 / 6 - (1 - 1 / (l12 * l23)) * w13 / 6
          - w23 / (6 * l12 * l13))
    r3 = (-w12 / (6 * l13 * l23) - (1 - 1 / (l12 * l23)) * w13 / 6
          + (1 - 1 / (l12 * l13)) * w23 / 6)
    r4 = ((2 - l12) / (l13 * l23) * w12
          + (2 - 2 / (l12 * l23) - 1 / l12 + 1 / l23) * w13
          + (2 / (l12 * l13) + 1 / l12 - 1 / l13) * w23) / 12
    if printed_rho5:
        first = 2 / (l12 * l23) - 2 / (l12 * l23) - 1 / l13 + 1 / l23
    else:
        first = (2 + l12) / (l13 * l23)
    r5 = (first * w12
          + (2 - 2 / (l12 * l23) + 1 / l12 - 1 / l23) * w13
          + (2 / (l12 * l13) - 1 / l12 + 1 / l13) * w23) / 12
    return r1, r2, r3, r4, r5


def d3_xxx(omega: OmegaLike, l1: complex, l2: complex, l3: complex,
           printed_rho5: bool = False) -> np.ndarray:
    """Three-site chain density matrix ``sum_k rho_k P_k``.

    Raises
    ------
    ValueError
        If two spectral parameters coincide.
    """
    rho = rho3_coefficients(omega, l1, l2, l3, printed_rho5)
    ops = three_site_operators()
    return sum(r * op for r, op in zip(rho, ops)).astype(complex)


def omega3_fn(omega: OmegaLike, l1: complex, l2: complex, l3: complex) -> complex:
    """Nearest-neighbour function ``Omega^(3)``.

    Generic branch::

        w(l1,l2)/(l13 l23) + w(l1,l3) (1 - 1/(l12 l23)) + w(l2,l3)/(l12 l13)

    When all three parameters vanish the singular limit
    ``w^(0,0) + w^(1,1) - w^(2,0)/2`` is taken from the provider's jet.
    """
    if _homogeneous((l1, l2, l3)):
        j = _jet_of(omega)
        return j[(0, 0)] + j[(1, 1)] - j[(2, 0)] / 2
    _check_distinct((l1, l2, l3))
    w = _evaluator(omega)
    l12, l13, l23 = l1 - l2, l1 - l3, l2 - l3
    return (w(l1, l2) / (l13 * l23) + w(l1, l3) * (1 - 1 / (l12 * l23))
            + w(l2, l3) / (l12 * l13))


# ---------------------------------------------------------------------------
# four sites


def rho4_coefficient(k: int, omega: OmegaLike, lams: Sequence[complex],
                     printed: bool = False) -> complex:
    """Coefficient ``rho_k`` of the four-site expansion for ``k = 9..14``.

    Parameters
    ----------
    k : int
    omega : OmegaProvider or callable
    lams : sequence of four complex
        Pairwise distinct spectral parameters.
    printed : bool
        Evaluate the literal tabulated coefficients instead of the
        corrected ones; see :mod:`irfcorr.appendix`.
    """
    table = appendix.PRINTED if printed else appendix.TABLE
    if k not in table:
        raise ValueError(f"rho_{k} is not tabulated (available: 9..14)")
    lams = tuple(complex(x) for x in lams)
    if len(lams) != 4:
        raise ValueError("four spectral parameters are required")
    _check_distinct(lams)
    w = _evaluator(omega)
    cs = table[k]
    wv = {pair: w(lams[pair[0]], lams[pair[1]]) for pair in appendix.A_PAIRS}
    total = appendix.p0(k)
    for i, pair in enumerate(appendix.A_PAIRS, start=1):
        total += cs.A(i, lams) * wv[pair]
    for i, (p, q) in enumerate(appendix.B_PAIRS, start=1):
        total += cs.B(i, lams) * wv[p] * wv[q]
    return total


def omega4_fns(omega: OmegaLike, l1: complex, l2: complex, l3: complex, l4: complex,
               printed: bool = False) -> tuple:
    """The four functions ``Omega_1 .. Omega_4`` of the four-site matrix.

    ``Omega_1 = 2 (rho_11 + rho_12 + rho_13 + rho_14)``,
    ``Omega_2 = 4 (rho_9 + rho_10) + Omega_1``,
    ``Omega_3 = 2 (-rho_11 + rho_12 + rho_13 - rho_14)`` and the shortcut
    ``Omega_4 = (-4 w(l1,l2) + 6 w(l2,l3))/3``.  The shortcut reproduces the
    homogeneous value ``(2/3) w(0,0)`` but not the generic function.

    When all four parameters vanish the homogeneous-limit polynomials in
    the jet are returned instead.
    """
    lams = (l1, l2, l3, l4)
    if _homogeneous(lams):
        jet = _jet_of(omega)
        return (_xxx_123(jet), _xx_13(jet), _yy_13(jet), 2 * jet[(0, 0)] / 3)
    rho = {k: rho4_coefficient(k, omega, lams, printed) for k in range(9, 15)}
    om1 = 2 * (rho[11] + rho[12] + rho[13] + rho[14])
    om2 = 4 * (rho[9] + rho[10]) + om1
    om3 = 2 * (-rho[11] + rho[12] + rho[13] - rho[14])
    w = _evaluator(omega)
    om4 = (-4 * w(l1, l2) + 6 * w(l2, l3)) / 3
    return om1, om2, om3, om4


# ---------------------------------------------------------------------------
# homogeneous correlators


def _xxx_123(o) -> float:
    return (o[0, 0] * (2 / 3 + 4 / 3 * o[1, 1] + 2 / 9 * o[2, 2] - 4 / 27 * o[3, 1])
            - o[1, 0] * (4 / 3 * o[1, 0] + 4 / 9 * o[2, 1] - 4 / 27 * o[3, 0])
            - o[3, 1] / 9 + (4 * o[1, 1] - 2 * o[2, 0]) * (1 / 3 + o[2, 0] / 9)
            + o[2, 2] / 6)


def _xx_13(o) -> float:
    return (o[0, 0] * (4 / 5 * o[0, 0] + 8 / 15 * o[1, 1] + 7 / 45 * o[2, 2] - 14 / 135 * o[3, 1])
            - o[1, 0] * (8 / 15 * o[1, 0] + 14 / 45 * o[2, 1] - 14 / 135 * o[3, 0])
            + o[1, 1] * (2 / 5 + 14 / 45 * o[2, 0]) - o[2, 0] * (4 / 15 + 7 / 45 * o[2, 0])
            + 2 / 15 * o[2, 2] - 4 / 45 * o[3, 1])


def _yy_13(o) -> float:
    return (o[0, 0] * (4 / 15 * o[0, 0] + 2 / 5 * o[1, 1] + 4 / 45 * o[2, 2] - 8 / 135 * o[3, 1])
            - o[1, 0] * (2 / 5 * o[1, 0] + 8 / 45 * o[2, 1] - 8 / 135 * o[3, 0])
            + o[1, 1] * (7 / 15 + 8 / 45 * o[2, 0]) - o[2, 0] * (1 / 5 + 4 / 45 * o[2, 0])
            - o[3, 1] / 15 + o[2, 2] / 10)


@dataclass
class CorrelatorTable:
    """Named short-distance correlators for one chain length.

    Attributes
    ----------
    length : int or float
        ``math.inf`` for the thermodynamic limit.
    entries : dict
        Correlator name -> value, keys from :data:`CORRELATOR_NAMES`.
    method : str
    """

    length: float
    entries: dict
    method: str = ""
    extra: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        return self.entries[name]

    def row(self, names: Sequence[str] = CORRELATOR_NAMES[:5]) -> list:
        return [self.entries[n] for n in names]

    def to_dict(self) -> dict:
        length = "inf" if math.isinf(self.length) else int(self.length)
        return {"L": length, "method": self.method, **self.entries, **self.extra}


def correlators_from_jet(jet: OmegaJet, method: str | None = None) -> CorrelatorTable:
    """Evaluate all eight correlators from a homogeneous jet.

    ``<x1> = (2/3) w00``, ``<x1 x2> = (2/3) Omega^(3)(0,0,0)`` and the
    three four-site polynomials.  The remaining three follow from
    ``<z1 z3> = <x1>``, ``<y x y> = -<y1 y3>`` and ``<z x z> = -<z1 z3>``.
    """
    missing = [o for o in REQUIRED_ORDERS if o not in jet.values]
    if missing:
        raise ValueError(f"jet lacks orders {missing}")
    o = jet.values
    x1 = 2 * o[0, 0] / 3
    e = {
        "x1": x1,
        "x1x2": 2 * (o[0, 0] + o[1, 1] - o[2, 0] / 2) / 3,
        "x1x2x3": _xxx_123(o),
        "x1x3": _xx_13(o),
        "y1y3": _yy_13(o),
        "z1z3": x1,
    }
    e["yxy"] = -e["y1y3"]
    e["zxz"] = -e["z1z3"]
    return CorrelatorTable(jet.length, e, method or jet.source)


# ---------------------------------------------------------------------------
# face-model assembly


def assemble_irf(block: np.ndarray, spectral_points: tuple = ()) -> DensityMatrix:
    """Face-model density matrix ``block/2 (+) block/2`` in direct-sum order.

    Parameters
    ----------
    block : ndarray
        ``2**n x 2**n`` chain density matrix with unit trace.
    """
    block = np.asarray(block, dtype=complex)
    dim = block.shape[0]
    if block.shape != (dim, dim) or dim < 2 or dim & (dim - 1):
        raise ValueError(f"block must be square with power-of-two size, got {block.shape}")
    n = dim.bit_length() - 1
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = block / 2
    out[dim:, dim:] = block / 2
    return DensityMatrix(out, n, DIRECT_SUM_BASIS, tuple(spectral_points), "irf")


__all__ = [
    "CORRELATOR_NAMES", "CorrelatorTable", "FOUR_SITE_WORDS", "assemble_irf",
    "correlators_from_jet", "d2_xxx", "d3_xxx", "four_site_operators", "omega3_fn",
    "omega4_fns", "permutation_operator", "rho3_coefficients", "rho4_coefficient",
    "three_site_operators", "word_operator",
]
