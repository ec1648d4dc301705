"""Thermodynamic-limit two-site function and its Taylor jet.

For ``L -> infinity`` the two-site function depends only on the difference
of its arguments,

``omega_inf(l) = (l**2 - 1) h'(l) + 1/2``,
``h(l) = log[Gamma(1 + l/2) Gamma(1/2 - l/2) / (Gamma(1 - l/2) Gamma(1/2 + l/2))]``.

``h'`` is even, so every odd derivative of ``omega_inf`` vanishes at zero.
Writing ``H_j = h^{(j+1)}(0)`` one has ``H_0 = 2 ln 2``, ``H_2 = 3 zeta(3)``
and ``H_4 = 45 zeta(5)``, which gives the closed-form jet below.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import digamma, polygamma, zeta

from .omega import JET_ORDERS, OmegaJet


def zeta_constants() -> tuple[float, float, float]:
    """Return ``(ln 2, zeta(3), zeta(5))`` in double precision."""
    return math.log(2.0), float(zeta(3.0)), float(zeta(5.0))


def _check_poles(lam) -> None:
    lam = np.asarray(lam, dtype=complex)
    n = np.round(lam.real)
    near = (np.abs(lam - n) < 1e-10) & (np.abs(n) >= 1)
    if np.any(near):
        raise ValueError(f"omega_inf evaluated too close to a Gamma-function pole: {lam[near]}")


def hprime(lam):
    """Logarithmic derivative ``h'(lam)`` of the Gamma-function ratio."""
    lam = np.asarray(lam, dtype=complex)
    return 0.5 * (digamma(1 + lam / 2) + digamma(1 - lam / 2)
                  - digamma(0.5 + lam / 2) - digamma(0.5 - lam / 2))


def hprime_derivative(j: int, lam: float = 0.0) -> float:
    """``j``-th derivative of ``h'`` at a real point."""
    if j == 0:
        return float(np.real(hprime(lam)))
    s = 0.5 ** j
    sign = (-1) ** j
    return float(0.5 * s * (polygamma(j, 1 + lam / 2) + sign * polygamma(j, 1 - lam / 2)
                            - polygamma(j, 0.5 + lam / 2) - sign * polygamma(j, 0.5 - lam / 2)))


def omega_inf(lam):
    """Two-site function of the infinite chain.

    Parameters
    ----------
    lam : complex or array_like
        Difference of the two spectral parameters.

    Raises
    ------
    ValueError
        Within ``1e-10`` of a nonzero integer, where the digamma terms have
        poles.
    """
    _check_poles(lam)
    lam_arr = np.asarray(lam, dtype=complex)
    out = (lam_arr**2 - 1) * hprime(lam_arr) + 0.5
    return complex(out) if out.ndim == 0 else out


def omega_inf_derivative(k: int) -> float:
    """``k``-th derivative of ``omega_inf`` at zero (closed form, ``k <= 5``)."""
    ln2, z3, z5 = zeta_constants()
    table = {0: 0.5 - 2 * ln2, 2: 4 * ln2 - 3 * z3, 4: 36 * z3 - 45 * z5}
    if k % 2:
        return 0.0
    if k not in table:
        raise ValueError(f"closed form available up to order 5, got {k}")
    return table[k]


def thermo_jet() -> OmegaJet:
    """Derivative jet ``omega^(m,n) = (-1)**n omega_inf^{(m+n)}(0)``."""
    values = {(m, n): (-1) ** n * omega_inf_derivative(m + n) for (m, n) in JET_ORDERS}
    return OmegaJet(math.inf, values, 0.0, source="closed-form")


def closed_form_correlators() -> dict:
    """The five thermodynamic correlators as ``ln 2``/``zeta`` polynomials."""
    l2, z3, z5 = zeta_constants()
    return {
        "x1": 1 / 3 - 4 / 3 * l2,
        "x1x2": 1 / 3 - 16 / 3 * l2 + 3 * z3,
        "x1x2x3": (1 / 3 - 12 * l2 + 74 / 3 * z3 - 56 / 3 * l2 * z3 - 6 * z3**2
                   - 125 / 6 * z5 + 100 / 3 * l2 * z5),
        "x1x3": (1 / 5 - 16 / 3 * l2 + 232 / 15 * z3 - 32 / 3 * l2 * z3 - 21 / 5 * z3**2
                 - 95 / 6 * z5 + 70 / 3 * l2 * z5),
        "y1y3": (1 / 15 - 4 * l2 + 169 / 15 * z3 - 20 / 3 * l2 * z3 - 12 / 5 * z3**2
                 - 65 / 6 * z5 + 40 / 3 * l2 * z5),
    }
