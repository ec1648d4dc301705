"""The two-site function ``omega(lambda_1, lambda_2)`` from the NLIE solution.

``omega = (lambda_12**2 - 1) Psi(lambda_1, lambda_2) / 2 + 1/2`` with

``Psi = 2 F(i lambda_12) + int c(x; lambda_2) [G+(x; lambda_1) + G-(x; lambda_1)] dx``,
``c(x; lambda) = -1 / cosh(pi (i lambda + i/2 - x))``,

where ``G+-`` are the dressed solutions returned by :func:`irfcorr.nlie_solver.solve_g`.
The NLIE representation is analytic in the strip ``-1 < Re lambda_1 < 0``.
On the line ``lambda_1 = 0`` the driving pole sits between two grid nodes
and the midpoint rule returns the principal-value average of both sides,
which is the parity-even part of ``omega``.  For the chain lengths used
here the parity-odd part is ``O(lambda**(L-1))``, so derivatives of total
order up to 4 are unaffected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from .nlie_solver import AuxSolution, GFunctionJet, sech_derivatives, solve_g, _check_pole

#: Derivative orders ``(m, n)`` carried by an :class:`OmegaJet`.
JET_ORDERS = tuple((m, n) for m in range(4) for n in range(3))

#: Orders entering the correlator formulas.
REQUIRED_ORDERS = ((0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1))

#: Taylor coefficients of ``(lambda_12**2 - 1)/2`` at the origin.
_PREFACTOR_JET = {(0, 0): -0.5, (2, 0): 1.0, (1, 1): -1.0, (0, 2): 1.0}

IMAG_TOL = 1e-9


@dataclass
class OmegaJet:
    """Mixed partial derivatives of ``omega`` at ``lambda_1 = lambda_2 = 0``.

    Attributes
    ----------
    length : int or float
        Chain length, ``math.inf`` for the thermodynamic limit.
    values : dict
        ``(m, n) -> d^m/dlambda_1^m d^n/dlambda_2^n omega(0, 0)`` (real).
    imag_residual : float
        Largest discarded imaginary part.
    source : str
    """

    length: float
    values: dict
    imag_residual: float = 0.0
    source: str = "nlie"

    def __getitem__(self, key):
        return self.values[key]

    def omega00(self) -> float:
        return self.values[(0, 0)]


def _hprime_der(j: int) -> float:
    from .thermo_limit import hprime_derivative
    return hprime_derivative(j, 0.0)


def _integral(aux: AuxSolution, weight: np.ndarray, gjet: GFunctionJet, m: int) -> complex:
    total = gjet.weighted_plus[m] + gjet.weighted_minus[m]
    return complex(np.sum(weight * total) * aux.grid.spacing)


def psi(aux: AuxSolution, gjet: GFunctionJet, lambda1: complex, lambda2: complex) -> complex:
    """Evaluate ``Psi(lambda_1, lambda_2)``.

    ``gjet`` must have been solved at ``lambda1``.

    Raises
    ------
    ValueError
        If ``lambda2`` places the weight's pole on a grid node, or ``gjet``
        belongs to another ``lambda1``.
    """
    if abs(gjet.lambda1 - complex(lambda1)) > 1e-14:
        raise ValueError("gjet was solved for a different lambda1")
    _check_pole(lambda2, aux.grid)
    from .thermo_limit import hprime
    lam12 = complex(lambda1) - complex(lambda2)
    z = 1j * complex(lambda2) + 0.5j - aux.grid.nodes
    weight = -1 / np.cosh(np.pi * z)
    return complex(2 * hprime(lam12) + _integral(aux, weight, gjet, 0))


def omega_value(aux: AuxSolution, lambda1: complex, lambda2: complex,
                gjet: GFunctionJet | None = None) -> complex:
    """``omega(lambda_1, lambda_2)`` at one point."""
    if gjet is None:
        gjet = solve_g(aux, lambda1, 0)
    lam12 = complex(lambda1) - complex(lambda2)
    return (lam12**2 - 1) * psi(aux, gjet, lambda1, lambda2) / 2 + 0.5


def psi_jet(aux: AuxSolution, gjet: GFunctionJet) -> dict:
    """Derivatives ``Psi^(m,n)`` at the origin for ``m <= gjet.order``, ``n <= 2``."""
    if gjet.lambda1 != 0:
        raise ValueError("the jet is taken at lambda1 = 0")
    z = 0.5j - aux.grid.nodes
    ders = sech_derivatives(z, 2)
    out = {}
    for m in range(gjet.order + 1):
        for n in range(3):
            weight = -(1j) ** n * ders[n] / np.pi
            out[(m, n)] = (-1) ** n * 2 * _hprime_der(m + n) + _integral(aux, weight, gjet, m)
    return out


def omega_jet(aux: AuxSolution, gjet: GFunctionJet | None = None) -> OmegaJet:
    """All derivatives ``omega^(m,n)``, ``m <= 3``, ``n <= 2``, at the origin.

    Obtained by the Leibniz rule from the jet of ``Psi`` and the polynomial
    prefactor.

    Raises
    ------
    ValueError
        If an imaginary part larger than ``1e-9`` survives.
    """
    if gjet is None:
        gjet = solve_g(aux, 0.0, 3)
    ps = psi_jet(aux, gjet)
    values = {}
    for (m, n) in JET_ORDERS:
        s = 0.5 if (m, n) == (0, 0) else 0.0
        for (i, j), pv in _PREFACTOR_JET.items():
            if i <= m and j <= n:
                s += comb(m, i) * comb(n, j) * pv * ps[(m - i, n - j)]
        values[(m, n)] = s
    imag = max(abs(v.imag) for v in values.values())
    if imag > IMAG_TOL:
        raise ValueError(f"omega jet has imaginary part {imag:.2e} > {IMAG_TOL}")
    return OmegaJet(aux.length, {k: float(v.real) for k, v in values.items()}, float(imag))


def fe_residual(omega_fn: Callable, lambda1: complex, lambda2: complex) -> float:
    """Residual of the functional equation relating ``omega(l1, l2 - 1)`` and ``omega(l1, l2)``.

    ``omega(l1, l2 - 1) + l12 (l12 + 2)/(l12**2 - 1) omega(l1, l2) - (3/2)/(l12**2 - 1) = 0``.
    """
    lam = complex(lambda1) - complex(lambda2)
    den = lam**2 - 1
    if abs(den) < 1e-12:
        raise ValueError("lambda_12 = +-1 is a pole of the functional equation")
    val = (omega_fn(lambda1, lambda2 - 1) + lam * (lam + 2) / den * omega_fn(lambda1, lambda2)
           - 1.5 / den)
    return float(abs(val))


def verify_omega_fe(omega_fn: Callable, points) -> float:
    """Largest functional-equation residual over ``points = [(l1, l2), ...]``."""
    return max(fe_residual(omega_fn, a, b) for a, b in points)


def finite_difference_jet(omega_fn: Callable, step: float = 0.02,
                          orders=REQUIRED_ORDERS) -> dict:
    """Mixed derivatives at the origin from a 7 x 7 central-difference stencil.

    Intended for cross-checks against an independent evaluation of ``omega``;
    the truncation error is ``O(step**4)`` for every order up to 3.
    """
    k = 3
    pts = np.arange(-k, k + 1) * step
    grid = np.array([[complex(omega_fn(a, b)).real for b in pts] for a in pts])
    out = {}
    for (m, n) in orders:
        wm = _fd_weights(m, k) / step**m
        wn = _fd_weights(n, k) / step**n
        out[(m, n)] = float(wm @ grid @ wn)
    return out


def _fd_weights(order: int, k: int) -> np.ndarray:
    # central finite-difference weights on the 2k+1 integer stencil
    pts = np.arange(-k, k + 1, dtype=float)
    vander = np.vander(pts, increasing=True).T
    rhs = np.zeros(2 * k + 1)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(vander, rhs)


@dataclass
class OmegaProvider:
    """Pairs a pointwise evaluator of ``omega`` with its jet at the origin.

    Attributes
    ----------
    evaluate : callable
        ``(lambda1, lambda2) -> complex``.
    jet : OmegaJet or None
    label : str
    """

    evaluate: Callable
    jet: OmegaJet | None = None
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, lambda1, lambda2):
        return self.evaluate(lambda1, lambda2)


def nlie_provider(aux: AuxSolution, with_jet: bool = True) -> OmegaProvider:
    """Provider backed by the NLIE (one linear solve per distinct ``lambda_1``)."""
    cache: dict = {}

    def evaluate(l1, l2):
        key = complex(l1)
        if key not in cache:
            cache[key] = solve_g(aux, key, 0)
        return omega_value(aux, key, l2, cache[key])

    jet = omega_jet(aux) if with_jet else None
    return OmegaProvider(evaluate, jet, f"nlie L={aux.length}", cache)


def thermo_provider() -> OmegaProvider:
    """Provider for the infinite chain."""
    from .thermo_limit import omega_inf, thermo_jet
    return OmegaProvider(lambda a, b: omega_inf(complex(a) - complex(b)), thermo_jet(), "thermo")


def ed_provider(L: int, inhomogeneities=None) -> OmegaProvider:
    """Provider backed by exact diagonalization; no jet is attached."""
    from .exact_diag import ground_state, omega_from_ed
    gs = ground_state(L, inhomogeneities)
    return OmegaProvider(lambda a, b: omega_from_ed(gs, a, b), None, f"ed L={L}")


__all__ = [
    "JET_ORDERS", "OmegaJet", "OmegaProvider", "REQUIRED_ORDERS", "ed_provider", "fe_residual",
    "finite_difference_jet", "nlie_provider", "omega_jet", "omega_value", "psi", "psi_jet",
    "thermo_provider", "verify_omega_fe",
]
