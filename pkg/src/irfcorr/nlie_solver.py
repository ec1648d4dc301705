"""Non-linear integral equations for the finite-size ground state.

The auxiliary functions ``b``, ``bbar`` solve

``ln b(x)    = L ln tanh(pi x/2) + F*ln B(x) - F*ln Bbar(x + i)``
``ln bbar(x) = L ln tanh(pi x/2) - F*ln B(x - i) + F*ln Bbar(x)``

with ``B = 1 + b`` and ``(F*f)(x) = (1/2pi) int F(x - y) f(y) dy``.  All
convolutions are evaluated spectrally on a uniform midpoint grid.  In
Fourier space the kernel is ``F^(k) = exp(-|k|/2) / (2 cosh(k/2))`` and the
shifts ``x -> x -/+ i`` become multiplication by ``exp(-/+ k)``.  Both shifted
multipliers stay bounded (``e^{|k|}`` is compensated by ``e^{-|k|}``), so the
shifted kernels are used directly without a regulator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma, loggamma


class ConvergenceError(RuntimeError):
    """Raised when a fixed-point iteration exceeds its iteration budget."""

    def __init__(self, message: str, history=()):
        super().__init__(message)
        self.history = list(history)


@dataclass(frozen=True)
class RapidityGrid:
    """Uniform midpoint grid on ``[-x_max, x_max]``.

    Parameters
    ----------
    x_max : float
        Half-width of the truncated real line.
    n_points : int
        Number of nodes, a power of two.
    """

    x_max: float = 25.0
    n_points: int = 4096

    def __post_init__(self):
        n = self.n_points
        if n < 256 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 256, got {n}")
        if self.x_max < 15:
            raise ValueError(f"x_max must be >= 15, got {self.x_max}")
        if self.spacing >= 0.05:
            raise ValueError(f"grid spacing {self.spacing:.3g} must be < 0.05")

    @property
    def spacing(self) -> float:
        return 2 * self.x_max / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return -self.x_max + (np.arange(self.n_points) + 0.5) * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    def multipliers(self) -> dict:
        """Fourier multipliers of ``F``, ``F(. + i)``, ``F(. - i)`` and ``K``."""
        k = self.wavenumbers
        a = np.abs(k)
        den = 1 + np.exp(-a)
        # written with decaying exponentials only, so fine grids cannot overflow
        return {"F": np.exp(-a) / den, "F+": np.exp(-a - k) / den,
                "F-": np.exp(-a + k) / den, "K": np.exp(-a / 2) / den}

    def convolve(self, f: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
        """``(1/2pi) int kernel(x - y) f(y) dy`` on the grid."""
        return np.fft.ifft(np.fft.fft(f) * multiplier)


def kernel_F(x):
    """Kernel ``F(x) = int exp(-|k|/2 + ikx) / (2 cosh(k/2)) dk``.

    Evaluated through the equivalent digamma expression; ``F(0) = 2 ln 2``.
    """
    z = 0.5j * np.asarray(x, dtype=complex)
    val = 0.5 * (digamma(1 - z) + digamma(1 + z) - digamma(0.5 + z) - digamma(0.5 - z))
    out = np.real(val)
    return float(out) if np.ndim(out) == 0 else out


def kernel_K(x):
    """Kernel ``K(x) = pi / cosh(pi x)``."""
    out = np.pi / np.cosh(np.pi * np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def _log1pexp(z: np.ndarray) -> np.ndarray:
    # ln(1 + e^z) without overflow for large Re z
    big = z.real > 30
    out = np.empty_like(z)
    out[~big] = np.log1p(np.exp(z[~big]))
    out[big] = z[big] + np.log1p(np.exp(-z[big]))
    return out


@dataclass
class AuxSolution:
    """Converged auxiliary functions on a grid.

    Attributes
    ----------
    grid : RapidityGrid
    length : int
        Chain length ``L``.
    log_b, log_bbar : ndarray
        ``ln b`` and ``ln bbar`` on the nodes.
    residual : float
        Last sup-norm change between sweeps.
    iterations : int
    history : list of float
        Residual after every sweep.
    """

    grid: RapidityGrid
    length: int
    log_b: np.ndarray
    log_bbar: np.ndarray
    residual: float
    iterations: int
    history: list = field(default_factory=list, repr=False)

    @property
    def b(self) -> np.ndarray:
        return np.exp(self.log_b)

    @property
    def b_bar(self) -> np.ndarray:
        return np.exp(self.log_bbar)

    @property
    def log_B(self) -> np.ndarray:
        return _log1pexp(self.log_b)

    @property
    def log_B_bar(self) -> np.ndarray:
        return _log1pexp(self.log_bbar)

    @property
    def B(self) -> np.ndarray:
        return np.exp(self.log_B)

    @property
    def B_bar(self) -> np.ndarray:
        return np.exp(self.log_B_bar)

    def fractions(self) -> tuple[np.ndarray, np.ndarray]:
        """``b/(1+b)`` and ``bbar/(1+bbar)`` evaluated stably."""
        return np.exp(self.log_b - self.log_B), np.exp(self.log_bbar - self.log_B_bar)


def driving_term(L: int, grid: RapidityGrid) -> np.ndarray:
    """``L ln|tanh(pi x/2)|`` on the nodes."""
    return L * np.log(np.abs(np.tanh(np.pi * grid.nodes / 2)))


def nlie_rhs(L: int, grid: RapidityGrid, log_b: np.ndarray, log_bbar: np.ndarray):
    """Right-hand sides of the auxiliary equations for given ``ln b, ln bbar``."""
    m = grid.multipliers()
    d = driving_term(L, grid)
    lB, lBb = _log1pexp(log_b), _log1pexp(log_bbar)
    new_b = d + grid.convolve(lB, m["F"]) - grid.convolve(lBb, m["F+"])
    new_bb = d - grid.convolve(lB, m["F-"]) + grid.convolve(lBb, m["F"])
    return new_b, new_bb


def solve_aux(L: int, grid: RapidityGrid | None = None, tol: float = 1e-13,
              max_iter: int = 5000) -> AuxSolution:
    """Solve the auxiliary equations by fixed-point iteration.

    Iteration starts from the driving term.  If the residual grows between
    sweeps, further updates are under-relaxed with factor 0.9.

    Raises
    ------
    ConvergenceError
        When ``max_iter`` sweeps do not reach ``tol``; the residual history
        is attached.
    """
    if L % 2 or L < 4:
        raise ValueError(f"L must be even and >= 4, got {L}")
    if tol < 1e-14:
        raise ValueError(f"tol must be >= 1e-14, got {tol}")
    grid = RapidityGrid() if grid is None else grid
    d = driving_term(L, grid)
    lb = d.astype(complex)
    lbb = lb.copy()
    relax = 1.0
    history = []
    for it in range(1, max_iter + 1):
        nb, nbb = nlie_rhs(L, grid, lb, lbb)
        res = max(np.abs(nb - lb).max(), np.abs(nbb - lbb).max())
        if history and res > history[-1]:
            relax = 0.9
        history.append(float(res))
        lb = lb + relax * (nb - lb)
        lbb = lbb + relax * (nbb - lbb)
        if res < tol:
            return AuxSolution(grid, L, lb, lbb, float(res), it, history)
    raise ConvergenceError(
        f"auxiliary NLIE for L={L} did not converge in {max_iter} sweeps "
        f"(last residual {history[-1]:.3e})", history)


def log_gamma_ratio(z):
    """``e(z) = ln[G(1 - iz/2) G(1/2 + iz/2) / (G(1 + iz/2) G(1/2 - iz/2))]``."""
    z = np.asarray(z, dtype=complex)
    return (loggamma(1 - 0.5j * z) + loggamma(0.5 + 0.5j * z)
            - loggamma(1 + 0.5j * z) - loggamma(0.5 - 0.5j * z))


def eigenvalue_log(aux: AuxSolution, x: float) -> complex:
    """``ln[Lambda_0(ix - 1/2) / (ix + 1/2)**L]`` from the auxiliary functions.

    ``L e(x + i/2) + i pi L/2 + (K * ln(B Bbar))(x)``, with the convolution
    evaluated by quadrature at the requested point.  The imaginary part is
    defined up to multiples of ``2 pi``.
    """
    g = aux.grid
    L = aux.length
    conv = np.sum(kernel_K(x - g.nodes) * (aux.log_B + aux.log_B_bar)) * g.spacing / (2 * np.pi)
    return complex(L * log_gamma_ratio(x + 0.5j) + 0.5j * np.pi * L + conv)


def sech_derivatives(z: np.ndarray, order: int) -> list:
    """``d^m/dz^m [pi sech(pi z)]`` for ``m = 0..order`` (``order <= 3``)."""
    if order > 3:
        raise ValueError("derivatives of the driving term are tabulated up to order 3")
    p = np.pi
    s = 1 / np.cosh(p * z)
    t = np.tanh(p * z)
    out = [p * s, -p**2 * s * t, p**3 * (s * t**2 - s**3), p**4 * (5 * s**3 * t - s * t**3)]
    return out[: order + 1]


def _check_pole(lam: complex, grid: RapidityGrid) -> None:
    # pi/cosh(pi(i lam + i/2 - x)) has a pole on the real axis when Re lam is
    # an integer; it sits at x = -Im lam and must not coincide with a node
    lam = complex(lam)
    if abs(lam.real - round(lam.real)) < 1e-12:
        gap = np.abs(grid.nodes + lam.imag).min()
        if gap < 1e-8 * grid.spacing:
            raise ValueError(f"spectral point {lam} puts a kernel pole on a grid node")


@dataclass
class GFunctionJet:
    """Solutions of the linear equations and their ``lambda_1`` derivatives.

    Attributes
    ----------
    weighted_plus, weighted_minus : list of ndarray
        ``G^(m) = g^(m) b/(1+b)`` (and the barred analogue) for derivative
        orders ``m = 0..order``.  The dressed form stays finite where ``b``
        underflows.
    lambda1 : complex
    iterations : list of int
    residuals : list of float
    """

    weighted_plus: list
    weighted_minus: list
    lambda1: complex
    iterations: list
    residuals: list
    aux: AuxSolution = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return len(self.weighted_plus) - 1

    @property
    def g_plus(self) -> list:
        beta, _ = self.aux.fractions()
        with np.errstate(divide="ignore", invalid="ignore"):
            return [w / beta for w in self.weighted_plus]

    @property
    def g_minus(self) -> list:
        _, beta_bar = self.aux.fractions()
        with np.errstate(divide="ignore", invalid="ignore"):
            return [w / beta_bar for w in self.weighted_minus]


def solve_linear(aux: AuxSolution, drive: np.ndarray, tol: float = 1e-14,
                 max_iter: int = 1000):
    """Solve the linear system for the dressed functions with a given driving term.

    ``G+ = beta (d + F*G+ - F(.+i)*G-)``, ``G- = beta_bar (d - F(.-i)*G+ + F*G-)``
    with ``beta = b/(1+b)``.

    Returns
    -------
    G_plus, G_minus : ndarray
    iterations : int
    residual : float
    """
    g = aux.grid
    m = g.multipliers()
    beta, beta_bar = aux.fractions()
    gp, gm = beta * drive, beta_bar * drive
    res = np.inf
    for it in range(1, max_iter + 1):
        ngp = beta * (drive + g.convolve(gp, m["F"]) - g.convolve(gm, m["F+"]))
        ngm = beta_bar * (drive - g.convolve(gp, m["F-"]) + g.convolve(gm, m["F"]))
        scale = max(np.abs(ngp).max(), np.abs(ngm).max(), 1.0)
        res = max(np.abs(ngp - gp).max(), np.abs(ngm - gm).max()) / scale
        gp, gm = ngp, ngm
        if res < tol:
            return gp, gm, it, float(res)
    raise ConvergenceError(f"linear equations stagnated at residual {res:.3e}")


def solve_g(aux: AuxSolution, lambda1: complex = 0.0, jet_order: int = 0,
            tol: float = 1e-14) -> GFunctionJet:
    """Solve the linear equations and their ``lambda_1`` derivatives.

    The driving term is ``pi/cosh(pi(i lambda_1 + i/2 - x))``.  Because the
    equations are linear and ``lambda_1`` enters only through the driving
    term, the ``m``-th derivative solves the same system with the ``m``-th
    derivative of the driving term.
    """
    if not 0 <= jet_order <= 3:
        raise ValueError(f"jet_order must be in 0..3, got {jet_order}")
    _check_pole(lambda1, aux.grid)
    z = 1j * complex(lambda1) + 0.5j - aux.grid.nodes
    ders = sech_derivatives(z, jet_order)
    plus, minus, its, ress = [], [], [], []
    for m in range(jet_order + 1):
        gp, gm, it, res = solve_linear(aux, (1j) ** m * ders[m], tol=tol)
        plus.append(gp)
        minus.append(gm)
        its.append(it)
        ress.append(res)
    return GFunctionJet(plus, minus, complex(lambda1), its, ress, aux)


def grid_for(x_max: float = 25.0, n_points: int = 4096) -> RapidityGrid:
    """Convenience constructor mirroring the command-line defaults."""
    return RapidityGrid(float(x_max), int(n_points))


__all__ = [
    "AuxSolution", "ConvergenceError", "GFunctionJet", "RapidityGrid", "eigenvalue_log",
    "kernel_F", "kernel_K", "log_gamma_ratio", "solve_aux", "solve_g", "solve_linear",
    "sech_derivatives",
]

