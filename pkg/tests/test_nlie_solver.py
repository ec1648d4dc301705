import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from irfcorr.exact_diag import ground_state
from irfcorr.nlie_solver import (
    ConvergenceError, RapidityGrid, eigenvalue_log, kernel_F, kernel_K, log_gamma_ratio,
    nlie_rhs, sech_derivatives, solve_aux, solve_g, solve_linear,
)
from irfcorr.omega import omega_value


def _F_quadrature(x):
    # even integrand: F(x) = 2 int_0^inf F^(k) cos(kx) dk, Fourier-weighted quadrature
    f = lambda k: np.exp(-k) / (1 + np.exp(-k))
    if x == 0:
        return 2 * quad(f, 0, np.inf)[0]
    return 2 * quad(f, 0, np.inf, weight="cos", wvar=abs(x))[0]


@pytest.mark.parametrize("n,x", [(128, 25.0), (4096, 10.0), (1000, 25.0), (512, 25.0)])
def test_grid_invariants(n, x):
    with pytest.raises(ValueError):
        RapidityGrid(x, n)


def test_grid_nodes_avoid_origin():
    g = RapidityGrid()
    assert np.abs(g.nodes).min() == pytest.approx(g.spacing / 2)
    assert g.nodes[0] == pytest.approx(-g.nodes[-1])


def test_kernel_F_values():
    assert kernel_F(0.0) == pytest.approx(2 * np.log(2), abs=1e-14)
    assert abs(kernel_F(1.7) - kernel_F(-1.7)) < 1e-12
    # algebraic decay F(x) ~ 1/(2 x**2), not exponential
    assert kernel_F(10.0) == pytest.approx(_F_quadrature(10.0), abs=1e-10)
    assert 1e4**2 * kernel_F(1e4) == pytest.approx(0.5, abs=1e-5)


@pytest.mark.parametrize("x", [0.0, 0.3, 1.7, 4.0])
def test_kernel_F_against_fourier_integral(x):
    assert kernel_F(x) == pytest.approx(_F_quadrature(x), abs=1e-10)


def test_kernel_K_values():
    assert kernel_K(0.0) == pytest.approx(np.pi)
    assert kernel_K(1.0) == pytest.approx(0.27101495, abs=1e-8)
    assert kernel_K(2.0) == kernel_K(-2.0)


def test_spectral_convolution_matches_quadrature():
    # the FFT convolves with the kernel periodized over 2 x_max; F decays like
    # 1/(2 x**2), so the images are summed explicitly with an analytic tail
    g = RapidityGrid()
    f = np.exp(-g.nodes**2)
    conv = g.convolve(f, g.multipliers()["F"]).real
    i = g.n_points // 2 + 17
    x = g.nodes[i]
    period = 2 * g.x_max
    n_img = 200
    shifts = period * np.arange(-n_img, n_img + 1)
    tail = 2 / (2 * period**2) * (1 / n_img - 1 / (2 * n_img**2))

    def periodic_F(z):
        return kernel_F(z + shifts).sum() + tail

    ref = quad(lambda y: periodic_F(x - y) * np.exp(-y * y), -9, 9, limit=200)[0] / (2 * np.pi)
    assert conv[i] == pytest.approx(ref, abs=1e-9)


def test_log_gamma_ratio_at_origin():
    assert abs(log_gamma_ratio(0.0)) < 1e-15


def test_aux_fixed_point_contract(aux_cache):
    aux = aux_cache(8)
    nb, nbb = nlie_rhs(8, aux.grid, aux.log_b, aux.log_bbar)
    assert np.abs(nb - aux.log_b).max() < 10 * 1e-13
    assert np.abs(nbb - aux.log_bbar).max() < 10 * 1e-13


def test_aux_conjugation_symmetry(aux_cache):
    aux = aux_cache(12)
    assert np.abs(aux.log_bbar - np.conj(aux.log_b)).max() < 1e-12


def test_aux_nonconvergence_reports_history():
    with pytest.raises(ConvergenceError) as err:
        solve_aux(8, max_iter=3)
    assert len(err.value.history) == 3


@pytest.mark.parametrize("L", [3, 2])
def test_aux_rejects_bad_length(L):
    with pytest.raises(ValueError):
        solve_aux(L)


def test_aux_rejects_tiny_tolerance():
    with pytest.raises(ValueError):
        solve_aux(8, tol=1e-16)


@pytest.mark.parametrize("L,x", [(8, 0.0), (8, 0.3), (4, 0.5)])
def test_eigenvalue_against_ed(L, x, aux_cache):
    gs = ground_state(L)
    ed = gs.eigenvalue(1j * x - 0.5) / (1j * x + 0.5) ** L
    nlie = np.exp(eigenvalue_log(aux_cache(L), x))
    assert abs(np.log(ed) - np.log(nlie)) < 1e-6


def test_linear_residual(aux_cache):
    aux = aux_cache(64)
    gj = solve_g(aux, 0.0, 0)
    g = aux.grid
    m = g.multipliers()
    beta, beta_bar = aux.fractions()
    d = sech_derivatives(0.5j - g.nodes, 0)[0]
    gp, gm = gj.weighted_plus[0], gj.weighted_minus[0]
    rp = gp - beta * (d + g.convolve(gp, m["F"]) - g.convolve(gm, m["F+"]))
    rm = gm - beta_bar * (d - g.convolve(gp, m["F-"]) + g.convolve(gm, m["F"]))
    assert max(np.abs(rp).max(), np.abs(rm).max()) < 1e-12


def test_linear_superposition(aux_cache):
    aux = aux_cache(32)
    x = aux.grid.nodes
    d1 = np.pi / np.cosh(np.pi * (0.7j - x))
    d2 = np.pi / np.cosh(np.pi * (0.2j - x - 0.4))
    a = solve_linear(aux, d1)
    b = solve_linear(aux, d2)
    c = solve_linear(aux, 2 * d1 - 3 * d2)
    assert np.abs(c[0] - (2 * a[0] - 3 * b[0])).max() < 1e-12
    assert np.abs(c[1] - (2 * a[1] - 3 * b[1])).max() < 1e-12


def test_first_order_jet_matches_finite_difference(aux_cache):
    aux = aux_cache(32)
    lam, h = -0.3, 1e-3
    jet = solve_g(aux, lam, 1)
    up = solve_g(aux, lam + h, 0)
    dn = solve_g(aux, lam - h, 0)
    fd = (up.weighted_plus[0] - dn.weighted_plus[0]) / (2 * h)
    assert np.abs(fd - jet.weighted_plus[1]).max() < 1e-6 * max(1, np.abs(fd).max())


def test_driving_term_finite_on_grid(aux_cache):
    aux = aux_cache(8)
    d = sech_derivatives(0.5j - aux.grid.nodes, 3)
    assert all(np.isfinite(x).all() for x in d)


def test_pole_on_node_rejected(aux_cache):
    aux = aux_cache(8)
    node = aux.grid.nodes[100]
    with pytest.raises(ValueError):
        solve_g(aux, -1j * node, 0)


def test_jet_order_bounds(aux_cache):
    with pytest.raises(ValueError):
        solve_g(aux_cache(8), 0.0, 4)


def test_g_functions_recovered_from_dressed(aux_cache):
    aux = aux_cache(8)
    gj = solve_g(aux, -0.3, 0)
    beta, _ = aux.fractions()
    mask = np.abs(beta) > 1e-3
    assert np.allclose((gj.g_plus[0] * beta)[mask], gj.weighted_plus[0][mask])


def test_grid_refinement_stability():
    coarse = omega_value(solve_aux(64), 0, 0)
    fine = omega_value(solve_aux(64, RapidityGrid(50.0, 8192)), 0, 0)
    assert abs(coarse - fine) < 1e-8


_AUX = {}


@settings(max_examples=8, deadline=None)
@given(st.floats(-0.9, -0.05))
def test_omega_real_on_negative_axis(lam):
    if 8 not in _AUX:
        _AUX[8] = solve_aux(8)
    aux = _AUX[8]
    assert abs(omega_value(aux, lam, 0.0).imag) < 1e-10
