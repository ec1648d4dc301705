import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import COLUMNS, TABLE1
from irfcorr.density_correlators import (
    CORRELATOR_NAMES, assemble_irf, correlators_from_jet, d2_xxx, d3_xxx, four_site_operators,
    omega3_fn, omega4_fns, permutation_operator, rho3_coefficients, rho4_coefficient,
    three_site_operators, word_operator,
)
from irfcorr.exact_diag import (
    chain_block, omega_from_ed, partial_trace_to_chain, reduced_density_irf, to_direct_sum_order,
)
from irfcorr.thermo_limit import thermo_jet, zeta_constants

LAMS3 = (0.21, -0.13, 0.34)
LAMS4 = (0.31, -0.12, 0.05, -0.27)


def _ed_omega(gs):
    return lambda a, b: omega_from_ed(gs, a, b)


@pytest.fixture(scope="module")
def ed_block3(gs8_generic):
    gs8_generic.with_eigenvalues(LAMS3)
    return chain_block(reduced_density_irf(gs8_generic, LAMS3))


@pytest.fixture(scope="module")
def ed_block4(gs8_generic):
    gs8_generic.with_eigenvalues(LAMS4)
    return chain_block(reduced_density_irf(gs8_generic, LAMS4))


# -- permutation algebra -------------------------------------------------------


def test_transpositions_are_involutions():
    for n, (i, j) in [(3, (1, 2)), (3, (2, 3)), (4, (1, 3)), (4, (2, 4))]:
        P = permutation_operator(n, i, j)
        assert np.array_equal(P @ P, np.eye(2**n))


def test_braid_relation():
    P12, P23 = permutation_operator(3, 1, 2), permutation_operator(3, 2, 3)
    assert np.array_equal(P12 @ P23 @ P12, P23 @ P12 @ P23)


def test_transposition_acts_on_product_states():
    up, dn = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    psi = np.kron(np.kron(up, dn), dn)
    assert np.array_equal(permutation_operator(3, 1, 2) @ psi, np.kron(np.kron(dn, up), dn))


def test_four_site_operators_independent():
    ops = np.array([op.ravel() for op in four_site_operators()])
    assert np.linalg.matrix_rank(ops) == 14
    assert np.array_equal(word_operator(4, [(1, 2), (3, 4)]),
                          permutation_operator(4, 1, 2) @ permutation_operator(4, 3, 4))


def test_permutation_operator_validation():
    with pytest.raises(ValueError):
        permutation_operator(3, 2, 2)


# -- two sites -----------------------------------------------------------------


def test_d2_free_point():
    assert np.allclose(d2_xxx(0.0), np.eye(4) / 4)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.5, 1.5))
def test_d2_trace_and_hermiticity(w):
    D = d2_xxx(w)
    assert abs(np.trace(D) - 1) < 1e-14
    assert np.allclose(D, D.conj().T)


def test_d2_against_ed(gs8_generic):
    lams = (0.17, -0.29)
    gs8_generic.with_eigenvalues(lams)
    B = chain_block(reduced_density_irf(gs8_generic, lams))
    assert np.abs(B - d2_xxx(omega_from_ed(gs8_generic, *lams))).max() < 1e-10


# -- three sites ---------------------------------------------------------------


def test_three_site_operator_order():
    I, P12, P23, P4, P5 = three_site_operators()
    assert np.array_equal(P4, P12 @ P23) and np.array_equal(P5, P23 @ P12)


def test_d3_against_ed(ed_block3, gs8_generic):
    D = d3_xxx(_ed_omega(gs8_generic), *LAMS3)
    assert np.abs(D - ed_block3).max() < 1e-8
    assert abs(np.trace(D) - 1) < 1e-12


def test_d3_tabulated_rho5_disagrees_with_ed(ed_block3, gs8_generic):
    D = d3_xxx(_ed_omega(gs8_generic), *LAMS3, printed_rho5=True)
    assert np.abs(D - ed_block3).max() > 1e-2


def test_d3_reduces_to_d2(gs8_generic):
    D = d3_xxx(_ed_omega(gs8_generic), *LAMS3).reshape(4, 2, 4, 2)
    D12 = np.einsum("iaja->ij", D)
    assert np.abs(D12 - d2_xxx(omega_from_ed(gs8_generic, *LAMS3[:2]))).max() < 1e-10


def test_rho3_rejects_coincident_points(thermo):
    with pytest.raises(ValueError):
        rho3_coefficients(thermo, 0.1, 0.1, 0.3)


def test_omega3_homogeneous_values(thermo, nlie_providers):
    ln2, z3, _ = zeta_constants()
    assert omega3_fn(thermo, 0, 0, 0) == pytest.approx(0.5 - 8 * ln2 + 4.5 * z3, abs=1e-13)
    assert omega3_fn(nlie_providers(16), 0, 0, 0) == pytest.approx(1.5 * 0.24696584, abs=1e-7)


def test_omega3_generic_approaches_homogeneous(thermo):
    shape = np.array([1.0, -0.4, 0.7])

    def at(s):
        return omega3_fn(thermo, *(s * shape)).real

    s = 0.02
    # two Richardson steps against an error of the form c1 s + c2 s**2
    r1 = [2 * at(h / 2) - at(h) for h in (s, s / 2)]
    extrap = (4 * r1[1] - r1[0]) / 3
    assert abs(extrap - omega3_fn(thermo, 0, 0, 0)) < 1e-6


# -- four sites ----------------------------------------------------------------


def _projected_rho(block):
    ops = np.array([op.ravel() for op in four_site_operators()]).T
    coef, *_ = np.linalg.lstsq(ops, block.ravel(), rcond=None)
    assert np.abs(ops @ coef - block.ravel()).max() < 1e-10
    return coef


def test_rho4_table_against_ed(ed_block4, gs8_generic):
    coef = _projected_rho(ed_block4)
    w = _ed_omega(gs8_generic)
    for k in range(9, 15):
        assert abs(rho4_coefficient(k, w, LAMS4) - coef[k - 1]) < 1e-10, k


def test_rho4_tabulated_entries_9_and_10_disagree(ed_block4, gs8_generic):
    coef = _projected_rho(ed_block4)
    w = _ed_omega(gs8_generic)
    for k in (9, 10):
        assert abs(rho4_coefficient(k, w, LAMS4, printed=True) - coef[k - 1]) > 1e-3, k
    for k in range(11, 15):
        assert rho4_coefficient(k, w, LAMS4, printed=True) == rho4_coefficient(k, w, LAMS4)


def test_omega4_generic_against_ed(ed_block4, gs8_generic):
    coef = _projected_rho(ed_block4)
    om1, om2, om3, om4 = omega4_fns(_ed_omega(gs8_generic), *LAMS4)
    c = coef.real
    assert om1 == pytest.approx(2 * (c[10] + c[11] + c[12] + c[13]), abs=1e-9)
    assert om2 == pytest.approx(4 * (c[8] + c[9]) + om1.real, abs=1e-9)
    assert om3 == pytest.approx(2 * (-c[10] + c[11] + c[12] - c[13]), abs=1e-9)
    # the Omega_4 shortcut is only exact in the homogeneous limit
    exact4 = 8 * c[2] + 4 * (c[4] + c[5] + c[6] + c[7]) + om1.real
    assert abs(om4 - exact4) > 1e-3


def test_rho4_argument_checks(thermo):
    with pytest.raises(ValueError):
        rho4_coefficient(8, thermo, LAMS4)
    with pytest.raises(ValueError):
        rho4_coefficient(9, thermo, (0.1, 0.1, 0.2, 0.3))


def test_omega4_homogeneous_thermo(thermo):
    o1, o2, o3, o4 = omega4_fns(thermo, 0, 0, 0, 0)
    assert o1 == pytest.approx(-0.200994509028, abs=1e-12)
    assert o2 == pytest.approx(0.491445392361, abs=1e-12)
    assert o3 == pytest.approx(0.164575433372, abs=1e-12)
    assert o4 == pytest.approx(2 * thermo.jet[(0, 0)] / 3, abs=1e-15)


def test_omega4_homogeneous_needs_jet():
    with pytest.raises(ValueError):
        omega4_fns(lambda a, b: 0.0, 0, 0, 0, 0)


# -- correlators -----------------------------------------------------------------


@pytest.mark.parametrize("L", [32, 128])
def test_correlators_from_nlie_jet(L, nlie_providers):
    row = correlators_from_jet(nlie_providers(L).jet).row(COLUMNS)
    assert np.allclose(row, TABLE1[L], atol=1e-6, rtol=0)


def test_correlator_relations():
    t = correlators_from_jet(thermo_jet())
    assert t["z1z3"] == t["x1"]
    assert t["yxy"] == -t["y1y3"]
    assert t["zxz"] == -t["z1z3"]
    assert set(t.entries) == set(CORRELATOR_NAMES)
    assert t.to_dict()["L"] == "inf"


# -- face-model assembly -------------------------------------------------------


def test_assemble_matches_ed(gs8_generic):
    lams = LAMS3
    gs8_generic.with_eigenvalues(lams)
    ed = reduced_density_irf(gs8_generic, lams)
    built = assemble_irf(d3_xxx(_ed_omega(gs8_generic), *lams), lams)
    assert np.abs(built.matrix - to_direct_sum_order(ed)).max() < 1e-8
    assert abs(np.trace(built.matrix) - 1) < 1e-12


@pytest.mark.parametrize("L", [8, 64, math.inf])
def test_one_and_two_site_chain_matrices(L, nlie_providers, thermo):
    prov = thermo if math.isinf(L) else nlie_providers(L)
    w = prov.jet[(0, 0)]
    D = assemble_irf(d2_xxx(w), (0.0, 0.0))
    D1 = partial_trace_to_chain(D).matrix
    assert np.allclose(D1, [[0.5, w / 3], [w / 3, 0.5]], atol=1e-14)
    assert np.linalg.eigvalsh(D1).min() > 0


def _displayed_d2(w12, w23, om3):
    a, b, c = w23 / 6, w12 / 6, om3 / 6
    return np.array([[0.25, a, b, c], [a, 0.25, c, b], [b, c, 0.25, a], [c, b, a, 0.25]])


@pytest.mark.parametrize("omega_kind", ["thermo", "ed"])
def test_two_site_chain_matrix_displayed_form(omega_kind, thermo, gs8_generic):
    w = thermo if omega_kind == "thermo" else _ed_omega(gs8_generic)
    l1, l2, l3 = LAMS3
    D2 = partial_trace_to_chain(assemble_irf(d3_xxx(w, *LAMS3), LAMS3)).matrix
    expect = _displayed_d2(w(l1, l2), w(l2, l3), omega3_fn(w, *LAMS3))
    assert np.abs(D2 - expect).max() < 1e-12


@pytest.mark.parametrize("L", [4, 8, 12, 16, 32, 64, 128, 256, 512, 1024, math.inf])
def test_homogeneous_chain_matrices_are_states(L, nlie_providers, thermo):
    prov = thermo if math.isinf(L) else nlie_providers(L)
    w, om3 = prov.jet[(0, 0)].real, omega3_fn(prov, 0, 0, 0).real
    for D in (np.array([[0.5, w / 3], [w / 3, 0.5]]), _displayed_d2(w, w, om3)):
        assert np.allclose(D, D.conj().T)
        assert abs(np.trace(D) - 1) < 1e-14
        assert np.linalg.eigvalsh(D).min() > -1e-10
