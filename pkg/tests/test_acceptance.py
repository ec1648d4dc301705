"""Acceptance criteria 1-8, one test each.

Every test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line (bypassing output capture) before asserting, so that ``pytest -v``
shows the measured numbers next to the outcome.
"""
import math
import time

import numpy as np
import pytest

from conftest import COLUMNS, TABLE1
from irfcorr.density_correlators import (
    assemble_irf, correlators_from_jet, d2_xxx, d3_xxx, omega3_fn, omega4_fns,
)
from irfcorr.exact_diag import (
    chain_block, correlator_ed, ground_state, omega_from_ed, partial_trace_to_chain,
    reduced_density_irf, to_direct_sum_order, verify_qkz,
)
from irfcorr.face_model import check_yang_baxter
from irfcorr.nlie_solver import RapidityGrid, solve_aux
from irfcorr.omega import JET_ORDERS, fe_residual, nlie_provider, omega_jet, thermo_provider
from irfcorr.thermo_limit import omega_inf, thermo_jet

NLIE_LENGTHS = (16, 32, 64, 128, 256, 512, 1024)
FOUR_SITE_DISPLAYS = (-0.200994509028, 0.491445392361, 0.164575433372)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, f"criterion {n}: {detail}"

    return emit


def _max_diff(row, ref):
    return float(np.max(np.abs(np.asarray(row) - np.asarray(ref))))


def test_criterion_1_ed_rows(report):
    start = time.perf_counter()
    diffs = {L: _max_diff([correlator_ed(L, c) for c in COLUMNS], TABLE1[L]) for L in (4, 8, 12)}
    elapsed = time.perf_counter() - start
    ok = all(d < 1e-8 for d in diffs.values()) and elapsed < 60
    detail = ", ".join(f"L={L} max|diff|={d:.2e}" for L, d in diffs.items())
    report(1, ok, f"ED rows vs 8-decimal reference (tol 1e-8): {detail}; {elapsed:.1f} s")


def test_criterion_2_nlie_rows(report):
    start = time.perf_counter()
    diffs = {}
    for L in NLIE_LENGTHS:
        jet = omega_jet(solve_aux(L))
        diffs[L] = _max_diff(correlators_from_jet(jet).row(COLUMNS), TABLE1[L])
    elapsed = time.perf_counter() - start
    worst = max(diffs, key=diffs.get)
    ok = all(d < 1e-6 for d in diffs.values()) and elapsed < 60
    report(2, ok, f"NLIE rows L=16..1024 (tol 1e-6): worst L={worst} "
                  f"max|diff|={diffs[worst]:.2e}; {elapsed:.1f} s")


def test_criterion_3_closed_forms(report):
    row = correlators_from_jet(thermo_jet()).row(COLUMNS)
    d_row = _max_diff(row, TABLE1[math.inf])
    d_disp = _max_diff(omega4_fns(thermo_provider(), 0, 0, 0, 0)[:3], FOUR_SITE_DISPLAYS)
    ok = d_row < 1e-10 and d_disp < 1e-10
    report(3, ok, f"infinite row max|diff|={d_row:.2e}, four-site displays "
                  f"max|diff|={d_disp:.2e} (tol 1e-10)")


def test_criterion_4_qkz(report):
    rng = np.random.default_rng(0)
    res = {}
    for L in (4, 8):
        for n in (2, 3):
            u = rng.uniform(-0.25, 0.25, L)
            lams = list(rng.uniform(-0.3, 0.3, n - 1)) + [u[int(rng.integers(0, L))]]
            res[(L, n)] = verify_qkz(L, n, lams, u)
    worst = max(res.values())
    report(4, worst < 1e-9, f"qKZ residual max over (L,n) in {{4,8}}x{{2,3}} = {worst:.2e} "
                            f"(tol 1e-9)")


def test_criterion_5_functional_equation(report):
    ed = {L: fe_residual(lambda a, b, gs=ground_state(L): omega_from_ed(gs, a, b), 0.3, 0.0)
          for L in (4, 8)}
    nlie = {L: fe_residual(nlie_provider(solve_aux(L), with_jet=False), -0.3, 0.0)
            for L in (8, 12)}
    thermo = fe_residual(lambda a, b: omega_inf(a - b), 0.4, 0.0)
    ok = max(ed.values()) < 1e-9 and max(nlie.values()) < 1e-8 and thermo < 1e-12
    report(5, ok, f"ED max {max(ed.values()):.2e} (tol 1e-9), NLIE max "
                  f"{max(nlie.values()):.2e} (tol 1e-8), thermo {thermo:.2e} (tol 1e-12)")


def test_criterion_6_factorization(report, gs8_generic):
    lams = (0.21, -0.13, 0.34)
    gs8_generic.with_eigenvalues(lams)
    ed = reduced_density_irf(gs8_generic, lams)
    w = lambda a, b: omega_from_ed(gs8_generic, a, b)
    built = assemble_irf(d3_xxx(w, *lams), lams)
    d_block = float(np.abs(built.matrix - to_direct_sum_order(ed)).max())
    d_chain = float(np.abs(chain_block(ed) - d3_xxx(w, *lams)).max())

    l1, l2, l3 = lams
    a, b, c = w(l2, l3) / 6, w(l1, l2) / 6, omega3_fn(w, *lams) / 6
    shown2 = np.array([[0.25, a, b, c], [a, 0.25, c, b], [b, c, 0.25, a], [c, b, a, 0.25]])
    d_D2 = float(np.abs(partial_trace_to_chain(built).matrix - shown2).max())
    w12 = w(l1, l2)
    D1 = partial_trace_to_chain(assemble_irf(d2_xxx(w12), (l1, l2))).matrix
    d_D1 = float(np.abs(D1 - [[0.5, w12 / 3], [w12 / 3, 0.5]]).max())
    ok = max(d_block, d_chain, d_D2, d_D1) < 1e-8
    report(6, ok, f"3-site block vs ED {d_chain:.2e}, direct sum {d_block:.2e}, "
                  f"D1 form {d_D1:.2e}, D2 form {d_D2:.2e} (tol 1e-8)")


def test_criterion_7_consistency_ladder(report):
    jet = omega_jet(solve_aux(1024))
    ref = thermo_jet()
    orders = {k: abs(jet[k] - ref[k]) for k in JET_ORDERS}
    worst = max(orders, key=orders.get)
    nlie12 = correlators_from_jet(omega_jet(solve_aux(12))).row(COLUMNS)
    ed12 = [correlator_ed(12, c) for c in COLUMNS]
    d12 = _max_diff(nlie12, ed12)
    ok = orders[worst] < 2e-6 and d12 < 1e-6
    report(7, ok, f"L=1024 jet vs closed form: worst order {worst} "
                  f"|diff|={orders[worst]:.2e} (tol 2e-6), omega00 |diff|="
                  f"{orders[(0, 0)]:.2e}; NLIE vs ED at L=12 {d12:.2e} (tol 1e-6)")


def test_criterion_8_properties(report):
    worst_eig, worst_trace, worst_herm = math.inf, 0.0, 0.0
    for L in (4, 8, 12) + NLIE_LENGTHS + (math.inf,):
        prov = thermo_provider() if math.isinf(L) else nlie_provider(solve_aux(L))
        w, om3 = prov.jet[(0, 0)].real, omega3_fn(prov, 0, 0, 0).real
        a, c = w / 6, om3 / 6
        D2 = np.array([[0.25, a, a, c], [a, 0.25, c, a], [a, c, 0.25, a], [c, a, a, 0.25]])
        D1 = np.array([[0.5, w / 3], [w / 3, 0.5]])
        for D in (D1, D2):
            worst_eig = min(worst_eig, np.linalg.eigvalsh(D).min())
            worst_trace = max(worst_trace, abs(np.trace(D) - 1))
            worst_herm = max(worst_herm, np.abs(D - D.conj().T).max())
    rng = np.random.default_rng(8)
    yb = max(check_yang_baxter(*rng.uniform(-2, 2, 2)) for _ in range(20))
    base = nlie_provider(solve_aux(8), with_jet=False)(0, 0)
    fine = nlie_provider(solve_aux(8, RapidityGrid(50.0, 8192)), with_jet=False)(0, 0)
    grid = abs(base - fine)
    ok = (worst_eig > -1e-10 and worst_trace < 1e-12 and worst_herm == 0
          and yb < 1e-12 and grid < 1e-8)
    report(8, ok, f"min eigenvalue {worst_eig:.2e}, trace error {worst_trace:.1e}, "
                  f"Yang-Baxter {yb:.1e} (tol 1e-12), grid doubling of omega(0,0) at "
                  f"L=8 {grid:.1e} (tol 1e-8)")
