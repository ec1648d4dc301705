"""Approach of the finite-chain function omega to the infinite chain.

The derivative jet of omega at the origin approaches its closed-form limit
like 1/L**2, with amplitudes that grow with the derivative order.  One
Richardson step between L and 2L removes the leading correction.

Run with ``python3 demos/finite_size_scaling.py``.
"""
from irfcorr.nlie_solver import solve_aux
from irfcorr.omega import omega_jet
from irfcorr.thermo_limit import thermo_jet

ORDERS = ((0, 0), (1, 1), (2, 0), (2, 2), (3, 1))
ref = thermo_jet()
jets = {L: omega_jet(solve_aux(L)) for L in (64, 128, 256, 512, 1024)}

print("deviation from the infinite chain, scaled by L**2")
print(f"{'L':>6}" + "".join(f"{str(k):>14}" for k in ORDERS))
for L, jet in jets.items():
    print(f"{L:>6}" + "".join(f"{(jet[k] - ref[k]) * L**2:14.6f}" for k in ORDERS))

print("\nafter one Richardson step (4 w(2L) - w(L)) / 3, deviation")
for L in (128, 256, 512):
    ext = {k: (4 * jets[2 * L][k] - jets[L][k]) / 3 for k in ORDERS}
    print(f"{2 * L:>6}" + "".join(f"{ext[k] - ref[k]:14.2e}" for k in ORDERS))
