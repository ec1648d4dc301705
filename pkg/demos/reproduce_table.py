"""Short-distance correlators of the three-spin chain for L = 4 .. infinity.

Small chains are diagonalized exactly.  Every finite length is also solved
through the nonlinear integral equations, and the infinite chain comes from
the closed forms in ln 2, zeta(3) and zeta(5).

Run with ``python3 demos/reproduce_table.py``.
"""
import math

from irfcorr.cli_runner import ed_row, nlie_row, thermo_row, RunConfig, COLUMNS

config = RunConfig("nlie", [16])
header = f"{'L':>6} {'method':<7}" + "".join(f"{c:>15}" for c in COLUMNS)
print(header)
print("-" * len(header))
for L in (4, 8, 12, 16, 32, 64, 128, 256, 512, 1024, math.inf):
    rows = [thermo_row()] if math.isinf(L) else [nlie_row(L, config)]
    if not math.isinf(L) and L <= 12:
        rows.insert(0, ed_row(L))
    for t in rows:
        label = "inf" if math.isinf(L) else str(L)
        print(f"{label:>6} {t.method:<7}" + "".join(f"{v:15.10f}" for v in t.row(COLUMNS)))
