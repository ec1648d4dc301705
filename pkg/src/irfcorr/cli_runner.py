"""Command-line driver: correlator tables, verifications and plot data.

Examples
--------
::

    python3 -m irfcorr --command table
    python3 -m irfcorr --command nlie --lengths 16 32 --format csv
    python3 -m irfcorr --command verify-qkz --lengths 4 8 --seed 7
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .density_correlators import CORRELATOR_NAMES, CorrelatorTable, correlators_from_jet
from .exact_diag import correlator_ed, omega_from_ed, ground_state, verify_qkz
from .nlie_solver import RapidityGrid, solve_aux
from .omega import fe_residual, nlie_provider, omega_jet
from .thermo_limit import omega_inf, thermo_jet

COMMANDS = ("table", "ed", "nlie", "thermo", "verify-qkz", "verify-omega-fe", "figure5")
COLUMNS = CORRELATOR_NAMES[:5]
CSV_HEADER = ("L",) + COLUMNS + ("method",)
DEFAULT_LENGTHS = (4, 8, 12, 16, 32, 64, 128, 256, 512, 1024, math.inf)
ED_MAX_LENGTH = 12
QKZ_LENGTHS = (4, 8)
VERIFY_THRESHOLD = 1e-9
NLIE_FE_THRESHOLD = 1e-8
THERMO_FE_THRESHOLD = 1e-12

#: Reference values (8 decimals; 12 for the infinite chain).
REFERENCE_TABLE = {
    4: (-0.66666667, 0.33333333, -0.66666667, 1.00000000, 0.66666667),
    8: (-0.60851556, 0.26103720, -0.25193710, 0.55630211, 0.21746487),
    12: (-0.59859899, 0.25044371, -0.22109565, 0.51802986, 0.18542814),
    16: (-0.59519136, 0.24696584, -0.21183645, 0.50601523, 0.17583391),
    32: (-0.59193864, 0.24374937, -0.20358916, 0.49500263, 0.16727766),
    64: (-0.59113127, 0.24297329, -0.20163433, 0.49232982, 0.16524315),
    128: (-0.59092994, 0.24278223, -0.20115366, 0.49166622, 0.16474172),
    256: (-0.59087965, 0.24273481, -0.20103420, 0.49150058, 0.16461694),
    512: (-0.59086709, 0.24272301, -0.20100442, 0.49145918, 0.16458580),
    1024: (-0.59086395, 0.24272006, -0.20099698, 0.49144884, 0.16457802),
    math.inf: (-0.590862907413, 0.242719079825, -0.200994509028, 0.491445392361,
               0.164575433372),
}
TOLERANCE = {"ed": 1e-8, "nlie": 1e-6, "thermo": 1e-10}


class StageError(RuntimeError):
    """A computation failed; the message names the chain length and stage."""


@dataclass
class RunConfig:
    """Parsed command-line options."""

    command: str = "table"
    lengths: list = field(default_factory=lambda: list(DEFAULT_LENGTHS))
    x_max: float = 25.0
    n_points: int = 4096
    tol: float = 1e-13
    max_iter: int = 5000
    output_format: str = "json"
    output_path: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        for L in self.lengths:
            if not math.isinf(L) and (L != int(L) or int(L) % 2 or L < 4):
                raise ValueError(f"chain lengths must be even integers >= 4, got {L}")
        self.grid  # validates the grid parameters

    @property
    def grid(self) -> RapidityGrid:
        return RapidityGrid(self.x_max, self.n_points)


def _parse_length(text: str) -> float:
    if text.lower() in ("inf", "infinity", "oo"):
        return math.inf
    return int(text)


def _stage(L, stage, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:  # surface the failing job with context
        raise StageError(f"L={L}, stage {stage}: {type(exc).__name__}: {exc}") from exc


# ---------------------------------------------------------------------------
# single-length computations


def ed_row(L: int) -> CorrelatorTable:
    """All five correlators from the exact three-spin ground state."""
    if L > ED_MAX_LENGTH:
        raise ValueError(f"exact diagonalization is limited to L <= {ED_MAX_LENGTH}")
    entries = {n: _stage(L, "ed", correlator_ed, L, n) for n in COLUMNS}
    return CorrelatorTable(L, entries, "ed")


def nlie_row(L: int, config: RunConfig) -> CorrelatorTable:
    """Correlators from the NLIE derivative jet."""
    aux = _stage(L, "nlie-aux", solve_aux, L, config.grid, config.tol, config.max_iter)
    jet = _stage(L, "nlie-jet", omega_jet, aux)
    return correlators_from_jet(jet, "nlie")


def thermo_row() -> CorrelatorTable:
    return correlators_from_jet(thermo_jet(), "thermo")


def _map(fn, items):
    items = list(items)
    if len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(len(items), 8)) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands


def _compare(table: CorrelatorTable) -> dict | None:
    ref = REFERENCE_TABLE.get(table.length)
    if ref is None:
        return None
    tol = TOLERANCE[table.method]
    diffs = [v - r for v, r in zip(table.row(COLUMNS), ref)]
    return {"L": _fmt_length(table.length), "method": table.method, "tolerance": tol,
            "max_abs_diff": max(abs(d) for d in diffs), "pass": all(abs(d) < tol for d in diffs)}


def run_table(config: RunConfig) -> dict:
    """Correlator rows for every requested length.

    ``L <= 12`` yields an ED row, an NLIE row and their difference; larger
    ``L`` the NLIE row only; ``inf`` the closed-form row.
    """
    rows, diffs = [], []
    finite = [L for L in config.lengths if not math.isinf(L)]
    nlie = dict(zip(finite, _map(lambda L: nlie_row(L, config), finite)))
    for L in config.lengths:
        if math.isinf(L):
            rows.append(thermo_row())
            continue
        if L <= ED_MAX_LENGTH:
            ed = ed_row(L)
            rows.append(ed)
            d = {n: ed[n] - nlie[L][n] for n in COLUMNS}
            diffs.append(CorrelatorTable(L, d, "ed-nlie"))
        rows.append(nlie[L])
    checks = [c for c in map(_compare, rows) if c is not None]
    return {"rows": rows, "differences": diffs, "checks": checks,
            "ok": all(c["pass"] for c in checks)}


def run_single(config: RunConfig) -> dict:
    """Rows for one method only (``ed``, ``nlie`` or ``thermo``)."""
    if config.command == "thermo":
        rows = [thermo_row()]
    elif config.command == "ed":
        rows = [ed_row(int(L)) for L in config.lengths]
    else:
        rows = _map(lambda L: nlie_row(int(L), config), config.lengths)
    checks = [c for c in map(_compare, rows) if c is not None]
    return {"rows": rows, "differences": [], "checks": checks,
            "ok": all(c["pass"] for c in checks)}


def run_figure5(config: RunConfig) -> dict:
    """Correlators divided by their infinite-chain values, per length.

    Raises
    ------
    ValueError
        If the lengths are not ascending or a limiting value is too small to
        divide by.
    """
    finite = [L for L in config.lengths if not math.isinf(L)]
    if finite != sorted(finite):
        raise ValueError("figure5 expects lengths in ascending order")
    inf_row = thermo_row()
    for n in COLUMNS:
        if abs(inf_row[n]) < 1e-14:
            raise ValueError(f"limiting value of {n} vanishes; cannot normalize")
    base = run_single(RunConfig(**{**asdict(config), "command": "nlie", "lengths": finite}))
    rows = []
    for t in base["rows"]:
        rows.append(CorrelatorTable(t.length, {n: t[n] / inf_row[n] for n in COLUMNS},
                                    "nlie/thermo"))
    return {"rows": rows, "differences": [], "checks": [], "ok": True}


def _seeded_inhomogeneities(rng: np.random.Generator, L: int) -> np.ndarray:
    return rng.uniform(-0.25, 0.25, size=L)


def run_verify(config: RunConfig) -> dict:
    """Residuals of the qKZ equation or of the ``omega`` functional equation."""
    rng = np.random.default_rng(config.seed)
    residuals = []
    if config.command == "verify-qkz":
        for L in config.lengths:
            if L not in QKZ_LENGTHS:
                raise ValueError(f"verify-qkz supports L in {QKZ_LENGTHS} only, got {L}")
            for n in (2, 3):
                u = _seeded_inhomogeneities(rng, int(L))
                k = int(rng.integers(0, int(L)))
                lams = list(rng.uniform(-0.3, 0.3, size=n - 1)) + [u[k]]
                r = _stage(L, f"qkz n={n}", verify_qkz, int(L), n, lams, u)
                residuals.append({"check": "qkz", "L": int(L), "n": n, "residual": r,
                                  "threshold": VERIFY_THRESHOLD, "pass": r < VERIFY_THRESHOLD})
    else:
        for L in config.lengths:
            if math.isinf(L):
                r = fe_residual(lambda a, b: omega_inf(a - b), 0.4, 0.0)
                residuals.append({"check": "omega-fe thermo", "L": "inf", "n": 2, "residual": r,
                                  "threshold": THERMO_FE_THRESHOLD,
                                  "pass": r < THERMO_FE_THRESHOLD})
                continue
            L = int(L)
            if L <= ED_MAX_LENGTH and L % 4 == 0:
                gs = _stage(L, "ed ground state", ground_state, L)
                r = fe_residual(lambda a, b: omega_from_ed(gs, a, b), 0.3, 0.0)
                residuals.append({"check": "omega-fe ed", "L": L, "n": 2, "residual": r,
                                  "threshold": VERIFY_THRESHOLD, "pass": r < VERIFY_THRESHOLD})
            if L >= 8:
                aux = _stage(L, "nlie-aux", solve_aux, L, config.grid, config.tol,
                             config.max_iter)
                prov = nlie_provider(aux, with_jet=False)
                # inside the analyticity strip of the integral representation
                r = fe_residual(prov, -0.3, 0.0)
                residuals.append({"check": "omega-fe nlie", "L": L, "n": 2, "residual": r,
                                  "threshold": NLIE_FE_THRESHOLD, "pass": r < NLIE_FE_THRESHOLD})
    return {"rows": [], "residuals": residuals, "ok": all(r["pass"] for r in residuals)}


# ---------------------------------------------------------------------------
# serialization


def _fmt_length(L) -> str | int:
    return "inf" if math.isinf(L) else int(L)


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def to_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "residuals" in result:
        w.writerow(("check", "L", "n", "residual", "threshold", "pass"))
        for r in result["residuals"]:
            w.writerow((r["check"], r["L"], r["n"], f"{r['residual']:.3e}",
                        f"{r['threshold']:.0e}", r["pass"]))
        return buf.getvalue()
    w.writerow(CSV_HEADER)
    for t in list(result["rows"]) + list(result.get("differences", [])):
        w.writerow([_fmt_length(t.length)] + [_fmt(v) for v in t.row(COLUMNS)] + [t.method])
    return buf.getvalue()


def to_json(result: dict, config: RunConfig) -> str:
    def row(t):
        return {"L": _fmt_length(t.length), "method": t.method,
                **{n: float(_fmt(t[n])) for n in COLUMNS}}

    cfg = asdict(config)
    cfg["lengths"] = [_fmt_length(L) for L in config.lengths]
    out = {"command": config.command, "config": cfg,
           "rows": [row(t) for t in result.get("rows", [])]}
    if result.get("differences"):
        out["differences"] = [row(t) for t in result["differences"]]
    if "checks" in result:
        out["checks"] = result["checks"]
    if "residuals" in result:
        out["residuals"] = result["residuals"]
    out["ok"] = result["ok"]
    return json.dumps(out, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="irfcorr", description="Short-distance correlators of the three-spin chain.")
    p.add_argument("--command", choices=COMMANDS, default="table")
    p.add_argument("--lengths", nargs="+", type=_parse_length, default=None,
                   help="even chain lengths; 'inf' selects the infinite chain")
    p.add_argument("--x-max", type=float, default=25.0)
    p.add_argument("--n-points", type=int, default=4096)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--format", choices=("json", "csv"), default="json", dest="output_format")
    p.add_argument("--out", default=None, dest="output_path")
    p.add_argument("--seed", type=int, default=0)
    return p


def _default_lengths(command: str) -> list:
    return {
        "table": list(DEFAULT_LENGTHS),
        "ed": [4, 8, 12],
        "nlie": [16, 32, 64, 128, 256, 512, 1024],
        "thermo": [math.inf],
        "verify-qkz": list(QKZ_LENGTHS),
        "verify-omega-fe": [4, 8, 12, math.inf],
        "figure5": [16, 32, 64, 128, 256, 512, 1024],
    }[command]


def run(config: RunConfig) -> dict:
    if config.command == "table":
        return run_table(config)
    if config.command in ("ed", "nlie", "thermo"):
        return run_single(config)
    if config.command == "figure5":
        return run_figure5(config)
    return run_verify(config)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    lengths = args.lengths if args.lengths is not None else _default_lengths(args.command)
    try:
        config = RunConfig(args.command, lengths, args.x_max, args.n_points, args.tol,
                           args.max_iter, args.output_format, args.output_path, args.seed)
        start = time.perf_counter()
        result = run(config)
    except (ValueError, StageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = to_csv(result) if config.output_format == "csv" else to_json(result, config)
    if config.output_path:
        with open(config.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for c in result.get("checks", []):
        status = "ok  " if c["pass"] else "MISS"
        print(f"{status} L={c['L']:>5} {c['method']:<6} max|diff|={c['max_abs_diff']:.2e} "
              f"(tol {c['tolerance']:.0e})", file=sys.stderr)
    print(f"{config.command} finished in {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return 0 if result["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
