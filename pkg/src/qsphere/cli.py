"""Command-line harness: verification, Berezin tables, distance sweeps.

Subcommands
-----------
verify    run the invariant suites, emit a JSON report, exit 1 on failure
berezin   Berezin coefficient table for one (N, q): CSV plus JSON fixture
sweep     distance-bound table over a (q, N) grid: one CSV row per cell
lipnorm   Lip-norm estimate of a sphere element
mk        duality lower bound for one (q, N) cell

Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
Sweeps are deterministic for a fixed seed; cells may be evaluated
concurrently (--jobs) without changing the output bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .qscalar import QParam
from .pbw import from_json as element_from_json
from .peter_weyl import UIndex, UVector, to_element
from .podles import berezin, berezin_coefficients, fuzzy_basis, generators_podles
from .qmetric import (DISTANCE_CSV_HEADER, DistanceReport, OptimizerConfig,
                      TruncationConfig, distq_upper, dq_upper, gns_norm,
                      lipnorm, mk_lower)
from . import verify as verify_mod

DEFAULT_Q_GRID = (0.3, 0.5, 0.7, 0.9, 1.0)
DEFAULT_N_GRID = (1, 2, 4, 8, 16, 32, 64)
BEREZIN_N_MAX = 64


@dataclass(frozen=True)
class SweepConfig:
    """Grid, truncation, and reproducibility settings for a sweep."""

    q_grid: tuple
    N_grid: tuple
    truncation: TruncationConfig
    seed: int
    output_dir: Path
    jobs: int = 1

    def validate(self) -> None:
        if not self.q_grid or not self.N_grid:
            raise ValueError("grids must be nonempty")
        for qv in self.q_grid:
            if not (0.0 < qv <= 1.0):
                raise ValueError(f"q must lie in (0, 1], got {qv}")
        for N in self.N_grid:
            if N < 0:
                raise ValueError(f"N must be nonnegative, got {N}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    return data


def _sweep_config(args) -> SweepConfig:
    cfg = _load_config(args.config)
    q_grid = tuple(args.q) if args.q else tuple(cfg.get("q_grid", DEFAULT_Q_GRID))
    N_grid = tuple(args.N) if args.N else tuple(cfg.get("N_grid", DEFAULT_N_GRID))
    trunc = TruncationConfig(
        max_degree=args.max_degree if args.max_degree is not None
        else int(cfg.get("max_degree", 16)),
        stop_tol=args.tol if args.tol is not None else float(cfg.get("tol", 1e-6)),
    )
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    out = Path(args.out if args.out is not None else cfg.get("output_dir", "."))
    jobs = args.jobs if args.jobs is not None else int(cfg.get("jobs", 1))
    sc = SweepConfig(q_grid=q_grid, N_grid=N_grid, truncation=trunc, seed=seed,
                     output_dir=out, jobs=jobs)
    sc.validate()
    return sc


def _cell_seed(seed: int, q: float, N: int) -> int:
    return (seed * 1000003 + int(round(q * 1e9)) * 7919 + N * 104729) % (2 ** 31)


def _random_selfadjoint_fuzzy(p: QParam, deg: int, rng) -> "AlgebraElement":
    from .pbw import adjoint, zero
    from .peter_weyl import u_entry
    acc = zero(p)
    for m in range(deg + 1):
        for i in range(2 * m + 1):
            c = complex(rng.standard_normal(), rng.standard_normal())
            acc = acc + c * u_entry(p, 2 * m, i, m)
    return acc + adjoint(acc)


def _lip_margin(p: QParam, N: int, trunc: TruncationConfig, seed: int,
                samples: int = 3) -> tuple:
    """min over samples of lipnorm(x) - lipnorm(beta_N x) and a joint flag."""
    from .podles import berezin_element
    rng = np.random.default_rng(seed)
    deg = min(4, N)
    margin = float("inf")
    converged = True
    for _ in range(samples):
        x = _random_selfadjoint_fuzzy(p, deg, rng)
        lx = lipnorm(x, trunc)
        lbx = lipnorm(berezin_element(N, x), trunc)
        margin = min(margin, lx.value - lbx.value)
        converged = converged and lx.converged and lbx.converged
    return margin, converged


def sweep_cell(q: float, N: int, trunc: TruncationConfig, seed: int) -> DistanceReport:
    p = QParam.from_q(q)
    du = dq_upper(N, p)
    mk = mk_lower(N, p, OptimizerConfig(seed=_cell_seed(seed, q, N)))
    margin, conv = _lip_margin(p, N, trunc, _cell_seed(seed, q, N) ^ 0x5A5A)
    return DistanceReport(q=q, N=N, dq_upper=du, dq_lower=mk.value,
                          lip_margin=margin, distq_upper=distq_upper(N, p),
                          converged=conv)


# -- subcommands ------------------------------------------------------------------

def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    q_values = list(args.q) if args.q else list(cfg.get("q_grid", (0.5, 0.9, 1.0)))
    for qv in q_values:
        if not (0.0 < qv <= 1.0):
            print(f"error: q must lie in (0, 1], got {qv}", file=sys.stderr)
            return 2
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    t0 = time.time()
    results = verify_mod.run_all(q_values, seed=seed, heavy=args.heavy)
    total_failed = 0
    worst = 0.0
    for r in results:
        status = "PASS" if r.n_failed == 0 else "FAIL"
        print(f"[{status}] {r.suite:12s} q={r.q:.4g}  "
              f"{r.n_passed} passed, {r.n_failed} failed, "
              f"worst residual {r.worst:.3e}  ({r.seconds:.1f}s)")
        for c in r.checks:
            if not c.passed:
                print(f"         failing: {c.name}: {c.residual:.3e} > {c.tol:.1e}")
        total_failed += r.n_failed
        worst = max(worst, r.worst)
    report = {
        "q_values": q_values,
        "seed": seed,
        "failed": total_failed,
        "worst_residual": worst,
        "seconds": time.time() - t0,
        "suites": [r.as_dict() for r in results],
    }
    out = Path(args.out) if args.out else Path("verify_report.json")
    out.write_text(json.dumps(report, indent=2))
    print(f"report: {out}  ({'ok' if total_failed == 0 else f'{total_failed} failing'})")
    return 0 if total_failed == 0 else 1


def cmd_berezin(args) -> int:
    if not (0.0 < args.q <= 1.0):
        print(f"error: q must lie in (0, 1], got {args.q}", file=sys.stderr)
        return 2
    if args.N < 0 or args.N > BEREZIN_N_MAX:
        print(f"error: N must lie in [0, {BEREZIN_N_MAX}]", file=sys.stderr)
        return 2
    p = QParam.from_q(args.q)
    coeffs = berezin_coefficients(args.N, p)
    outdir = Path(args.out) if args.out else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"berezin_q{args.q:g}_N{args.N}"
    csv_path = outdir / f"{stem}.csv"
    lines = ["m,B"] + [f"{m},{v:.17g}" for m, v in enumerate(coeffs.values)]
    csv_path.write_text("\n".join(lines) + "\n")
    (outdir / f"{stem}.json").write_text(coeffs.to_json())
    for line in lines:
        print(line)
    print(f"wrote {csv_path}")
    return 0


def cmd_sweep(args) -> int:
    try:
        sc = _sweep_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cells = [(q, N) for q in sc.q_grid for N in sc.N_grid]
    t0 = time.time()
    if sc.jobs > 1:
        with ThreadPoolExecutor(max_workers=sc.jobs) as pool:
            reports = list(pool.map(
                lambda cell: sweep_cell(cell[0], cell[1], sc.truncation, sc.seed),
                cells))
    else:
        reports = [sweep_cell(q, N, sc.truncation, sc.seed) for q, N in cells]
    reports.sort(key=lambda r: (r.q, r.N))
    sc.output_dir.mkdir(parents=True, exist_ok=True)
    csv_path = sc.output_dir / "distance_sweep.csv"
    body = "\n".join([DISTANCE_CSV_HEADER] + [r.csv_row() for r in reports]) + "\n"
    csv_path.write_text(body)
    meta = {
        "q_grid": list(sc.q_grid), "N_grid": list(sc.N_grid),
        "max_degree": sc.truncation.max_degree, "stop_tol": sc.truncation.stop_tol,
        "seed": sc.seed, "seconds": time.time() - t0,
    }
    (sc.output_dir / "distance_sweep_config.json").write_text(json.dumps(meta, indent=2))
    print(body, end="")
    print(f"wrote {csv_path} ({len(reports)} cells, {meta['seconds']:.1f}s)",
          file=sys.stderr)
    bad = [r for r in reports if r.dq_lower > r.dq_upper + 1e-8]
    if bad:
        print(f"error: bound ordering violated in {len(bad)} cells", file=sys.stderr)
        return 1
    return 0


def cmd_lipnorm(args) -> int:
    if not (0.0 < args.q <= 1.0):
        print(f"error: q must lie in (0, 1], got {args.q}", file=sys.stderr)
        return 2
    p = QParam.from_q(args.q)
    if args.element:
        try:
            x = element_from_json(Path(args.element).read_text())
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot load element: {exc}", file=sys.stderr)
            return 2
    else:
        A, B, Bstar = generators_podles(p)
        x = {"A": A, "B": B, "Bstar": Bstar}[args.podles_gen]
    cfg = TruncationConfig(max_degree=args.max_degree, stop_tol=args.tol,
                           start_degree=min(args.max_degree, 8))
    est = lipnorm(x, cfg)
    print(json.dumps({"q": args.q, "value": est.value,
                      "last_increment": est.last_increment,
                      "degree_used": est.degree_used, "converged": est.converged}))
    return 0


def cmd_mk(args) -> int:
    if not (0.0 < args.q <= 1.0):
        print(f"error: q must lie in (0, 1], got {args.q}", file=sys.stderr)
        return 2
    p = QParam.from_q(args.q)
    opt = OptimizerConfig(seed=args.seed, starts=args.starts,
                          degree=args.degree)
    res = mk_lower(args.N, p, opt)
    du = dq_upper(args.N, p)
    print(json.dumps({"q": args.q, "N": args.N, "mk_lower": res.value,
                      "dq_upper": du, "ratio": res.value / du if du > 0 else None,
                      "start_values": res.start_values,
                      "evaluations": res.evaluations}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qsphere", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run the invariant suites")
    pv.add_argument("--config", default=None)
    pv.add_argument("--q", type=float, nargs="*", default=None)
    pv.add_argument("--seed", type=int, default=None)
    pv.add_argument("--heavy", action="store_true",
                    help="include the slower norm-estimation checks")
    pv.add_argument("--out", default=None)
    pv.set_defaults(func=cmd_verify)

    pb = sub.add_parser("berezin", help="Berezin coefficient table")
    pb.add_argument("--N", type=int, required=True)
    pb.add_argument("--q", type=float, required=True)
    pb.add_argument("--out", default=None)
    pb.set_defaults(func=cmd_berezin)

    ps = sub.add_parser("sweep", help="distance-bound sweep over a (q, N) grid")
    ps.add_argument("--config", default=None)
    ps.add_argument("--q", type=float, nargs="*", default=None)
    ps.add_argument("--N", type=int, nargs="*", default=None)
    ps.add_argument("--max-degree", type=int, default=None, dest="max_degree")
    ps.add_argument("--tol", type=float, default=None)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--out", default=None)
    ps.add_argument("--jobs", type=int, default=None)
    ps.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("lipnorm", help="Lip-norm estimate of a sphere element")
    pl.add_argument("--q", type=float, required=True)
    src = pl.add_mutually_exclusive_group()
    src.add_argument("--element", default=None,
                     help="path to a JSON-serialised element")
    src.add_argument("--podles-gen", choices=("A", "B", "Bstar"), default="A")
    pl.add_argument("--max-degree", type=int, default=24, dest="max_degree")
    pl.add_argument("--tol", type=float, default=1e-6)
    pl.set_defaults(func=cmd_lipnorm)

    pm = sub.add_parser("mk", help="duality lower bound for one cell")
    pm.add_argument("--q", type=float, required=True)
    pm.add_argument("--N", type=int, required=True)
    pm.add_argument("--degree", type=int, default=None)
    pm.add_argument("--starts", type=int, default=8)
    pm.add_argument("--seed", type=int, default=0)
    pm.set_defaults(func=cmd_mk)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
