"""Command line runner for the built-in advection problems.

Two subcommands are provided:

``run``
    Integrate one problem with one scheme and write the final solution,
    per-stage diagnostics, optional snapshots and a run manifest.
``convergence``
    Run one or more schemes on a hierarchy of bisected meshes and write
    error/EOC tables.

All outputs are UTF-8 CSV files with a ``#`` provenance line followed by a
header row. The default output directory is taken from ``MCLAFC_OUT``.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .assembly import DiffusionVariant
from .diagnostics import convergence_table, l2_error
from .limiter import Prelimit
from .mesh import build_uniform, hierarchy, perturb
from .problems import PROBLEMS, get_problem
from .schemes import SchemeConfig, SchemeKind, StabilizationVariant
from .timeint import StageRecord, TimeConfig, run

log = logging.getLogger("mclafc")

OUT_ENV = "MCLAFC_OUT"
DEFAULT_LEVELS = (33, 65, 129, 257, 513)
DEFAULT_GAMMA = 0.4
SCHEME_ORDER = [k.value for k in SchemeKind]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return repr(float(x))


def write_csv(path: Path, provenance: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {provenance}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} columns, header has {len(header)}")
            writer.writerow([_fmt(v) for v in row])


def _float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=sorted(PROBLEMS), default="coshump")
    p.add_argument("--zeta", type=float, default=0.0, help="mesh perturbation amplitude in [0, 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nu", type=float, default=0.25, help="CFL number")
    p.add_argument("--rk", type=int, choices=(1, 2, 3), default=2, help="SSP Runge-Kutta order")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=None, help=f"CE coercivity parameter (default {DEFAULT_GAMMA})")
    p.add_argument("--dvariant", choices=[v.value for v in DiffusionVariant],
                   default=DiffusionVariant.RUSANOV.value)
    p.add_argument("--svariant", choices=[v.value for v in StabilizationVariant],
                   default=StabilizationVariant.LOW_ORDER.value)
    p.add_argument("--prelimit", choices=[v.value for v in Prelimit], default=Prelimit.CLIPPED.value,
                   help="CE mass-flux prelimiter")
    p.add_argument("--T", type=float, default=None, help="final time override")
    p.add_argument("--out", type=Path, default=None,
                   help=f"output directory (default ${OUT_ENV} or ./out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mclafc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one problem with one scheme")
    _add_common(p_run)
    p_run.add_argument("--scheme", choices=SCHEME_ORDER, default="mcl")
    p_run.add_argument("--N", type=int, default=101, help="number of mesh vertices")
    p_run.add_argument("--snapshots", type=_float_list, default=[], help="t1,t2,...")

    p_conv = sub.add_parser("convergence", help="error and EOC tables on bisected meshes")
    _add_common(p_conv)
    p_conv.add_argument("--scheme", choices=SCHEME_ORDER, action="append", default=None,
                        help="repeatable; default runs every scheme")
    p_conv.add_argument("--levels", type=_int_list, default=list(DEFAULT_LEVELS),
                        help="vertex counts, each 2N-1 of the previous")
    p_conv.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return parser


def _out_dir(args) -> Path:
    out = args.out if args.out is not None else Path(os.environ.get(OUT_ENV, "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _scheme_config(args, kind: str) -> SchemeConfig:
    gamma = DEFAULT_GAMMA
    if args.gamma is not None:
        if kind == SchemeKind.CE.value:
            gamma = args.gamma
        else:
            log.warning("--gamma only affects the CE scheme; ignored for %s", kind)
    return SchemeConfig(kind, omega=args.omega, gamma=gamma, diffusion=args.dvariant,
                        stabilization=args.svariant, prelimit=args.prelimit)


def _resolved_gamma(args, kind: str) -> float:
    return args.gamma if (args.gamma is not None and kind == SchemeKind.CE.value) else DEFAULT_GAMMA


def _provenance(command: str, params: dict) -> str:
    return f"mclafc {__version__} {command} " + " ".join(f"{k}={v}" for k, v in params.items())


def _node_table(mesh, u):
    """Vertex coordinates and values, repeating the first value at the closing periodic vertex."""
    x = mesh.vertices
    if mesh.periodic:
        u = np.append(u, u[0])
    return x, u


def cmd_run(args) -> int:
    out = _out_dir(args)
    problem = get_problem(args.problem)
    cfg = _scheme_config(args, args.scheme)
    mesh = perturb(build_uniform(args.N, problem.length, problem.boundary), args.zeta, args.seed)
    T = problem.final_time if args.T is None else args.T
    tcfg = TimeConfig(nu=args.nu, rk_order=args.rk, final_time=T, snapshot_times=args.snapshots)
    result = run(mesh, cfg, tcfg, problem)

    params = {"problem": args.problem, "scheme": args.scheme, "N": args.N, "zeta": args.zeta,
              "seed": args.seed, "nu": args.nu, "rk": args.rk, "omega": args.omega,
              "gamma": _resolved_gamma(args, args.scheme), "dvariant": args.dvariant,
              "svariant": args.svariant, "prelimit": args.prelimit, "T": T,
              "snapshots": ",".join(repr(s) for s in args.snapshots)}
    prov = _provenance("run", params)

    x, uh = _node_table(mesh, result.u)
    write_csv(out / "solution.csv", prov, ["x", "u_h", "u_exact"],
              zip(x, uh, problem.exact(x, result.t)))
    for ts, us in sorted(result.snapshots.items()):
        xs, vs = _node_table(mesh, us)
        write_csv(out / f"snapshot_t{ts:.6g}.csv", prov, ["x", "u_h", "u_exact"],
                  zip(xs, vs, problem.exact(xs, ts)))
    names = StageRecord.field_names()
    write_csv(out / "diagnostics.csv", prov, names,
              ([getattr(s, n) for n in names] for s in result.stages))

    e = l2_error(result.u, mesh, lambda xq: problem.exact(xq, result.t))
    cmd = ["mclafc", "run"] + [f"--{k}={v}" for k, v in params.items()
                               if not (k == "snapshots" and not v)
                               and not (k == "gamma" and args.scheme != SchemeKind.CE.value)]
    with open(out / "manifest.txt", "w", encoding="utf-8") as fh:
        fh.write(f"# {prov}\n")
        for k, v in params.items():
            fh.write(f"{k} = {v}\n")
        fh.write(f"steps = {result.n_steps}\n")
        fh.write(f"final_time = {result.t!r}\n")
        fh.write(f"l2_error = {e!r}\n")
        fh.write(f"max_bound_violation = {result.max_bound_violation()!r}\n")
        fh.write(f"gcc_violations = {result.gcc_violations()}\n")
        fh.write(f"command = {shlex.join(cmd)}\n")
    print(f"{SchemeKind(args.scheme).label}: N={args.N} steps={result.n_steps} "
          f"L2 error={e:.3e} max bound violation={result.max_bound_violation():.3e}")
    print(f"wrote {out}")
    return 0


def _convergence_job(job):
    problem_name, kind, cfg, levels, zeta, seed, nu, rk, T = job
    problem = get_problem(problem_name)
    meshes = hierarchy(levels[0], len(levels), problem.length, problem.boundary, zeta, seed)
    triples = []
    for mesh in meshes:
        res = run(mesh, cfg, TimeConfig(nu=nu, rk_order=rk, final_time=T), problem, diagnostics=False)
        err = l2_error(res.u, mesh, lambda xq: problem.exact(xq, res.t))
        triples.append((mesh.n_vertices, mesh.h, err))
    return kind, convergence_table(triples)


def check_levels(levels: Sequence[int]) -> None:
    if len(levels) < 2:
        raise ValueError("need at least two levels")
    for a, b in zip(levels[:-1], levels[1:]):
        if b != 2 * a - 1:
            raise ValueError(f"levels must come from bisection (N -> 2N-1), got {a} -> {b}")


def cmd_convergence(args, parser) -> int:
    try:
        check_levels(args.levels)
    except ValueError as exc:
        parser.error(str(exc))
    out = _out_dir(args)
    problem = get_problem(args.problem)
    T = problem.final_time if args.T is None else args.T
    kinds = args.scheme or SCHEME_ORDER
    kinds = [k for k in SCHEME_ORDER if k in kinds]
    jobs = [(args.problem, k, _scheme_config(args, k), list(args.levels), args.zeta,
             args.seed, args.nu, args.rk, T) for k in kinds]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = dict(pool.map(_convergence_job, jobs))
    else:
        results = dict(map(_convergence_job, jobs))

    params = {"problem": args.problem, "levels": ",".join(map(str, args.levels)),
              "zeta": args.zeta, "seed": args.seed, "nu": args.nu, "rk": args.rk,
              "omega": args.omega, "dvariant": args.dvariant, "svariant": args.svariant,
              "prelimit": args.prelimit, "T": T}
    for k in kinds:
        prov = _provenance("convergence", {"scheme": k, "gamma": _resolved_gamma(args, k), **params})
        write_csv(out / f"convergence_{k}.csv", prov, ["N", "h", "error", "eoc"],
                  ([r.N, r.h, r.l2Error, r.eoc] for r in results[k]))

    header = ["N"]
    for k in kinds:
        label = SchemeKind(k).label
        header += [label, f"{label}_EOC"]
    rows = []
    for idx, n in enumerate(args.levels):
        row = [n]
        for k in kinds:
            r = results[k][idx]
            row += [r.l2Error, r.eoc]
        rows.append(row)
    write_csv(out / "convergence_table.csv", _provenance("convergence", params), header, rows)

    print(" ".join(f"{h:>10}" for h in header))
    for row in rows:
        cells = [f"{row[0]:>10d}"]
        for v in row[1:]:
            cells.append(f"{'':>10}" if v is None else f"{v:>10.3g}")
        print(" ".join(cells))
    print(f"wrote {out}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            if args.N < 3:
                parser.error("--N must be at least 3")
            return cmd_run(args)
        return cmd_convergence(args, parser)
    except ValueError as exc:
        print(f"mclafc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
