"""Command-line interface.

Subcommands: algebra check, curvature gric|scalar|flow, dirac check,
sugra verify|solve|scan.  Machine-readable output (JSON/CSV) goes to stdout
or --output; a one-line human summary goes to stderr.  Exit codes: 0 all
residuals pass, 1 residual failure, 2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import config as cfgmod
from . import sugra as sg
from .curvature import Divergence, gric, ricci_flow, scalar_curvature
from .dirac import d0_on_invariants_check
from .errors import AlgebraError, ConfigError
from .genmetric import GeneralizedMetric, vplus_of_double
from .liealg import check as algebra_check
from .report import _sig12


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _summary(line: str) -> None:
    print(line, file=sys.stderr)


def _json_dumps(obj) -> str:
    def clean(x):
        if isinstance(x, dict):
            return {k: clean(v) for k, v in sorted(x.items())}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        if isinstance(x, (np.floating, float)):
            return _sig12(float(x))
        if isinstance(x, np.integer):
            return int(x)
        if isinstance(x, np.ndarray):
            return clean(x.tolist())
        return x

    return json.dumps(clean(obj), sort_keys=True, indent=2)


def _parse_kv(pairs: list[str] | None) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        key, _, val = item.partition("=")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"value of {key!r} is not a number: {val!r}") from None
    return out


def _parse_grid(specs: list[str]) -> dict[str, list[float]]:
    grid: dict[str, list[float]] = {}
    for item in specs:
        if "=" not in item:
            raise ConfigError(f"expected name=lo:hi:steps, got {item!r}")
        name, _, rng = item.partition("=")
        parts = rng.split(":")
        if len(parts) == 3:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if steps < 1:
                raise ConfigError("grid needs at least one step")
            grid[name.strip()] = list(np.linspace(lo, hi, steps))
        else:
            grid[name.strip()] = [float(p) for p in rng.split(",")]
    return grid


def _vplus_from_config(parsed: cfgmod.ParsedAlgebra, data: dict) -> GeneralizedMetric:
    tbl = data.get("vplus", {})
    if "columns" in tbl:
        cols = np.asarray(tbl["columns"], dtype=float).T
        return GeneralizedMetric(parsed.algebra, cols)
    if parsed.dbl is not None and parsed.dbl.base_split is not None:
        return vplus_of_double(parsed.dbl)
    raise ConfigError("no V+ specified: give [vplus] columns or use a graded double")


def _divergence_from_config(parsed: cfgmod.ParsedAlgebra, data: dict) -> Divergence | None:
    tbl = data.get("divergence")
    if tbl is None:
        return None
    return Divergence(np.asarray(tbl["eps"], dtype=float))


# ---------------------------------------------------------------------------
# command handlers


def cmd_algebra_check(args) -> int:
    data = cfgmod.load_toml(args.config)
    parsed = cfgmod.parse_algebra(data["algebra"])
    report = algebra_check(parsed.algebra)
    _emit(report.to_json(), args.output)
    _summary(f"algebra check: {report.summary()}")
    return 0 if report.passed else 1


def cmd_curvature_gric(args) -> int:
    data = cfgmod.load_toml(args.config)
    parsed = cfgmod.parse_algebra(data["algebra"])
    v = _vplus_from_config(parsed, data)
    div = _divergence_from_config(parsed, data)
    tensor = gric(parsed.algebra, v, div)
    payload = {"gric": tensor.matrix, "frobenius": tensor.frobenius,
               "rank_plus": v.rank, "scalar_curvature": scalar_curvature(
                   parsed.algebra, v, div)}
    _emit(_json_dumps(payload), args.output)
    _summary(f"gric: {v.rank}x{parsed.algebra.dim - v.rank} tensor, "
             f"|GRic|_F = {tensor.frobenius:.6g}")
    return 0


def cmd_curvature_scalar(args) -> int:
    data = cfgmod.load_toml(args.config)
    parsed = cfgmod.parse_algebra(data["algebra"])
    v = _vplus_from_config(parsed, data)
    div = _divergence_from_config(parsed, data)
    from .curvature import action_value
    payload = {"scalar_curvature": scalar_curvature(parsed.algebra, v, div),
               "action": action_value(parsed.algebra, v)}
    _emit(_json_dumps(payload), args.output)
    _summary(f"scalar curvature = {payload['scalar_curvature']:.6g}")
    return 0


def cmd_curvature_flow(args) -> int:
    data = cfgmod.load_toml(args.config)
    parsed = cfgmod.parse_algebra(data["algebra"])
    v = _vplus_from_config(parsed, data)
    div = _divergence_from_config(parsed, data)
    flow_tbl = data.get("flow", {})
    t_end = args.t_end if args.t_end is not None else float(flow_tbl.get("t_end", 1.0))
    dt = args.dt if args.dt is not None else float(flow_tbl.get("dt", 1e-3))
    result = ricci_flow(parsed.algebra, v, div, t_end, dt)
    _emit(result.to_csv_string(), args.output)
    last = result.states[-1]
    _summary(f"flow: {len(result.states)} states, t = {last.t:.6g}, "
             f"S = {last.action:.6g}, |GRic| = {last.gric_norm:.6g}"
             + ("" if result.completed else f" [halted: {result.message}]"))
    return 0 if result.completed else 1


def cmd_dirac_check(args) -> int:
    data = cfgmod.load_toml(args.config)
    parsed = cfgmod.parse_algebra(data["algebra"])
    if parsed.dbl is None:
        raise ConfigError("dirac check needs a double (type = \"double\")")
    report = d0_on_invariants_check(parsed.dbl)
    _emit(report.to_json(), args.output)
    _summary(f"dirac check: {report.summary()}")
    return 0 if report.passed else 1


def cmd_sugra_verify(args) -> int:
    data = cfgmod.load_toml(args.config)
    overrides = _parse_kv(args.param)
    if overrides:
        data = cfgmod.apply_overrides(data, overrides)
    report = cfgmod.verify_config_dict(data, tolerance=args.tolerance)
    _emit(report.to_json(), args.output)
    _summary(f"sugra verify: {report.summary()}")
    return 0 if report.passed else 1


def cmd_sugra_solve(args) -> int:
    data = cfgmod.load_toml(args.config)
    names = cfgmod.solve_variables(data)
    residual_fn = cfgmod.solve_residual_fn(data)
    pins = _parse_kv(args.pin)
    unknown = set(pins) - set(names)
    if unknown:
        raise ConfigError(f"unknown pinned variables: {sorted(unknown)}; "
                          f"variables are {names}")
    pin_idx = [names.index(k) for k in pins]

    seeds: list[np.ndarray] = []
    rng = np.random.default_rng(args.rng_seed)
    if args.seed.startswith("random:"):
        count = int(args.seed.split(":", 1)[1])
        for _ in range(count):
            seeds.append(cfgmod.solve_start_point(data, rng))
    else:
        seeds.append(np.asarray([float(v) for v in args.seed.split(",")], dtype=float))
    solutions = []
    for x0 in seeds:
        if x0.size != len(names):
            raise ConfigError(f"seed needs {len(names)} entries ({names})")
        for k, v in pins.items():
            x0[names.index(k)] = v
        res = sg.newton_solve(residual_fn, x0, pins=pin_idx)
        solutions.append({
            "x": dict(zip(names, res.x)),
            "residual_norm": res.residual_norm,
            "iterations": res.iterations,
            "converged": res.converged,
            "message": res.message,
        })
    _emit(_json_dumps({"variables": names, "solutions": solutions}), args.output)
    hits = sum(1 for s in solutions if s["converged"])
    _summary(f"sugra solve: {hits}/{len(solutions)} seeds converged")
    return 0 if hits > 0 else 1


def _scan_csv(rows: list[sg.ScanRow], grid_names: list[str]) -> str:
    residual_names: list[str] = []
    for row in rows:
        if row.report is not None:
            residual_names = sorted(row.report.residuals)
            break
    buf = io.StringIO()
    buf.write("# schema: genricci-scan-v1\n")
    writer = csv.writer(buf)
    writer.writerow(grid_names + residual_names + ["status", "pass", "message"])
    for row in rows:
        cells = [f"{row.params[n]:.12g}" for n in grid_names]
        if row.report is not None:
            cells += [f"{row.report.residuals.get(n, float('nan')):.12g}"
                      for n in residual_names]
        else:
            cells += [""] * len(residual_names)
        cells += [row.status, str(row.passed).lower(), row.message]
        writer.writerow(cells)
    return buf.getvalue()


def cmd_sugra_scan(args) -> int:
    data = cfgmod.load_toml(args.config)
    grid = _parse_grid(args.grid)
    if not grid:
        raise ConfigError("scan needs at least one --grid specification")
    rows = cfgmod.scan_config_dict(data, grid, threads=args.threads,
                                   tolerance=args.tolerance)
    _emit(_scan_csv(rows, list(grid)), args.output)
    npass = sum(1 for r in rows if r.passed)
    nerr = sum(1 for r in rows if r.status == "error")
    _summary(f"sugra scan: {npass}/{len(rows)} rows pass, {nerr} errors")
    return 0 if npass == len(rows) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genricci",
        description="generalized Ricci curvature and SUGRA systems on quadratic Lie algebras")
    sub = parser.add_subparsers(dest="group", required=True)

    def add_common(p):
        p.add_argument("config", help="TOML configuration file")
        p.add_argument("--output", help="write machine output to this path")

    algebra = sub.add_parser("algebra").add_subparsers(dest="cmd", required=True)
    p = algebra.add_parser("check", help="validate a quadratic Lie algebra")
    add_common(p)
    p.set_defaults(fn=cmd_algebra_check)

    curvature = sub.add_parser("curvature").add_subparsers(dest="cmd", required=True)
    p = curvature.add_parser("gric", help="generalized Ricci tensor")
    add_common(p)
    p.set_defaults(fn=cmd_curvature_gric)
    p = curvature.add_parser("scalar", help="generalized scalar curvature")
    add_common(p)
    p.set_defaults(fn=cmd_curvature_scalar)
    p = curvature.add_parser("flow", help="generalized Ricci flow trajectory (CSV)")
    add_common(p)
    p.add_argument("--t-end", type=float, default=None,
                   help="overrides [flow] t_end (default 1.0)")
    p.add_argument("--dt", type=float, default=None,
                   help="overrides [flow] dt (default 1e-3)")
    p.set_defaults(fn=cmd_curvature_flow)

    dirac = sub.add_parser("dirac").add_subparsers(dest="cmd", required=True)
    p = dirac.add_parser("check", help="generating operator on invariant forms")
    add_common(p)
    p.set_defaults(fn=cmd_dirac_check)

    sugra_p = sub.add_parser("sugra").add_subparsers(dest="cmd", required=True)
    p = sugra_p.add_parser("verify", help="evaluate the SUGRA residual system")
    add_common(p)
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="override a config value (dotted paths allowed)")
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.set_defaults(fn=cmd_sugra_verify)
    p = sugra_p.add_parser("solve", help="Newton-solve a residual system")
    add_common(p)
    p.add_argument("--pin", action="append", metavar="KEY=VALUE",
                   help="fix a variable at a value")
    p.add_argument("--seed", default="random:10",
                   metavar="V1,V2,...|random:N", help="start vector(s)")
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(fn=cmd_sugra_solve)
    p = sugra_p.add_parser("scan", help="grid scan, CSV output")
    add_common(p)
    p.add_argument("--grid", action="append", required=True,
                   metavar="NAME=LO:HI:STEPS")
    p.add_argument("--threads", type=int, default=os.cpu_count(),
                   help="process-pool size for grid points (default: all cores)")
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.set_defaults(fn=cmd_sugra_scan)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except KeyError as exc:
        print(f"configuration error: missing key {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except AlgebraError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
