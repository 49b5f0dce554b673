"""TOML configuration schema: algebra blocks, SUGRA configurations, evaluation.

Algebra block (used by the algebra/curvature/dirac commands):

    [algebra]
    type = "so" | "su" | "abelian" | "double" | "sum" | "raw"
    p = 4                  # so(p, q)
    q = 2
    n = 3                  # su(n)
    dim = 2                # abelian; metric = [[...]] optional (identity default)
    lambda = -1.0          # optional: replace the pairing by Killing/lambda
    involution = "last_row" | "u1_block" | "so_real"
    c = 0.0                # double parameter
    [algebra.base]         # nested algebra table (type "double")
    [[algebra.blocks]]     # nested algebra tables (type "sum")

SUGRA configurations carry a top-level `kind`:

    kind = "sugra"         # explicit blocks + flux
    kind = "eta_family"    # m, c0, [block1]
    kind = "first_ansatz"  # m_cp, c0, c1, lambda1, d = [...]

see configs/ for complete examples of each kind.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import sugra as sg
from .errors import ConfigError
from .genmetric import admissible_check
from .liealg import (DoubleAlgebra, InvolutiveSplitting, QuadraticLieAlgebra,
                     NAMED_SPLITS, build_abelian, build_so, build_su,
                     concat_splittings, direct_sum, double, rescale_metric)
from .report import ResidualReport


def load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from None


# ---------------------------------------------------------------------------
# algebra blocks


@dataclass
class ParsedAlgebra:
    algebra: QuadraticLieAlgebra
    split: InvolutiveSplitting | None = None
    dbl: DoubleAlgebra | None = None


def _named_split(table: dict, kind: str) -> InvolutiveSplitting | None:
    name = table.get("involution")
    if name is None:
        return None
    if name not in NAMED_SPLITS:
        raise ConfigError(f"unknown involution scheme {name!r}")
    if kind == "so":
        return NAMED_SPLITS[name]((int(table["p"]), int(table.get("q", 0))))
    if kind == "su":
        return NAMED_SPLITS[name]((int(table["n"]),))
    raise ConfigError(f"involution not supported for algebra type {kind!r}")


def parse_algebra(table: dict) -> ParsedAlgebra:
    kind = table.get("type")
    if kind is None:
        raise ConfigError("algebra table needs a 'type' field")
    if kind == "double":
        base_tbl = table.get("base")
        if base_tbl is None:
            raise ConfigError("double needs a [algebra.base] table")
        base = parse_algebra(base_tbl)
        dbl = double(base.algebra, float(table.get("c", 0.0)), base.split)
        return ParsedAlgebra(dbl.algebra, dbl.grading if base.split else None, dbl)
    if kind == "sum":
        blocks = table.get("blocks")
        if not blocks:
            raise ConfigError("sum needs a nonempty [[algebra.blocks]] list")
        parts = [parse_algebra(b) for b in blocks]
        alg = direct_sum([p.algebra for p in parts])
        split = None
        if all(p.split is not None for p in parts):
            split = concat_splittings([p.split for p in parts],
                                      [p.algebra.dim for p in parts])
        return ParsedAlgebra(alg, split)
    if kind == "so":
        alg = build_so(int(table["p"]), int(table.get("q", 0)))
    elif kind == "su":
        alg = build_su(int(table["n"]))
    elif kind == "abelian":
        dim = int(table["dim"])
        metric = np.asarray(table.get("metric", np.eye(dim).tolist()), dtype=float)
        alg = build_abelian(dim, metric)
    elif kind == "raw":
        metric = np.asarray(table["metric"], dtype=float)
        structure = np.asarray(table["structure"], dtype=float)
        alg = QuadraticLieAlgebra(metric.shape[0], metric, structure)
    else:
        raise ConfigError(f"unknown algebra type {kind!r}")
    if "lambda" in table:
        alg = rescale_metric(alg, float(table["lambda"]))
    return ParsedAlgebra(alg, _named_split(table, kind))


def algebra_to_toml(table: dict, prefix: str = "algebra", array: bool = False) -> str:
    """Serialize an algebra spec dict back to a TOML block."""
    header = f"[[{prefix}]]" if array else f"[{prefix}]"
    lines = [header]
    nested = []
    for key, value in table.items():
        if key == "base":
            nested.append(algebra_to_toml(value, prefix=f"{prefix}.base"))
        elif key == "blocks":
            for blk in value:
                nested.append(algebra_to_toml(blk, prefix=f"{prefix}.blocks", array=True))
        else:
            lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines + nested)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return repr(value)


# ---------------------------------------------------------------------------
# sugra configurations


def _factor_from_table(tbl: dict) -> sg.AlgebraSpec:
    family = tbl.get("family", tbl.get("type"))
    if family == "so":
        return sg.AlgebraSpec("so", p=int(tbl["p"]), q=int(tbl.get("q", 0)),
                              involution=tbl.get("involution", "last_row"))
    if family == "su":
        return sg.AlgebraSpec("su", n=int(tbl["n"]),
                              involution=tbl.get("involution", "u1_block"))
    raise ConfigError(f"unknown block factor family {family!r}")


def _block_from_table(tbl: dict) -> sg.BlockSpec:
    if "factors" in tbl:
        factors = tuple(_factor_from_table(f) for f in tbl["factors"])
    else:
        factors = (_factor_from_table(tbl),)
    return sg.BlockSpec(factors, lam=float(tbl["lambda"]), c=float(tbl.get("c", 0.0)))


def _flux_from_table(tbl: dict | None) -> sg.FluxAnsatz:
    if tbl is None:
        return sg.FluxAnsatz.volume_products({})
    kind = tbl.get("kind", "volume_products")
    if kind == "volume_products":
        coeffs = {}
        for key, val in tbl.get("f", {}).items():
            h = tuple(int(ch) for ch in key) if isinstance(key, str) else tuple(key)
            if any(b not in (0, 1) for b in h):
                raise ConfigError(f"flux key {key!r} must be a 0/1 pattern")
            coeffs[h] = float(val)
        return sg.FluxAnsatz.volume_products(coeffs)
    if kind == "polynomial":
        return sg.FluxAnsatz.polynomial(tbl.get("d", []))
    if kind == "raw":
        triples = [(int(t[0]), float(t[1]), float(t[2])) for t in tbl.get("coeffs", [])]
        return sg.FluxAnsatz(kind="raw", raw=tuple(triples))
    raise ConfigError(f"unknown flux kind {kind!r}")


def sugra_config_from_dict(data: dict) -> sg.SugraConfig:
    kind = data.get("kind", "sugra")
    if kind == "eta_family":
        block1_tbl = data.get("block1")
        if block1_tbl is None:
            raise ConfigError("eta_family needs a [block1] table")
        if "factors" in block1_tbl:
            factors = tuple(_factor_from_table(f) for f in block1_tbl["factors"])
        else:
            factors = (_factor_from_table(block1_tbl),)
        return sg.eta_family(int(data["m"]), factors, float(data["c0"]))
    if kind == "first_ansatz":
        return sg.first_ansatz_config(int(data["m_cp"]), float(data["c0"]),
                                      float(data["c1"]), float(data["lambda1"]),
                                      [float(v) for v in data["d"]])
    if kind == "sugra":
        blocks = tuple(_block_from_table(b) for b in data.get("blocks", []))
        abelian = None
        if "abelian" in data:
            ab = data["abelian"]
            metric = ab.get("metric")
            abelian = sg.AbelianSpec(dim=int(ab["dim"]),
                                     metric=tuple(tuple(float(x) for x in row)
                                                  for row in metric) if metric else None)
        return sg.SugraConfig(blocks=blocks, abelian=abelian,
                              flux=_flux_from_table(data.get("flux")))
    raise ConfigError(f"unknown config kind {kind!r}")


def apply_overrides(data: dict, overrides: dict[str, float]) -> dict:
    """Override dotted config paths ('c0', 'blocks.1.c', 'd.0') with numbers."""
    import copy
    out = copy.deepcopy(data)
    for path, value in overrides.items():
        node = out
        parts = path.split(".")
        for i, part in enumerate(parts):
            last = i == len(parts) - 1
            key: object = int(part) if isinstance(node, list) else part
            if last:
                node[key] = value
            else:
                try:
                    node = node[key]
                except (KeyError, IndexError, TypeError):
                    raise ConfigError(f"override path {path!r} not found") from None
    return out


# ---------------------------------------------------------------------------
# evaluation entry points (module-level: picklable for process-pool scans)


def verify_config_dict(data: dict, tolerance: float = 1e-8) -> ResidualReport:
    """Assemble and evaluate a SUGRA config dict into one merged report."""
    kind = data.get("kind", "sugra")
    config = sugra_config_from_dict(data)
    model = sg.assemble(config)
    report = sg.check_equations(model, tolerance=tolerance)
    report = report.merged(admissible_check(model.vplus, model.isotropic), prefix="adm_")
    if config.flux.kind == "volume_products" and config.flux.volume:
        report = report.merged(
            sg.second_ansatz_residuals(model, tolerance=tolerance), prefix="eq4_")
    if kind == "first_ansatz":
        report = report.merged(
            sg.first_ansatz_residuals(int(data["m_cp"]), float(data["c0"]),
                                      float(data["c1"]), float(data["lambda1"]),
                                      [float(v) for v in data["d"]],
                                      tolerance=tolerance), prefix="ansatz_")
    return ResidualReport(report.residuals, tolerance, report.info)


def evaluate_point(data: dict, params: dict[str, float],
                   tolerance: float = 1e-8) -> ResidualReport:
    return verify_config_dict(apply_overrides(data, params), tolerance)


def scan_config_dict(data: dict, grid: dict[str, list[float]],
                     threads: int | None = None,
                     tolerance: float = 1e-8) -> list[sg.ScanRow]:
    evaluate = functools.partial(evaluate_point, data, tolerance=tolerance)
    return sg.scan(evaluate, grid, threads=threads)


# ---------------------------------------------------------------------------
# solve systems


def solve_variables(data: dict) -> list[str]:
    kind = data.get("kind", "sugra")
    if kind == "first_ansatz":
        m_cp = int(data["m_cp"])
        return ["c0", "c1", "lambda1"] + [f"d{i}" for i in range(m_cp + 1)]
    if kind == "sugra":
        config = sugra_config_from_dict(data)
        if config.flux.kind != "volume_products":
            raise ConfigError("solve supports volume-products flux for kind 'sugra'")
        names = [f"c{k}" for k in range(len(config.blocks))]
        names += [f"lambda{k}" for k in range(1, len(config.blocks))]
        names += ["f_" + "".join(str(b) for b in h) for h, _ in config.flux.volume]
        return names
    raise ConfigError(f"solve does not support config kind {kind!r}")


def solve_residual_fn(data: dict):
    """Residual vector function over the solve_variables ordering."""
    kind = data.get("kind", "sugra")
    if kind == "first_ansatz":
        m_cp = int(data["m_cp"])

        def residual(x):
            return sg.first_ansatz_system(m_cp, x[0], x[1], x[2], x[3:])

        return residual
    config = sugra_config_from_dict(data)
    if config.flux.kind != "volume_products":
        raise ConfigError("solve supports volume-products flux for kind 'sugra'")
    model = sg.assemble(config)
    dims = model.ctx.block_dims
    nblocks = len(config.blocks)
    patterns = [h for h, _ in config.flux.volume]
    has_abelian = config.abelian is not None

    def residual(x):
        cs = x[:nblocks]
        lams = np.concatenate([[1.0], x[nblocks:2 * nblocks - 1]])
        f_map = dict(zip(patterns, x[2 * nblocks - 1:]))
        return sg.volume_system(cs, lams, dims, has_abelian, f_map)

    return residual


def solve_start_point(data: dict, rng: np.random.Generator) -> np.ndarray:
    names = solve_variables(data)
    x0 = np.zeros(len(names))
    for i, name in enumerate(names):
        if name.startswith("c"):
            x0[i] = rng.uniform(-0.8, 0.8)
        elif name.startswith("lambda"):
            x0[i] = rng.uniform(-2.5, -0.3)
        else:
            x0[i] = rng.uniform(-1.5, 1.5)
    return x0
