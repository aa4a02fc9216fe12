"""Configuration-driven command line front end.

Subcommands: check, solve-eddy, saddle, limit-study, bidomain, decompose.
Configurations are TOML files (see configs/ for annotated fixtures); every
command writes a JSON report plus CSV output under --out and exits with

    0   all certifications and runs passed,
    2   a certification failed (the report names which check),
    3   the configuration could not be parsed or is inconsistent.

Float CSV output is pinned to 17 significant digits in scientific notation
so that fixed seed + fixed config reproduces files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import complex3d as cx
from . import degenerate as dg
from . import eddy as ed
from . import maxwell as mx
from . import sources
from .subspaces import Subspace, subspace_gap
from .weighted_time import TimeSignal, WeightedTimeGrid, weighted_norm

FLOAT_FMT = "{:.16e}"  # 17 significant digits


class ConfigError(Exception):
    pass


class CertificationError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration handling
# ---------------------------------------------------------------------------


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc


def _require(cfg: dict, section: str) -> dict:
    if section not in cfg:
        raise ConfigError(f"missing [{section}] section")
    block = cfg[section]
    if not isinstance(block, dict):
        raise ConfigError(f"[{section}] must be a table")
    return block


def _mesh_from_config(cfg: dict) -> tuple:
    block = _require(cfg, "mesh")
    if "n" not in block:
        raise ConfigError("[mesh] needs the cell count field 'n'")
    boxes = block.get("conducting_boxes", [])
    try:
        n = int(block["n"])
        boxes = [
            [[int(v) for v in rng] for rng in box] for box in boxes
        ]
        if any(len(box) != 3 or any(len(rng) != 2 for rng in box) for box in boxes):
            raise TypeError
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            "[mesh] conducting_boxes must be a list of boxes, each box three "
            "[lo, hi] integer cell ranges"
        ) from exc
    try:
        mesh = cx.build_mesh(n, boxes)
    except ValueError as exc:
        raise CertificationError(
            f"conducting_region_strictly_interior: {exc}"
        ) from exc
    return mesh, cx.build_operators(mesh)


def _grid_from_config(cfg: dict) -> WeightedTimeGrid:
    block = _require(cfg, "time")
    try:
        return WeightedTimeGrid(
            horizon=float(block.get("horizon", 1.0)),
            steps=int(block.get("steps", 64)),
            rho=float(block.get("rho", 1.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"[time] invalid: {exc}") from exc


def _materials(cfg: dict) -> dict:
    block = cfg.get("materials", {})
    return {"sigma": block.get("sigma", 1.0), "mu": block.get("mu", 1.0)}


def _assemble_from_config(cfg: dict):
    mesh, ops = _mesh_from_config(cfg)
    mats = _materials(cfg)
    try:
        problem = ed.assemble(mesh, ops, sigma_tilde=mats["sigma"], mu=mats["mu"])
    except (ValueError, RuntimeError) as exc:
        raise CertificationError(f"reduction_coercivity: {exc}") from exc
    return mesh, ops, problem


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT.format(float(x))
    return str(x)


def write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _field_snapshot_rows(mesh, values, kind: str):
    """Final-time snapshot rows: entity index, midpoint coordinates, axis,
    component value."""
    if kind == "edge":
        mids = cx.edge_midpoints(mesh)
        axes = mesh.edge_axis
    else:  # face midpoints, in the global face order of build_operators
        n = mesh.n
        h = mesh.h
        mids_list, axes_list = [], []
        shapes = {0: (n + 1, n, n), 1: (n, n + 1, n), 2: (n, n, n + 1)}
        for axis in range(3):
            ii, jj, kk = np.meshgrid(*[np.arange(s) for s in shapes[axis]], indexing="ij")
            coords = np.stack([ii.ravel(), jj.ravel(), kk.ravel()], axis=1).astype(float)
            for t in range(3):
                if t != axis:
                    coords[:, t] += 0.5
            mids_list.append(coords * h)
            axes_list.append(np.full(coords.shape[0], axis))
        mids = np.concatenate(mids_list, axis=0)
        axes = np.concatenate(axes_list)
    return [
        (i, mids[i, 0], mids[i, 1], mids[i, 2], int(axes[i]), values[i])
        for i in range(len(values))
    ]


def _history_rows(grid, signals: dict):
    names = list(signals)
    rows = []
    for nstep, t in enumerate(grid.times):
        rows.append((t, *[float(np.linalg.norm(signals[name].values[nstep])) for name in names]))
    return ["t"] + [f"{name}_l2" for name in names], rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check(cfg: dict, out: Path, prefix: str, seed: int, threads: int) -> int:
    report = {"hypotheses": {}}
    try:
        mesh, ops = _mesh_from_config(cfg)
        report["hypotheses"]["conducting_region_strictly_interior"] = {
            "passed": True,
            "components": mesh.num_components,
        }
    except CertificationError as exc:
        report["hypotheses"]["conducting_region_strictly_interior"] = {
            "passed": False,
            "error": str(exc),
        }
        report["passed"] = False
        write_json(out / f"{prefix}_check.json", report)
        print(json.dumps(report, indent=2, sort_keys=True, default=_json_default))
        return 2

    exact = cx.exactness_report(ops)
    report["hypotheses"]["chain_identity"] = {
        "passed": exact["chain_identity_max"] <= 1e-14,
        "max_entry": exact["chain_identity_max"],
    }
    report["hypotheses"]["complex_exactness"] = {
        "passed": exact["exact"],
        "rank_grad0": exact["rank_grad0"],
        "dim_kernel_curl0": exact["dim_kernel_curl0"],
        "harmonic_dim": exact["harmonic_dim"],
    }
    loc = cx.check_kernel_localization(mesh, ops)
    for name in (
        "exterior_kernel_localization",
        "conducting_kernel_localization",
        "closed_ranges",
        "restriction_surjective",
    ):
        report["hypotheses"][name] = loc[name]

    mats = _materials(cfg)
    problem = None
    try:
        problem = ed.assemble(mesh, ops, sigma_tilde=mats["sigma"], mu=mats["mu"])
        report["hypotheses"]["reduction_coercivity"] = {
            "passed": True,
            "c1": problem.reduction.c1,
            "dims": problem.reduction.decomposition.dims,
        }
        report["hypotheses"]["subspace_identities"] = {
            "passed": problem.subspace_checks.get("passed", True),
            **{
                k: v
                for k, v in problem.subspace_checks.items()
                if isinstance(v, dict)
            },
        }
    except (ValueError, RuntimeError) as exc:
        report["hypotheses"]["reduction_coercivity"] = {"passed": False, "error": str(exc)}
    if problem is not None:
        try:
            consts = ed.constants(problem)
            report["hypotheses"]["explicit_constants"] = {
                "passed": consts.c0_direct >= consts.c0_formula * (1.0 - 1e-10)
                or not consts.comparison_asserted,
                **consts.as_dict(),
            }
        except (ValueError, RuntimeError) as exc:
            report["hypotheses"]["explicit_constants"] = {"passed": False, "error": str(exc)}

    report["passed"] = all(h.get("passed", False) for h in report["hypotheses"].values())
    write_json(out / f"{prefix}_check.json", report)
    print(json.dumps(report, indent=2, sort_keys=True, default=_json_default))
    return 0 if report["passed"] else 2


def cmd_solve_eddy(cfg: dict, out: Path, prefix: str, seed: int, threads: int) -> int:
    mesh, ops, problem = _assemble_from_config(cfg)
    grid = _grid_from_config(cfg)
    src = cfg.get("source", {})
    J = sources.source_signal(problem, grid, src, seed=seed)
    K = TimeSignal.zeros(grid, ops.curl0.shape[0])
    sol = ed.solve(problem, J, K)

    header, rows = _history_rows(grid, {"E": sol.E, "H": sol.H, "J": J})
    write_csv(out / f"{prefix}_history.csv", header, rows)
    write_csv(
        out / f"{prefix}_E_final.csv",
        ["index", "x", "y", "z", "axis", "value"],
        _field_snapshot_rows(mesh, sol.E.values[-1], "edge"),
    )
    write_csv(
        out / f"{prefix}_H_final.csv",
        ["index", "x", "y", "z", "axis", "value"],
        _field_snapshot_rows(mesh, sol.H.values[-1], "face"),
    )
    payload = {
        "residuals": sol.residuals,
        "norms": {"E": weighted_norm(sol.E), "H": weighted_norm(sol.H), "J": weighted_norm(J)},
        "c1": problem.reduction.c1,
        "grid": {"dt": grid.dt, "steps": grid.steps, "rho": grid.rho},
    }
    write_json(out / f"{prefix}_eddy.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True, default=_json_default))
    ok = max(sol.residuals.values()) <= 1e-8
    return 0 if ok else 2


def cmd_saddle(cfg: dict, out: Path, prefix: str, seed: int, threads: int) -> int:
    mesh, ops, problem = _assemble_from_config(cfg)
    if not problem.mu_is_identity():
        raise CertificationError(
            "saddle_unit_permeability: the multiplier formulation requires mu = 1"
        )
    grid = _grid_from_config(cfg)
    src = cfg.get("source", {})
    f = sources.source_signal(problem, grid, src, seed=seed)

    sad = ed.saddle_solve(problem, f)
    ref = ed.solve(problem, TimeSignal(grid, -f.values), TimeSignal.zeros(grid, ops.curl0.shape[0]))
    e_gap = weighted_norm(sad.E - ref.E) / max(weighted_norm(ref.E), 1e-300)

    header, rows = _history_rows(grid, {"E": sad.E, "p": sad.p})
    write_csv(out / f"{prefix}_history.csv", header, rows)
    f_norm = max(sad.diagnostics["forcing_norm"], 1e-300)
    payload = {
        "diagnostics": sad.diagnostics,
        "multiplier_over_forcing": sad.diagnostics["multiplier_norm"] / f_norm,
        "saddle_vs_reduced_rel": e_gap,
    }
    write_json(out / f"{prefix}_saddle.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True, default=_json_default))
    ok = e_gap <= 1e-8 and payload["multiplier_over_forcing"] <= 1e-8
    return 0 if ok else 2


def cmd_limit_study(cfg: dict, out: Path, prefix: str, seed: int, threads: int) -> int:
    mesh, ops, problem = _assemble_from_config(cfg)
    grid = _grid_from_config(cfg)
    study = cfg.get("study", {})
    eps = study.get("epsilon", [1e-1, 3e-2, 1e-2, 3e-3, 1e-3])
    k = int(study.get("k", 0))
    src = cfg.get("source", {})
    f = sources.source_signal(problem, grid, src, seed=seed)

    try:
        report = mx.limit_study(problem, f, eps, k=k, threads=threads)
    except ValueError as exc:
        raise ConfigError(f"[study] invalid: {exc}") from exc

    write_csv(
        out / f"{prefix}_limit.csv",
        ["epsilon", "error", "ratio", "dt", "n", "rho", "k"],
        report.rows(),
    )
    summary = report.summary()
    if summary["fitted_order"] is None:
        summary["fitted_order"] = "undefined"
    write_json(out / f"{prefix}_limit.json", summary)
    print(json.dumps(summary, indent=2, sort_keys=True, default=_json_default))
    order_ok = summary["order_pass"] or summary["fitted_order"] == "undefined"
    return 0 if (order_ok and report.uniform_ratio_bounded) else 2


def cmd_bidomain(cfg: dict, out: Path, prefix: str, seed: int, threads: int) -> int:
    block = cfg.get("bidomain", {})
    cells = block.get("cells", 32)
    sigma1 = float(block.get("sigma1", 1.0))
    sigma2 = float(block.get("sigma2", 1.0))
    try:
        problem, info = dg.bidomain_problem(
            cells if np.isscalar(cells) else tuple(cells), sigma1, sigma2
        )
    except ValueError as exc:
        raise CertificationError(f"reduction_coercivity: {exc}") from exc

    n_nodes = info["nodes_per_component"]
    chi = np.concatenate([np.ones(n_nodes), -np.ones(n_nodes)])
    chi /= np.linalg.norm(chi)
    h0_perp_expected = Subspace(2 * n_nodes, chi[:, None])
    from .subspaces import complement as _complement

    gap = subspace_gap(_complement(problem.h0), h0_perp_expected)

    grid = _grid_from_config(cfg) if "time" in cfg else WeightedTimeGrid(1.0, 128, 1.0)
    rng = np.random.default_rng(seed)
    x = problem.h0.basis @ rng.standard_normal(problem.reduced_dim)
    x /= np.linalg.norm(x)
    t_off = 0.5 * grid.horizon
    F = TimeSignal.from_profile(grid, lambda t: 1.0 if t < t_off else 0.0, x)
    U = dg.solve_reduced(problem, F)
    balance = dg.energy_balance(problem, U, t_off, grid.horizon)

    payload = {
        "c1": problem.c1,
        "c1_lower_bound": info["c1_lower_bound"],
        "poincare_eigenvalue": info["poincare_eigenvalue"],
        "c1_bound_pass": problem.c1 >= info["c1_lower_bound"] * (1.0 - 1e-10),
        "h2_dim": problem.decomposition.parts[2].dim,
        "null_pair_gap": gap,
        "energy_balance": {
            "lhs": balance.lhs,
            "rhs": balance.rhs,
            "dissipation_defect": balance.dissipation_defect,
            "identity_residual": abs(balance.lhs + balance.dissipation_defect - balance.rhs),
        },
    }
    eform = [
        0.5 * float(U.values[m] @ problem.eta0 @ U.values[m]) for m in range(grid.num_nodes)
    ]
    write_csv(
        out / f"{prefix}_bidomain.csv",
        ["t", "mass_energy"],
        list(zip(grid.times, eform)),
    )
    write_json(out / f"{prefix}_bidomain.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True, default=_json_default))
    ok = (
        payload["c1_bound_pass"]
        and payload["h2_dim"] == 0
        and gap <= 1e-10
        and payload["energy_balance"]["identity_residual"]
        <= 1e-12 * max(abs(balance.rhs), 1.0)
    )
    return 0 if ok else 2


def cmd_decompose(cfg: dict, out: Path, prefix: str, seed: int, threads: int) -> int:
    mesh, ops, problem = _assemble_from_config(cfg)
    red = problem.reduction
    payload = {
        "ambient_dim": red.ambient_dim,
        "h0_dim": red.h0.dim,
        "h0_perp_dim": red.ambient_dim - red.h0.dim,
        "part_dims": {
            "range_of_adjoint": red.decomposition.parts[0].dim,
            "conducting_kernel": red.decomposition.parts[1].dim,
            "remainder": red.decomposition.parts[2].dim,
        },
        "max_overlap": red.decomposition.max_overlap(),
        "reconstruction_defect": red.decomposition.reconstruction_defect,
        "subspace_checks": problem.subspace_checks,
    }
    overlaps = red.decomposition.pairwise_overlaps
    write_csv(
        out / f"{prefix}_overlaps.csv",
        ["part_i", "part_j", "overlap"],
        [(i, j, overlaps[i, j]) for i in range(3) for j in range(3)],
    )
    write_json(out / f"{prefix}_decompose.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True, default=_json_default))
    return 0


COMMANDS = {
    "check": cmd_check,
    "solve-eddy": cmd_solve_eddy,
    "saddle": cmd_saddle,
    "limit-study": cmd_limit_study,
    "bidomain": cmd_bidomain,
    "decompose": cmd_decompose,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="evoeddy",
        description="certified causal solvers for degenerate eddy-current problems",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="TOML configuration file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="default RNG seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        prefix = cfg.get("output", {}).get("prefix", args.command.replace("-", "_"))
        code = COMMANDS[args.command](cfg, out, prefix, args.seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except CertificationError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
