"""Command-line entry point: ``cssr <subcommand> [options]``.

Exit codes: 0 success, 1 validation error (or a failed ``verify``),
2 solver non-convergence, 3 instability abort.
"""

import argparse
import csv
import json
import logging
import os
from pathlib import Path
import sys
import time

import numpy as np

from .config import parse_config
from .dynamics import evolve_1d, evolve_2d
from .energy import e_eps
from .errors import ConfigurationError, DomainError, InstabilityError, SnapshotError
from .ground_state import minimize_1d, minimize_2d
from .reduction import default_initial_1d, run_dynamics_sweep, run_gse_sweep
from .snapshot import read_snapshot, write_snapshot
from .spectral import make_workspace, normalize
from .verify import format_report, run_battery

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_NOCONV, EXIT_UNSTABLE = 0, 1, 2, 3
GSE_HEADER = ["epsilon", "e_eps", "E2D", "gap", "iterations", "converged"]
DYN_HEADER = ["epsilon", "t_final", "dt", "dyn_residual", "proj_residual"]
SERIES_HEADER = ["t", "mass", "energy", "continuity_residual", "sigma_norm"]

# (flag, config key, type)
FLAGS = [
    ("--beta", "physics.beta", float),
    ("--epsilon", "physics.epsilon", float),
    ("--n-x", "grid.n_x", int),
    ("--l-x", "grid.l_x", float),
    ("--m-y", "grid.m_y", int),
    ("--tau", "flow.tau", float),
    ("--max-iters", "flow.max_iters", int),
    ("--seed-profile", "flow.seed_profile", str),
    ("--seed", "flow.seed", int),
    ("--seed-file", "flow.seed_file", str),
    ("--dt", "time.dt", float),
    ("--t-final", "time.t_final", float),
    ("--snapshot-stride", "time.snapshot_stride", float),
    ("--epsilons", "sweep.epsilons", lambda s: [float(v) for v in s.split(",")]),
    ("--workers", "sweep.workers", int),
]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat dotted-key config file")
    common.add_argument("--output-dir", help="output directory (overrides config and env)")
    common.add_argument("--write-fields", action="store_true", default=None,
                        help="also write binary field snapshots")
    common.add_argument("-v", "--verbose", action="store_true")
    for flag, key, typ in FLAGS:
        common.add_argument(flag, dest=key, type=typ, default=None, help=f"sets {key}")
    parser = _Parser(prog="cssr", description="Chern-Simons-Schroedinger dimensional reduction")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, helptext in [
        ("ground1d", "ground state of the 1D quintic energy"),
        ("ground2d", "ground state of the gauged rescaled 2D energy"),
        ("evolve1d", "evolve the quintic NLS"),
        ("evolve2d", "evolve the gauged rescaled 2D equation"),
        ("sweep-gse", "ground-state energy gap over the epsilon sweep"),
        ("sweep-dyn", "dynamics and projection residuals over the epsilon sweep"),
        ("verify", "run the invariant battery"),
    ]:
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def _config_from_args(args):
    overrides = {key: getattr(args, key) for _, key, _ in FLAGS if getattr(args, key) is not None}
    if args.write_fields:
        overrides["output.write_fields"] = True
    cfg = parse_config(args.config, overrides)
    if args.output_dir:
        cfg.output.dir = args.output_dir
    return cfg


def _workspace(cfg):
    g = cfg.grid
    return make_workspace(g.n_x, g.l_x, g.m_y)


def _seed_state(cfg, shape):
    if cfg.flow.seed_profile != "file":
        return None
    if not cfg.flow.seed_file:
        raise ConfigurationError("flow.seed_file is required for seed_profile 'file'",
                                 key="flow.seed_file")
    field, _ = read_snapshot(cfg.flow.seed_file)
    if field.shape != shape:
        raise ConfigurationError(
            f"seed field shape {field.shape} does not match grid {shape}", key="flow.seed_file")
    return field


def _write_csv(path, header, rows, footer=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        if footer is not None:
            fh.write("# " + json.dumps(footer, sort_keys=True) + "\n")


def _meta(cfg, t=0.0, eps=0.0):
    return {"l_x": cfg.grid.l_x, "time": t, "epsilon": eps, "beta": cfg.physics.beta}


def _ground(cfg, out, dim):
    ws = _workspace(cfg)
    beta, eps = cfg.physics.beta, cfg.physics.epsilon
    initial = _seed_state(cfg, (ws.grid_x.n_x,) if dim == 1 else ws.shape)
    if dim == 1:
        r = minimize_1d(beta, cfg.flow_config(), ws, initial=initial)
    else:
        r = minimize_2d(beta, eps, cfg.flow_config(), ws, initial=initial)
    res = {"energy": r.energy.total, "breakdown": r.energy.as_dict(),
           "chemical_potential": r.chemical_potential, "iterations": r.iterations,
           "converged": r.converged, "residual": r.residual}
    if dim == 2:
        res["e_eps"] = e_eps(eps)
        res["energy_minus_e_eps"] = r.energy.total - e_eps(eps)
    if cfg.output.write_fields:
        write_snapshot(r.state, _meta(cfg, eps=eps if dim == 2 else 0.0),
                       out / f"ground{dim}d.bin")
    return res, (EXIT_OK if r.converged else EXIT_NOCONV)


def _evolve(cfg, out, dim):
    ws = _workspace(cfg)
    beta, eps, t = cfg.physics.beta, cfg.physics.epsilon, cfg.time
    seed = _seed_state(cfg, (ws.grid_x.n_x,) if dim == 1 else ws.shape)
    if seed is not None:
        phi0 = normalize(seed, ws)
    elif dim == 1:
        phi0 = default_initial_1d(ws)
    else:
        phi0 = np.outer(default_initial_1d(ws), ws.basis_y.mode_matrix[:, 0])
    if dim == 1:
        tr = evolve_1d(phi0, beta, t.t_final, t.dt, ws, t.snapshot_stride,
                       store_fields=cfg.output.write_fields)
    else:
        tr = evolve_2d(phi0, beta, eps, t.t_final, t.dt, ws, t.snapshot_stride,
                       store_fields=cfg.output.write_fields)
    rows = zip(tr.times.tolist(), tr.mass_series.tolist(), tr.energy_series.tolist(),
               tr.continuity_residual_series.tolist(), tr.sigma_norm_series.tolist())
    _write_csv(out / f"evolve{dim}d.csv", SERIES_HEADER, rows)
    if cfg.output.write_fields:
        write_snapshot(tr.snapshots[-1], _meta(cfg, float(tr.times[-1]), eps if dim == 2 else 0.0),
                       out / f"evolve{dim}d_final.bin")
    e = tr.energy_series
    cont = tr.continuity_residual_series[1:]
    res = {"steps": tr.meta["steps"], "dt": tr.meta["dt"],
           "mass_drift": float(np.max(np.abs(tr.mass_series - tr.mass_series[0]))),
           "energy_drift": float(np.max(np.abs(e - e[0])) / max(abs(e[0]), 1.0)),
           "max_continuity_residual": float(np.max(cont)) if cont.size else 0.0,
           "max_sigma_norm": float(np.max(tr.sigma_norm_series))}
    return res, EXIT_OK


def _rates(rep):
    return {k: {"slope": v.slope, "intercept": v.intercept, "stderr": v.stderr,
                "constant": v.constant} for k, v in rep.fitted_rates.items()}


def _sweep_gse(cfg, out):
    ws = _workspace(cfg)
    rep = run_gse_sweep(cfg.physics.beta, cfg.sweep.epsilons, cfg.flow_config(), ws,
                        workers=cfg.worker_count())
    rows = [(e, e_eps(e), E, g, it, ok) for e, E, g, it, ok in
            zip(rep.epsilons, rep.e2d, rep.gse_gap, rep.iterations, rep.converged)]
    _write_csv(out / "sweep_gse.csv", GSE_HEADER, rows, {"fitted_rates": _rates(rep)})
    res = {"e1d": rep.e1d, "epsilons": rep.epsilons, "gse_gap": rep.gse_gap,
           "fitted_rates": _rates(rep), "flags": rep.flags}
    return res, (EXIT_NOCONV if rep.flags else EXIT_OK)


def _sweep_dyn(cfg, out):
    ws = _workspace(cfg)
    t = cfg.time
    rep = run_dynamics_sweep(cfg.physics.beta, cfg.sweep.epsilons, t.t_final, t.dt, ws,
                             snapshot_stride=t.snapshot_stride, workers=cfg.worker_count())
    rows = [(e, rep.t_final, rep.dt, d, p) for e, d, p in
            zip(rep.epsilons, rep.dyn_residual, rep.proj_residual)]
    _write_csv(out / "sweep_dyn.csv", DYN_HEADER, rows, {"fitted_rates": _rates(rep)})
    res = {"epsilons": rep.epsilons, "dyn_residual": rep.dyn_residual,
           "proj_residual": rep.proj_residual, "fitted_rates": _rates(rep)}
    return res, EXIT_OK


def _verify(cfg, out):
    checks = run_battery(_workspace(cfg), seed=cfg.flow.seed)
    sys.stdout.write(format_report(checks))
    ok = all(c.passed for c in checks)
    res = {"checks": [{"name": c.name, "value": c.value, "tolerance": c.tolerance,
                       "passed": c.passed} for c in checks], "all_passed": ok}
    return res, (EXIT_OK if ok else EXIT_INVALID)


COMMANDS = {
    "ground1d": lambda c, o: _ground(c, o, 1),
    "ground2d": lambda c, o: _ground(c, o, 2),
    "evolve1d": lambda c, o: _evolve(c, o, 1),
    "evolve2d": lambda c, o: _evolve(c, o, 2),
    "sweep-gse": _sweep_gse,
    "sweep-dyn": _sweep_dyn,
    "verify": _verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        cfg = _config_from_args(args)
        out = Path(cfg.output.dir)
        out.mkdir(parents=True, exist_ok=True)
        results, code = COMMANDS[args.command](cfg, out)
    except (ConfigurationError, DomainError, SnapshotError) as exc:
        print(f"cssr: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InstabilityError as exc:
        print(f"cssr: instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    summary = {"command": args.command, "config": cfg.to_dict(), "results": results,
               "wall_time": time.perf_counter() - start}
    text = json.dumps(summary, indent=2, sort_keys=True)
    (out / f"{args.command}.json").write_text(text + "\n")
    if args.command != "verify":
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
