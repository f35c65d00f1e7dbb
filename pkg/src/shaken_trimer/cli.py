"""Command-line front end.

    shaken-trimer simulate  --config run.json --out out/
    shaken-trimer plan      --config plan.json --out out/
    shaken-trimer compare   --config run.json --out out/
    shaken-trimer reproduce 2a --out out/
    shaken-trimer scan      --config scan.json --out out/

Exit codes: 0 success or PASS, 1 a checked criterion failed, 2 bad
configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .effective import OffResonanceError, build_effective_hamiltonian, compare_stroboscopic, reachable_subspace, slowest_period
from .figures import FIGURE_T_END, FIGURES, figure
from .fock import FockState, build_basis
from .model import BASE_PARAMS, ModelParams, check_resonance
from .planner import PATHWAYS, PlanningError, plan as make_plan, transported_count, verify_plan
from .propagator import DENSE_SAMPLES_PER_PERIOD, IntegrationError, Trajectory, propagate, write_csv_table, write_trajectory_csv

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
HORIZON_LINK_FLOOR = 1e-3

PATHWAY_ALIASES = {
    "center-left": "center->left",
    "center-right": "center->right",
    "edge-left": "left->center",
    "edge-right": "right->center",
}
# well that takes no part in a pathway; probability of changing it is leakage
SPECTATOR_SITE = {"center->left": 2, "left->center": 2, "center->right": 0, "right->center": 0}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    model: ModelParams | None = None
    initial_state: FockState | None = None
    t_end: float | None = None
    sample_dt: float | None = None
    tol: float = 1e-10
    drop_detuned: bool = False
    plan: dict = field(default_factory=dict)
    scan: dict = field(default_factory=dict)

    def require_model(self) -> ModelParams:
        if self.model is None:
            raise ConfigError("missing key 'model' in config")
        return self.model

    def require_initial(self) -> FockState:
        if self.initial_state is None:
            raise ConfigError("missing key 'initial_state' in config")
        return self.initial_state

    def sample_step(self, p: ModelParams) -> float:
        return self.sample_dt if self.sample_dt is not None else p.period / DENSE_SAMPLES_PER_PERIOD


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def parse_config(doc: dict) -> RunConfig:
    cfg = RunConfig()
    try:
        if "model" in doc:
            cfg.model = ModelParams.from_dict(doc["model"])
        if "initial_state" in doc:
            occ = doc["initial_state"]
            if len(occ) != 3 or any(int(n) != n or n < 0 for n in occ):
                raise ConfigError(f"initial_state must be three non-negative integers, got {occ}")
            cfg.initial_state = FockState(*(int(n) for n in occ))
            if cfg.model is not None and cfg.initial_state.total != cfg.model.N:
                raise ConfigError(f"initial_state {list(occ)} does not hold N={cfg.model.N} bosons")
        for key in ("t_end", "sample_dt", "tol"):
            if key in doc:
                setattr(cfg, key, float(doc[key]))
        cfg.drop_detuned = bool(doc.get("drop_detuned", False))
        cfg.plan = dict(doc.get("plan", {}))
        cfg.scan = dict(doc.get("scan", {}))
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(args) -> RunConfig:
    cfg = parse_config(read_json(args.config)) if args.config else RunConfig()
    if args.tol is not None:
        cfg.tol = args.tol
    if args.t_end is not None:
        cfg.t_end = args.t_end
    return cfg


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def default_horizon(p: ModelParams, start: FockState) -> float:
    """Three slowest beats of the averaged model, capped at the figure horizon.

    Links weaker than HORIZON_LINK_FLOOR * v are ignored so that drive
    amplitudes rounded near a Bessel zero do not produce huge horizons.
    """
    if not check_resonance(p).is_resonant:
        return FIGURE_T_END
    basis = build_basis(p.N)
    try:
        sub = reachable_subspace(build_effective_hamiltonian(p, basis), start, HORIZON_LINK_FLOOR * p.v)
    except OffResonanceError:
        return FIGURE_T_END
    period = slowest_period(sub)
    return FIGURE_T_END if period is None else min(3.0 * period, FIGURE_T_END)


def trajectory_summary(traj: Trajectory) -> dict:
    pops = traj.populations
    pmax = traj.probabilities.max(axis=0)
    return {
        "samples": len(traj.times),
        "steps": traj.steps,
        "norm_drift": traj.norm_drift,
        "n_min": pops.min(axis=0).tolist(),
        "n_max": pops.max(axis=0).tolist(),
        "max_probabilities": {f"P_{s.label()}": float(v) for s, v in zip(traj.basis.states, pmax)},
    }


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    p = cfg.require_model()
    start = cfg.require_initial()
    t_end = cfg.t_end if cfg.t_end is not None else default_horizon(p, start)
    basis = build_basis(p.N)
    traj = propagate(p, basis, basis.basis_vector(start), t_end, cfg.sample_step(p), cfg.tol)
    out = Path(args.out)
    write_trajectory_csv(traj, out / "trajectory.csv")
    summary = {"command": "simulate", "model": p.to_dict(), "initial_state": list(start),
               "t_end": t_end, "tol": cfg.tol, **trajectory_summary(traj)}
    write_json(out / "summary.json", summary)
    print(f"<n_i> min {np.round(summary['n_min'], 4).tolist()} max {np.round(summary['n_max'], 4).tolist()}, "
          f"norm drift {traj.norm_drift:.2e}")
    return EXIT_OK


def _pathway(name: str) -> str:
    name = PATHWAY_ALIASES.get(name, name)
    if name not in PATHWAYS:
        raise ConfigError(f"unknown pathway {name!r}; choose from {', '.join(PATHWAYS)}")
    return name


def cmd_plan(args) -> int:
    cfg = load_config(args)
    req = dict(cfg.plan)
    for key in ("N", "count", "pathway", "s"):
        if getattr(args, key, None) is not None:
            req[key] = getattr(args, key)
    if "N" not in req and cfg.model is not None:
        req["N"] = cfg.model.N
    for key in ("N", "count", "pathway"):
        if key not in req:
            raise ConfigError(f"missing key 'plan.{key}' in config")
    tplan = make_plan(int(req["N"]), int(req["count"]), _pathway(req["pathway"]), int(req.get("s", 1)))
    base = cfg.model if cfg.model is not None else _reference_base(tplan.N)
    payload = tplan.to_dict()
    payload["eps0"], payload["eps1"] = tplan.drive(base.omega)
    payload["verification"] = None
    status = EXIT_OK
    if args.verify or bool(req.get("verify", False)):
        ver = verify_plan(tplan, base, cfg.t_end, cfg.tol)
        payload["verification"] = ver.summary()
        status = EXIT_OK if ver.passed else EXIT_FAIL
        print(f"{'PASS' if ver.passed else 'FAIL'}  observed count {ver.observed_count} "
              f"(max deviation {ver.max_deviation:.4f}), leakage {ver.leakage:.4f}")
    out = Path(args.out)
    write_json(out / "plan.json", payload)
    print(f"{tplan.pathway} count={tplan.transport_count}: eps0/omega={tplan.eps0_over_omega}, "
          f"eps1/omega={tplan.eps1_over_omega:.6f} (zero {tplan.zero_index} of J_{tplan.bessel_order})")
    return status


def _reference_base(N: int) -> ModelParams:
    return ModelParams(**{**BASE_PARAMS.to_dict(), "N": N})


def cmd_compare(args) -> int:
    cfg = load_config(args)
    p = cfg.require_model()
    start = cfg.require_initial()
    t_end = cfg.t_end if cfg.t_end is not None else FIGURE_T_END
    basis = build_basis(p.N)
    cmp = compare_stroboscopic(p, basis, basis.basis_vector(start), t_end, cfg.tol, cfg.drop_detuned)
    out = Path(args.out)
    header, data = cmp.table()
    write_csv_table(out / "compare.csv", header, data)
    summary = {"command": "compare", "model": p.to_dict(), "initial_state": list(start), "t_end": t_end,
               "periods": len(cmp.times) - 1, "max_discrepancy": cmp.max_discrepancy,
               "approximate": cmp.approximate, "norm_drift": cmp.norm_drift}
    write_json(out / "summary.json", summary)
    print(f"max stroboscopic discrepancy {cmp.max_discrepancy:.4f} over {len(cmp.times)} periods")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    try:
        panel = figure(args.figure)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    tol = args.tol if args.tol is not None else 1e-10
    t_end = args.t_end if args.t_end is not None else FIGURE_T_END
    traj = panel.run(t_end=t_end, tol=tol)
    checks = panel.evaluate(traj)
    passed = all(c.passed for c in checks)
    out = Path(args.out)
    write_trajectory_csv(traj, out / "trajectory.csv")
    write_json(out / "summary.json", {
        "command": "reproduce", "figure": panel.fig_id, "model": panel.params().to_dict(),
        "initial_state": list(panel.initial), "t_end": t_end, "tol": tol, **trajectory_summary(traj),
        "checks": [c._asdict() for c in checks], "passed": passed,
    })
    for c in checks:
        print(c.line())
    print(f"figure {panel.fig_id}: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_FAIL


def _axis(spec, name: str) -> np.ndarray:
    if isinstance(spec, dict):
        try:
            return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        except KeyError as exc:
            raise ConfigError(f"missing key 'scan.{name}.{exc.args[0]}' in config") from None
    return np.asarray(spec, dtype=float).reshape(-1)


def scan_grid(p: ModelParams, scan: dict) -> list[tuple[float, float]]:
    if "eps0_over_omega" not in scan and "eps1_over_omega" not in scan:
        raise ConfigError("scan needs 'eps0_over_omega' and/or 'eps1_over_omega'")
    e0 = _axis(scan["eps0_over_omega"], "eps0_over_omega") if "eps0_over_omega" in scan else np.array([p.eps0 / p.omega])
    e1 = _axis(scan["eps1_over_omega"], "eps1_over_omega") if "eps1_over_omega" in scan else np.array([p.eps1 / p.omega])
    if e0.size == 0 or e1.size == 0:
        raise ConfigError("empty scan grid")
    return [(float(a), float(b)) for a in e0 for b in e1]


def scan_point(p: ModelParams, start: FockState, pathway: str, t_end: float, sample_dt: float, tol: float) -> dict:
    """Transported count and leakage for one drive setting."""
    basis = build_basis(p.N)
    traj = propagate(p, basis, basis.basis_vector(start), t_end, sample_dt, tol)
    return point_metrics(traj, pathway)


def point_metrics(traj: Trajectory, pathway: str) -> dict:
    count, dev = transported_count(traj, pathway)
    spectator = traj.basis.occupations()[:, SPECTATOR_SITE[pathway]]
    start = np.argmax(traj.probabilities[0])
    moved = spectator != spectator[start]
    leak = float(traj.probabilities[:, moved].sum(axis=1).max()) if moved.any() else 0.0
    return {"transported_count": count, "max_deviation": dev,
            "leakage": leak, "norm_drift": traj.norm_drift}


def cmd_scan(args) -> int:
    cfg = load_config(args)
    p = cfg.require_model()
    start = cfg.require_initial()
    if not cfg.scan:
        raise ConfigError("missing key 'scan' in config")
    if "pathway" not in cfg.scan:
        raise ConfigError("missing key 'scan.pathway' in config")
    pathway = _pathway(cfg.scan["pathway"])
    grid = scan_grid(p, cfg.scan)
    t_end = cfg.t_end if cfg.t_end is not None else FIGURE_T_END
    dt = cfg.sample_step(p)
    points = [p.with_drive(a * p.omega, b * p.omega) for a, b in grid]
    workers = args.workers or int(cfg.scan.get("workers", 0)) or min(len(points), os.cpu_count() or 1)
    jobs = [(q, start, pathway, t_end, dt, cfg.tol) for q in points]
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(scan_point, *zip(*jobs)))
    else:
        results = [scan_point(*job) for job in jobs]
    header = ["eps0_over_omega", "eps1_over_omega", "transported_count", "max_deviation", "leakage", "norm_drift"]
    rows = [[a, b, r["transported_count"], r["max_deviation"], r["leakage"], r["norm_drift"]]
            for (a, b), r in zip(grid, results)]
    write_csv_table(Path(args.out) / "scan.csv", header, rows)
    print(f"{len(rows)} grid points written to {Path(args.out) / 'scan.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--tol", type=float, help="integrator tolerance (default 1e-10)")
    common.add_argument("--t-end", type=float, dest="t_end", help="final time in units of 1/v")

    parser = argparse.ArgumentParser(prog="shaken-trimer", description="Driven three-well boson dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="exact propagation").set_defaults(func=cmd_simulate)
    p_plan = sub.add_parser("plan", parents=[common], help="drive parameters for a transport request")
    p_plan.add_argument("--N", type=int)
    p_plan.add_argument("--count", type=int)
    p_plan.add_argument("--pathway", help=f"one of {', '.join(PATHWAYS)}")
    p_plan.add_argument("--s", type=int, help="requested Bessel zero index (default 1)")
    p_plan.add_argument("--verify", action="store_true", help="run the exact dynamics for the plan")
    p_plan.set_defaults(func=cmd_plan)
    sub.add_parser("compare", parents=[common], help="exact vs averaged model at period multiples").set_defaults(
        func=cmd_compare)
    p_rep = sub.add_parser("reproduce", parents=[common], help="run a baked-in figure panel")
    p_rep.add_argument("figure", help=f"one of {', '.join(FIGURES)}")
    p_rep.set_defaults(func=cmd_reproduce)
    p_scan = sub.add_parser("scan", parents=[common], help="grid over eps0/omega and eps1/omega")
    p_scan.add_argument("--workers", type=int, help="parallel processes (default: one per CPU)")
    p_scan.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except (ConfigError, PlanningError, OffResonanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
