"""Experiment harness: configuration, seeded repeat campaigns, artifacts.

A campaign runs ``repeats`` independent closed loops (repeat r uses the
generator seeded ``seed + r``), writes per-repeat CSV files plus an
aggregate ``metrics.json`` and returns the aggregate metrics.  All floats
are written with 17 significant digits so files round-trip exactly;
identical config + seed reproduces identical data files byte for byte
(wall-clock timings are the one non-deterministic metric field).
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import accumulated_rmse, avg_cost_trajectory, get_benchmark, \
    lq_reference_run, riccati_solve, terminal_distance
from .errors import ContractViolation
from .optimize import FullSolutionParams, OptimizerConfig, run_feedback_loop
from .problem import TimeGrid, check_partials

FLOAT_FMT = "%.17g"


class ExperimentAborted(RuntimeError):
    """A repeat diverged; partial outputs and an error manifest remain."""

    def __init__(self, manifest_path, message):
        self.manifest_path = manifest_path
        super().__init__(message)


@dataclass
class ExperimentConfig:
    """Flat key-value experiment description (JSON file schema).

    Field names double as the config-file keys.  ``domain`` through
    ``full_rho`` only matter for ``method = "full_solution"``.
    """

    problem: str
    N_T: int
    T: float
    dt: float
    S: int
    L: int
    rho: float
    decay: float = 0.0
    init_mode: str = "warm_start"
    repeats: int = 1
    seed: int = 0
    method: str = "pf_sgd"
    domain: tuple = None
    dx: float = None
    K: int = None
    Lambda: int = None
    iterations: int = None
    full_rho: float = None
    grad_clip: float = 0.0
    resample: str = "multinomial"
    pin_truth: bool = False
    output_dir: str = "out"
    workers: int = 1

    def __post_init__(self):
        if abs(self.dt * self.N_T - self.T) > 1e-12 * max(1.0, abs(self.T)):
            raise ContractViolation("dt * N_T must equal T")
        if self.repeats < 1:
            raise ContractViolation("repeats must be >= 1")
        if self.method not in ("pf_sgd", "full_solution"):
            raise ContractViolation("method must be pf_sgd or full_solution")
        if self.method == "full_solution":
            missing = [k for k in ("domain", "dx", "K", "Lambda",
                                   "iterations", "full_rho")
                       if getattr(self, k) is None]
            if missing:
                raise ContractViolation(
                    f"full_solution requires fields {missing}")

    def as_dict(self):
        out = dataclasses.asdict(self)
        if out["domain"] is not None:
            out["domain"] = list(out["domain"])
        return out


def default_config(problem_name, **overrides):
    """Registered defaults for a benchmark, overridable per keyword."""
    setup = get_benchmark(problem_name)
    opt = setup.optimizer
    grid = setup.grid
    base = dict(problem=problem_name, N_T=grid.n_steps, T=grid.t_end,
                dt=(grid.t_end - grid.t0) / grid.n_steps,
                S=opt.n_particles, L=opt.sgd_iterations, rho=opt.step_size,
                decay=opt.step_decay, init_mode=opt.init_mode,
                grad_clip=opt.grad_clip)
    if setup.full_solution is not None:
        fs = setup.full_solution
        base.update(domain=tuple(fs.domain), dx=fs.dx, K=fs.samples_per_node,
                    Lambda=fs.paths_per_particle, iterations=fs.iterations,
                    full_rho=fs.step_size)
    base.update(overrides)
    return ExperimentConfig(**base)


def load_config(path, **overrides):
    """Read a JSON config file; keyword overrides win over file keys."""
    with open(path) as fh:
        data = json.load(fh)
    problem = data.pop("problem")
    data.update({k: v for k, v in overrides.items() if v is not None})
    if "domain" in data and data["domain"] is not None:
        data["domain"] = tuple(data["domain"])
    return default_config(problem, **data)


def build_setup(config):
    """Materialize (setup, grid, optimizer) from a config."""
    setup = get_benchmark(config.problem)
    grid = TimeGrid.uniform(0.0, config.T, config.N_T)
    full = None
    if config.method == "full_solution":
        full = FullSolutionParams(domain=config.domain, dx=config.dx,
                                  samples_per_node=config.K,
                                  paths_per_particle=config.Lambda,
                                  iterations=config.iterations,
                                  step_size=config.full_rho)
    optimizer = OptimizerConfig(sgd_iterations=config.L,
                                step_size=config.rho,
                                step_decay=config.decay,
                                init_mode=config.init_mode,
                                n_particles=config.S,
                                seed=config.seed,
                                grad_clip=config.grad_clip,
                                resample_method=config.resample,
                                pin_truth=config.pin_truth,
                                full_solution=full)
    return setup, grid, optimizer


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([FLOAT_FMT % v for v in row])


def read_csv(path):
    """Read one of our CSV artifacts back into (header, float array)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return header, data


def _write_repeat(dirpath, problem, grid, result, analytic_controls=None):
    os.makedirs(dirpath, exist_ok=True)
    nodes = grid.nodes
    m = result.deployed_controls.shape[1]
    d = result.true_states.shape[1]
    ell = result.observations.shape[1]

    _write_csv(os.path.join(dirpath, "control.csv"),
               ["t"] + [f"u_{j + 1}" for j in range(m)],
               np.column_stack([nodes[:-1], result.deployed_controls]))
    _write_csv(os.path.join(dirpath, "state_true.csv"),
               ["t"] + [f"x_{j + 1}" for j in range(d)],
               np.column_stack([nodes, result.true_states]))
    _write_csv(os.path.join(dirpath, "state_estimate.csv"),
               ["t"] + [f"x_{j + 1}" for j in range(d)],
               np.column_stack([nodes, result.filter_means]))
    _write_csv(os.path.join(dirpath, "observations.csv"),
               ["t"] + [f"m_{j + 1}" for j in range(ell)],
               np.column_stack([nodes[1:], result.observations]))

    running = np.zeros(grid.n_steps + 1)
    for i in range(grid.n_steps):
        f_val = float(problem.running_cost(nodes[i], result.true_states[i],
                                           result.deployed_controls[i]))
        running[i + 1] = running[i] + f_val * grid.deltas[i]
    _write_csv(os.path.join(dirpath, "cost.csv"), ["t", "running_cost"],
               np.column_stack([nodes, running]))

    if analytic_controls is not None:
        _write_csv(os.path.join(dirpath, "control_analytic.csv"),
                   ["t"] + [f"u_{j + 1}" for j in range(m)],
                   np.column_stack([nodes[:-1], analytic_controls]))


def run_experiment(config):
    """Execute the campaign described by ``config``.

    Writes ``repeat_XXX/`` directories plus ``metrics.json`` under
    ``config.output_dir`` and returns the metrics dict.  A diverged repeat
    leaves partial outputs plus ``error_manifest.json`` and raises
    :class:`ExperimentAborted`.
    """
    setup, grid, optimizer = build_setup(config)
    problem = setup.problem
    out_dir = config.output_dir
    os.makedirs(out_dir, exist_ok=True)

    p_nodes = riccati_solve(setup.lq, grid) if setup.lq is not None else None

    def one_repeat(r):
        rng = np.random.default_rng(config.seed + r)
        result = run_feedback_loop(problem, grid, optimizer, rng)
        analytic = None
        if p_nodes is not None:
            _, analytic = lq_reference_run(setup.lq, grid, p_nodes,
                                           result.truth_noises)
        _write_repeat(os.path.join(out_dir, f"repeat_{r:03d}"), problem,
                      grid, result, analytic)
        return result, analytic

    results = [None] * config.repeats
    analytic = [None] * config.repeats
    try:
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                for r, (res, ana) in enumerate(
                        pool.map(one_repeat, range(config.repeats))):
                    results[r], analytic[r] = res, ana
        else:
            for r in range(config.repeats):
                results[r], analytic[r] = one_repeat(r)
    except Exception as exc:
        manifest = os.path.join(out_dir, "error_manifest.json")
        done = sum(1 for r in results if r is not None)
        with open(manifest, "w") as fh:
            json.dump({"error": str(exc), "type": type(exc).__name__,
                       "completed_repeats": done,
                       "config_echo": config.as_dict()}, fh, indent=2)
        raise ExperimentAborted(manifest, str(exc)) from exc

    states = np.stack([r.true_states for r in results])
    controls = np.stack([r.deployed_controls for r in results])
    trajectory = avg_cost_trajectory(problem, grid, states, controls)
    _write_csv(os.path.join(out_dir, "cost_mean.csv"),
               ["t", "avg_running_cost"],
               np.column_stack([grid.nodes, trajectory]))

    metrics = {
        "rmse_accumulated": None,
        "cost_final_mean": float(np.mean([r.cost for r in results])),
        "terminal_distance_mean": None,
        "wall_time_mean_s": float(np.mean([r.wall_time for r in results])),
        "config_echo": config.as_dict(),
    }
    if p_nodes is not None:
        metrics["rmse_accumulated"] = accumulated_rmse(
            controls, np.stack(analytic), grid)
    if setup.dubins is not None:
        metrics["terminal_distance_mean"] = float(
            np.mean(terminal_distance(setup.dubins, states)))

    with open(os.path.join(out_dir, "metrics.json"), "w") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
    return metrics


def compare_methods(config_a, config_b, out_dir):
    """Run two campaigns on the same problem/horizon and write an aligned
    comparison (cost trajectories long-format CSV + summary JSON)."""
    if config_a.problem != config_b.problem:
        raise ContractViolation("configs must share the problem")
    if abs(config_a.T - config_b.T) > 1e-12:
        raise ContractViolation("configs must share the horizon")
    os.makedirs(out_dir, exist_ok=True)

    config_a = dataclasses.replace(config_a,
                                   output_dir=os.path.join(out_dir, "a"))
    config_b = dataclasses.replace(config_b,
                                   output_dir=os.path.join(out_dir, "b"))
    metrics_a = run_experiment(config_a)
    metrics_b = run_experiment(config_b)

    rows = []
    for label, cfg in (("a", config_a), ("b", config_b)):
        _, data = read_csv(os.path.join(cfg.output_dir, "cost_mean.csv"))
        for t, c in data:
            rows.append((label, t, c))
    with open(os.path.join(out_dir, "cost_trajectories.csv"), "w",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "t", "avg_running_cost"])
        for label, t, c in rows:
            writer.writerow([label, FLOAT_FMT % t, FLOAT_FMT % c])

    wall_a = metrics_a["wall_time_mean_s"]
    wall_b = metrics_b["wall_time_mean_s"]
    comparison = {
        "problem": config_a.problem,
        "method_a": config_a.method,
        "method_b": config_b.method,
        "cost_final_a": metrics_a["cost_final_mean"],
        "cost_final_b": metrics_b["cost_final_mean"],
        "wall_time_mean_a_s": wall_a,
        "wall_time_mean_b_s": wall_b,
        "wall_time_ratio_a_over_b": wall_a / wall_b if wall_b else None,
        "config_echo_a": config_a.as_dict(),
        "config_echo_b": config_b.as_dict(),
    }
    with open(os.path.join(out_dir, "comparison.json"), "w") as fh:
        json.dump(comparison, fh, indent=2, sort_keys=True)
    return comparison


def validate_config(config):
    """Config + problem sanity checks (partials against finite differences).

    Returns a (ok, report) pair; used by the CLI ``validate`` command.
    """
    setup, grid, _ = build_setup(config)
    report = check_partials(setup.problem, trials=25, rng_seed=config.seed,
                            t_range=(grid.t0, grid.t_end))
    return report.passed, report
