"""Stochastic optimization of the feedback control and the outer loop.

At every observation instant the optimizer refines the planned control
schedule by stochastic gradient descent: each iteration starts one path
from a randomly chosen particle, sweeps the adjoint backwards along it
and nudges every schedule entry against the resulting gradient.  The
first schedule entry is then deployed, the hidden truth advances, a new
measurement arrives, and the particle filter produces the cloud for the
next instant.

A fully calculated benchmark variant (1-D problems) replaces the
single-path gradient by an average over every particle and several path
samples each, with adjoint values interpolated from a spatial grid.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .adjoint import backward_grid_1d, backward_single_path, \
    gradient_along_path
from .errors import ContractViolation, SimulationDivergence
from .filtering import ParticleCloud, estimate_mean, predict, resample, \
    update_weights
from .problem import ControlSchedule, evaluate_cost
from .sde import euler_step, simulate_path, synthesize_observation

logger = logging.getLogger(__name__)


@dataclass
class FullSolutionParams:
    """Settings for the fully calculated gradient benchmark (1-D only)."""

    domain: tuple = (3.0, 6.0)
    dx: float = 0.1
    samples_per_node: int = 150
    paths_per_particle: int = 5
    iterations: int = 100
    step_size: float = 0.5


@dataclass
class OptimizerConfig:
    """Knobs of the per-instant optimizer and the feedback loop."""

    sgd_iterations: int = 1000
    step_size: float = 0.1
    step_decay: float = 0.0
    init_mode: str = "warm_start"  # or "zero"
    n_particles: int = 500
    seed: int = 0
    grad_clip: float = 0.0  # 0 disables clipping
    resample_method: str = "multinomial"
    pin_truth: bool = False
    use_kernel: bool = True
    full_solution: Optional[FullSolutionParams] = None

    def __post_init__(self):
        if self.sgd_iterations < 1:
            raise ContractViolation("sgd_iterations must be >= 1")
        if self.step_size <= 0:
            raise ContractViolation("step_size must be positive")
        if self.n_particles < 1:
            raise ContractViolation("n_particles must be >= 1")
        if self.init_mode not in ("warm_start", "zero"):
            raise ContractViolation("init_mode must be warm_start or zero")


@dataclass
class FeedbackRunResult:
    """Everything one closed-loop run produced."""

    deployed_controls: np.ndarray  # (n_steps, m)
    true_states: np.ndarray        # (n_steps + 1, d)
    filter_means: np.ndarray       # (n_steps + 1, d)
    observations: np.ndarray       # (n_steps, ell), row k observed at node k+1
    cost: float
    wall_time: float
    truth_noises: np.ndarray       # (n_steps, d) Gaussian draws of the truth
    clip_events: int = 0
    extra: dict = field(default_factory=dict)


def pf_sgd_update(schedule, gradients, step_size, project=None):
    """One descent update: values <- values - step_size * gradients.

    Returns a new schedule; the optional projection hook is applied to the
    updated values.
    """
    gradients = np.asarray(gradients, dtype=float)
    if gradients.shape != schedule.values.shape:
        raise ContractViolation("gradients must align with the schedule")
    values = schedule.values - step_size * gradients
    if project is not None:
        values = project(values)
    return ControlSchedule(schedule.anchor, values)


def solve_control_at_instant(problem, grid, n, cloud, init, config, rng):
    """Refine the schedule anchored at instant n and return the control to
    deploy.

    Draw discipline (fixed so compiled and reference paths agree): first
    the iteration's particle indices as one integer block, then all path
    noises as one (iterations, horizon, d) block.
    Returns ``(schedule, deployed_control, clip_events)``.
    """
    horizon = grid.n_steps - n
    if init is None:
        init = ControlSchedule.zeros(n, horizon, problem.m)
    if init.anchor != n or len(init) != horizon + 1:
        raise ContractViolation("init schedule does not match the instant")
    if cloud.index != n:
        raise ContractViolation("cloud is not anchored at the instant")

    n_iter = config.sgd_iterations
    s_idx = rng.integers(0, cloud.size, size=n_iter)
    omegas = rng.standard_normal((n_iter, horizon, problem.d))
    x0s = cloud.particles[s_idx]

    use_kernel = (config.use_kernel and problem.kernel is not None
                  and problem.project_control is None)
    if use_kernel:
        values = init.values.copy()
        clips = kernels.run_sgd_instant(
            problem.kernel, grid.nodes, n, x0s, omegas, values,
            config.step_size, config.step_decay, config.grad_clip)
        schedule = ControlSchedule(n, values)
    else:
        schedule = init.copy()
        clips = 0
        for l in range(n_iter):
            try:
                path = simulate_path(problem, grid, n, x0s[l], schedule,
                                     noises=omegas[l])
            except SimulationDivergence as exc:
                raise SimulationDivergence(
                    exc.t, exc.state, exc.control,
                    detail=f"instant {n}, iteration {l}, "
                           f"particle {s_idx[l]}") from exc
            adj = backward_single_path(problem, grid, path, schedule)
            grads = gradient_along_path(problem, grid, path, adj, schedule)
            if config.grad_clip > 0.0:
                norms = np.linalg.norm(grads, axis=-1, keepdims=True)
                over = norms > config.grad_clip
                if np.any(over):
                    clips += int(np.count_nonzero(over))
                    scale = np.where(over, config.grad_clip
                                     / np.maximum(norms, 1e-300), 1.0)
                    grads = grads * scale
            rho_l = config.step_size / (1.0 + config.step_decay * l)
            schedule = pf_sgd_update(schedule, grads, rho_l,
                                     project=problem.project_control)
    if clips:
        logger.info("instant %d: clipped %d gradient entries", n, clips)
    return schedule, schedule.values[0].copy(), clips


def full_solution_gd(problem, grid, n, cloud, init, params, rng):
    """Fully calculated gradient descent at instant n (1-D benchmark).

    Each iteration rebuilds the spatial backward solution under the
    current schedule, simulates ``paths_per_particle`` paths from every
    particle, averages the per-step gradient contributions over all of
    them and applies one full descent update.
    """
    if problem.d != 1:
        raise ContractViolation("full-solution benchmark requires d == 1")
    horizon = grid.n_steps - n
    if init is None:
        init = ControlSchedule.zeros(n, horizon, problem.m)
    schedule = init.copy()
    x0 = np.repeat(cloud.particles, params.paths_per_particle, axis=0)

    for _ in range(params.iterations):
        grid_sol = backward_grid_1d(problem, grid, params.domain, params.dx,
                                    schedule, params.samples_per_node, rng)
        noises = rng.standard_normal((horizon,) + x0.shape)
        path = simulate_path(problem, grid, n, x0, schedule, noises=noises)
        grads = np.empty((horizon + 1, problem.m))
        for i in range(horizon + 1):
            t = grid.nodes[n + i]
            states_i = path.states[i]
            y_i, _ = grid_sol.query(n + i, states_i[:, 0])
            bu = np.asarray(problem.drift_u(t, states_i, schedule.values[i]),
                            dtype=float)
            fu = np.asarray(problem.running_cost_u(t, states_i,
                                                   schedule.values[i]),
                            dtype=float)
            contrib = bu[:, 0, :] * y_i[:, None] + fu
            grads[i] = contrib.mean(axis=0)
        schedule = pf_sgd_update(schedule, grads, params.step_size,
                                 project=problem.project_control)
    return schedule


def run_feedback_loop(problem, grid, config, rng):
    """Closed loop: optimize, deploy, observe, filter — at every instant.

    The hidden truth is simulated here and only its measurements reach the
    optimizer.  Timing covers the loop body only (kernels are warmed up
    beforehand).
    """
    n_steps = grid.n_steps
    d, m, ell = problem.d, problem.m, problem.ell
    s = config.n_particles
    use_full = config.full_solution is not None

    if config.use_kernel and not use_full:
        kernels.warmup(problem, grid)

    particles0 = problem.init_sampler(rng, s)
    cloud = ParticleCloud(index=0, particles=np.asarray(particles0,
                                                        dtype=float))
    if config.pin_truth:
        x_true = cloud.particles[0].copy()
    else:
        x_true = np.asarray(problem.init_sampler(rng, 1), dtype=float)[0]

    deployed = np.empty((n_steps, m))
    true_states = np.empty((n_steps + 1, d))
    filter_means = np.empty((n_steps + 1, d))
    observations = np.empty((n_steps, ell))
    truth_noises = np.empty((n_steps, d))
    true_states[0] = x_true
    filter_means[0] = estimate_mean(cloud)
    clip_total = 0
    degenerate_updates = 0
    prev_schedule = None

    t_start = time.perf_counter()
    for n in range(n_steps):
        if prev_schedule is not None and config.init_mode == "warm_start":
            init = prev_schedule.advanced(n)
        else:
            init = None
        if use_full:
            schedule = full_solution_gd(problem, grid, n, cloud, init,
                                        config.full_solution, rng)
            u_hat = schedule.values[0].copy()
        else:
            schedule, u_hat, clips = solve_control_at_instant(
                problem, grid, n, cloud, init, config, rng)
            clip_total += clips
        prev_schedule = schedule
        deployed[n] = u_hat

        omega = rng.standard_normal(d)
        truth_noises[n] = omega
        x_true = euler_step(problem, grid.nodes[n], x_true, u_hat,
                            grid.deltas[n], omega)
        true_states[n + 1] = x_true

        record = synthesize_observation(problem, n + 1, x_true, rng)
        observations[n] = record.value

        predicted = predict(problem, grid, cloud, u_hat, rng)
        weighted = update_weights(problem, predicted, record.value)
        degenerate_updates += int(weighted.degenerate)
        cloud = resample(weighted, rng, index=n + 1,
                         method=config.resample_method)
        filter_means[n + 1] = estimate_mean(cloud)
    wall = time.perf_counter() - t_start
    if degenerate_updates:
        logger.warning("%d of %d weight updates were degenerate "
                       "(sharp likelihood vs predicted cloud)",
                       degenerate_updates, n_steps)

    cost = evaluate_cost(problem, grid, true_states, deployed)
    return FeedbackRunResult(deployed_controls=deployed,
                             true_states=true_states,
                             filter_means=filter_means,
                             observations=observations,
                             cost=cost, wall_time=wall,
                             truth_noises=truth_noises,
                             clip_events=clip_total,
                             extra={"degenerate_updates": degenerate_updates})
