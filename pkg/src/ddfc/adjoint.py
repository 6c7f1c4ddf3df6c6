"""Backward sweep of the adjoint equation along simulated paths.

Three flavors are provided: a single-path sweep that reuses the Gaussian
draws of the forward simulation (the estimator driving the stochastic
optimizer), a sample-mean one-step scheme, and a 1-D grid variant that
interpolates between spatial nodes (the full-solution benchmark).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import BackwardDivergence, ContractViolation

logger = logging.getLogger(__name__)

__all__ = ["AdjointPath", "GridSolution1D", "backward_single_path",
           "backward_mc_step", "backward_grid_1d", "gradient_along_path"]


@dataclass
class AdjointPath:
    """Backward solution pair along one forward path.

    ``y`` has shape ``(horizon + 1, ..., d)`` and ``z``
    ``(horizon + 1, ..., d, d)``.  The final row of ``y`` is exactly the
    terminal cost gradient; the final row of ``z`` is zero by convention
    (no step ever consumes it when the diffusion is state-independent).
    """

    anchor: int
    y: np.ndarray
    z: np.ndarray


def _sigx_contract(sigx, z):
    """k-th output component is sum_ij (d diffusion_ij / d x_k) * z_ij."""
    return np.einsum("...kij,...ij->...k", sigx, z)


def backward_single_path(problem, grid, path, schedule):
    """Solve the adjoint pair backwards along one realized path.

    The martingale integrand at step i is the outer product of the next
    adjoint value with the step's own Gaussian draw, scaled by
    1/sqrt(dt); the adjoint value accumulates the drift/cost gradients
    evaluated at the right endpoint of each interval.
    Batch axes in ``path`` are supported.
    """
    n = path.grid_anchor
    if schedule.anchor != n:
        raise ContractViolation("path and schedule anchors differ")
    horizon = path.horizon
    if len(schedule) != horizon + 1:
        raise ContractViolation("schedule length does not cover the path")
    states = path.states
    batch = states.shape[1:-1]
    d = problem.d

    y = np.empty((horizon + 1,) + batch + (d,))
    z = np.zeros((horizon + 1,) + batch + (d, d))
    y[horizon] = problem.terminal_cost_x(states[horizon])

    for i in range(horizon - 1, -1, -1):
        dt = grid.deltas[n + i]
        t1 = grid.nodes[n + i + 1]
        x1 = states[i + 1]
        u1 = schedule.values[i + 1]
        z[i] = np.einsum("...i,...j->...ij", y[i + 1],
                         path.noises[i]) / np.sqrt(dt)
        incr = (np.einsum("...ji,...j->...i",
                          problem.drift_x(t1, x1, u1), y[i + 1])
                + problem.running_cost_x(t1, x1, u1))
        if problem.diffusion_x is not None:
            incr = incr + _sigx_contract(problem.diffusion_x(t1, x1),
                                         z[i + 1])
        y[i] = y[i + 1] + incr * dt
        if not np.all(np.isfinite(y[i])):
            raise BackwardDivergence(n + i)
    return AdjointPath(anchor=n, y=y, z=z)


def gradient_along_path(problem, grid, path, adjoint, schedule):
    """Per-step control gradient g_i = drift_u' y_i + running_cost_u'.

    Returns shape ``(horizon + 1, ..., m)`` covering every schedule entry,
    terminal node included.
    """
    if path.grid_anchor != adjoint.anchor or schedule.anchor != path.grid_anchor:
        raise ContractViolation("path, adjoint and schedule must share anchors")
    n = path.grid_anchor
    horizon = path.horizon
    batch = path.states.shape[1:-1]
    grads = np.empty((horizon + 1,) + batch + (problem.m,))
    for i in range(horizon + 1):
        t = grid.nodes[n + i]
        x = path.states[i]
        u = schedule.values[i]
        grads[i] = (np.einsum("...ij,...i->...j",
                              problem.drift_u(t, x, u), adjoint.y[i])
                    + problem.running_cost_u(t, x, u))
    return grads


def backward_mc_step(problem, grid, step_index, x, schedule, value_fn,
                     n_samples, rng):
    """One backward step of the sample-mean scheme at a single state.

    Draws ``n_samples`` one-step Euler images of ``x``, queries the next
    time level's (y, z) through ``value_fn(next_states) -> (y, z)`` and
    returns the sample-mean pair (y_i, z_i) at ``x``.
    """
    if n_samples < 1:
        raise ContractViolation("n_samples must be >= 1")
    i = step_index
    t = grid.nodes[i]
    t1 = grid.nodes[i + 1]
    dt = grid.deltas[i]
    x = np.asarray(x, dtype=float)
    u = schedule.control_at(i)
    u1 = schedule.control_at(min(i + 1, grid.n_steps))

    omega = rng.standard_normal((n_samples, problem.d))
    drift = problem.drift(t, x, u)
    sig = problem.diffusion(t, x)
    x1 = x + drift * dt + np.sqrt(dt) * omega @ sig.T

    y1, z1 = value_fn(x1)
    y1 = np.asarray(y1, dtype=float).reshape(n_samples, problem.d)
    z1 = np.asarray(z1, dtype=float).reshape(n_samples, problem.d, problem.d)

    incr = np.einsum("...ji,...j->...i", problem.drift_x(t1, x1, u1), y1)
    incr = incr + problem.running_cost_x(t1, x1, u1)
    if problem.diffusion_x is not None:
        incr = incr + _sigx_contract(problem.diffusion_x(t1, x1), z1)
    y_i = y1.mean(axis=0) + dt * incr.mean(axis=0)
    z_i = np.einsum("ki,kj->ij", y1, omega) / (n_samples * np.sqrt(dt))
    return y_i, z_i


@dataclass
class GridSolution1D:
    """(y, z) values on a uniform spatial grid, one row per time index.

    Queries outside the domain clamp to the boundary node; each clamped
    point increments ``clamp_events``.
    """

    anchor: int
    spatial_nodes: np.ndarray
    y_values: np.ndarray  # (horizon + 1, n_nodes)
    z_values: np.ndarray  # (horizon + 1, n_nodes)
    clamp_events: int = 0

    def query(self, index, x):
        """Linear interpolation of (y, z) at time index ``index``."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.spatial_nodes[0], self.spatial_nodes[-1]
        self.clamp_events += int(np.count_nonzero((x < lo) | (x > hi)))
        row = index - self.anchor
        y = np.interp(x, self.spatial_nodes, self.y_values[row])
        z = np.interp(x, self.spatial_nodes, self.z_values[row])
        return y, z


def backward_grid_1d(problem, grid, domain, dx, schedule, n_samples, rng):
    """Fully calculated backward solve on a 1-D spatial grid.

    Every node of every time level gets the sample-mean scheme, with the
    next level's values obtained by linear interpolation.  The terminal
    level is the terminal cost gradient with a zero martingale integrand.
    """
    if problem.d != 1:
        raise ContractViolation("grid solver requires a 1-D state")
    lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise ContractViolation("domain must be non-degenerate")
    n_nodes = int(round((hi - lo) / dx)) + 1
    nodes = np.linspace(lo, hi, n_nodes)
    n = schedule.anchor
    horizon = grid.n_steps - n

    y = np.empty((horizon + 1, n_nodes))
    z = np.zeros((horizon + 1, n_nodes))
    y[horizon] = np.asarray(
        problem.terminal_cost_x(nodes[:, None]), dtype=float)[:, 0]
    clamps = 0

    for i in range(grid.n_steps - 1, n - 1, -1):
        row = i - n
        t = grid.nodes[i]
        t1 = grid.nodes[i + 1]
        dt = grid.deltas[i]
        u = schedule.values[row]
        u1 = schedule.values[min(row + 1, horizon)]

        omega = rng.standard_normal((n_nodes, n_samples))
        x = nodes[:, None, None]  # (nodes, 1, 1) state column
        drift = np.asarray(problem.drift(t, x, u), dtype=float)[..., 0]
        sig = np.asarray(problem.diffusion(t, x), dtype=float)[..., 0, 0]
        x1 = nodes[:, None] + drift * dt + np.sqrt(dt) * sig * omega

        clamps += int(np.count_nonzero((x1 < lo) | (x1 > hi)))
        y1 = np.interp(x1, nodes, y[row + 1])
        z1 = np.interp(x1, nodes, z[row + 1])

        x1c = x1[..., None]
        bx = np.asarray(problem.drift_x(t1, x1c, u1), dtype=float)[..., 0, 0]
        fx = np.asarray(problem.running_cost_x(t1, x1c, u1),
                        dtype=float)[..., 0]
        incr = bx * y1 + fx
        if problem.diffusion_x is not None:
            sx = np.asarray(problem.diffusion_x(t1, x1c),
                            dtype=float)[..., 0, 0, 0]
            incr = incr + sx * z1
        y[row] = y1.mean(axis=1) + dt * incr.mean(axis=1)
        z[row] = (y1 * omega).mean(axis=1) / np.sqrt(dt)
        if not np.all(np.isfinite(y[row])):
            bad = int(np.where(~np.isfinite(y[row]))[0][0])
            raise BackwardDivergence(i, detail=f"node {bad}")

    if clamps:
        logger.debug("grid solve clamped %d one-step samples to the domain "
                     "boundary", clamps)
    return GridSolution1D(anchor=n, spatial_nodes=nodes, y_values=y,
                          z_values=z, clamp_events=clamps)
