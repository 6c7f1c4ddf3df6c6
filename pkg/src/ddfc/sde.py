"""Forward simulation: Euler-Maruyama stepping and synthetic observations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, SimulationDivergence


@dataclass
class StatePath:
    """A simulated trajectory together with the Gaussian draws that built it.

    ``states`` has shape ``(horizon + 1, ..., d)`` and ``noises``
    ``(horizon, ..., d)``; batch axes are allowed.  The noises are retained
    because the backward sweep reuses them.
    """

    grid_anchor: int
    states: np.ndarray
    noises: np.ndarray

    @property
    def horizon(self):
        return self.states.shape[0] - 1


@dataclass
class ObservationRecord:
    """One noisy measurement taken at a grid node."""

    index: int
    value: np.ndarray


def euler_step(problem, t, x, u, dt, omega):
    """One Euler-Maruyama step: x + drift*dt + diffusion @ (sqrt(dt)*omega).

    Broadcasts over leading batch axes of ``x`` / ``u`` / ``omega``.
    """
    if dt <= 0:
        raise ContractViolation("dt must be positive")
    x = np.asarray(x, dtype=float)
    drift = problem.drift(t, x, u)
    sig = problem.diffusion(t, x)
    noise = np.einsum("...ij,...j->...i", sig, omega)
    out = x + drift * dt + np.sqrt(dt) * noise
    if not np.all(np.isfinite(out)):
        raise SimulationDivergence(t, x, u)
    return out


def simulate_path(problem, grid, start_index, x_start, schedule, rng=None,
                  noises=None):
    """Simulate the controlled state from grid node ``start_index`` to the
    terminal node under the given schedule.

    Either ``rng`` (fresh standard-normal draws, one ``(..., d)`` block per
    step) or a pre-drawn ``noises`` array of shape ``(horizon, ..., d)``
    must be supplied.
    """
    if schedule.anchor != start_index:
        raise ContractViolation("schedule anchor must match the start index")
    x = np.asarray(x_start, dtype=float)
    if x.shape[-1] != problem.d:
        raise ContractViolation(f"state dimension must be {problem.d}")
    horizon = grid.n_steps - start_index
    if noises is None:
        if rng is None:
            raise ContractViolation("need either rng or pre-drawn noises")
        noises = rng.standard_normal((horizon,) + x.shape)
    else:
        noises = np.asarray(noises, dtype=float)
        if noises.shape != (horizon,) + x.shape:
            raise ContractViolation("noises shape must be (horizon,) + x.shape")

    states = np.empty((horizon + 1,) + x.shape)
    states[0] = x
    for i in range(horizon):
        t = grid.nodes[start_index + i]
        states[i + 1] = euler_step(problem, t, states[i], schedule.values[i],
                                   grid.deltas[start_index + i], noises[i])
    return StatePath(grid_anchor=start_index, states=states, noises=noises)


def synthesize_observation(problem, index, x_true, rng):
    """Measure the true state: observe(x) plus centered Gaussian noise with
    the problem's observation covariance."""
    x_true = np.asarray(x_true, dtype=float)
    mean = np.asarray(problem.observe(x_true), dtype=float)
    if not np.all(np.isfinite(mean)):
        raise SimulationDivergence(index, x_true, None,
                                   detail="observation map not finite")
    eta = problem.obs_chol @ rng.standard_normal(problem.ell)
    return ObservationRecord(index=index, value=mean + eta)
