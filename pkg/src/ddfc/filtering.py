"""Bootstrap particle filter estimating the state given past observations."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, SimulationDivergence
from .sde import euler_step

logger = logging.getLogger(__name__)

# pre-shift log-likelihood floor below which a cloud counts as degenerate
DEGENERACY_FLOOR = -700.0


@dataclass
class ParticleCloud:
    """Equally weighted samples of the state distribution at one instant."""

    index: int
    particles: np.ndarray  # (S, d)

    @property
    def size(self):
        return self.particles.shape[0]


@dataclass
class WeightedCloud:
    """Predicted particles with unnormalized log importance weights."""

    index: int
    particles: np.ndarray    # (S, d)
    log_weights: np.ndarray  # (S,)
    degenerate: bool = False

    def weights(self):
        """Normalized weights, computed in log space for stability."""
        shifted = self.log_weights - np.max(self.log_weights)
        w = np.exp(shifted)
        return w / w.sum()


def predict(problem, grid, cloud, applied_control, rng):
    """Advance every particle one Euler step under the deployed control.

    Returns the predicted particle array (S, d); weighting and resampling
    happen separately.
    """
    n = cloud.index
    if n >= grid.n_steps:
        raise ContractViolation("cannot predict past the terminal node")
    omega = rng.standard_normal(cloud.particles.shape)
    try:
        return euler_step(problem, grid.nodes[n], cloud.particles,
                          applied_control, grid.deltas[n], omega)
    except SimulationDivergence as exc:
        bad = np.where(~np.all(np.isfinite(
            np.atleast_2d(np.asarray(exc.state))), axis=-1))[0]
        raise SimulationDivergence(
            exc.t, exc.state, exc.control,
            detail=f"particle index {bad.tolist()}") from exc


def update_weights(problem, predicted, observation,
                   degeneracy_floor=DEGENERACY_FLOOR):
    """Score predicted particles against a new measurement.

    The log weight of each particle is the Gaussian log likelihood
    -(1/2) (M - observe(x))' obs_cov^{-1} (M - observe(x)) up to a common
    constant.  A cloud whose best log weight falls below the floor is
    logged as degenerate (normalization still succeeds because the maximum
    is subtracted before exponentiating).
    """
    predicted = np.asarray(predicted, dtype=float)
    observation = np.asarray(observation, dtype=float)
    if observation.shape != (problem.ell,):
        raise ContractViolation(f"observation must have shape ({problem.ell},)")
    innov = observation - np.asarray(problem.observe(predicted), dtype=float)
    log_w = -0.5 * np.einsum("si,ij,sj->s", innov, problem.obs_precision,
                             innov)
    best = float(np.max(log_w))
    degenerate = best < degeneracy_floor
    if degenerate:
        logger.debug("degenerate particle cloud: best log weight %.1f "
                     "below floor %.1f", best, degeneracy_floor)
    return WeightedCloud(index=-1, particles=predicted, log_weights=log_w,
                         degenerate=degenerate)


def resample(weighted, rng, index=None, method="multinomial"):
    """Draw an equally weighted cloud from a weighted one.

    ``multinomial`` (default) draws independently with replacement;
    ``systematic`` uses a single stratified uniform for lower variance.
    """
    w = weighted.weights()
    s = w.size
    if method == "multinomial":
        idx = rng.choice(s, size=s, p=w)
    elif method == "systematic":
        positions = (rng.uniform() + np.arange(s)) / s
        idx = np.searchsorted(np.cumsum(w), positions)
        idx = np.clip(idx, 0, s - 1)
    else:
        raise ContractViolation(f"unknown resampling method {method!r}")
    if index is None:
        index = weighted.index
    return ParticleCloud(index=index, particles=weighted.particles[idx].copy())


def estimate_mean(cloud):
    """Arithmetic mean of the particles."""
    return cloud.particles.mean(axis=0)


def dump_clouds_csv(path, clouds):
    """Diagnostic dump: one row per particle with columns
    step, particle_index, x_1..x_d."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        d = clouds[0].particles.shape[1]
        writer.writerow(["step", "particle_index"]
                        + [f"x_{k + 1}" for k in range(d)])
        for cloud in clouds:
            for s, p in enumerate(cloud.particles):
                writer.writerow([cloud.index, s]
                                + [f"{v:.17g}" for v in p])
