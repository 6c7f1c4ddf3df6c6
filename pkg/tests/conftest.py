import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ddfc import ControlProblem


def make_custom_problem(d=1, m=1, drift=None, diffusion=None,
                        running_cost=None, terminal_cost=None,
                        drift_x=None, drift_u=None, running_cost_x=None,
                        running_cost_u=None, terminal_cost_x=None,
                        diffusion_x=None, obs_std=0.1, obs_cov=None,
                        init_sampler=None, **kwargs):
    """Small problem factory with zero defaults for everything omitted."""
    zero_d = lambda t, x, u: np.zeros(np.shape(x))
    zero_m = lambda t, x, u: np.zeros(np.shape(x)[:-1] + (m,))
    return ControlProblem(
        d=d, m=m, ell=d,
        drift=drift or zero_d,
        diffusion=diffusion or (lambda t, x: np.zeros((d, d))),
        running_cost=running_cost or (lambda t, x, u: np.zeros(np.shape(x)[:-1])),
        terminal_cost=terminal_cost or (lambda x: np.zeros(np.shape(x)[:-1])),
        observe=lambda x: np.asarray(x, dtype=float),
        drift_x=drift_x or (lambda t, x, u: np.zeros(np.shape(x)[:-1] + (d, d))),
        drift_u=drift_u or (lambda t, x, u: np.zeros(np.shape(x)[:-1] + (d, m))),
        running_cost_x=running_cost_x or zero_d,
        running_cost_u=running_cost_u or zero_m,
        terminal_cost_x=terminal_cost_x or (lambda x: np.zeros(np.shape(x))),
        obs_cov=obs_cov if obs_cov is not None else obs_std ** 2 * np.eye(d),
        init_sampler=init_sampler or (lambda rng, size: np.zeros((size, d))),
        diffusion_x=diffusion_x,
        **kwargs,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
