"""Benchmark problems, the Riccati oracle and the evaluation metrics.

Four named setups are registered:

``lq2d``, ``lq4d``
    Linear dynamics with time-varying diagonal rates, quadratic costs and
    componentwise ``sin`` observations.  The Riccati feedback law gives an
    analytic reference control.
``arctan1d``
    Scalar nonlinear drift ``arctan(x + u)`` with multiplicative noise and
    a ``sin^2`` running cost; direct noisy observation of the state.  This
    is the problem the fully calculated benchmark runs on.
``dubins``
    Planar vehicle steered by its heading rate, observed through bearing
    angles from two fixed detectors, with a strong terminal penalty for
    missing the target point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ContractViolation, FiniteEscape
from .kernels import KernelBundle
from .optimize import FullSolutionParams, OptimizerConfig
from .problem import ControlProblem, TimeGrid

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# linear-quadratic problem family
# ---------------------------------------------------------------------------

@dataclass
class LQProblem:
    """Linear dynamics / quadratic costs with diagonal time-varying rates.

    The state matrix is ``A(t) = diag(c_sin*sin(t) + c_cos*cos(t) + c_const)``
    with one coefficient triple per state component (``a_coeffs`` has shape
    ``(d, 3)``).  Cost: ``(1/2) Int(x'Qx + u'Ru) + (1/2) x_T' F x_T``.
    """

    a_coeffs: np.ndarray
    b_mat: np.ndarray
    c_mat: np.ndarray
    q_mat: np.ndarray
    r_mat: np.ndarray
    f_mat: np.ndarray
    x0: np.ndarray
    obs_std: float = 0.1

    def __post_init__(self):
        self.a_coeffs = np.atleast_2d(np.asarray(self.a_coeffs, dtype=float))
        for name in ("b_mat", "c_mat", "q_mat", "r_mat", "f_mat"):
            setattr(self, name, np.atleast_2d(
                np.asarray(getattr(self, name), dtype=float)))
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        d = self.a_coeffs.shape[0]
        m = self.b_mat.shape[1]
        if self.b_mat.shape[0] != d or self.x0.shape != (d,):
            raise ContractViolation("inconsistent state/control dimensions")
        for mat, dim, kind in ((self.q_mat, d, "psd"), (self.f_mat, d, "psd"),
                               (self.r_mat, m, "pd")):
            if mat.shape != (dim, dim) or not np.allclose(mat, mat.T):
                raise ContractViolation("cost matrices must be square symmetric")
            eigs = np.linalg.eigvalsh(mat)
            if kind == "pd" and eigs.min() <= 0:
                raise ContractViolation("control penalty must be positive definite")
            if kind == "psd" and eigs.min() < -1e-12:
                raise ContractViolation("state penalties must be positive semidefinite")

    @property
    def d(self):
        return self.a_coeffs.shape[0]

    @property
    def m(self):
        return self.b_mat.shape[1]

    def a_diag(self, t):
        c = self.a_coeffs
        return c[:, 0] * np.sin(t) + c[:, 1] * np.cos(t) + c[:, 2]

    def a_matrix(self, t):
        return np.diag(self.a_diag(t))


@njit(cache=True)
def _lq_drift(t, x, u, params, out):
    d = x.shape[0]
    m = u.shape[0]
    st = np.sin(t)
    ct = np.cos(t)
    for k in range(d):
        a = params[1 + 3 * k] * st + params[2 + 3 * k] * ct + params[3 + 3 * k]
        s = a * x[k]
        for j in range(m):
            s += params[1 + 3 * d + k * m + j] * u[j]
        out[k] = s


@njit(cache=True)
def _lq_sig_diag(t, x, params, out):
    d = x.shape[0]
    m = int(params[0])
    off = 1 + 3 * d + d * m
    for k in range(d):
        out[k] = params[off + k]


@njit(cache=True)
def _lq_dsig_diag(t, x, params, out):
    for k in range(x.shape[0]):
        out[k] = 0.0


@njit(cache=True)
def _lq_bxty(t, x, u, params, y, out):
    d = x.shape[0]
    st = np.sin(t)
    ct = np.cos(t)
    for k in range(d):
        a = params[1 + 3 * k] * st + params[2 + 3 * k] * ct + params[3 + 3 * k]
        out[k] = a * y[k]


@njit(cache=True)
def _lq_buty(t, x, u, params, y, out):
    d = x.shape[0]
    m = u.shape[0]
    for j in range(m):
        s = 0.0
        for k in range(d):
            s += params[1 + 3 * d + k * m + j] * y[k]
        out[j] = s


@njit(cache=True)
def _lq_fx(t, x, u, params, out):
    d = x.shape[0]
    m = u.shape[0]
    off = 1 + 3 * d + d * m + d
    for k in range(d):
        out[k] = params[off + k] * x[k]


@njit(cache=True)
def _lq_fu(t, x, u, params, out):
    d = x.shape[0]
    m = u.shape[0]
    off = 1 + 3 * d + d * m + d + d
    for j in range(m):
        out[j] = params[off + j] * u[j]


@njit(cache=True)
def _lq_hx(x, params, out):
    d = x.shape[0]
    m = int(params[0])
    off = 1 + 3 * d + d * m + d + d + m
    for k in range(d):
        out[k] = params[off + k] * x[k]


def _lq_kernel(lq):
    # the compiled routines assume diagonal C, Q, R, F
    diag_only = all(np.allclose(mat, np.diag(np.diag(mat)))
                    for mat in (lq.c_mat, lq.q_mat, lq.r_mat, lq.f_mat))
    if not diag_only:
        return None
    params = np.concatenate([
        [float(lq.m)],
        lq.a_coeffs.ravel(),
        lq.b_mat.ravel(),
        np.diag(lq.c_mat),
        np.diag(lq.q_mat),
        np.diag(lq.r_mat),
        np.diag(lq.f_mat),
    ])
    return KernelBundle(drift=_lq_drift, sig_diag=_lq_sig_diag,
                        dsig_diag=_lq_dsig_diag, bxty=_lq_bxty,
                        buty=_lq_buty, fx=_lq_fx, fu=_lq_fu, hx=_lq_hx,
                        params=params)


def build_lq_problem(lq, name="lq"):
    """Wire an :class:`LQProblem` into the generic coefficient interface."""
    b_t = lq.b_mat.T
    q = lq.q_mat
    r = lq.r_mat
    f = lq.f_mat
    c = lq.c_mat
    d = lq.d
    x0 = lq.x0

    def drift(t, x, u):
        return lq.a_diag(t) * x + np.asarray(u) @ b_t

    def diffusion(t, x):
        return c

    def running_cost(t, x, u):
        u = np.asarray(u)
        return 0.5 * (np.einsum("...i,ij,...j->...", x, q, x)
                      + np.einsum("...i,ij,...j->...", u, r, u))

    def terminal_cost(x):
        return 0.5 * np.einsum("...i,ij,...j->...", x, f, x)

    def observe(x):
        return np.sin(x)

    def drift_x(t, x, u):
        a = np.diag(lq.a_diag(t))
        return np.broadcast_to(a, np.shape(x)[:-1] + (d, d))

    def drift_u(t, x, u):
        return np.broadcast_to(lq.b_mat, np.shape(x)[:-1] + lq.b_mat.shape)

    def init_sampler(rng, size):
        return np.tile(x0, (size, 1))

    return ControlProblem(
        d=d, m=lq.m, ell=d,
        drift=drift, diffusion=diffusion,
        running_cost=running_cost, terminal_cost=terminal_cost,
        observe=observe,
        drift_x=drift_x, drift_u=drift_u,
        running_cost_x=lambda t, x, u: np.asarray(x) @ q,
        running_cost_u=lambda t, x, u: np.asarray(u) @ r,
        terminal_cost_x=lambda x: np.asarray(x) @ f,
        obs_cov=lq.obs_std ** 2 * np.eye(d),
        init_sampler=init_sampler,
        diffusion_x=None,
        kernel=_lq_kernel(lq),
        name=name,
    )


def riccati_solve(lq, grid, substeps=10, blowup=1e12):
    """Integrate the matrix Riccati equation backwards from the terminal
    penalty with classical RK4, ``substeps`` stages per grid interval.

    Symmetry is enforced after every stage.  Returns ``P`` sampled on the
    grid nodes, shape ``(n_steps + 1, d, d)``.
    """
    r_inv = np.linalg.inv(lq.r_mat)
    gain = lq.b_mat @ r_inv @ lq.b_mat.T
    q = lq.q_mat

    def rhs(t, p):
        a = lq.a_matrix(t)
        return -(p @ a) - (a.T @ p) + p @ gain @ p - q

    n = grid.n_steps
    out = np.empty((n + 1, lq.d, lq.d))
    out[n] = lq.f_mat
    p = lq.f_mat.copy()
    for i in range(n - 1, -1, -1):
        h = -grid.deltas[i] / substeps
        t = grid.nodes[i + 1]
        for _ in range(substeps):
            k1 = rhs(t, p)
            k2 = rhs(t + h / 2, p + h / 2 * k1)
            k3 = rhs(t + h / 2, p + h / 2 * k2)
            k4 = rhs(t + h, p + h * k3)
            p = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            p = 0.5 * (p + p.T)
            t += h
            if np.linalg.norm(p) > blowup:
                raise FiniteEscape(f"Riccati solution blew up near t={t}")
        out[i] = p
    return out


def lq_analytic_control(lq, p_at_t, x):
    """Reference feedback law: -R^{-1} B' P(t) x."""
    return -np.linalg.solve(lq.r_mat, lq.b_mat.T @ p_at_t @ np.asarray(x))


def lq_reference_run(lq, grid, p_nodes, noises):
    """Closed loop under the analytic feedback, reusing given noise draws.

    This produces the comparison pair for the control-error metric: the
    reference system sees the true state and the same Brownian increments
    as the data-driven run.
    """
    n = grid.n_steps
    gains = np.array([np.linalg.solve(lq.r_mat, lq.b_mat.T @ p_nodes[i])
                      for i in range(n + 1)])
    states = np.empty((n + 1, lq.d))
    controls = np.empty((n, lq.m))
    states[0] = lq.x0
    for i in range(n):
        u = -gains[i] @ states[i]
        controls[i] = u
        dt = grid.deltas[i]
        drift = lq.a_diag(grid.nodes[i]) * states[i] + lq.b_mat @ u
        states[i + 1] = (states[i] + drift * dt
                         + np.sqrt(dt) * lq.c_mat @ noises[i])
    return states, controls


# ---------------------------------------------------------------------------
# scalar arctan problem
# ---------------------------------------------------------------------------

@dataclass
class ArctanProblem:
    """1-D drift arctan(x + u), multiplicative noise, sin^2 running cost."""

    sigma: float = 0.05
    obs_std: float = 0.05
    x0: float = 4.5


@njit(cache=True)
def _at_drift(t, x, u, params, out):
    out[0] = np.arctan(x[0] + u[0])


@njit(cache=True)
def _at_sig_diag(t, x, params, out):
    out[0] = params[0] * x[0]


@njit(cache=True)
def _at_dsig_diag(t, x, params, out):
    out[0] = params[0]


@njit(cache=True)
def _at_bxty(t, x, u, params, y, out):
    s = x[0] + u[0]
    out[0] = y[0] / (1.0 + s * s)


@njit(cache=True)
def _at_buty(t, x, u, params, y, out):
    s = x[0] + u[0]
    out[0] = y[0] / (1.0 + s * s)


@njit(cache=True)
def _at_fx(t, x, u, params, out):
    s = x[0] + u[0]
    out[0] = np.sin(s) * np.cos(s)


@njit(cache=True)
def _at_fu(t, x, u, params, out):
    s = x[0] + u[0]
    out[0] = np.sin(s) * np.cos(s)


@njit(cache=True)
def _at_hx(x, params, out):
    out[0] = 0.0


def build_arctan_problem(spec=None, name="arctan1d"):
    spec = spec or ArctanProblem()
    sigma = float(spec.sigma)
    x0 = float(spec.x0)

    def drift(t, x, u):
        return np.arctan(x + u)

    def diffusion(t, x):
        return sigma * np.asarray(x)[..., None]

    def running_cost(t, x, u):
        s = np.asarray(x)[..., 0] + np.asarray(u)[..., 0]
        return 0.5 * np.sin(s) ** 2

    def slope(t, x, u):
        s = np.asarray(x) + np.asarray(u)
        return np.sin(s) * np.cos(s)

    def init_sampler(rng, size):
        return np.full((size, 1), x0)

    kernel = KernelBundle(drift=_at_drift, sig_diag=_at_sig_diag,
                          dsig_diag=_at_dsig_diag, bxty=_at_bxty,
                          buty=_at_buty, fx=_at_fx, fu=_at_fu, hx=_at_hx,
                          params=np.array([sigma]))

    return ControlProblem(
        d=1, m=1, ell=1,
        drift=drift, diffusion=diffusion,
        running_cost=running_cost,
        terminal_cost=lambda x: np.zeros(np.shape(x)[:-1]),
        observe=lambda x: np.asarray(x, dtype=float),
        drift_x=lambda t, x, u: (1.0 / (1.0 + (np.asarray(x)
                                               + np.asarray(u)) ** 2))[..., None],
        drift_u=lambda t, x, u: (1.0 / (1.0 + (np.asarray(x)
                                               + np.asarray(u)) ** 2))[..., None],
        running_cost_x=slope,
        running_cost_u=slope,
        terminal_cost_x=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        obs_cov=np.array([[spec.obs_std ** 2]]),
        init_sampler=init_sampler,
        diffusion_x=lambda t, x: np.full(np.shape(x)[:-1] + (1, 1, 1), sigma),
        kernel=kernel,
        name=name,
    )


# ---------------------------------------------------------------------------
# planar vehicle with bearing-only observations
# ---------------------------------------------------------------------------

@dataclass
class DubinsProblem:
    """Car-like robot steered through its heading rate.

    State (x, y, heading); the position advances at constant ``speed``
    along the heading while the control only turns the heading.  Two fixed
    detectors measure bearing angles.  ``speed`` defaults to 5 so the
    target is reachable from the nominal start within the unit horizon
    (the unit-speed reading cannot cover the start-to-target distance).
    """

    sigma: float = 0.2
    delta: float = 10.0
    target: tuple = (5.0, 3.0)
    detectors: tuple = ((6.0, 1.0), (-1.0, 4.0))
    obs_std: float = 0.01
    speed: float = 5.0
    shared_noise: bool = False
    start_mean: tuple = (1.0, 1.0, math.pi / 2)
    start_std: tuple = (1.0, 1.0, 0.3)


@njit(cache=True)
def _db_drift(t, x, u, params, out):
    v = params[2]
    out[0] = v * np.sin(x[2])
    out[1] = v * np.cos(x[2])
    out[2] = u[0]


@njit(cache=True)
def _db_sig_diag(t, x, params, out):
    out[0] = params[0]
    out[1] = params[0]
    out[2] = params[0] * params[0]


@njit(cache=True)
def _db_dsig_diag(t, x, params, out):
    out[0] = 0.0
    out[1] = 0.0
    out[2] = 0.0


@njit(cache=True)
def _db_bxty(t, x, u, params, y, out):
    v = params[2]
    out[0] = 0.0
    out[1] = 0.0
    out[2] = v * (np.cos(x[2]) * y[0] - np.sin(x[2]) * y[1])


@njit(cache=True)
def _db_buty(t, x, u, params, y, out):
    out[0] = y[2]


@njit(cache=True)
def _db_fx(t, x, u, params, out):
    out[0] = 0.0
    out[1] = 0.0
    out[2] = 0.0


@njit(cache=True)
def _db_fu(t, x, u, params, out):
    out[0] = u[0]


@njit(cache=True)
def _db_hx(x, params, out):
    delta = params[1]
    out[0] = 2.0 * delta * (x[0] - params[3])
    out[1] = 2.0 * delta * (x[1] - params[4])
    out[2] = 0.0


def build_dubins_problem(spec=None, name="dubins"):
    spec = spec or DubinsProblem()
    sigma = float(spec.sigma)
    delta = float(spec.delta)
    speed = float(spec.speed)
    xp, yp = (float(v) for v in spec.target)
    (ax, ay), (bx_, by_) = spec.detectors
    start_mean = np.asarray(spec.start_mean, dtype=float)
    start_std = np.asarray(spec.start_std, dtype=float)

    if spec.shared_noise:
        # single driving increment feeding all three components
        sig_mat = np.zeros((3, 3))
        sig_mat[:, 0] = (sigma, sigma, sigma ** 2)
    else:
        sig_mat = np.diag([sigma, sigma, sigma ** 2])

    def drift(t, x, u):
        x = np.asarray(x)
        heading = x[..., 2]
        out = np.empty(np.shape(x))
        out[..., 0] = speed * np.sin(heading)
        out[..., 1] = speed * np.cos(heading)
        out[..., 2] = np.asarray(u)[..., 0]
        return out

    def observe(x):
        x = np.asarray(x, dtype=float)
        den1 = x[..., 1] - ay
        den2 = x[..., 1] - by_
        near = np.count_nonzero(np.abs(den1) < 1e-3) \
            + np.count_nonzero(np.abs(den2) < 1e-3)
        if near:
            logger.debug("bearing denominator near zero for %d states", near)
        with np.errstate(divide="ignore"):
            b1 = np.arctan((x[..., 0] - ax) / den1)
            b2 = np.arctan((x[..., 0] - bx_) / den2)
        return np.stack([b1, b2], axis=-1)

    def drift_x(t, x, u):
        x = np.asarray(x)
        heading = x[..., 2]
        out = np.zeros(np.shape(x)[:-1] + (3, 3))
        out[..., 0, 2] = speed * np.cos(heading)
        out[..., 1, 2] = -speed * np.sin(heading)
        return out

    def terminal_cost(x):
        x = np.asarray(x)
        return delta * ((x[..., 0] - xp) ** 2 + (x[..., 1] - yp) ** 2)

    def terminal_cost_x(x):
        x = np.asarray(x)
        out = np.zeros(np.shape(x))
        out[..., 0] = 2.0 * delta * (x[..., 0] - xp)
        out[..., 1] = 2.0 * delta * (x[..., 1] - yp)
        return out

    def init_sampler(rng, size):
        return start_mean + start_std * rng.standard_normal((size, 3))

    kernel = None
    if not spec.shared_noise:
        kernel = KernelBundle(drift=_db_drift, sig_diag=_db_sig_diag,
                              dsig_diag=_db_dsig_diag, bxty=_db_bxty,
                              buty=_db_buty, fx=_db_fx, fu=_db_fu,
                              hx=_db_hx,
                              params=np.array([sigma, delta, speed, xp, yp]))

    return ControlProblem(
        d=3, m=1, ell=2,
        drift=drift, diffusion=lambda t, x: sig_mat,
        running_cost=lambda t, x, u: 0.5 * np.asarray(u)[..., 0] ** 2,
        terminal_cost=terminal_cost,
        observe=observe,
        drift_x=drift_x,
        drift_u=lambda t, x, u: np.broadcast_to(
            np.array([[0.0], [0.0], [1.0]]), np.shape(x)[:-1] + (3, 1)),
        running_cost_x=lambda t, x, u: np.zeros(np.shape(x)),
        running_cost_u=lambda t, x, u: np.asarray(u, dtype=float),
        terminal_cost_x=terminal_cost_x,
        obs_cov=spec.obs_std ** 2 * np.eye(2),
        init_sampler=init_sampler,
        diffusion_x=None,
        kernel=kernel,
        name=name,
    )


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def accumulated_rmse(estimated, analytic, grid):
    """Repeat-averaged accumulated control error over the horizon:
    sqrt((1/n_repeats) * sum_m sum_n ||estimated - analytic||^2 * dt_n).

    The inner sum is the squared L2(0, T) norm of the control discrepancy
    (step-weighted quadrature); only the repeat count normalizes the outer
    average.
    """
    est = np.asarray(estimated, dtype=float)
    ref = np.asarray(analytic, dtype=float)
    if est.shape != ref.shape or est.ndim != 3 or est.shape[0] < 1:
        raise ContractViolation("need aligned (repeats, instants, m) arrays")
    if est.shape[1] != grid.n_steps:
        raise ContractViolation("control sequences do not align with the grid")
    sq = np.sum((est - ref) ** 2, axis=2) @ grid.deltas
    return float(np.sqrt(np.sum(sq) / est.shape[0]))


def avg_cost_trajectory(problem, grid, states, controls):
    """Repeat-averaged running cost at every grid node.

    ``states``: (repeats, n_steps + 1, d); ``controls``: (repeats,
    n_steps, m).  Entry k is the mean accumulated running cost over
    [t_0, t_k) — zero at k = 0, terminal cost excluded.
    """
    states = np.asarray(states, dtype=float)
    controls = np.asarray(controls, dtype=float)
    n = grid.n_steps
    if states.shape[1] != n + 1 or controls.shape[1] != n \
            or states.shape[0] != controls.shape[0]:
        raise ContractViolation("runs do not align with the grid")
    out = np.zeros(n + 1)
    for i in range(n):
        f_vals = problem.running_cost(grid.nodes[i], states[:, i],
                                      controls[:, i])
        out[i + 1] = out[i] + float(np.mean(f_vals)) * grid.deltas[i]
    return out


def terminal_distance(problem_spec, states):
    """Euclidean distance of the final position to the target point."""
    xp, yp = problem_spec.target
    final = np.asarray(states)[..., -1, :2]
    return np.sqrt((final[..., 0] - xp) ** 2 + (final[..., 1] - yp) ** 2)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

@dataclass
class BenchmarkSetup:
    """A named problem with its default grid and optimizer settings."""

    problem: ControlProblem
    grid: TimeGrid
    optimizer: OptimizerConfig
    lq: LQProblem = None
    dubins: DubinsProblem = None
    arctan: ArctanProblem = None
    full_solution: FullSolutionParams = None


def _make_lq2d():
    lq = LQProblem(
        a_coeffs=np.array([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        b_mat=0.5 * np.eye(2),
        c_mat=0.1 * np.eye(2),
        q_mat=np.eye(2), r_mat=np.eye(2), f_mat=np.eye(2),
        x0=np.array([1.0, -2.0]),
    )
    return BenchmarkSetup(
        problem=build_lq_problem(lq, name="lq2d"),
        grid=TimeGrid.uniform(0.0, 1.0, 50),
        optimizer=OptimizerConfig(sgd_iterations=1000, step_size=0.1,
                                  step_decay=0.02, n_particles=500),
        lq=lq,
    )


def _make_lq4d():
    lq = LQProblem(
        a_coeffs=np.array([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0],
                           [0.0, 0.0, 1.0], [0.0, 0.0, 0.5]]),
        # 4-D state paired with the 2-D control as two stacked identity
        # blocks scaled per state component
        b_mat=np.array([[0.5, 0.0], [0.0, 0.5], [1.0, 0.0], [0.0, 1.0]]),
        c_mat=0.1 * np.eye(4),
        q_mat=np.eye(4), r_mat=np.eye(2), f_mat=np.eye(4),
        x0=np.array([1.0, 2.0, -1.0, 2.0]),
    )
    return BenchmarkSetup(
        problem=build_lq_problem(lq, name="lq4d"),
        grid=TimeGrid.uniform(0.0, 1.0, 50),
        optimizer=OptimizerConfig(sgd_iterations=1000, step_size=0.1,
                                  step_decay=0.02, n_particles=1000),
        lq=lq,
    )


def _make_arctan1d():
    spec = ArctanProblem()
    return BenchmarkSetup(
        problem=build_arctan_problem(spec),
        grid=TimeGrid.uniform(0.0, 1.0, 50),
        optimizer=OptimizerConfig(sgd_iterations=1000, step_size=0.5,
                                  step_decay=0.02, n_particles=500),
        arctan=spec,
        full_solution=FullSolutionParams(domain=(3.0, 6.0), dx=0.1,
                                         samples_per_node=150,
                                         paths_per_particle=5,
                                         iterations=100, step_size=0.5),
    )


def _make_dubins():
    spec = DubinsProblem(speed=7.0)
    # razor-sharp bearing likelihoods collapse small clouds; heading is only
    # indirectly observed, so diversity needs the larger cloud and the
    # low-variance resampler
    return BenchmarkSetup(
        problem=build_dubins_problem(spec),
        grid=TimeGrid.uniform(0.0, 1.0, 50),
        optimizer=OptimizerConfig(sgd_iterations=1000, step_size=0.01,
                                  step_decay=0.02, n_particles=3000,
                                  grad_clip=50.0,
                                  resample_method="systematic"),
        dubins=spec,
    )


_REGISTRY = {
    "lq2d": _make_lq2d,
    "lq4d": _make_lq4d,
    "arctan1d": _make_arctan1d,
    "dubins": _make_dubins,
}


def benchmark_names():
    return sorted(_REGISTRY)


def get_benchmark(name):
    """Build a registered benchmark setup by name."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ContractViolation(
            f"unknown benchmark {name!r}; available: {benchmark_names()}")
    return factory()
