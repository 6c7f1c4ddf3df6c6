"""Problem definition: coefficients, costs, observation model and time grid.

A control problem bundles the drift/diffusion of a controlled diffusion,
running and terminal costs, a noisy observation map, and the analytic
partial derivatives consumed by the adjoint sweep.  All coefficient
callables must broadcast over leading batch axes: ``x`` may be ``(d,)`` or
``(..., d)`` and ``u`` correspondingly ``(m,)`` or ``(..., m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation


class TimeGrid:
    """Partition t_0 < t_1 < ... < t_N of the control horizon.

    Observation instants and control updates both live on this grid; the
    step sizes need not be uniform.
    """

    def __init__(self, nodes):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ContractViolation("grid needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ContractViolation("grid nodes must be strictly increasing")
        self.nodes = nodes
        self.nodes.setflags(write=False)
        self.t0 = float(nodes[0])
        self.t_end = float(nodes[-1])
        self.n_steps = nodes.size - 1
        self.deltas = np.diff(nodes)
        self.deltas.setflags(write=False)
        span = self.t_end - self.t0
        if abs(self.deltas.sum() - span) > 1e-12 * max(1.0, abs(span)):
            raise ContractViolation("step sizes do not add up to the horizon")

    @classmethod
    def uniform(cls, t0, t_end, n_steps):
        return cls(np.linspace(t0, t_end, n_steps + 1))

    def delta(self, i):
        """Step size of the interval [t_i, t_{i+1}]."""
        return float(self.deltas[i])

    def __len__(self):
        return self.nodes.size

    def __repr__(self):
        return (f"TimeGrid(t0={self.t0}, t_end={self.t_end}, "
                f"n_steps={self.n_steps})")


@dataclass(frozen=True)
class ControlProblem:
    """Coefficient bundle for a partially observed control problem.

    Shapes (batch axes elided): ``drift(t, x, u) -> (d,)``,
    ``diffusion(t, x) -> (d, d)``, ``running_cost(t, x, u) -> scalar``,
    ``terminal_cost(x) -> scalar``, ``observe(x) -> (ell,)``.
    Partials: ``drift_x -> (d, d)`` with entry ``[i, j] = d drift_i / d x_j``,
    ``drift_u -> (d, m)``, ``running_cost_x -> (d,)``,
    ``running_cost_u -> (m,)``, ``terminal_cost_x -> (d,)``,
    ``diffusion_x -> (d, d, d)`` with ``[k, i, j] = d diffusion_ij / d x_k``
    (``None`` means identically zero).

    The diffusion intentionally takes no control argument: problems with a
    controlled diffusion are not representable here.
    ``init_sampler(rng, size) -> (size, d)`` draws initial states.
    """

    d: int
    m: int
    ell: int
    drift: Callable
    diffusion: Callable
    running_cost: Callable
    terminal_cost: Callable
    observe: Callable
    drift_x: Callable
    drift_u: Callable
    running_cost_x: Callable
    running_cost_u: Callable
    terminal_cost_x: Callable
    obs_cov: np.ndarray
    init_sampler: Callable
    diffusion_x: Optional[Callable] = None
    project_control: Optional[Callable] = None
    kernel: object = None  # optional compiled fast path, see ddfc.kernels
    name: str = ""

    def __post_init__(self):
        cov = np.atleast_2d(np.asarray(self.obs_cov, dtype=float))
        if cov.shape != (self.ell, self.ell):
            raise ContractViolation(
                f"obs_cov must be ({self.ell}, {self.ell}), got {cov.shape}")
        if not np.allclose(cov, cov.T):
            raise ContractViolation("obs_cov must be symmetric")
        # positive definiteness; cholesky also feeds observation sampling
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ContractViolation("obs_cov must be positive definite") from exc
        object.__setattr__(self, "obs_cov", cov)
        object.__setattr__(self, "_obs_chol", chol)
        object.__setattr__(self, "_obs_prec", np.linalg.inv(cov))

    @property
    def obs_chol(self):
        return self._obs_chol

    @property
    def obs_precision(self):
        return self._obs_prec


class ControlSchedule:
    """Planned control values u_i for i = anchor..n_steps.

    The final entry sits on the terminal node; it never acts on the state
    but the backward sweep evaluates coefficients there.
    """

    def __init__(self, anchor, values):
        values = np.array(values, dtype=float)
        if values.ndim != 2:
            raise ContractViolation("schedule values must be (horizon+1, m)")
        if not np.all(np.isfinite(values)):
            raise ContractViolation("schedule values must be finite")
        self.anchor = int(anchor)
        self.values = values

    @classmethod
    def zeros(cls, anchor, horizon, m):
        """All-zero schedule covering indices anchor..anchor+horizon."""
        return cls(anchor, np.zeros((horizon + 1, m)))

    def control_at(self, i):
        """Control vector planned for grid index i."""
        return self.values[i - self.anchor]

    def advanced(self, new_anchor):
        """Copy truncated to indices >= new_anchor (warm starting)."""
        if new_anchor < self.anchor:
            raise ContractViolation("cannot advance a schedule backwards")
        return ControlSchedule(new_anchor,
                               self.values[new_anchor - self.anchor:].copy())

    def copy(self):
        return ControlSchedule(self.anchor, self.values.copy())

    def __len__(self):
        return self.values.shape[0]


@dataclass
class PartialCheckReport:
    """Outcome of comparing analytic partials with finite differences."""

    max_rel_err: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    tol: float = 1e-4

    @property
    def passed(self):
        return not self.failures and all(
            v <= self.tol for v in self.max_rel_err.values())

    def __str__(self):
        lines = [f"partial check (tol={self.tol:g})"]
        for name, err in sorted(self.max_rel_err.items()):
            mark = "ok " if err <= self.tol else "BAD"
            lines.append(f"  {mark} {name}: max rel err {err:.3e}")
        for f in self.failures:
            lines.append(f"  FAIL {f}")
        return "\n".join(lines)


def _rel_err(analytic, fd):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(fd)), 1.0)
    return float(np.max(np.abs(analytic - fd) / denom))


def _central_diff(fun, x, i, step):
    xp = x.copy()
    xm = x.copy()
    xp[i] += step
    xm[i] -= step
    return (np.asarray(fun(xp), dtype=float)
            - np.asarray(fun(xm), dtype=float)) / (2.0 * step)


def check_partials(problem, trials=20, rng_seed=0, t_range=(0.0, 1.0),
                   tol=1e-4, fd_step=1e-5):
    """Compare every analytic partial with central finite differences.

    Points (t, x, u) are sampled at random; the FD step is scaled by the
    coordinate magnitude.  Returns a :class:`PartialCheckReport` whose
    ``max_rel_err`` holds the worst relative error seen per partial.
    """
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    report = PartialCheckReport(tol=tol)
    names = ["drift_x", "drift_u", "running_cost_x", "running_cost_u",
             "terminal_cost_x", "diffusion_x"]
    errs = {n: 0.0 for n in names}

    for _ in range(trials):
        t = float(rng.uniform(*t_range))
        x = rng.standard_normal(problem.d)
        u = rng.standard_normal(problem.m)

        values = [problem.drift(t, x, u), problem.diffusion(t, x),
                  problem.running_cost(t, x, u), problem.terminal_cost(x)]
        if not all(np.all(np.isfinite(v)) for v in values):
            report.failures.append(
                f"non-finite coefficient at t={t}, x={x}, u={u}")
            continue

        steps_x = fd_step * np.maximum(1.0, np.abs(x))
        steps_u = fd_step * np.maximum(1.0, np.abs(u))

        bx = np.asarray(problem.drift_x(t, x, u), dtype=float)
        fd_bx = np.stack([
            _central_diff(lambda xx: problem.drift(t, xx, u), x, j, steps_x[j])
            for j in range(problem.d)], axis=1)
        errs["drift_x"] = max(errs["drift_x"], _rel_err(bx, fd_bx))

        bu = np.asarray(problem.drift_u(t, x, u), dtype=float)
        fd_bu = np.stack([
            _central_diff(lambda uu: problem.drift(t, x, uu), u, j, steps_u[j])
            for j in range(problem.m)], axis=1)
        errs["drift_u"] = max(errs["drift_u"], _rel_err(bu, fd_bu))

        fx = np.asarray(problem.running_cost_x(t, x, u), dtype=float)
        fd_fx = np.array([
            _central_diff(lambda xx: problem.running_cost(t, xx, u),
                          x, j, steps_x[j])
            for j in range(problem.d)])
        errs["running_cost_x"] = max(errs["running_cost_x"],
                                     _rel_err(fx, fd_fx))

        fu = np.asarray(problem.running_cost_u(t, x, u), dtype=float)
        fd_fu = np.array([
            _central_diff(lambda uu: problem.running_cost(t, x, uu),
                          u, j, steps_u[j])
            for j in range(problem.m)])
        errs["running_cost_u"] = max(errs["running_cost_u"],
                                     _rel_err(fu, fd_fu))

        hx = np.asarray(problem.terminal_cost_x(x), dtype=float)
        fd_hx = np.array([
            _central_diff(problem.terminal_cost, x, j, steps_x[j])
            for j in range(problem.d)])
        errs["terminal_cost_x"] = max(errs["terminal_cost_x"],
                                      _rel_err(hx, fd_hx))

        if problem.diffusion_x is not None:
            sx = np.asarray(problem.diffusion_x(t, x), dtype=float)
            fd_sx = np.stack([
                _central_diff(lambda xx: problem.diffusion(t, xx),
                              x, k, steps_x[k])
                for k in range(problem.d)], axis=0)
            errs["diffusion_x"] = max(errs["diffusion_x"],
                                      _rel_err(sx, fd_sx))

    if problem.diffusion_x is None:
        del errs["diffusion_x"]
    report.max_rel_err = errs
    return report


def evaluate_cost(problem, grid, states, controls):
    """Realized cost of one trajectory: left-point quadrature of the
    running cost plus the terminal cost.

    ``states`` has ``n_steps + 1`` rows, ``controls`` has ``n_steps`` rows
    (the control applied on each interval).
    """
    states = np.asarray(states, dtype=float)
    controls = np.asarray(controls, dtype=float)
    n = grid.n_steps
    if states.shape[0] != n + 1:
        raise ContractViolation(
            f"expected {n + 1} states, got {states.shape[0]}")
    if controls.shape[0] != n:
        raise ContractViolation(
            f"expected {n} controls, got {controls.shape[0]}")
    total = 0.0
    for i in range(n):
        total += float(problem.running_cost(grid.nodes[i], states[i],
                                            controls[i])) * grid.deltas[i]
    return total + float(problem.terminal_cost(states[n]))
