"""Compiled fast path for the stochastic optimizer's inner loop.

The per-instant SGD loop runs millions of tiny state/adjoint steps, which
is interpreter-bound in plain numpy.  Problems may attach a
:class:`KernelBundle` of numba-compiled coefficient routines; the generic
driver below then runs the whole iteration loop in machine code.  The
bundle covers diagonal diffusions (all shipped benchmarks); anything more
general falls back to the numpy reference path in :mod:`ddfc.optimize`.

Bundle routine signatures (all write into a preallocated ``out``):

    drift(t, x, u, params, out_d)        state drift
    sig_diag(t, x, params, out_d)        diagonal of the diffusion matrix
    dsig_diag(t, x, params, out_d)       d(diffusion_kk)/d(x_k)
    bxty(t, x, u, params, y, out_d)      drift_x(t,x,u)' y
    buty(t, x, u, params, y, out_m)      drift_u(t,x,u)' y
    fx(t, x, u, params, out_d)           running-cost state gradient
    fu(t, x, u, params, out_m)           running-cost control gradient
    hx(x, params, out_d)                 terminal-cost gradient

``params`` is a flat float64 vector owned by the problem instance, so one
compiled specialization serves every instance of a benchmark family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .errors import SimulationDivergence


@dataclass
class KernelBundle:
    drift: Callable
    sig_diag: Callable
    dsig_diag: Callable
    bxty: Callable
    buty: Callable
    fx: Callable
    fu: Callable
    hx: Callable
    params: np.ndarray

    def __post_init__(self):
        self.params = np.ascontiguousarray(self.params, dtype=np.float64)


@njit
def _sgd_instant(drift, sig_diag, dsig_diag, bxty, buty, fx, fu, hx, params,
                 t_nodes, n, x0s, omegas, u_values, rho, decay, clip):
    """Run the full iteration loop at one instant, mutating ``u_values``.

    Each iteration simulates one path from its assigned start state with
    its assigned noise block, sweeps the adjoint backwards along it and
    applies one descent update to every schedule entry.  Returns the
    number of gradient clips applied.
    """
    n_iter = x0s.shape[0]
    d = x0s.shape[1]
    n_total = t_nodes.shape[0] - 1
    horizon = n_total - n
    m = u_values.shape[1]

    x = np.empty((horizon + 1, d))
    y = np.empty(d)
    y_prev = np.empty(d)
    y_new = np.empty(d)
    scratch_d = np.empty(d)
    scratch_d2 = np.empty(d)
    scratch_m = np.empty(m)
    scratch_m2 = np.empty(m)
    sig = np.empty(d)
    dsig = np.empty(d)
    grads = np.empty((horizon + 1, m))
    clip_count = 0

    for l in range(n_iter):
        # forward pass
        for k in range(d):
            x[0, k] = x0s[l, k]
        for i in range(horizon):
            t = t_nodes[n + i]
            dt = t_nodes[n + i + 1] - t
            sdt = np.sqrt(dt)
            drift(t, x[i], u_values[i], params, scratch_d)
            sig_diag(t, x[i], params, sig)
            for k in range(d):
                x[i + 1, k] = (x[i, k] + scratch_d[k] * dt
                               + sig[k] * sdt * omegas[l, i, k])
                if not np.isfinite(x[i + 1, k]):
                    return clip_count, l, n + i

        # backward pass fused with the gradient
        hx(x[horizon], params, y)
        t_term = t_nodes[n_total]
        buty(t_term, x[horizon], u_values[horizon], params, y, scratch_m)
        fu(t_term, x[horizon], u_values[horizon], params, scratch_m2)
        for j in range(m):
            grads[horizon, j] = scratch_m[j] + scratch_m2[j]
        for k in range(d):
            y_prev[k] = 0.0

        for i in range(horizon - 1, -1, -1):
            t1 = t_nodes[n + i + 1]
            dt = t1 - t_nodes[n + i]
            bxty(t1, x[i + 1], u_values[i + 1], params, y, scratch_d)
            fx(t1, x[i + 1], u_values[i + 1], params, scratch_d2)
            dsig_diag(t1, x[i + 1], params, dsig)
            for k in range(d):
                incr = scratch_d[k] + scratch_d2[k]
                if i + 1 < horizon:
                    # diagonal martingale integrand one step ahead
                    dt_next = t_nodes[n + i + 2] - t1
                    z_kk = y_prev[k] * omegas[l, i + 1, k] / np.sqrt(dt_next)
                    incr += dsig[k] * z_kk
                y_new[k] = y[k] + incr * dt
            for k in range(d):
                y_prev[k] = y[k]
                y[k] = y_new[k]

            t = t_nodes[n + i]
            buty(t, x[i], u_values[i], params, y, scratch_m)
            fu(t, x[i], u_values[i], params, scratch_m2)
            for j in range(m):
                grads[i, j] = scratch_m[j] + scratch_m2[j]

        rho_l = rho / (1.0 + decay * l)
        if clip > 0.0:
            for i in range(horizon + 1):
                norm = 0.0
                for j in range(m):
                    norm += grads[i, j] * grads[i, j]
                norm = np.sqrt(norm)
                if norm > clip:
                    clip_count += 1
                    for j in range(m):
                        grads[i, j] *= clip / norm
        for i in range(horizon + 1):
            for j in range(m):
                u_values[i, j] -= rho_l * grads[i, j]
                if not np.isfinite(u_values[i, j]):
                    return clip_count, l, n + i
    return clip_count, -1, -1


def run_sgd_instant(bundle, t_nodes, n, x0s, omegas, u_values, rho, decay,
                    clip):
    """Dispatch the compiled iteration loop for one instant.

    Raises :class:`SimulationDivergence` if any simulated state or updated
    control goes non-finite.
    """
    clips, fail_iter, fail_step = _sgd_instant(
        bundle.drift, bundle.sig_diag, bundle.dsig_diag, bundle.bxty,
        bundle.buty, bundle.fx, bundle.fu, bundle.hx, bundle.params,
        np.ascontiguousarray(t_nodes, dtype=np.float64), n,
        np.ascontiguousarray(x0s, dtype=np.float64),
        np.ascontiguousarray(omegas, dtype=np.float64),
        u_values, float(rho), float(decay), float(clip))
    if fail_iter >= 0:
        raise SimulationDivergence(
            t_nodes[fail_step], x0s[fail_iter], u_values[fail_step - n],
            detail=f"iteration {fail_iter}, grid step {fail_step}")
    return clips


def warmup(problem, grid):
    """Force kernel compilation so timed runs exclude JIT latency."""
    if problem.kernel is None:
        return
    d, m = problem.d, problem.m
    x0s = np.zeros((1, 1, d))[0]
    omegas = np.zeros((1, 1, d))
    u_values = np.zeros((2, m))
    t_nodes = np.asarray(grid.nodes[-2:], dtype=np.float64)
    run_sgd_instant(problem.kernel, t_nodes, 0, x0s, omegas, u_values,
                    0.0, 0.0, 0.0)
