"""Bootstrap particle filter against the exact Kalman answer.

On a scalar linear-Gaussian model the conditional mean is available in
closed form, which makes a clean calibration picture: the particle
estimate should hug the Kalman mean within Monte Carlo error.
"""

import numpy as np

from ddfc import ParticleCloud, TimeGrid, estimate_mean, predict, \
    resample, update_weights
from ddfc.problem import ControlProblem

a, c, obs_std = -0.5, 0.4, 0.3
problem = ControlProblem(
    d=1, m=1, ell=1,
    drift=lambda t, x, u: a * np.asarray(x),
    diffusion=lambda t, x: np.full(np.shape(x)[:-1] + (1, 1), c),
    running_cost=lambda t, x, u: 0.0,
    terminal_cost=lambda x: 0.0,
    observe=lambda x: np.asarray(x, dtype=float),
    drift_x=lambda t, x, u: np.full(np.shape(x)[:-1] + (1, 1), a),
    drift_u=lambda t, x, u: np.zeros(np.shape(x)[:-1] + (1, 1)),
    running_cost_x=lambda t, x, u: np.zeros(np.shape(x)),
    running_cost_u=lambda t, x, u: np.zeros(np.shape(x)),
    terminal_cost_x=lambda x: np.zeros(np.shape(x)),
    obs_cov=np.array([[obs_std ** 2]]),
    init_sampler=lambda rng, size: 1.0 + 0.2 * rng.standard_normal((size, 1)),
)

rng = np.random.default_rng(1)
n_steps = 50
grid = TimeGrid.uniform(0.0, 5.0, n_steps)
dt = grid.delta(0)
s = 10_000
a_d, q_d = 1.0 + a * dt, c * c * dt

x_true = 1.0
cloud = ParticleCloud(0, problem.init_sampler(rng, s))
kalman_m, kalman_p = 1.0, 0.04

rows = []
for n in range(n_steps):
    x_true = a_d * x_true + np.sqrt(q_d) * rng.standard_normal()
    y = x_true + obs_std * rng.standard_normal()
    predicted = predict(problem, grid, cloud, np.zeros(1), rng)
    weighted = update_weights(problem, predicted, np.array([y]))
    cloud = resample(weighted, rng, index=n + 1)
    # exact Kalman recursion
    kalman_m = a_d * kalman_m
    kalman_p = a_d * kalman_p * a_d + q_d
    gain = kalman_p / (kalman_p + obs_std ** 2)
    kalman_m += gain * (y - kalman_m)
    kalman_p *= 1.0 - gain
    rows.append((grid.nodes[n + 1], x_true, y, estimate_mean(cloud)[0],
                 kalman_m, np.sqrt(kalman_p)))

rows = np.asarray(rows)
gap = np.abs(rows[:, 3] - rows[:, 4])
print(f"mean |particle mean - Kalman mean| = {gap.mean():.5f} "
      f"(posterior std is ~{rows[:, 5].mean():.3f}, cloud size {s})")
print(f"worst step gap = {gap.max():.5f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the figure")
else:
    t = rows[:, 0]
    plt.figure(figsize=(8, 4))
    plt.plot(t, rows[:, 1], "k-", lw=1, label="hidden state")
    plt.plot(t, rows[:, 2], "k.", ms=3, alpha=0.4, label="observations")
    plt.plot(t, rows[:, 3], "x-", label="particle mean")
    plt.plot(t, rows[:, 4], "--", label="Kalman mean")
    plt.xlabel("t")
    plt.legend(fontsize=8)
    plt.tight_layout()
    plt.savefig("filter_vs_kalman.png", dpi=120)
    print("wrote filter_vs_kalman.png")
