"""Feedback control of the 2-D linear benchmark from noisy sin() readings.

Runs one closed loop of the particle-filter + stochastic-descent controller
and compares the deployed control with the analytic Riccati feedback driven
by the same Brownian increments.  Writes lq_tracking.png when matplotlib is
available, prints a summary either way.
"""

import numpy as np

from ddfc import run_feedback_loop
from ddfc.benchmarks import accumulated_rmse, get_benchmark, \
    lq_reference_run, riccati_solve

bm = get_benchmark("lq2d")
rng = np.random.default_rng(7)

result = run_feedback_loop(bm.problem, bm.grid, bm.optimizer, rng)

p_nodes = riccati_solve(bm.lq, bm.grid)
ref_states, ref_controls = lq_reference_run(bm.lq, bm.grid, p_nodes,
                                            result.truth_noises)

rmse = accumulated_rmse(result.deployed_controls[None], ref_controls[None],
                        bm.grid)
print(f"one run in {result.wall_time:.2f} s, realized cost {result.cost:.3f}")
print(f"accumulated control error vs the analytic feedback: {rmse:.4f}")
print(f"final state {result.true_states[-1].round(3)} "
      f"(reference {ref_states[-1].round(3)})")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the figure")
else:
    t = bm.grid.nodes
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for j in range(2):
        axes[0].plot(t[:-1], result.deployed_controls[:, j], "x-",
                     label=f"estimated u_{j + 1}")
        axes[0].plot(t[:-1], ref_controls[:, j], "o--", ms=3,
                     label=f"analytic u_{j + 1}")
        axes[1].plot(t, result.true_states[:, j], "x-",
                     label=f"controlled x_{j + 1}")
        axes[1].plot(t, ref_states[:, j], "o--", ms=3,
                     label=f"reference x_{j + 1}")
    axes[0].set_title("control")
    axes[1].set_title("state")
    for ax in axes:
        ax.set_xlabel("t")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig("lq_tracking.png", dpi=120)
    print("wrote lq_tracking.png")
