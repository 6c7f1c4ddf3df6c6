"""Single-path stochastic descent vs the fully calculated benchmark.

Both controllers steer the scalar arctan system; the benchmark recomputes a
spatial backward solution and averages gradients over every particle at
every descent step, the stochastic controller uses one simulated path per
step.  Prints a cost/time table and plots the average running-cost curves.

Scaled down to a handful of repeats so it finishes in ~1 minute; the
acceptance suite runs the full 50-repeat comparison.
"""

import dataclasses

from ddfc.experiment import compare_methods, default_config

repeats = 5
pf = default_config("arctan1d", repeats=repeats, seed=11,
                    output_dir="arctan_cmp/a")
full = default_config("arctan1d", repeats=repeats, seed=11,
                      method="full_solution", N_T=10, dt=0.1,
                      output_dir="arctan_cmp/b")

comparison = compare_methods(pf, full, "arctan_cmp")

print(f"{'':24s}{'stochastic':>14s}{'benchmark':>14s}")
print(f"{'final average cost':24s}{comparison['cost_final_a']:>14.6f}"
      f"{comparison['cost_final_b']:>14.6f}")
print(f"{'wall time per run (s)':24s}{comparison['wall_time_mean_a_s']:>14.3f}"
      f"{comparison['wall_time_mean_b_s']:>14.3f}")
print(f"speedup: {1.0 / comparison['wall_time_ratio_a_over_b']:.1f}x")

try:
    import csv

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; cost curves are in "
          "arctan_cmp/cost_trajectories.csv")
else:
    curves = {"a": ([], []), "b": ([], [])}
    with open("arctan_cmp/cost_trajectories.csv", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for method, t, c in reader:
            curves[method][0].append(float(t))
            curves[method][1].append(float(c))
    plt.figure(figsize=(6, 4))
    plt.plot(*curves["a"], "x-", label="stochastic single-path descent")
    plt.plot(*curves["b"], "^-", label="fully calculated benchmark")
    plt.xlabel("t")
    plt.ylabel("average accumulated cost")
    plt.legend()
    plt.tight_layout()
    plt.savefig("arctan_costs.png", dpi=120)
    print("wrote arctan_costs.png")
