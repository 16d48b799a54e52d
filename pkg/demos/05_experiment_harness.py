import math

from tracerecon.harness import ExperimentConfig, emit, run_experiment

# Average case: x is uniform, fresh per trial
cfg = ExperimentConfig("small-rate", 20_000, 0.1, trials=40, seed=1)
res = run_experiment(cfg)
print(emit([res]), end="")
print("mean/n", round(res.mean_fraction, 5), "in", round(res.wall_clock, 1), "s")

# Worst case proxy: minimum over the adversarial suite
n = 6000
cfg = ExperimentConfig.with_rho("cover", n, 20 * math.log(n) / n, trials=20, seed=1, source="suite")
res = run_experiment(cfg, threads=4)
print("worst member:", res.worst_member, round(res.mean_fraction, 4))
print(emit([res], per_member=True), end="")

# Same seed, different thread count, same bytes
again = run_experiment(cfg, threads=1)
print("reproducible:", emit([again], per_member=True) == emit([res], per_member=True))
