"""
The Brownian-bridge functionals behind the critical values
==========================================================
"""

import numpy as np

from seqemp import functional_quantiles, ks_cdf, ks_quantile, simulate_bridge

# Closed-form Kolmogorov-Smirnov quantiles against simulation.
table = functional_quantiles("ks", levels=(0.90, 0.95, 0.99), resolution=2000, reps=20_000, seed=11)
for p, q in zip(table.levels, table.quantiles):
    print(f"P = {p:.2f}: series {ks_quantile(p):.4f}, Monte Carlo {q:.4f}")
print("ks_cdf(1.358) =", round(ks_cdf(1.358), 4))

# int B_0^2 has mean 1/6.
cvm = functional_quantiles("cvm", reps=20_000, seed=12)
print(f"CvM mean {cvm.sample.mean():.4f} (1/6 = {1 / 6:.4f})")

# A few raw paths: pinned at 0 at both ends.
paths = simulate_bridge(1000, seed=13, n_paths=3)
print("endpoints:", np.round(paths[:, [0, -1]], 12).tolist(), " sup|B|:", np.round(abs(paths).max(axis=1), 3))
