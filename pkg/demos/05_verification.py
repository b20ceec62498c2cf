"""
Monte Carlo checks of the limit theory
======================================

Reduced replication counts; the acceptance suite runs the full sizes.
"""

import numpy as np

from seqemp import Innovation, Law
from seqemp.verify import condition_agreement, equicontinuity_modulus, fidi_check, moment_scaling

m = moment_scaling("iid-gaussian", 4, n_list=(64, 256, 1024), reps=1000, seed=1)
print("moment ratios (Q=4):", np.round(m["ratio"], 3), "slope", round(m["log_log_slope"], 4),
      "(3^(1/4) =", round(3**0.25, 3), ")")

mod = equicontinuity_modulus(Law.uniform(0, 1), 4, 2.0, (0.9, 0.3, 0.15), (256, 1024), reps=100, seed=2)
print("modulus M(delta, n):\n", np.round(mod["M"], 3))

f = fidi_check(Innovation(), n=500, reps=500, seed=3)
print("fidi covariance:\n", np.round(f["covariance"], 3), "\ntarget:\n", np.round(f["target"], 3))

rows = condition_agreement()
print(f"closed-form and numeric verdicts agree on {sum(r['agree'] for r in rows)}/{len(rows)} configurations")
