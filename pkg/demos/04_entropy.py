"""
Checking the mixing and entropy conditions
==========================================

The moment order Q, the extra integrability gamma, the mixing rate and the
bracketing exponent d must fit together.  Each checker reports a closed-form
verdict together with a numeric one.
"""

import numpy as np

from seqemp import EntropyBudget, Law, MixingSpec, build_brackets, check_A1, check_A2_integral

Q, gamma = 4, 2.0
edge = (Q - 1) * (2 / gamma + 1)
print(f"polynomial mixing with Q={Q}, gamma={gamma}: need beta > {edge}")
for beta in (0.8 * edge, 1.2 * edge):
    r = check_A1(EntropyBudget(Q, gamma, mixing=MixingSpec("polynomial", C=1.0, beta=beta)))
    print(f"  beta = {beta:.2f}: pass={r.passed}, sum = {r.value}")

print(f"\nentropy integral with Q={Q}, gamma={gamma}: need d < {Q / (gamma / 2 + 1)}")
for d in (1.0, 2.0, 3.0):
    r = check_A2_integral(EntropyBudget(Q, gamma, bracket_exponent=d))
    print(f"  d = {d}: pass={r.passed}, integral = {r.value}")

# Indicator brackets for a standard normal: the count grows like 1/eps^2.
law = Law.gaussian()
for eps in (0.5, 0.2, 0.1):
    b = build_brackets(eps, law)
    print(f"eps = {eps}: {len(b)} brackets, largest rho {b.bounding_rho().max():.4f}")
print("cut points at eps = 0.5:", np.round(build_brackets(0.5, law).cuts, 3))
