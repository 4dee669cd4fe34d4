#!/usr/bin/env python3
"""Build the two 4-qubit Bell tests and compare their raw strength.

Both operators reach the same quantum value 8 on the GHZ state, but their
classical (local-deterministic) bounds differ: 4 for the 8-setting test and
2*sqrt(2) for the 16-setting test.  Bigger violation does not mean a better
experiment, though -- the per-setting variances already hint at why.
"""

import numpy as np

from entsig import (
    DensityMatrix,
    ardehali,
    expectation,
    ghz_state,
    lhv_bound_bruteforce,
    mermin,
    variance,
    violation,
)

ghz = ghz_state(4)
rho = DensityMatrix.from_pure(ghz)

for ineq in (mermin(4), ardehali(4)):
    print(f"== {ineq.name}: {ineq.n_settings} measurement settings")
    print(f"   <B> on GHZ_4          = {expectation(rho, ineq.operator):+.6f}")
    print(f"   local-model bound     = {ineq.lhv_bound:.6f}")
    print(f"   brute-force check     = {lhv_bound_bruteforce(ineq):.6f}  "
          f"(enumerates every deterministic assignment)")
    print(f"   violation V           = {violation(rho, ineq):+.6f}")

    # per-setting variance on GHZ: zero for stabilizer measurements
    variances = []
    for s_idx, setting in enumerate(ineq.settings):
        u = setting.basis
        term_op = (u * ineq.outcome_coeffs[s_idx]) @ u.conj().T
        variances.append(variance(ghz, term_op))
    variances = np.array(variances)
    print(f"   per-setting variances on GHZ: min {variances.min():.3e}, "
          f"max {variances.max():.3e}")
    if variances.max() < 1e-10:
        print("   -> every setting stabilizes the state: zero shot noise at p = 0")
    else:
        print("   -> non-stabilizer settings fluctuate even on the perfect state")
    print()

print("The 16-setting test wins on violation (5.17 vs 4.00) but it pays for it")
print("with intrinsically noisy settings; the sweep demos quantify the tradeoff.")
