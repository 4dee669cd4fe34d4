#!/usr/bin/env python3
"""Predictions for an imperfect source.

A photonic source does not emit a perfect GHZ state.  The model state mixes
the two extremal populations, their coherence, and a white-noise floor
(alpha = 0.362, beta = 0.522, gamma = 0.398, lambda = 0.12, renormalized by
the 1.004 trace).  On top of it, each qubit passes a bit-flip channel whose
strength matches the wave-plate angles used in the lab rows.
"""

import math

from entsig import (
    AnsatzParams,
    ShotBudget,
    apply_noise,
    ardehali,
    crossing_point,
    evaluate,
    experimental_ansatz,
    fidelity_with_pure,
    ghz_state,
    mermin,
    predicted_counts,
)

params = AnsatzParams()
state = experimental_ansatz(params)
print(f"model state: trace renormalization {params.trace_renormalization:.3f}, "
      f"GHZ fidelity {fidelity_with_pure(state, ghz_state(4)):.3f} (measured: 0.84 +- 0.01)")
print()

m4, a4 = mermin(4), ardehali(4)
budget_m = ShotBudget.equal_split(7500, m4)   # ~7500 events per inequality in the lab
budget_a = ShotBudget.equal_split(7500, a4)

print("theta     p      V_M    E_M    S_M     V_A    E_A    S_A")
for theta in (0, 2, 4, 6, 8):
    p = math.sin(math.radians(2 * theta)) ** 2
    noisy = apply_noise(state, "bitflip", p)
    rm = evaluate(predicted_counts(noisy, m4, budget_m), m4)
    ra = evaluate(predicted_counts(noisy, a4, budget_a), a4)
    print(f"  {theta}deg  {p:.3f}   {rm.violation:5.2f}  {rm.error:.3f}  {rm.significance:5.1f}"
          f"   {ra.violation:5.2f}  {ra.error:.3f}  {ra.significance:5.1f}")
print()

res = crossing_point("bitflip", 4, initial_state=state)
print(f"model crossover: p* = {res.p_star:.4f} (F* = {res.fidelity_star:.4f})")
print("so the 8-setting test stays ahead through the 0.019 noise row and has")
print("lost by the 0.043 row, matching the measured ordering pattern.")
