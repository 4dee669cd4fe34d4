#!/usr/bin/env python3
"""Significance under noise: where the 8-setting test stops winning.

Reproduces the bit-flip sweep (8000 state copies split 1000x8 vs 500x16) and
the fidelity thresholds where the two tests swap rank, for bit-flip and white
noise on 4 and 6 qubits.  Writes the 4-qubit bit-flip sweep to a CSV next to
this script.
"""

import pathlib

import numpy as np

from entsig import ardehali, crossing_point, mermin, significance_sweep

OUT = pathlib.Path(__file__).with_name("bitflip_sweep_4q.csv")

print("Sweeping bit-flip noise on GHZ_4 (200 grid points)...")
table = significance_sweep(
    (mermin(4), ardehali(4)), "bitflip", np.linspace(0.0, 0.25, 200), total_copies=8000
)
OUT.write_text(table.to_csv_text())
print(f"  wrote {OUT.name}  (columns: {','.join(table.header())})")

# show a few rows around the swap
s_m, s_a = table.values["M"]["S"], table.values["A"]["S"]
swap = np.argmax(s_m < s_a)
for i in range(max(swap - 2, 0), min(swap + 2, len(table.p))):
    marker = "<-- swap" if i == swap else ""
    print(f"  p = {table.p[i]:.4f}  F = {table.fidelity[i]:.4f}  "
          f"S_M = {s_m[i]:8.3f}  S_A = {s_a[i]:8.3f} {marker}")
print()

print("Crossing fidelities (bisection to 1e-6 in the noise parameter):")
for noise, n in (("bitflip", 4), ("white", 4), ("bitflip", 6), ("white", 6)):
    res = crossing_point(noise, n)
    print(f"  {noise:7s} {n} qubits: p* = {res.p_star:.5f}  ->  F* = {res.fidelity_star:.4f}")
print()
print("Above F* the stabilizer-only test is the more significant one; the")
print("thresholds barely move between noise families, and drop fast with size.")
