"""Constrained capacity versus mutual information for a few standard channels.

Run with ``python demos/capacity_and_gap.py``.
"""

import numpy as np

from chanineq import OptimizerConfig, constrained_holevo_capacity, mutual_information, vn_entropy
from chanineq.capacity import gap_D
from chanineq.channels import cd_channel, dephasing, depolarizing, identity

cfg = OptimizerConfig(restarts=4)
plus = np.array([1, 1]) / np.sqrt(2)
minus = np.array([1, -1]) / np.sqrt(2)
rotated = 0.3 * np.outer(plus, plus) + 0.7 * np.outer(minus, minus)

cases = [
    ("identity, diag(0.3, 0.7)", identity(2), np.diag([0.3, 0.7])),
    ("dephasing, diag(0.3, 0.7)", dephasing(2), np.diag([0.3, 0.7])),
    ("dephasing, rotated state", dephasing(2), rotated),
    ("depolarizing p=0.5, I/2", depolarizing(0.5, 2), np.eye(2) / 2),
]

print(f"{'case':32s} {'H':>8s} {'I':>8s} {'C':>8s} {'I - C':>8s}")
for name, ch, rho in cases:
    c = constrained_holevo_capacity(ch, rho, cfg).value
    h, mi = vn_entropy(rho), mutual_information(ch, rho)
    print(f"{name:32s} {h:8.5f} {mi:8.5f} {c:8.5f} {mi - c:8.5f}")

# largest gap over all input states
print()
print(f"D(identity)   = {gap_D(identity(2), cfg, outer_restarts=2):.6f}")
print(f"D(cd channel) = {abs(gap_D(cd_channel(np.diag([0.2, 0.8])), cfg, outer_restarts=1)):.2e}")
