"""Rank-two states that separate capacity from mutual information.

Run with ``python demos/rank_two_separation.py``.
"""

import numpy as np

from chanineq import OptimizerConfig
from chanineq.channels import cd_channel, depolarizing, random_channel
from chanineq.equality import two_rank_separation

cfg = OptimizerConfig(restarts=4)

channels = {
    "depolarizing p=0.5": depolarizing(0.5, 2),
    "random 3 -> 2, 2 Kraus": random_channel(3, 2, 2, seed=1),
    "completely depolarizing": cd_channel(np.diag([0.4, 0.6])),
}
for name, ch in channels.items():
    res = two_rank_separation(ch, cfg=cfg)
    if res is None:
        print(f"{name:26s} no separating state (every pair is annihilated)")
    else:
        print(f"{name:26s} gap I - C = {res.gap:.4f}, coupling ||Phi(|phi><psi|)|| = {res.coupling:.4f}")
