"""Structural equality tests with their numeric cross-checks.

Run with ``python demos/equality_criteria.py``.
"""

import numpy as np

from chanineq import OptimizerConfig
from chanineq.channels import cq_channel, depolarizing, identity, random_state
from chanineq.equality import equality_test, hat_equality_test
from chanineq.numerics import haar_isometry

cfg = OptimizerConfig(restarts=4)
rng = np.random.default_rng(3)

basis = haar_isometry(3, 3, rng)
sigmas = [random_state(2, rng) for _ in range(3)]
cq = cq_channel(basis, sigmas)

diagonal = basis @ np.diag([0.2, 0.3, 0.5]) @ basis.conj().T
fourier = np.fft.fft(np.eye(3)) / np.sqrt(3)
tilted = basis @ fourier @ np.diag([0.2, 0.3, 0.5]) @ fourier.conj().T @ basis.conj().T


def show(label, rep):
    gap = "n/a" if rep.numeric_gap is None else f"{rep.numeric_gap:.3e}"
    print(f"{label:44s} {rep.verdict:13s} gap={gap:10s} ({rep.reason})")


show("c-q channel, state diagonal in its basis", equality_test(cq, diagonal, cfg=cfg))
show("c-q channel, tilted state", equality_test(cq, tilted, cfg=cfg))
show("depolarizing p=0.5, I/2", equality_test(depolarizing(0.5, 2), np.eye(2) / 2, cfg=cfg))
show("identity, C = H", hat_equality_test(identity(3), random_state(3, rng), cfg=cfg))
