"""Case analysis for one- and two-mode Gaussian channel parameters.

Run with ``python demos/gaussian_cases.py``.
"""

import numpy as np

from chanineq.gaussian import GaussianChannelParams, classify_complementary, classify_direct

examples = {
    "A2: K = diag(1, 0), alpha = I/2": GaussianChannelParams(np.diag([1.0, 0.0]), 0.5 * np.eye(2)),
    "B1: K = I, alpha = diag(1/2, 0)": GaussianChannelParams(np.eye(2), np.diag([0.5, 0.0])),
    "noiseless identity": GaussianChannelParams(np.eye(2), np.zeros((2, 2))),
    "attenuator, eta = 1/2": GaussianChannelParams(np.sqrt(0.5) * np.eye(2), 0.25 * np.eye(2)),
    "two modes, second discarded": GaussianChannelParams(
        np.diag([1.0, 1.0, 0.0, 0.0]), np.diag([0.0, 0.0, 0.5, 0.5])
    ),
}

for name, params in examples.items():
    d, c = classify_direct(params), classify_complementary(params)
    print(name)
    print(f"  C vs I: {d.case} [{d.limb}]  {d.notes}")
    print(f"  C vs H: {c.case} [{c.limb}]  {c.notes}")
