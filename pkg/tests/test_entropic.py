import numpy as np
import pytest

from chanineq.channels import (
    complement,
    dephasing,
    depolarizing,
    identity,
    random_channel,
    random_pure,
    random_state,
)
from chanineq.entropic import (
    INF,
    chi_out,
    chi_quantity,
    entropy_exchange,
    is_infinite,
    make_ensemble,
    mutual_information,
    rel_entropy,
    vn_entropy,
)
from chanineq.errors import DimensionMismatch, InvalidEnsemble

KET0 = np.diag([1.0, 0.0])
PLUS = np.full((2, 2), 0.5)


def binary_entropy(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def test_entropy_values():
    assert vn_entropy(KET0) == 0.0
    assert vn_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert vn_entropy(np.diag([0.25, 0.75])) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_entropy_of_pure_state_is_never_negative():
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = random_pure(int(rng.integers(2, 5)), rng)
        assert vn_entropy(np.outer(v, v.conj())) >= 0.0


def test_entropy_bounds():
    rng = np.random.default_rng(1)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        h = vn_entropy(random_state(d, rng))
        assert 0.0 <= h <= np.log2(d) + 1e-12


def test_relative_entropy():
    assert rel_entropy(KET0, np.eye(2) / 2) == pytest.approx(1.0)
    assert is_infinite(rel_entropy(np.eye(2) / 2, KET0))
    assert rel_entropy(KET0, KET0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DimensionMismatch):
        rel_entropy(KET0, np.eye(3) / 3)


def test_relative_entropy_nonnegative():
    rng = np.random.default_rng(2)
    for _ in range(100):
        a, b = random_state(3, rng), random_state(3, rng)
        assert rel_entropy(a, b) >= -1e-12


def test_inf_sentinel_ordering():
    assert INF > 1e308 and INF == INF and not INF < 5


def test_chi_of_nonorthogonal_pair():
    # {1/2 |0>, 1/2 |+>}: average has eigenvalues (1 +- 1/sqrt2) / 2
    ens = make_ensemble([0.5, 0.5], [KET0, PLUS])
    assert chi_quantity(ens) == pytest.approx(0.6008760366928562, abs=1e-10)


def test_chi_orthogonal_ensemble_is_shannon():
    ens = make_ensemble([0.3, 0.7], [KET0, np.diag([0.0, 1.0])])
    assert chi_quantity(ens) == pytest.approx(binary_entropy(0.3), abs=1e-12)


def test_ensemble_validation():
    with pytest.raises(InvalidEnsemble):
        make_ensemble([0.5, 0.6], [KET0, KET0])
    with pytest.raises(InvalidEnsemble):
        make_ensemble([0.5, 0.5], [KET0, np.eye(3) / 3])


def test_chi_out_data_processing():
    rng = np.random.default_rng(3)
    for seed in range(20):
        ch = random_channel(2, 2, 2, seed=seed)
        ens = make_ensemble([0.4, 0.6], [random_state(2, rng), random_state(2, rng)])
        assert chi_out(ch, ens) <= chi_quantity(ens) + 1e-10


def test_mutual_information_oracles():
    assert mutual_information(identity(2), np.diag([0.3, 0.7])) == pytest.approx(2 * binary_entropy(0.3))
    assert mutual_information(dephasing(2), np.eye(2) / 2) == pytest.approx(1.0)
    # depolarizing(1/2) on I/2: Choi spectrum (5/8, 1/8, 1/8, 1/8)
    assert mutual_information(depolarizing(0.5, 2), np.eye(2) / 2) == pytest.approx(0.4512050593, abs=1e-9)


def test_mutual_information_bounds():
    rng = np.random.default_rng(4)
    for seed in range(50):
        ch = random_channel(3, 2, 3, seed=seed)
        rho = random_state(3, rng)
        h = vn_entropy(rho)
        mi = mutual_information(ch, rho)
        assert -1e-10 <= mi <= 2 * h + 1e-10
        assert entropy_exchange(ch, rho) == pytest.approx(vn_entropy(complement(ch)(rho)))
