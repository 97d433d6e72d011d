import numpy as np
import pytest

from chanineq.capacity import OptimizerConfig, constrained_holevo_capacity
from chanineq.channels import (
    cd_channel,
    complement,
    cq_channel,
    dephasing,
    depolarizing,
    identity,
    random_channel,
    random_state,
    truncation_channel,
)
from chanineq.entropic import mutual_information, vn_entropy
from chanineq.equality import (
    EQUAL,
    STRICTLY_LESS,
    OrthogonalFamily,
    channel_kernel,
    eigenbasis_in_Pi,
    equality_test,
    family_in_Pi,
    family_in_Pi_hat,
    hat_equality_test,
    orthogonal_decomposition,
    two_rank_separation,
)
from chanineq.errors import PureState
from chanineq.numerics import haar_isometry

CFG = OptimizerConfig(restarts=4)
PLUS = np.array([1, 1]) / np.sqrt(2)
MINUS = np.array([1, -1]) / np.sqrt(2)


def rotated_state(basis, spectrum):
    return basis @ np.diag(spectrum) @ basis.conj().T


def test_family_validation():
    with pytest.raises(ValueError):
        OrthogonalFamily(np.ones((2, 2)))
    fam = OrthogonalFamily.from_vectors([PLUS, MINUS])
    assert len(fam) == 2 and fam.ambient_dim == 2


def test_family_membership():
    basis = np.eye(2)
    assert family_in_Pi(dephasing(2), basis)
    assert not family_in_Pi(dephasing(2), np.column_stack([PLUS, MINUS]))
    assert not family_in_Pi(identity(2), basis)
    assert family_in_Pi_hat(identity(2), np.column_stack([PLUS, MINUS]))
    assert family_in_Pi_hat(dephasing(2), basis)
    assert not family_in_Pi_hat(cd_channel(np.eye(2) / 2), basis)


def test_kernel_dimensions():
    assert channel_kernel(identity(2)).shape[0] == 0
    assert channel_kernel(dephasing(3)).shape[0] == 6
    assert channel_kernel(cd_channel(np.eye(2) / 2)).shape[0] == 3


def test_pure_state_rejected():
    with pytest.raises(PureState):
        eigenbasis_in_Pi(identity(2), np.diag([1.0, 0.0]))


def test_dephasing_equal_on_diagonal_states():
    rep = equality_test(dephasing(2), np.diag([0.3, 0.7]), cfg=CFG)
    assert rep.verdict == EQUAL
    assert abs(rep.numeric_gap) <= 1e-6
    assert family_in_Pi(dephasing(2), rep.certificate)


def test_dephasing_strict_on_rotated_state():
    rho = rotated_state(np.column_stack([PLUS, MINUS]), [0.3, 0.7])
    rep = equality_test(dephasing(2), rho, cfg=CFG)
    assert rep.verdict == STRICTLY_LESS
    assert rep.numeric_gap == pytest.approx(0.1315158, abs=1e-6)


def test_degenerate_spectrum_allows_rotation():
    # I/2 has every basis as eigenbasis, so the dephasing basis is available
    rep = equality_test(dephasing(2), np.eye(2) / 2, cfg=CFG)
    assert rep.verdict == EQUAL


def test_identity_hat_equality():
    rng = np.random.default_rng(0)
    for _ in range(5):
        rho = random_state(3, rng)
        rep = hat_equality_test(identity(3), rho, cfg=CFG)
        assert rep.verdict == EQUAL
        assert abs(rep.numeric_gap) <= 1e-6


def test_identity_not_equal_for_mutual_information():
    rep = equality_test(identity(2), np.diag([0.4, 0.6]), cfg=CFG)
    assert rep.verdict == STRICTLY_LESS
    assert rep.reason == "kernel trivial on support"


def test_search_agrees_with_algebraic():
    rng = np.random.default_rng(1)
    channels = [dephasing(2), depolarizing(0.5, 2), identity(2)]
    u = haar_isometry(3, 3, rng)
    channels.append(cq_channel(u, [random_state(2, rng) for _ in range(3)]))
    for ch in channels:
        for rho in (np.eye(ch.dim_in) / ch.dim_in, random_state(ch.dim_in, rng)):
            alg = eigenbasis_in_Pi(ch, rho, method="algebraic")
            srch = eigenbasis_in_Pi(ch, rho, cfg=CFG, method="search", search_restarts=16)
            assert alg.verdict == srch.verdict


def test_complement_swaps_criteria():
    # mutual information of Phi and of its complement add up to 2 H(rho),
    # and the hat criterion for Phi is the plain criterion for Phi_hat
    rng = np.random.default_rng(2)
    for seed in range(5):
        ch = random_channel(2, 2, 2, seed=seed)
        rho = random_state(2, rng)
        hat = complement(ch)
        total = mutual_information(ch, rho) + mutual_information(hat, rho)
        assert total == pytest.approx(2 * vn_entropy(rho), abs=1e-10)
        a = eigenbasis_in_Pi(hat, rho).verdict
        b = hat_equality_test(ch, rho, cfg=CFG).verdict
        assert a == b


def test_truncation_channel_structure():
    tau = np.diag([1.0, 0.0, 0.0])
    ch = truncation_channel(3, 2, tau)
    rho = np.diag([0.2, 0.3, 0.5])
    rep = equality_test(ch, rho, cfg=CFG)
    assert rep.verdict in (EQUAL, STRICTLY_LESS)
    c = constrained_holevo_capacity(ch, rho, CFG).value
    assert c <= min(vn_entropy(rho), mutual_information(ch, rho)) + 1e-6


def test_separation_depolarizing():
    res = two_rank_separation(depolarizing(0.5, 2), cfg=CFG)
    assert res is not None
    assert res.gap > 0.01
    assert np.linalg.matrix_rank(res.state, tol=1e-9) == 2
    assert abs(np.vdot(res.pair[0], res.pair[1])) <= 1e-9


def test_separation_none_for_cd():
    assert two_rank_separation(cd_channel(np.diag([0.1, 0.9])), cfg=CFG) is None


def test_orthogonal_decomposition():
    e = np.eye(4)
    vecs = [e[0], (e[0] + e[1]) / np.sqrt(2), e[2], e[3]]
    comps, projs = orthogonal_decomposition(vecs)
    assert comps == [[0, 1], [2], [3]]
    assert np.allclose(sum(projs), np.eye(4))
    with pytest.raises(ValueError):
        orthogonal_decomposition([2 * e[0]])


def test_hat_test_matches_plain_test_on_complement():
    rng = np.random.default_rng(10)
    fast = OptimizerConfig(restarts=2)
    for i in range(50):
        d_in, d_out, k = (2, 2, 2) if i % 2 else (2, 3, 2)
        ch = random_channel(d_in, d_out, k, seed=100 + i)
        rho = random_state(d_in, rng)
        a = hat_equality_test(ch, rho, cfg=fast).verdict
        b = equality_test(complement(ch), rho, cfg=fast).verdict
        assert a == b


def test_family_in_Pi_invariant_under_order_and_phase():
    rng = np.random.default_rng(11)
    u = haar_isometry(3, 3, rng)
    channels = [cq_channel(u, [random_state(2, rng) for _ in range(3)]), random_channel(3, 2, 2, seed=1)]
    for ch in channels:
        for basis in (u, haar_isometry(3, 3, rng)):
            ref = family_in_Pi(ch, basis)
            perm = basis[:, rng.permutation(3)]
            phases = perm * np.exp(2j * np.pi * rng.random(3))[None, :]
            assert family_in_Pi(ch, phases) == ref


def test_states_built_from_accepted_families_are_equal():
    rng = np.random.default_rng(12)
    for _ in range(5):
        u = haar_isometry(3, 3, rng)
        ch = cq_channel(u, [random_state(2, rng) for _ in range(3)])
        assert family_in_Pi(ch, u)
        p = rng.dirichlet(np.ones(3))
        rho = u @ np.diag(p) @ u.conj().T
        rep = equality_test(ch, rho, cfg=CFG)
        assert rep.verdict == EQUAL
        assert abs(rep.numeric_gap) <= 1e-6
