"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary of all
criteria is printed at the end of the session.
"""

import subprocess
import sys

import numpy as np

from chanineq import (
    OptimizerConfig,
    cd_channel,
    complement,
    compose,
    constrained_holevo_capacity,
    cq_channel,
    depolarizing,
    dephasing,
    equality_test,
    gap_D,
    hat_equality_test,
    identity,
    mutual_information,
    random_channel,
    two_rank_separation,
    vn_entropy,
)
from chanineq import io
from chanineq.channels import apply, pure_state, random_pure, random_state
from chanineq.gaussian import (
    CASE_A,
    CASE_B,
    GaussianChannelParams,
    classify_complementary,
    classify_direct,
    comp_rel_subspace,
    one_mode_type,
    same_span,
    validate_nid,
)
from chanineq.numerics import haar_isometry

CFG = OptimizerConfig(restarts=4, seed=0)
FAST = OptimizerConfig(restarts=2, seed=0)


def _trace_distance(a, b):
    return 0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum()


def _random_cq(rng, d, d_out, min_distance=0.5):
    """c-q channel with a Haar basis and outputs pairwise at least ``min_distance`` apart."""
    basis = haar_isometry(d, d, rng)
    while True:
        sigmas = [random_state(d_out, rng) for _ in range(d)]
        if min(_trace_distance(sigmas[i], sigmas[j]) for i in range(d) for j in range(i)) >= min_distance:
            return basis, cq_channel(basis, sigmas)


def _separated_spectrum(rng, d, spacing):
    while True:
        p = np.sort(rng.dirichlet(np.ones(d)))
        if np.min(np.diff(p)) >= spacing:
            return p


def _mixed_state(rng, d, floor=0.1):
    """Random full-rank state with every eigenvalue at least ``floor``."""
    u = haar_isometry(d, d, rng)
    while True:
        p = rng.dirichlet(np.ones(d))
        if p.min() >= floor:
            return u @ np.diag(p) @ u.conj().T


def test_criterion_01_inequality_suite(criterion):
    rng = np.random.default_rng(101)
    violations = 0
    for _ in range(200):
        d = int(rng.integers(2, 5))
        d_out = int(rng.integers(2, 5))
        n_kraus = int(rng.integers(-(-d // d_out), 5))
        ch = random_channel(d, d_out, max(n_kraus, 1), int(rng.integers(1 << 31)))
        rho = random_state(d, rng, rank=int(rng.integers(1, d + 1)))
        c = constrained_holevo_capacity(ch, rho, FAST).value
        h = vn_entropy(rho)
        mi = mutual_information(ch, rho)
        ok = 0 <= c <= min(h + 1e-6, mi + 1e-6) and mi <= 2 * h + 1e-9
        violations += not ok
    criterion(1, violations == 0, f"{violations} violations of 0 <= C <= min(H, I), I <= 2H over 200 draws")


def test_criterion_02_noiseless(criterion):
    d_val = gap_D(identity(2), CFG, outer_restarts=4)
    rng = np.random.default_rng(102)
    verdicts = []
    for _ in range(20):
        d = int(rng.integers(2, 4))
        verdicts.append(hat_equality_test(identity(d), random_state(d, rng), cfg=CFG).verdict)
    n_equal = verdicts.count("Equal")
    ok = abs(d_val - 1.0) <= 0.02 and n_equal == 20
    criterion(2, ok, f"D(identity qubit) = {d_val:.6f}; hat-equality Equal for {n_equal}/20 states")


def test_criterion_03_completely_depolarizing(criterion):
    rng = np.random.default_rng(103)
    worst_gap, verdicts = 0.0, []
    for _ in range(10):
        d = int(rng.integers(2, 4))
        ch = cd_channel(random_state(int(rng.integers(1, 4)), rng), d_in=d)
        rep = equality_test(ch, _mixed_state(rng, d), cfg=CFG)
        verdicts.append(rep.verdict)
        worst_gap = max(worst_gap, abs(rep.numeric_gap))
    d_val = gap_D(cd_channel(np.diag([0.3, 0.7])), CFG, outer_restarts=4)
    ok = verdicts.count("Equal") == 10 and worst_gap <= 1e-9 and d_val <= 1e-6
    criterion(3, ok, f"Equal {verdicts.count('Equal')}/10, max |gap| = {worst_gap:.2e}, D(cd) = {d_val:.2e}")


def test_criterion_04_cq_round_trip(criterion):
    rng = np.random.default_rng(104)
    eq_ok = sl_ok = 0
    max_eq_gap, min_sl_gap = 0.0, np.inf
    for _ in range(30):
        d = int(rng.integers(2, 4))
        basis, ch = _random_cq(rng, d, int(rng.integers(2, 4)))
        fourier = np.exp(2j * np.pi * np.outer(range(d), range(d)) / d) / np.sqrt(d)
        rotated = basis @ fourier
        for _ in range(5):
            p = rng.dirichlet(np.ones(d))
            rep = equality_test(ch, basis @ np.diag(p) @ basis.conj().T, cfg=CFG)
            max_eq_gap = max(max_eq_gap, rep.numeric_gap)
            eq_ok += rep.verdict == "Equal" and rep.numeric_gap <= 1e-4
            q = _separated_spectrum(rng, d, 0.2)
            rep = equality_test(ch, rotated @ np.diag(q) @ rotated.conj().T, cfg=CFG)
            min_sl_gap = min(min_sl_gap, rep.numeric_gap)
            sl_ok += rep.verdict == "StrictlyLess" and rep.numeric_gap > 1e-3
    ok = eq_ok == 150 and sl_ok == 150
    criterion(
        4, ok,
        f"diagonal: Equal {eq_ok}/150 (max gap {max_eq_gap:.1e}); "
        f"rotated: StrictlyLess {sl_ok}/150 (min gap {min_sl_gap:.2e})",
    )


def test_criterion_05_trivial_kernel(criterion):
    rng = np.random.default_rng(105)
    ch = depolarizing(0.5, 2)
    states = [np.eye(2) / 2, np.diag([0.3, 0.7])] + [_mixed_state(rng, 2) for _ in range(18)]
    reports = [equality_test(ch, rho, cfg=CFG) for rho in states]
    fast = sum(r.verdict == "StrictlyLess" and r.reason == "kernel trivial on support" for r in reports)
    min_gap = min(r.numeric_gap for r in reports)
    ok = fast == len(states) and min_gap > 0.01
    criterion(5, ok, f"fast-path StrictlyLess {fast}/{len(states)}, min gap {min_gap:.4f}")


def test_criterion_06_complement_identity(criterion):
    rng = np.random.default_rng(106)
    worst_ratio = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 4))
        d_out = int(rng.integers(2, 4))
        ch = random_channel(d, d_out, int(rng.integers(2, 5)), int(rng.integers(1 << 31)))
        rho = random_state(d, rng)
        # each side optimized on its own outputs, so the two routes stay independent
        c_dir = constrained_holevo_capacity(ch, rho, CFG, route="direct")
        c_hat = constrained_holevo_capacity(complement(ch), rho, CFG, route="direct")
        lhs = abs(mutual_information(ch, rho) - vn_entropy(rho) - c_dir.value + c_hat.value)
        worst_ratio = max(worst_ratio, lhs / (2 * (c_dir.slack + c_hat.slack)))
    worst_pure = 0.0
    for _ in range(200):
        d = int(rng.integers(2, 5))
        ch = random_channel(d, int(rng.integers(2, 5)), int(rng.integers(2, 5)), int(rng.integers(1 << 31)))
        psi = pure_state(random_pure(d, rng))
        worst_pure = max(worst_pure, abs(vn_entropy(apply(ch, psi)) - vn_entropy(apply(complement(ch), psi))))
    ok = worst_ratio <= 1.0 and worst_pure <= 1e-9
    criterion(6, ok, f"max residual / (2 x slack) = {worst_ratio:.2e}; max pure-state entropy mismatch {worst_pure:.1e}")


def test_criterion_07_chain_rule(criterion):
    rng = np.random.default_rng(107)
    pairs = [(dephasing(2), np.diag([0.3, 0.7])), (dephasing(3), np.diag([0.2, 0.3, 0.5]))]
    while len(pairs) < 10:
        d = int(rng.integers(2, 4))
        basis, ch = _random_cq(rng, d, int(rng.integers(2, 4)), min_distance=0.0)
        p = rng.dirichlet(np.ones(d))
        pairs.append((ch, basis @ np.diag(p) @ basis.conj().T))
    worst, certified = 0.0, 0
    for ch, rho in pairs:
        certified += equality_test(ch, rho, cfg=CFG).verdict == "Equal"
        post = random_channel(ch.dim_out, int(rng.integers(2, 4)), int(rng.integers(1, 4)) + 1, int(rng.integers(1 << 31)))
        worst = max(worst, equality_test(compose(post, ch), rho, cfg=CFG).numeric_gap)
    ok = certified == 10 and worst <= 1e-3
    criterion(7, ok, f"{certified}/10 certified Equal; max gap after post-processing {worst:.1e}")


def test_criterion_08_data_processing(criterion):
    rng = np.random.default_rng(108)
    worst = -np.inf
    for _ in range(20):
        phi = random_channel(2, 2, int(rng.integers(2, 4)), int(rng.integers(1 << 31)))
        psi = random_channel(2, 2, int(rng.integers(2, 4)), int(rng.integers(1 << 31)))
        before = gap_D(phi, CFG, outer_restarts=4)
        after = gap_D(compose(psi, phi), CFG, outer_restarts=4)
        worst = max(worst, after - before)
    criterion(8, worst <= 0.02, f"max D(Psi o Phi) - D(Phi) = {worst:.4f} over 20 pairs")


def test_criterion_09_two_rank_separation(criterion):
    rng = np.random.default_rng(109)
    gaps = []
    for _ in range(20):
        d = int(rng.integers(2, 4))
        ch = random_channel(d, int(rng.integers(2, 4)), int(rng.integers(2, 5)), int(rng.integers(1 << 31)))
        res = two_rank_separation(ch, cfg=CFG)
        gaps.append(-np.inf if res is None else res.gap)
    none_for_cd = two_rank_separation(cd_channel(np.diag([0.3, 0.7])), cfg=CFG) is None
    ok = min(gaps) > 1e-3 and none_for_cd
    criterion(9, ok, f"min separation gap {min(gaps):.4f} over 20 channels; cd returns None: {none_for_cd}")


def test_criterion_10_gaussian_fixtures(criterion):
    a2 = io.load_gaussian(io.bundled("a2.json"))
    b1 = io.load_gaussian(io.bundled("b1.json"))
    perturbed = GaussianChannelParams(a2.k, 0.1 * a2.alpha, check_nid=False)
    comp = classify_complementary(b1)
    checks = {
        "a2 nid": validate_nid(a2),
        "a2 direct case A": classify_direct(a2).case == CASE_A,
        "a2 type": one_mode_type(a2) == "A2",
        "b1 direct case B": classify_direct(b1).case == CASE_B,
        "b1 complementary isotropic limb": comp.case == CASE_A and comp.limb == "isotropic",
        "b1 comp-rel span{[0,1]}": same_span(comp_rel_subspace(b1), np.array([[0.0], [1.0]])),
        "b1 type": one_mode_type(b1) == "B1",
        "perturbed a2 rejected": not validate_nid(perturbed),
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(10, not failed, f"{len(checks) - len(failed)}/{len(checks)} checks" + (f"; failed: {failed}" if failed else ""))


def test_criterion_11_cli_determinism(criterion):
    data = io.bundled("identity2.json").parent
    runs = [
        ["equality", str(data / "dephasing2.json"), "--state", str(data / "maxmixed2.json")],
        ["hat-equality", str(data / "random2_k3_seed7.json"), "--state", str(data / "diag2_03_07.json")],
        ["analyze", str(data / "random3_k2_seed11.json"), "--restarts", "4"],
        ["gap", str(data / "depolarizing2_p05.json"), "--restarts", "2", "--outer-restarts", "2"],
        ["separate", str(data / "random2_k3_seed7.json"), "--seed", "3"],
        ["gaussian-classify", str(data / "b1.json")],
    ]
    identical = 0
    for args in runs:
        outputs = []
        for _ in range(2):
            proc = subprocess.run(
                [sys.executable, "-m", "chanineq", *args, "--json"], capture_output=True, check=True
            )
            outputs.append(proc.stdout)
        identical += outputs[0] == outputs[1] and len(outputs[0]) > 0
    criterion(11, identical == len(runs), f"{identical}/{len(runs)} subcommands byte-identical across runs")
