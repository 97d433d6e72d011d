"""Deciding when the constrained Holevo capacity meets its upper bounds.

``C(Phi, rho) = I(Phi, rho)`` holds exactly when some eigenbasis ``{|i>}`` of
``rho`` (inside its support) satisfies ``Phi(|i><j|) = 0`` for ``i != j``;
``C(Phi, rho) = H(rho)`` is the same question asked of the complementary
channel. Writing ``F`` for a frame of the support, the condition says every
``F^dagger Phi*(Y) F`` is diagonal in the basis, so a suitable basis exists
iff these matrices commute with each other and with ``rho``. The default
decision procedure uses that; a randomized search over eigenspace-respecting
bases is available as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize
from scipy.sparse.csgraph import connected_components

from .capacity import OptimizerConfig, constrained_holevo_capacity, isometry_for_basis
from .channels import (
    DEFAULT_TOL,
    QuantumChannel,
    adjoint_range,
    apply_raw,
    as_state,
    complement,
    is_completely_depolarizing,
    joint_eigenbasis,
    offdiagonal_residual,
    subchannel,
)
from .entropic import mutual_information, vn_entropy
from .errors import DimensionMismatch, PureState
from .numerics import CLIP_TOL, group_eigenvalues, haar_isometry, hermitian_eig, nullspace

EQUAL = "Equal"
STRICTLY_LESS = "StrictlyLess"
UNDECIDED = "Undecided"

DEGENERACY_TOL = 1e-8
EQUAL_GAP_TOL = 1e-4
NEGATIVE_GAP_TOL = 1e-6
SEPARATION_WEIGHTS = (0.3, 0.7)


@dataclass(frozen=True)
class OrthogonalFamily:
    """Orthonormal family of vectors, stored as the columns of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[1] == 0:
            raise ValueError("a family needs at least one vector")
        if np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])) > 1e-9:
            raise ValueError("family vectors are not orthonormal")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_vectors(cls, vectors: Sequence[np.ndarray]) -> "OrthogonalFamily":
        return cls(np.column_stack([np.asarray(x, dtype=complex) for x in vectors]))

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.vectors.shape[1]


@dataclass
class EqualityReport:
    """Outcome of an equality decision.

    ``numeric_gap`` is ``None`` for purely structural decisions. ``reason``
    says which argument settled the verdict; ``diagnostics`` holds the
    numbers behind it.
    """

    verdict: str
    certificate: OrthogonalFamily | None
    numeric_gap: float | None
    method: str
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)


@dataclass
class SeparationResult:
    state: np.ndarray
    gap: float
    pair: tuple
    coupling: float


def _as_basis(family) -> np.ndarray:
    if isinstance(family, OrthogonalFamily):
        return family.vectors
    return OrthogonalFamily(family).vectors


def channel_kernel(channel: QuantumChannel, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of ``ker Phi`` as a stack of ``d_in x d_in`` matrices."""
    ker = nullspace(channel.superop, rank_tol)
    d = channel.dim_in
    return ker.T.reshape(-1, d, d)


def family_in_Pi(channel: QuantumChannel, family, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``Phi(|i><j|) = 0`` (to ``tol``) for all distinct members."""
    b = _as_basis(family)
    if b.shape[0] != channel.dim_in:
        raise DimensionMismatch(f"family lives in dimension {b.shape[0]}, expected {channel.dim_in}")
    return offdiagonal_residual(channel, b) <= tol


def family_in_Pi_hat(channel: QuantumChannel, family, tol: float = DEFAULT_TOL) -> bool:
    """Whether the outputs ``Phi(|i><i|)`` have mutually orthogonal supports.

    Decided through the complementary channel: the supports are orthogonal
    iff ``Phi_hat(|i><j|) = 0`` for ``i != j``.
    """
    return family_in_Pi(complement(channel), family, tol)


def _max_commutator(mats: Sequence[np.ndarray]) -> float:
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = mats[i] @ mats[j] - mats[j] @ mats[i]
            worst = max(worst, float(np.linalg.norm(c)))
    return worst


def _support(rho):
    spec = hermitian_eig(rho)
    keep = spec.eigenvalues > CLIP_TOL
    return spec.eigenvalues[keep], spec.eigenvectors[:, keep]


def _block_unitary(params, blocks, sizes):
    out = []
    pos = 0
    for u0, n in zip(blocks, sizes):
        h = np.zeros((n, n), dtype=complex)
        iu = np.triu_indices(n, 1)
        k = len(iu[0])
        h[np.arange(n), np.arange(n)] = params[pos : pos + n]
        h[iu] = params[pos + n : pos + n + k] + 1j * params[pos + n + k : pos + n + 2 * k]
        h = h + np.triu(h, 1).conj().T
        pos += n * n
        out.append(expm(1j * h) @ u0)
    return out


def _search_basis(channel, lam, frame, tol, restarts, seed):
    """Randomized minimization of ``sum_{i<j} ||Phi(|e_i><e_j|)||^2``.

    Only rotations inside each eigenspace of ``rho`` are explored.
    Returns the best basis found and its objective value.
    """
    groups = group_eigenvalues(lam, DEGENERACY_TOL)
    sizes = [len(g) for g in groups]
    frames = [frame[:, g] for g in groups]
    n_params = sum(n * n for n in sizes)

    def assemble(params, blocks):
        units = _block_unitary(params, blocks, sizes)
        return np.concatenate([f @ u for f, u in zip(frames, units)], axis=1)

    def g(params, blocks):
        b = assemble(params, blocks)
        av = np.einsum("kab,bi->kai", channel.kraus, b)
        out = np.einsum("kai,kcj->ijac", av, av.conj())
        sq = np.sum(np.abs(out) ** 2, axis=(2, 3))
        return float(np.sum(np.triu(sq, 1)))

    best_b, best_g = None, np.inf
    for k in range(restarts):
        rng = np.random.default_rng([seed, 20_000 + k])
        blocks = [np.eye(n, dtype=complex) if k == 0 else haar_isometry(n, n, rng) for n in sizes]
        x0 = np.zeros(n_params)
        val = g(x0, blocks)
        if n_params and val > tol**2:
            res = minimize(g, x0, args=(blocks,), method="BFGS", options={"gtol": 1e-14, "maxiter": 500})
            x0, val = res.x, float(res.fun)
        if val < best_g:
            best_b, best_g = assemble(x0, blocks), val
        if best_g <= tol**2:
            break
    return best_b, best_g


def eigenbasis_in_Pi(
    channel: QuantumChannel,
    rho,
    tol: float = DEFAULT_TOL,
    cfg: OptimizerConfig | None = None,
    method: str = "algebraic",
    search_restarts: int = 64,
) -> EqualityReport:
    """Decide whether an eigenbasis of ``rho`` in its support lies in ``Pi(Phi)``.

    Args:
        channel: The channel.
        rho: A mixed state (rank at least two).
        tol: Threshold on ``||Phi(|i><j|)||_F`` below which it counts as zero.
        cfg: Supplies the seed for ``method="search"``.
        method: ``"algebraic"`` (joint diagonalization plus a commutator
            certificate) or ``"search"`` (random-restart minimization over
            eigenspace rotations).
        search_restarts: Restarts for the search method.

    Returns:
        A structural :class:`EqualityReport`. Equal comes with the basis as
        certificate. StrictlyLess is reported only with a proof: either
        ``||Phi(X)|| > tol ||X||`` for every operator ``X`` on the support, or
        two of the matrices that would have to be simultaneously diagonal
        fail to commute by more than ``tol``.

    Raises:
        PureState: if ``rho`` has rank one.
    """
    cfg = cfg or OptimizerConfig()
    rho = as_state(rho, channel.dim_in)
    lam, frame = _support(rho)
    r = len(lam)
    if r < 2:
        raise PureState("the criterion concerns mixed states; rho has rank one")
    diag = {"rank": r}

    # kernel of the restricted channel: if trivial no |i><j| can be annihilated
    sub = subchannel(channel, frame)
    s_op = sub.superop
    sigma_min = 0.0
    if s_op.shape[0] >= s_op.shape[1]:
        sigma_min = float(np.linalg.svd(s_op, compute_uv=False)[-1])
    diag["kernel_sigma_min"] = sigma_min
    if sigma_min > tol:
        return EqualityReport(STRICTLY_LESS, None, None, "structural", "kernel trivial on support", diag)

    groups = group_eigenvalues(lam, DEGENERACY_TOL)
    diag["eigenspace_dims"] = [len(g) for g in groups]
    range_mats = list(adjoint_range(channel, frame))
    rho_c = np.diag(lam).astype(complex)
    commutator = _max_commutator([rho_c] + range_mats)
    diag["max_commutator"] = commutator

    if method == "algebraic":
        coords = joint_eigenbasis([rho_c] + range_mats, rel_tol=DEGENERACY_TOL)
        basis = frame @ coords
        residual = offdiagonal_residual(channel, basis)
    elif method == "search":
        basis, g_val = _search_basis(channel, lam, frame, tol, search_restarts, cfg.seed)
        residual = offdiagonal_residual(channel, basis)
        diag["search_objective"] = g_val
    else:
        raise ValueError(f"unknown method {method!r}")
    diag["residual"] = residual

    if residual <= tol:
        return EqualityReport(EQUAL, OrthogonalFamily(basis), None, "structural", "eigenbasis annihilated", diag)
    if commutator > tol:
        return EqualityReport(STRICTLY_LESS, None, None, "structural", "noncommuting constraints", diag)
    return EqualityReport(UNDECIDED, None, None, "structural", "no basis found and no obstruction proved", diag)


def _combine(struct: EqualityReport, numeric_gap: float, capacity) -> EqualityReport:
    diag = dict(struct.diagnostics)
    diag["capacity_slack"] = capacity.slack
    verdict, reason = struct.verdict, struct.reason
    if numeric_gap < -NEGATIVE_GAP_TOL:
        verdict, reason = UNDECIDED, "negative numeric gap"
    elif struct.verdict == EQUAL and numeric_gap > EQUAL_GAP_TOL:
        verdict, reason = UNDECIDED, "certificate found but numeric gap is large"
    elif struct.verdict == STRICTLY_LESS and numeric_gap <= capacity.slack:
        diag["note"] = "numeric gap within optimizer slack"
    return EqualityReport(verdict, struct.certificate, float(numeric_gap), "both", reason, diag)


def _seeded_capacity(channel, rho, cfg, certificate):
    initial = ()
    if certificate is not None:
        initial = (isometry_for_basis(rho, certificate.vectors),)
    return constrained_holevo_capacity(channel, rho, cfg, initial=initial)


def equality_test(
    channel: QuantumChannel,
    rho,
    tol: float = DEFAULT_TOL,
    cfg: OptimizerConfig | None = None,
    method: str = "algebraic",
) -> EqualityReport:
    """Decide ``C(Phi, rho) = I(Phi, rho)`` and report the numeric gap.

    The verdict is structural (:func:`eigenbasis_in_Pi`); ``numeric_gap`` is
    ``I - C`` with the capacity optimizer seeded by the certificate, if any.
    A contradiction between the two yields Undecided, never a flipped
    verdict.
    """
    cfg = cfg or OptimizerConfig()
    rho = as_state(rho, channel.dim_in)
    struct = eigenbasis_in_Pi(channel, rho, tol, cfg, method)
    cap = _seeded_capacity(channel, rho, cfg, struct.certificate)
    gap = mutual_information(channel, rho) - cap.value
    return _combine(struct, gap, cap)


def hat_equality_test(
    channel: QuantumChannel,
    rho,
    tol: float = DEFAULT_TOL,
    cfg: OptimizerConfig | None = None,
    method: str = "algebraic",
) -> EqualityReport:
    """Decide ``C(Phi, rho) = H(rho)``; ``numeric_gap`` is ``H - C``."""
    cfg = cfg or OptimizerConfig()
    rho = as_state(rho, channel.dim_in)
    struct = eigenbasis_in_Pi(complement(channel), rho, tol, cfg, method)
    cap = _seeded_capacity(channel, rho, cfg, struct.certificate)
    gap = vn_entropy(rho) - cap.value
    return _combine(struct, gap, cap)


def _coupling(channel: QuantumChannel, pair: np.ndarray) -> float:
    return float(np.linalg.norm(apply_raw(channel, np.outer(pair[:, 0], pair[:, 1].conj()))))


def two_rank_separation(
    channel: QuantumChannel,
    tol: float = DEFAULT_TOL,
    cfg: OptimizerConfig | None = None,
    n_pairs: int = 2000,
) -> SeparationResult | None:
    """Find a rank-two state with ``C(Phi, rho) < I(Phi, rho)``.

    Orthonormal pairs ``(phi, psi)`` are sampled to maximize
    ``||Phi(|phi><psi|)||_F``; the best is polished by a local search and the
    state ``0.3 |phi><phi| + 0.7 |psi><psi|`` is returned with its gap
    ``I - C``. Returns ``None`` exactly when the channel is completely
    depolarizing, since then no pair couples.
    """
    cfg = cfg or OptimizerConfig()
    if is_completely_depolarizing(channel, tol):
        return None
    d = channel.dim_in
    rng = np.random.default_rng([cfg.seed, 30_000])
    pairs = np.stack([haar_isometry(d, 2, rng) for _ in range(n_pairs)])
    av = np.einsum("kab,pb->pka", channel.kraus, pairs[:, :, 0])
    bv = np.einsum("kab,pb->pka", channel.kraus, pairs[:, :, 1])
    outs = np.einsum("pka,pkc->pac", av, bv.conj())
    scores = np.linalg.norm(outs.reshape(n_pairs, -1), axis=1)
    start = pairs[int(np.argmax(scores))]

    def rotated(x):
        h = np.zeros((d, d), dtype=complex)
        iu = np.triu_indices(d, 1)
        k = len(iu[0])
        h[iu] = x[:k] + 1j * x[k:]
        h = h - h.conj().T
        return expm(h) @ start

    n_par = d * (d - 1)
    res = minimize(lambda x: -_coupling(channel, rotated(x)), np.zeros(n_par), method="BFGS")
    pair = rotated(res.x) if -res.fun >= scores.max() else start
    phi, psi = pair[:, 0], pair[:, 1]
    w0, w1 = SEPARATION_WEIGHTS
    rho = w0 * np.outer(phi, phi.conj()) + w1 * np.outer(psi, psi.conj())
    rho = 0.5 * (rho + rho.conj().T)
    cap = constrained_holevo_capacity(channel, rho, cfg)
    gap = mutual_information(channel, rho) - cap.value
    return SeparationResult(rho, float(gap), (phi, psi), _coupling(channel, pair))


def orthogonal_decomposition(vectors, tol: float = 1e-9):
    """Split a family of unit vectors into mutually orthogonal clusters.

    Two vectors are linked when ``|<a|b>| > tol``; clusters are the
    connected components of that graph.

    Returns:
        ``(components, projectors)``: lists of index lists and the orthogonal
        projector onto the span of each component.
    """
    vs = np.column_stack([np.asarray(v, dtype=complex) for v in vectors])
    norms = np.linalg.norm(vs, axis=0)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("vectors must be unit vectors")
    adj = np.abs(vs.conj().T @ vs) > tol
    n_comp, labels = connected_components(adj, directed=False)
    components = [[int(i) for i in np.flatnonzero(labels == c)] for c in range(n_comp)]
    components.sort(key=lambda c: c[0])
    projectors = []
    for comp in components:
        u, s, _ = np.linalg.svd(vs[:, comp], full_matrices=False)
        q = u[:, s > 1e-10 * s[0]]
        projectors.append(q @ q.conj().T)
    return components, projectors
