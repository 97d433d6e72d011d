"""Finite-dimensional quantum channels held as Kraus families.

A :class:`QuantumChannel` is validated on construction (trace preservation
and complete positivity) and is immutable afterwards. States are plain
``numpy`` arrays checked with :func:`as_state`.

Conventions:
    * Kraus operators have shape ``(dim_out, dim_in)``.
    * Choi matrix ``C = sum_ij E_ij (x) Phi(E_ij)`` with the input index first.
    * The complementary channel built from ``{A_k}`` has environment
      dimension equal to the number of nonzero Kraus operators and matrix
      elements ``Phi_hat(rho)_kl = Tr(A_k rho A_l^dagger)``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    BadProbability,
    BadRank,
    DimensionMismatch,
    InvalidState,
    NotCP,
    NotTracePreserving,
    ShapeMismatch,
)
from .numerics import (
    CLIP_TOL,
    check_hermitian,
    group_eigenvalues,
    haar_isometry,
    hermitian_eig,
    orth,
    partial_trace,
)

DEFAULT_TOL = 1e-8
COMPLETENESS_TOL = 1e-9
ZERO_KRAUS_TOL = 1e-12


def as_state(rho, dim: int | None = None) -> np.ndarray:
    """Validate a density operator and return it as a complex array.

    Raises:
        InvalidState: if ``rho`` is not Hermitian, has eigenvalues below
            ``-1e-10`` or trace off by more than ``1e-10``.
    """
    try:
        m = check_hermitian(rho)
    except ValueError as exc:
        raise InvalidState(str(exc)) from exc
    if dim is not None and m.shape[0] != dim:
        raise DimensionMismatch(f"state has dimension {m.shape[0]}, expected {dim}")
    if abs(np.trace(m).real - 1.0) > 1e-10:
        raise InvalidState(f"trace is {np.trace(m).real!r}, expected 1")
    if np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0] < -CLIP_TOL:
        raise InvalidState("state has a negative eigenvalue")
    return m


def pure_state(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def superoperator(kraus: np.ndarray) -> np.ndarray:
    """Matrix ``S`` with ``S @ vec(X) = vec(Phi(X))`` (row-major vec)."""
    return np.einsum("kab,kcd->acbd", kraus, kraus.conj()).reshape(
        kraus.shape[1] ** 2, kraus.shape[2] ** 2
    )


class QuantumChannel:
    """A CPTP map given by Kraus operators ``A_k`` of shape ``(d_B, d_A)``.

    Construction validates the family:

    >>> QuantumChannel([np.eye(2)]).dim_out
    2

    Raises:
        ShapeMismatch: if the operators do not share one shape.
        NotTracePreserving: if ``||sum A_k^dagger A_k - I||_F > 1e-9``.
    """

    def __init__(self, kraus: Sequence[np.ndarray] | np.ndarray):
        ops = [np.asarray(k, dtype=complex) for k in kraus]
        if not ops:
            raise ShapeMismatch("empty Kraus family")
        shape = ops[0].shape
        for i, op in enumerate(ops):
            if op.ndim != 2 or op.shape != shape:
                raise ShapeMismatch(f"kraus[{i}] has shape {op.shape}, expected {shape}")
            if not np.all(np.isfinite(op)):
                raise ShapeMismatch(f"kraus[{i}] has non-finite entries")
        stack = np.stack(ops)
        d_out, d_in = shape
        gram = np.einsum("kba,kbc->ac", stack.conj(), stack)
        err = np.linalg.norm(gram - np.eye(d_in))
        if err > COMPLETENESS_TOL:
            raise NotTracePreserving(f"||sum A^dagger A - I||_F = {err:.3g}")
        stack.setflags(write=False)
        self._kraus = stack
        self.dim_in = d_in
        self.dim_out = d_out

    @property
    def kraus(self) -> np.ndarray:
        """Read-only array of shape ``(n_kraus, dim_out, dim_in)``."""
        return self._kraus

    @property
    def n_kraus(self) -> int:
        return self._kraus.shape[0]

    @cached_property
    def choi(self) -> np.ndarray:
        # |A_k>> = sum_i |i> (x) A_k|i>, entry (i, b) = A_k[b, i]
        vecs = np.transpose(self._kraus, (0, 2, 1)).reshape(self.n_kraus, -1)
        c = vecs.T @ vecs.conj()
        c.setflags(write=False)
        return c

    @cached_property
    def superop(self) -> np.ndarray:
        s = superoperator(self._kraus)
        s.setflags(write=False)
        return s

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __repr__(self):
        return f"QuantumChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, n_kraus={self.n_kraus})"


def validate(kraus) -> QuantumChannel:
    """Build a channel from Kraus operators, checking CP and TP."""
    ch = QuantumChannel(kraus)
    if np.linalg.eigvalsh(ch.choi)[0] < -1e-9:
        raise NotCP("Choi matrix has a negative eigenvalue")
    return ch


def apply_raw(channel: QuantumChannel, x) -> np.ndarray:
    """Linear action on an arbitrary ``d_A x d_A`` operator."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (channel.dim_in, channel.dim_in):
        raise DimensionMismatch(f"operator shape {x.shape} does not match input dim {channel.dim_in}")
    a = channel.kraus
    return np.einsum("kab,bc,kdc->ad", a, x, a.conj())


def apply(channel: QuantumChannel, rho) -> np.ndarray:
    rho = as_state(rho, channel.dim_in)
    return apply_raw(channel, rho)


def apply_adjoint(channel: QuantumChannel, y) -> np.ndarray:
    """Heisenberg-picture action ``sum_k A_k^dagger Y A_k``."""
    y = np.asarray(y, dtype=complex)
    if y.shape != (channel.dim_out, channel.dim_out):
        raise DimensionMismatch(f"operator shape {y.shape} does not match output dim {channel.dim_out}")
    a = channel.kraus
    return np.einsum("kba,bc,kcd->ad", a.conj(), y, a)


def choi(channel: QuantumChannel) -> np.ndarray:
    return np.array(channel.choi)


def kraus_from_choi(c, dims: tuple[int, int], rank_tol: float = 1e-12) -> QuantumChannel:
    """Canonical Kraus family from a Choi matrix.

    Kraus operators are the eigenvectors of ``c`` weighted by the square root
    of their eigenvalues, dropping eigenvalues at most ``rank_tol * max``.

    Raises:
        NotCP: if ``c`` has an eigenvalue below ``-1e-8``.
        NotTracePreserving: if ``Tr_out c`` differs from the identity by more
            than ``1e-8``.
    """
    d_in, d_out = int(dims[0]), int(dims[1])
    c = np.asarray(c, dtype=complex)
    if c.shape != (d_in * d_out, d_in * d_out):
        raise DimensionMismatch(f"Choi matrix of shape {c.shape} does not match dims {dims}")
    c = check_hermitian(c, tol=1e-8)
    if np.linalg.norm(partial_trace(c, "second", (d_in, d_out)) - np.eye(d_in)) > 1e-8:
        raise NotTracePreserving("partial trace of the Choi matrix over the output is not I")
    w, v = np.linalg.eigh(0.5 * (c + c.conj().T))
    if w[0] < -1e-8:
        raise NotCP(f"Choi matrix has eigenvalue {w[0]:.3g}")
    keep = w > rank_tol * max(w[-1], 0.0)
    order = np.argsort(-w[keep], kind="stable")
    ws, vs = w[keep][order], v[:, keep][:, order]
    ops = [np.sqrt(wk) * vs[:, k].reshape(d_in, d_out).T for k, wk in enumerate(ws)]
    return QuantumChannel(ops)


def _nonzero_kraus(channel: QuantumChannel) -> np.ndarray:
    a = channel.kraus
    norms = np.linalg.norm(a.reshape(a.shape[0], -1), axis=1)
    keep = norms > ZERO_KRAUS_TOL
    if not np.any(keep):
        keep[np.argmax(norms)] = True
    return a[keep]


def complement(channel: QuantumChannel) -> QuantumChannel:
    """Complementary channel from the Stinespring isometry of the Kraus family.

    Zero Kraus operators are discarded first so the environment is no larger
    than needed. The result is unique up to isometric equivalence.
    """
    a = _nonzero_kraus(channel)
    # B_j[k, :] = A_k[j, :]
    b = np.transpose(a, (1, 0, 2))
    return QuantumChannel(list(b))


def compose(psi: QuantumChannel, phi: QuantumChannel) -> QuantumChannel:
    """The channel ``psi o phi`` (apply ``phi`` first)."""
    if phi.dim_out != psi.dim_in:
        raise DimensionMismatch(f"cannot compose: {phi.dim_out} -> {psi.dim_in}")
    prod = np.einsum("jab,kbc->jkac", psi.kraus, phi.kraus).reshape(
        -1, psi.dim_out, phi.dim_in
    )
    return QuantumChannel(list(prod))


def check_frame(frame, ambient_dim: int | None = None) -> np.ndarray:
    f = np.asarray(frame, dtype=complex)
    if f.ndim == 1:
        f = f[:, None]
    if ambient_dim is not None and f.shape[0] != ambient_dim:
        raise DimensionMismatch(f"frame lives in dimension {f.shape[0]}, expected {ambient_dim}")
    if np.linalg.norm(f.conj().T @ f - np.eye(f.shape[1])) > 1e-10:
        raise ValueError("frame columns are not orthonormal")
    return f


def subchannel(channel: QuantumChannel, frame) -> QuantumChannel:
    """Restriction of ``channel`` to the subspace spanned by ``frame`` columns."""
    f = check_frame(frame, channel.dim_in)
    return QuantumChannel(list(np.einsum("kab,bc->kac", channel.kraus, f)))


def traceless_basis(d: int) -> np.ndarray:
    """Orthonormal basis of traceless ``d x d`` matrices, shape ``(d*d-1, d, d)``."""
    mats = []
    for i in range(d):
        for j in range(d):
            if i != j:
                e = np.zeros((d, d), dtype=complex)
                e[i, j] = 1.0
                mats.append(e)
    for k in range(1, d):
        e = np.zeros((d, d), dtype=complex)
        e[np.arange(k), np.arange(k)] = 1.0
        e[k, k] = -k
        mats.append(e / np.sqrt(k * (k + 1)))
    return np.array(mats).reshape(-1, d, d)


def is_completely_depolarizing(channel: QuantumChannel, tol: float = DEFAULT_TOL) -> bool:
    """True iff the channel annihilates every traceless operator.

    Equivalent to ``Phi(|phi><psi|) = 0`` for all orthogonal pairs.
    """
    d = channel.dim_in
    if d == 1:
        return True
    t = traceless_basis(d).reshape(d * d - 1, d * d).T
    restricted = channel.superop @ t
    return bool(np.linalg.norm(restricted, 2) <= tol)


def hermitian_operator_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis of ``d x d`` matrices, shape ``(d*d, d, d)``."""
    mats = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        mats.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1 / np.sqrt(2)
            mats.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j / np.sqrt(2)
            e[j, i] = 1j / np.sqrt(2)
            mats.append(e)
    return np.array(mats)


def adjoint_range(channel: QuantumChannel, frame=None) -> np.ndarray:
    """Hermitian basis of ``{F^dagger Phi*(Y) F}``, the compressed adjoint range.

    ``Phi(|i><j|) = 0`` for a family ``{|i>}`` in ``span F`` exactly when
    every element of this space is diagonal in that family, so the question
    of whether such a basis exists is one of commutativity.
    """
    a = channel.kraus
    if frame is not None:
        a = np.einsum("kab,bc->kac", a, check_frame(frame, channel.dim_in))
    n = a.shape[2]
    ys = hermitian_operator_basis(a.shape[1])
    imgs = np.einsum("kba,ybc,kcd->yad", a.conj(), ys, a)
    flat = np.concatenate([imgs.real.reshape(len(ys), -1), imgs.imag.reshape(len(ys), -1)], axis=1)
    # real span of Hermitian images, orthonormalized in the real inner product
    u = orth(flat.T, rel_tol=1e-12)
    out = u.T[:, : n * n] + 1j * u.T[:, n * n :]
    return out.reshape(-1, n, n)


def joint_eigenbasis(mats: Sequence[np.ndarray], frame=None, rel_tol: float = 1e-8) -> np.ndarray:
    """Common eigenbasis of commuting Hermitian matrices by successive splitting.

    Starting from ``frame`` (identity by default) each matrix is compressed to
    the current groups and diagonalized there; eigenvalues closer than
    ``rel_tol`` times the matrix norm stay grouped. If the matrices do not
    commute the result is still an orthonormal basis, just not a common
    eigenbasis; callers verify whatever property they need.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if frame is None:
        frame = np.eye(mats[0].shape[0], dtype=complex)
    groups = [np.asarray(frame, dtype=complex)]
    for m in mats:
        scale = max(np.linalg.norm(m, 2), 1e-300)
        new_groups = []
        for g in groups:
            if g.shape[1] == 1:
                new_groups.append(g)
                continue
            c = g.conj().T @ m @ g
            w, v = np.linalg.eigh(0.5 * (c + c.conj().T))
            order = np.argsort(-w, kind="stable")
            w, v = w[order], v[:, order]
            for idx in group_eigenvalues(w, rel_tol * scale):
                new_groups.append(g @ v[:, idx])
        groups = new_groups
    return np.concatenate(groups, axis=1)


def offdiagonal_residual(channel: QuantumChannel, basis) -> float:
    """``max_{i != j} ||Phi(|i><j|)||_F`` over the columns of ``basis``."""
    b = np.asarray(basis, dtype=complex)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[0] != channel.dim_in:
        raise DimensionMismatch(f"family lives in dimension {b.shape[0]}, expected {channel.dim_in}")
    n = b.shape[1]
    if n < 2:
        return 0.0
    av = np.einsum("kab,bi->kai", channel.kraus, b)
    out = np.einsum("kai,kcj->ijac", av, av.conj())
    norms = np.linalg.norm(out.reshape(n, n, -1), axis=2)
    np.fill_diagonal(norms, 0.0)
    return float(norms.max())


def is_discrete_cq(channel: QuantumChannel, tol: float = DEFAULT_TOL):
    """Find a basis ``{|i>}`` with ``Phi(rho) = sum <i|rho|i> sigma_i``.

    Returns ``(basis, sigmas)`` with the basis as columns, or ``None`` if the
    channel is not a discrete c-q channel.
    """
    basis = joint_eigenbasis(adjoint_range(channel))
    if offdiagonal_residual(channel, basis) > tol:
        return None
    sigmas = [apply_raw(channel, np.outer(basis[:, i], basis[:, i].conj())) for i in range(basis.shape[1])]
    return basis, sigmas


# -- fixtures ---------------------------------------------------------------


def identity(d: int) -> QuantumChannel:
    return QuantumChannel([np.eye(d)])


def dephasing(basis) -> QuantumChannel:
    """Complete dephasing in the basis given by the columns (or an int ``d``)."""
    if np.isscalar(basis):
        basis = np.eye(int(basis))
    b = check_frame(basis)
    if b.shape[0] != b.shape[1]:
        raise BadRank("dephasing needs a complete basis")
    return QuantumChannel([np.outer(b[:, i], b[:, i].conj()) for i in range(b.shape[1])])


def _weyl_operators(d: int) -> list[np.ndarray]:
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


def depolarizing(p: float, d: int) -> QuantumChannel:
    """``rho -> (1 - p) rho + p Tr(rho) I/d`` via Weyl operators."""
    if not 0.0 <= p <= 1.0:
        raise BadProbability(f"p = {p} is outside [0, 1]")
    ws = _weyl_operators(d)
    ops = [np.sqrt(1 - p + p / d**2) * ws[0]]
    ops += [np.sqrt(p) / d * w for w in ws[1:]]
    return QuantumChannel(ops)


def _state_kraus_columns(sigma) -> list[tuple[float, np.ndarray]]:
    spec = hermitian_eig(as_state(sigma), method="lapack")
    return [(lam, spec.eigenvectors[:, k]) for k, lam in enumerate(spec.eigenvalues) if lam > CLIP_TOL]


def cd_channel(sigma, d_in: int | None = None) -> QuantumChannel:
    """Completely depolarizing channel ``rho -> Tr(rho) sigma``."""
    sigma = as_state(sigma)
    d_in = sigma.shape[0] if d_in is None else d_in
    ops = []
    for lam, vec in _state_kraus_columns(sigma):
        for j in range(d_in):
            e = np.zeros(d_in)
            e[j] = 1.0
            ops.append(np.sqrt(lam) * np.outer(vec, e))
    return QuantumChannel(ops)


def cq_channel(basis, sigmas: Sequence[np.ndarray]) -> QuantumChannel:
    """Discrete c-q channel ``rho -> sum_i <i|rho|i> sigma_i``."""
    b = check_frame(basis)
    if b.shape[0] != b.shape[1] or len(sigmas) != b.shape[1]:
        raise BadRank("c-q channel needs a complete basis and one state per basis vector")
    ops = []
    for i, sigma in enumerate(sigmas):
        for lam, vec in _state_kraus_columns(sigma):
            ops.append(np.sqrt(lam) * np.outer(vec, b[:, i].conj()))
    return QuantumChannel(ops)


def random_channel(d_in: int, d_out: int, n_kraus: int, seed: int | None = None) -> QuantumChannel:
    """Channel from a Haar-random isometry ``C^{d_in} -> C^{d_out} (x) C^{n_kraus}``."""
    if min(d_in, d_out, n_kraus) < 1 or d_out * n_kraus < d_in:
        raise BadRank(f"no isometry from dimension {d_in} into {d_out} x {n_kraus}")
    rng = np.random.default_rng(seed)
    v = haar_isometry(d_out * n_kraus, d_in, rng)
    return QuantumChannel(list(v.reshape(n_kraus, d_out, d_in)))


def truncation_channel(d: int, n: int, tau) -> QuantumChannel:
    """``sigma -> P_n sigma P_n + Tr((I - P_n) sigma) tau`` for a pure ``tau``.

    ``P_n`` projects onto the first ``n`` computational basis vectors.
    """
    if not 1 <= n <= d:
        raise BadRank(f"need 1 <= n <= d, got n={n}, d={d}")
    tau = as_state(tau, d)
    spec = hermitian_eig(tau, method="lapack")
    if d > 1 and spec.eigenvalues[1] > 1e-10:
        raise BadRank("tau must be a pure state")
    t = spec.eigenvectors[:, 0]
    p = np.zeros((d, d), dtype=complex)
    p[np.arange(n), np.arange(n)] = 1.0
    ops = [p]
    for k in range(n, d):
        e = np.zeros(d)
        e[k] = 1.0
        ops.append(np.outer(t, e))
    return QuantumChannel(ops)


def random_state(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre factor of the given rank."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)
