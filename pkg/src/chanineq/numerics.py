"""Dense complex linear algebra used by the rest of the package.

Everything here works on plain ``numpy`` arrays. The Hermitian eigensolver
is a cyclic complex Jacobi method; :func:`hermitian_eig` also accepts
``method="lapack"`` to defer to ``numpy.linalg.eigh`` (the optimizers'
inner loops use the batched LAPACK route directly).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NumericalError

HERMITIAN_TOL = 1e-10
CLIP_TOL = 1e-10


class HermitianSpectrum(NamedTuple):
    """Eigenvalues sorted descending and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - a.conj().T))


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix is not square: {m.shape}")
    if hermiticity_error(m) > tol * (1.0 + np.linalg.norm(m)):
        raise NotHermitian("matrix differs from its adjoint")
    return m


def jacobi_eigh(a: np.ndarray, rel_tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Each rotation first removes the phase of ``a[p, q]`` with a diagonal
    unitary and then applies the real symmetric Jacobi rotation, so the
    pair (p, q) is annihilated exactly. Sweeps stop once the off-diagonal
    Frobenius mass is at most ``rel_tol * ||a||_F``.

    Returns unsorted eigenvalues and the accumulated unitary.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    target = rel_tol * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                elif tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q)
                ph = np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * ph * col_q
                a[:, q] = s * col_p + c * ph * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * row_p + c * phase * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * ph * vq
                v[:, q] = s * vp + c * ph * vq
    raise NumericalError("Jacobi eigensolver did not converge")


def hermitian_eig(a, method: str = "jacobi") -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises:
        NotHermitian: if ``||A - A^dagger||_F > 1e-10 (1 + ||A||_F)``.
    """
    m = check_hermitian(a)
    m = 0.5 * (m + m.conj().T)
    if method == "jacobi":
        w, v = jacobi_eigh(m)
    elif method == "lapack":
        w, v = np.linalg.eigh(m)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(-w, kind="stable")
    return HermitianSpectrum(np.asarray(w[order], dtype=float), v[:, order])


def min_eig_hermitian(a) -> float:
    return float(hermitian_eig(a).eigenvalues[-1])


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, side: str, dims: tuple[int, int]) -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``dA * dB``.

    ``side="first"`` removes the A factor, ``side="second"`` removes B.
    """
    m = as_matrix(m)
    da, db = int(dims[0]), int(dims[1])
    if m.shape != (da * db, da * db):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not match dims {dims}")
    t = m.reshape(da, db, da, db)
    if side == "first":
        return np.einsum("ibic->bc", t)
    if side == "second":
        return np.einsum("aibi->ab", t)
    raise ValueError(f"side must be 'first' or 'second', got {side!r}")


def default_rank_tol(shape) -> float:
    return max(shape) * 1e-12


def nullspace(mat, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``mat``.

    Singular values at most ``rank_tol * sigma_max`` count as zero. The
    default follows the usual SVD convention ``max(rows, cols) * 1e-12``.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2:
        raise DimensionMismatch("nullspace expects a 2-d matrix")
    if rank_tol is None:
        rank_tol = default_rank_tol(mat.shape)
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    n = mat.shape[1]
    if mat.size == 0:
        return np.eye(n, dtype=mat.dtype)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rank_tol * smax)) if smax > 0 else 0
    return vh[rank:].conj().T


def numerical_rank(mat, rank_tol: float | None = None) -> int:
    mat = np.asarray(mat)
    return mat.shape[1] - nullspace(mat, rank_tol).shape[1]


def orth(mat, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal frame of the column space of ``mat``."""
    mat = np.asarray(mat)
    if mat.size == 0 or mat.shape[1] == 0:
        return np.zeros((mat.shape[0], 0), dtype=mat.dtype)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((mat.shape[0], 0), dtype=mat.dtype)
    return u[:, s > rel_tol * s[0]]


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``rows x cols`` matrix with orthonormal columns."""
    z = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def polar_factor(y: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(y, full_matrices=False)
    return u @ vh


def group_eigenvalues(values, tol: float) -> list[list[int]]:
    """Group indices of sorted ``values`` whose consecutive gaps are <= tol."""
    groups: list[list[int]] = []
    for i, x in enumerate(values):
        if groups and abs(values[groups[-1][-1]] - x) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups
