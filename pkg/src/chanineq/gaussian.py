"""Symplectic classification of Bosonic Gaussian channel parameters.

A centered Gaussian channel is described by a real matrix ``K`` (mapping
``Z_B -> Z_A``) and a real symmetric noise matrix ``alpha`` on ``Z_B``,
subject to ``alpha >= +-(i/2)(Delta_B - K^T Delta_A K)``. Everything here is
finite-dimensional linear algebra over these matrices; the symplectic form
uses per-mode blocks ``[[0, 1], [-1, 0]]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr

from .errors import InvalidParams, NotOneMode, ShapeMismatch
from .numerics import min_eig_hermitian, nullspace

NID_TOL = 1e-9
RANK_TOL = 1e-10
FORM_TOL = 1e-9

COMPLETELY_DEPOLARIZING = "CompletelyDepolarizing"
CASE_B = "CaseB_FullRange"
CASE_A = "CaseA_IsotropicComplement"
CASE_D = "CaseD_SymplecticComplement"


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal ``2s x 2s`` form with blocks ``[[0, 1], [-1, 0]]``."""
    if modes < 1:
        raise ValueError("modes must be positive")
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class SymplecticSpace:
    modes: int

    @property
    def dim(self) -> int:
        return 2 * self.modes

    @property
    def form(self) -> np.ndarray:
        return symplectic_form(self.modes)


def _fix_signs(frame: np.ndarray) -> np.ndarray:
    # make the first significant entry of each column positive
    out = frame.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size and col[idx[0]] < 0:
            out[:, j] = -col
    return out


def range_frame(mat, rel_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal frame of the column space via pivoted QR."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0 or mat.shape[1] == 0:
        return np.zeros((mat.shape[0], 0))
    q, r, _ = qr(mat, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] <= 1e-300:
        return np.zeros((mat.shape[0], 0))
    return _fix_signs(q[:, : int(np.sum(diag > rel_tol * diag[0]))])


def same_span(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Whether two orthonormal frames span the same subspace."""
    if a.shape[1] != b.shape[1]:
        return False
    pa = a @ a.T
    pb = b @ b.T
    return bool(np.linalg.norm(pa - pb) <= tol)


@dataclass(frozen=True)
class GaussianChannelParams:
    """Parameters ``(K, l, alpha)`` of a Gaussian channel.

    Args:
        k: Real ``2 s_A x 2 s_B`` matrix.
        alpha: Real symmetric ``2 s_B x 2 s_B`` matrix.
        l: Displacement vector of length ``2 s_B``; stored but unused by the
            classification (a nonzero value only triggers a warning).
        check_nid: Validate the noise inequality on construction.

    Raises:
        ShapeMismatch: inconsistent shapes.
        InvalidParams: ``alpha`` not symmetric, or the noise inequality
            fails while ``check_nid`` is set.
    """

    k: np.ndarray
    alpha: np.ndarray
    l: np.ndarray | None = None
    check_nid: bool = field(default=True, compare=False)

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.k, dtype=float))
        alpha = np.atleast_2d(np.asarray(self.alpha, dtype=float))
        if k.shape[0] % 2 or k.shape[1] % 2:
            raise ShapeMismatch(f"K must have even dimensions, got {k.shape}")
        if alpha.shape != (k.shape[1], k.shape[1]):
            raise ShapeMismatch(f"alpha must be {k.shape[1]}x{k.shape[1]}, got {alpha.shape}")
        l = np.zeros(k.shape[1]) if self.l is None else np.asarray(self.l, dtype=float).ravel()
        if l.shape != (k.shape[1],):
            raise ShapeMismatch(f"l must have length {k.shape[1]}, got {l.shape}")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(alpha)) and np.all(np.isfinite(l))):
            raise InvalidParams("parameters must be finite")
        if np.max(np.abs(alpha - alpha.T), initial=0.0) > 1e-12:
            raise InvalidParams("alpha is not symmetric")
        if np.any(l != 0):
            warnings.warn("nonzero displacement l is ignored by the classification", stacklevel=3)
        for name, arr in (("k", k), ("alpha", 0.5 * (alpha + alpha.T)), ("l", l)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.check_nid and not validate_nid(self):
            raise InvalidParams("noise inequality alpha >= +-(i/2)(Delta_B - K^T Delta_A K) fails")

    @property
    def s_a(self) -> int:
        return self.k.shape[0] // 2

    @property
    def s_b(self) -> int:
        return self.k.shape[1] // 2


def form_defect(params: GaussianChannelParams) -> np.ndarray:
    """``Delta_B - K^T Delta_A K``."""
    return symplectic_form(params.s_b) - params.k.T @ symplectic_form(params.s_a) @ params.k


def validate_nid(params: GaussianChannelParams) -> bool:
    """Whether ``alpha -+ (i/2) M`` are both PSD (to 1e-9) for ``M`` the form defect."""
    m = form_defect(params)
    alpha = params.alpha.astype(complex)
    return all(min_eig_hermitian(alpha + sign * 0.5j * m) >= -NID_TOL for sign in (1.0, -1.0))


def skew_complement(frame, space: SymplecticSpace) -> np.ndarray:
    """Frame of ``{z : z^T Delta v = 0 for all v in span(frame)}``."""
    v = np.asarray(frame, dtype=float).reshape(space.dim, -1)
    if v.shape[1] == 0:
        return np.eye(space.dim)
    return _fix_signs(np.real(nullspace(v.T @ space.form, RANK_TOL)))


def symplectic_content(frame, space: SymplecticSpace) -> tuple[bool, int]:
    """``(is_isotropic, rank of the form restricted to the subspace)``."""
    q = range_frame(np.asarray(frame, dtype=float).reshape(space.dim, -1))
    if q.shape[1] == 0:
        return True, 0
    restricted = q.T @ space.form @ q
    s = np.linalg.svd(restricted, compute_uv=False)
    rank = int(np.sum(s > RANK_TOL))
    return rank == 0, rank


@dataclass
class GaussianClassification:
    """Case label plus the dimensions it was derived from.

    For the direct channel ``ran_k_dim`` is ``dim Ran K`` and the complement
    is ``[Ran K]`` skew-complement. For the complementary channel the same
    fields describe ``Ran L`` and ``K(ker alpha)``. ``limb`` is a short
    tag: ``"strict"``, ``"isotropic"``, ``"symplectic"``, ``"depolarizing"``
    or ``"noiseless"``.
    """

    case: str
    ran_k_dim: int
    complement_dim: int
    complement_symplectic_rank: int
    limb: str
    complement_basis: np.ndarray
    one_mode_type: str | None = None
    notes: str = ""


def _one_mode_label(params) -> str | None:
    if params.s_a == 1 and params.s_b == 1:
        return one_mode_type(params)
    return None


def _shift_note(basis: np.ndarray) -> str:
    vecs = ", ".join("[" + ", ".join(f"{x + 0.0:.6g}" for x in col) + "]" for col in basis.T)
    return f"equality states are constrained along the shift directions span{{{vecs}}}"


def classify_direct(params: GaussianChannelParams) -> GaussianClassification:
    """Classify ``C = I`` behaviour from ``Ran K`` and its skew complement.

    Decision table:
        ``K = 0``: completely depolarizing.
        ``Ran K = Z_A``: strict inequality for every mixed state.
        complement isotropic: equality only for states whose eigenbasis meets
        a support condition along the complement (reported as a note).
        complement with a symplectic part: equality for some mixed states.
    """
    if not isinstance(params, GaussianChannelParams):
        raise InvalidParams("expected GaussianChannelParams")
    za = SymplecticSpace(params.s_a)
    ran = range_frame(params.k)
    comp = skew_complement(ran, za)
    iso, srank = symplectic_content(comp, za)
    label = _one_mode_label(params)
    if ran.shape[1] == 0:
        return GaussianClassification(
            COMPLETELY_DEPOLARIZING, 0, za.dim, za.dim, "depolarizing", comp, label,
            "K = 0: output does not depend on the input",
        )
    if comp.shape[1] == 0:
        return GaussianClassification(
            CASE_B, ran.shape[1], 0, 0, "strict", comp, label,
            "Ran K is the whole space: C < I for every mixed state",
        )
    if iso:
        return GaussianClassification(
            CASE_A, ran.shape[1], comp.shape[1], 0, "isotropic", comp, label, _shift_note(comp)
        )
    return GaussianClassification(
        CASE_D, ran.shape[1], comp.shape[1], srank, "symplectic", comp, label,
        "complement contains a symplectic subspace: some mixed states give C = I",
    )


def alpha_kernel(params: GaussianChannelParams) -> np.ndarray:
    return np.real(nullspace(params.alpha, RANK_TOL))


def comp_rel_subspace(params: GaussianChannelParams) -> np.ndarray:
    """Frame of ``K(ker alpha)``, the skew complement of ``Ran L``.

    Warns if ``K`` restricted to ``ker alpha`` is rank deficient or does not
    carry ``Delta_B`` to ``Delta_A``.
    """
    ker = alpha_kernel(params)
    if ker.shape[1] == 0:
        return np.zeros((2 * params.s_a, 0))
    image = params.k @ ker
    frame = range_frame(image)
    if frame.shape[1] < ker.shape[1]:
        warnings.warn("K restricted to ker alpha is not injective", stacklevel=2)
    pulled = image.T @ symplectic_form(params.s_a) @ image
    native = ker.T @ symplectic_form(params.s_b) @ ker
    if np.max(np.abs(pulled - native), initial=0.0) > FORM_TOL:
        warnings.warn("K restricted to ker alpha does not preserve the symplectic form", stacklevel=2)
    return frame


def classify_complementary(params: GaussianChannelParams) -> GaussianClassification:
    """Classify ``C = H`` behaviour, driven by ``ker alpha``.

    ``alpha`` nonsingular means ``Ran L = Z_A`` and strict inequality for
    every mixed state. ``K(ker alpha) = Z_A`` means ``L = 0``: the
    complementary channel is completely depolarizing, i.e. the channel is
    noiseless. Otherwise ``ker alpha`` isotropic gives the support-condition
    case over ``K(ker alpha)`` and a symplectic part gives existence of mixed
    states with ``C = H``.
    """
    if not isinstance(params, GaussianChannelParams):
        raise InvalidParams("expected GaussianChannelParams")
    za = SymplecticSpace(params.s_a)
    zb = SymplecticSpace(params.s_b)
    ker = alpha_kernel(params)
    rel = comp_rel_subspace(params)
    ran_l_dim = za.dim - rel.shape[1]
    label = _one_mode_label(params)
    if ker.shape[1] == 0:
        return GaussianClassification(
            CASE_B, za.dim, 0, 0, "strict", rel, label,
            "alpha is nonsingular: C < H for every mixed state",
        )
    if rel.shape[1] == za.dim:
        return GaussianClassification(
            COMPLETELY_DEPOLARIZING, 0, za.dim, za.dim, "noiseless", rel, label,
            "L = 0: the complementary channel is completely depolarizing, the channel is noiseless",
        )
    iso, srank = symplectic_content(ker, zb)
    if iso:
        return GaussianClassification(
            CASE_A, ran_l_dim, rel.shape[1], 0, "isotropic", rel, label, _shift_note(rel)
        )
    return GaussianClassification(
        CASE_D, ran_l_dim, rel.shape[1], srank, "symplectic", rel, label,
        "ker alpha contains a symplectic subspace: some mixed states give C = H",
    )


def one_mode_invariants(params: GaussianChannelParams) -> dict:
    """``rank K``, whether the form defect vanishes, and ``rank alpha``."""
    if params.s_a != 1 or params.s_b != 1:
        raise NotOneMode(f"expected one mode on each side, got s_a={params.s_a}, s_b={params.s_b}")
    sk = np.linalg.svd(params.k, compute_uv=False)
    sa = np.linalg.svd(params.alpha, compute_uv=False)
    return {
        "rank_k": int(np.sum(sk > max(RANK_TOL * sk[0], 1e-12))),
        "form_preserving": bool(np.linalg.norm(form_defect(params)) <= FORM_TOL),
        "rank_alpha": int(np.sum(sa > max(RANK_TOL * sa[0], 1e-12))),
    }


def one_mode_type(params: GaussianChannelParams) -> str:
    """``"A1"``, ``"A2"``, ``"B1"`` or ``"Other"`` from the one-mode invariants."""
    inv = one_mode_invariants(params)
    if inv["rank_k"] == 0:
        return "A1"
    if inv["rank_k"] == 1:
        return "A2"
    if inv["rank_k"] == 2 and inv["form_preserving"] and inv["rank_alpha"] == 1:
        return "B1"
    return "Other"
