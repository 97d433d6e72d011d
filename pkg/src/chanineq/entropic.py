"""Entropy functionals of states, ensembles and channels (all in bits)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import QuantumChannel, apply, as_state, complement
from .errors import DimensionMismatch, InvalidEnsemble, InvalidState
from .numerics import CLIP_TOL, hermitian_eig


class _Infinity:
    """Sentinel for an infinite relative entropy.

    It compares greater than every float but supports no arithmetic, so a
    sum that silently absorbs it raises ``TypeError`` instead.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("chanineq.INF")


INF = _Infinity()


def is_infinite(x) -> bool:
    return x is INF


def clipped_spectrum(eigenvalues) -> np.ndarray:
    """Clip eigenvalues in ``[-1e-10, 0]`` to zero; more negative is an error."""
    w = np.asarray(eigenvalues, dtype=float)
    if w.size and w.min() < -CLIP_TOL:
        raise InvalidState(f"eigenvalue {w.min():.3g} is below -{CLIP_TOL}")
    return np.clip(w, 0.0, None)


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    # rounding can push an eigenvalue of a pure state to 1 + eps
    return max(0.0, float(-np.sum(p * np.log2(p))))


def vn_entropy(rho) -> float:
    rho = as_state(rho)
    return shannon_bits(clipped_spectrum(hermitian_eig(rho).eigenvalues))


def rel_entropy(rho, sigma):
    """``Tr rho (log rho - log sigma)`` in bits, or :data:`INF`."""
    rho = as_state(rho)
    sigma = as_state(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"states of dimension {rho.shape[0]} and {sigma.shape[0]}")
    wr, vr = hermitian_eig(rho)
    ws, vs = hermitian_eig(sigma)
    wr, ws = clipped_spectrum(wr), clipped_spectrum(ws)
    # overlap[i, j] = |<r_i|s_j>|^2
    overlap = np.abs(vr.conj().T @ vs) ** 2
    pos_r = wr > 0
    null_s = ws <= CLIP_TOL
    if np.any(wr[pos_r, None] * overlap[np.ix_(pos_r, null_s)] > 1e-12):
        return INF
    log_s = np.where(null_s, 0.0, np.log2(np.where(null_s, 1.0, ws)))
    cross = float(np.sum(wr[pos_r, None] * overlap[pos_r] * log_s[None, :]))
    return float(np.sum(wr[pos_r] * np.log2(wr[pos_r])) - cross)


@dataclass(frozen=True)
class Ensemble:
    """Finite ensemble ``{pi_i, rho_i}``.

    ``vectors`` is filled for pure-state ensembles produced by the capacity
    optimizer; it is informational only.
    """

    weights: np.ndarray
    members: tuple
    vectors: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.members) or len(w) == 0:
            raise InvalidEnsemble("weights and members must be nonempty and of equal length")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidEnsemble("weights must be positive and sum to one")
        members = tuple(np.asarray(m, dtype=complex) for m in self.members)
        d = members[0].shape
        for i, m in enumerate(members):
            if m.shape != d:
                raise InvalidEnsemble(f"member {i} has shape {m.shape}, expected {d}")
            try:
                as_state(m)
            except (InvalidState, ValueError) as exc:
                raise InvalidEnsemble(f"member {i}: {exc}") from exc
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "members", members)

    @property
    def average(self) -> np.ndarray:
        return np.einsum("i,iab->ab", self.weights, np.array(self.members))

    def __len__(self):
        return len(self.weights)


def make_ensemble(weights: Sequence[float], members: Sequence[np.ndarray]) -> Ensemble:
    return Ensemble(np.asarray(weights, dtype=float), tuple(members))


def chi_quantity(ensemble: Ensemble) -> float:
    """Holevo quantity ``sum_i pi_i H(rho_i || rho_bar)``.

    The entropy-difference form is evaluated alongside as a consistency check.
    """
    avg = ensemble.average
    value = 0.0
    for p, m in zip(ensemble.weights, ensemble.members):
        d = rel_entropy(m, avg)
        if is_infinite(d):
            raise InvalidEnsemble("member support outside the average state's support")
        value += p * d
    alt = vn_entropy(avg) - sum(p * vn_entropy(m) for p, m in zip(ensemble.weights, ensemble.members))
    if abs(alt - value) > 1e-8:
        raise InvalidEnsemble(f"chi formulas disagree: {value!r} vs {alt!r}")
    return float(value)


def push_forward(channel: QuantumChannel, ensemble: Ensemble) -> Ensemble:
    if ensemble.members[0].shape[0] != channel.dim_in:
        raise DimensionMismatch("ensemble dimension does not match channel input")
    return Ensemble(ensemble.weights, tuple(apply(channel, m) for m in ensemble.members))


def chi_out(channel: QuantumChannel, ensemble: Ensemble) -> float:
    return chi_quantity(push_forward(channel, ensemble))


def entropy_exchange(channel: QuantumChannel, rho) -> float:
    return vn_entropy(apply(complement(channel), rho))


def mutual_information(channel: QuantumChannel, rho) -> float:
    """``I(Phi, rho) = H(rho) + H(Phi(rho)) - H(Phi_hat(rho))``."""
    rho = as_state(rho, channel.dim_in)
    return vn_entropy(rho) + vn_entropy(apply(channel, rho)) - entropy_exchange(channel, rho)
