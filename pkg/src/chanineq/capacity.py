"""Constrained Holevo capacity and the gap functional ``D(Phi)``.

The capacity at a state is ``H(Phi(rho))`` minus the convex roof of the
output entropy. Pure-state decompositions of ``rho`` with ``m`` members are
exactly the ``m x r`` isometries ``U`` (``r = rank rho``) through

    phi_i = sum_k U[i, k] sqrt(lambda_k) |k>,

so the roof is minimized over the complex Stiefel manifold. The default
local solver is L-BFGS in the chart ``U = Z (Z^dagger Z)^(-1/2)``; projected
gradient with a polar retraction and Armijo backtracking is kept as an
alternative. The values returned are achieved by explicit ensembles, hence
lower bounds on the true capacity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .channels import QuantumChannel, apply, as_state, complement
from .entropic import Ensemble, mutual_information, vn_entropy
from .errors import NotIsometry, RankMismatch
from .numerics import CLIP_TOL, haar_isometry, hermitian_eig, polar_factor

LN2 = np.log(2.0)
_LOG_FLOOR = 1e-30
_WEIGHT_FLOOR = 1e-14


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the convex-roof minimization.

    ``ensemble_size=None`` means ``rank(rho) ** 2`` members.
    """

    restarts: int = 32
    max_iters: int = 2000
    conv_tol: float = 1e-7
    ensemble_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.conv_tol <= 0:
            raise ValueError("restarts, max_iters and conv_tol must be positive")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ValueError("ensemble_size must be positive")


@dataclass
class CapacityResult:
    """Best ensemble found and its output chi-quantity.

    ``slack`` is the gap between the two best restarts (at least
    ``conv_tol``); it is a heuristic measure of how settled the optimum is.
    """

    value: float
    best_ensemble: Ensemble
    converged: bool
    restarts_used: int
    output_entropy: float = 0.0
    roof: float = 0.0
    slack: float = 0.0
    restart_values: list = field(default_factory=list)
    isometry: np.ndarray | None = None


def spectral_frame(rho) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues above the clip threshold and their eigenvectors."""
    spec = hermitian_eig(rho)
    keep = spec.eigenvalues > CLIP_TOL
    return spec.eigenvalues[keep], spec.eigenvectors[:, keep]


def _check_isometry(u: np.ndarray, r: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[1] != r:
        raise RankMismatch(f"isometry must have {r} columns, got shape {u.shape}")
    if np.linalg.norm(u.conj().T @ u - np.eye(r)) > 1e-9:
        raise NotIsometry("columns of U are not orthonormal")
    return u


def _ensemble_from_vectors(vecs: np.ndarray) -> Ensemble:
    weights = np.einsum("ia,ia->i", vecs, vecs.conj()).real
    keep = weights > _WEIGHT_FLOOR
    vecs, weights = vecs[keep], weights[keep]
    units = vecs / np.sqrt(weights)[:, None]
    members = tuple(np.outer(v, v.conj()) for v in units)
    return Ensemble(weights / weights.sum(), members, vectors=tuple(units))


def ensemble_from_isometry(rho, u) -> Ensemble:
    """Pure-state decomposition of ``rho`` parametrized by an isometry ``U``."""
    rho = as_state(rho)
    lam, vecs = spectral_frame(rho)
    u = _check_isometry(u, len(lam))
    w = vecs * np.sqrt(lam)
    return _ensemble_from_vectors(u @ w.T)


def isometry_for_basis(rho, basis) -> np.ndarray:
    """Isometry whose ensemble is ``{<e_i|rho|e_i>, |e_i>}`` for an eigenbasis.

    ``basis`` columns must be eigenvectors of ``rho`` spanning its support;
    the returned ``U`` is expressed in the spectral frame used by
    :func:`ensemble_from_isometry`.
    """
    lam, vecs = spectral_frame(rho)
    b = np.asarray(basis, dtype=complex)
    coeff = vecs.conj().T @ b  # coeff[k, i] = <k|e_i>
    pi = np.einsum("k,ki->i", lam, np.abs(coeff) ** 2)
    u = (np.sqrt(pi)[:, None] * coeff.T) / np.sqrt(lam)[None, :]
    return polar_factor(u)


class _RoofObjective:
    """Average output entropy of the ensemble encoded by ``U`` (in bits)."""

    def __init__(self, kraus: np.ndarray, w: np.ndarray):
        self.kraus = kraus
        self.w = w

    def vectors(self, u):
        return u @ self.w.T

    def _outputs(self, u):
        phis = self.vectors(u)
        b = np.einsum("kba,ma->mkb", self.kraus, phis)
        x = np.einsum("mkb,mkc->mbc", b, b.conj())
        return phis, x

    def value(self, u) -> float:
        _, x = self._outputs(u)
        ev = np.clip(np.linalg.eigvalsh(x), 0.0, None)
        p = ev.sum(axis=1)
        return float(_xlog2x(p).sum() - _xlog2x(ev).sum())

    def value_and_grad(self, u):
        phis, x = self._outputs(u)
        ev, vv = np.linalg.eigh(x)
        ev = np.clip(ev, 0.0, None)
        p = ev.sum(axis=1)
        f = float(_xlog2x(p).sum() - _xlog2x(ev).sum())
        # d/dX [p log p - Tr X log X] = log2(p) I - log2(X)  (the 1/ln2 terms cancel)
        logs = np.log2(np.maximum(ev, _LOG_FLOOR))
        logp = np.log2(np.maximum(p, _LOG_FLOOR))
        gdiag = logp[:, None] - logs
        g = np.einsum("mab,mb,mcb->mac", vv, gdiag, vv.conj())
        mg = np.einsum("kba,mbc,kcd->mad", self.kraus.conj(), g, self.kraus)
        h = np.einsum("mad,md->ma", mg, phis)
        grad = 2.0 * h @ self.w.conj()
        return f, grad


def _xlog2x(p):
    p = np.asarray(p)
    out = np.zeros_like(p, dtype=float)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out


def _descend(obj: _RoofObjective, u: np.ndarray, max_iters: int, conv_tol: float):
    """Armijo-projected gradient descent on the Stiefel manifold.

    Trial steps start from a Barzilai-Borwein estimate capped at 0.5 and are
    halved until the Armijo condition holds, so the objective never rises.
    """
    f, egrad = obj.value_and_grad(u)
    trace = [f]
    t_bb = 0.5
    prev = None
    converged = False
    for _ in range(max_iters):
        sym = u.conj().T @ egrad
        xi = egrad - u @ (0.5 * (sym + sym.conj().T))
        gnorm2 = float(np.vdot(xi, xi).real)
        if gnorm2 <= 1e-24:
            converged = True
            break
        if prev is not None:
            s_vec = u - prev[0]
            y_vec = xi - prev[1]
            sy = abs(float(np.vdot(s_vec, y_vec).real))
            if sy > 1e-300:
                t_bb = float(np.vdot(s_vec, s_vec).real) / sy
        t = min(max(t_bb, 1e-12), 0.5)
        accepted = False
        for _ in range(50):
            cand = polar_factor(u - t * xi)
            fc = obj.value(cand)
            if fc <= f - 1e-4 * t * gnorm2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True
            break
        decrease = f - fc
        prev = (u, xi)
        u = cand
        f, egrad = obj.value_and_grad(u)
        trace.append(f)
        if decrease < conv_tol * 1e-2 or (decrease < conv_tol and gnorm2 < conv_tol):
            converged = True
            break
    return u, f, converged, trace


def _minimize_chart(obj: _RoofObjective, u: np.ndarray, max_iters: int, conv_tol: float):
    """L-BFGS on ``Z`` with ``U = Z (Z^dagger Z)^(-1/2)``.

    The gradient is pulled back through the inverse square root using the
    divided differences of ``x -> x^(-1/2)`` in the eigenbasis of
    ``Z^dagger Z``.
    """
    m, r = u.shape
    n = m * r

    def unpack(x):
        z = (x[:n] + 1j * x[n:]).reshape(m, r)
        lam, q = np.linalg.eigh(z.conj().T @ z)
        sq = np.sqrt(np.maximum(lam, 1e-300))
        t = (q / sq) @ q.conj().T
        return z, q, sq, t

    def fun(x):
        z, q, sq, t = unpack(x)
        f, g = obj.value_and_grad(z @ t)
        bt = q.conj().T @ (z.conj().T @ g) @ q
        gam = 1.0 / (np.outer(sq, sq) * (sq[:, None] + sq[None, :]))
        c = q @ (bt * gam) @ q.conj().T
        gz = g @ t - z @ (c + c.conj().T)
        return f, np.concatenate([gz.real.ravel(), gz.imag.ravel()])

    trace = []

    def record(intermediate_result):
        trace.append(float(intermediate_result.fun))

    x0 = np.concatenate([u.real.ravel(), u.imag.ravel()])
    trace.append(obj.value(u))
    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={"maxiter": max_iters, "ftol": min(conv_tol, 1e-3) * 1e-7, "gtol": 1e-10},
    )
    z, _, _, t = unpack(res.x)
    u_new = polar_factor(z @ t)
    f = obj.value(u_new)
    if f > trace[0]:
        # never hand back something worse than the start
        return u, trace[0], False, trace
    converged = bool(res.success) or res.nit < max_iters
    return u_new, f, converged, trace


_METHODS = {"lbfgs": _minimize_chart, "pgd": _descend}


_ROUTES = ("auto", "direct", "complement")


def _effective_kraus(channel: QuantumChannel, route: str = "auto") -> np.ndarray:
    # H(Phi(psi)) = H(Phi_hat(psi)) on pure states, so either output may be used
    if route not in _ROUTES:
        raise ValueError(f"route must be one of {_ROUTES}, got {route!r}")
    if route == "complement" or (route == "auto" and channel.n_kraus < channel.dim_out):
        return complement(channel).kraus
    return channel.kraus


def constrained_holevo_capacity(
    channel: QuantumChannel,
    rho,
    cfg: OptimizerConfig | None = None,
    initial=(),
    method: str = "lbfgs",
    route: str = "auto",
) -> CapacityResult:
    """Lower bound on the constrained Holevo capacity ``C(Phi, rho)`` in bits.

    Restart 0 starts from the spectral decomposition of ``rho``; then come
    the isometries in ``initial`` (in the spectral frame, see
    :func:`isometry_for_basis`), then Haar-random isometries seeded from
    ``(cfg.seed, restart_index)``. Restarts are folded in index order and a
    later one replaces the incumbent only if it beats it by more than
    ``conv_tol``, so more restarts never lower the value.

    ``method`` is ``"lbfgs"`` (quasi-Newton in the polar chart) or ``"pgd"``
    (projected gradient with a polar retraction). ``route`` picks the
    output whose entropies are averaged: ``"direct"`` uses ``Phi``,
    ``"complement"`` uses ``Phi_hat`` (same values on pure states) and
    ``"auto"`` takes whichever has the smaller output space.
    """
    cfg = cfg or OptimizerConfig()
    descend = _METHODS[method]
    rho = as_state(rho, channel.dim_in)
    lam, vecs = spectral_frame(rho)
    r = len(lam)
    m = max(cfg.ensemble_size or r * r, r)
    w = vecs * np.sqrt(lam)
    out_entropy = vn_entropy(apply(channel, rho))
    obj = _RoofObjective(_effective_kraus(channel, route), w)

    starts = [np.eye(m, r, dtype=complex)]
    for u0 in initial:
        u0 = _check_isometry(u0, r)
        if u0.shape[0] < m:
            u0 = np.vstack([u0, np.zeros((m - u0.shape[0], r))])
        starts.append(u0)
    n_runs = max(cfg.restarts, len(starts))

    best = None
    values = []
    any_converged = False
    for idx in range(n_runs):
        if idx < len(starts):
            u0 = starts[idx]
        else:
            u0 = haar_isometry(m, r, np.random.default_rng([cfg.seed, idx]))
        if r == 1:
            # a pure state has only itself as decomposition
            u, f, conv = u0, out_entropy, True
        else:
            u, f, conv, _ = descend(obj, u0, cfg.max_iters, cfg.conv_tol)
        any_converged |= conv
        # concavity makes the exact value nonnegative; clip rounding noise
        val = max(out_entropy - f, 0.0)
        values.append(val)
        if best is None or val > best[0] + cfg.conv_tol:
            best = (val, u, f)

    ordered = sorted(values, reverse=True)
    slack = cfg.conv_tol if len(ordered) < 2 else max(cfg.conv_tol, ordered[0] - ordered[1])
    val, u, f = best
    return CapacityResult(
        value=float(val),
        best_ensemble=_ensemble_from_vectors(obj.vectors(u)),
        converged=any_converged,
        restarts_used=n_runs,
        output_entropy=out_entropy,
        roof=float(f),
        slack=float(slack),
        restart_values=values,
        isometry=u,
    )


@dataclass
class GapResult:
    value: float
    state: np.ndarray
    mutual_information: float
    capacity: float
    evaluations: int


def _state_from_params(x: np.ndarray, d: int) -> np.ndarray:
    """``G G^dagger / Tr`` with ``G`` lower triangular (real diagonal)."""
    g = np.zeros((d, d), dtype=complex)
    il = np.tril_indices(d, -1)
    g[np.arange(d), np.arange(d)] = x[:d]
    n_off = len(il[0])
    g[il] = x[d : d + n_off] + 1j * x[d + n_off : d + 2 * n_off]
    rho = g @ g.conj().T
    tr = np.trace(rho).real
    if tr <= 1e-300:
        return np.eye(d, dtype=complex) / d
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def _transfer_isometry(vectors: np.ndarray, rho) -> np.ndarray | None:
    """Isometry for ``rho`` whose ensemble is closest to ``vectors``."""
    lam, vecs = spectral_frame(rho)
    w = vecs * np.sqrt(lam)
    m = len(lam) ** 2
    if vectors.shape[0] > m:
        return None
    u = vectors @ np.linalg.pinv(w.T)
    if u.shape[0] < m:
        u = np.vstack([u, np.zeros((m - u.shape[0], u.shape[1]))])
    if np.linalg.matrix_rank(u) < u.shape[1]:
        return None
    return polar_factor(u)


def maximize_gap(
    channel: QuantumChannel,
    cfg: OptimizerConfig | None = None,
    outer_restarts: int = 16,
    inner_iters: int = 300,
    maxfev: int | None = None,
) -> GapResult:
    """Nelder-Mead search for ``max_rho [I(Phi, rho) - C(Phi, rho)]``.

    States are ``G G^dagger / Tr G G^dagger`` with ``G`` lower triangular,
    ``d*d`` real parameters; outer start 0 is the maximally mixed state and
    the others are seeded from ``(cfg.seed, 10000 + k)``. Inside the search
    each capacity is a single quasi-Newton descent warm-started from the
    previous evaluation's ensemble (the spectral ensemble on the first
    call). The winning state is re-scored with a full
    :func:`constrained_holevo_capacity` run under ``cfg``, so the returned
    value is achieved by an explicit ensemble.
    """
    cfg = cfg or OptimizerConfig()
    d = channel.dim_in
    n = d * d
    maxfev = maxfev or 40 * n
    kraus = _effective_kraus(channel)
    evals = 0
    last = {"vectors": None}

    def neg_gap(x):
        nonlocal evals
        evals += 1
        rho = _state_from_params(x, d)
        lam, vecs = spectral_frame(rho)
        r = len(lam)
        obj = _RoofObjective(kraus, vecs * np.sqrt(lam))
        u0 = None
        if last["vectors"] is not None:
            u0 = _transfer_isometry(last["vectors"], rho)
        if u0 is None:
            u0 = np.eye(r * r, r, dtype=complex)
        if r == 1:
            u, f = u0, obj.value(u0)
        else:
            u, f, _, _ = _minimize_chart(obj, u0, inner_iters, cfg.conv_tol)
        last["vectors"] = obj.vectors(u)
        cap = vn_entropy(apply(channel, rho)) - f
        return cap - mutual_information(channel, rho)

    best_x, best_f = None, np.inf
    for k in range(outer_restarts):
        if k == 0:
            x0 = np.concatenate([np.ones(d), np.zeros(n - d)])
        else:
            x0 = np.random.default_rng([cfg.seed, 10_000 + k]).standard_normal(n)
        last["vectors"] = None
        res = minimize(
            neg_gap,
            x0,
            method="Nelder-Mead",
            options={"maxfev": maxfev, "xatol": 1e-4, "fatol": 1e-7},
        )
        if res.fun < best_f - cfg.conv_tol:
            best_x, best_f = res.x, res.fun
    rho = _state_from_params(best_x, d)
    mi = mutual_information(channel, rho)
    cap = constrained_holevo_capacity(channel, rho, cfg).value
    return GapResult(value=float(mi - cap), state=rho, mutual_information=mi, capacity=cap, evaluations=evals)


def gap_D(channel: QuantumChannel, cfg: OptimizerConfig | None = None, **kwargs) -> float:
    """Estimate of ``D(Phi) = max_rho [I(Phi, rho) - C(Phi, rho)]`` in bits."""
    return maximize_gap(channel, cfg, **kwargs).value
