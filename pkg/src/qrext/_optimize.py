"""Shared optimization helpers for minimizations over density operators.

States are parametrized as sigma(theta) = exp(H(theta)) / Tr exp(H(theta))
with H an arbitrary Hermitian matrix (d^2 real parameters), which keeps every
iterate full rank so support constraints are automatically satisfied.  The
generic driver runs a derivative-free simplex stage from each start and then
polishes the best point with a quasi-Newton step; the polish is what reaches
the 1e-8-and-below accuracy the cross-check contracts need without blowing
the evaluation budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as sp_optimize


@dataclass(frozen=True)
class OptimizerOptions:
    """Budget and tolerance knobs for state-space minimizations."""

    f_tol: float = 1e-10
    x_tol: float = 1e-8
    max_evals: int = 20000
    simplex_evals: int = 600  # per-start budget of the simplex stage
    polish: bool = True
    seed: int = 7
    cross_check: bool = False
    force_matrix: bool = False
    extra_starts: tuple = field(default_factory=tuple)


def n_params(d: int) -> int:
    return d * d


def pack_hermitian(h: np.ndarray) -> np.ndarray:
    """Flatten a Hermitian matrix into d^2 real parameters."""
    d = h.shape[0]
    theta = np.empty(d * d)
    theta[:d] = np.diag(h).real
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            theta[k] = h[i, j].real
            theta[k + 1] = h[i, j].imag
            k += 2
    return theta


def unpack_hermitian(theta: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = theta[:d]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            h[i, j] = theta[k] + 1j * theta[k + 1]
            h[j, i] = theta[k] - 1j * theta[k + 1]
            k += 2
    return h


def density_from_params(theta: np.ndarray, d: int) -> np.ndarray:
    h = unpack_hermitian(theta, d)
    w, u = np.linalg.eigh(h)
    ew = np.exp(w - np.max(w))
    m = (u * ew) @ u.conj().T
    return m / np.trace(m).real


def params_from_density(sigma: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    w, u = np.linalg.eigh((sigma + sigma.conj().T) / 2.0)
    w = np.clip(w, floor, None)
    h = (u * np.log(w)) @ u.conj().T
    return pack_hermitian(h)


@dataclass
class MinimizeResult:
    sigma: np.ndarray
    value: float
    evaluations: int
    converged: bool


def minimize_over_densities(
    objective,
    d: int,
    starts,
    options: OptimizerOptions | None = None,
) -> MinimizeResult:
    """Minimize a scalar function of a density matrix on C^d.

    ``objective`` maps a density matrix (ndarray) to a float.  ``starts`` is a
    sequence of density matrices used for the multistart simplex stage.
    """
    opts = options or OptimizerOptions()
    evals = 0

    def f(theta: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        return objective(density_from_params(theta, d))

    best_theta = None
    best_val = np.inf
    any_success = False
    start_params = [params_from_density(np.asarray(s, dtype=complex)) for s in starts]

    for theta0 in start_params:
        if evals >= opts.max_evals:
            break
        budget = min(opts.simplex_evals, opts.max_evals - evals)
        if budget <= 0:
            break
        res = sp_optimize.minimize(
            f,
            theta0,
            method="Nelder-Mead",
            options={"maxfev": budget, "fatol": opts.f_tol, "xatol": opts.x_tol},
        )
        if res.fun < best_val:
            best_val, best_theta = res.fun, res.x
            any_success = bool(res.success) or any_success

    if best_theta is None:
        best_theta = start_params[0]
        best_val = f(best_theta)

    if opts.polish and evals < opts.max_evals:
        res = sp_optimize.minimize(
            f,
            best_theta,
            method="L-BFGS-B",
            options={"maxfun": opts.max_evals - evals, "ftol": 1e-14, "gtol": 1e-11},
        )
        if res.fun <= best_val:
            best_val, best_theta = res.fun, res.x
            any_success = bool(res.success) or any_success

    return MinimizeResult(
        sigma=density_from_params(best_theta, d),
        value=float(best_val),
        evaluations=evals,
        converged=any_success,
    )


def default_starts(rho_marginal: np.ndarray, d: int, seed: int, extra=()) -> list[np.ndarray]:
    """Multistart policy: the actual marginal, maximally mixed, one seeded random."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rand = g @ g.conj().T
    rand /= np.trace(rand).real
    starts = [np.asarray(rho_marginal, dtype=complex), np.eye(d, dtype=complex) / d, rand]
    starts.extend(np.asarray(s, dtype=complex) for s in extra)
    return starts


@dataclass
class EGResult:
    tau: np.ndarray
    value: float
    iterations: int
    converged: bool


def exp_gradient_minimize(
    objective,
    gradient,
    tau0: np.ndarray,
    max_iter: int = 2000,
    tol: float = 1e-12,
    initial_step: float = 1.0,
) -> EGResult:
    """Exponentiated-gradient descent on density matrices with backtracking.

    Update: tau <- normalize(exp(log tau - eta * grad)).  The step is halved
    until the objective decreases, and gently re-expanded after accepted steps.
    Suitable for convex objectives; iterates stay full rank on the working
    subspace.
    """
    tau = np.asarray(tau0, dtype=complex)
    cur = objective(tau)
    step = initial_step
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        g = gradient(tau)
        g = (g + g.conj().T) / 2.0
        log_tau = _safe_log(tau)
        improved = False
        for _ in range(40):
            cand = _normalized_exp(log_tau - step * g)
            val = objective(cand)
            if val < cur - 1e-16:
                improved = True
                break
            step *= 0.5
            if step < 1e-14:
                break
        if not improved:
            converged = True
            break
        gain = cur - val
        tau, cur = cand, val
        step = min(step * 1.6, 16.0)
        if gain <= tol * max(1.0, abs(cur)):
            converged = True
            break
    return EGResult(tau=tau, value=cur, iterations=it, converged=converged)


def _safe_log(m: np.ndarray, floor: float = 1e-300) -> np.ndarray:
    w, u = np.linalg.eigh((m + m.conj().T) / 2.0)
    w = np.clip(w, floor, None)
    return (u * np.log(w)) @ u.conj().T


def _normalized_exp(h: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh((h + h.conj().T) / 2.0)
    ew = np.exp(w - np.max(w))
    m = (u * ew) @ u.conj().T
    return m / np.trace(m).real
