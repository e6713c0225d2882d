"""Fidelity, purified distance, and the quantum Renyi divergence family.

Supported families: Umegaki, sandwiched, Petz, alpha-z, and Log-Euclidean.
All values are returned in nats; presentation-layer code converts to bits.
Support conventions: negative operator powers and logarithms act on supports
(generalized inverses), and the divergence is +inf whenever the required
support inclusion fails.  The second argument may be any PSD operator, not
just a state, which is how conditional entropies pass I_A (x) sigma_E.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DomainError,
    ValidationError,
    check_hermitian,
    intersection_projector,
    matrix_function,
    support_projector,
)

INF = math.inf

_RENYI_FAMILIES = ("umegaki", "sandwiched", "petz", "alpha_z", "log_euclidean")


@dataclass(frozen=True)
class DivergenceParams:
    """Selects a divergence family and its order parameters."""

    family: str
    alpha: float | None = None
    z: float | None = None

    def __post_init__(self):
        if self.family not in _RENYI_FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        if self.family == "umegaki":
            return
        if self.alpha is None or self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.family != "log_euclidean" and abs(self.alpha - 1.0) < 1e-15:
            raise DomainError("alpha = 1 is the Umegaki point; use the umegaki family")
        if self.family == "alpha_z":
            if self.z is None or self.z <= 0:
                raise DomainError(f"alpha_z requires z > 0, got {self.z}")
        if self.family == "log_euclidean" and not (0 < self.alpha < 1):
            raise DomainError("log_euclidean is defined for alpha in (0, 1)")


def _mat(x) -> np.ndarray:
    m = x.mat if hasattr(x, "mat") else x
    return check_hermitian(m, tol=1e-10)


def support_contained(rho: np.ndarray, sigma: np.ndarray, tol: float = 1e-10) -> bool:
    """Whether supp(rho) is contained in supp(sigma), both PSD."""
    s = support_projector(sigma)
    leak = float(np.trace(rho - s @ rho @ s).real)
    return abs(leak) <= tol * max(1.0, float(np.trace(rho).real))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F = (Tr[(rho^1/2 sigma rho^1/2)^1/2])^2."""
    r, s = _mat(rho), _mat(sigma)
    if r.shape != s.shape:
        raise ValidationError("fidelity requires equal dimensions")
    root = matrix_function(r, "power", power=0.5)
    w = np.clip(np.linalg.eigvalsh(root @ s @ root), 0.0, None)
    f = float(np.sum(np.sqrt(w)) ** 2)
    return min(max(f, 0.0), 1.0)


def purified_distance(rho, sigma) -> float:
    return math.sqrt(max(0.0, 1.0 - fidelity(rho, sigma)))


def umegaki(rho, sigma) -> float:
    """Relative entropy Tr[rho(log rho - log sigma)]; +inf on support violation."""
    r, s = _mat(rho), _mat(sigma)
    if not support_contained(r, s):
        return INF
    log_r = matrix_function(r, "log")
    log_s = matrix_function(s, "log")
    return float(np.trace(r @ (log_r - log_s)).real)


def _trace_power_sum(m: np.ndarray, expo: float) -> float:
    w = np.clip(np.linalg.eigvalsh(m), 0.0, None)
    nz = w > 0.0
    return float(np.sum(w[nz] ** expo))


def renyi_divergence(rho, sigma, params: DivergenceParams) -> float:
    """Evaluate the selected divergence family; +inf on support violations."""
    r, s = _mat(rho), _mat(sigma)
    if r.shape != s.shape:
        raise ValidationError("divergence requires equal dimensions")
    fam = params.family
    if fam == "umegaki":
        return umegaki(r, s)
    if fam == "log_euclidean":
        return log_euclidean(r, s, params.alpha)

    alpha = params.alpha
    if fam == "sandwiched":
        a_exp, z = (1.0 - alpha) / (2.0 * alpha), alpha
        inner = lambda: _conjugated(r, s, a_exp)  # noqa: E731
    elif fam == "petz":
        # Tr[rho^alpha sigma^(1-alpha)] without an outer power
        if alpha > 1 and not support_contained(r, s):
            return INF
        ra = matrix_function(r, "power", power=alpha)
        sb = matrix_function(s, "power", power=1.0 - alpha)
        q = float(np.trace(ra @ sb).real)
        return _finish(q, alpha)
    else:  # alpha_z
        z = params.z
        a_exp, b_exp = alpha / (2.0 * z), (1.0 - alpha) / z
        if alpha > 1 and not support_contained(r, s):
            return INF
        ra = matrix_function(r, "power", power=a_exp)
        sb = matrix_function(s, "power", power=b_exp)
        q = _trace_power_sum(ra @ sb @ ra, z)
        return _finish(q, alpha)

    if alpha > 1 and not support_contained(r, s):
        return INF
    q = _trace_power_sum(inner(), z)
    return _finish(q, alpha)


def _conjugated(r: np.ndarray, s: np.ndarray, expo: float) -> np.ndarray:
    sp = matrix_function(s, "power", power=expo)
    return sp @ r @ sp


def _finish(q: float, alpha: float) -> float:
    if q <= 0.0:
        return INF if alpha < 1 else -INF
    return math.log(q) / (alpha - 1.0)


def log_euclidean(rho, sigma, alpha: float) -> float:
    """Log-Euclidean divergence with the intersection-of-supports projector."""
    if not (0 < alpha < 1):
        raise DomainError(f"log_euclidean needs alpha in (0, 1), got {alpha}")
    r, s = _mat(rho), _mat(sigma)
    p = intersection_projector(support_projector(r), support_projector(s))
    rank = int(round(np.trace(p).real))
    if rank == 0:
        return INF
    w, u = np.linalg.eigh(p)
    basis = u[:, w > 0.5]
    k = alpha * matrix_function(r, "log") + (1.0 - alpha) * matrix_function(s, "log")
    kc = basis.conj().T @ k @ basis
    q = _trace_power_sum_exp(kc)
    return math.log(q) / (alpha - 1.0)


def _trace_power_sum_exp(h: np.ndarray) -> float:
    w = np.linalg.eigvalsh((h + h.conj().T) / 2.0)
    return float(np.sum(np.exp(w)))


@dataclass(frozen=True)
class VariationalResult:
    """Outcome of an iterative variational evaluation."""

    value: float
    optimizer: np.ndarray
    iterations: int
    converged: bool


def log_euclidean_variational(
    rho,
    sigma,
    alpha: float,
    damping: float = 0.5,
    max_iter: int = 10000,
    tol: float = 1e-12,
) -> VariationalResult:
    """Evaluate the Log-Euclidean divergence through its variational form.

    Minimizes {alpha D(tau||rho) + (1-alpha) D(tau||sigma)} / (1-alpha) over
    states tau by a damped fixed-point iteration on log tau, restricted to the
    intersection of the supports.  The value is assembled from the two Umegaki
    terms at the converged tau, which is an arithmetic path independent of the
    direct exp-trace formula.
    """
    if not (0 < alpha < 1):
        raise DomainError(f"log_euclidean_variational needs alpha in (0, 1), got {alpha}")
    r, s = _mat(rho), _mat(sigma)
    p = intersection_projector(support_projector(r), support_projector(s))
    w, u = np.linalg.eigh(p)
    basis = u[:, w > 0.5]
    k = basis.shape[1]
    if k == 0:
        return VariationalResult(value=INF, optimizer=np.zeros_like(r), iterations=0, converged=True)

    target = basis.conj().T @ (alpha * matrix_function(r, "log") + (1.0 - alpha) * matrix_function(s, "log")) @ basis
    target = (target + target.conj().T) / 2.0

    def objective(tau_c: np.ndarray) -> float:
        tau_full = basis @ tau_c @ basis.conj().T
        return (alpha * umegaki(tau_full, r) + (1.0 - alpha) * umegaki(tau_full, s)) / (1.0 - alpha)

    log_tau = np.zeros((k, k), dtype=complex)  # start from the maximally mixed state on P
    tau_c = np.eye(k, dtype=complex) / k
    prev = objective(tau_c)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        log_tau = (1.0 - damping) * log_tau + damping * target
        tau_c = _normalized_exp(log_tau)
        cur = objective(tau_c)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            converged = True
            prev = cur
            break
        prev = cur
    return VariationalResult(
        value=prev,
        optimizer=basis @ tau_c @ basis.conj().T,
        iterations=iterations,
        converged=converged,
    )


def _normalized_exp(h: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh((h + h.conj().T) / 2.0)
    ew = np.exp(w - np.max(w))
    m = (u * ew) @ u.conj().T
    return m / np.trace(m).real
