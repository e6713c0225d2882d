"""Density operators, classical-quantum states, and seeded random generation.

A classical-quantum (CQ) state is stored as the pair (p(x), rho_E(x)); its
dense embedding is the block-diagonal operator with block x equal to
p(x) * rho_E(x).  Classical states (all conditional blocks diagonal) are
detected and flagged so downstream entropy code can take exact fast paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    ValidationError,
    DomainError,
    check_hermitian,
    max_abs,
    ptrace,
    tensor,
)

DENSITY_EIG_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
CLASSICAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Dense density matrix with declared tensor-factor dimensions."""

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = check_hermitian(self.mat, tol=1e-10, name="density operator")
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise ValidationError(f"factor dimensions must be positive, got {dims}")
        total = int(np.prod(dims))
        if mat.shape != (total, total):
            raise ValidationError(f"matrix shape {mat.shape} does not match dims {dims}")
        w = np.linalg.eigvalsh(mat)
        if np.min(w) < -DENSITY_EIG_TOL:
            raise ValidationError(f"density operator not PSD: min eigenvalue {np.min(w):.3e}")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > DENSITY_TRACE_TOL:
            raise ValidationError(f"density operator trace {tr} differs from 1")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def tensor(self, other: "DensityOperator") -> "DensityOperator":
        return DensityOperator(tensor(self.mat, other.mat), self.dims + other.dims)


@dataclass(frozen=True, eq=False)
class CQState:
    """Classical-quantum state as (p(x), rho_E(x)) blocks."""

    probs: np.ndarray
    cond: tuple
    is_classical: bool = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ValidationError("probs must be a non-empty vector")
        if np.min(p) < -1e-12:
            raise ValidationError(f"negative probability {np.min(p)}")
        if abs(float(np.sum(p)) - 1.0) > 1e-10:
            raise ValidationError(f"probabilities sum to {np.sum(p)}, expected 1")
        cond = tuple(self.cond)
        if len(cond) != p.size:
            raise ValidationError("one conditional state per classical symbol required")
        d = cond[0].d
        for c in cond:
            if not isinstance(c, DensityOperator) or c.d != d:
                raise ValidationError("conditional states must be DensityOperators of equal dimension")
        classical = all(max_abs(c.mat - np.diag(np.diag(c.mat))) <= CLASSICAL_TOL for c in cond)
        object.__setattr__(self, "probs", np.clip(p, 0.0, None))
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "is_classical", classical)

    @property
    def x_dim(self) -> int:
        return self.probs.size

    @property
    def e_dim(self) -> int:
        return self.cond[0].d

    def joint_diagonal(self) -> np.ndarray:
        """For classical states: the joint distribution p(x, e) as a matrix."""
        if not self.is_classical:
            raise DomainError("joint_diagonal is only defined for classical states")
        return np.stack([p * np.diag(c.mat).real for p, c in zip(self.probs, self.cond)])


def embed(cq: CQState) -> DensityOperator:
    """Dense block-diagonal density operator on X x E; block x is p(x) rho_E(x)."""
    dx, de = cq.x_dim, cq.e_dim
    mat = np.zeros((dx * de, dx * de), dtype=complex)
    for x, (p, c) in enumerate(zip(cq.probs, cq.cond)):
        mat[x * de : (x + 1) * de, x * de : (x + 1) * de] = p * c.mat
    return DensityOperator(mat, (dx, de))


def marginal_e(cq: CQState) -> DensityOperator:
    mat = sum(p * c.mat for p, c in zip(cq.probs, cq.cond))
    return DensityOperator(mat, (cq.e_dim,))


def marginal_x(cq: CQState) -> np.ndarray:
    return cq.probs.copy()


def depolarize(rho: DensityOperator, eps: float) -> DensityOperator:
    """(1 - eps) rho + eps I/d for eps in (0, 1]."""
    if not (0.0 < eps <= 1.0):
        raise DomainError(f"depolarizing strength must lie in (0, 1], got {eps}")
    d = rho.d
    return DensityOperator((1.0 - eps) * rho.mat + eps * np.eye(d) / d, rho.dims)


def purify(rho: DensityOperator) -> DensityOperator:
    """Rank-1 extension on (original factors) x C with d_C equal to the total dimension.

    Eigenvalues are taken in descending order, so a pure input purifies to
    itself tensored with the fixed reference vector |0> on C.
    """
    d = rho.d
    w, u = np.linalg.eigh(rho.mat)
    order = np.argsort(w)[::-1]
    w, u = np.clip(w[order], 0.0, None), u[:, order]
    psi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        if w[i] <= 0.0:
            continue
        psi += np.sqrt(w[i]) * np.kron(u[:, i], _basis_vec(d, i))
    psi /= np.linalg.norm(psi)
    return DensityOperator(np.outer(psi, psi.conj()), rho.dims + (d,))


def _basis_vec(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def random_density(seed: int, d: int, dims: tuple[int, ...] | None = None) -> DensityOperator:
    """Ginibre-induced random state: G G^dag / Tr, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return DensityOperator(mat, dims if dims is not None else (d,))


def random_cq(seed: int, x_dim: int, e_dim: int) -> CQState:
    """Random CQ state: Dirichlet(1,...,1) weights with Ginibre conditional states."""
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(x_dim))
    cond = tuple(random_density(int(rng.integers(2**63)), e_dim) for _ in range(x_dim))
    return CQState(probs, cond)


def random_classical_cq(seed: int, x_dim: int, e_dim: int) -> CQState:
    """Random classical state: a Dirichlet joint distribution stored as a CQ state."""
    rng = np.random.default_rng(seed)
    joint = rng.dirichlet(np.ones(x_dim * e_dim)).reshape(x_dim, e_dim)
    return cq_from_joint(joint)


def cq_from_joint(joint: np.ndarray) -> CQState:
    """Classical CQ state from a joint distribution p(x, e) >= 0 summing to 1."""
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2:
        raise ValidationError("joint distribution must be a 2-d array")
    if np.min(joint) < -1e-12:
        raise ValidationError("joint distribution has negative entries")
    probs = joint.sum(axis=1)
    cond = []
    e_dim = joint.shape[1]
    for x in range(joint.shape[0]):
        if probs[x] > 0:
            cond.append(DensityOperator(np.diag(joint[x] / probs[x]).astype(complex), (e_dim,)))
        else:
            cond.append(DensityOperator(np.eye(e_dim, dtype=complex) / e_dim, (e_dim,)))
    return CQState(probs, tuple(cond))


def cq_power(cq: CQState, n: int) -> CQState:
    """n-fold tensor power as a CQ state on (X^n, E^n), symbols in lexicographic order."""
    if n < 1:
        raise DomainError("tensor power needs n >= 1")
    probs = cq.probs
    cond = [c.mat for c in cq.cond]
    out_p = probs
    out_c = cond
    for _ in range(n - 1):
        out_p = np.outer(out_p, probs).reshape(-1)
        out_c = [tensor(a, b) for a in out_c for b in cond]
    de = cq.e_dim**n
    return CQState(out_p, tuple(DensityOperator(m, (de,)) for m in out_c))


def uniform_cq(x_dim: int, sigma: DensityOperator) -> CQState:
    """Product state pi_X (x) sigma_E with uniform classical marginal."""
    probs = np.full(x_dim, 1.0 / x_dim)
    return CQState(probs, tuple(sigma for _ in range(x_dim)))
