"""Support-aware dense Hermitian linear algebra.

All operators are small dense complex matrices (dimension <= 64 in practice),
so eigendecomposition is the workhorse everywhere: matrix functions, Schatten
norms, support projectors and pinching maps are all spectral constructions.

Numerical rank ("support") detection uses a single global threshold so that
every formula built on generalized inverses and support-restricted logarithms
agrees on what counts as a zero eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Hermiticity defect allowed on inputs, max-norm.
HERMITICITY_TOL = 1e-12
# Eigenvalue lam counts as zero iff lam <= max(SUPPORT_ABS_TOL, SUPPORT_REL_TOL * lam_max).
SUPPORT_ABS_TOL = 1e-12
SUPPORT_REL_TOL = 1e-10
# Relative gap below which eigenvalues are merged into one spectral cluster.
CLUSTER_REL_TOL = 1e-8


class ValidationError(ValueError):
    """Malformed input: wrong shape, not Hermitian, bad normalization."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedSizeError(ValueError):
    """Problem size beyond the supported desk-scale limits."""


def max_abs(a: np.ndarray) -> float:
    """Entrywise max norm."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def check_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL, name: str = "operator") -> np.ndarray:
    """Validate Hermiticity of a square matrix and return its Hermitian part.

    Raises ValidationError if the defect ||A - A^dag||_max exceeds ``tol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {a.shape}")
    defect = max_abs(a - a.conj().T)
    if defect > tol:
        raise ValidationError(f"{name} is not Hermitian: defect {defect:.3e} > {tol:.1e}")
    return (a + a.conj().T) / 2.0


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u, w = self.eigenvectors, self.eigenvalues
        return (u * w) @ u.conj().T


@dataclass(frozen=True)
class SpectralProjectors:
    """Clustered spectral projectors: pairwise orthogonal, summing to I.

    ``distinct_values`` holds one representative eigenvalue per cluster;
    ``len(distinct_values)`` is the spectral cardinality |spec(.)| that enters
    the pinching bound.
    """

    distinct_values: np.ndarray
    projectors: list
    cluster_tol: float

    @property
    def n_clusters(self) -> int:
        return len(self.projectors)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]


def eigh_cluster(a: np.ndarray, cluster_tol: float = CLUSTER_REL_TOL) -> tuple[SpectralDecomposition, SpectralProjectors]:
    """Eigendecompose a Hermitian matrix and merge near-degenerate eigenvalues.

    Consecutive eigenvalues whose gap is at most ``cluster_tol`` times the
    spectral scale max(1, max|eig|) are merged into a single projector, so the
    exactly-degenerate spectra produced by tensor powers collapse to few
    clusters despite rounding noise.
    """
    a = check_hermitian(a)
    w, u = np.linalg.eigh(a)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    gap = cluster_tol * scale

    clusters: list[list[int]] = []
    for i in range(len(w)):
        if clusters and w[i] - w[clusters[-1][-1]] <= gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    values = np.array([float(np.mean(w[idx])) for idx in clusters])
    projectors = []
    for idx in clusters:
        cols = u[:, idx]
        projectors.append(cols @ cols.conj().T)
    return (
        SpectralDecomposition(eigenvalues=w, eigenvectors=u),
        SpectralProjectors(distinct_values=values, projectors=projectors, cluster_tol=cluster_tol),
    )


def support_threshold(eigenvalues: np.ndarray, abs_tol: float = SUPPORT_ABS_TOL, rel_tol: float = SUPPORT_REL_TOL) -> float:
    lam_max = float(np.max(eigenvalues)) if eigenvalues.size else 0.0
    return max(abs_tol, rel_tol * lam_max)


def matrix_function(
    a: np.ndarray,
    func: str,
    power: float | None = None,
    mode: str = "on_support",
    abs_tol: float = SUPPORT_ABS_TOL,
    rel_tol: float = SUPPORT_REL_TOL,
) -> np.ndarray:
    """Apply ``func`` in {"power", "log", "exp"} to the eigenvalues of A.

    In ``on_support`` mode eigenvalues at or below the support threshold are
    treated as exact zeros and mapped to zero, which realizes generalized
    inverses (negative powers on the support) and support-restricted
    logarithms.  ``exp`` always acts on the full spectrum.
    """
    a = check_hermitian(a)
    w, u = np.linalg.eigh(a)

    if func == "exp":
        if mode != "full":
            raise ValidationError("exp uses full mode")
        return (u * np.exp(w)) @ u.conj().T

    if mode not in ("full", "on_support"):
        raise ValidationError(f"unknown mode {mode!r}")

    needs_psd = func == "log" or func == "power"
    if needs_psd and np.min(w) < -1e-10:
        raise DomainError(f"matrix is not PSD: min eigenvalue {np.min(w):.3e}")

    if func == "power":
        if power is None:
            raise ValidationError("power requires the exponent")
        if (power < 0) and mode != "on_support":
            raise DomainError("negative powers require on_support mode")
    elif func == "log":
        if mode != "on_support":
            raise DomainError("log requires on_support mode")
    else:
        raise ValidationError(f"unknown function {func!r}")

    w = np.clip(w, 0.0, None)
    thr = support_threshold(w, abs_tol, rel_tol)
    out = np.zeros_like(w)
    nz = w > thr
    if func == "power":
        if mode == "full" and power >= 0:
            out = np.power(w, power)
            if power == 0:  # keep 0^0 = 1 only in full mode
                out = np.ones_like(w)
        else:
            out[nz] = np.power(w[nz], power)
    else:  # log
        out[nz] = np.log(w[nz])
    return (u * out) @ u.conj().T


def schatten_norm(a: np.ndarray, p: float) -> float:
    """Schatten p-norm (sum sigma_i^p)^(1/p); p=1 trace norm, p=inf operator norm."""
    a = np.asarray(a, dtype=complex)
    if not (p >= 1.0):
        raise DomainError(f"Schatten norm needs p >= 1, got {p}")
    sv = np.linalg.svd(a, compute_uv=False)
    if np.isinf(p):
        return float(np.max(sv)) if sv.size else 0.0
    return float(np.sum(sv**p) ** (1.0 / p))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def ptrace(a: np.ndarray, dims: tuple[int, ...], trace_out: tuple[int, ...]) -> np.ndarray:
    """Partial trace over the factors listed in ``trace_out`` (0-based)."""
    a = np.asarray(a, dtype=complex)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise ValidationError(f"matrix shape {a.shape} does not factor as {dims}")
    trace_out = tuple(sorted(set(trace_out)))
    if any(k < 0 or k >= n for k in trace_out):
        raise ValidationError(f"invalid factor indices {trace_out} for {n} factors")
    t = a.reshape(dims + dims)
    for k in reversed(trace_out):
        t = np.trace(t, axis1=k, axis2=k + (t.ndim // 2))
    keep = [d for i, d in enumerate(dims) if i not in trace_out]
    dk = int(np.prod(keep)) if keep else 1
    return t.reshape(dk, dk)


def partial_trace(a: np.ndarray, dims: tuple[int, int], side: str) -> np.ndarray:
    """Trace out the named factor of a bipartite operator; side in {"A", "B"}."""
    if len(dims) != 2:
        raise ValidationError("partial_trace expects a bipartition (d_A, d_B)")
    if side not in ("A", "B"):
        raise ValidationError(f"side must be 'A' or 'B', got {side!r}")
    return ptrace(a, dims, (0,) if side == "A" else (1,))


def pinch(a: np.ndarray, omega: SpectralProjectors) -> np.ndarray:
    """Pinching map sum_i P_i A P_i over the clustered projectors of omega."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (omega.dim, omega.dim):
        raise ValidationError(f"dimension mismatch: operator {a.shape} vs projectors {omega.dim}")
    out = np.zeros_like(a)
    for proj in omega.projectors:
        out += proj @ a @ proj
    return out


def support_projector(a: np.ndarray, abs_tol: float = SUPPORT_ABS_TOL, rel_tol: float = SUPPORT_REL_TOL) -> np.ndarray:
    """Projector onto the eigenspaces of a PSD operator above the support threshold."""
    a = check_hermitian(a)
    w, u = np.linalg.eigh(a)
    if w.size and np.min(w) < -1e-8:
        raise ValidationError(f"support_projector expects PSD input, min eigenvalue {np.min(w):.3e}")
    thr = support_threshold(np.clip(w, 0.0, None), abs_tol, rel_tol)
    cols = u[:, w > thr]
    return cols @ cols.conj().T


def intersection_projector(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Projector onto range(P) ∩ range(Q), computed as I - supp(P_perp + Q_perp)."""
    p = check_hermitian(p, tol=1e-10, name="P")
    q = check_hermitian(q, tol=1e-10, name="Q")
    d = p.shape[0]
    if q.shape[0] != d:
        raise ValidationError("projector dimensions differ")
    eye = np.eye(d)
    for name, r in (("P", p), ("Q", q)):
        if max_abs(r @ r - r) > 1e-8:
            raise ValidationError(f"{name} is not idempotent")
    comp = (eye - p) + (eye - q)
    return eye - support_projector(comp, abs_tol=1e-10, rel_tol=1e-10)


def spectral_cardinality(a: np.ndarray, cluster_tol: float = CLUSTER_REL_TOL) -> int:
    """|spec(A)| after clustering, as used in the pinching bound."""
    _, proj = eigh_cluster(a, cluster_tol)
    return proj.n_clusters
