"""Conditional entropies: von Neumann, sandwiched/Petz arrow variants, the
club-sandwiched family with its inner minimization over side-information
states, and the Log-Euclidean (LE) conditional entropy with variational and
duality cross-checks.

Conventions
-----------
* All values are in nats.
* ``lam`` (the tilting weight on the auxiliary state) is <= 0 for the club
  and LE families; ``lam = None`` selects the data-processing boundary
  (1 - 2*alpha) / (1 - alpha).
* The minimization over sigma parametrizes sigma = exp(H)/Tr exp(H), which is
  always full rank, so the support condition on the auxiliary state holds
  automatically and the infimum agrees with the support-convention value.
* Dual bounds: any feasible sigma gives an upper bound on a min-over-sigma
  entropy, while any feasible tau in a variational form gives a lower bound.
  Agreement of the two paths certifies convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _optimize
from ._optimize import OptimizerOptions
from .divergences import DivergenceParams, renyi_divergence
from .linalg import (
    DomainError,
    ValidationError,
    matrix_function,
    max_abs,
    ptrace,
    support_projector,
    tensor,
)
from .states import CQState, DensityOperator, embed, marginal_e

INF = math.inf

_KINDS = ("vn", "sandwiched_down", "sandwiched_up", "petz_down", "petz_up", "club", "le")


def default_lambda(alpha: float) -> float:
    """Data-processing boundary value of the tilting weight."""
    return (1.0 - 2.0 * alpha) / (1.0 - alpha)


@dataclass(frozen=True)
class EntropyQuery:
    """Selects which conditional entropy to evaluate."""

    kind: str
    alpha: float | None = None
    lam: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown entropy kind {self.kind!r}")
        if self.kind == "vn":
            return
        if self.alpha is None or self.alpha <= 0:
            raise DomainError("Renyi conditional entropies need alpha > 0")
        if self.kind in ("club", "le"):
            if not (0 < self.alpha <= 1):
                raise DomainError(f"{self.kind} requires alpha in (0, 1], got {self.alpha}")
            lam = self.lam
            if lam is not None and lam > 1e-12:
                raise DomainError(f"{self.kind} requires lam <= 0, got {lam}")

    def resolved_lambda(self) -> float:
        if self.lam is not None:
            return self.lam
        if abs(self.alpha - 1.0) < 1e-15:
            return 0.0
        return default_lambda(self.alpha)


@dataclass(frozen=True)
class OptimizerReport:
    """Value of an optimized entropy together with solver diagnostics."""

    value: float
    optimizer: np.ndarray | None
    iterations: int
    converged: bool
    cross_check_gap: float | None = None


def _report(value, optimizer=None, iterations=0, converged=True, gap=None) -> OptimizerReport:
    return OptimizerReport(
        value=float(value),
        optimizer=optimizer,
        iterations=int(iterations),
        converged=bool(converged),
        cross_check_gap=gap,
    )


# ---------------------------------------------------------------------------
# von Neumann
# ---------------------------------------------------------------------------


def von_neumann_entropy(mat: np.ndarray) -> float:
    w = np.clip(np.linalg.eigvalsh(np.asarray(mat)), 0.0, None)
    nz = w[w > 1e-15]
    return float(-np.sum(nz * np.log(nz)))


def vn_cond_entropy(state) -> float:
    """H(A|E) = H(AE) - H(E)."""
    if isinstance(state, CQState):
        h_joint = von_neumann_entropy(np.diag(state.probs)) + sum(
            p * von_neumann_entropy(c.mat) for p, c in zip(state.probs, state.cond)
        )
        return h_joint - von_neumann_entropy(marginal_e(state).mat)
    rho = _as_bipartite(state)
    d_a, d_e = rho.dims
    return von_neumann_entropy(rho.mat) - von_neumann_entropy(ptrace(rho.mat, rho.dims, (0,)))


def _as_bipartite(state) -> DensityOperator:
    if isinstance(state, CQState):
        return embed(state)
    if not isinstance(state, DensityOperator):
        raise ValidationError("expected a CQState or DensityOperator")
    if len(state.dims) != 2:
        raise ValidationError(f"bipartite state required, got dims {state.dims}")
    return state


# ---------------------------------------------------------------------------
# club-sandwiched family
# ---------------------------------------------------------------------------


class _ClubEngine:
    """Evaluates Q(sigma) = Tr[(rho^1/2 (I (x) K(sigma)) rho^1/2)^alpha] with
    K = rho_E^c sigma^s rho_E^c, c = (1-lam)(1-alpha)/(2 alpha) and
    s = lam (1-alpha)/alpha.

    For states that are classical on X the trace splits into blocks
    Q = sum_x p(x)^alpha Tr[(B_x^1/2 (I_B (x) K) B_x^1/2)^alpha], which is what
    this engine exploits; ``blocks`` may live on B (x) E with d_B >= 1.
    """

    def __init__(self, probs, blocks, rho_e, alpha, lam, d_b=1):
        self.alpha = float(alpha)
        self.lam = float(lam)
        self.d_b = int(d_b)
        self.p_alpha = np.asarray(probs, dtype=float) ** self.alpha
        self.rho_e = np.asarray(rho_e, dtype=complex)
        self.d_e = self.rho_e.shape[0]
        self.roots = [matrix_function(b, "power", power=0.5) for b in blocks]
        c_exp = (1.0 - self.lam) * (1.0 - self.alpha) / (2.0 * self.alpha)
        self.rho_e_c = matrix_function(self.rho_e, "power", power=c_exp)
        self.s_exp = self.lam * (1.0 - self.alpha) / self.alpha

    def kernel(self, sigma: np.ndarray) -> np.ndarray:
        if self.lam == 0.0:
            c2 = matrix_function(self.rho_e, "power", power=(1.0 - self.alpha) / self.alpha)
            return c2
        sig_s = matrix_function(sigma, "power", power=self.s_exp)
        return self.rho_e_c @ sig_s @ self.rho_e_c

    def objective(self, sigma: np.ndarray | None) -> float:
        k = self.kernel(sigma if sigma is not None else self.rho_e)
        if self.d_b > 1:
            k = tensor(np.eye(self.d_b), k)
        total = 0.0
        for pa, root in zip(self.p_alpha, self.roots):
            if pa == 0.0:
                continue
            w = np.clip(np.linalg.eigvalsh(root @ k @ root), 0.0, None)
            total += pa * float(np.sum(w[w > 0.0] ** self.alpha))
        return total

    def entropy(self, sigma: np.ndarray | None) -> float:
        q = self.objective(sigma)
        if q <= 0.0:
            return INF
        return math.log(q) / (1.0 - self.alpha)

    def support_ok(self, sigma: np.ndarray) -> bool:
        s = support_projector(np.asarray(sigma, dtype=complex))
        leak = float(np.trace(self.rho_e - s @ self.rho_e @ s).real)
        return abs(leak) <= 1e-10


def _club_engine(state, alpha, lam, d_b=1) -> _ClubEngine:
    if isinstance(state, CQState):
        blocks = [c.mat for c in state.cond]
        if d_b > 1:
            if state.e_dim % d_b != 0:
                raise ValidationError("conditional dimension does not factor as d_B * d_E")
            d_e = state.e_dim // d_b
            rho_e = sum(p * ptrace(b, (d_b, d_e), (0,)) for p, b in zip(state.probs, blocks))
            return _ClubEngine(state.probs, blocks, rho_e, alpha, lam, d_b=d_b)
        return _ClubEngine(state.probs, blocks, marginal_e(state).mat, alpha, lam)
    rho = _as_bipartite(state)
    d_a, d_e = rho.dims
    rho_e = ptrace(rho.mat, rho.dims, (0,))
    return _ClubEngine([1.0], [rho.mat], rho_e, alpha, lam, d_b=d_a)


def club_objective(state, sigma_e, alpha: float, lam: float | None = None) -> float:
    """Trace objective of the club-sandwiched entropy at a given sigma_E.

    Returns +inf when the support of the state leaks outside supp(I (x) sigma),
    matching the limit of the objective along depolarized full-rank states.
    """
    _check_club_params(alpha, lam)
    lam = default_lambda(alpha) if lam is None else float(lam)
    engine = _club_engine(state, alpha, lam)
    sigma = np.asarray(sigma_e.mat if hasattr(sigma_e, "mat") else sigma_e, dtype=complex)
    if lam < 0.0 and not engine.support_ok(sigma):
        return INF
    return engine.objective(sigma)


def club_objective_depolarized(state, sigma_e, alpha: float, lam: float | None, eps: float) -> float:
    """The club objective along the depolarized path (all inputs full rank)."""
    _check_club_params(alpha, lam)
    lam = default_lambda(alpha) if lam is None else float(lam)
    if eps == 0.0:
        return club_objective(state, sigma_e, alpha, lam)
    rho = _as_bipartite(state)
    d_a, d_e = rho.dims
    d = rho.d
    rho_eps = (1.0 - eps) * rho.mat + eps * np.eye(d) / d
    rho_e = ptrace(rho.mat, rho.dims, (0,))
    rho_e_eps = (1.0 - eps) * rho_e + eps * np.eye(d_e) / d_e
    sigma = np.asarray(sigma_e.mat if hasattr(sigma_e, "mat") else sigma_e, dtype=complex)
    sigma_eps = (1.0 - eps) * sigma + eps * np.eye(d_e) / d_e
    engine = _ClubEngine([1.0], [rho_eps], rho_e_eps, alpha, lam, d_b=d_a)
    return engine.objective(sigma_eps)


def _check_club_params(alpha, lam):
    if not (0 < alpha <= 1):
        raise DomainError(f"club family needs alpha in (0, 1], got {alpha}")
    if lam is not None and lam > 1e-12:
        raise DomainError(f"club family needs lam <= 0, got {lam}")
    if lam is None and alpha < 0.5 - 1e-12 and alpha < 1:
        raise DomainError("default lam is only nonpositive for alpha >= 1/2")


def classical_club_closed_form(joint: np.ndarray, alpha: float) -> float:
    """Closed form of the boundary club entropy for classical joint p(x, y):
    (2 alpha / (1 - alpha)) * log sum_y p(y) (sum_x p(x|y)^alpha)^(1/(2 alpha)).
    """
    if not (0.5 <= alpha < 1):
        raise DomainError(f"closed form holds for alpha in [1/2, 1), got {alpha}")
    value, _ = _classical_club(joint, alpha, default_lambda(alpha))
    return value


def _classical_club(joint: np.ndarray, alpha: float, lam: float) -> tuple[float, np.ndarray]:
    """Diagonal-case club entropy for arbitrary lam <= 0 with the tilted optimizer."""
    joint = np.asarray(joint, dtype=float)
    p_y = joint.sum(axis=0)
    keep = p_y > 0.0
    s_prime = lam * (1.0 - alpha)  # exponent on sigma_y after the alpha power
    d_y = p_y[keep] ** ((1.0 - lam) * (1.0 - alpha)) * np.sum(joint[:, keep] ** alpha, axis=0)
    if abs(s_prime) < 1e-15:
        value = math.log(float(np.sum(d_y))) / (1.0 - alpha)
        sigma = p_y.copy()
    else:
        expo = 1.0 / (1.0 - s_prime)
        weights = d_y**expo
        z = float(np.sum(weights))
        value = (1.0 - s_prime) / (1.0 - alpha) * math.log(z)
        sigma = np.zeros_like(p_y)
        sigma[keep] = weights / z
    return value, sigma


def _cq_joint(state: CQState) -> np.ndarray:
    return np.stack([p * np.diag(c.mat).real for p, c in zip(state.probs, state.cond)])


def club_sandwiched(state, alpha: float, lam: float | None = None, options: OptimizerOptions | None = None) -> OptimizerReport:
    """Club-sandwiched conditional entropy with minimization over sigma_E.

    Exact shortcuts: alpha = 1 returns the von Neumann conditional entropy
    (the pointwise limit of the family), and lam = 0 needs no optimization.
    Classical states use the diagonal closed form unless
    ``options.force_matrix`` demands the generic pipeline.
    """
    _check_club_params(alpha, lam)
    opts = options or OptimizerOptions()
    if abs(alpha - 1.0) < 1e-15:
        return _report(vn_cond_entropy(state))
    lam_val = default_lambda(alpha) if lam is None else float(lam)

    engine = _club_engine(state, alpha, lam_val)
    if lam_val == 0.0:
        value = engine.entropy(None)
        return _report(value, optimizer=engine.rho_e.copy())

    if isinstance(state, CQState) and state.is_classical and not opts.force_matrix:
        value, sigma = _classical_club(_cq_joint(state), alpha, lam_val)
        return _report(value, optimizer=np.diag(sigma).astype(complex))

    starts = _optimize.default_starts(engine.rho_e, engine.d_e, opts.seed, opts.extra_starts)
    res = _optimize.minimize_over_densities(engine.entropy, engine.d_e, starts, opts)
    return _report(res.value, optimizer=res.sigma, iterations=res.evaluations, converged=res.converged)


def h_down_half(state) -> float:
    """H-tilde-down at alpha = 1/2 (equals -log fidelity to I_A (x) rho_E)."""
    engine = _club_engine(state, 0.5, 0.0)
    return engine.entropy(None)


# ---------------------------------------------------------------------------
# arrow-up / arrow-down variants
# ---------------------------------------------------------------------------


def _cond_divergence_q(state, sigma: np.ndarray, alpha: float, family: str) -> float:
    """Blockwise trace term of D_fam(rho_AE || I_A (x) sigma_E)."""
    if isinstance(state, CQState):
        probs = state.probs
        blocks = [c.mat for c in state.cond]
    else:
        rho = _as_bipartite(state)
        probs, blocks = [1.0], [rho.mat]
        sigma = tensor(np.eye(rho.dims[0]), sigma)
    total = 0.0
    if family == "sandwiched":
        sp = matrix_function(sigma, "power", power=(1.0 - alpha) / (2.0 * alpha))
        for p, b in zip(probs, blocks):
            if p == 0.0:
                continue
            w = np.clip(np.linalg.eigvalsh(sp @ b @ sp), 0.0, None)
            total += p**alpha * float(np.sum(w[w > 0.0] ** alpha))
    elif family == "petz":
        s_pow = matrix_function(sigma, "power", power=1.0 - alpha)
        for p, b in zip(probs, blocks):
            if p == 0.0:
                continue
            b_pow = matrix_function(b, "power", power=alpha)
            total += p**alpha * float(np.trace(b_pow @ s_pow).real)
    else:
        raise ValidationError(f"unknown family {family!r}")
    return total


def _cond_divergence(state, sigma, alpha, family) -> float:
    q = _cond_divergence_q(state, np.asarray(sigma, dtype=complex), alpha, family)
    if q <= 0.0:
        return INF if alpha < 1 else -INF
    return math.log(q) / (alpha - 1.0)


def renyi_cond(state, query: EntropyQuery, options: OptimizerOptions | None = None) -> OptimizerReport:
    """Conditional Renyi entropies: arrow-down closed form, arrow-up optimized."""
    opts = options or OptimizerOptions()
    kind, alpha = query.kind, query.alpha
    if kind == "vn":
        return _report(vn_cond_entropy(state))
    if kind == "club":
        return club_sandwiched(state, alpha, query.lam, opts)
    if kind == "le":
        return le_cond_entropy(state, alpha, query.lam, opts)
    family = "sandwiched" if kind.startswith("sandwiched") else "petz"
    rho_e = marginal_e(state).mat if isinstance(state, CQState) else ptrace(state.mat, state.dims, (0,))
    if kind.endswith("_down"):
        return _report(-_cond_divergence(state, rho_e, alpha, family), optimizer=rho_e.copy())

    d_e = rho_e.shape[0]

    def objective(sigma):
        return _cond_divergence(state, sigma, alpha, family)

    starts = _optimize.default_starts(rho_e, d_e, opts.seed, opts.extra_starts)
    res = _optimize.minimize_over_densities(objective, d_e, starts, opts)
    return _report(-res.value, optimizer=res.sigma, iterations=res.evaluations, converged=res.converged)


# ---------------------------------------------------------------------------
# LE conditional entropy
# ---------------------------------------------------------------------------


class _LEEngine:
    """Compressed workspace on supp(rho_AE) for the LE conditional entropy.

    Phi(sigma) = Tr[R exp(alpha log rho + (1-alpha) R((1-lam) log rho_E
    + lam log sigma)R)] is evaluated as a k x k exponential in the support
    basis; the Gibbs state of the same exponent is the inner optimizer tau.
    """

    def __init__(self, rho: DensityOperator, alpha: float, lam: float):
        self.alpha = float(alpha)
        self.lam = float(lam)
        self.d_a, self.d_e = rho.dims
        self.rho = rho.mat
        w, u = np.linalg.eigh(rho.mat)
        thr = max(1e-12, 1e-10 * float(np.max(w)))
        keep = w > thr
        self.basis = u[:, keep]  # d x k isometry onto supp(rho_AE)
        self.log_eigs = np.log(w[keep])
        self.k = self.basis.shape[1]
        self.rho_e = ptrace(rho.mat, rho.dims, (0,))
        self.log_rho_e = matrix_function(self.rho_e, "log")
        self.const = self.alpha * np.diag(self.log_eigs).astype(complex)
        self.const += (1.0 - self.alpha) * (1.0 - self.lam) * self._compress_e(self.log_rho_e)

    def _compress_e(self, m_e: np.ndarray) -> np.ndarray:
        lifted = tensor(np.eye(self.d_a), m_e)
        return self.basis.conj().T @ lifted @ self.basis

    def exponent(self, sigma: np.ndarray | None) -> np.ndarray:
        m = self.const
        if self.lam != 0.0:
            log_sigma = matrix_function(np.asarray(sigma, dtype=complex), "log")
            m = m + (1.0 - self.alpha) * self.lam * self._compress_e(log_sigma)
        return (m + m.conj().T) / 2.0

    def phi(self, sigma: np.ndarray | None) -> float:
        w = np.linalg.eigvalsh(self.exponent(sigma))
        return float(np.sum(np.exp(w)))

    def entropy(self, sigma: np.ndarray | None) -> float:
        return math.log(self.phi(sigma)) / (1.0 - self.alpha)

    def gibbs_tau(self, sigma: np.ndarray | None) -> np.ndarray:
        """Inner optimizer: normalized exp of the exponent, lifted to full space."""
        w, u = np.linalg.eigh(self.exponent(sigma))
        ew = np.exp(w - np.max(w))
        tau_c = (u * ew) @ u.conj().T
        tau_c /= np.trace(tau_c).real
        return self.basis @ tau_c @ self.basis.conj().T

    def support_ok(self, sigma: np.ndarray) -> bool:
        s = support_projector(np.asarray(sigma, dtype=complex))
        leak = float(np.trace(self.rho_e - s @ self.rho_e @ s).real)
        return abs(leak) <= 1e-10


def le_objective(state, sigma_e, alpha: float, lam: float | None = None) -> float:
    """Trace objective of the LE conditional entropy at a given sigma_E."""
    _check_club_params(alpha, lam)
    if alpha >= 1.0:
        raise DomainError("le_objective needs alpha in (0, 1)")
    lam = default_lambda(alpha) if lam is None else float(lam)
    engine = _LEEngine(_as_bipartite(state), alpha, lam)
    sigma = np.asarray(sigma_e.mat if hasattr(sigma_e, "mat") else sigma_e, dtype=complex)
    if lam < 0.0 and not engine.support_ok(sigma):
        return INF
    return engine.phi(sigma if lam != 0.0 else None)


def le_cond_entropy(state, alpha: float, lam: float | None = None, options: OptimizerOptions | None = None) -> OptimizerReport:
    """LE conditional entropy by an alternating fixed point with a sigma polish.

    Alternation: given sigma, the optimal tau is the Gibbs state of the
    exponent; given tau, the optimal sigma is tau_E.  The best sigma found is
    then polished by a direct parametrized minimization, so the reported value
    is a certified upper bound on the minimum.
    """
    _check_club_params(alpha, lam)
    opts = options or OptimizerOptions()
    if abs(alpha - 1.0) < 1e-15:
        return _report(vn_cond_entropy(state))
    lam_val = default_lambda(alpha) if lam is None else float(lam)
    rho = _as_bipartite(state)
    engine = _LEEngine(rho, alpha, lam_val)
    if lam_val == 0.0:
        return _report(engine.entropy(None), optimizer=engine.rho_e.copy())

    sigma = engine.rho_e.copy()
    best_val = engine.entropy(sigma)
    best_sigma = sigma
    prev = best_val
    iterations = 0
    converged = False
    for iterations in range(1, 5001):
        tau = engine.gibbs_tau(sigma)
        sigma = ptrace(tau, rho.dims, (0,))
        val = engine.entropy(sigma)
        if val < best_val:
            best_val, best_sigma = val, sigma
        if abs(val - prev) <= 1e-12 * max(1.0, abs(val)):
            converged = True
            break
        prev = val

    evals = iterations
    if opts.polish:
        starts = [best_sigma, engine.rho_e]
        res = _optimize.minimize_over_densities(
            lambda s: engine.entropy(s),
            engine.d_e,
            starts,
            OptimizerOptions(simplex_evals=0, max_evals=opts.max_evals, seed=opts.seed),
        )
        evals += res.evaluations
        if res.value < best_val:
            best_val, best_sigma = res.value, res.sigma
        converged = converged or res.converged

    return _report(best_val, optimizer=best_sigma, iterations=evals, converged=converged)


def variational_le(state, alpha: float, lam: float | None = None, options: OptimizerOptions | None = None) -> OptimizerReport:
    """LE conditional entropy from the tau-side variational form.

    Minimizes (1-lam)(1-alpha) D(tau_E||rho_E) + alpha D(tau||rho_AE)
    + (alpha-1) H(A|E)_tau over states tau supported on supp(rho_AE), then
    divides by (alpha - 1).  Because alpha - 1 < 0, any feasible tau yields a
    LOWER bound on the entropy, complementing the sigma-side upper bound.
    Exponentiated-gradient refinement starts from the Gibbs fixed point.
    For CQ inputs the iteration preserves the classical block structure, so
    tau stays classical-quantum throughout.
    """
    _check_club_params(alpha, lam)
    if alpha >= 1.0:
        raise DomainError("variational_le needs alpha in (0, 1)")
    opts = options or OptimizerOptions()
    lam_val = default_lambda(alpha) if lam is None else float(lam)
    rho = _as_bipartite(state)
    engine = _LEEngine(rho, alpha, lam_val)
    v = engine.basis
    d_a, d_e = rho.dims
    log_rho_e_c = engine._compress_e(engine.log_rho_e)
    diag_log = np.diag(engine.log_eigs).astype(complex)

    c_marg = -lam_val * (1.0 - alpha)  # coefficient of Tr tau_E log tau_E, >= 0

    def lift_e(tau_c: np.ndarray) -> np.ndarray:
        return ptrace(v @ tau_c @ v.conj().T, (d_a, d_e), (0,))

    def objective(tau_c: np.ndarray) -> float:
        w = np.clip(np.linalg.eigvalsh(tau_c), 1e-300, None)
        ent = float(np.sum(w * np.log(w)))
        tau_e = lift_e(tau_c)
        we = np.clip(np.linalg.eigvalsh(tau_e), 1e-300, None)
        ent_e = float(np.sum(we * np.log(we)))
        cross_e = float(np.trace(tau_c @ log_rho_e_c).real)
        cross = float(np.trace(tau_c @ diag_log).real)
        return ent + c_marg * ent_e - (1.0 - lam_val) * (1.0 - alpha) * cross_e - alpha * cross

    def gradient(tau_c: np.ndarray) -> np.ndarray:
        log_tau = _optimize._safe_log(tau_c)
        tau_e = lift_e(tau_c)
        log_tau_e = matrix_function(tau_e, "log")
        g = log_tau + np.eye(engine.k)
        g = g + c_marg * (engine._compress_e(log_tau_e) + np.eye(engine.k))
        g = g - (1.0 - lam_val) * (1.0 - alpha) * log_rho_e_c
        g = g - alpha * diag_log
        return g

    # Gibbs fixed-point initializer: tau <- Gibbs exponent built from tau_E
    tau_c = np.eye(engine.k, dtype=complex) / engine.k
    for _ in range(200):
        m = engine.const + (1.0 - alpha) * lam_val * engine._compress_e(matrix_function(lift_e(tau_c), "log"))
        tau_next = _optimize._normalized_exp(m)
        if max_abs(tau_next - tau_c) < 1e-13:
            tau_c = tau_next
            break
        tau_c = tau_next

    res = _optimize.exp_gradient_minimize(objective, gradient, tau_c, max_iter=2000, tol=1e-13)
    value = res.value / (alpha - 1.0)
    tau_full = v @ res.tau @ v.conj().T
    return _report(value, optimizer=tau_full, iterations=res.iterations, converged=res.converged)


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------


def duality_club(state, alpha: float, options: OptimizerOptions | None = None) -> OptimizerReport:
    """Boundary club entropy through the dual alpha-z optimization.

    Purifies rho_AE to rho_AEC and evaluates -sup_sigma_C
    -D_{beta, beta/2}(rho_AC || I_A (x) sigma_C) with beta = 2 alpha/(3 alpha - 1).
    The nonzero spectrum of rho_AC is compressed (it has at most d_E points),
    which keeps each objective evaluation cheap.
    """
    if not (0.5 <= alpha < 1):
        raise DomainError(f"duality holds for alpha in [1/2, 1), got {alpha}")
    opts = options or OptimizerOptions()
    rho = _as_bipartite(state)
    d_a, d_e = rho.dims
    from .states import purify  # local import to keep module load light

    pure = purify(rho)
    d_c = pure.dims[2]
    rho_ac = ptrace(pure.mat, pure.dims, (1,))
    rho_c = ptrace(rho_ac, (d_a, d_c), (0,))

    beta = 2.0 * alpha / (3.0 * alpha - 1.0)
    z = beta / 2.0
    b_exp = (1.0 - beta) / z  # in [-1, 0) for beta in (1, 2]

    w, u = np.linalg.eigh(rho_ac)
    thr = max(1e-12, 1e-10 * float(np.max(w)))
    keep = w > thr
    cols = u[:, keep] * w[keep]  # columns of W * diag(eigs); rank <= d_e
    cols_t = cols.conj().T.reshape(-1, d_a, d_c)

    def objective(sigma: np.ndarray) -> float:
        ws, us = np.linalg.eigh(sigma)
        ws = np.clip(ws, 1e-300, None)
        sig_b = (us * ws**b_exp) @ us.conj().T
        # rows (r, a, c) contracted with sigma^b on the C leg, then with cols
        contracted = np.einsum("rac,cd->rad", cols_t, sig_b)
        small = np.einsum("rad,sad->rs", contracted, cols_t.conj())
        wq = np.clip(np.linalg.eigvalsh((small + small.conj().T) / 2.0), 0.0, None)
        q = float(np.sum(wq[wq > 0.0] ** z))
        if q <= 0.0:
            return INF
        return math.log(q) / (beta - 1.0)

    starts = _optimize.default_starts(rho_c, d_c, opts.seed, opts.extra_starts)
    res = _optimize.minimize_over_densities(objective, d_c, starts, opts)
    return _report(res.value, optimizer=res.sigma, iterations=res.evaluations, converged=res.converged)


# ---------------------------------------------------------------------------
# Gibbs principle and coarse graining
# ---------------------------------------------------------------------------


def gibbs_check(h: np.ndarray) -> tuple[float, float, float]:
    """Both sides of the constrained Gibbs identity for a Hermitian H.

    lhs = -log Tr[P_H exp(-H)] with P_H the projector onto supp(H); rhs is the
    entropy functional at the stated optimizer tau = P_H exp(-H)/Tr.  For
    H = 0 the support convention is the full space (no constraint).
    """
    from .linalg import check_hermitian

    h = check_hermitian(h, tol=1e-10, name="H")
    w = np.linalg.eigvalsh(h)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    thr = max(1e-12, 1e-10 * scale)
    keep = np.abs(w) > thr
    if not np.any(keep):
        keep = np.ones_like(w, dtype=bool)  # H = 0: unconstrained Gibbs
    ws = w[keep]
    shift = float(np.min(ws))
    weights = np.exp(-(ws - shift))
    zval = float(np.sum(weights))
    lhs = -(math.log(zval) - shift)
    q = weights / zval
    rhs = float(np.sum(q * np.log(q)) + np.sum(q * ws))
    return lhs, rhs, abs(lhs - rhs)


def coarse_grain_entropy_check(
    cq: CQState,
    h,
    alpha: float,
    lam: float | None = None,
    d_b: int = 1,
    options: OptimizerOptions | None = None,
) -> tuple[float, float]:
    """Club entropies before and after hashing the classical register.

    ``h`` is a hash table on the classical symbols (any object with ``table``
    and ``z_dim`` attributes, or a plain sequence with z inferred).  The
    conditional blocks may carry an extra quantum register B of dimension
    ``d_b``; the entropy is then of (XB|E) versus (ZB|E).  Contract:
    after <= before (coarse-graining cannot increase the entropy).
    """
    table = list(h.table) if hasattr(h, "table") else list(h)
    z_dim = int(h.z_dim) if hasattr(h, "z_dim") else int(max(table)) + 1
    if len(table) != cq.x_dim:
        raise ValidationError("hash table length must equal the classical alphabet size")
    lam_val = default_lambda(alpha) if lam is None else float(lam)

    before = _club_value_blocks(cq, alpha, lam_val, d_b, options)

    probs = np.zeros(z_dim)
    mats = [np.zeros((cq.e_dim, cq.e_dim), dtype=complex) for _ in range(z_dim)]
    for x, z in enumerate(table):
        probs[z] += cq.probs[x]
        mats[z] += cq.probs[x] * cq.cond[x].mat
    cond = []
    for zidx in range(z_dim):
        if probs[zidx] > 0:
            cond.append(DensityOperator(mats[zidx] / probs[zidx], (cq.e_dim,)))
        else:
            cond.append(DensityOperator(np.eye(cq.e_dim, dtype=complex) / cq.e_dim, (cq.e_dim,)))
    hashed = CQState(probs, tuple(cond))
    after = _club_value_blocks(hashed, alpha, lam_val, d_b, options)
    return before, after


def _club_value_blocks(cq: CQState, alpha: float, lam: float, d_b: int, options) -> float:
    opts = options or OptimizerOptions()
    if d_b == 1 and cq.is_classical and not opts.force_matrix:
        value, _ = _classical_club(_cq_joint(cq), alpha, lam)
        return value
    engine = _club_engine(cq, alpha, lam, d_b=d_b)
    if lam == 0.0:
        return engine.entropy(None)
    starts = _optimize.default_starts(engine.rho_e, engine.d_e, opts.seed, opts.extra_starts)
    res = _optimize.minimize_over_densities(engine.entropy, engine.d_e, starts, opts)
    return res.value


def conditional_entropy(state, query: EntropyQuery, options: OptimizerOptions | None = None) -> OptimizerReport:
    """Dispatch a conditional-entropy query (used by the CLI)."""
    return renyi_cond(state, query, options)
