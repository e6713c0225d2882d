"""Strong converse exponent of composable randomness extraction.

The exponent at rate R is max_{alpha in [1/2, 1]} ((1-alpha)/alpha) *
(R - H_club(alpha)), evaluated through the change of variable t = (1-alpha)/alpha:
G(t) = t R - phi(t) with phi(t) = t * H_club(1/(1+t)) at the boundary tilting
weight.  G is concave on [0, 1], so a golden-section search with one parabolic
refinement finds the maximum; phi values are memoized per state because curve
generation re-queries the same t's.

All rates and values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _optimize
from ._optimize import OptimizerOptions
from .conditional import (
    OptimizerReport,
    _as_bipartite,
    _classical_club,
    _cq_joint,
    _report,
    club_sandwiched,
    default_lambda,
    h_down_half,
    le_cond_entropy,
    renyi_cond,
    EntropyQuery,
    vn_cond_entropy,
)
from .linalg import DomainError, ValidationError, matrix_function, ptrace
from .states import CQState

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ExponentCurve:
    """Exponent values on a rate grid with the structural landmarks attached."""

    rates: np.ndarray
    values: np.ndarray
    alpha_star: np.ndarray
    r_critical: float
    h_vn: float
    h_half: float


def _alpha_of_t(t: float) -> float:
    return 1.0 / (1.0 + t)


class EpaSolver:
    """Memoizing evaluator of G(t) = t R - phi(t) for one CQ state.

    Classical states route phi through the diagonal closed form; quantum CQ
    states run the sigma-optimization of the club entropy.  Warm starts are
    threaded between neighbouring t queries to speed up the optimizer.
    """

    def __init__(self, state: CQState, options: OptimizerOptions | None = None):
        if not isinstance(state, CQState):
            raise ValidationError("the exponent is defined for classical-quantum states")
        self.state = state
        self.options = options or OptimizerOptions()
        self._phi_cache: dict[float, float] = {}
        use_closed = state.is_classical and not self.options.force_matrix
        self._joint = _cq_joint(state) if use_closed else None
        self._warm_sigma = None
        self.flagged = False  # set when any inner optimizer fails to converge

    def phi(self, t: float) -> float:
        """phi(t) = t * H_club(alpha=1/(1+t), boundary lam); phi(0) = 0."""
        key = round(t, 9)
        if key in self._phi_cache:
            return self._phi_cache[key]
        if t <= 0.0:
            val = 0.0
        else:
            alpha = _alpha_of_t(t)
            if self._joint is not None:
                h, _ = _classical_club(self._joint, alpha, (t - 1.0) / t if t < 1.0 else 0.0)
            elif t >= 1.0 - 1e-15:
                h = h_down_half(self.state)
            else:
                opts = self.options
                if self._warm_sigma is not None:
                    opts = replace(opts, extra_starts=(self._warm_sigma,))
                rep = club_sandwiched(self.state, alpha, None, opts)
                self.flagged = self.flagged or not rep.converged
                self._warm_sigma = rep.optimizer
                h = rep.value
            val = t * h
        self._phi_cache[key] = val
        return val

    def g(self, t: float, rate: float) -> float:
        return t * rate - self.phi(t)

    def epa(self, rate: float, t_tol: float = 1e-6) -> tuple[float, float]:
        """Maximize G over t in [0, 1]; returns (value, alpha_star)."""
        if rate < 0:
            raise DomainError(f"rate must be nonnegative, got {rate}")
        a, b = 0.0, 1.0
        fa, fb = self.g(a, rate), self.g(b, rate)
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        fc, fd = self.g(c, rate), self.g(d, rate)
        while abs(b - a) > t_tol:
            if fc >= fd:
                b, fb = d, fd
                d, fd = c, fc
                c = b - _GOLDEN * (b - a)
                fc = self.g(c, rate)
            else:
                a, fa = c, fc
                c, fc = d, fd
                d = a + _GOLDEN * (b - a)
                fd = self.g(d, rate)
        # parabolic refinement through the final bracket
        pts = sorted({a, c, d, b})
        best_t = max(pts, key=lambda t: self.g(t, rate))
        t_ref = _parabolic_vertex([(t, self.g(t, rate)) for t in pts[:3]]) if len(pts) >= 3 else None
        if t_ref is not None and 0.0 <= t_ref <= 1.0 and self.g(t_ref, rate) > self.g(best_t, rate):
            best_t = t_ref
        # the endpoints are always admissible candidates
        for t_end in (0.0, 1.0):
            if self.g(t_end, rate) > self.g(best_t, rate):
                best_t = t_end
        value = self.g(best_t, rate)
        if value <= 0.0:
            return 0.0, 1.0  # maximum attained at t = 0, i.e. alpha = 1
        return value, _alpha_of_t(best_t)

    def critical_rate(self) -> float:
        """Left derivative of phi at t = 1 by Richardson-extrapolated differences."""
        steps = (1e-3, 5e-4, 2.5e-4)
        phi1 = self.phi(1.0)
        d = [(phi1 - self.phi(1.0 - h)) / h for h in steps]
        r1 = 2.0 * d[1] - d[0]
        r2 = 2.0 * d[2] - d[1]
        return (4.0 * r2 - r1) / 3.0

    def curve(self, r_min: float, r_max: float, steps: int) -> ExponentCurve:
        if r_min > r_max or steps < 2:
            raise ValidationError("need r_min <= r_max and at least 2 grid points")
        rates = np.linspace(r_min, r_max, steps)
        values = np.empty_like(rates)
        alphas = np.empty_like(rates)
        for i, r in enumerate(rates):
            values[i], alphas[i] = self.epa(float(r))
        return ExponentCurve(
            rates=rates,
            values=values,
            alpha_star=alphas,
            r_critical=self.critical_rate(),
            h_vn=vn_cond_entropy(self.state),
            h_half=self.phi(1.0),
        )


def _parabolic_vertex(points) -> float | None:
    (x0, y0), (x1, y1), (x2, y2) = points
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    if abs(denom) < 1e-30:
        return None
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= -1e-30:
        return None
    return -b / (2.0 * a)


def epa(state: CQState, rate: float, options: OptimizerOptions | None = None) -> tuple[float, float]:
    """Strong converse exponent and the maximizing alpha at one rate."""
    return EpaSolver(state, options).epa(rate)


def epa_curve(state: CQState, r_min: float, r_max: float, steps: int, options: OptimizerOptions | None = None) -> ExponentCurve:
    return EpaSolver(state, options).curve(r_min, r_max, steps)


def critical_rate(state: CQState, options: OptimizerOptions | None = None) -> float:
    return EpaSolver(state, options).critical_rate()


# ---------------------------------------------------------------------------
# variational form through the LE entropy
# ---------------------------------------------------------------------------


def g_variational(state: CQState, rate: float, options: OptimizerOptions | None = None) -> OptimizerReport:
    """min over CQ tau of D(tau_E||rho_E) + D(tau_XE||rho_XE) + max(0, R - H(X|E)_tau).

    Equals max_t (t R - t H_LE(1/(1+t))); when requested through
    ``options.cross_check`` that alpha-maximization is run as a second path
    and the gap reported.  The direct path is an exponentiated-subgradient
    descent started at tau = rho.
    """
    if rate < 0:
        raise DomainError(f"rate must be nonnegative, got {rate}")
    opts = options or OptimizerOptions()
    rho = _as_bipartite(state)
    d_a, d_e = rho.dims
    w, u = np.linalg.eigh(rho.mat)
    thr = max(1e-12, 1e-10 * float(np.max(w)))
    keep = w > thr
    basis = u[:, keep]
    k = basis.shape[1]
    diag_log = np.diag(np.log(w[keep])).astype(complex)
    rho_e = ptrace(rho.mat, rho.dims, (0,))
    log_rho_e_c = basis.conj().T @ np.kron(np.eye(d_a), matrix_function(rho_e, "log")) @ basis

    def lift_e(tau_c):
        return ptrace(basis @ tau_c @ basis.conj().T, (d_a, d_e), (0,))

    def pieces(tau_c):
        wt = np.clip(np.linalg.eigvalsh(tau_c), 1e-300, None)
        ent = float(np.sum(wt * np.log(wt)))
        tau_e = lift_e(tau_c)
        we = np.clip(np.linalg.eigvalsh(tau_e), 1e-300, None)
        ent_e = float(np.sum(we * np.log(we)))
        d_joint = ent - float(np.trace(tau_c @ diag_log).real)
        d_marg = ent_e - float(np.trace(tau_c @ log_rho_e_c).real)
        h_cond = -ent + ent_e  # H(X|E)_tau = H(tau) - H(tau_E)
        return d_joint, d_marg, h_cond, tau_e

    def objective(tau_c):
        d_joint, d_marg, h_cond, _ = pieces(tau_c)
        return d_marg + d_joint + max(0.0, rate - h_cond)

    def gradient(tau_c):
        d_joint, d_marg, h_cond, tau_e = pieces(tau_c)
        log_tau = _optimize._safe_log(tau_c)
        log_tau_e_c = basis.conj().T @ np.kron(np.eye(d_a), matrix_function(tau_e, "log")) @ basis
        eye = np.eye(k)
        g = (log_tau + eye - diag_log) + (log_tau_e_c + eye - log_rho_e_c)
        if rate - h_cond > 0.0:
            g = g + (log_tau + eye) - (log_tau_e_c + eye)
        return g

    tau0 = np.diag(w[keep] / np.sum(w[keep])).astype(complex)  # tau = rho in the support basis
    res = _optimize.exp_gradient_minimize(objective, gradient, tau0, max_iter=3000, tol=1e-13)
    gap = None
    if opts.cross_check:
        alt = _g_via_le_maximization(state, rate, opts)
        gap = abs(alt - res.value)
    return _report(res.value, optimizer=basis @ res.tau @ basis.conj().T, iterations=res.iterations, converged=res.converged, gap=gap)


def _g_via_le_maximization(state: CQState, rate: float, opts: OptimizerOptions) -> float:
    """max over t in [0,1] of t R - t H_LE(1/(1+t), boundary lam), on a refined grid."""

    def g_of_t(t: float) -> float:
        if t <= 0.0:
            return 0.0
        alpha = _alpha_of_t(t)
        lam = (t - 1.0) / t
        rep = le_cond_entropy(state, alpha, lam, opts)
        return t * rate - t * rep.value

    grid = np.linspace(0.0, 1.0, 17)
    vals = [g_of_t(float(t)) for t in grid]
    i = int(np.argmax(vals))
    lo = grid[max(0, i - 1)]
    hi = grid[min(len(grid) - 1, i + 1)]
    a, b = float(lo), float(hi)
    for _ in range(25):
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        if g_of_t(c) >= g_of_t(d):
            b = d
        else:
            a = c
    best = max(vals[i], g_of_t((a + b) / 2.0))
    return max(0.0, best)


# ---------------------------------------------------------------------------
# comparison bounds from alternative error criteria
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonBounds:
    """Named exponent bounds evaluated on an alpha grid.

    ``petz_lower`` is the Petz arrow-down lower bound
    sup_alpha (1-alpha)(R - H_petz_down(alpha)); ``arrow_up`` is the exponent
    of the marginal-optimized error criterion
    max_alpha ((1-alpha)/alpha)(R - H_sand_up(alpha)).  Ordering:
    petz_lower <= epa and arrow_up <= epa (optimizing the ideal marginal can
    only raise the fidelity, hence lower the exponent).
    """

    petz_lower: float
    arrow_up: float
    epa: float


def comparison_bounds(state: CQState, rate: float, n_grid: int = 17, options: OptimizerOptions | None = None) -> ComparisonBounds:
    opts = options or OptimizerOptions()
    petz_best = 0.0  # the alpha -> 1 limit contributes 0
    for alpha in np.linspace(0.02, 0.98, n_grid):
        h = renyi_cond(state, EntropyQuery("petz_down", float(alpha)), opts).value
        petz_best = max(petz_best, (1.0 - alpha) * (rate - h))
    up_best = 0.0
    for alpha in np.linspace(0.5, 0.98, n_grid):
        h = renyi_cond(state, EntropyQuery("sandwiched_up", float(alpha)), opts).value
        up_best = max(up_best, (1.0 - alpha) / alpha * (rate - h))
    epa_val, _ = epa(state, rate, opts)
    return ComparisonBounds(petz_lower=petz_best, arrow_up=up_best, epa=epa_val)
