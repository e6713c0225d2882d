"""Finite-n privacy amplification by exhaustive deterministic hashing.

Hash tables h: X^n -> Z are enumerated as base-|Z| counters over the tuple
index (lexicographic order, first symbol most significant), which makes the
arg-max hash reproducible: ties keep the earliest, i.e. lexicographically
smallest, table.  Fidelity to the composable ideal I_Z/|Z| (x) rho_E^(x n) is
computed blockwise through trace norms of the unnormalized conditional blocks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._optimize import OptimizerOptions
from .conditional import club_sandwiched, h_down_half
from .linalg import UnsupportedSizeError, ValidationError, matrix_function, tensor
from .states import CQState, DensityOperator, marginal_e

ENUMERATION_BUDGET = 10**6
DEFAULT_ALPHA_GRID = (0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class HashFunction:
    """Total function X^n -> Z as an explicit table over lexicographic tuples."""

    n: int
    x_dim: int
    z_dim: int
    table: tuple

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        if len(table) != self.x_dim**self.n:
            raise ValidationError(f"table length {len(table)} != {self.x_dim}^{self.n}")
        if any(v < 0 or v >= self.z_dim for v in table):
            raise ValidationError("table entries must lie in [0, z_dim)")
        object.__setattr__(self, "table", table)

    def __call__(self, xs: tuple) -> int:
        idx = 0
        for x in xs:
            idx = idx * self.x_dim + int(x)
        return self.table[idx]

    @staticmethod
    def identity(x_dim: int) -> "HashFunction":
        return HashFunction(1, x_dim, x_dim, tuple(range(x_dim)))

    @staticmethod
    def constant(n: int, x_dim: int, z_dim: int, value: int = 0) -> "HashFunction":
        return HashFunction(n, x_dim, z_dim, tuple([value] * (x_dim**n)))


def all_hashes(n: int, x_dim: int, z_dim: int):
    """All tables in lexicographic order; raises when beyond the budget."""
    count = z_dim ** (x_dim**n)
    if count > ENUMERATION_BUDGET:
        raise UnsupportedSizeError(f"{count} tables exceed the enumeration budget {ENUMERATION_BUDGET}")
    for table in itertools.product(range(z_dim), repeat=x_dim**n):
        yield HashFunction(n, x_dim, z_dim, table)


def _product_blocks(cq: CQState, n: int):
    """Per-tuple weights prod p(x_i) and blocks (x)_i rho_E(x_i)."""
    weights = []
    blocks = []
    for xs in itertools.product(range(cq.x_dim), repeat=n):
        w = float(np.prod([cq.probs[x] for x in xs]))
        m = cq.cond[xs[0]].mat
        for x in xs[1:]:
            m = tensor(m, cq.cond[x].mat)
        weights.append(w)
        blocks.append(m)
    return np.array(weights), blocks


def apply_hash(cq: CQState, n: int, h: HashFunction) -> CQState:
    """Push rho^(x n) through the hashing channel; output CQ state on (Z, E^n)."""
    if h.n != n or h.x_dim != cq.x_dim:
        raise ValidationError("hash function does not match the state and copy count")
    weights, blocks = _product_blocks(cq, n)
    de_n = cq.e_dim**n
    probs = np.zeros(h.z_dim)
    mats = [np.zeros((de_n, de_n), dtype=complex) for _ in range(h.z_dim)]
    for j, z in enumerate(h.table):
        probs[z] += weights[j]
        mats[z] += weights[j] * blocks[j]
    cond = []
    for z in range(h.z_dim):
        if probs[z] > 1e-300:
            cond.append(DensityOperator(mats[z] / probs[z], (de_n,)))
        else:
            cond.append(DensityOperator(np.eye(de_n, dtype=complex) / de_n, (de_n,)))
    total = float(np.sum(probs))
    return CQState(probs / total, tuple(cond))


def fidelity_to_ideal(hashed: CQState, ideal_e: DensityOperator, z_dim: int | None = None) -> float:
    """Uhlmann fidelity of a hashed CQ state with I_Z/|Z| (x) ideal_e.

    Blockwise: sqrt(F) = sum_z |Z|^(-1/2) || A_z^(1/2) ideal_e^(1/2) ||_1 with
    A_z the unnormalized conditional block q(z) rho(z).
    """
    z = hashed.x_dim if z_dim is None else int(z_dim)
    if z != hashed.x_dim:
        raise ValidationError("z_dim must match the hashed classical alphabet")
    b_half = matrix_function(ideal_e.mat, "power", power=0.5)
    root_sum = 0.0
    for q, c in zip(hashed.probs, hashed.cond):
        if q <= 0.0:
            continue
        m = b_half @ (q * c.mat) @ b_half
        w = np.clip(np.linalg.eigvalsh(m), 0.0, None)
        root_sum += float(np.sum(np.sqrt(w)))
    f = (root_sum / math.sqrt(z)) ** 2
    return min(max(f, 0.0), 1.0)


@dataclass(frozen=True)
class SimReport:
    """Outcome of the exhaustive hash search at one (n, z_dim)."""

    n: int
    rate_nominal: float
    z_dim: int
    best_fidelity: float
    best_hash: HashFunction
    exponent_estimate: float
    oneshot_bound: float
    passed: bool
    epa_theory: float | None = None


def _oneshot_rate_bound(cq: CQState, n: int, z_dim: int, alpha_grid, options) -> float:
    """max over the grid of ((1-alpha)/alpha)(log z - n H_club(alpha)) / n."""
    best = 0.0
    for alpha in alpha_grid:
        h1 = club_sandwiched(cq, float(alpha), None, options).value
        best = max(best, (1.0 - alpha) / alpha * (math.log(z_dim) - n * h1) / n)
    return best


def best_hash_exhaustive(
    cq: CQState,
    n: int,
    z_dim: int,
    alpha_grid=DEFAULT_ALPHA_GRID,
    options: OptimizerOptions | None = None,
) -> SimReport:
    """Maximize the ideal fidelity over every table; deterministic tie-break."""
    opts = options or OptimizerOptions()
    count = z_dim ** (cq.x_dim**n)
    if count > ENUMERATION_BUDGET:
        raise UnsupportedSizeError(f"{count} tables exceed the enumeration budget {ENUMERATION_BUDGET}")
    weights, blocks = _product_blocks(cq, n)
    ideal_e = marginal_e(cq).mat
    ideal_n = ideal_e
    for _ in range(n - 1):
        ideal_n = tensor(ideal_n, ideal_e)
    b_half = matrix_function(ideal_n, "power", power=0.5)
    half_blocks = [b_half @ (w * m) @ b_half for w, m in zip(weights, blocks)]

    best_f = -1.0
    best_table = None
    for table in itertools.product(range(z_dim), repeat=cq.x_dim**n):
        z_mats = [None] * z_dim
        for j, z in enumerate(table):
            z_mats[z] = half_blocks[j] if z_mats[z] is None else z_mats[z] + half_blocks[j]
        root_sum = 0.0
        for m in z_mats:
            if m is None:
                continue
            w = np.clip(np.linalg.eigvalsh(m), 0.0, None)
            root_sum += float(np.sum(np.sqrt(w)))
        f = root_sum**2 / z_dim
        if f > best_f:
            best_f = f
            best_table = table

    best_f = min(max(best_f, 0.0), 1.0)
    exponent = -math.log(best_f) / n if best_f > 0 else math.inf
    bound = _oneshot_rate_bound(cq, n, z_dim, alpha_grid, opts)
    return SimReport(
        n=n,
        rate_nominal=math.log(z_dim) / n,
        z_dim=z_dim,
        best_fidelity=best_f,
        best_hash=HashFunction(n, cq.x_dim, z_dim, best_table),
        exponent_estimate=exponent,
        oneshot_bound=bound,
        passed=exponent >= bound - 1e-9,
    )


def oneshot_converse_check(
    cq: CQState,
    n: int,
    h: HashFunction,
    alpha_grid=DEFAULT_ALPHA_GRID,
    options: OptimizerOptions | None = None,
) -> list[dict]:
    """Margins of the one-shot converse for one hash at each grid alpha.

    lhs = -(alpha/(1-alpha)) log F(hashed, ideal) must dominate both
    log|Z| - H_club(Z|E^n) of the hashed state and log|Z| - n H_club(X|E) of
    the input (coarse-graining plus additivity).  Margins are lhs - rhs.
    """
    opts = options or OptimizerOptions()
    if any(not (0.5 <= a < 1.0) for a in alpha_grid):
        raise ValidationError("alpha grid must lie in [1/2, 1)")
    hashed = apply_hash(cq, n, h)
    ideal_e = marginal_e(cq)
    ideal_n = ideal_e
    for _ in range(n - 1):
        ideal_n = ideal_n.tensor(ideal_e)
    f = fidelity_to_ideal(hashed, ideal_n)
    log_z = math.log(h.z_dim)
    out = []
    for alpha in alpha_grid:
        lhs = -(alpha / (1.0 - alpha)) * math.log(f) if f > 0 else math.inf
        h_hashed = club_sandwiched(hashed, float(alpha), None, opts).value
        h_single = club_sandwiched(cq, float(alpha), None, opts).value
        out.append(
            {
                "alpha": float(alpha),
                "lhs": lhs,
                "margin_hashed": lhs - (log_z - h_hashed),
                "margin_additive": lhs - (log_z - n * h_single),
            }
        )
    return out


def finite_n_table(
    cq: CQState,
    rate: float,
    n_max: int,
    z_rule=None,
    alpha_grid=DEFAULT_ALPHA_GRID,
    options: OptimizerOptions | None = None,
) -> list[SimReport]:
    """Exponent estimates for n = 1..n_max at |Z| = max(1, round(e^(n R))).

    The hard contract is the one-shot inequality in each report; the gap to
    the asymptotic exponent is reported, not asserted.
    """
    from .exponent import epa  # deferred import: exponent does not need hashing

    opts = options or OptimizerOptions()
    if rate < 0:
        raise ValidationError("rate must be nonnegative")
    rule = z_rule or (lambda n, r: max(1, int(round(math.exp(n * r)))))
    theory, _ = epa(cq, rate, opts)
    out = []
    for n in range(1, n_max + 1):
        z_dim = rule(n, rate)
        rep = best_hash_exhaustive(cq, n, z_dim, alpha_grid, opts)
        out.append(
            SimReport(
                n=rep.n,
                rate_nominal=rate,
                z_dim=rep.z_dim,
                best_fidelity=rep.best_fidelity,
                best_hash=rep.best_hash,
                exponent_estimate=rep.exponent_estimate,
                oneshot_bound=rep.oneshot_bound,
                passed=rep.passed,
                epa_theory=theory,
            )
        )
    return out


def h_half_reference(cq: CQState) -> float:
    """Convenience: the alpha = 1/2 entropy that controls the linear tail."""
    return h_down_half(cq)
