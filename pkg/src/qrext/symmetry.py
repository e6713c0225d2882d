"""Symmetric-group machinery on (C^d)^(x n): characters, isotypic projectors,
and the universal permutation-invariant state.

Characters are computed by the Murnaghan-Nakayama rule on beta-sets (first
column hook lengths), exactly in integers, which keeps the orthogonality
relations exact.  Isotypic projectors are assembled as group averages
P_lam = (dim V_lam / n!) * sum_pi chi_lam(pi) U_pi, and the universal state is
the uniform mixture of the normalized non-vanishing projectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import UnsupportedSizeError, ValidationError, max_abs
from .states import DensityOperator

MAX_N = 5
MAX_TOTAL_DIM = 64


def partitions(n: int) -> list[tuple[int, ...]]:
    """All partitions of n, parts weakly decreasing, in lexicographic order."""
    if n == 0:
        return [()]
    out = []

    def rec(remaining, largest, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(remaining, largest), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(n, n, [])
    return out


def class_size(cycle_type: tuple[int, ...]) -> int:
    """Number of permutations with the given cycle type."""
    n = sum(cycle_type)
    size = math.factorial(n)
    for length in set(cycle_type):
        m = cycle_type.count(length)
        size //= length**m * math.factorial(m)
    return size


@lru_cache(maxsize=None)
def mn_character(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    """Murnaghan-Nakayama: the character chi_lam on the class of cycle type mu."""
    if sum(lam) != sum(mu):
        raise ValidationError("partition and cycle type must have equal weight")
    if not mu:
        return 1
    m = mu[0]
    rest = mu[1:]
    ell = len(lam)
    beta = tuple(lam[i] + (ell - 1 - i) for i in range(ell))
    beta_set = set(beta)
    total = 0
    for b in beta:
        target = b - m
        if target < 0 or target in beta_set:
            continue
        height = sum(1 for c in beta if target < c < b)
        new_beta = sorted((beta_set - {b}) | {target}, reverse=True)
        new_lam = tuple(nb - (len(new_beta) - 1 - i) for i, nb in enumerate(new_beta))
        new_lam = tuple(part for part in new_lam if part > 0)
        total += (-1) ** height * mn_character(new_lam, rest)
    return total


def irrep_dimension(lam: tuple[int, ...]) -> int:
    n = sum(lam)
    return mn_character(lam, tuple([1] * n))


@dataclass(frozen=True)
class CharacterTable:
    """Full character table of S_n with classes labelled by cycle type."""

    n: int
    partitions: tuple
    classes: tuple
    sizes: tuple
    table: np.ndarray  # rows: partitions, cols: classes, integer entries

    def character(self, lam: tuple[int, ...], cycle_type: tuple[int, ...]) -> int:
        return int(self.table[self.partitions.index(lam), self.classes.index(cycle_type)])


def sn_characters(n: int) -> CharacterTable:
    if n > MAX_N:
        raise UnsupportedSizeError(f"character tables supported up to n={MAX_N}, got {n}")
    if n < 1:
        raise ValidationError("n must be positive")
    parts = tuple(partitions(n))
    table = np.array([[mn_character(lam, mu) for mu in parts] for lam in parts], dtype=np.int64)
    sizes = tuple(class_size(mu) for mu in parts)
    return CharacterTable(n=n, partitions=parts, classes=parts, sizes=sizes, table=table)


def permutation_unitary(perm: tuple[int, ...], d: int) -> np.ndarray:
    """Unitary permuting tensor factors: factor k of the input moves to slot perm[k].

    With this convention U_pi U_sigma = U_{pi o sigma} where
    (pi o sigma)(k) = pi(sigma(k)).
    """
    perm = tuple(int(p) for p in perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValidationError(f"{perm} is not a permutation of 0..{n - 1}")
    dn = d**n
    u = np.zeros((dn, dn), dtype=complex)
    for idx in itertools.product(range(d), repeat=n):
        out = [0] * n
        for k in range(n):
            out[perm[k]] = idx[k]
        u[_flatten(tuple(out), d), _flatten(idx, d)] = 1.0
    return u


def _flatten(idx: tuple[int, ...], d: int) -> int:
    val = 0
    for i in idx:
        val = val * d + i
    return val


def cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    n = len(perm)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def isotypic_projections(n: int, d: int) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Central projectors P_lam on (C^d)^(x n), dropping vanishing blocks."""
    _check_size(n, d)
    chars = sn_characters(n)
    perms = list(itertools.permutations(range(n)))
    unitaries = {perm: permutation_unitary(perm, d) for perm in perms}
    out = []
    for lam in chars.partitions:
        if len(lam) > d:
            continue  # more than d rows: the block vanishes on (C^d)^n
        dim_v = irrep_dimension(lam)
        acc = np.zeros((d**n, d**n), dtype=complex)
        for perm in perms:
            acc += chars.character(lam, cycle_type(perm)) * unitaries[perm]
        proj = acc * (dim_v / math.factorial(n))
        if np.trace(proj).real > 0.5:
            out.append((lam, proj))
    return out


def _check_size(n: int, d: int) -> None:
    if n > MAX_N:
        raise UnsupportedSizeError(f"n={n} exceeds the supported limit {MAX_N}")
    if d**n > MAX_TOTAL_DIM:
        raise UnsupportedSizeError(f"total dimension {d**n} exceeds the limit {MAX_TOTAL_DIM}")


@dataclass(frozen=True)
class UniversalState:
    """Permutation-invariant state dominating all permutation-invariant states.

    Realized as the uniform mixture of normalized isotypic projectors; ``g`` is
    the polynomial dominance factor (n+1)^(d^2 - 1).
    """

    n: int
    d: int
    omega: DensityOperator
    g: float
    v: int


def universal_state(n: int, d: int) -> UniversalState:
    projs = isotypic_projections(n, d)
    v = len(projs)
    mat = np.zeros((d**n, d**n), dtype=complex)
    for _, proj in projs:
        mat += proj / np.trace(proj).real
    mat /= v
    omega = DensityOperator(mat, tuple([d] * n))
    g = float((n + 1) ** (d * d - 1))
    return UniversalState(n=n, d=d, omega=omega, g=g, v=v)


def symmetrize(mat: np.ndarray, n: int, d: int) -> np.ndarray:
    """Group average (1/n!) sum_pi U_pi M U_pi^dag."""
    acc = np.zeros_like(np.asarray(mat, dtype=complex))
    perms = list(itertools.permutations(range(n)))
    for perm in perms:
        u = permutation_unitary(perm, d)
        acc += u @ mat @ u.conj().T
    return acc / len(perms)


def permutation_invariance_defect(mat: np.ndarray, n: int, d: int) -> float:
    """max over pi of ||U_pi M U_pi^dag - M||_max."""
    worst = 0.0
    for perm in itertools.permutations(range(n)):
        u = permutation_unitary(perm, d)
        worst = max(worst, max_abs(u @ mat @ u.conj().T - mat))
    return worst


def dominance_check(tau: DensityOperator, u: UniversalState, invariance_tol: float = 1e-8) -> float:
    """Min eigenvalue of g*omega - tau; nonnegative (within tolerance) iff dominated."""
    if tau.d != u.omega.d:
        raise ValidationError("state and universal state dimensions differ")
    defect = permutation_invariance_defect(tau.mat, u.n, u.d)
    if defect > invariance_tol:
        raise ValidationError(f"state is not permutation invariant: defect {defect:.3e}")
    return float(np.min(np.linalg.eigvalsh(u.g * u.omega.mat - tau.mat)))
