"""Runtime self-checks: one suite per module's invariant set.

Each check re-derives an inequality or identity the library is contractually
bound to (pinching bound, coarse-graining monotonicity, universal-state
dominance, Gibbs identity, duality, ...) on seeded random inputs and reports
pass/fail with the name of the violated property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conditional, divergences, exponent, hashing, linalg, stateio, states, symmetry
from ._optimize import OptimizerOptions

SUITES = ("operator", "states", "symmetry", "divergences", "conditional", "exponent", "simulator", "cli")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str
    converged: bool = True


def _rand_herm(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2.0


def run_suite(name: str, seed: int, trials: int) -> list[CheckResult]:
    fn = _SUITE_FNS.get(name)
    if fn is None:
        raise linalg.ValidationError(f"unknown suite {name!r}; choose from {SUITES} or 'all'")
    return fn(seed, trials)


def run_suites(names, seed: int, trials: int) -> list[CheckResult]:
    out = []
    for name in names:
        out.extend(run_suite(name, seed, trials))
    return out


# ---------------------------------------------------------------------------


def _suite_operator(seed: int, trials: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    res = []
    worst = 0.0
    for i in range(min(trials, 50)):
        rho = states.random_density(seed * 997 + i, 4).mat
        om = states.random_density(seed * 991 + i, 4).mat
        _, proj = linalg.eigh_cluster(om)
        pinched = linalg.pinch(rho, proj)
        worst = min(worst, float(np.min(np.linalg.eigvalsh(proj.n_clusters * pinched - rho))))
    res.append(CheckResult("operator", "pinching inequality", worst >= -1e-10, f"min eig {worst:.3e}"))

    a = _rand_herm(rng, 5)
    _, proj = linalg.eigh_cluster(_rand_herm(rng, 5))
    once = linalg.pinch(a, proj)
    twice = linalg.pinch(once, proj)
    gap = linalg.max_abs(twice - once)
    res.append(CheckResult("operator", "pinching idempotence", gap <= 1e-12, f"defect {gap:.3e}"))

    v = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    q, _ = np.linalg.qr(v)
    psd = q @ np.diag([0.7, 0.3]) @ q.conj().T  # rank-2 PSD on C^4
    s = linalg.support_projector(psd)
    f = linalg.matrix_function(psd, "power", power=-0.5)
    gap = linalg.max_abs(f - s @ f @ s)
    res.append(CheckResult("operator", "support-restricted functions commute with support projection", gap <= 1e-10, f"defect {gap:.3e}"))

    mono = True
    for i in range(min(trials, 20)):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        ps = [1.0, 1.5, 2.0, 3.0, math.inf]
        vals = [linalg.schatten_norm(g, p) for p in ps]
        mono = mono and all(vals[k] >= vals[k + 1] - 1e-10 for k in range(len(vals) - 1))
    res.append(CheckResult("operator", "Schatten norm monotone in p", mono, ""))
    return res


def _suite_states(seed: int, trials: int) -> list[CheckResult]:
    res = []
    worst_marg = 0.0
    worst_supp = 0.0
    for i in range(min(trials, 30)):
        cq = states.random_cq(seed * 577 + i, 2 + i % 3, 2 + (i + 1) % 2)
        dense = states.embed(cq)
        me = states.marginal_e(cq).mat
        worst_marg = max(worst_marg, linalg.max_abs(linalg.ptrace(dense.mat, dense.dims, (0,)) - me))
        p_joint = linalg.support_projector(dense.mat)
        p_e = linalg.support_projector(me)
        lift = np.kron(np.eye(cq.x_dim), p_e)
        worst_supp = max(worst_supp, linalg.max_abs(lift @ p_joint @ lift - p_joint))
    res.append(CheckResult("states", "embedding marginal consistency", worst_marg <= 1e-10, f"defect {worst_marg:.3e}"))
    res.append(CheckResult("states", "support containment supp(rho_XE) <= supp(I (x) rho_E)", worst_supp <= 1e-10, f"defect {worst_supp:.3e}"))
    return res


def _suite_symmetry(seed: int, trials: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    res = []
    worst_comm = 0.0
    worst_dom = 0.0
    for n in (2, 3):
        u = symmetry.universal_state(n, 2)
        for i in range(min(trials, 10)):
            twirled = symmetry.symmetrize(_rand_herm(rng, 2**n), n, 2)
            worst_comm = max(worst_comm, linalg.max_abs(u.omega.mat @ twirled - twirled @ u.omega.mat))
            sym = symmetry.symmetrize(states.random_density(seed * 31 + 10 * n + i, 2**n).mat, n, 2)
            tau = states.DensityOperator(sym, tuple([2] * n))
            worst_dom = min(worst_dom, symmetry.dominance_check(tau, u))
    res.append(CheckResult("symmetry", "universal state centrality", worst_comm <= 1e-10, f"defect {worst_comm:.3e}"))
    res.append(CheckResult("symmetry", "universal state dominance", worst_dom >= -1e-10, f"min eig {worst_dom:.3e}"))
    return res


def _suite_divergences(seed: int, trials: int) -> list[CheckResult]:
    res = []
    ok_foot = True
    for i in range(min(trials, 30)):
        r = states.random_density(seed * 7 + i, 3).mat
        s = states.random_density(seed * 11 + i, 3).mat
        f = divergences.fidelity(r, s)
        p = divergences.purified_distance(r, s)
        ok_foot = ok_foot and (f / 2 - 1e-12 <= 1 - p <= f + 1e-12)
    res.append(CheckResult("divergences", "fidelity vs purified distance envelope", ok_foot, ""))

    worst_dpi = 0.0
    cases = [
        divergences.DivergenceParams("umegaki"),
        divergences.DivergenceParams("sandwiched", 0.6),
        divergences.DivergenceParams("sandwiched", 2.0),
        divergences.DivergenceParams("petz", 0.5),
        divergences.DivergenceParams("petz", 1.5),
    ]
    for i in range(min(trials, 50)):
        r = states.random_density(seed * 101 + i, 4, dims=(2, 2))
        s = states.random_density(seed * 103 + i, 4, dims=(2, 2))
        params = cases[i % len(cases)]
        before = divergences.renyi_divergence(r.mat, s.mat, params)
        after = divergences.renyi_divergence(
            linalg.ptrace(r.mat, (2, 2), (1,)), linalg.ptrace(s.mat, (2, 2), (1,)), params
        )
        if math.isfinite(before):
            worst_dpi = max(worst_dpi, after - before)
    res.append(CheckResult("divergences", "data processing under partial trace", worst_dpi <= 1e-9, f"max increase {worst_dpi:.3e}"))

    worst_co = 0.0
    for i in range(10):
        r = states.random_density(seed * 13 + i, 3).mat
        s = states.random_density(seed * 17 + i, 3).mat
        for alpha in (0.6, 1.5):
            dz_a = divergences.renyi_divergence(r, s, divergences.DivergenceParams("alpha_z", alpha, z=alpha))
            dsw = divergences.renyi_divergence(r, s, divergences.DivergenceParams("sandwiched", alpha))
            dz_1 = divergences.renyi_divergence(r, s, divergences.DivergenceParams("alpha_z", alpha, z=1.0))
            dpz = divergences.renyi_divergence(r, s, divergences.DivergenceParams("petz", alpha))
            worst_co = max(worst_co, abs(dz_a - dsw), abs(dz_1 - dpz))
    res.append(CheckResult("divergences", "alpha-z coincidences (z=alpha, z=1)", worst_co <= 1e-10, f"max gap {worst_co:.3e}"))

    worst_le = 0.0
    conv = True
    for i in range(5):
        r = states.random_density(seed * 19 + i, 3).mat
        s = states.random_density(seed * 23 + i, 3).mat
        alpha = 0.3 + 0.1 * i
        direct = divergences.log_euclidean(r, s, alpha)
        var = divergences.log_euclidean_variational(r, s, alpha)
        conv = conv and var.converged
        worst_le = max(worst_le, abs(direct - var.value))
        alt = divergences.renyi_divergence(r, s, divergences.DivergenceParams("sandwiched", alpha))
        if direct < alt - 1e-10:
            worst_le = math.inf  # Log-Euclidean must dominate sandwiched
    res.append(CheckResult("divergences", "Log-Euclidean direct vs variational", worst_le <= 1e-6, f"max gap {worst_le:.3e}", converged=conv))
    return res


def _suite_conditional(seed: int, trials: int) -> list[CheckResult]:
    res = []
    opts = OptimizerOptions()
    worst_lb = 0.0
    for i in range(min(trials, 10)):
        st = states.random_cq(seed * 41 + i, 2, 2)
        hv = conditional.vn_cond_entropy(st)
        for alpha in (0.6, 0.75, 0.9):
            worst_lb = min(worst_lb, conditional.club_sandwiched(st, alpha, options=opts).value - hv)
    res.append(CheckResult("conditional", "club entropy lower-bounded by von Neumann", worst_lb >= -1e-6, f"min margin {worst_lb:.3e}"))

    st = states.random_cq(seed * 43, 2, 2)
    single = conditional.club_sandwiched(st, 0.7, options=opts).value
    double = conditional.club_sandwiched(states.cq_power(st, 2), 0.7, options=opts).value
    gap = abs(double - 2 * single)
    res.append(CheckResult("conditional", "additivity on tensor squares", gap <= 1e-5, f"gap {gap:.3e}"))

    st = states.random_cq(seed * 47, 2, 2)
    half_gap = abs(conditional.club_sandwiched(st, 0.5 + 1e-4, options=opts).value - conditional.h_down_half(st))
    vn_gap = abs(conditional.club_sandwiched(st, 0.999, options=opts).value - conditional.vn_cond_entropy(st))
    res.append(CheckResult("conditional", "endpoint continuity", half_gap <= 1e-3 and vn_gap <= 0.05, f"gaps {half_gap:.2e}, {vn_gap:.2e}"))

    worst_dual = 0.0
    conv = True
    for i in range(3):
        st = states.random_cq(seed * 53 + i, 2, 2)
        direct = conditional.club_sandwiched(st, 0.75, options=opts)
        dual = conditional.duality_club(st, 0.75, options=opts)
        conv = conv and direct.converged and dual.converged
        worst_dual = max(worst_dual, abs(direct.value - dual.value))
    res.append(CheckResult("conditional", "duality relation", worst_dual <= 1e-4, f"max gap {worst_dual:.3e}", converged=conv))

    worst_ord = 0.0
    for i in range(3):
        st = states.random_cq(seed * 59 + i, 2, 2)
        le = conditional.le_cond_entropy(st, 0.7, options=opts).value
        club = conditional.club_sandwiched(st, 0.7, options=opts).value
        worst_ord = max(worst_ord, le - club)
    res.append(CheckResult("conditional", "Log-Euclidean entropy below club entropy", worst_ord <= 1e-6, f"max excess {worst_ord:.3e}"))

    grew = True
    for i in range(3):
        st = states.random_cq(seed * 61 + i, 2, 2)
        rho = states.embed(st)
        vvec = np.zeros(2)
        vvec[i % 2] = 1.0
        sig_bad = np.outer(vvec, vvec)
        vals = [conditional.club_objective_depolarized(rho, sig_bad, 0.7, None, e) for e in (1e-2, 1e-3, 1e-4)]
        grew = grew and vals[0] < vals[1] < vals[2]
    res.append(CheckResult("conditional", "objective divergence outside the support condition", grew, ""))
    return res


def _suite_exponent(seed: int, trials: int) -> list[CheckResult]:
    res = []
    fig1 = stateio.fig1_state()
    solver = exponent.EpaSolver(fig1)
    hv = conditional.vn_cond_entropy(fig1)
    zero_ok = all(solver.epa(r)[0] == 0.0 for r in np.linspace(0, hv, 9))
    res.append(CheckResult("exponent", "zero exponent below the von Neumann rate", zero_ok, ""))

    worst_cc = 0.0
    rng = np.random.default_rng(seed)
    for i in range(min(trials, 20)):
        st = states.random_classical_cq(seed * 67 + i, 3, 3)
        s = exponent.EpaSolver(st)
        t1, t2 = sorted(rng.uniform(0.0, 1.0, size=2))
        r = float(rng.uniform(0.0, 2.0))
        mid = s.g((t1 + t2) / 2.0, r)
        worst_cc = min(worst_cc, mid - (s.g(t1, r) + s.g(t2, r)) / 2.0)
    res.append(CheckResult("exponent", "concavity of the reparametrized objective", worst_cc >= -1e-9, f"min margin {worst_cc:.3e}"))

    rc = solver.critical_rate()
    hh = solver.phi(1.0)
    tail_ok = True
    for r in np.linspace(rc + 1e-3, rc + 0.8, 7):
        v, a = solver.epa(float(r))
        tail_ok = tail_ok and abs(v - (r - hh)) <= 1e-6 and abs(a - 0.5) <= 1e-3
    res.append(CheckResult("exponent", "linear tail above the critical rate", tail_ok, f"R_c {rc:.6f}"))

    curve = solver.curve(0.0, 2.0 * math.log(2), 81)
    diffs = np.diff(curve.values) / np.diff(curve.rates)
    lip_ok = bool(np.all(diffs >= -1e-12) and np.all(diffs <= 1.0 + 1e-9))
    res.append(CheckResult("exponent", "exponent is nondecreasing and 1-Lipschitz in the rate", lip_ok, ""))
    return res


def _suite_simulator(seed: int, trials: int) -> list[CheckResult]:
    res = []
    fig1 = stateio.fig1_state()
    worst_marg = 0.0
    for i in range(min(trials, 10)):
        st = states.random_cq(seed * 71 + i, 2, 2)
        h = hashing.HashFunction(2, 2, 2, tuple(np.random.default_rng(seed + i).integers(0, 2, size=4)))
        hashed = hashing.apply_hash(st, 2, h)
        me = states.marginal_e(st).mat
        target = np.kron(me, me)
        got = sum(p * c.mat for p, c in zip(hashed.probs, hashed.cond))
        worst_marg = max(worst_marg, linalg.max_abs(got - target))
    res.append(CheckResult("simulator", "hashing preserves the side-information marginal", worst_marg <= 1e-12, f"defect {worst_marg:.3e}"))

    worst_margin = 0.0
    for n in (1, 2):
        for h in hashing.all_hashes(n, 2, 2):
            for m in hashing.oneshot_converse_check(fig1, n, h, (0.5, 0.7, 0.9)):
                worst_margin = min(worst_margin, m["margin_hashed"], m["margin_additive"])
    res.append(CheckResult("simulator", "one-shot converse margins", worst_margin >= -1e-9, f"min margin {worst_margin:.3e}"))

    st = states.random_cq(seed * 73, 2, 2)
    h = hashing.HashFunction(2, 2, 2, (0, 1, 1, 0))
    swapped = hashing.HashFunction(2, 2, 2, (1, 0, 0, 1))
    me = states.marginal_e(st)
    ideal = me.tensor(me)
    f1 = hashing.fidelity_to_ideal(hashing.apply_hash(st, 2, h), ideal)
    f2 = hashing.fidelity_to_ideal(hashing.apply_hash(st, 2, swapped), ideal)
    res.append(CheckResult("simulator", "fidelity invariant under output relabeling", abs(f1 - f2) <= 1e-12, f"gap {abs(f1 - f2):.3e}"))

    rep = hashing.best_hash_exhaustive(fig1, 2, 2)
    res.append(
        CheckResult(
            "simulator",
            "exponent estimate dominates the converse chain bound",
            rep.exponent_estimate >= rep.oneshot_bound - 1e-9,
            f"estimate {rep.exponent_estimate:.6f} vs bound {rep.oneshot_bound:.6f}",
        )
    )
    return res


def _suite_cli(seed: int, trials: int) -> list[CheckResult]:
    fig1 = stateio.fig1_state()
    curve = exponent.epa_curve(fig1, 0.0, 2.0 * math.log(2), 21)
    a = stateio.curve_csv(curve, math.log(2))
    b = stateio.curve_csv(curve, math.log(2))
    ok = a == b and "," in a.splitlines()[1] and ";" not in a
    return [CheckResult("cli", "CSV output deterministic and locale independent", ok, "")]


_SUITE_FNS = {
    "operator": _suite_operator,
    "states": _suite_states,
    "symmetry": _suite_symmetry,
    "divergences": _suite_divergences,
    "conditional": _suite_conditional,
    "exponent": _suite_exponent,
    "simulator": _suite_simulator,
    "cli": _suite_cli,
}
