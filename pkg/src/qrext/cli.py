"""Command-line front end.

Subcommands: entropy, curve, critical-rate, oneshot, simulate, verify.
Rates and entropies are reported in bits by default (``--log-base e`` switches
to nats); the library itself works in nats throughout.

Exit codes: 0 success, 1 validation error, 2 numerical non-convergence,
3 property violation detected by verify/oneshot.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import conditional, exponent, hashing, stateio, verify
from ._optimize import OptimizerOptions
from .linalg import DomainError, UnsupportedSizeError, ValidationError
from .states import CQState

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NONCONVERGENCE = 2
EXIT_VIOLATION = 3

_KINDS = ("vn", "sandwiched_down", "sandwiched_up", "petz_down", "petz_up", "club", "le")


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(ValueError):
    pass


def _build_parser() -> _Parser:
    p = _Parser(prog="qrext", description="Conditional Renyi entropies and randomness-extraction exponents.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state=True):
        if state:
            sp.add_argument("--state", required=True, help="state file (JSON); 'fig1.json' resolves to the bundled example")
        sp.add_argument("--log-base", choices=("2", "e"), default="2", help="reporting base (default bits)")
        sp.add_argument("--seed", type=int, default=7, help="seed for optimizer multistarts / random suites")
        sp.add_argument("--tol", type=float, default=1e-10, help="optimizer objective tolerance")

    sp = sub.add_parser("entropy", help="evaluate one conditional entropy")
    common(sp)
    sp.add_argument("--kind", choices=_KINDS, default="club")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--lambda", dest="lam", default="auto", help="tilting weight <= 0, or 'auto' for (1-2a)/(1-a)")

    sp = sub.add_parser("curve", help="exponent curve on a rate grid")
    common(sp)
    sp.add_argument("--rmin", type=float, required=True)
    sp.add_argument("--rmax", type=float, required=True)
    sp.add_argument("--steps", type=int, default=101)
    sp.add_argument("--out", default=None, help="CSV output path (default: stdout)")

    sp = sub.add_parser("critical-rate", help="critical rate and the curve landmarks")
    common(sp)

    sp = sub.add_parser("oneshot", help="one-shot converse margins over all hash tables")
    common(sp)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--zdim", type=int, default=2)
    sp.add_argument("--alpha", type=float, default=None, help="single alpha; default grid 0.5..0.9")

    sp = sub.add_parser("simulate", help="finite-n best-hash exponent estimates")
    common(sp)
    sp.add_argument("--rate", type=float, required=True)
    sp.add_argument("--nmax", type=int, default=2)
    sp.add_argument("--zdim", type=int, default=None, help="fixed |Z| overriding the rate rule")
    sp.add_argument("--out", default=None, help="CSV output path")

    sp = sub.add_parser("verify", help="run the invariant suites")
    common(sp, state=False)
    sp.add_argument("--suite", default="all", help="one of %s or 'all'" % (verify.SUITES,))
    sp.add_argument("--trials", type=int, default=50)
    return p


def _log_scale(args) -> float:
    return math.log(2.0) if args.log_base == "2" else 1.0


def _unit(args) -> str:
    return "bits" if args.log_base == "2" else "nats"


def _options(args) -> OptimizerOptions:
    return OptimizerOptions(f_tol=args.tol, seed=args.seed)


def _require_cq(state, what: str) -> CQState:
    if not isinstance(state, CQState):
        raise ValidationError(f"{what} requires a classical-quantum state file (kind 'cq')")
    return state


def _cmd_entropy(args) -> int:
    state = stateio.load_state(args.state)
    scale = _log_scale(args)
    lam = None if args.lam == "auto" else float(args.lam)
    query = conditional.EntropyQuery(args.kind, args.alpha, lam)
    rep = conditional.conditional_entropy(state, query, _options(args))
    lam_txt = "" if args.kind in ("vn",) else f", alpha={args.alpha}" + ("" if args.kind not in ("club", "le") else f", lambda={args.lam}")
    print(f"H[{args.kind}{lam_txt}] = {rep.value / scale:.9g} {_unit(args)}")
    if not rep.converged:
        print("warning: optimizer did not converge; value is the best bound found", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def _cmd_curve(args) -> int:
    state = _require_cq(stateio.load_state(args.state), "curve")
    scale = _log_scale(args)
    solver = exponent.EpaSolver(state, _options(args))
    curve = solver.curve(args.rmin * scale, args.rmax * scale, args.steps)
    text = stateio.curve_csv(curve, scale)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.steps} rows to {args.out}")
    else:
        sys.stdout.write(text)
    print(
        f"# H(X|E) = {curve.h_vn / scale:.9g} {_unit(args)}; "
        f"H_half = {curve.h_half / scale:.9g}; R_c = {curve.r_critical / scale:.9g}",
        file=sys.stderr,
    )
    return EXIT_NONCONVERGENCE if solver.flagged else EXIT_OK


def _cmd_critical_rate(args) -> int:
    state = _require_cq(stateio.load_state(args.state), "critical-rate")
    scale = _log_scale(args)
    solver = exponent.EpaSolver(state, _options(args))
    rc = solver.critical_rate()
    print(f"R_c      = {rc / scale:.9g} {_unit(args)}")
    print(f"H(X|E)   = {conditional.vn_cond_entropy(state) / scale:.9g} {_unit(args)}")
    print(f"H_half   = {solver.phi(1.0) / scale:.9g} {_unit(args)}")
    return EXIT_NONCONVERGENCE if solver.flagged else EXIT_OK


def _cmd_oneshot(args) -> int:
    state = _require_cq(stateio.load_state(args.state), "oneshot")
    grid = (args.alpha,) if args.alpha is not None else hashing.DEFAULT_ALPHA_GRID
    opts = _options(args)
    worst = {a: math.inf for a in grid}
    count = 0
    for h in hashing.all_hashes(args.n, state.x_dim, args.zdim):
        count += 1
        for m in hashing.oneshot_converse_check(state, args.n, h, grid, opts):
            worst[m["alpha"]] = min(worst[m["alpha"]], m["margin_hashed"], m["margin_additive"])
    print(f"checked {count} hash tables (n={args.n}, |Z|={args.zdim})")
    violated = False
    for a in grid:
        status = "OK " if worst[a] >= -1e-9 else "VIOLATED"
        violated = violated or worst[a] < -1e-9
        print(f"alpha={a:<4} min margin = {worst[a]: .6e}  {status}")
    return EXIT_VIOLATION if violated else EXIT_OK


def _cmd_simulate(args) -> int:
    state = _require_cq(stateio.load_state(args.state), "simulate")
    scale = _log_scale(args)
    rate = args.rate * scale
    z_rule = (lambda n, r: args.zdim) if args.zdim is not None else None
    reports = hashing.finite_n_table(state, rate, args.nmax, z_rule=z_rule, options=_options(args))
    header = f"{'n':>2} {'|Z|':>4} {'best_F':>12} {'exp_est':>12} {'oneshot':>12} {'E_pa':>12} pass"
    print(header + f"   ({_unit(args)})")
    rows = []
    ok = True
    for r in reports:
        ok = ok and r.passed
        print(
            f"{r.n:>2} {r.z_dim:>4} {r.best_fidelity:>12.6g} {r.exponent_estimate / scale:>12.6g} "
            f"{r.oneshot_bound / scale:>12.6g} {r.epa_theory / scale:>12.6g} {str(r.passed):>4}"
        )
        rows.append(
            f"{r.n},{r.z_dim},{r.best_fidelity:.9g},{r.exponent_estimate / scale:.9g},"
            f"{r.oneshot_bound / scale:.9g},{r.epa_theory / scale:.9g},{r.passed}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("n,z_dim,best_fidelity,exponent_estimate,oneshot_bound,epa_theory,pass\n")
            fh.write("\n".join(rows) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def _cmd_verify(args) -> int:
    names = verify.SUITES if args.suite == "all" else (args.suite,)
    results = verify.run_suites(names, args.seed, args.trials)
    any_fail = False
    any_nonconv = False
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        any_fail = any_fail or not r.passed
        any_nonconv = any_nonconv or not r.converged
        detail = f"  ({r.detail})" if r.detail else ""
        print(f"[{mark}] {r.suite}: {r.name}{detail}")
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    if any_fail:
        return EXIT_VIOLATION
    if any_nonconv:
        return EXIT_NONCONVERGENCE
    return EXIT_OK


_COMMANDS = {
    "entropy": _cmd_entropy,
    "curve": _cmd_curve,
    "critical-rate": _cmd_critical_rate,
    "oneshot": _cmd_oneshot,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValidationError, DomainError, UnsupportedSizeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
