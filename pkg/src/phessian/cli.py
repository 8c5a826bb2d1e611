"""Batch front end: every capability as a subcommand with reproducible
seeds and machine-readable JSON reports.

Exit status: 0 clean, 1 invariant violation (counterexample serialized in
the report), 2 usage error.  Identical config + seed gives byte-identical
reports except for the wall_time_s field.
"""

import argparse
import json
import sys
import time

import numpy as np

from .concavity import find_threshold, residual_batch, sample_hypothesis_points
from .cone import ConeSpec, maclaurin_report, sample_admissible, tech_ineq_report
from .errors import (
    AdmissibilityError,
    ConstructionError,
    NonconvergenceError,
    SearchFailureError,
)
from .solver import (
    AlexandrovProblem,
    GridFn,
    PseudoCheckConfig,
    alexandrov_check,
    load_grid_csv,
    load_problem_json,
    manufactured_problem,
    monitors,
    newton_solve,
    pseudo_check,
    residual_field,
    save_grid_csv,
)
from .spectral import jacobi_eigh, spectral_derivs
from .subsolution import BallProblem, KeyLemmaConfig, construct, key_lemma_check
from .symfun import identity_residuals, sigma


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _parse_range(text):
    """'3..8' -> [3..8], '4' -> [4]."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _parse_band(text):
    lo, hi = text.split(":")
    return float(lo), float(hi)


def _emit(report, output):
    text = json.dumps(_jsonable(report), indent=1, sort_keys=True) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _usage(message):
    print(message, file=sys.stderr)
    return 2


def _finish(name, config, results, violation, output, t0):
    report = {
        "subcommand": name,
        "config": _jsonable(config),
        "seed": config.get("seed"),
        "results": _jsonable(results),
        "violation": _jsonable(violation),
        "wall_time_s": time.perf_counter() - t0,
    }
    _emit(report, output)
    return 1 if violation is not None else 0


# ---------------------------------------------------------------------------
# subcommands

def cmd_identities(args):
    t0 = time.perf_counter()
    config = {
        "n": args.n, "trials": args.trials, "seed": args.seed, "tol": 1e-10
    }
    results = {}
    violation = None
    for n in _parse_range(args.n):
        for p in range(1, n + 1):
            rng = np.random.default_rng([args.seed, n, p])
            mu = rng.uniform(-3.0, 3.0, (args.trials, n))
            res = identity_residuals(p, mu)
            worst_name, worst = None, 0.0
            worst_case = None
            for name, vals in res.items():
                vals = np.atleast_1d(np.asarray(vals))
                i = int(np.argmax(np.abs(vals)))
                if abs(vals[i]) > worst:
                    worst = float(abs(vals[i]))
                    worst_name = name
                    worst_case = mu[i] if len(vals) == len(mu) else mu[0]
            results[f"n{n}_p{p}"] = {"max_residual": worst, "identity": worst_name}
            if worst > 1e-10 and violation is None:
                violation = {
                    "n": n, "p": p, "identity": worst_name,
                    "mu": worst_case, "residual": worst,
                }
    return _finish("identities", config, results, violation, args.output, t0)


RATIO_KEYS = ("ratio_minor_constant", "ratio_mu1_constant")


def cmd_cone(args):
    t0 = time.perf_counter()
    config = {
        "n": args.n, "p": args.p, "trials": args.trials, "seed": args.seed,
        "tol": 1e-10,
    }
    spec = ConeSpec(args.n, args.p)
    rng = np.random.default_rng([args.seed, args.n, args.p])
    samples = np.sort(sample_admissible(args.n, args.p, args.trials, rng), axis=1)
    mac_worst = np.inf
    strict_worst = {}
    ratios = {k: 0.0 for k in RATIO_KEYS}
    violation = None
    for mu in samples:
        mac = maclaurin_report(mu, spec)
        m = min(mac.values())
        mac_worst = min(mac_worst, m)
        if m < -1e-10 and violation is None:
            violation = {"kind": "maclaurin", "mu": mu, "slack": m}
        if args.p >= 2:
            tech = tech_ineq_report(mu, spec)
            for k, v in tech.items():
                if k in RATIO_KEYS:
                    ratios[k] = max(ratios[k], v)
                else:
                    strict_worst[k] = min(strict_worst.get(k, np.inf), v)
                    if v <= 0 and violation is None:
                        violation = {"kind": k, "mu": mu, "slack": v}
    results = {
        "maclaurin_min_slack": mac_worst,
        "technical_min_slacks": dict(sorted(strict_worst.items())),
        "empirical_constants": ratios if args.p >= 2 else {},
    }
    return _finish("cone", config, results, violation, args.output, t0)


def cmd_spectral_derivs(args):
    t0 = time.perf_counter()
    config = {
        "n": args.n, "p": args.p, "trials": args.trials, "seed": args.seed,
        "fd_step": 1e-5, "tol": 1e-6,
    }
    rng = np.random.default_rng([args.seed, args.n, args.p])
    worst = 0.0
    worst_mu = None
    eps = 1e-5
    for _ in range(args.trials):
        gaps = 0.5 + rng.uniform(0.0, 1.0, args.n)
        mu = rng.uniform(-1.0, 1.0) + np.cumsum(gaps)
        if sigma(args.p, mu) <= 0:
            continue
        D = np.diag(mu)
        der = spectral_derivs(args.p, mu)
        # independent check: FD of sigma_p(eigs(diag(mu) + E)) entrywise
        fd = np.zeros((args.n, args.n))
        for j in range(args.n):
            for k in range(j, args.n):
                E = np.zeros((args.n, args.n))
                E[j, k] = E[k, j] = eps
                sp = sigma(args.p, jacobi_eigh(D + E))
                sm = sigma(args.p, jacobi_eigh(D - E))
                fd[j, k] = fd[k, j] = (sp - sm) / (2 * eps)
        err = float(np.max(np.abs(der.grad_sigma - fd)))
        if err > worst:
            worst, worst_mu = err, mu
    violation = None
    if worst > 1e-6:
        violation = {"mu": worst_mu, "max_error": worst}
    results = {"max_gradient_error": worst}
    return _finish("spectral-derivs", config, results, violation, args.output, t0)


def cmd_concavity_fuzz(args):
    t0 = time.perf_counter()
    config = {
        "mode": args.mode, "n": args.n, "p": args.p, "tau": args.tau,
        "eps": args.eps, "a": args.a, "mu_n_min": args.mu_n_min,
        "trials": args.trials, "seed": args.seed, "tol": -1e-9,
    }
    rng = np.random.default_rng([args.seed, args.n])
    if args.mode == "large_mu1":
        if args.a is None:
            return _usage("concavity-fuzz: --a is required for mode large_mu1")
        mus, ws = sample_hypothesis_points(
            args.n, args.tau, args.eps, args.a, args.trials, rng
        )
        guaranteed = True
    else:
        if args.mode == "small_mu1" and args.p is None:
            return _usage("concavity-fuzz: --p is required for mode small_mu1")
        r = args.n - 1 if args.mode == "theorem" else args.p
        mus = np.sort(sample_admissible(args.n, r, args.trials, rng), axis=1)
        if args.mu_n_min is not None:
            mus[:, -1] += args.mu_n_min
        z = rng.normal(size=(args.trials, args.n)) + 1j * rng.normal(
            size=(args.trials, args.n)
        )
        ws = z / np.linalg.norm(z, axis=1, keepdims=True)
        # without a certified eigenvalue threshold the sweep is exploratory
        guaranteed = False
    res = residual_batch(
        mus, ws, args.mode, args.tau, args.eps, a=args.a, p=args.p
    )
    i = int(np.argmin(res))
    results = {
        "min_residual": float(res[i]),
        "guaranteed_regime": guaranteed,
        "trials": int(len(res)),
    }
    violation = None
    if guaranteed and res[i] < -1e-9:
        violation = {"mu": mus[i], "w_re": ws[i].real, "w_im": ws[i].imag,
                     "residual": float(res[i])}
    return _finish("concavity-fuzz", config, results, violation, args.output, t0)


def cmd_find_m(args):
    t0 = time.perf_counter()
    band = _parse_band(args.sigma)
    config = {
        "n": args.n, "p": args.p, "tau": args.tau, "eps": args.eps,
        "sigma": args.sigma, "trials": args.trials, "seed": args.seed,
    }
    try:
        out = find_threshold(
            args.n, args.p, args.tau, args.eps, band, args.trials, args.seed
        )
    except SearchFailureError as exc:
        violation = {"kind": "search_failure", "detail": str(exc),
                     "counterexample": getattr(exc, "counterexample", None)}
        return _finish("find-m", config, {}, violation, args.output, t0)
    results = {
        "M_hat": out.M_hat,
        "trials": out.trials,
        "worst_residual": out.worst_residual,
    }
    return _finish("find-m", config, results, violation=None,
                   output=args.output, t0=t0)


def cmd_subsolution(args):
    t0 = time.perf_counter()
    config = {
        "n": args.n, "p": args.p, "alpha": args.alpha, "phi": args.phi,
        "radius": args.radius, "resolution": args.resolution, "seed": None,
    }

    def u(pts):
        return 0.5 * (np.sum(pts**2, axis=-1) - args.radius**2)

    def psi(pts):
        return np.zeros(len(pts))

    prob = BallProblem(
        n=args.n, radius=args.radius, resolution=args.resolution,
        p=args.p, alpha=args.alpha, psi=psi,
        phi_tilde=lambda pts, t: np.full(len(pts), args.phi), u=u,
    )
    try:
        out = construct(prob)
    except ConstructionError as exc:
        violation = {"kind": "construction_failure", "detail": str(exc),
                     "node": getattr(exc, "node", None)}
        return _finish("subsolution", config, {}, violation, args.output, t0)
    results = {
        "A": out.A, "B": out.B, "eps1": out.eps1, "eps2": out.eps2,
        "worst_slack": out.worst_slack,
    }
    violation = None
    if out.worst_slack < 0:
        violation = {"kind": "subsolution_slack", "worst_slack": out.worst_slack}
    return _finish("subsolution", config, results, violation, args.output, t0)


def cmd_key_lemma(args):
    t0 = time.perf_counter()
    config = {
        "n": args.n, "p": args.p, "trials": args.trials, "seed": args.seed,
        "R": args.R, "directions": args.directions, "tol": -1e-9,
    }
    rng = np.random.default_rng([args.seed, args.n, args.p])
    verified = 0
    undetermined = 0
    worst = np.inf
    violation = None
    for i in range(args.trials):
        nu = rng.uniform(0.2, 3.0, args.n)
        if sigma(args.p, nu) <= 0 or np.any(
            [sigma(q, nu) <= 0 for q in range(1, args.p)]
        ):
            undetermined += 1
            continue
        mu = rng.uniform(-1.0, 4.0, args.n)
        cfg = KeyLemmaConfig(
            n=args.n, p=args.p, delta=rng.uniform(0.1, 1.0), R=args.R,
            a=rng.uniform(0.5, 2.0), mu=mu, nu=nu,
        )
        lhs, rhs, ok = key_lemma_check(cfg, directions=args.directions, seed=i)
        if not ok:
            undetermined += 1
            continue
        verified += 1
        worst = min(worst, lhs - rhs)
        if lhs - rhs < -1e-9 and violation is None:
            violation = {"mu": mu, "nu": nu, "delta": cfg.delta, "a": cfg.a,
                         "lhs": lhs, "rhs": rhs}
    results = {
        "verified": verified,
        "hypothesis_undetermined": undetermined,
        "min_slack": None if verified == 0 else float(worst),
    }
    return _finish("key-lemma", config, results, violation, args.output, t0)


def _smooth_perturbation(grid, rng, scale):
    x1, x2 = grid.meshgrid()
    f = np.zeros(grid.sizes)
    for k1 in range(3):
        for k2 in range(3):
            a, b = rng.normal(size=2)
            f += a * np.cos(k1 * x1 + k2 * x2) + b * np.sin(k1 * x1 + k2 * x2)
    f -= np.mean(f)
    return scale * f / np.max(np.abs(f))


def cmd_solve(args):
    t0 = time.perf_counter()
    config = {
        "problem": args.problem, "initial": args.initial,
        "manufactured": args.manufactured, "p": args.p, "tol": args.tol,
        "perturb": args.perturb, "seed": args.seed, "solution": args.solution,
    }
    if args.manufactured and args.problem:
        return _usage("solve: --manufactured and --problem are mutually exclusive")
    if args.manufactured:
        spec, grid, ustar = manufactured_problem(args.manufactured, p=args.p)
        rng = np.random.default_rng(args.seed)
        bump = _smooth_perturbation(
            grid, rng, args.perturb * np.max(np.abs(ustar.values))
        )
        u0 = GridFn(grid, ustar.values + bump)
    elif args.problem:
        if not args.initial:
            return _usage("solve: --initial grid CSV required with --problem")
        spec = load_problem_json(args.problem)
        u0 = load_grid_csv(args.initial)
    else:
        return _usage("solve: either --manufactured or --problem is required")

    try:
        sol, trace = newton_solve(spec, u0, tol=args.tol)
    except (NonconvergenceError, AdmissibilityError) as exc:
        violation = {"kind": type(exc).__name__, "detail": str(exc),
                     "trace": getattr(exc, "trace", None)}
        return _finish("solve", config, {}, violation, args.output, t0)

    rep = monitors(sol, spec)
    res = residual_field(sol, spec).values
    results = {
        "iterations": len(trace),
        "trace": trace,
        "monitors": {
            "osc_u": rep.osc_u, "max_grad": rep.max_grad,
            "max_hess": rep.max_hess, "max_lambda_n": rep.max_lambda_n,
            "min_lambda_1": rep.min_lambda_1,
        },
        "final_residual": float(np.max(np.abs(res - np.mean(res)))),
        "raw_residual": float(np.max(np.abs(res))),
    }
    if args.solution:
        save_grid_csv(args.solution, sol)
    return _finish("solve", config, results, violation=None,
                   output=args.output, t0=t0)


def cmd_alexandrov(args):
    t0 = time.perf_counter()
    config = {
        "case": args.case, "d": args.d, "eps": args.eps,
        "resolution": args.resolution, "seed": None,
    }
    if args.case == "quadratic":
        w = lambda pts: np.sum(pts**2, axis=-1)  # noqa: E731
    elif args.case == "quartic":
        w = lambda pts: np.sum(pts**2, axis=-1) ** 2 + np.sum(pts**2, axis=-1)  # noqa: E731
    else:
        w = lambda pts: np.cosh(np.linalg.norm(pts, axis=-1)) - 1.0  # noqa: E731
    prob = AlexandrovProblem(
        center=(0.0, 0.0), d=args.d, resolution=args.resolution,
        w=w, eps=args.eps,
    )
    try:
        lhs, rhs, contact = alexandrov_check(prob)
    except AssertionError as exc:
        violation = {"kind": "measure_bound", "detail": str(exc)}
        return _finish("alexandrov", config, {}, violation, args.output, t0)
    results = {
        "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs,
        "contact_nodes": int(contact.sum()),
    }
    return _finish("alexandrov", config, results, violation=None,
                   output=args.output, t0=t0)


def cmd_pseudo_check(args):
    t0 = time.perf_counter()
    config = {
        "size": args.size, "p": args.p, "delta1": args.delta1, "M1": args.M1,
        "delta2": args.delta2, "M2": args.M2, "seed": None,
    }
    spec, grid, ustar = manufactured_problem(args.size, p=args.p)
    cfg = PseudoCheckConfig(
        delta1=args.delta1, M1=args.M1, delta2=args.delta2, M2=args.M2,
        ubar=ustar,
    )
    rep = pseudo_check(ustar, cfg, spec)
    results = {
        "worst_sub_slack": rep.worst_sub_slack,
        "sub_violations": rep.sub_violations,
        "worst_super_slack": rep.worst_super_slack,
        "super_violations": rep.super_violations,
        "super_nodes": rep.super_nodes,
        "note": rep.note,
    }
    violation = None
    if rep.sub_violations or rep.super_violations:
        violation = {"kind": "pseudo_condition", "report": results}
    return _finish("pseudo-check", config, results, violation, args.output, t0)


# ---------------------------------------------------------------------------
# argument parsing

def build_parser():
    parser = argparse.ArgumentParser(
        prog="phessian",
        description="Verification toolkit for p-Hessian equations.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed=True):
        p.add_argument("--output", default=None, help="report path (default stdout)")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("identities", help="fuzz the sigma identity family")
    p.add_argument("--n", default="3..8", help="dimension or range like 3..8")
    p.add_argument("--trials", type=int, default=1000)
    common(p)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("cone", help="Maclaurin and technical inequality sweep")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--trials", type=int, default=1000)
    common(p)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("spectral-derivs", help="derivative formulas vs finite differences")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_spectral_derivs)

    p = sub.add_parser("concavity-fuzz", help="concavity inequality sweeps")
    p.add_argument("--mode", choices=("large_mu1", "small_mu1", "theorem"),
                   default="large_mu1")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--mu-n-min", type=float, default=None)
    p.add_argument("--trials", type=int, default=1000)
    common(p)
    p.set_defaults(func=cmd_concavity_fuzz)

    p = sub.add_parser("find-m", help="bisect the eigenvalue threshold")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--sigma", default="0.5:2", help="target band lo:hi")
    p.add_argument("--trials", type=int, default=1000)
    common(p)
    p.set_defaults(func=cmd_find_m)

    p = sub.add_parser("subsolution", help="exponential-bump subsolution on a ball")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--phi", type=float, default=0.1)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--resolution", type=int, default=65)
    common(p, seed=False)
    p.set_defaults(func=cmd_subsolution)

    p = sub.add_parser("key-lemma", help="level-set comparison lemma sweep")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--R", type=float, default=60.0)
    p.add_argument("--directions", type=int, default=500)
    common(p)
    p.set_defaults(func=cmd_key_lemma)

    p = sub.add_parser("solve", help="damped Newton on the periodic problem")
    p.add_argument("--problem", default=None, help="equation JSON path")
    p.add_argument("--initial", default=None, help="initial grid CSV path")
    p.add_argument("--manufactured", type=int, default=None,
                   help="grid size for the built-in test problem")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--perturb", type=float, default=0.05)
    p.add_argument("--solution", default=None, help="write solution CSV here")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("alexandrov", help="contact-set measure estimate")
    p.add_argument("--case", choices=("quadratic", "quartic", "cosh"),
                   default="quadratic")
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--resolution", type=int, default=65)
    common(p, seed=False)
    p.set_defaults(func=cmd_alexandrov)

    p = sub.add_parser("pseudo-check", help="pseudo-solution necessary conditions")
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--delta1", type=float, default=0.1)
    p.add_argument("--M1", type=float, default=10.0)
    p.add_argument("--delta2", type=float, default=0.5)
    p.add_argument("--M2", type=float, default=1.0)
    common(p, seed=False)
    p.set_defaults(func=cmd_pseudo_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
