"""Command-line front end.

Machine-readable results go to stdout (CSV rows or single values); progress
and diagnostics go to stderr. Exit codes: 0 success, 1 domain/parameter
error, 2 I/O error. Every command that involves randomness takes a mandatory
seed, so reruns are byte-identical.
"""

from __future__ import annotations

import os

# Pin BLAS pools before numpy loads: solves here are small, and per-call
# threading must not influence results or scheduling.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import argparse
import json
import math
import sys

from .analysis import (
    BoundInputs,
    RipQuery,
    bagging_error_bound,
    jobs_error_bound,
    rip_constant_exhaustive,
    sample_complexity_jobs,
)
from .estimators import METHODS, SensingProblem, bagging, bolasso, jobs, l1_min
from .experiments import (
    InstanceSpec,
    SweepSpec,
    default_lambda_grid,
    generate_instance,
    ratio_subset_size,
    recovery_snr,
    run_sweep,
)
from .linalg import DEFAULT_REL_TOL, normalize_columns
from .matrixio import read_matrix, read_vector, write_matrix
from .sampling import (
    SCHEMES,
    SamplingPlan,
    distinct_count_pmf,
    distinct_lower_bound,
    distinct_tail,
)
from .solver import SolverConfig, SolverDivergenceError


class CliParameterError(Exception):
    """Bad flags or flag values (maps to exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); remap to parameter error
        raise CliParameterError(message)


def _fmt(v: float) -> str:
    return repr(float(v))


def _add_solver_flags(p):
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="penalty weight (>= 0)")
    p.add_argument("--rho", type=float, default=1.0, help="ADMM penalty (default 1)")
    p.add_argument("--max-iter", type=int, default=2000, help="iteration cap")
    p.add_argument("--eps-abs", type=float, default=1e-6, help="absolute tolerance")
    p.add_argument("--eps-rel", type=float, default=1e-4, help="relative tolerance")


def build_parser() -> _Parser:
    parser = _Parser(prog="bootsparse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic instance to disk")
    p.add_argument("--m", type=int, required=True, help="measurement count")
    p.add_argument("--n", type=int, required=True, help="signal dimension")
    p.add_argument("--s", type=int, required=True, help="number of nonzeros")
    p.add_argument("--snr-db", type=float, required=True,
                   help="signal-to-noise ratio in dB; inf for noiseless")
    p.add_argument("--seed", type=int, required=True, help="instance seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--literal-noise", action="store_true",
                   help="noise variance 10^(-snr/10)||Ax||^2 without /m")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one recovery on instance files")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--A", required=True, help="sensing matrix file")
    p.add_argument("--y", required=True, help="measurement vector file")
    p.add_argument("--x-star", help="true signal file (enables the RSNR column)")
    _add_solver_flags(p)
    p.add_argument("--K", type=int, help="number of subsets (ensemble methods)")
    p.add_argument("--L", type=int, help="subset size in rows")
    p.add_argument("--ratio", type=float, help="subset size as a fraction of m")
    p.add_argument("--scheme", choices=SCHEMES, default="bootstrap")
    p.add_argument("--seed", type=int, help="subset seed (ensemble methods)")
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL,
                   help="support threshold for bolasso")
    p.add_argument("--out", help="write the estimate to this file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="run a (method x m x K x L/m) sweep to CSV")
    p.add_argument("--config", help="JSON file with the sweep specification")
    p.add_argument("--methods", help="comma list from {jobs,bagging,bolasso,l1}")
    p.add_argument("--m-list", help="comma list of measurement counts")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--K-list", help="comma list of subset counts")
    p.add_argument("--ratio-list", help="comma list of L/m ratios in (0,1]")
    p.add_argument("--lambda-grid", help="comma list of penalties (ascending)")
    p.add_argument("--trials", type=int)
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--master-seed", type=int)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--threads", type=int, default=0,
                   help="worker threads; 0 = one per CPU (never changes output)")
    p.add_argument("--timing", action="store_true",
                   help="record measured wall_ms (breaks byte reproducibility)")
    p.add_argument("--literal-noise", action="store_true")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--eps-abs", type=float, default=1e-6)
    p.add_argument("--eps-rel", type=float, default=1e-4)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rip", help="exhaustive isometry constant of a matrix file")
    p.add_argument("--A", required=True, help="matrix file (columns normalized internally)")
    p.add_argument("--s", type=int, required=True, help="sparsity order")
    p.add_argument("--cap", type=int, default=2_000_000,
                   help="max number of column subsets to enumerate")
    p.set_defaults(func=cmd_rip)

    p = sub.add_parser("bounds", help="evaluate an error/probability bound")
    p.add_argument("--theorem", required=True,
                   choices=["jobs-exact", "jobs-general", "bagging-exact", "bagging-general"])
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--z-l2", type=float, required=True,
                   help="||z||_2; for jobs-general supply ||Ae+z||_2 here")
    p.add_argument("--z-linf", type=float, required=True)
    p.add_argument("--s", type=int, default=0, help="sparsity order (general modes)")
    p.add_argument("--e-l1", type=float, default=0.0)
    p.add_argument("--e-l2", type=float, default=0.0)
    p.add_argument("--e-linf", type=float, default=0.0)
    p.add_argument("--a-inf1", type=float, default=0.0,
                   help="largest row l1 norm of the sensing matrix")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("complexity", help="distinct-sample complexity evaluator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True,
                   help="distinct-count failure level in (0,1)")
    p.add_argument("--mu", type=float, required=True,
                   help="target overall failure level in (0,1)")
    p.add_argument("--beta", type=float, default=1.0, help="universal constant")
    p.add_argument("--delta", type=float, default=math.sqrt(2) - 1 - 1e-12)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("birthday", help="distinct-count pmf / tail / lower bound")
    p.add_argument("--m", type=int, required=True, help="pool size")
    p.add_argument("--L", type=int, required=True, help="draws with replacement")
    p.add_argument("--d", type=int, help="print P(V >= d) instead of the pmf")
    p.add_argument("--alpha", type=float,
                   help="print the largest d with P(V >= d) >= 1 - alpha")
    p.set_defaults(func=cmd_birthday)

    return parser


def cmd_generate(args) -> int:
    spec = InstanceSpec(args.m, args.n, args.s, args.snr_db, args.seed)
    A, x_star, z, y = generate_instance(spec, literal_noise=args.literal_noise)
    os.makedirs(args.out, exist_ok=True)
    write_matrix(os.path.join(args.out, "A.txt"), A)
    write_matrix(os.path.join(args.out, "x_star.txt"), x_star)
    write_matrix(os.path.join(args.out, "y.txt"), y)
    write_matrix(os.path.join(args.out, "z.txt"), z)
    print(f"wrote instance files to {args.out}", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    A = read_matrix(args.A)
    y = read_vector(args.y)
    prob = SensingProblem(A, y)
    cfg = SolverConfig(lam=args.lam, rho=args.rho, max_iter=args.max_iter,
                       eps_abs=args.eps_abs, eps_rel=args.eps_rel)
    if args.method == "l1":
        result = l1_min(prob, cfg)
    else:
        if args.K is None:
            raise CliParameterError(f"--K is required for method {args.method}")
        if args.seed is None:
            raise CliParameterError(f"--seed is required for method {args.method}")
        if (args.L is None) == (args.ratio is None):
            raise CliParameterError("give exactly one of --L or --ratio")
        L = args.L if args.L is not None else ratio_subset_size(args.ratio, prob.m)
        plan = SamplingPlan(prob.m, L, args.K, args.scheme, args.seed)
        if args.method == "jobs":
            result = jobs(prob, plan, cfg)
        elif args.method == "bagging":
            result = bagging(prob, plan, cfg)
        else:
            result = bolasso(prob, plan, cfg, rel_tol=args.rel_tol)
    rsnr = ""
    if args.x_star:
        rsnr = _fmt(recovery_snr(result.x_hat, read_vector(args.x_star)))
    support = " ".join(str(i) for i in sorted(result.support))
    iterations = sum(r.iterations for r in result.solver_reports)
    converged = all(r.converged for r in result.solver_reports)
    print("method,rsnr_db,support_size,support,iterations,converged")
    print(f"{result.method},{rsnr},{len(result.support)},{support},"
          f"{iterations},{'true' if converged else 'false'}")
    if args.out:
        write_matrix(args.out, result.x_hat)
    return 0


def _split(text, conv):
    return [conv(tok) for tok in text.split(",") if tok != ""]


def cmd_sweep(args) -> int:
    conf = {}
    if args.config:
        with open(args.config) as fh:
            conf = json.load(fh)
    if args.methods is not None:
        conf["methods"] = _split(args.methods, str)
    if args.m_list is not None:
        conf["m_list"] = _split(args.m_list, int)
    if args.n is not None:
        conf["n"] = args.n
    if args.s is not None:
        conf["s"] = args.s
    if args.snr_db is not None:
        conf["snr_db"] = args.snr_db
    if args.K_list is not None:
        conf["K_list"] = _split(args.K_list, int)
    if args.ratio_list is not None:
        conf["ratio_list"] = _split(args.ratio_list, float)
    if args.lambda_grid is not None:
        conf["lambda_grid"] = _split(args.lambda_grid, float)
    if args.trials is not None:
        conf["trials"] = args.trials
    if args.scheme is not None:
        conf["scheme"] = args.scheme
    if args.master_seed is not None:
        conf["master_seed"] = args.master_seed
    conf.setdefault("lambda_grid", default_lambda_grid())
    conf.setdefault("K_list", [1])
    conf.setdefault("ratio_list", [1.0])
    missing = [k for k in ("methods", "m_list", "n", "s", "snr_db", "trials") if k not in conf]
    if missing:
        raise CliParameterError(f"missing sweep fields (config or flags): {missing}")
    spec = SweepSpec(
        methods=tuple(conf["methods"]),
        m_list=tuple(conf["m_list"]),
        n=int(conf["n"]),
        s=int(conf["s"]),
        snr_db=float(conf["snr_db"]),
        K_list=tuple(conf["K_list"]),
        ratio_list=tuple(conf["ratio_list"]),
        lambda_grid=tuple(conf["lambda_grid"]),
        trials=int(conf["trials"]),
        scheme=conf.get("scheme", "bootstrap"),
        master_seed=int(conf.get("master_seed", 0)),
    )
    records = run_sweep(
        spec,
        args.out,
        threads=args.threads,
        timing=args.timing,
        literal_noise=bool(conf.get("literal_noise", False)) or args.literal_noise,
        rho=args.rho,
        max_iter=args.max_iter,
        eps_abs=args.eps_abs,
        eps_rel=args.eps_rel,
    )
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    return 0


def cmd_rip(args) -> int:
    A = read_matrix(args.A)
    normalized, _ = normalize_columns(A)
    value = rip_constant_exhaustive(RipQuery(normalized, args.s, args.cap))
    print(_fmt(value))
    return 0


def cmd_bounds(args) -> int:
    inputs = BoundInputs(
        delta=args.delta, L=args.L, m=args.m, K=args.K, tau=args.tau,
        z_l2=args.z_l2, z_linf=args.z_linf, s=args.s,
        e_l1=args.e_l1, e_l2=args.e_l2, e_linf=args.e_linf, a_inf1=args.a_inf1,
    )
    family, mode = args.theorem.split("-")
    fn = jobs_error_bound if family == "jobs" else bagging_error_bound
    out = fn(inputs, exact_sparse=(mode == "exact"))
    print(f"{_fmt(out.error_bound)},{_fmt(out.probability_lower_bound)}")
    if out.clamped:
        print("probability clamped into [0, 1]", file=sys.stderr)
    return 0


def cmd_complexity(args) -> int:
    d = sample_complexity_jobs(args.n, args.s, args.K, args.alpha, args.mu,
                               beta=args.beta, delta=args.delta)
    print(d)
    return 0


def cmd_birthday(args) -> int:
    if args.d is not None and args.alpha is not None:
        raise CliParameterError("give at most one of --d and --alpha")
    if args.d is not None:
        print(_fmt(distinct_tail(args.m, args.L, args.d)))
    elif args.alpha is not None:
        print(distinct_lower_bound(args.m, args.L, args.alpha))
    else:
        pmf = distinct_count_pmf(args.m, args.L)
        for v, p in enumerate(pmf, start=1):
            print(f"{v},{_fmt(p)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliParameterError, ValueError, IndexError, SolverDivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
