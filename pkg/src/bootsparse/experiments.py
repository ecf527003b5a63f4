"""Simulation harness: instance generation, the recovery-SNR metric, penalty
grid search with warm starts, and (method x m x K x L/m) sweeps persisted to
CSV.

Determinism contract: per-trial instance seeds depend only on
(master_seed, m, trial) and subset seeds on (master_seed, m, L, K, trial), so
within a cell every method and every penalty value sees the same
(A, x*, z, subsets) per trial and comparisons are paired. Sweep output is
byte-identical regardless of worker count: work is scheduled per (cell,
trial), results are gathered and flushed in a fixed cell order, and means use
fixed-order summation.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimators import (
    METHODS,
    SensingProblem,
    bagging,
    bolasso,
    jobs,
    l1_min,
)
from .linalg import as_vector
from .sampling import SCHEMES, SamplingPlan
from .solver import SolverConfig, SolverDivergenceError

#: Sentinel recovery SNR reported for (numerically) exact recovery, in dB.
RSNR_CAP = 300.0

CSV_HEADER = (
    "method,m,n,s,snr_db,K,L,ratio,lambda,trial,"
    "rsnr_db,rsnr_literal_db,iterations,converged,wall_ms"
)


def default_lambda_grid(points: int = 30) -> list[float]:
    """Logarithmically spaced penalty grid on [0.01, 200]."""
    return [float(v) for v in np.geomspace(0.01, 200.0, points)]


@dataclass(frozen=True)
class InstanceSpec:
    """Synthetic instance description; snr_db may be math.inf for noiseless."""

    m: int
    n: int
    s: int
    snr_db: float
    seed: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.s <= self.n:
            raise ValueError(f"s must be in [0, n={self.n}], got {self.s}")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError("snr_db must be finite or +inf")


def generate_instance(spec: InstanceSpec, literal_noise: bool = False):
    """Draw (A, x_star, z, y): standard-normal A, s-sparse standard-normal
    signal on a uniform support, white noise calibrated to snr_db.

    The noise variance is 10^(-snr/10) ||A x*||^2 / m, which makes the
    expected total noise power match the nominal SNR; literal_noise=True
    drops the /m normalization.
    """
    rng = np.random.default_rng(spec.seed)
    A = rng.standard_normal((spec.m, spec.n))
    x = np.zeros(spec.n)
    support = rng.permutation(spec.n)[: spec.s]
    x[support] = rng.standard_normal(spec.s)
    Ax = A @ x
    if math.isinf(spec.snr_db):
        z = np.zeros(spec.m)
    else:
        power = float(Ax @ Ax)
        sigma2 = 10.0 ** (-spec.snr_db / 10.0) * power
        if not literal_noise:
            sigma2 /= spec.m
        z = rng.standard_normal(spec.m) * math.sqrt(sigma2)
    return A, x, z, A @ x + z


def recovery_snr(x_hat, x_star) -> float:
    """10 log10(||x*||^2 / ||x_hat - x*||^2): larger is better, capped at
    the exact-recovery sentinel."""
    x_hat = as_vector(x_hat, "x_hat")
    x_star = as_vector(x_star, "x_star")
    if x_hat.shape != x_star.shape:
        raise ValueError("x_hat and x_star must have equal lengths")
    signal = float(x_star @ x_star)
    if signal == 0.0:
        raise ValueError("x_star must be nonzero")
    diff = x_hat - x_star
    err = float(diff @ diff)
    if err == 0.0:
        return RSNR_CAP
    return min(RSNR_CAP, 10.0 * math.log10(signal / err))


@dataclass(frozen=True)
class CellSpec:
    """One (method, m, K, L) sweep cell."""

    method: str
    m: int
    n: int
    s: int
    snr_db: float
    K: int
    L: int
    ratio: float
    scheme: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class TrialEval:
    rsnr_db: float
    rsnr_literal_db: float
    iterations: int
    converged: bool
    wall_ms: float


@dataclass(frozen=True)
class SweepSpec:
    """Sweep over methods x m x K x L/m with per-cell penalty tuning."""

    methods: tuple
    m_list: tuple
    n: int
    s: int
    snr_db: float
    K_list: tuple
    ratio_list: tuple
    lambda_grid: tuple
    trials: int
    scheme: str = "bootstrap"
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "m_list", tuple(int(m) for m in self.m_list))
        object.__setattr__(self, "K_list", tuple(int(k) for k in self.K_list))
        object.__setattr__(self, "ratio_list", tuple(float(r) for r in self.ratio_list))
        object.__setattr__(self, "lambda_grid", tuple(float(v) for v in self.lambda_grid))
        for meth in self.methods:
            if meth not in METHODS:
                raise ValueError(f"unknown method {meth!r}")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        if not self.m_list or any(m < 1 for m in self.m_list):
            raise ValueError("m_list must be nonempty positive ints")
        if not 0 <= self.s <= self.n:
            raise ValueError(f"s must be in [0, n={self.n}]")
        ensembles = [meth for meth in self.methods if meth != "l1"]
        if ensembles and (not self.K_list or any(k < 1 for k in self.K_list)):
            raise ValueError("K_list must be nonempty positive ints")
        if ensembles and (
            not self.ratio_list or any(not 0.0 < r <= 1.0 for r in self.ratio_list)
        ):
            raise ValueError("ratio_list entries must lie in (0, 1]")
        if not self.lambda_grid or any(v <= 0 for v in self.lambda_grid):
            raise ValueError("lambda_grid must be nonempty positive reals")
        if list(self.lambda_grid) != sorted(self.lambda_grid):
            raise ValueError("lambda_grid must be ascending")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


@dataclass
class SweepRecord:
    method: str
    m: int
    n: int
    s: int
    snr_db: float
    K: int
    L: int
    ratio: float
    lam: float
    trial: int
    rsnr_db: float
    rsnr_literal_db: float
    iterations: int
    converged: bool
    wall_ms: float

    def to_csv_row(self) -> str:
        return ",".join(
            [
                self.method,
                str(self.m),
                str(self.n),
                str(self.s),
                repr(float(self.snr_db)),
                str(self.K),
                str(self.L),
                repr(float(self.ratio)),
                repr(float(self.lam)),
                str(self.trial),
                repr(float(self.rsnr_db)),
                repr(float(self.rsnr_literal_db)),
                str(self.iterations),
                "true" if self.converged else "false",
                repr(float(self.wall_ms)),
            ]
        )


def instance_seed(master_seed: int, m: int, trial: int) -> int:
    """Instance stream id: method/K/L independent, so comparisons pair up."""
    ss = np.random.SeedSequence((master_seed, 1, m, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def plan_seed(master_seed: int, m: int, L: int, K: int, trial: int) -> int:
    """Subset stream id: shared by all ensemble methods in a cell trial."""
    ss = np.random.SeedSequence((master_seed, 2, m, L, K, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def cell_trial_seeds(spec_master_seed: int, cell: CellSpec, trials: int):
    return [
        (
            instance_seed(spec_master_seed, cell.m, t),
            plan_seed(spec_master_seed, cell.m, cell.L, cell.K, t),
        )
        for t in range(trials)
    ]


def ratio_subset_size(ratio: float, m: int) -> int:
    """L = round(ratio * m), at least 1."""
    return max(1, int(round(ratio * m)))


def _evaluate_trial(
    cell: CellSpec,
    grid,
    seeds,
    cfg_kwargs,
    literal_noise: bool,
    timing: bool,
) -> list[TrialEval]:
    """All grid penalties on one trial, warm-started large-to-small."""
    inst_seed, subset_seed = seeds
    spec = InstanceSpec(cell.m, cell.n, cell.s, cell.snr_db, inst_seed)
    A, x_star, _, y = generate_instance(spec, literal_noise=literal_noise)
    prob = SensingProblem(A, y)
    plan = None
    if cell.method != "l1":
        plan = SamplingPlan(cell.m, cell.L, cell.K, cell.scheme, subset_seed)
    out: list[TrialEval | None] = [None] * len(grid)
    warm = None
    by_value: dict[float, TrialEval] = {}
    for gi in sorted(range(len(grid)), key=lambda i: -grid[i]):
        if grid[gi] in by_value:  # duplicate grid entries share one solve
            out[gi] = by_value[grid[gi]]
            continue
        cfg = SolverConfig(lam=grid[gi], **cfg_kwargs)
        t0 = time.perf_counter() if timing else 0.0
        try:
            if cell.method == "jobs":
                res = jobs(prob, plan, cfg, warm=warm)
            elif cell.method == "bagging":
                res = bagging(prob, plan, cfg, warm=warm)
            elif cell.method == "bolasso":
                res = bolasso(prob, plan, cfg, warm=warm)
            else:
                res = l1_min(prob, cfg, warm=warm)
        except SolverDivergenceError:
            # record the failure (worst-possible sentinel keeps this penalty
            # from ever winning the grid search) and restart the warm chain
            warm = None
            ev = TrialEval(
                rsnr_db=-RSNR_CAP,
                rsnr_literal_db=RSNR_CAP,
                iterations=0,
                converged=False,
                wall_ms=0.0,
            )
            out[gi] = ev
            by_value[grid[gi]] = ev
            continue
        warm = res
        wall = (time.perf_counter() - t0) * 1e3 if timing else 0.0
        rsnr = recovery_snr(res.x_hat, x_star)
        ev = TrialEval(
            rsnr_db=rsnr,
            rsnr_literal_db=-rsnr,
            iterations=sum(r.iterations for r in res.solver_reports),
            converged=all(r.converged for r in res.solver_reports),
            wall_ms=wall,
        )
        out[gi] = ev
        by_value[grid[gi]] = ev
    return out  # type: ignore[return-value]


def _best_grid_index(grid, evals_by_trial) -> int:
    """Index maximizing mean recovery SNR; ties go to the larger penalty."""
    best_gi = 0
    best_mean = -math.inf
    for gi in range(len(grid)):
        mean = float(np.mean([ev[gi].rsnr_db for ev in evals_by_trial]))
        if mean >= best_mean:
            best_mean = mean
            best_gi = gi
    return best_gi


def lambda_search(
    cell: CellSpec,
    grid,
    trial_seeds,
    *,
    rho: float = 1.0,
    max_iter: int = 2000,
    eps_abs: float = 1e-6,
    eps_rel: float = 1e-4,
    literal_noise: bool = False,
) -> tuple[float, float]:
    """Evaluate every grid penalty on the same trials (paired) and return
    (best_lambda, mean_rsnr_db at that penalty)."""
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    cfg_kwargs = dict(rho=rho, max_iter=max_iter, eps_abs=eps_abs, eps_rel=eps_rel)
    evals = [
        _evaluate_trial(cell, grid, seeds, cfg_kwargs, literal_noise, timing=False)
        for seeds in trial_seeds
    ]
    gi = _best_grid_index(grid, evals)
    mean = float(np.mean([ev[gi].rsnr_db for ev in evals]))
    return grid[gi], mean


def expand_cells(spec: SweepSpec) -> list[CellSpec]:
    """Deterministic cell order. The full-data l1 method collapses the K and
    ratio axes to a single cell per m, reported with K=1, L=m, ratio=1."""
    cells = []
    for m in spec.m_list:
        for method in spec.methods:
            if method == "l1":
                cells.append(
                    CellSpec(method, m, spec.n, spec.s, spec.snr_db, 1, m, 1.0, spec.scheme)
                )
                continue
            for K in spec.K_list:
                for ratio in spec.ratio_list:
                    L = ratio_subset_size(ratio, m)
                    cells.append(
                        CellSpec(
                            method, m, spec.n, spec.s, spec.snr_db, K, L, ratio, spec.scheme
                        )
                    )
    return cells


def _cell_key(cell: CellSpec):
    return (cell.method, cell.m, cell.K, cell.L)


def _parse_existing(path, spec: SweepSpec):
    """Rows of already-complete cells, keyed by cell, in trial order."""
    by_cell: dict[tuple, dict[int, str]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            return {}
        for row in reader:
            try:
                key = (row["method"], int(row["m"]), int(row["K"]), int(row["L"]))
                trial = int(row["trial"])
                if int(row["n"]) != spec.n or int(row["s"]) != spec.s:
                    continue
                if float(row["snr_db"]) != float(spec.snr_db):
                    continue
            except (KeyError, ValueError):
                continue
            line = ",".join(row[name] for name in CSV_HEADER.split(","))
            by_cell.setdefault(key, {})[trial] = line
    complete = {}
    for key, rows in by_cell.items():
        if sorted(rows) == list(range(spec.trials)):
            complete[key] = [rows[t] for t in range(spec.trials)]
    return complete


def _row_to_record(line: str) -> SweepRecord:
    vals = line.split(",")
    return SweepRecord(
        method=vals[0],
        m=int(vals[1]),
        n=int(vals[2]),
        s=int(vals[3]),
        snr_db=float(vals[4]),
        K=int(vals[5]),
        L=int(vals[6]),
        ratio=float(vals[7]),
        lam=float(vals[8]),
        trial=int(vals[9]),
        rsnr_db=float(vals[10]),
        rsnr_literal_db=float(vals[11]),
        iterations=int(vals[12]),
        converged=vals[13] == "true",
        wall_ms=float(vals[14]),
    )


def _cell_records(cell: CellSpec, grid, evals_by_trial) -> list[SweepRecord]:
    gi = _best_grid_index(grid, evals_by_trial)
    records = []
    for t, evals in enumerate(evals_by_trial):
        ev = evals[gi]
        records.append(
            SweepRecord(
                method=cell.method,
                m=cell.m,
                n=cell.n,
                s=cell.s,
                snr_db=cell.snr_db,
                K=cell.K,
                L=cell.L,
                ratio=cell.ratio,
                lam=grid[gi],
                trial=t,
                rsnr_db=ev.rsnr_db,
                rsnr_literal_db=ev.rsnr_literal_db,
                iterations=ev.iterations,
                converged=ev.converged,
                wall_ms=ev.wall_ms,
            )
        )
    return records


def run_sweep(
    spec: SweepSpec,
    out_path,
    *,
    threads: int = 1,
    timing: bool = False,
    literal_noise: bool = False,
    rho: float = 1.0,
    max_iter: int = 2000,
    eps_abs: float = 1e-6,
    eps_rel: float = 1e-4,
) -> list[SweepRecord]:
    """Run the sweep, appending one record per (cell, trial) at the tuned
    penalty. Cells already complete in an existing CSV at out_path are reused
    (resume), never duplicated. threads=0 means one worker per CPU.

    wall_ms is 0.0 unless timing=True; measured times would break the
    byte-identical-output guarantee, so they are opt-in. A solver divergence
    does not abort the sweep: the affected evaluation is recorded with
    converged=false and the worst-possible recovery SNR sentinel.
    """
    cells = expand_cells(spec)
    grid = [float(v) for v in spec.lambda_grid]
    cfg_kwargs = dict(rho=rho, max_iter=max_iter, eps_abs=eps_abs, eps_rel=eps_rel)
    reused = {}
    if os.path.exists(out_path):
        reused = _parse_existing(out_path, spec)

    pending = [c for c in cells if _cell_key(c) not in reused]
    seeds = {
        _cell_key(c): cell_trial_seeds(spec.master_seed, c, spec.trials)
        for c in pending
    }

    if threads == 0:
        threads = os.cpu_count() or 1

    def compute(cell: CellSpec, trial_idx: int) -> list[TrialEval]:
        return _evaluate_trial(
            cell,
            grid,
            seeds[_cell_key(cell)][trial_idx],
            cfg_kwargs,
            literal_noise,
            timing,
        )

    futures = {}
    pool = None
    if threads > 1 and pending:
        pool = ThreadPoolExecutor(max_workers=threads)
        for cell in pending:
            for t in range(spec.trials):
                futures[(_cell_key(cell), t)] = pool.submit(compute, cell, t)

    records: list[SweepRecord] = []
    try:
        with open(out_path, "w", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            for cell in cells:
                key = _cell_key(cell)
                if key in reused:
                    for line in reused[key]:
                        fh.write(line + "\n")
                        records.append(_row_to_record(line))
                else:
                    if pool is not None:
                        evals = [futures[(key, t)].result() for t in range(spec.trials)]
                    else:
                        evals = [compute(cell, t) for t in range(spec.trials)]
                    for rec in _cell_records(cell, grid, evals):
                        fh.write(rec.to_csv_row() + "\n")
                        records.append(rec)
                fh.flush()
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)
    return records
