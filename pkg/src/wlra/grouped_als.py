"""Alternating sketched minimization over grouped weighted regressions.

Each half-sweep fixes one factor and solves the weighted least-squares
update for the other.  Rows sharing a weight pattern share one sketched
design, and rows sharing a masked-target pattern share one regression, so
a half-sweep solves at most r*p small systems regardless of n and
broadcasts each solution across its group.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .opt_bounds import BoundParams, default_gamma, lower_bound_log2, upper_bound
from .sketch import (MASK64, INIT_STREAM, SketchMatrix, gaussian_sketch,
                     keyed_normals, sketch_dim, sketched_design)
from .weighted_cost import (GroupedFactor, WorkCounters, cost_grouped,
                            cost_grouped_cols)

_RESTART_STRIDE = 0x9E3779B97F4A7C15  # golden-ratio stride between restart seeds


@dataclass
class SolveOptions:
    """Solver configuration.

    sketchless replaces the sketch with exact per-row regressions and is
    the internal optimality oracle; restarts reruns from independent
    seeds and keeps the best final cost; fixed_sketch reuses the first
    sweep's sketch pair instead of redrawing every sweep.
    """

    k: int
    eps: float = 0.25
    max_sweeps: int = 100
    rel_tol: float = 1e-6
    seed: int = 0
    restarts: int = 1
    rank_tolerance: float = 1e-10
    sketchless: bool = False
    fixed_sketch: bool = False
    sketch_constant: float = 4.0
    gamma: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if not (0.0 < self.eps < 0.5):
            raise ValueError("eps must lie in (0, 0.5)")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.rank_tolerance < 0:
            raise ValueError("rank_tolerance must be nonnegative")
        if self.sketch_constant <= 0:
            raise ValueError("sketch_constant must be positive")
        if self.gamma is not None and self.gamma < 0:
            raise ValueError("gamma must be nonnegative")


@dataclass(eq=False)
class Factorization:
    """The returned factor pair, with the grouped forms that produced it."""

    U: np.ndarray
    V: np.ndarray
    grouped_u: GroupedFactor | None = None
    grouped_v: GroupedFactor | None = None

    def validate(self) -> None:
        if not (np.all(np.isfinite(self.U)) and np.all(np.isfinite(self.V))):
            raise ValueError("factors contain non-finite entries")
        if self.grouped_u is not None and not np.array_equal(self.grouped_u.expand(), self.U):
            raise ValueError("grouped row factor does not expand to U")
        if self.grouped_v is not None and not np.array_equal(self.grouped_v.expand(), self.V):
            raise ValueError("grouped column factor does not expand to V")


@dataclass
class SolveReport:
    """Trajectory and instrumentation for the best restart."""

    cost_per_sweep: list[float] = field(default_factory=list)
    sweep_wall_times: list[float] = field(default_factory=list)
    sketch_seeds: list[int] = field(default_factory=list)
    final_cost: float = math.inf
    regressions_solved: int = 0
    bracket: tuple[float, float] = (0.0, 0.0)
    regressions_per_half_sweep: list[int] = field(default_factory=list)
    run_seed: int = 0


def _svd_factor(design: np.ndarray):
    return np.linalg.svd(design, full_matrices=False)


def _svd_apply(svd_parts, target: np.ndarray, rank_tolerance: float) -> np.ndarray:
    u, s, vt = svd_parts
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros(u.shape[0])
    keep = s > rank_tolerance * s[0]
    if not np.any(keep):
        return np.zeros(u.shape[0])
    coeff = (vt[keep] @ target) / s[keep]
    return u[:, keep] @ coeff


def min_norm_solve(design: np.ndarray, target: np.ndarray,
                   rank_tolerance: float = 1e-10) -> np.ndarray:
    """Minimum-norm solution x of min || design^T x - target ||_2.

    Uses the SVD of the k x t design, zeroing singular values at or below
    rank_tolerance times the largest.  For a full-rank design this equals
    the normal-equations solution (design design^T)^{-1} design target;
    for a rank-deficient one it picks the shortest minimizer, with the
    all-zero design mapping to the zero vector.
    """
    design = np.asarray(design, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if design.ndim != 2 or target.ndim != 1 or design.shape[1] != target.shape[0]:
        raise ValueError("design must be k x t and target of length t")
    if not (np.all(np.isfinite(design)) and np.all(np.isfinite(target))):
        raise ValueError("non-finite input")
    if rank_tolerance < 0:
        raise ValueError("rank_tolerance must be nonnegative")
    return _svd_apply(_svd_factor(design), target, rank_tolerance)


def _assemble(inst, V: np.ndarray, S: SketchMatrix | None, sketchless: bool):
    """Designs per weight group and targets per refined group, sketched or exact."""
    Z = np.ascontiguousarray(V, dtype=np.float64).T  # k x n
    wpat = inst.row_design_patterns()
    targets = inst.row_targets()
    if sketchless:
        if S is not None:
            raise ValueError("sketchless updates take no sketch")
        designs = [Z * wpat[i] for i in range(wpat.shape[0])]
        return designs, targets
    if S is None:
        raise ValueError("a sketch is required unless sketchless is set")
    if S.n != inst.n:
        raise ValueError("sketch width does not match the instance")
    designs = [sketched_design(Z, wpat[i], S) for i in range(wpat.shape[0])]
    sk_targets = targets @ S.values.T
    return designs, sk_targets


def update_rows(inst, V: np.ndarray, S1: SketchMatrix | None, opts: SolveOptions,
                counters: WorkCounters | None = None) -> GroupedFactor:
    """One row half-sweep: the optimal grouped row factor for fixed V.

    Solves one (sketched) weighted regression per refined row group using
    the design shared by its weight group, and stores the k-vector once
    per group.
    """
    V = np.ascontiguousarray(V, dtype=np.float64)
    if V.ndim != 2 or V.shape[0] != inst.n:
        raise ValueError("V must be n x k for this instance")
    designs, targets = _assemble(inst, V, S1, opts.sketchless)
    parents = inst.row_parents()
    num_groups = inst.wa_rows.num_groups
    factored = [_svd_factor(d) for d in designs]
    rows = np.empty((num_groups, V.shape[1]))
    for g in range(num_groups):
        rows[g] = _svd_apply(factored[parents[g]], targets[g], opts.rank_tolerance)
    if counters is not None:
        counters.designs_assembled += len(designs)
        counters.regressions_solved += num_groups
    return GroupedFactor(index=inst.wa_rows, rows=rows)


def update_cols(inst, U: np.ndarray, S2: SketchMatrix | None, opts: SolveOptions,
                counters: WorkCounters | None = None) -> GroupedFactor:
    """One column half-sweep; the row update applied to the transposed instance."""
    return update_rows(inst.transposed(), U, S2, opts, counters)


def _certificates(inst, grouped: GroupedFactor, other: np.ndarray) -> np.ndarray:
    """Normal-equations residuals || D (D^T x - b) ||_inf, normalized by
    design scale (Frobenius) times target scale (2-norm), one per group."""
    Z = np.ascontiguousarray(other, dtype=np.float64).T
    wpat = inst.row_design_patterns()
    targets = inst.row_targets()
    parents = inst.row_parents()
    out = np.empty(grouped.rows.shape[0])
    for g in range(out.shape[0]):
        D = Z * wpat[parents[g]]
        b = targets[g]
        x = grouped.rows[g]
        resid = np.abs(D @ (D.T @ x - b)).max(initial=0.0)
        denom = np.linalg.norm(D) * np.linalg.norm(b)
        if denom == 0.0:
            out[g] = 0.0 if resid == 0.0 else math.inf
        else:
            out[g] = resid / denom
    return out


def row_certificates(inst, grouped_u: GroupedFactor, V: np.ndarray) -> np.ndarray:
    """Per-group optimality certificates for a sketchless row half-sweep."""
    return _certificates(inst, grouped_u, V)


def col_certificates(inst, grouped_v: GroupedFactor, U: np.ndarray) -> np.ndarray:
    return _certificates(inst.transposed(), grouped_v, U)


def _init_factor(run_seed: int, n: int, k: int) -> np.ndarray:
    V = keyed_normals(run_seed, INIT_STREAM, n * k).reshape(n, k)
    norms = np.linalg.norm(V, axis=0)
    norms[norms == 0.0] = 1.0
    return V / norms


def solve(inst, opts: SolveOptions):
    """Run alternating grouped minimization and return (Factorization, SolveReport).

    Starts from a seeded random column factor, alternates row and column
    half-sweeps with fresh sketches per sweep (or exact regressions in
    sketchless mode), evaluates the exact grouped cost after every
    half-sweep, and stops when the relative per-sweep improvement drops
    below rel_tol or after max_sweeps.  With restarts > 1 the whole
    procedure reruns from derived seeds and the best final cost wins.
    The achieved cost is always an upper bound on the optimum; the report
    also carries the theoretical bracket.
    """
    n = inst.n
    if opts.k > n:
        raise ValueError("k must not exceed n")
    gamma = default_gamma(n) if opts.gamma is None else opts.gamma
    bparams = BoundParams(n=n, gamma=gamma, k=opts.k, r=inst.r, eps=opts.eps)
    bracket = (lower_bound_log2(bparams), upper_bound(inst))
    t = None if opts.sketchless else sketch_dim(opts.k, opts.eps, opts.sketch_constant)

    best_fact = None
    best_report = None
    for restart in range(opts.restarts):
        run_seed = (opts.seed + _RESTART_STRIDE * restart) & MASK64
        fact, report = _solve_single(inst, opts, run_seed, t)
        if best_report is None or report.final_cost < best_report.final_cost:
            best_fact, best_report = fact, report
    best_report.bracket = bracket
    return best_fact, best_report


def _solve_single(inst, opts: SolveOptions, run_seed: int, t: int | None):
    n = inst.n
    counters = WorkCounters()
    report = SolveReport(run_seed=run_seed)
    V = _init_factor(run_seed, n, opts.k)
    U = None
    gu = gv = None
    s1 = s2 = None
    prev = None
    for sweep in range(opts.max_sweeps):
        draw = not opts.sketchless and (not opts.fixed_sketch or s1 is None)

        tic = time.perf_counter()
        if draw:
            seed1 = run_seed ^ (2 * sweep)
            report.sketch_seeds.append(seed1)
            s1 = gaussian_sketch(seed1, t, n)
        gu = update_rows(inst, V, s1, opts, counters)
        U = gu.expand()
        cost = cost_grouped(inst, gu, V, counters)
        report.sweep_wall_times.append(time.perf_counter() - tic)
        report.cost_per_sweep.append(cost)
        report.regressions_per_half_sweep.append(inst.wa_rows.num_groups)

        tic = time.perf_counter()
        if draw:
            seed2 = run_seed ^ (2 * sweep + 1)
            report.sketch_seeds.append(seed2)
            s2 = gaussian_sketch(seed2, t, n)
        gv = update_cols(inst, U, s2, opts, counters)
        V = gv.expand()
        cost = cost_grouped_cols(inst, gv, U, counters)
        report.sweep_wall_times.append(time.perf_counter() - tic)
        report.cost_per_sweep.append(cost)
        report.regressions_per_half_sweep.append(inst.wa_cols.num_groups)

        if cost == 0.0:
            break
        if prev is not None and (prev == 0.0 or prev - cost < opts.rel_tol * prev):
            break
        prev = cost

    report.final_cost = report.cost_per_sweep[-1]
    report.regressions_solved = counters.regressions_solved
    fact = Factorization(U=U, V=V, grouped_u=gu, grouped_v=gv)
    return fact, report
