"""Weighted Frobenius objective: dense oracle and grouped fast path.

The objective is sum_ij W_ij^2 (U V^T - A)_ij^2.  The grouped evaluator
computes one residual per distinct masked-target row and scales it by the
group size, so its work is proportional to the group count, never to n.
Both paths share one audited row kernel and accumulate with compensated
summation so they agree to tight tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pattern_index import PatternIndex


@dataclass
class WorkCounters:
    """Instrumentation for the subquadratic work claims."""

    regressions_solved: int = 0
    designs_assembled: int = 0
    rep_cost_evals: int = 0


@dataclass(eq=False)
class GroupedFactor:
    """A factor that is constant on the groups of a PatternIndex.

    rows[g] is the shared factor row of every member of group g;
    expand() broadcasts it back to full (n, k) shape.
    """

    index: PatternIndex
    rows: np.ndarray  # (G, k)

    @property
    def k(self) -> int:
        return int(self.rows.shape[1])

    def expand(self) -> np.ndarray:
        return self.rows[self.index.group_of]

    def validate(self) -> None:
        if self.rows.ndim != 2 or self.rows.shape[0] != self.index.num_groups:
            raise ValueError("rows must have one entry per group")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("factor contains non-finite entries")


def compress_factor(X: np.ndarray, index: PatternIndex, check: bool = True) -> GroupedFactor:
    """Compress an (n, k) factor that is constant on the index groups."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != index.n:
        raise ValueError("factor shape does not match the partition")
    rows = np.ascontiguousarray(X[index.representatives])
    gf = GroupedFactor(index=index, rows=rows)
    if check and not np.array_equal(gf.expand(), X):
        raise ValueError("factor is not constant on the groups")
    return gf


def kahan_sum(values) -> float:
    """Compensated summation (Kahan-Babuska/Neumaier) in the given order."""
    total = 0.0
    comp = 0.0
    for v in values:
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _row_residual_sq(V: np.ndarray, u_row: np.ndarray,
                     w_row: np.ndarray, wa_row: np.ndarray) -> float:
    # Single audited kernel: || w * (V @ u) - (w * a) ||_2^2 for one row.
    pred = V @ u_row
    d = w_row * pred - wa_row
    return float(np.dot(d, d))


def cost_dense(A: np.ndarray, W: np.ndarray, U: np.ndarray, V: np.ndarray) -> float:
    """Exact weighted squared error, evaluated row by row over all n rows.

    This is the reference evaluator; use cost_grouped on structured
    instances when n is large.
    """
    A = np.asarray(A, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    U = np.ascontiguousarray(U, dtype=np.float64)
    V = np.ascontiguousarray(V, dtype=np.float64)
    if A.ndim != 2 or A.shape != W.shape:
        raise ValueError("A and W must have identical shapes")
    if U.ndim != 2 or V.ndim != 2 or U.shape[1] != V.shape[1]:
        raise ValueError("U and V must share the inner dimension")
    if U.shape[0] != A.shape[0] or V.shape[0] != A.shape[1]:
        raise ValueError("factor heights must match A")

    def row_terms():
        for i in range(A.shape[0]):
            w = W[i]
            yield _row_residual_sq(V, U[i], w, w * A[i])

    return kahan_sum(row_terms())


def cost_grouped(inst, grouped_u: GroupedFactor, V: np.ndarray,
                 counters: WorkCounters | None = None) -> float:
    """Weighted squared error evaluated only at group representatives.

    Requires the row factor to be constant on the refined row groups of
    the instance (grouped_u.index must match inst.wa_rows).  Each group
    contributes size * residual of its representative row, so the work is
    O(G * n * k) with G the refined group count.
    """
    if not np.array_equal(grouped_u.index.group_of, inst.wa_rows.group_of):
        raise ValueError("grouped factor does not match the instance row groups")
    V = np.ascontiguousarray(V, dtype=np.float64)
    if V.ndim != 2 or V.shape[0] != inst.n or V.shape[1] != grouped_u.k:
        raise ValueError("V shape does not conform to the instance and factor")
    wpat = inst.row_design_patterns()
    targets = inst.row_targets()
    parents = inst.row_parents()
    sizes = inst.wa_rows.sizes
    rows = grouped_u.rows
    if counters is not None:
        counters.rep_cost_evals += inst.wa_rows.num_groups

    def group_terms():
        for g in range(rows.shape[0]):
            yield float(sizes[g]) * _row_residual_sq(V, rows[g], wpat[parents[g]], targets[g])

    return kahan_sum(group_terms())


def cost_grouped_cols(inst, grouped_v: GroupedFactor, U: np.ndarray,
                      counters: WorkCounters | None = None) -> float:
    """Column-side grouped evaluation, via the transposed instance."""
    return cost_grouped(inst.transposed(), grouped_v, U, counters)
