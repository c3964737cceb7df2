"""Detection, refinement and validation of repeated row/column structure.

A weight matrix whose rows (or columns) take only a handful of distinct
values can be summarized by a partition of the index set into groups of
entry-wise identical vectors.  Everything downstream (grouped cost
evaluation, per-group regressions) works off these partitions plus one
representative vector per group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

ROWS = "rows"
COLS = "cols"
_AXES = (ROWS, COLS)


@dataclass(frozen=True, eq=False)
class PatternIndex:
    """Partition of row (or column) indices into groups of identical vectors.

    Attributes
    ----------
    axis : str
        "rows" or "cols"; which direction of the keyed matrix was grouped.
    group_of : ndarray of int64, shape (n,)
        Group id for each index.  Ids are assigned by order of first
        appearance, so they are deterministic.
    representatives : ndarray of int64, shape (G,)
        Smallest member index of each group.
    sizes : ndarray of int64, shape (G,)
        Group cardinalities; they sum to n.
    """

    axis: str
    group_of: np.ndarray
    representatives: np.ndarray
    sizes: np.ndarray

    @property
    def n(self) -> int:
        return int(self.group_of.shape[0])

    @property
    def num_groups(self) -> int:
        return int(self.representatives.shape[0])

    def validate(self) -> None:
        """Raise ValueError if the partition invariants are violated."""
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {self.axis!r}")
        g = self.num_groups
        if int(self.sizes.sum()) != self.n:
            raise ValueError("group sizes do not sum to n")
        if np.any(self.sizes <= 0):
            raise ValueError("empty group")
        if self.group_of.min(initial=0) < 0 or self.group_of.max(initial=-1) >= g:
            raise ValueError("group id out of range")
        firsts = np.full(g, -1, dtype=np.int64)
        for i, gid in enumerate(self.group_of):
            if firsts[gid] < 0:
                firsts[gid] = i
        if np.any(firsts < 0):
            raise ValueError("group with no members")
        if not np.array_equal(firsts, self.representatives):
            raise ValueError("representatives are not the smallest members")

    def refines(self, outer: "PatternIndex") -> bool:
        """True if every group of self lies inside a single group of outer."""
        if outer.n != self.n:
            return False
        expected = outer.group_of[self.representatives][self.group_of]
        return bool(np.array_equal(expected, outer.group_of))


def _as_vectors(M: np.ndarray, axis: str) -> np.ndarray:
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return M if axis == ROWS else M.T


def _index_from_labels(labels: np.ndarray, axis: str) -> PatternIndex:
    """Canonicalize arbitrary integer labels into a first-appearance PatternIndex."""
    labels = np.asarray(labels, dtype=np.int64)
    _, first_idx, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(order.shape[0], dtype=np.int64)
    rank[order] = np.arange(order.shape[0], dtype=np.int64)
    group_of = rank[inverse.ravel()]
    representatives = first_idx[order].astype(np.int64)
    sizes = np.bincount(group_of, minlength=order.shape[0]).astype(np.int64)
    return PatternIndex(axis=axis, group_of=group_of,
                        representatives=representatives, sizes=sizes)


def detect_groups(M: np.ndarray, axis: str = ROWS, tolerance: float = 0.0) -> PatternIndex:
    """Group the rows (or columns) of M into classes of identical vectors.

    With tolerance 0 two vectors belong to the same group iff they are
    entry-wise equal.  With a positive tolerance each vector joins the
    first existing group whose representative it matches entry-wise to
    within the tolerance (a canonical-representative scan, not a
    transitive closure), so grouping stays deterministic.

    Parameters
    ----------
    M : (n, m) array
    axis : "rows" or "cols"
    tolerance : float >= 0

    Returns
    -------
    PatternIndex with groups ordered by first appearance.
    """
    vecs = _as_vectors(M, axis)
    if not np.all(np.isfinite(vecs)):
        raise ValueError("matrix contains non-finite entries")
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    n, m = vecs.shape
    if n == 0:
        raise ValueError("cannot group an empty index set")

    if tolerance == 0.0:
        if m == 0:
            labels = np.zeros(n, dtype=np.int64)
            return _index_from_labels(labels, axis)
        canon = np.ascontiguousarray(vecs) + 0.0  # folds -0.0 into +0.0
        byte_rows = canon.view(np.dtype((np.void, canon.dtype.itemsize * m))).ravel()
        return _index_from_labels(_void_labels(byte_rows), axis)

    group_of = np.empty(n, dtype=np.int64)
    reps: list[int] = []
    for i in range(n):
        assigned = -1
        if reps:
            rep_block = vecs[reps]
            match = np.abs(rep_block - vecs[i]).max(axis=1) <= tolerance
            hits = np.nonzero(match)[0]
            if hits.size:
                assigned = int(hits[0])
        if assigned < 0:
            assigned = len(reps)
            reps.append(i)
        group_of[i] = assigned
    representatives = np.asarray(reps, dtype=np.int64)
    sizes = np.bincount(group_of, minlength=len(reps)).astype(np.int64)
    return PatternIndex(axis=axis, group_of=group_of,
                        representatives=representatives, sizes=sizes)


def _void_labels(byte_rows: np.ndarray) -> np.ndarray:
    _, first_idx, inverse = np.unique(byte_rows, return_index=True, return_inverse=True)
    # unique() sorts lexicographically; relabel so labels follow first appearance
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(order.shape[0], dtype=np.int64)
    rank[order] = np.arange(order.shape[0], dtype=np.int64)
    return rank[inverse.ravel()]


def refine(outer: PatternIndex, inner_key: np.ndarray, tolerance: float = 0.0) -> PatternIndex:
    """Intersect an existing partition with the equality classes of a key matrix.

    The result always refines `outer`: two indices share a group iff they
    shared one in `outer` and their key vectors match.  Used to split the
    weight-pattern groups by the masked-target pattern.
    """
    inner = detect_groups(inner_key, outer.axis, tolerance)
    if inner.n != outer.n:
        raise ValueError(f"partition length {outer.n} does not match key length {inner.n}")
    combo = outer.group_of * np.int64(inner.num_groups) + inner.group_of
    return _index_from_labels(combo, outer.axis)


def _flip(idx: PatternIndex) -> PatternIndex:
    return replace(idx, axis=COLS if idx.axis == ROWS else ROWS)


@dataclass(eq=False)
class StructuredInstance:
    """A weighted approximation problem (A, W) with its detected structure.

    Holds dense n x n matrices plus four partitions: weight-row and
    weight-column groups, and their refinements by the masked target
    W*A.  r is the weight-pattern count, p the per-group multiplier
    (masked-target groups per weight group, rounded up).
    """

    A: np.ndarray
    W: np.ndarray
    w_rows: PatternIndex
    w_cols: PatternIndex
    wa_rows: PatternIndex
    wa_cols: PatternIndex
    r: int
    p: int

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    # Representative-slab accessors shared with CompressedInstance.  The
    # solver only ever touches these, never full matrices.
    def row_design_patterns(self) -> np.ndarray:
        """Weight row per weight-row group, shape (w_rows.num_groups, n)."""
        return self.W[self.w_rows.representatives]

    def row_targets(self) -> np.ndarray:
        """Masked target row (W*A) per refined row group, shape (G, n)."""
        reps = self.wa_rows.representatives
        return self.W[reps] * self.A[reps]

    def row_parents(self) -> np.ndarray:
        """Weight-row group id of each refined row group."""
        return self.w_rows.group_of[self.wa_rows.representatives]

    def col_design_patterns(self) -> np.ndarray:
        return self.W[:, self.w_cols.representatives].T

    def col_targets(self) -> np.ndarray:
        reps = self.wa_cols.representatives
        return (self.W[:, reps] * self.A[:, reps]).T

    def col_parents(self) -> np.ndarray:
        return self.w_cols.group_of[self.wa_cols.representatives]

    def transposed(self) -> "StructuredInstance":
        """The same problem with rows and columns exchanged (views, no copies)."""
        return StructuredInstance(
            A=self.A.T, W=self.W.T,
            w_rows=_flip(self.w_cols), w_cols=_flip(self.w_rows),
            wa_rows=_flip(self.wa_cols), wa_cols=_flip(self.wa_rows),
            r=self.r, p=self.p)

    def validate(self) -> None:
        n = self.n
        if self.A.shape != (n, n) or self.W.shape != (n, n):
            raise ValueError("A and W must be square matrices of the same size")
        for idx in (self.w_rows, self.w_cols, self.wa_rows, self.wa_cols):
            if idx.n != n:
                raise ValueError("pattern index length does not match n")
            idx.validate()
        if not self.wa_rows.refines(self.w_rows):
            raise ValueError("masked row groups do not refine weight row groups")
        if not self.wa_cols.refines(self.w_cols):
            raise ValueError("masked column groups do not refine weight column groups")
        cap = self.r * self.p
        if self.wa_rows.num_groups > cap or self.wa_cols.num_groups > cap:
            raise ValueError("refined group count exceeds r*p")


def build_instance(A: np.ndarray, W: np.ndarray, tolerance: float = 0.0) -> StructuredInstance:
    """Detect the full group structure of a weighted instance.

    Runs row and column grouping on W, refines each by the masked target
    W*A, and records r = max of the weight group counts and
    p = ceil(max refined count / r).
    """
    A = np.asarray(A, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if W.shape != A.shape:
        raise ValueError("W must match the shape of A")
    WA = W * A
    w_rows = detect_groups(W, ROWS, tolerance)
    w_cols = detect_groups(W, COLS, tolerance)
    wa_rows = refine(w_rows, WA, tolerance)
    wa_cols = refine(w_cols, WA, tolerance)
    r = max(w_rows.num_groups, w_cols.num_groups)
    p = max(1, math.ceil(max(wa_rows.num_groups, wa_cols.num_groups) / r))
    inst = StructuredInstance(A=A, W=W, w_rows=w_rows, w_cols=w_cols,
                              wa_rows=wa_rows, wa_cols=wa_cols, r=r, p=p)
    inst.validate()
    return inst


@dataclass(eq=False)
class CompressedInstance:
    """Structure-only instance: pattern indices plus representative slabs.

    Stores O((r + rp) * n) floats instead of two dense n x n matrices, so
    large benchmark instances fit in memory.  Exposes the same accessor
    surface the solver uses on StructuredInstance.
    """

    n_size: int
    r: int
    p: int
    w_rows: PatternIndex
    w_cols: PatternIndex
    wa_rows: PatternIndex
    wa_cols: PatternIndex
    row_design: np.ndarray  # (w_rows.num_groups, n)
    row_target: np.ndarray  # (wa_rows.num_groups, n)
    col_design: np.ndarray
    col_target: np.ndarray

    @property
    def n(self) -> int:
        return self.n_size

    def row_design_patterns(self) -> np.ndarray:
        return self.row_design

    def row_targets(self) -> np.ndarray:
        return self.row_target

    def row_parents(self) -> np.ndarray:
        return self.w_rows.group_of[self.wa_rows.representatives]

    def col_design_patterns(self) -> np.ndarray:
        return self.col_design

    def col_targets(self) -> np.ndarray:
        return self.col_target

    def col_parents(self) -> np.ndarray:
        return self.w_cols.group_of[self.wa_cols.representatives]

    def transposed(self) -> "CompressedInstance":
        return CompressedInstance(
            n_size=self.n_size, r=self.r, p=self.p,
            w_rows=_flip(self.w_cols), w_cols=_flip(self.w_rows),
            wa_rows=_flip(self.wa_cols), wa_cols=_flip(self.wa_rows),
            row_design=self.col_design, row_target=self.col_target,
            col_design=self.row_design, col_target=self.row_target)

    def validate(self) -> None:
        n = self.n_size
        for idx in (self.w_rows, self.w_cols, self.wa_rows, self.wa_cols):
            if idx.n != n:
                raise ValueError("pattern index length does not match n")
            idx.validate()
        if self.row_design.shape != (self.w_rows.num_groups, n):
            raise ValueError("row design slab has wrong shape")
        if self.row_target.shape != (self.wa_rows.num_groups, n):
            raise ValueError("row target slab has wrong shape")
        if self.col_design.shape != (self.w_cols.num_groups, n):
            raise ValueError("column design slab has wrong shape")
        if self.col_target.shape != (self.wa_cols.num_groups, n):
            raise ValueError("column target slab has wrong shape")
        if not self.wa_rows.refines(self.w_rows):
            raise ValueError("masked row groups do not refine weight row groups")
        if not self.wa_cols.refines(self.w_cols):
            raise ValueError("masked column groups do not refine weight column groups")


def compress_instance(inst: StructuredInstance) -> CompressedInstance:
    """Drop the dense payload of an instance, keeping indices and slabs."""
    return CompressedInstance(
        n_size=inst.n, r=inst.r, p=inst.p,
        w_rows=inst.w_rows, w_cols=inst.w_cols,
        wa_rows=inst.wa_rows, wa_cols=inst.wa_cols,
        row_design=np.ascontiguousarray(inst.row_design_patterns()),
        row_target=np.ascontiguousarray(inst.row_targets()),
        col_design=np.ascontiguousarray(inst.col_design_patterns()),
        col_target=np.ascontiguousarray(inst.col_targets()))
