"""Synthetic instances with planted pattern structure.

The weight matrix tiles an r x r grid over contiguous index bands, so it
has exactly r distinct rows and columns.  The target tiles an rp x rp
grid whose cells carry a planted low-rank product (plus optional
cell-level noise), and the rp bands refine the weight bands, so the
masked target has at most rp distinct rows and columns.  Collisions are
impossible for generic draws but are detected at grid level and resolved
by redrawing from a derived seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pattern_index import (COLS, ROWS, CompressedInstance, StructuredInstance,
                            _index_from_labels, build_instance)
from .sketch import GEN_STREAM, MASK64, keyed_generator

WEIGHT_STYLES = ("block_random", "block_mask01", "attention_block")

_ATTEMPT_STRIDE = 0x9E3779B97F4A7C15
_MAX_ATTEMPTS = 8


@dataclass(frozen=True)
class GenSpec:
    """Parameters of a planted instance."""

    n: int
    r: int
    p: int
    k_true: int
    noise_sigma: float = 0.0
    weight_style: str = "block_random"
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.r < 1 or self.p < 1:
            raise ValueError("n, r and p must be positive")
        if self.r * self.p > self.n:
            raise ValueError("r * p must not exceed n")
        if not (1 <= self.k_true <= self.n):
            raise ValueError("k_true must lie in [1, n]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.weight_style not in WEIGHT_STYLES:
            raise ValueError(f"weight_style must be one of {WEIGHT_STYLES}")


def _band_ids(n: int, parts: int) -> np.ndarray:
    """Contiguous near-equal bands: ids 0..parts-1, earlier bands larger."""
    sizes = np.full(parts, n // parts, dtype=np.int64)
    sizes[: n % parts] += 1
    return np.repeat(np.arange(parts, dtype=np.int64), sizes)


def _sub_band_ids(n: int, r: int, p: int) -> np.ndarray:
    """Split each of the r weight bands into p sub-bands: ids 0..r*p-1."""
    wband = _band_ids(n, r)
    sizes = np.bincount(wband, minlength=r)
    parts = [i * p + _band_ids(int(sizes[i]), p) for i in range(r)]
    return np.concatenate(parts)


def _rows_distinct(M: np.ndarray) -> bool:
    canon = np.ascontiguousarray(M, dtype=np.float64) + 0.0
    if canon.shape[1] == 0:
        return canon.shape[0] <= 1
    byte_rows = canon.view(np.dtype((np.void, canon.dtype.itemsize * canon.shape[1]))).ravel()
    return np.unique(byte_rows).shape[0] == canon.shape[0]


def _weight_grid(spec: GenSpec, seed: int) -> np.ndarray:
    r = spec.r
    if spec.weight_style == "attention_block":
        return np.tril(np.ones((r, r)))
    g = keyed_generator(seed, GEN_STREAM)
    if spec.weight_style == "block_mask01":
        grid = g.integers(0, 2, size=(r, r)).astype(np.float64)
        np.fill_diagonal(grid, 1.0)  # keeps every band with a nonzero weight
        return grid
    return 0.5 + g.random((r, r))


def _target_grid(spec: GenSpec, seed: int):
    rp = spec.r * spec.p
    g = keyed_generator(seed, GEN_STREAM + 1)
    u_cells = g.standard_normal((rp, spec.k_true))
    v_cells = g.standard_normal((rp, spec.k_true))
    grid = u_cells @ v_cells.T
    if spec.noise_sigma > 0:
        grid = grid + spec.noise_sigma * g.standard_normal((rp, rp))
    return grid, u_cells, v_cells


def _grids_valid(spec: GenSpec, gw: np.ndarray, ga: np.ndarray) -> bool:
    if not (_rows_distinct(gw) and _rows_distinct(gw.T)):
        return False
    if not (np.count_nonzero(gw, axis=1).all() and np.count_nonzero(gw, axis=0).all()):
        return False
    cell_w = np.repeat(np.repeat(gw, spec.p, axis=0), spec.p, axis=1)
    masked = cell_w * ga
    return _rows_distinct(masked) and _rows_distinct(masked.T)


def _accepted_grids(spec: GenSpec):
    for attempt in range(_MAX_ATTEMPTS):
        seed = (spec.seed ^ (attempt * _ATTEMPT_STRIDE)) & MASK64
        gw = _weight_grid(spec, seed)
        ga, u_cells, v_cells = _target_grid(spec, seed)
        if _grids_valid(spec, gw, ga):
            return gw, ga, u_cells, v_cells
    raise RuntimeError(f"instance generation failed after {_MAX_ATTEMPTS} attempts")


def generate_with_factors(spec: GenSpec):
    """Planted instance plus the (n, k_true) factor pair tiled from the cells.

    With zero noise the factors reproduce the target exactly, so the
    instance has a known zero-cost rank-k_true solution.
    """
    gw, ga, u_cells, v_cells = _accepted_grids(spec)
    wband = _band_ids(spec.n, spec.r)
    aband = _sub_band_ids(spec.n, spec.r, spec.p)
    W = gw[wband][:, wband]
    A = ga[aband][:, aband]
    inst = build_instance(A, W, tolerance=0.0)
    if inst.w_rows.num_groups != spec.r or inst.w_cols.num_groups != spec.r:
        raise RuntimeError("detected weight groups disagree with the planted count")
    rp = spec.r * spec.p
    if inst.wa_rows.num_groups != rp or inst.wa_cols.num_groups != rp:
        raise RuntimeError("detected masked groups disagree with the planted count")
    return inst, u_cells[aband], v_cells[aband]


def generate(spec: GenSpec) -> StructuredInstance:
    """Dense planted instance whose detected (r, p) equal the request."""
    inst, _, _ = generate_with_factors(spec)
    return inst


def generate_compressed(spec: GenSpec) -> CompressedInstance:
    """The same planted instance in O(r*p*n) memory, for large benchmarks.

    Identical seeds accept identical grids in both representations, so
    compress_instance(generate(spec)) matches this output slab for slab.
    """
    gw, ga, _, _ = _accepted_grids(spec)
    n, r, p = spec.n, spec.r, spec.p
    wband = _band_ids(n, r)
    aband = _sub_band_ids(n, r, p)
    parent = np.arange(r * p, dtype=np.int64) // p

    row_design = np.ascontiguousarray(gw[:, wband])
    col_design = np.ascontiguousarray(gw.T[:, wband])
    row_target = np.ascontiguousarray(gw[parent][:, wband] * ga[:, aband])
    col_target = np.ascontiguousarray(gw.T[parent][:, wband] * ga.T[:, aband])

    return CompressedInstance(
        n_size=n, r=r, p=p,
        w_rows=_index_from_labels(wband, ROWS),
        w_cols=_index_from_labels(wband, COLS),
        wa_rows=_index_from_labels(aband, ROWS),
        wa_cols=_index_from_labels(aband, COLS),
        row_design=row_design, row_target=row_target,
        col_design=col_design, col_target=col_target)


def generate_attention_mask(n: int, block: int) -> np.ndarray:
    """Block-lower-triangular 0/1 mask with n/block distinct rows and columns."""
    if block < 1 or n < 1:
        raise ValueError("n and block must be positive")
    if n % block != 0:
        raise ValueError("block must divide n")
    parts = n // block
    band = np.repeat(np.arange(parts), block)
    grid = np.tril(np.ones((parts, parts)))
    return grid[band][:, band]
