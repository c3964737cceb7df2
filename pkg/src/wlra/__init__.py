"""Weighted low-rank approximation for matrices with repeated row/column patterns.

Minimizes || W o (U V^T - A) ||_F^2 by alternating sketched least squares
that solves one regression per distinct pattern group instead of one per
row, keeping each sweep's work proportional to n times the group count.
"""

from .generator import (GenSpec, WEIGHT_STYLES, generate, generate_attention_mask,
                        generate_compressed, generate_with_factors)
from .grouped_als import (Factorization, SolveOptions, SolveReport, col_certificates,
                          min_norm_solve, row_certificates, solve, update_cols,
                          update_rows)
from .opt_bounds import (BoundParams, default_gamma, iteration_budget,
                         lower_bound_log2, upper_bound)
from .pattern_index import (CompressedInstance, PatternIndex, StructuredInstance,
                            build_instance, compress_instance, detect_groups, refine)
from .sketch import (SketchMatrix, gaussian_sketch, identity_embedding,
                     keyed_generator, keyed_normals, sketch_dim, sketched_design)
from .weighted_cost import (GroupedFactor, WorkCounters, compress_factor,
                            cost_dense, cost_grouped, cost_grouped_cols, kahan_sum)

__version__ = "0.1.0"

__all__ = [
    "BoundParams", "CompressedInstance", "Factorization", "GenSpec",
    "GroupedFactor", "PatternIndex", "SketchMatrix", "SolveOptions",
    "SolveReport", "StructuredInstance", "WEIGHT_STYLES", "WorkCounters",
    "build_instance", "col_certificates", "compress_factor", "compress_instance",
    "cost_dense", "cost_grouped", "cost_grouped_cols", "default_gamma",
    "detect_groups", "gaussian_sketch", "generate", "generate_attention_mask",
    "generate_compressed", "generate_with_factors", "identity_embedding",
    "iteration_budget", "kahan_sum", "keyed_generator", "keyed_normals",
    "lower_bound_log2", "min_norm_solve", "refine", "row_certificates",
    "sketch_dim", "sketched_design", "solve", "update_cols", "update_rows",
    "upper_bound",
]
