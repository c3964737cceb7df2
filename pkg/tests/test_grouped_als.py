import numpy as np
import pytest

from wlra import (GenSpec, SolveOptions, build_instance, col_certificates,
                  compress_instance, cost_dense, gaussian_sketch, generate,
                  generate_with_factors, min_norm_solve, row_certificates,
                  identity_embedding, solve, update_cols, update_rows)

from oracles import cramer_inverse_3x3, power_iteration_rank_k_residual, rowwise_weighted_lstsq


def _opts(**kw):
    base = dict(k=3, eps=0.25, max_sweeps=30, rel_tol=1e-9, seed=0)
    base.update(kw)
    return SolveOptions(**base)


# ---------------------------------------------------------------------------
# min_norm_solve


def test_min_norm_identity_padded():
    D = np.hstack([np.eye(3), np.zeros((3, 5))])
    target = np.zeros(8)
    target[0] = 1.0
    assert np.allclose(min_norm_solve(D, target), [1.0, 0.0, 0.0])


def test_min_norm_zero_design():
    assert np.array_equal(min_norm_solve(np.zeros((3, 6)), np.ones(6)), np.zeros(3))


def test_min_norm_matches_cramer_normal_equations():
    rng = np.random.default_rng(0)
    D = rng.standard_normal((3, 8))
    b = rng.standard_normal(8)
    want = cramer_inverse_3x3(D @ D.T) @ (D @ b)
    got = min_norm_solve(D, b)
    assert got == pytest.approx(want, rel=1e-10)


def test_min_norm_rank_deficient_splits_weight():
    d = np.array([1.0, 2.0, -1.0, 0.5])
    D = np.vstack([d, d])
    b = np.array([2.0, 4.0, -2.0, 1.0])
    x = min_norm_solve(D, b)
    # consistent rank-1 system: total coefficient 2, shared equally
    assert x == pytest.approx([1.0, 1.0], rel=1e-12)


def test_min_norm_non_finite_rejected():
    with pytest.raises(ValueError):
        min_norm_solve(np.array([[np.inf, 1.0]]), np.ones(2))
    with pytest.raises(ValueError):
        min_norm_solve(np.ones((1, 2)), np.array([np.nan, 1.0]))


def test_min_norm_shape_errors():
    with pytest.raises(ValueError):
        min_norm_solve(np.ones((2, 3)), np.ones(4))


# ---------------------------------------------------------------------------
# update_rows / update_cols


def test_update_rows_unweighted_projection():
    rng = np.random.default_rng(1)
    n, k = 16, 3
    A = rng.standard_normal((n, n))
    inst = build_instance(A, np.ones((n, n)))
    V = np.linalg.qr(rng.standard_normal((n, k)))[0]
    gu = update_rows(inst, V, None, _opts(sketchless=True))
    reps = inst.wa_rows.representatives
    assert gu.rows == pytest.approx(A[reps] @ V, rel=1e-10, abs=1e-12)


def test_update_rows_zero_weight_group():
    rng = np.random.default_rng(2)
    n = 6
    W = np.vstack([np.ones((3, n)), np.zeros((3, n))])
    A = rng.standard_normal((n, n))
    inst = build_instance(A, W)
    V = rng.standard_normal((n, 2))
    gu = update_rows(inst, V, None, _opts(k=2, sketchless=True))
    U = gu.expand()
    assert np.all(U[3:] == 0.0)


def test_update_rows_matches_rowwise_oracle():
    inst = generate(GenSpec(n=32, r=2, p=2, k_true=4, noise_sigma=0.3, seed=7))
    rng = np.random.default_rng(8)
    V = rng.standard_normal((32, 3))
    gu = update_rows(inst, V, None, _opts(sketchless=True))
    want = rowwise_weighted_lstsq(inst.A, inst.W, V)
    got = gu.expand()
    scale = np.abs(want).max()
    assert np.abs(got - want).max() <= 1e-9 * scale


def test_update_rows_identity_embedding_equals_sketchless():
    inst = generate(GenSpec(n=20, r=2, p=2, k_true=2, noise_sigma=0.1, seed=3))
    rng = np.random.default_rng(4)
    V = rng.standard_normal((20, 3))
    exact = update_rows(inst, V, None, _opts(sketchless=True))
    via_identity = update_rows(inst, V, identity_embedding(20), _opts())
    assert np.array_equal(exact.rows, via_identity.rows)


def test_update_rows_requires_sketch_when_not_sketchless():
    inst = generate(GenSpec(n=12, r=2, p=2, k_true=2, seed=5))
    V = np.ones((12, 2))
    with pytest.raises(ValueError):
        update_rows(inst, V, None, _opts(k=2))
    with pytest.raises(ValueError):
        update_rows(inst, V, gaussian_sketch(0, 9, 11), _opts(k=2))
    with pytest.raises(ValueError):
        update_rows(inst, V, gaussian_sketch(0, 9, 12), _opts(k=2, sketchless=True))


def test_update_rows_assembles_one_design_per_weight_pattern():
    from wlra import WorkCounters
    inst = generate(GenSpec(n=40, r=4, p=2, k_true=2, noise_sigma=0.1, seed=6))
    rng = np.random.default_rng(7)
    V = rng.standard_normal((40, 3))
    S = gaussian_sketch(5, 48, 40)
    counters = WorkCounters()
    update_rows(inst, V, S, _opts(), counters)
    assert counters.designs_assembled == inst.w_rows.num_groups == 4
    assert counters.regressions_solved == inst.wa_rows.num_groups == 8


def test_update_cols_transpose_consistency():
    inst = generate(GenSpec(n=24, r=2, p=2, k_true=2, noise_sigma=0.1, seed=9))
    rng = np.random.default_rng(10)
    U = rng.standard_normal((24, 3))
    S = gaussian_sketch(21, 48, 24)
    a = update_cols(inst, U, S, _opts())
    b = update_rows(inst.transposed(), U, S, _opts())
    assert np.array_equal(a.rows, b.rows)


def test_update_cols_unweighted_projection():
    rng = np.random.default_rng(11)
    n = 16
    A = rng.standard_normal((n, n))
    inst = build_instance(A, np.ones((n, n)))
    U = np.linalg.qr(rng.standard_normal((n, 3)))[0]
    gv = update_cols(inst, U, None, _opts(sketchless=True))
    reps = inst.wa_cols.representatives
    assert gv.rows == pytest.approx(A[:, reps].T @ U, rel=1e-10, abs=1e-12)


def test_certificates_small_after_sketchless_half_sweeps():
    inst = generate(GenSpec(n=48, r=3, p=2, k_true=4, noise_sigma=0.2, seed=12))
    rng = np.random.default_rng(13)
    V = rng.standard_normal((48, 3))
    gu = update_rows(inst, V, None, _opts(sketchless=True))
    assert row_certificates(inst, gu, V).max() <= 1e-8
    gv = update_cols(inst, gu.expand(), None, _opts(sketchless=True))
    assert col_certificates(inst, gv, gu.expand()).max() <= 1e-8


# ---------------------------------------------------------------------------
# solve


def test_solve_planted_rank_k_reaches_zero():
    inst, U_pl, V_pl = generate_with_factors(GenSpec(n=48, r=2, p=2, k_true=3, seed=14))
    scale = float(np.sum((inst.W * inst.A) ** 2))
    assert cost_dense(inst.A, inst.W, U_pl, V_pl) <= 1e-16 * scale
    fact, rep = solve(inst, _opts(max_sweeps=50, rel_tol=0.0))
    assert rep.final_cost <= 1e-8 * scale


def test_solve_exact_rank_block_instance_all_ones_weight():
    # block-structured A of exact rank k under an unweighted objective
    rng = np.random.default_rng(25)
    blocks, reps, k = 8, 6, 3
    cell = rng.standard_normal((blocks, k)) @ rng.standard_normal((k, blocks))
    A = np.repeat(np.repeat(cell, reps, axis=0), reps, axis=1)
    n = blocks * reps
    inst = build_instance(A, np.ones((n, n)))
    _, rep = solve(inst, _opts(k=k, max_sweeps=50, rel_tol=0.0))
    assert rep.final_cost <= 1e-8 * float(np.sum(A * A))


def test_solve_unweighted_matches_truncated_svd_residual():
    rng = np.random.default_rng(15)
    n, k = 40, 2
    A = rng.standard_normal((n, n))
    inst = build_instance(A, np.ones((n, n)))
    _, rep = solve(inst, _opts(k=k, sketchless=True, max_sweeps=100, rel_tol=1e-12,
                               restarts=2))
    oracle = power_iteration_rank_k_residual(A, k, seed=1)
    assert rep.final_cost <= 1.01 * oracle
    assert rep.final_cost >= oracle * (1.0 - 1e-6)


def test_solve_sketchless_monotone_descent():
    inst = generate(GenSpec(n=40, r=2, p=2, k_true=5, noise_sigma=0.3, seed=16))
    _, rep = solve(inst, _opts(sketchless=True, max_sweeps=8, rel_tol=0.0))
    costs = rep.cost_per_sweep
    for a, b in zip(costs, costs[1:]):
        assert b <= a * (1.0 + 1e-12)


def test_solve_broadcast_consistency_and_counts():
    inst = generate(GenSpec(n=36, r=3, p=2, k_true=3, noise_sigma=0.1, seed=17))
    fact, rep = solve(inst, _opts(max_sweeps=5, rel_tol=0.0))
    for g in range(inst.wa_rows.num_groups):
        members = np.nonzero(inst.wa_rows.group_of == g)[0]
        assert np.all(fact.U[members] == fact.U[members[0]])
    assert all(c == inst.wa_rows.num_groups for c in rep.regressions_per_half_sweep[0::2])
    assert all(c == inst.wa_cols.num_groups for c in rep.regressions_per_half_sweep[1::2])
    sweeps = len(rep.cost_per_sweep) // 2
    assert rep.regressions_solved <= 2 * sweeps * inst.r * inst.p


def test_solve_final_cost_is_exact_and_bracketed():
    inst = generate(GenSpec(n=32, r=2, p=2, k_true=4, noise_sigma=0.4, seed=18))
    fact, rep = solve(inst, _opts(max_sweeps=15))
    dense = cost_dense(inst.A, inst.W, fact.U, fact.V)
    assert abs(rep.final_cost - dense) <= 1e-9 * (1.0 + dense)
    lower_log2, upper = rep.bracket
    assert 0.0 <= rep.final_cost <= upper * (1.0 + 1e-9)
    assert np.isfinite(lower_log2)


def test_solve_sketched_close_to_sketchless_median():
    inst = generate(GenSpec(n=128, r=4, p=2, k_true=6, noise_sigma=0.1, seed=19))
    _, exact = solve(inst, _opts(sketchless=True, max_sweeps=30))
    ratios = []
    for seed in range(20):
        _, rep = solve(inst, _opts(max_sweeps=30, seed=seed))
        ratios.append(rep.final_cost / exact.final_cost)
    eps = 0.25
    assert np.median(ratios) <= 1.0 + 3.0 * eps


def test_solve_deterministic_and_seed_sensitive():
    inst = generate(GenSpec(n=32, r=2, p=2, k_true=3, noise_sigma=0.2, seed=20))
    f1, r1 = solve(inst, _opts(max_sweeps=6, seed=5))
    f2, r2 = solve(inst, _opts(max_sweeps=6, seed=5))
    assert np.array_equal(f1.U, f2.U) and np.array_equal(f1.V, f2.V)
    assert r1.cost_per_sweep == r2.cost_per_sweep
    assert r1.sketch_seeds == r2.sketch_seeds
    _, r3 = solve(inst, _opts(max_sweeps=6, seed=6))
    assert r3.cost_per_sweep != r1.cost_per_sweep


def test_solve_restarts_never_hurt():
    inst = generate(GenSpec(n=32, r=2, p=2, k_true=5, noise_sigma=0.3, seed=21))
    _, single = solve(inst, _opts(max_sweeps=10, seed=3))
    _, multi = solve(inst, _opts(max_sweeps=10, seed=3, restarts=3))
    assert multi.final_cost <= single.final_cost * (1.0 + 1e-12)


def test_solve_fixed_sketch_draws_once():
    inst = generate(GenSpec(n=32, r=2, p=2, k_true=3, noise_sigma=0.1, seed=22))
    _, rep = solve(inst, _opts(max_sweeps=6, fixed_sketch=True, rel_tol=0.0))
    assert len(rep.sketch_seeds) == 2
    _, rep2 = solve(inst, _opts(max_sweeps=6, rel_tol=0.0))
    assert len(rep2.sketch_seeds) == 2 * (len(rep2.cost_per_sweep) // 2)


def test_solve_compressed_matches_dense_instance():
    dense = generate(GenSpec(n=64, r=4, p=2, k_true=3, noise_sigma=0.1, seed=23))
    comp = compress_instance(dense)
    f1, r1 = solve(dense, _opts(max_sweeps=8))
    f2, r2 = solve(comp, _opts(max_sweeps=8))
    assert np.array_equal(f1.U, f2.U)
    assert r1.cost_per_sweep == r2.cost_per_sweep


def test_solve_rejects_k_larger_than_n():
    inst = generate(GenSpec(n=8, r=2, p=2, k_true=2, seed=24))
    with pytest.raises(ValueError):
        solve(inst, _opts(k=9))


def test_solve_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(k=0)
    with pytest.raises(ValueError):
        SolveOptions(k=2, eps=0.5)
    with pytest.raises(ValueError):
        SolveOptions(k=2, rel_tol=-1.0)
    with pytest.raises(ValueError):
        SolveOptions(k=2, restarts=0)
