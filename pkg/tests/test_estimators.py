import numpy as np
import pytest

from bootsparse.estimators import SensingProblem, bagging, bolasso, jobs, l1_min
from bootsparse.linalg import row_support
from bootsparse.sampling import SamplingPlan
from bootsparse.solver import SolverConfig, admm_lasso

TIGHT = dict(eps_abs=1e-10, eps_rel=1e-8, max_iter=100_000)


def noisy_instance(rng, m=24, n=30, s=4, noise=0.05):
    A = rng.standard_normal((m, n))
    x = np.zeros(n)
    support = rng.permutation(n)[:s]
    x[support] = rng.standard_normal(s) + np.sign(rng.standard_normal(s)) * 1.0
    y = A @ x + noise * rng.standard_normal(m)
    return SensingProblem(A, y), x


class TestJobs:
    def test_identity_noiseless_recovers(self):
        rng = np.random.default_rng(0)
        n = 8
        x = rng.standard_normal(n)
        prob = SensingProblem(np.eye(n), x.copy())
        plan = SamplingPlan(n, n, 4, "subsample", master_seed=0)
        res = jobs(prob, plan, SolverConfig(lam=1e-6, **TIGHT))
        assert np.abs(res.x_hat - x).max() < 1e-3

    def test_identity_noiseless_bootstrap_coverage_weights(self):
        # with bootstrap subsets a vanishing penalty leaves each predictor's
        # uncovered coordinates at zero, so the column average shrinks entry i
        # by the fraction of subsets containing row i
        from bootsparse.sampling import generate_subsets

        rng = np.random.default_rng(0)
        n = 8
        x = rng.standard_normal(n)
        prob = SensingProblem(np.eye(n), x.copy())
        plan = SamplingPlan(n, n, 4, "bootstrap", master_seed=0)
        counts = np.zeros(n)
        for idx in generate_subsets(plan):
            counts[np.unique(idx)] += 1
        res = jobs(prob, plan, SolverConfig(lam=1e-6, **TIGHT))
        assert np.abs(res.x_hat - x * counts / plan.K).max() < 1e-3

    def test_zero_measurements(self):
        prob = SensingProblem(np.eye(5), np.zeros(5))
        plan = SamplingPlan(5, 3, 2, "bootstrap", 0)
        res = jobs(prob, plan, SolverConfig(lam=0.5))
        assert np.all(res.x_hat == 0.0)
        assert res.support == set()

    def test_full_subsample_equals_rescaled_lasso(self):
        # every size-m subsample is a row permutation of the problem, so the
        # joint solve collapses to the single LASSO at lam / sqrt(K)
        rng = np.random.default_rng(1)
        prob, _ = noisy_instance(rng, m=20, n=15, s=3, noise=0.1)
        K = 4
        plan = SamplingPlan(prob.m, prob.m, K, "subsample", 5)
        lam = 1.2
        res = jobs(prob, plan, SolverConfig(lam=lam, **TIGHT))
        X = res.per_estimate
        assert np.abs(X - X[:, :1]).max() < 1e-6
        single = admm_lasso(prob.A, prob.y, SolverConfig(lam=lam / np.sqrt(K), **TIGHT))
        ref = single.X[:, 0]
        assert np.linalg.norm(res.x_hat - ref) <= 1e-6 * max(1.0, np.linalg.norm(ref))

    def test_columns_share_support_and_mean(self):
        rng = np.random.default_rng(2)
        prob, _ = noisy_instance(rng)
        plan = SamplingPlan(prob.m, 16, 5, "bootstrap", 7)
        res = jobs(prob, plan, SolverConfig(lam=1.0))
        assert np.array_equal(res.x_hat, res.per_estimate.mean(axis=1))
        shared = row_support(res.per_estimate, 0.0)
        for j in range(plan.K):
            per_col = set(np.flatnonzero(res.per_estimate[:, j]))
            assert per_col <= shared

    def test_plan_mismatch_rejected(self):
        prob = SensingProblem(np.eye(4), np.ones(4))
        with pytest.raises(ValueError):
            jobs(prob, SamplingPlan(5, 3, 2, "bootstrap", 0), SolverConfig(lam=0.1))

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        prob, _ = noisy_instance(rng)
        plan = SamplingPlan(prob.m, 12, 3, "bootstrap", 9)
        a = jobs(prob, plan, SolverConfig(lam=0.7))
        b = jobs(prob, plan, SolverConfig(lam=0.7))
        assert np.array_equal(a.x_hat, b.x_hat)
        assert a.support == b.support


class TestBagging:
    def test_K1_equals_single_subsampled_lasso(self):
        rng = np.random.default_rng(4)
        prob, _ = noisy_instance(rng)
        plan = SamplingPlan(prob.m, 14, 1, "bootstrap", 21)
        res = bagging(prob, plan, SolverConfig(lam=0.6))
        from bootsparse.sampling import generate_subsets

        (idx,) = generate_subsets(plan)
        ref = admm_lasso(prob.A[idx], prob.y[idx], SolverConfig(lam=0.6))
        assert np.array_equal(res.x_hat, ref.X[:, 0])

    def test_zero_measurements(self):
        prob = SensingProblem(np.eye(5), np.zeros(5))
        plan = SamplingPlan(5, 3, 4, "bootstrap", 1)
        res = bagging(prob, plan, SolverConfig(lam=0.5))
        assert np.all(res.x_hat == 0.0)

    def test_support_within_union_of_individual_supports(self):
        rng = np.random.default_rng(5)
        prob, _ = noisy_instance(rng, noise=0.3)
        plan = SamplingPlan(prob.m, 12, 6, "bootstrap", 3)
        res = bagging(prob, plan, SolverConfig(lam=1.5))
        union = set()
        for j in range(plan.K):
            union |= row_support(res.per_estimate[:, j], 1e-4)
        assert row_support(res.x_hat, 1e-4) <= union

    def test_mean_of_individuals(self):
        rng = np.random.default_rng(6)
        prob, _ = noisy_instance(rng)
        plan = SamplingPlan(prob.m, 10, 5, "bootstrap", 2)
        res = bagging(prob, plan, SolverConfig(lam=0.8))
        assert np.array_equal(res.x_hat, res.per_estimate.mean(axis=1))


class TestBolasso:
    def test_identical_supports_survive_intersection(self):
        rng = np.random.default_rng(7)
        n = 20
        x = np.zeros(n)
        x[[2, 5]] = [3.0, -2.0]
        A = rng.standard_normal((40, n))
        prob = SensingProblem(A, A @ x + 0.01 * rng.standard_normal(40))
        plan = SamplingPlan(40, 30, 4, "bootstrap", 8)
        res = bolasso(prob, plan, SolverConfig(lam=1.0))
        assert res.support == {2, 5}
        assert set(np.flatnonzero(res.x_hat)) == {2, 5}

    def test_any_zero_estimate_gives_zero(self):
        # large lam forces every individual estimate (hence the
        # intersection) to zero
        rng = np.random.default_rng(8)
        prob, _ = noisy_instance(rng)
        res = bolasso(
            prob, SamplingPlan(prob.m, 12, 3, "bootstrap", 4), SolverConfig(lam=1e6)
        )
        assert np.all(res.x_hat == 0.0)
        assert res.support == set()

    def test_K1_is_debiased_single_lasso(self):
        rng = np.random.default_rng(9)
        prob, _ = noisy_instance(rng)
        plan = SamplingPlan(prob.m, prob.m, 1, "subsample", 2)
        res = bolasso(prob, plan, SolverConfig(lam=0.8))
        single = admm_lasso(prob.A, prob.y, SolverConfig(lam=0.8))
        s = row_support(single.X[:, 0], 1e-4)
        from bootsparse.solver import least_squares_on_support

        assert np.array_equal(res.x_hat, least_squares_on_support(prob.A, prob.y, s))

    def test_support_shrinks_with_K(self):
        # intersection over the first K' subsets contains the full intersection
        rng = np.random.default_rng(10)
        prob, _ = noisy_instance(rng, noise=0.4)
        cfg = SolverConfig(lam=0.5)
        K = 6
        res = bolasso(prob, SamplingPlan(prob.m, 12, K, "bootstrap", 11), cfg)
        supports = [row_support(res.per_estimate[:, j], 1e-4) for j in range(K)]
        running = supports[0]
        prev = None
        for j in range(1, K):
            running = running & supports[j]
            if prev is not None:
                assert running <= prev
            prev = running
        assert running <= supports[0]

    def test_refit_uses_full_measurements(self):
        rng = np.random.default_rng(11)
        prob, _ = noisy_instance(rng)
        plan = SamplingPlan(prob.m, 12, 3, "bootstrap", 13)
        res = bolasso(prob, plan, SolverConfig(lam=0.9))
        if res.support:
            from bootsparse.solver import least_squares_on_support

            assert np.array_equal(
                res.x_hat, least_squares_on_support(prob.A, prob.y, res.support)
            )


class TestL1Min:
    def test_zero(self):
        res = l1_min(SensingProblem(np.eye(3), np.zeros(3)), SolverConfig(lam=0.1))
        assert np.all(res.x_hat == 0.0)
        assert res.per_estimate is None

    def test_identity_soft_threshold(self):
        y = np.array([3.0, -2.0, 0.5])
        lam = 0.4
        res = l1_min(SensingProblem(np.eye(3), y), SolverConfig(lam=lam, **TIGHT))
        expected = np.sign(y) * np.maximum(np.abs(y) - lam, 0.0)
        assert np.abs(res.x_hat - expected).max() < 1e-7

    def test_equals_admm_lasso_exactly(self):
        rng = np.random.default_rng(12)
        prob, _ = noisy_instance(rng)
        cfg = SolverConfig(lam=0.7)
        res = l1_min(prob, cfg)
        ref = admm_lasso(prob.A, prob.y, cfg)
        assert np.array_equal(res.x_hat, ref.X[:, 0])


class TestEnsembleReductions:
    def test_jobs_and_bagging_K1_Lm_subsample_reduce_to_l1(self):
        rng = np.random.default_rng(13)
        prob, _ = noisy_instance(rng, m=18, n=14, s=3)
        plan = SamplingPlan(prob.m, prob.m, 1, "subsample", 3)
        cfg = SolverConfig(lam=0.9, **TIGHT)
        full = l1_min(prob, cfg)
        res_j = jobs(prob, plan, cfg)
        res_b = bagging(prob, plan, cfg)
        assert np.abs(res_j.x_hat - full.x_hat).max() < 1e-6
        assert np.abs(res_b.x_hat - full.x_hat).max() < 1e-6

    def test_warm_start_reuses_shapes(self):
        rng = np.random.default_rng(14)
        prob, _ = noisy_instance(rng)
        plan = SamplingPlan(prob.m, 12, 3, "bootstrap", 5)
        cold = jobs(prob, plan, SolverConfig(lam=1.0))
        warm = jobs(prob, plan, SolverConfig(lam=0.9), warm=cold)
        assert warm.per_estimate.shape == cold.per_estimate.shape
        with pytest.raises(ValueError):
            bagging(prob, plan, SolverConfig(lam=0.9), warm=cold)
