"""Hybrid runs: CMA-ES/WOA initialization feeding the particle flow."""

import numpy as np
import pytest

from sbsopt import (
    BudgetTooSmall,
    ConfigError,
    EvalCounter,
    FilterConfig,
    HybridConfig,
    cmaes_run,
    derive_seed,
    hybrid_init,
    make_benchmark,
    sbs_hybrid_run,
    sbs_pf_hybrid_run,
    woa_run,
)


class TestHybridConfig:
    def test_defaults(self):
        cfg = HybridConfig()
        assert cfg.cmaes_budget == 1000
        assert cfg.woa_iterations == 1000
        assert cfg.inner == "plain"

    def test_validation(self):
        with pytest.raises(ConfigError):
            HybridConfig(cmaes_budget=0)
        with pytest.raises(ConfigError):
            HybridConfig(woa_iterations=-1)
        with pytest.raises(ConfigError):
            HybridConfig(inner="annealed")


class TestHybridInit:
    def test_woa_winner_hands_over_its_population(self):
        # a CMA phase starved to 12 evaluations loses to a long WOA phase;
        # the initial particles must then be the WOA population verbatim
        obj = make_benchmark("rastrigin", 2)
        seed = 4
        woa_result, woa_pop = woa_run(obj, 10, 300, derive_seed(seed, "hybrid-woa"))
        cma_result, _ = cmaes_run(obj, 12, derive_seed(seed, "hybrid-cma"))
        assert not (cma_result.best_f < woa_result.best_f)  # WOA wins this setup
        pts = hybrid_init(obj, 10, 12, 300, seed, EvalCounter())
        np.testing.assert_array_equal(pts.positions, woa_pop[:10])

    def test_cma_winner_samples_its_gaussian(self):
        # generous CMA budget against a 5-iteration WOA: CMA wins, and the
        # particles are draws from its final search distribution
        obj = make_benchmark("rosenbrock", 2)
        seed = 7
        cma_result, gauss = cmaes_run(obj, 1000, derive_seed(seed, "hybrid-cma"))
        woa_result, _ = woa_run(obj, max(2, 200), 5, derive_seed(seed, "hybrid-woa"))
        assert cma_result.best_f < woa_result.best_f
        pts = hybrid_init(obj, 200, 1000, 5, seed, EvalCounter())
        assert pts.n == 200
        for x in pts.positions:
            assert obj.domain.contains(x)
        # whitened displacement from the Gaussian mean stays within 6 sigma
        cov = gauss.cov * gauss.sigma**2
        delta = pts.positions - gauss.mean
        maha = np.sqrt(np.einsum("nd,dc,nc->n", delta, np.linalg.inv(cov), delta))
        assert maha.max() < 6.0

    def test_counts_both_phases(self):
        obj = make_benchmark("sphere", 2)
        counter = EvalCounter()
        hybrid_init(obj, 5, 60, 20, seed=0, counter=counter)
        assert counter.count == 60 + max(2, 5) * (20 + 1)

    def test_single_particle_request_is_valid(self):
        # WOA needs two agents, so a 1-particle init still runs with 2
        obj = make_benchmark("sphere", 2)
        counter = EvalCounter()
        pts = hybrid_init(obj, 1, 60, 10, seed=1, counter=counter)
        assert pts.n == 1
        assert counter.count == 60 + 2 * 11


class TestHybridRun:
    def test_respects_budget(self):
        obj = make_benchmark("himmelblau", 2)
        cfg = HybridConfig(cmaes_budget=200, woa_iterations=30)
        for budget in (2000, 5000, 20_000):
            r = sbs_hybrid_run(obj, n_particles=10, budget=budget, seed=0, hybrid=cfg)
            assert r.evals_used <= budget

    def test_budget_below_init_cost_raises(self):
        obj = make_benchmark("sphere", 2)
        cfg = HybridConfig(cmaes_budget=200, woa_iterations=30)
        init_cost = 200 + max(2, 10) * (30 + 1)
        with pytest.raises(BudgetTooSmall):
            sbs_hybrid_run(obj, n_particles=10, budget=init_cost - 1, seed=0, hybrid=cfg)

    def test_exact_init_budget_returns_the_incumbent(self):
        # no room for even one continuation iteration: the init-phase
        # incumbent is the answer and zero iterations are reported
        obj = make_benchmark("rastrigin", 2)
        seed = 4
        cfg = HybridConfig(cmaes_budget=12, woa_iterations=300)
        init_cost = 12 + max(2, 10) * (300 + 1)
        r = sbs_hybrid_run(obj, n_particles=10, budget=init_cost, seed=seed, hybrid=cfg)
        assert r.iterations_done == 0
        assert r.evals_used == init_cost
        woa_result, _ = woa_run(obj, 10, 300, derive_seed(seed, "hybrid-woa"))
        assert r.best_f == woa_result.best_f

    def test_continuation_never_loses_to_the_incumbent(self):
        obj = make_benchmark("sphere", 2)
        cfg = HybridConfig(cmaes_budget=150, woa_iterations=20)
        cma_result, _ = cmaes_run(obj, 150, derive_seed(3, "hybrid-cma"))
        woa_result, _ = woa_run(obj, 10, 20, derive_seed(3, "hybrid-woa"))
        incumbent = min(cma_result.best_f, woa_result.best_f)
        r = sbs_hybrid_run(obj, n_particles=10, budget=20_000, seed=3, hybrid=cfg)
        assert r.best_f <= incumbent

    def test_deterministic_rerun(self):
        obj = make_benchmark("camel", 2)
        cfg = HybridConfig(cmaes_budget=150, woa_iterations=25)
        a = sbs_hybrid_run(obj, n_particles=8, budget=10_000, seed=5, hybrid=cfg)
        b = sbs_hybrid_run(obj, n_particles=8, budget=10_000, seed=5, hybrid=cfg)
        assert a.best_x.tobytes() == b.best_x.tobytes()
        assert a.evals_used == b.evals_used

    def test_pf_variant_without_filter_matches_plain(self):
        obj = make_benchmark("levy", 2)
        cfg = HybridConfig(cmaes_budget=150, woa_iterations=25)
        plain = sbs_hybrid_run(obj, n_particles=8, budget=8000, seed=6, hybrid=cfg)
        pf = sbs_pf_hybrid_run(obj, n_particles=8, budget=8000, seed=6, hybrid=cfg,
                               filter_config=None)
        assert plain.best_x.tobytes() == pf.best_x.tobytes()
        assert plain.evals_used == pf.evals_used

    def test_pf_variant_filters_the_continuation(self):
        obj = make_benchmark("ackley", 2)
        cfg = HybridConfig(cmaes_budget=150, woa_iterations=25)
        r = sbs_pf_hybrid_run(obj, n_particles=30, budget=40_000, seed=7,
                              hybrid=cfg, filter_config=FilterConfig(),
                              collect_diagnostics=True)
        live = [rec.live for rec in r.diagnostics]
        assert live and live[-1] < 30
        assert r.evals_used <= 40_000

    def test_single_particle_hybrid(self):
        obj = make_benchmark("sphere", 2)
        cfg = HybridConfig(cmaes_budget=100, woa_iterations=10)
        r = sbs_hybrid_run(obj, n_particles=1, budget=5000, seed=8, hybrid=cfg)
        assert obj.domain.contains(r.best_x)
        assert r.evals_used <= 5000
