"""Particle runs: budget accounting, filtering, and determinism."""

import numpy as np
import pytest

from sbsopt import (
    BudgetTooSmall,
    ConfigError,
    FilterConfig,
    make_benchmark,
    make_objective,
    pf_filter,
    sbs_pf_run,
    sbs_run,
)


class TestFilterConfig:
    def test_defaults(self):
        cfg = FilterConfig()
        assert cfg.q_value_percentile == 80.0
        assert cfg.p_move_percentile == 25.0
        assert cfg.start_iteration == 10
        assert cfg.min_particles is None

    def test_validation(self):
        with pytest.raises(ConfigError):
            FilterConfig(q_value_percentile=0.0)
        with pytest.raises(ConfigError):
            FilterConfig(q_value_percentile=101.0)
        with pytest.raises(ConfigError):
            FilterConfig(p_move_percentile=100.0)
        with pytest.raises(ConfigError):
            FilterConfig(p_move_percentile=-1.0)
        with pytest.raises(ConfigError):
            FilterConfig(start_iteration=-1)
        with pytest.raises(ConfigError):
            FilterConfig(min_particles=0)


class TestPfFilter:
    def test_hand_case_removes_stalled_high_value_particle(self):
        # particle 3 has the worst value (above the 75th percentile 4.75)
        # and the smallest move (below the 25th percentile) -> removed
        f = np.array([1.0, 2.0, 3.0, 10.0])
        prev = np.zeros((4, 2))
        pos = prev.copy()
        pos[:3] += 1.0 / np.sqrt(2.0)
        pos[3, 0] = 0.001
        cfg = FilterConfig(q_value_percentile=75.0, p_move_percentile=25.0,
                           start_iteration=0, min_particles=1)
        keep = pf_filter(pos, prev, f, cfg)
        np.testing.assert_array_equal(keep, [0, 1, 2])

    def test_identical_population_survives(self):
        # with all values and moves equal, nothing is strictly above/below
        pos = np.ones((5, 2))
        prev = np.zeros((5, 2))
        f = np.full(5, 3.0)
        cfg = FilterConfig(q_value_percentile=50.0, p_move_percentile=50.0,
                           start_iteration=0, min_particles=1)
        keep = pf_filter(pos, prev, f, cfg)
        np.testing.assert_array_equal(keep, np.arange(5))

    def test_lenient_thresholds_keep_everyone(self):
        rng = np.random.default_rng(0)
        pos = rng.normal(size=(20, 3))
        prev = rng.normal(size=(20, 3))
        f = rng.uniform(size=20)
        cfg = FilterConfig(q_value_percentile=99.9, p_move_percentile=0.01,
                           start_iteration=0, min_particles=1)
        keep = pf_filter(pos, prev, f, cfg)
        assert keep.size == 20

    def test_min_particles_floor(self):
        # thresholds so aggressive that nearly everything qualifies for
        # removal: the best min_particles values must survive
        f = np.array([10.0, 9.0, 8.0, 7.0, 2.0, 1.0])
        prev = np.zeros((6, 1))
        pos = np.array([[1e-9], [2e-9], [3e-9], [4e-9], [1.0], [1.1]])
        cfg = FilterConfig(q_value_percentile=1.0, p_move_percentile=99.0,
                           start_iteration=0, min_particles=3)
        keep = pf_filter(pos, prev, f, cfg)
        assert keep.size == 3
        np.testing.assert_array_equal(keep, [3, 4, 5])  # three lowest f-values

    def test_best_particle_always_survives(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(2, 30))
            pos = rng.normal(size=(n, 2))
            prev = rng.normal(size=(n, 2))
            f = rng.normal(size=n)
            cfg = FilterConfig(
                q_value_percentile=float(rng.uniform(1, 100)),
                p_move_percentile=float(rng.uniform(0, 99)),
                start_iteration=0,
                min_particles=int(rng.integers(1, n + 1)),
            )
            keep = pf_filter(pos, prev, f, cfg)
            assert int(np.argmin(f)) in keep
            assert keep.size >= min(cfg.min_particles, n)
            assert np.all(np.diff(keep) > 0)  # sorted, unique

    def test_requires_resolved_min_particles(self):
        cfg = FilterConfig()  # min_particles=None is only legal pre-resolution
        with pytest.raises(ConfigError):
            pf_filter(np.ones((3, 1)), np.zeros((3, 1)), np.arange(3.0), cfg)


class TestSbsRun:
    def test_respects_budget(self):
        obj = make_benchmark("ackley", 2)
        for budget in (500, 1000, 5000):
            r = sbs_run(obj, n_particles=10, budget=budget, seed=0)
            assert r.evals_used <= budget

    def test_exact_accounting_small_case(self):
        # d=2, N=10: iteration costs 40, final selection reserves 10.
        # budget 1000 -> 24 iterations (24*40 + 10 <= 1000), 970 evals total.
        obj = make_benchmark("sphere", 2)
        r = sbs_run(obj, n_particles=10, budget=1000, seed=3)
        assert r.iterations_done == 24
        assert r.evals_used == 24 * 40 + 10

    def test_budget_too_small(self):
        obj = make_benchmark("sphere", 2)
        with pytest.raises(BudgetTooSmall):
            sbs_run(obj, n_particles=10, budget=39, seed=0)

    def test_deterministic_rerun(self):
        obj = make_benchmark("himmelblau", 2)
        a = sbs_run(obj, n_particles=20, budget=4000, seed=9)
        b = sbs_run(obj, n_particles=20, budget=4000, seed=9)
        assert a.best_x.tobytes() == b.best_x.tobytes()
        assert a.best_f == b.best_f
        assert a.evals_used == b.evals_used

    def test_seeds_differ(self):
        obj = make_benchmark("himmelblau", 2)
        a = sbs_run(obj, n_particles=20, budget=4000, seed=0)
        b = sbs_run(obj, n_particles=20, budget=4000, seed=1)
        assert a.best_x.tobytes() != b.best_x.tobytes()

    def test_logging_does_not_change_the_run(self):
        # diagnostics and trajectory evaluations are off-budget instrumentation
        obj = make_benchmark("levy", 2)
        plain = sbs_run(obj, n_particles=15, budget=3000, seed=2)
        logged = sbs_run(obj, n_particles=15, budget=3000, seed=2,
                         collect_diagnostics=True, track_ksd=True, log_every=7)
        assert plain.best_x.tobytes() == logged.best_x.tobytes()
        assert plain.evals_used == logged.evals_used
        assert plain.iterations_done == logged.iterations_done

    def test_diagnostics_stream(self):
        obj = make_benchmark("sphere", 2)
        r = sbs_run(obj, n_particles=10, budget=2000, seed=4,
                    collect_diagnostics=True, track_ksd=True)
        assert len(r.diagnostics) == r.iterations_done
        best = [rec.best_so_far for rec in r.diagnostics]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
        assert all(rec.best_so_far <= rec.min_f for rec in r.diagnostics)
        assert all(rec.live == 10 for rec in r.diagnostics)
        assert all(rec.ksd is not None and rec.ksd >= -1e-9 for rec in r.diagnostics)
        # the returned answer is the argmin over the final ensemble; the
        # instrumented stream may have seen better intermediate states
        assert r.best_f == r.diagnostics[-1].min_f
        assert best[-1] <= r.best_f + 1e-12

    def test_constant_objective(self):
        obj = make_objective("flat", [-1.0, -1.0], [1.0, 1.0], lambda x: 2.5)
        r = sbs_run(obj, n_particles=5, budget=200, seed=0)
        assert r.best_f == 2.5

    def test_single_particle_run(self):
        obj = make_benchmark("sphere", 2)
        r = sbs_run(obj, n_particles=1, budget=500, seed=0)
        assert r.best_x.shape == (2,)
        assert obj.domain.contains(r.best_x)

    def test_explicit_init_positions(self):
        obj = make_benchmark("sphere", 2)
        init = np.array([[1.0, 1.0], [-1.0, 2.0], [0.5, -0.5]])
        r = sbs_run(obj, n_particles=99, budget=1000, seed=0, init=init,
                    collect_diagnostics=True)
        # n_particles is taken from the init array, not the argument
        assert r.diagnostics[0].live == 3

    def test_max_iterations_caps_the_run(self):
        obj = make_benchmark("sphere", 2)
        r = sbs_run(obj, n_particles=10, budget=10_000, seed=0, max_iterations=7)
        assert r.iterations_done == 7

    def test_best_x_was_evaluated_to_best_f(self):
        obj = make_benchmark("rastrigin", 2)
        r = sbs_run(obj, n_particles=10, budget=2000, seed=5)
        assert float(obj.evaluator(r.best_x)) == r.best_f


class TestSbsPfRun:
    def test_disabled_filter_is_plain_sbs_bitwise(self):
        obj = make_benchmark("ackley", 2)
        plain = sbs_run(obj, n_particles=20, budget=5000, seed=6)
        nofilter = sbs_pf_run(obj, n_particles=20, budget=5000, seed=6,
                              filter_config=None)
        assert plain.best_x.tobytes() == nofilter.best_x.tobytes()
        assert plain.best_f == nofilter.best_f
        assert plain.evals_used == nofilter.evals_used
        assert plain.iterations_done == nofilter.iterations_done

    def test_no_removal_filter_matches_plain_positions(self):
        # q=100 removes only values strictly above the maximum: nobody.
        # The filtered run spends extra evaluations but the particle motion
        # is untouched, so with a shared iteration cap the answers coincide.
        obj = make_benchmark("himmelblau", 2)
        cfg = FilterConfig(q_value_percentile=100.0, p_move_percentile=50.0,
                           start_iteration=0, min_particles=1)
        plain = sbs_run(obj, n_particles=12, budget=50_000, seed=7,
                        max_iterations=30)
        filtered = sbs_pf_run(obj, n_particles=12, budget=50_000, seed=7,
                              filter_config=cfg, max_iterations=30)
        assert plain.best_x.tobytes() == filtered.best_x.tobytes()
        assert filtered.evals_used > plain.evals_used  # filter evals are real

    def test_filtering_reduces_evaluations(self):
        obj = make_benchmark("ackley", 2)
        plain = sbs_run(obj, n_particles=50, budget=100_000, seed=8,
                        max_iterations=200)
        filtered = sbs_pf_run(obj, n_particles=50, budget=100_000, seed=8,
                              filter_config=FilterConfig(), max_iterations=200)
        assert plain.iterations_done == filtered.iterations_done == 200
        assert filtered.evals_used < plain.evals_used

    def test_live_counts_never_increase_and_respect_floor(self):
        obj = make_benchmark("ackley", 2)
        r = sbs_pf_run(obj, n_particles=40, budget=60_000, seed=9,
                       filter_config=FilterConfig(), collect_diagnostics=True)
        live = [rec.live for rec in r.diagnostics]
        assert all(l2 <= l1 for l1, l2 in zip(live, live[1:]))
        assert live[-1] >= 5  # resolved floor: max(5, 40 // 20)
        assert live[0] == 40

    def test_deterministic_rerun(self):
        obj = make_benchmark("ackley", 2)
        a = sbs_pf_run(obj, n_particles=30, budget=20_000, seed=10,
                       filter_config=FilterConfig())
        b = sbs_pf_run(obj, n_particles=30, budget=20_000, seed=10,
                       filter_config=FilterConfig())
        assert a.best_x.tobytes() == b.best_x.tobytes()
        assert a.evals_used == b.evals_used

    def test_respects_budget(self):
        obj = make_benchmark("rastrigin", 2)
        for budget in (1000, 3000, 9000):
            r = sbs_pf_run(obj, n_particles=25, budget=budget, seed=0,
                           filter_config=FilterConfig())
            assert r.evals_used <= budget

    def test_min_particles_explicit_floor(self):
        obj = make_benchmark("ackley", 2)
        cfg = FilterConfig(min_particles=12)
        r = sbs_pf_run(obj, n_particles=30, budget=40_000, seed=11,
                       filter_config=cfg, collect_diagnostics=True)
        assert all(rec.live >= 12 for rec in r.diagnostics)
