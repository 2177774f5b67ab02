"""SVGD update direction, force decomposition, and the Adam preconditioner."""

import numpy as np
import pytest

from sbsopt import (
    AdamState,
    BandwidthPolicy,
    BoltzmannTarget,
    DEFAULT_STEP_SIZE,
    EvalCounter,
    ParticleSet,
    RbfKernel,
    ShapeMismatch,
    SvgdConfig,
    adam_step,
    force_decomposition,
    make_benchmark,
    make_objective,
    phi_star,
    score,
    svgd_iterate,
)


def constant_objective(value=5.0):
    return make_objective("const", [-10.0, -10.0], [10.0, 10.0], lambda x: value)


def constant_objective_1d(value=5.0):
    return make_objective("const1", [-10.0], [10.0], lambda x: value)


class TestParticleSet:
    def test_shape_properties(self):
        pts = ParticleSet(np.zeros((7, 3)))
        assert pts.n == 7
        assert pts.d == 3

    def test_single_particle_is_valid(self):
        pts = ParticleSet(np.array([[1.0, 2.0]]))
        assert pts.n == 1

    def test_coerces_1d_to_single_row(self):
        pts = ParticleSet(np.zeros(3))
        assert pts.positions.shape == (1, 3)

    def test_rejects_3d_input(self):
        with pytest.raises(ValueError):
            ParticleSet(np.zeros((2, 2, 2)))


class TestPhiStar:
    def test_two_particle_repulsion_closed_form(self):
        # constant f: scores vanish, phi* is pure repulsion.
        # At x = 0 and x = 1 with sigma = 1: phi* = -/+ exp(-1/2) / 2.
        obj = constant_objective_1d()
        target = BoltzmannTarget(obj, kappa=1.0)
        pts = ParticleSet(np.array([[0.0], [1.0]]))
        phi = phi_star(pts, target, RbfKernel(1.0), EvalCounter())
        expect = np.exp(-0.5) / 2.0
        np.testing.assert_allclose(phi, [[-expect], [expect]], rtol=0, atol=1e-15)

    def test_single_particle_equals_score_bitwise(self):
        # with one particle the kernel terms collapse: phi* == score exactly
        obj = make_benchmark("rastrigin", 2)
        target = BoltzmannTarget(obj, kappa=100.0)
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = rng.uniform(-5, 5, size=(1, 2))
            phi = phi_star(ParticleSet(x), target, RbfKernel(0.5), EvalCounter())
            s = score(target, x[0], EvalCounter())
            assert phi[0].tobytes() == s.tobytes()

    def test_permutation_equivariance(self):
        obj = make_benchmark("himmelblau", 2)
        target = BoltzmannTarget(obj, kappa=10.0)
        rng = np.random.default_rng(1)
        pts = rng.uniform(-4, 4, size=(8, 2))
        perm = rng.permutation(8)
        phi = phi_star(ParticleSet(pts), target, RbfKernel(0.8), EvalCounter())
        phi_perm = phi_star(ParticleSet(pts[perm]), target, RbfKernel(0.8), EvalCounter())
        np.testing.assert_allclose(phi_perm, phi[perm], rtol=1e-12, atol=1e-12)

    def test_matches_direct_summation(self):
        # independent O(N^2 d) loop over the defining sum
        obj = make_benchmark("sphere", 2)
        target = BoltzmannTarget(obj, kappa=3.0)
        rng = np.random.default_rng(2)
        pts = rng.uniform(-3, 3, size=(6, 2))
        sigma = 0.7
        scores = np.stack([score(target, p, EvalCounter()) for p in pts])
        n = pts.shape[0]
        want = np.zeros_like(pts)
        for i in range(n):
            for j in range(n):
                delta = pts[i] - pts[j]
                kij = np.exp(-float(delta @ delta) / (2 * sigma**2))
                want[i] += scores[j] * kij + kij * delta / sigma**2
        want /= n
        got = phi_star(ParticleSet(pts), target, RbfKernel(sigma), EvalCounter())
        np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


class TestForceDecomposition:
    def test_sum_is_exactly_phi_star(self):
        rng = np.random.default_rng(3)
        obj = make_benchmark("ackley", 2)
        target = BoltzmannTarget(obj, kappa=7.0)
        for _ in range(25):
            n = int(rng.integers(1, 10))
            pts = rng.uniform(-5, 5, size=(n, 2))
            sigma = float(rng.uniform(0.1, 2.0))
            particles = ParticleSet(pts)
            att, rep = force_decomposition(particles, target, RbfKernel(sigma), EvalCounter())
            phi = phi_star(particles, target, RbfKernel(sigma), EvalCounter())
            assert (att + rep).tobytes() == phi.tobytes()

    def test_repulsion_antisymmetric_for_pair(self):
        obj = constant_objective()
        target = BoltzmannTarget(obj, kappa=1.0)
        rng = np.random.default_rng(4)
        for _ in range(20):
            pts = rng.uniform(-8, 8, size=(2, 2))
            att, rep = force_decomposition(
                ParticleSet(pts), target, RbfKernel(1.0), EvalCounter()
            )
            np.testing.assert_allclose(rep[0], -rep[1], rtol=0, atol=1e-15)
            np.testing.assert_allclose(att, 0.0, atol=1e-12)

    def test_attraction_points_downhill_for_far_apart_particles(self):
        # single particle on the sphere: attraction = score = -2 kappa x
        obj = make_benchmark("sphere", 2)
        target = BoltzmannTarget(obj, kappa=1.0)
        pts = ParticleSet(np.array([[2.0, 0.0]]))
        att, rep = force_decomposition(pts, target, RbfKernel(1.0), EvalCounter())
        assert att[0, 0] < 0  # pulls toward the origin
        np.testing.assert_allclose(rep, 0.0, atol=1e-15)


class TestAdam:
    def test_first_step_closed_form(self):
        # after one update: m_hat = g, v_hat = g^2, step = lr g / (|g| + eps)
        state = AdamState.fresh(1, 3)
        g = np.array([[2.0, -0.5, 1e-9]])
        got = adam_step(state, g, 0.05)
        want = 0.05 * g / (np.sqrt(g * g) + 1e-8)
        np.testing.assert_array_equal(got, want)

    def test_matches_reference_recurrence(self):
        # independent implementation of the moment recurrences
        rng = np.random.default_rng(5)
        state = AdamState.fresh(4, 2)
        m = np.zeros((4, 2))
        v = np.zeros((4, 2))
        lr, b1, b2, eps = 0.01, 0.9, 0.999, 1e-8
        for t in range(1, 11):
            g = rng.normal(size=(4, 2))
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            m_hat = m / (1 - b1**t)
            v_hat = v / (1 - b2**t)
            want = lr * m_hat / (np.sqrt(v_hat) + eps)
            got = adam_step(state, g, lr)
            np.testing.assert_allclose(got, want, rtol=1e-14, atol=1e-16)

    def test_step_magnitude_bounded_by_lr(self):
        # normalized updates: |step| stays within a small multiple of lr
        state = AdamState.fresh(1, 1)
        rng = np.random.default_rng(6)
        for _ in range(100):
            g = rng.normal(scale=100.0, size=(1, 1))
            step = adam_step(state, g, 0.03)
            assert abs(step[0, 0]) < 0.03 * 3.0

    def test_keep_subsets_moments(self):
        state = AdamState.fresh(5, 2)
        adam_step(state, np.arange(10, dtype=float).reshape(5, 2), 0.1)
        m_before = state.m.copy()
        v_before = state.v.copy()
        t_before = state.t
        state.keep(np.array([0, 3, 4]))
        np.testing.assert_array_equal(state.m, m_before[[0, 3, 4]])
        np.testing.assert_array_equal(state.v, v_before[[0, 3, 4]])
        assert state.t == t_before

    def test_shape_mismatch_raises(self):
        state = AdamState.fresh(3, 2)
        with pytest.raises(ShapeMismatch):
            adam_step(state, np.zeros((2, 2)), 0.1)


class TestSvgdIterate:
    def test_costs_2dn_evaluations(self):
        obj = make_benchmark("sphere", 2)
        target = BoltzmannTarget(obj, kappa=1.0)
        pts = ParticleSet(np.zeros((5, 2)))
        config = SvgdConfig(step_size=0.03, bandwidth_policy=BandwidthPolicy.fixed(1.0))
        counter = EvalCounter()
        svgd_iterate(pts, target, RbfKernel(1.0), config, AdamState.fresh(5, 2), counter)
        assert counter.count == 2 * 2 * 5

    def test_result_stays_in_domain(self):
        obj = make_benchmark("camel", 2)
        target = BoltzmannTarget(obj, kappa=1e3)
        rng = np.random.default_rng(7)
        pts = ParticleSet(rng.uniform(obj.domain.lower, obj.domain.upper, size=(20, 2)))
        config = SvgdConfig(step_size=0.5, bandwidth_policy=BandwidthPolicy.fixed(0.5))
        adam = AdamState.fresh(20, 2)
        for _ in range(10):
            pts = svgd_iterate(pts, target, RbfKernel(0.5), config, adam, EvalCounter())
            for x in pts.positions:
                assert obj.domain.contains(x)

    def test_single_particle_descends_quadratic(self):
        obj = make_benchmark("sphere", 2)
        target = BoltzmannTarget(obj, kappa=1e3)
        pts = ParticleSet(np.array([[3.0, -4.0]]))
        config = SvgdConfig(
            step_size=DEFAULT_STEP_SIZE, bandwidth_policy=BandwidthPolicy.fixed(1.0)
        )
        adam = AdamState.fresh(1, 2)
        for _ in range(600):
            pts = svgd_iterate(pts, target, RbfKernel(1.0), config, adam, EvalCounter())
        assert float(pts.positions[0] @ pts.positions[0]) < 1e-4

    def test_default_step_size_value(self):
        assert DEFAULT_STEP_SIZE == 0.03
