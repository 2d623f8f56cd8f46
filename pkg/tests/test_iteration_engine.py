import unittest

import numpy as np

from core.matrix_analysis import PermutationMatrix, apply_permutation, apply_permutation_vec
from infrastructure.error_handling import DimensionMismatchError, OrderPreconditionError
from solver.iteration_engine import (
    Monotonicity,
    Problem,
    TraceRecorder,
    TraceStatus,
    apply_T,
    fit_sequence,
    in_s_minus,
    in_s_plus,
    iterate,
    jacobian_T,
    order_preservation_check,
    residual,
)

CASE_I = Problem.from_arrays([24.0, 24.0], [[20.0, 18.0], [20.0, 45.0]])
CASE_II = Problem.from_arrays([24.0, 24.0], [[120.0, 40.0], [120.0, 100.0]])

CASE_I_DOMINANT = np.array([22.2416, 20.9531])
CASE_I_Y_MAX = np.array([(24 + np.sqrt(496)) / 2, (24 + np.sqrt(396)) / 2])
CASE_II_Y_MAX = np.array([(24 + np.sqrt(96)) / 2, (24 + np.sqrt(176)) / 2])


class TestProblem(unittest.TestCase):

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            Problem.from_arrays([1.0, 2.0, 3.0], [[1.0, 0.0], [0.0, 1.0]])

    def test_negative_matrix_rejected(self):
        with self.assertRaises(ValueError):
            Problem.from_arrays([1.0, 2.0], [[1.0, -1.0], [0.0, 1.0]])


class TestApplyT(unittest.TestCase):

    def test_zero_matrix_returns_k(self):
        p = Problem.from_arrays([3.0, -1.0, 2.0], np.zeros((3, 3)))
        self.assertEqual(apply_T(p, [0.1, 5.0, 7.0]).to_list(), [3.0, -1.0, 2.0])

    def test_case_one_dominant_point_is_fixed(self):
        np.testing.assert_allclose(apply_T(CASE_I, CASE_I_DOMINANT).entries, CASE_I_DOMINANT, atol=0.01)

    def test_case_two_third_iterate(self):
        y = CASE_II_Y_MAX
        for _ in range(3):
            y = apply_T(CASE_II, y).entries
        np.testing.assert_allclose(y, [8.76, 0.42], atol=0.01)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            apply_T(CASE_I, [1.0, 2.0, 3.0])

    def test_jacobian(self):
        y = np.array([2.0, 4.0])
        np.testing.assert_array_equal(
            jacobian_T(CASE_I, y).entries, [[5.0, 18.0 / 16.0], [5.0, 45.0 / 16.0]]
        )

    def test_s_plus_and_s_minus(self):
        self.assertTrue(in_s_minus(CASE_I, [24.0, 24.0]))
        self.assertTrue(in_s_minus(CASE_I, CASE_I_Y_MAX))
        self.assertFalse(in_s_plus(CASE_I, CASE_I_Y_MAX))


class TestResidual(unittest.TestCase):

    def test_fixed_point_residual_is_small(self):
        self.assertLess(residual(CASE_I, CASE_I_DOMINANT), 0.02)

    def test_y_max_is_not_fixed(self):
        self.assertGreater(residual(CASE_I, CASE_I_Y_MAX), 0.1)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            residual(CASE_I, [1.0])


class TestIterate(unittest.TestCase):

    def test_case_one_from_y_max(self):
        trace = iterate(CASE_I, CASE_I_Y_MAX, tol=1e-10, budget=10000)
        self.assertEqual(trace.status, TraceStatus.CONVERGED)
        np.testing.assert_allclose(trace.limit.entries, CASE_I_DOMINANT, atol=0.01)
        self.assertEqual(trace.monotonicity, Monotonicity.STRONGLY_ANTITONE)

    def test_case_two_exits_domain(self):
        trace = iterate(CASE_II, CASE_II_Y_MAX, tol=1e-10, budget=10000)
        self.assertEqual(trace.status, TraceStatus.DOMAIN_EXIT)
        self.assertEqual(trace.exit_step, 4)
        np.testing.assert_allclose(trace.iterates[3].entries, [8.76, 0.42], atol=0.01)
        self.assertFalse(trace.last.is_positive())
        self.assertEqual(trace.steps[-1], trace.exit_step)

    def test_fixed_point_start_converges_immediately(self):
        first = iterate(CASE_I, CASE_I_Y_MAX)
        trace = iterate(CASE_I, first.limit)
        self.assertEqual(trace.status, TraceStatus.CONVERGED)
        self.assertEqual(trace.iterations, 1)
        np.testing.assert_allclose(trace.limit.entries, first.limit.entries, atol=1e-9)

    def test_budget_exhausted(self):
        trace = iterate(CASE_I, CASE_I_Y_MAX, tol=1e-10, budget=2)
        self.assertEqual(trace.status, TraceStatus.BUDGET_EXHAUSTED)
        self.assertEqual(trace.iterations, 2)
        self.assertIsNone(trace.limit)

    def test_overflow_is_reported_as_domain_exit(self):
        p = Problem.from_arrays([1.0, 1.0], [[0.0, 1.0], [1.0, 0.0]])
        trace = iterate(p, [1.0, 1e-310])
        self.assertEqual(trace.status, TraceStatus.DOMAIN_EXIT)
        self.assertEqual(trace.exit_step, 1)
        self.assertTrue(np.all(np.isfinite(trace.last.entries)))

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            iterate(CASE_I, CASE_I_Y_MAX, tol=0.0)
        with self.assertRaises(ValueError):
            iterate(CASE_I, CASE_I_Y_MAX, budget=0)

    def test_recorded_pairs_recompute_exactly(self):
        trace = iterate(CASE_I, [30.0, 3.0])
        for y, y_next in trace.consecutive_pairs():
            self.assertEqual(apply_T(CASE_I, y), y_next)

    def test_fit_sequence_stops_after_exit(self):
        steps = [r for r, _ in fit_sequence(CASE_II, CASE_II_Y_MAX)]
        self.assertEqual(steps, [0, 1, 2, 3, 4])


class TestTraceRecorder(unittest.TestCase):

    def test_thinning_keeps_stride_and_tail(self):
        recorder = TraceRecorder(cap=5, stride=10)
        for step in range(38):
            recorder.record(step, np.array([float(step)]), 0.0)
        kept = [step for step, _, _ in recorder.entries()]
        self.assertEqual(kept, [0, 1, 2, 3, 4, 10, 20, 30, 36, 37])


class TestOrderPreservation(unittest.TestCase):

    def test_equal_starts(self):
        self.assertTrue(order_preservation_check(CASE_I, [20.0, 18.0], [20.0, 18.0], 10))

    def test_case_one(self):
        self.assertTrue(order_preservation_check(CASE_I, [20.0, 18.0], [23.13, 21.94], 50))

    def test_precondition(self):
        with self.assertRaises(OrderPreconditionError):
            order_preservation_check(CASE_I, [23.0, 18.0], [20.0, 21.0], 10)

    def test_random_comparable_starts(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            p = Problem.from_arrays(rng.uniform(1, 10, n), rng.uniform(0, 3, (n, n)))
            y0 = rng.uniform(0.1, 10, n)
            z0 = y0 + rng.uniform(0, 5, n)
            self.assertTrue(order_preservation_check(p, y0, z0, 30))


class TestPermutationEquivariance(unittest.TestCase):

    def test_apply_T_commutes_with_permutation(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            k = rng.uniform(1, 10, n)
            M = rng.uniform(0, 3, (n, n))
            y = rng.uniform(0.5, 5, n)
            P = PermutationMatrix(tuple(rng.permutation(n).tolist()))

            p = Problem.from_arrays(k, M)
            permuted = Problem(apply_permutation_vec(P, k), apply_permutation(P, M))
            np.testing.assert_allclose(
                apply_T(permuted, apply_permutation_vec(P, y)).entries,
                apply_permutation_vec(P, apply_T(p, y)).entries,
                rtol=1e-13,
                atol=1e-13,
            )


if __name__ == "__main__":
    unittest.main()
