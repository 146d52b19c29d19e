import math

from django.test import SimpleTestCase

from MertensLab.compute.exceptions import DomainError
from MertensLab.compute.zeta_partial import (
    ComplexPoint,
    abel_verdict,
    claimed_constant,
    convergence_verdict,
    harmonic_majorant,
    harmonic_number,
    partial_sum_abel,
    partial_sum_direct,
    partial_sum_trace,
    sigma_sweep,
)

HALF = ComplexPoint(0.5)


class PartialSumTests(SimpleTestCase):
    def test_first_term(self):
        trace = partial_sum_direct(HALF, 1)
        self.assertEqual(trace.grid, (1,))
        self.assertEqual(trace.direct_values, (1 + 0j,))
        self.assertEqual(trace.abel_values, (1 + 0j,))
        self.assertEqual(trace.boundary_abs, (1.0,))

    def test_on_the_critical_line(self):
        trace = partial_sum_direct(HALF, 10)
        expected = math.fsum(mu / math.sqrt(n) for n, mu in ((1, 1), (2, -1), (3, -1), (5, -1), (6, 1), (7, -1), (10, 1)))
        self.assertAlmostEqual(trace.direct_values[-1].real, expected, places=14)
        self.assertAlmostEqual(trace.direct_values[-1].real, -0.385159, places=6)
        self.assertEqual(trace.direct_values[-1].imag, 0.0)
        self.assertLess(abs(trace.direct_values[-1] - trace.abel_values[-1]), 1e-12)
        # M(10) = -1
        self.assertAlmostEqual(trace.boundary_abs[-1], 1 / math.sqrt(10), places=14)

    def test_converges_to_inverse_zeta_at_two(self):
        trace = partial_sum_direct(ComplexPoint(2.0), 10 ** 4)
        self.assertLess(abs(trace.direct_values[-1] - 6 / math.pi ** 2), 1e-3)

    def test_checkpoints_match_separate_runs(self):
        s = ComplexPoint(0.75, 3.0)
        trace = partial_sum_abel(s, 5000, [10, 999, 5000], segment_size=512)
        for n, value in zip(trace.grid, trace.abel_values):
            single = partial_sum_trace(s, n)
            self.assertLess(abs(value - single.abel_values[-1]), 1e-12)

    def test_critical_line_sums_stay_small(self):
        trace = partial_sum_direct(HALF, 10 ** 5, [10, 100, 1000, 10 ** 4, 10 ** 5])
        self.assertTrue(all(abs(v) < 3 for v in trace.direct_values))

    def test_conjugate_symmetry(self):
        up = partial_sum_direct(ComplexPoint(0.6, 14.0), 2000)
        down = partial_sum_direct(ComplexPoint(0.6, -14.0), 2000)
        self.assertLess(abs(up.direct_values[-1] - down.direct_values[-1].conjugate()), 1e-12)

    def test_segmenting_does_not_change_sums(self):
        s = ComplexPoint(0.5, 0.25)
        a = partial_sum_trace(s, 30000, [100, 30000], segment_size=30000)
        b = partial_sum_trace(s, 30000, [100, 30000], segment_size=1000, workers=2)
        for x, y in zip(a.direct_values, b.direct_values):
            self.assertLess(abs(x - y), 1e-12)

    def test_domain(self):
        with self.assertRaises(DomainError):
            ComplexPoint(0.0)
        with self.assertRaises(DomainError):
            partial_sum_direct(HALF, 0)
        with self.assertRaises(DomainError):
            partial_sum_direct(HALF, 100, [50, 10])
        with self.assertRaises(DomainError):
            partial_sum_direct(HALF, 100, [200])


class MajorantTests(SimpleTestCase):
    def test_harmonic_numbers(self):
        self.assertAlmostEqual(float(harmonic_number(1)), 1.0, places=14)
        self.assertAlmostEqual(float(harmonic_number(4)), 25 / 12, places=14)

    def test_harmonic_majorant(self):
        [bound] = harmonic_majorant(1.3, [10 ** 4])
        self.assertAlmostEqual(bound, 10.603, places=3)

    def test_claimed_constant(self):
        self.assertAlmostEqual(claimed_constant(0.6, 1.3), 10.8333, places=4)
        with self.assertRaises(DomainError):
            claimed_constant(0.5, 1.3)
        with self.assertRaises(DomainError):
            claimed_constant(0.6, 1.0)


class VerdictTests(SimpleTestCase):
    def test_abel_agreement(self):
        for s, N in ((HALF, 10 ** 6), (ComplexPoint(0.75), 10 ** 5), (ComplexPoint(0.5, 0.25), 10 ** 5)):
            trace = partial_sum_trace(s, N, sorted({10, 1000, 10 ** 5, N}))
            verdict = abel_verdict(trace)
            self.assertTrue(verdict.holds_everywhere, s)
            self.assertEqual(verdict.claim_id, f"theorem3_abel_{s.label}")

    def test_convergence_constant(self):
        trace = partial_sum_trace(ComplexPoint(0.75), 10 ** 4, [100, 10 ** 4], c=1.3)
        self.assertAlmostEqual(trace.claimed_constant, 0.25 * 1.3 / (0.25 * 0.3), places=12)
        self.assertIsNone(trace.harmonic_bound)
        verdict = convergence_verdict(trace)
        self.assertTrue(verdict.holds_everywhere)
        self.assertFalse(verdict.strict)

    def test_convergence_needs_a_constant(self):
        trace = partial_sum_trace(HALF, 100, c=1.3)
        self.assertIsNone(trace.claimed_constant)
        self.assertEqual(len(trace.harmonic_bound), 1)
        with self.assertRaises(DomainError):
            convergence_verdict(trace)
        self.assertTrue(convergence_verdict(trace, constant=10.0).holds_everywhere)


class SweepTests(SimpleTestCase):
    def test_sweep_orders_and_dedupes(self):
        traces = sigma_sweep([0.75, 0.5, 0.75], [10, 100], 1.3)
        self.assertEqual([t.s.sigma for t in traces], [0.5, 0.75])
        self.assertIsNotNone(traces[0].harmonic_bound)
        self.assertIsNotNone(traces[1].claimed_constant)
        self.assertEqual(traces[1].grid, (10, 100))

    def test_empty_sweep(self):
        self.assertEqual(sigma_sweep([], [10], 1.3), [])
        with self.assertRaises(DomainError):
            sigma_sweep([0.5], [], 1.3)
