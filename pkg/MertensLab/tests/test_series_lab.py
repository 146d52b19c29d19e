import math

import numpy as np
from django.test import SimpleTestCase

from MertensLab.compute.exceptions import DomainError, ModeError
from MertensLab.compute.series_lab import (
    ClosedForm,
    Probe,
    SeriesFamily,
    SeriesMode,
    SeriesSpec,
    closed_form_sum,
    eval_progression,
    eval_series,
    f1_real_many,
    floored_parity_sums,
    probe_value,
    ratio_probe,
    reevaluate_probe,
    root_gap_check,
)

F = SeriesFamily
REAL = SeriesMode.REAL
FLOORED = SeriesMode.FLOORED


def series(family, mode, n):
    return eval_series(SeriesSpec(family, mode, n))


def progression(family, n):
    return eval_progression(SeriesSpec(family, REAL, n))


class SeriesTests(SimpleTestCase):
    def test_floored_f2_at_hundred(self):
        sample = series(F.F2, FLOORED, 100)
        self.assertEqual(sample.value, 25)
        self.assertEqual(sample.term_count, 9)

    def test_real_f1_at_four(self):
        sample = series(F.F1, REAL, 4)
        self.assertAlmostEqual(sample.value, 2 + 4 ** (1 / 3) + 4 ** 0.25, places=14)
        self.assertAlmostEqual(sample.value, 5.0016, places=4)
        self.assertEqual(sample.term_count, 3)

    def test_empty_index_range(self):
        sample = series(F.F4, REAL, 15)
        self.assertEqual((sample.value, sample.term_count), (0.0, 0))
        self.assertEqual(series(F.F4, FLOORED, 15).value, 0)

    def test_f4_uses_even_indices(self):
        self.assertEqual(series(F.F4, FLOORED, 16).value, 2)
        # k = 4, 6, 8, 10
        self.assertEqual(series(F.F4, FLOORED, 100).value, 3 + 2 + 1 + 1)
        self.assertEqual(series(F.F4, FLOORED, 100).term_count, 4)

    def test_floored_f1_counts_unit_roots(self):
        # k=2..10: 3 2 1 1 1 1 1 1 1
        self.assertEqual(series(F.F1, FLOORED, 10).value, 12)

    def test_floored_is_monotone(self):
        values = [series(F.F2, FLOORED, n).value for n in range(2, 600)]
        self.assertTrue(all(b >= a for a, b in zip(values, values[1:])))

    def test_real_brackets_floored(self):
        for n in range(2, 2000, 7):
            real = series(F.F2, REAL, n)
            floored = series(F.F2, FLOORED, n)
            # exact roots may come out one ulp low in floating point
            self.assertGreaterEqual(real.value, floored.value - 1e-9)
            self.assertGreater(floored.value, real.value - real.term_count - 1e-9)

    def test_split_f1_matches_direct_sum(self):
        for n in (2, 3, 50, 1000, 65537, 10 ** 6):
            direct = series(F.F1, REAL, n).value
            split = f1_real_many([n])[0]
            self.assertLess(abs(split - direct) / direct, 1e-12, n)

    def test_split_f1_vectorised(self):
        ns = np.arange(2, 3000)
        values = f1_real_many(ns)
        for n in (2, 17, 999, 2999):
            self.assertAlmostEqual(values[n - 2] / series(F.F1, REAL, n).value, 1.0, places=12)

    def test_mode_and_domain_errors(self):
        with self.assertRaises(ModeError):
            SeriesSpec(F.PHI1, FLOORED, 10)
        with self.assertRaises(ModeError):
            eval_series(SeriesSpec(F.PHI2, REAL, 10))
        with self.assertRaises(ModeError):
            eval_progression(SeriesSpec(F.F1, REAL, 10))
        with self.assertRaises(DomainError):
            series(F.F1, REAL, 1)
        with self.assertRaises(DomainError):
            progression(F.PHI1, 3)


class ProgressionTests(SimpleTestCase):
    def test_phi1_at_four(self):
        sample = progression(F.PHI1, 4)
        self.assertAlmostEqual(sample.value, 2 * (1 + 2 ** 0.5), places=12)
        self.assertEqual(sample.term_count, 2)

    def test_phi2_at_four(self):
        self.assertAlmostEqual(progression(F.PHI2, 4).value, 6.0, places=12)

    def test_phi4_at_sixteen(self):
        self.assertAlmostEqual(progression(F.PHI4, 16).value, 4 / 3, places=12)

    def test_phi1_at_odd_n_weights_the_last_term(self):
        q = 5 ** 0.2
        sample = progression(F.PHI1, 5)
        self.assertAlmostEqual(sample.value, 2 * (1 + q + q ** 2 * (q ** 0.5 - 1) / (q - 1)), places=12)
        self.assertEqual(sample.term_count, 3)
        self.assertLess(sample.value, 2 * (1 + q + q ** 2))

    def test_direct_sums_match_closed_forms(self):
        for n in (16, 100, 101, 1000, 1001, 10 ** 4, 10 ** 6):
            phi1 = progression(F.PHI1, n).value
            s1 = closed_form_sum(ClosedForm.S1, n)
            self.assertLess(abs(phi1 - s1) / s1, 1e-9, n)
            phi4 = progression(F.PHI4, n).value
            s4 = closed_form_sum(ClosedForm.S4, n)
            self.assertLess(abs(phi4 - s4) / s4, 1e-9, n)

    def test_closed_form_values(self):
        self.assertAlmostEqual(closed_form_sum(ClosedForm.S1, 4), 2 / (2 ** 0.5 - 1), places=10)
        s1 = closed_form_sum(ClosedForm.S1, 100)
        self.assertAlmostEqual(s1, 381.93, delta=0.05)
        self.assertGreater(s1, 100 - 10)
        self.assertAlmostEqual(closed_form_sum(ClosedForm.S4, 10 ** 4), 177.98, delta=0.05)

    def test_closed_form_domain(self):
        with self.assertRaises(DomainError):
            closed_form_sum(ClosedForm.S1, 3)


class RatioProbeTests(SimpleTestCase):
    def test_probe_values(self):
        self.assertAlmostEqual(probe_value(Probe.K4, 10 ** 4), 100 / closed_form_sum(ClosedForm.S4, 10 ** 4), places=14)
        self.assertAlmostEqual(probe_value(Probe.K4, 10 ** 4), 0.5618, places=3)
        self.assertAlmostEqual(probe_value(Probe.K1, 100), 0.2618, places=3)
        self.assertAlmostEqual(probe_value(Probe.K3, 16), 1.5, places=12)

    def test_trace_shape(self):
        trace = ratio_probe(Probe.K2, [100])
        self.assertEqual(trace.grid, (100,))
        self.assertEqual(len(trace.ratios), 1)
        trace = ratio_probe(Probe.K1, [16, 100, 1000, 10 ** 4])
        self.assertTrue(all(math.isfinite(r) and r > 0 for r in trace.ratios))
        # k1 shrinks instead of approaching 1
        self.assertTrue(all(b < a for a, b in zip(trace.ratios, trace.ratios[1:])))

    def test_parallel_trace_is_identical(self):
        grid = [16, 64, 256, 1024, 4096]
        self.assertEqual(ratio_probe(Probe.K3, grid).ratios, ratio_probe(Probe.K3, grid, workers=2).ratios)

    def test_grid_errors(self):
        with self.assertRaises(DomainError):
            ratio_probe(Probe.K1, [])
        with self.assertRaises(DomainError):
            ratio_probe(Probe.K1, [15, 100])
        with self.assertRaises(DomainError):
            ratio_probe(Probe.K1, [100, 16])

    def test_high_precision_agreement(self):
        for probe in Probe:
            for n in (16, 100, 1000, 4096):
                self.assertLess(abs(probe_value(probe, n) - reevaluate_probe(probe, n)), 1e-6, (probe, n))


class RootGapTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(root_gap_check(1), (0.0, 2.0, True))
        gap, bound, holds = root_gap_check(4)
        self.assertAlmostEqual(gap, 2 ** 0.5 - 1, places=14)
        self.assertEqual(bound, 1.0)
        self.assertTrue(holds)
        gap, bound, holds = root_gap_check(100)
        self.assertAlmostEqual(gap, 0.04713, places=5)
        self.assertAlmostEqual(bound, 0.2, places=14)
        self.assertTrue(holds)

    def test_domain(self):
        with self.assertRaises(DomainError):
            root_gap_check(0)


class ParitySumTests(SimpleTestCase):
    def test_examples(self):
        even, odd = floored_parity_sums([16, 100])
        self.assertEqual(even.tolist(), [6, 17])
        self.assertEqual(odd.tolist(), [2, 8])

    def test_parity_sums_split_f2(self):
        ns = np.arange(4, 5000)
        even, odd = floored_parity_sums(ns)
        for i in range(0, len(ns), 97):
            n = int(ns[i])
            self.assertEqual(int(even[i] + odd[i]), series(F.F2, FLOORED, n).value, n)

    def test_even_dominates_odd(self):
        even, odd = floored_parity_sums(np.arange(16, 10 ** 6 + 1))
        self.assertTrue(bool(np.all(even >= odd)))
