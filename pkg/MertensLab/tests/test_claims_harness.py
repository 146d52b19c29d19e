import math

import numpy as np
from django.test import SimpleTestCase

from MertensLab.compute.arith_core import classify_census, mertens_oracle, mobius
from MertensLab.compute.claims_harness import (
    EQ16,
    EXAMPLE1,
    BoundSpec,
    ClaimVerdict,
    OverlapInterpretation,
    Quantity,
    Side,
    check_bound,
    check_mertens_bounds,
    empty_verdict,
    epsilon0,
    eq12_residual,
    find_claims,
    merge_verdicts,
    mertens_extrema,
    overlap_count,
    overlap_counts,
    reevaluate_epsilon0,
    registered_claims,
    run_claim,
)
from MertensLab.compute.exceptions import CapacityError, DomainError

MULTISET = OverlapInterpretation.MULTISET_EXCESS
PERFECT_POWER = OverlapInterpretation.PERFECT_POWER_MULTIPLICITY


def entry(claim_id, c_values=None):
    [found] = [e for e in find_claims(claim_id, c_values) if e.claim_id == claim_id]
    return found


class OverlapTests(SimpleTestCase):
    def test_counts_at_hundred(self):
        # roots 4, 3, 2, 2 for k = 3..6
        self.assertEqual(overlap_count(100, MULTISET), 3 + 2 + 1 + 1)
        # 16, 81 (fourth powers) and 64 (sixth power) counted with weight 1 + μ(k)
        self.assertEqual(overlap_count(100, PERFECT_POWER), 4)

    def test_smallest_n(self):
        self.assertEqual(overlap_count(4, MULTISET), 0)
        self.assertEqual(overlap_count(4, PERFECT_POWER), 0)
        with self.assertRaises(DomainError):
            overlap_count(3, MULTISET)

    def test_perfect_power_reading_counts_repeats(self):
        for n in (16, 100, 1000, 5000):
            pairs = sum(1 for k in range(2, n.bit_length()) for a in range(2, n + 1) if a ** k <= n)
            distinct = len({a ** k for k in range(2, n.bit_length()) for a in range(2, n + 1) if a ** k <= n})
            self.assertEqual(overlap_count(n, PERFECT_POWER), pairs - distinct, n)

    def test_vectorised_matches_scalar(self):
        ns = np.arange(4, 20000)
        for interpretation in OverlapInterpretation:
            counts = overlap_counts(ns, interpretation)
            for i in range(0, len(ns), 331):
                self.assertEqual(int(counts[i]), overlap_count(int(ns[i]), interpretation))
            self.assertTrue(bool(np.all(np.diff(counts) >= 0)))


class VerdictTests(SimpleTestCase):
    def test_merge_keeps_earliest_violation_and_worst_margin(self):
        a = ClaimVerdict("x", (1, 10), False, 7, -0.5, 8)
        b = ClaimVerdict("x", (11, 20), False, 12, -2.0, 15)
        c = ClaimVerdict("x", (21, 30), True, None, 1.0, 21)
        merged = merge_verdicts([a, b, c])
        self.assertEqual(merged.n_range, (1, 30))
        self.assertFalse(merged.holds_everywhere)
        self.assertEqual(merged.first_violation, 7)
        self.assertEqual((merged.worst_margin, merged.argmax_n), (-2.0, 15))

    def test_merge_ties_go_to_smallest_n(self):
        a = ClaimVerdict("x", (1, 10), True, None, 0.25, 9)
        b = ClaimVerdict("x", (11, 20), True, None, 0.25, 11)
        merged = merge_verdicts([b, a])
        self.assertTrue(merged.holds_everywhere)
        self.assertEqual(merged.argmax_n, 9)

    def test_merge_of_empty_chunks(self):
        merged = merge_verdicts([empty_verdict("x", (5, 4))])
        self.assertTrue(merged.holds_everywhere)
        self.assertIsNone(merged.argmax_n)
        with self.assertRaises(DomainError):
            merge_verdicts([])

    def test_c_must_exceed_one(self):
        with self.assertRaises(DomainError):
            BoundSpec("x", c=1.0)


class CheckBoundTests(SimpleTestCase):
    def test_empty_range(self):
        verdict = check_bound(BoundSpec("eq16", coefficients=EQ16), Quantity.ABS_MERTENS, (10, 9))
        self.assertTrue(verdict.holds_everywhere)
        self.assertIsNone(verdict.first_violation)
        self.assertIsNone(verdict.argmax_n)

    def test_capacity(self):
        with self.assertRaises(CapacityError):
            check_bound(BoundSpec("eq16", coefficients=EQ16), Quantity.ABS_MERTENS, (1, 100), max_n=50)
        with self.assertRaises(DomainError):
            check_bound(BoundSpec("eq16", coefficients=EQ16), Quantity.ABS_MERTENS, (0, 100))

    def test_eq16_at_a_million(self):
        spec = BoundSpec("eq16_c1.3", c=1.3, coefficients=EQ16)
        verdict = check_bound(spec, Quantity.ABS_MERTENS, (10 ** 6, 10 ** 6))
        # (13/3)·501 - |M(10^6)|
        self.assertAlmostEqual(verdict.worst_margin, 2171 - 212, places=6)
        self.assertTrue(verdict.holds_everywhere)

    def test_eq16_holds_from_one(self):
        verdict = run_claim(entry("eq16_c1.3", [1.3]), 10 ** 5, segment_size=1 << 16)
        self.assertEqual(verdict.n_range, (1, 10 ** 5))
        self.assertTrue(verdict.holds_everywhere)
        census = classify_census(verdict.argmax_n)
        self.assertAlmostEqual(
            verdict.worst_margin,
            13 / 3 * (0.5 * math.sqrt(verdict.argmax_n) + 1) - abs(census.mertens),
            places=9,
        )

    def test_example1_margin(self):
        spec = BoundSpec("example1", coefficients=EXAMPLE1, scale_by_c=False)
        verdict = check_bound(spec, Quantity.ABS_MERTENS, (10 ** 6, 10 ** 6))
        self.assertAlmostEqual(verdict.worst_margin, 1138.945, delta=0.01)

    def test_mertens_bounds_hold_to_a_million(self):
        entries = [entry("example1")] + find_claims("eq16")
        verdicts = check_mertens_bounds([(e.spec, e.start) for e in entries], 10 ** 6, segment_size=1 << 18)
        self.assertEqual([v.claim_id for v in verdicts], ["example1", "eq16_c1.1", "eq16_c1.2", "eq16_c1.3"])
        self.assertTrue(all(v.holds_everywhere for v in verdicts))

    def test_custom_bound_matches_brute_force(self):
        spec = BoundSpec("half_root", coefficients=(0.5, 0.0, 0.0, 0.0), scale_by_c=False)
        n_max = 2000
        margins = [0.5 * math.sqrt(n) - abs(mertens_oracle(n)) for n in range(2, n_max + 1)]
        worst = min(range(len(margins)), key=lambda i: (margins[i], i))
        for segment_size in (n_max, 97):
            verdict = check_bound(spec, Quantity.ABS_MERTENS, (2, n_max), segment_size=segment_size)
            self.assertFalse(verdict.holds_everywhere)
            self.assertEqual(verdict.first_violation, 3)
            self.assertEqual(verdict.argmax_n, worst + 2)
            self.assertAlmostEqual(verdict.worst_margin, margins[worst], places=12)

    def test_batched_scan_matches_single_scans(self):
        specs = [(BoundSpec("a", coefficients=EQ16), 1), (BoundSpec("b", coefficients=(0.5, 0, 0, 0), scale_by_c=False), 50)]
        batched = check_mertens_bounds(specs, 5000, segment_size=700)
        for (spec, lo), verdict in zip(specs, batched):
            self.assertEqual(verdict, check_bound(spec, Quantity.ABS_MERTENS, (lo, 5000)))

    def test_eq11_fails_only_at_two(self):
        verdict = run_claim(entry("eq11_c1.3", [1.3]), 100)
        self.assertFalse(verdict.holds_everywhere)
        self.assertEqual(verdict.first_violation, 2)
        self.assertEqual(verdict.argmax_n, 2)
        self.assertAlmostEqual(verdict.worst_margin, 1.3 * math.sqrt(2) - 2, places=12)
        self.assertTrue(run_claim(entry("eq11_c1.3", [1.3]), 10 ** 4, start=3).holds_everywhere)

    def test_lemma1(self):
        for interpretation in ("multiset", "perfect_power"):
            upper = run_claim(entry(f"lemma1_upper_{interpretation}"), 10 ** 6)
            self.assertEqual(upper.n_range, (16, 10 ** 6))
            self.assertTrue(upper.holds_everywhere, interpretation)
            self.assertEqual(upper.argmax_n, 16)
        # two repeated roots at 16 against 0.5·√16 = 2
        lower = run_claim(entry("lemma1_lower_multiset"), 10 ** 4)
        self.assertEqual(lower.first_violation, 16)

    def test_eq10_and_root_gap_hold(self):
        eq10 = run_claim(entry("eq10"), 10 ** 6, segment_size=1 << 16)
        self.assertEqual(eq10.n_range, (16, 10 ** 6))
        self.assertTrue(eq10.holds_everywhere)
        self.assertFalse(eq10.strict)
        self.assertEqual((eq10.worst_margin, eq10.argmax_n), (2.0, 32))
        self.assertTrue(run_claim(entry("root_gap"), 50000).holds_everywhere)

    def test_chunked_scan_ignores_workers(self):
        e = entry("lemma1_upper_perfect_power")
        serial = run_claim(e, 30000, segment_size=4000)
        for workers in (2, 4, 8):
            self.assertEqual(run_claim(e, 30000, segment_size=4000, workers=workers), serial, workers)

    def test_range_below_claim_start(self):
        verdict = run_claim(entry("eq10"), 10)
        self.assertEqual(verdict.n_range, (16, 10))
        self.assertTrue(verdict.holds_everywhere)


class ReportedQuantityTests(SimpleTestCase):
    def test_mertens_extrema(self):
        extrema = mertens_extrema(100, [2.167, 1.06])
        self.assertEqual(extrema.argmax_abs, 5)
        self.assertAlmostEqual(extrema.max_abs_ratio, 0.894, places=3)
        self.assertEqual(extrema.exceeded, {1.06: False, 2.167: False})
        self.assertEqual(extrema.mertens, 1)
        with self.assertRaises(DomainError):
            mertens_extrema(9)

    def test_epsilon0(self):
        value = epsilon0(10 ** 6, 1.3)
        self.assertAlmostEqual(value.printed_form, 0.55611, places=4)
        self.assertAlmostEqual(value.corrected_form, value.printed_form - 0.5, places=15)
        with self.assertRaises(DomainError):
            epsilon0(10, 1.0)

    def test_epsilon0_matches_high_precision(self):
        for n in (10 ** 2, 10 ** 4, 10 ** 6):
            for c in (1.1, 1.2, 1.3):
                value, reference = epsilon0(n, c), reevaluate_epsilon0(n, c)
                self.assertLess(abs(value.printed_form - reference.printed_form), 1e-6, (n, c))
                self.assertLess(abs(value.corrected_form - reference.corrected_form), 1e-6, (n, c))
        with self.assertRaises(DomainError):
            reevaluate_epsilon0(1, 1.3)

    def test_eq12_residual_readings(self):
        census = classify_census(10 ** 4)
        residual = eq12_residual(10 ** 4, census)
        self.assertAlmostEqual(
            residual.composites_residual - residual.squarefree_residual,
            census.nonsquarefree / residual.f1,
            places=12,
        )
        self.assertEqual(residual.overlap, overlap_count(10 ** 4, MULTISET))


class RegistryTests(SimpleTestCase):
    def test_registry(self):
        entries = registered_claims()
        ids = [e.claim_id for e in entries]
        self.assertEqual(len(ids), 23)
        self.assertEqual(len(set(ids)), 23)
        self.assertEqual(ids[0], "eq10")
        self.assertIn("addendum_limsup_c1.1", ids)

    def test_find_claims(self):
        self.assertEqual([e.claim_id for e in find_claims("eq16", [1.3])], ["eq16_c1.3"])
        self.assertEqual(len(find_claims("lemma1")), 4)
        self.assertEqual([e.spec.c for e in find_claims("limsup", [1.5])], [1.5])
        with self.assertRaises(DomainError):
            find_claims("eq99")
        with self.assertRaises(DomainError):
            find_claims("eq16", [0.9])

    def test_lemma1_sides(self):
        sides = {e.claim_id: e.spec.side for e in find_claims("lemma1")}
        self.assertEqual(sides["lemma1_lower_multiset"], Side.LOWER)
        self.assertEqual(sides["lemma1_upper_perfect_power"], Side.UPPER)

    def test_mobius_weights_are_consistent(self):
        # sanity for the inversion used by the perfect-power reading
        self.assertEqual([1 + mobius(k) for k in range(2, 7)], [0, 0, 1, 0, 2])
