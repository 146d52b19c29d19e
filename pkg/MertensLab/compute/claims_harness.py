"""
Machine-checkable inequalities about M(n), the root series and the census.

Each claim is a BoundSpec plus a quantity. check_bound scans a range of n in
chunks and reduces the per-n margins to a ClaimVerdict. A failing claim is a
result like any other; nothing here raises because a bound does not hold.
"""
from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

import mpmath
import numpy as np

from .arith_core import (
    DEFAULT_MAX_N,
    DEFAULT_SEGMENT_SIZE,
    ClassificationCensus,
    classify_census,
    floor_roots,
    integer_kth_root,
    iter_mertens_blocks,
    mertens_prefix,
    mobius,
    ordered_map,
    segment_bounds,
)
from .exceptions import CapacityError, DomainError
from .series_lab import f1_real_many, floored_parity_sums

logger = logging.getLogger(__name__)

DEFAULT_C_VALUES = (1.1, 1.2, 1.3)


class Quantity(enum.Enum):
    ABS_MERTENS = "ABS_MERTENS"
    CENSUS_GAP_EQ11 = "CENSUS_GAP_EQ11"
    OVERLAP_LEMMA1 = "OVERLAP_LEMMA1"
    FLOORED_EVEN_ODD_EQ10 = "FLOORED_EVEN_ODD_EQ10"
    ROOT_GAP = "ROOT_GAP"


class OverlapInterpretation(enum.Enum):
    MULTISET_EXCESS = "MULTISET_EXCESS"
    PERFECT_POWER_MULTIPLICITY = "PERFECT_POWER_MULTIPLICITY"


class Side(enum.Enum):
    UPPER = "UPPER"
    LOWER = "LOWER"


@dataclass(frozen=True)
class BoundSpec:
    """
    A bound of the shape factor·(a√n + b∛n + d·n^(1/4) + e), where factor is
    c/(c-1) when scale_by_c is set and 1 otherwise.
    """
    claim_id: str
    c: float = 1.3
    coefficients: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    scale_by_c: bool = True
    interpretation: OverlapInterpretation = OverlapInterpretation.MULTISET_EXCESS
    side: Side = Side.UPPER
    strict: bool = True

    def __post_init__(self):
        if not self.c > 1:
            raise DomainError(f"c must be > 1 (got {self.c})")

    @property
    def factor(self) -> float:
        return self.c / (self.c - 1) if self.scale_by_c else 1.0

    def bound(self, n: np.ndarray) -> np.ndarray:
        a, b, d, e = self.coefficients
        n = np.asarray(n, dtype=np.float64)
        return self.factor * (a * np.sqrt(n) + b * np.cbrt(n) + d * np.sqrt(np.sqrt(n)) + e)


@dataclass(frozen=True)
class ClaimVerdict:
    claim_id: str
    n_range: tuple[int, int]
    holds_everywhere: bool
    first_violation: int | None
    worst_margin: float
    argmax_n: int | None
    strict: bool = True


class Epsilon0(NamedTuple):
    printed_form: float
    corrected_form: float


@dataclass(frozen=True)
class MertensExtrema:
    n_max: int
    start: int
    mertens: int
    max_ratio: float
    argmax: int
    min_ratio: float
    argmin: int
    max_abs_ratio: float
    argmax_abs: int
    exceeded: dict[float, bool]


@dataclass(frozen=True)
class Eq12Residual:
    """
    f₁(n) against K + (n - √n + 1) + K″ under two readings of K: all composites
    (n - Π - 1) and squarefree composites (n - Π - 1 - nonsquarefree).
    """
    n: int
    f1: float
    overlap: int
    composites_residual: float
    squarefree_residual: float


@dataclass(frozen=True)
class ClaimEntry:
    claim_id: str
    family: str
    spec: BoundSpec
    quantity: Quantity
    start: int


# =========================
# Overlap counts
# =========================

def overlap_count(n: int, interpretation: OverlapInterpretation) -> int:
    """
    Repeated values among the roots ⌊n^(1/k)⌋.

    MULTISET_EXCESS counts Σ_{k=3}^{⌊√n⌋} (⌊n^(1/k)⌋ - 1). PERFECT_POWER_MULTIPLICITY
    counts pairs (a, k), a, k >= 2, a^k <= n, minus the distinct perfect
    powers <= n, which by Möbius inversion is Σ_k (1 + μ(k))(⌊n^(1/k)⌋ - 1).
    """
    if n < 4:
        raise DomainError(f"overlap counts need n >= 4 (got {n})")
    limit = n.bit_length()
    if interpretation is OverlapInterpretation.MULTISET_EXCESS:
        top = min(math.isqrt(n), limit - 1)
        return sum(integer_kth_root(n, k) - 1 for k in range(3, top + 1))
    return sum((1 + mobius(k)) * (integer_kth_root(n, k) - 1) for k in range(2, limit))


def overlap_counts(n_values: np.ndarray, interpretation: OverlapInterpretation) -> np.ndarray:
    """overlap_count for an array of n."""
    n = np.asarray(n_values, dtype=np.int64)
    counts = np.zeros(n.shape, dtype=np.int64)
    if n.size == 0:
        return counts
    limit = int(n.max()).bit_length()
    if interpretation is OverlapInterpretation.MULTISET_EXCESS:
        sqrt_n = floor_roots(n, 2)
        for k in range(3, limit):
            counts += np.where(sqrt_n >= k, floor_roots(n, k) - 1, 0)
        return counts
    for k in range(2, limit):
        weight = 1 + mobius(k)
        if weight:
            counts += weight * (floor_roots(n, k) - 1)
    return counts


# =========================
# Verdicts
# =========================

def empty_verdict(claim_id: str, n_range: tuple[int, int], strict: bool = True) -> ClaimVerdict:
    return ClaimVerdict(claim_id, n_range, True, None, 0.0, None, strict)


def verdict_from_margins(claim_id: str, numbers: np.ndarray, margins: np.ndarray, strict: bool) -> ClaimVerdict:
    """Reduce per-n margins to a verdict; ties in the worst margin go to the smallest n."""
    n_range = (int(numbers[0]), int(numbers[-1])) if numbers.size else (1, 0)
    if numbers.size == 0:
        return empty_verdict(claim_id, n_range, strict)
    violated = margins <= 0 if strict else margins < 0
    first = int(numbers[int(np.argmax(violated))]) if violated.any() else None
    worst = int(np.argmin(margins))
    return ClaimVerdict(
        claim_id=claim_id,
        n_range=n_range,
        holds_everywhere=first is None,
        first_violation=first,
        worst_margin=float(margins[worst]),
        argmax_n=int(numbers[worst]),
        strict=strict,
    )


def merge_verdicts(verdicts: Sequence[ClaimVerdict]) -> ClaimVerdict:
    """Combine verdicts over adjacent chunks of one claim."""
    if not verdicts:
        raise DomainError("nothing to merge")
    head = verdicts[0]
    n_range = (min(v.n_range[0] for v in verdicts), max(v.n_range[1] for v in verdicts))
    scanned = [v for v in verdicts if v.argmax_n is not None]
    if not scanned:
        return empty_verdict(head.claim_id, n_range, head.strict)
    violations = [v.first_violation for v in scanned if v.first_violation is not None]
    worst = min(scanned, key=lambda v: (v.worst_margin, v.argmax_n))
    return ClaimVerdict(
        claim_id=head.claim_id,
        n_range=n_range,
        holds_everywhere=not violations,
        first_violation=min(violations) if violations else None,
        worst_margin=worst.worst_margin,
        argmax_n=worst.argmax_n,
        strict=head.strict,
    )


def _signed(spec: BoundSpec, quantity: np.ndarray, bound: np.ndarray) -> np.ndarray:
    if spec.side is Side.UPPER:
        return bound - quantity
    return quantity - bound


def chunk_margins(spec: BoundSpec, quantity: Quantity, numbers: np.ndarray) -> np.ndarray:
    """Margins for every quantity except ABS_MERTENS, which needs the ordered M stream."""
    if quantity is Quantity.CENSUS_GAP_EQ11:
        f1 = np.zeros(numbers.shape, dtype=np.float64)
        valid = numbers >= 2
        f1[valid] = f1_real_many(numbers[valid])
        # n - c·f₁(n) < 0
        return spec.c * f1 - numbers
    if quantity is Quantity.OVERLAP_LEMMA1:
        counts = overlap_counts(numbers, spec.interpretation).astype(np.float64)
        return _signed(spec, counts, spec.bound(numbers))
    if quantity is Quantity.FLOORED_EVEN_ODD_EQ10:
        even, odd = floored_parity_sums(numbers)
        return (even - odd).astype(np.float64)
    if quantity is Quantity.ROOT_GAP:
        as_float = numbers.astype(np.float64)
        gap = np.expm1(np.log(as_float) / as_float)
        return np.where(gap >= 0, 2.0 / np.sqrt(as_float) - gap, gap)
    raise DomainError(f"{quantity.value} is scanned from the Mertens stream")


def _chunk_verdict(spec: BoundSpec, quantity: Quantity, bounds: tuple[int, int]) -> ClaimVerdict:
    numbers = np.arange(bounds[0], bounds[1] + 1, dtype=np.int64)
    return verdict_from_margins(spec.claim_id, numbers, chunk_margins(spec, quantity, numbers), spec.strict)


def check_mertens_bounds(
    scans: Sequence[tuple[BoundSpec, int]],
    hi: int,
    **stream_options,
) -> list[ClaimVerdict]:
    """
    ABS_MERTENS verdicts for several (spec, range start) pairs over [start, hi]
    from a single pass of the M stream.
    """
    chunks: list[list[ClaimVerdict]] = [[] for _ in scans]
    for segment, block in iter_mertens_blocks(hi, **stream_options):
        values = np.abs(block).astype(np.float64)
        for i, (spec, lo) in enumerate(scans):
            if segment.hi < lo:
                continue
            first = max(lo, segment.lo)
            numbers = np.arange(first, segment.hi + 1, dtype=np.int64)
            margins = _signed(spec, values[first - segment.lo:], spec.bound(numbers))
            chunks[i].append(verdict_from_margins(spec.claim_id, numbers, margins, spec.strict))
    verdicts = []
    for (spec, lo), pieces in zip(scans, chunks):
        if lo > hi or not pieces:
            verdicts.append(empty_verdict(spec.claim_id, (lo, hi), spec.strict))
        else:
            verdicts.append(replace(merge_verdicts(pieces), n_range=(lo, hi)))
    return verdicts


def check_bound(
    spec: BoundSpec,
    quantity: Quantity,
    n_range: tuple[int, int],
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
    max_n: int = DEFAULT_MAX_N,
) -> ClaimVerdict:
    """Scan n over n_range (inclusive) and report where the claim fails, if anywhere."""
    lo, hi = n_range
    if lo < 1:
        raise DomainError(f"range start must be >= 1 (got {lo})")
    if hi > max_n:
        raise CapacityError(f"range end {hi} exceeds the configured capacity {max_n}")
    if lo > hi:
        return empty_verdict(spec.claim_id, (lo, hi), spec.strict)

    if quantity is Quantity.ABS_MERTENS:
        [verdict] = check_mertens_bounds(
            [(spec, lo)], hi, segment_size=segment_size, workers=workers, max_n=max_n,
        )
    else:
        pieces = segment_bounds(lo, hi, segment_size)
        chunks = list(ordered_map(functools.partial(_chunk_verdict, spec, quantity), pieces, workers))
        verdict = replace(merge_verdicts(chunks), n_range=(lo, hi))
    logger.info(
        "[check_bound] %s [%d, %d] holds=%s worst=%.6g at %s",
        spec.claim_id, lo, hi, verdict.holds_everywhere, verdict.worst_margin, verdict.argmax_n,
    )
    return verdict


# =========================
# Reported quantities
# =========================

def _check_epsilon0_args(n: int, c: float) -> None:
    if n < 2:
        raise DomainError(f"epsilon0 needs n >= 2 (got {n})")
    if not c > 1:
        raise DomainError(f"c must be > 1 (got {c})")


def epsilon0(n: int, c: float) -> Epsilon0:
    """
    The exponent read off the bound (c/(c-1))(0.5√n + 1): as printed,
    ln(bound)/ln n, and the same minus 1/2, the ε in n^(1/2+ε) = bound.
    """
    _check_epsilon0_args(n, c)
    printed_form = math.log(c / (c - 1) * (0.5 * math.sqrt(n) + 1)) / math.log(n)
    return Epsilon0(printed_form=printed_form, corrected_form=printed_form - 0.5)


def reevaluate_epsilon0(n: int, c: float, dps: int = 40) -> Epsilon0:
    """epsilon0 with mpmath at `dps` digits, rounded to floats only at the end."""
    _check_epsilon0_args(n, c)
    with mpmath.workdps(dps):
        C = mpmath.mpf(c)
        bound = C / (C - 1) * (mpmath.sqrt(n) / 2 + 1)
        printed_form = mpmath.log(bound) / mpmath.log(n)
        return Epsilon0(printed_form=float(printed_form), corrected_form=float(printed_form - mpmath.mpf(1) / 2))


def mertens_extrema(
    n_max: int,
    thresholds: Iterable[float] = (),
    *,
    start: int = 2,
    **stream_options,
) -> MertensExtrema:
    """
    Extremes of M(n)/√n over [start, n_max]. A threshold counts as exceeded
    when max |M(n)|/√n is above it. n = 1 is left out by default since
    |M(1)|/√1 = 1 says nothing about growth.
    """
    if n_max < 10:
        raise DomainError(f"mertens_extrema needs n_max >= 10 (got {n_max})")
    trace = mertens_prefix(n_max, start=start, **stream_options)
    return MertensExtrema(
        n_max=n_max,
        start=start,
        mertens=trace.values[-1],
        max_ratio=trace.max_ratio,
        argmax=trace.argmax,
        min_ratio=trace.min_ratio,
        argmin=trace.argmin,
        max_abs_ratio=trace.max_abs_ratio,
        argmax_abs=trace.argmax_abs,
        exceeded={float(t): trace.max_abs_ratio > t for t in sorted(thresholds)},
    )


def eq12_residual(n: int, census: ClassificationCensus | None = None, **stream_options) -> Eq12Residual:
    """Relative residual (approximation - f₁)/f₁ for both readings of K."""
    if n < 4:
        raise DomainError(f"eq12 residual needs n >= 4 (got {n})")
    census = census or classify_census(n, **stream_options)
    f1 = float(f1_real_many([n])[0])
    overlap = overlap_count(n, OverlapInterpretation.MULTISET_EXCESS)
    rest = (n - math.sqrt(n) + 1) + overlap
    composites = n - census.primes - census.ones
    squarefree_composites = composites - census.nonsquarefree
    return Eq12Residual(
        n=n,
        f1=f1,
        overlap=overlap,
        composites_residual=(composites + rest - f1) / f1,
        squarefree_residual=(squarefree_composites + rest - f1) / f1,
    )


# =========================
# Claim registry
# =========================

EQ16 = (0.5, 0.0, 0.0, 1.0)
ADDENDUM = (0.25, 1.0, -1.25, 1.0)
EXAMPLE1 = (1.084, 4.34, -5.42, 4.34)
LIMSUP = (0.5, 0.0, 0.0, 0.0)
ADDENDUM_LIMSUP = (0.25, 0.0, 0.0, 0.0)
OSCILLATION_FLOOR = (1.06, 0.0, 0.0, 0.0)


def _c_label(c: float) -> str:
    return f"{c:g}"


def registered_claims(c_values: Iterable[float] = DEFAULT_C_VALUES) -> list[ClaimEntry]:
    """
    Every claim the audit checks, in report order. Claims that depend on c
    appear once per c with ids like "eq16_c1.3".
    """
    entries = [
        ClaimEntry("eq10", "eq10", BoundSpec("eq10", strict=False), Quantity.FLOORED_EVEN_ODD_EQ10, 16),
    ]
    for interpretation, label in (
        (OverlapInterpretation.MULTISET_EXCESS, "multiset"),
        (OverlapInterpretation.PERFECT_POWER_MULTIPLICITY, "perfect_power"),
    ):
        for side, coefficient in ((Side.UPPER, 1.5), (Side.LOWER, 0.5)):
            claim_id = f"lemma1_{side.value.lower()}_{label}"
            spec = BoundSpec(
                claim_id,
                coefficients=(coefficient, 0.0, 0.0, 0.0),
                scale_by_c=False,
                interpretation=interpretation,
                side=side,
            )
            entries.append(ClaimEntry(claim_id, "lemma1", spec, Quantity.OVERLAP_LEMMA1, 16))
    entries.append(ClaimEntry("root_gap", "root_gap", BoundSpec("root_gap"), Quantity.ROOT_GAP, 2))

    for c in sorted(c_values):
        label = _c_label(c)
        for family, quantity, coefficients, start in (
            ("eq11", Quantity.CENSUS_GAP_EQ11, (0.0, 0.0, 0.0, 0.0), 2),
            ("eq16", Quantity.ABS_MERTENS, EQ16, 1),
            ("limsup", Quantity.ABS_MERTENS, LIMSUP, 1),
            ("addendum", Quantity.ABS_MERTENS, ADDENDUM, 1),
            ("addendum_limsup", Quantity.ABS_MERTENS, ADDENDUM_LIMSUP, 1),
        ):
            claim_id = f"{family}_c{label}"
            entries.append(ClaimEntry(claim_id, family, BoundSpec(claim_id, c=c, coefficients=coefficients), quantity, start))

    # the worked example already folds c = 1.3 into its coefficients
    entries.append(ClaimEntry(
        "example1", "example1",
        BoundSpec("example1", c=1.3, coefficients=EXAMPLE1, scale_by_c=False),
        Quantity.ABS_MERTENS, 1,
    ))
    entries.append(ClaimEntry(
        "oscillation_floor", "oscillation_floor",
        BoundSpec("oscillation_floor", coefficients=OSCILLATION_FLOOR, scale_by_c=False),
        Quantity.ABS_MERTENS, 1,
    ))
    return entries


def find_claims(family: str, c_values: Iterable[float] | None = None) -> list[ClaimEntry]:
    """Registry entries whose family or claim id matches; custom c values are allowed."""
    c_values = tuple(c_values) if c_values else DEFAULT_C_VALUES
    for c in c_values:
        if not c > 1:
            raise DomainError(f"c must be > 1 (got {c})")
    matches = [e for e in registered_claims(c_values) if family in (e.family, e.claim_id)]
    if not matches:
        raise DomainError(f"unknown claim id: {family}")
    return matches


def run_claim(entry: ClaimEntry, n_max: int, *, start: int | None = None, **scan_options) -> ClaimVerdict:
    lo = entry.start if start is None else max(start, 1)
    return check_bound(entry.spec, entry.quantity, (lo, n_max), **scan_options)
