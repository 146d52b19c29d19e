"""
Exact integer arithmetic: Möbius values by trial division and by a segmented
sieve, Mertens prefix sums, the five-class census of [1, n] and integer k-th
roots. Every other compute module builds on the segment stream defined here.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exceptions import (
    ArithmeticOverflowError,
    CapacityError,
    DomainError,
    InvariantViolation,
    SegmentSizeError,
)

logger = logging.getLogger(__name__)

U64_MAX = (1 << 64) - 1
DEFAULT_SEGMENT_SIZE = 1 << 20
DEFAULT_MAX_SEGMENT_SIZE = 1 << 24
DEFAULT_MAX_N = 10 ** 10


# =========================
# Domain types
# =========================

@dataclass(frozen=True, eq=False)
class MobiusSegment:
    """
    μ(n) for every n in [lo, hi], indexed by n - lo.

    `prime_factor_counts` holds the number of distinct prime factors for the
    squarefree entries (0 where μ(n) = 0); the census classifies with it.
    """
    lo: int
    hi: int
    values: np.ndarray
    prime_factor_counts: np.ndarray | None = None

    def __len__(self):
        return self.hi - self.lo + 1

    def numbers(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def mu(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise DomainError(f"{n} outside segment [{self.lo}, {self.hi}]")
        return int(self.values[n - self.lo])


@dataclass(frozen=True)
class ClassificationCensus:
    """
    Exact class counts of [1, n]: the unit, primes, non-squarefree numbers,
    squarefree numbers with an even (≥ 2) and an odd (≥ 3) number of prime
    factors, and M(n).
    """
    n: int
    ones: int
    primes: int
    nonsquarefree: int
    squarefree_even: int
    squarefree_odd: int
    mertens: int

    def __post_init__(self):
        total = self.ones + self.primes + self.nonsquarefree + self.squarefree_even + self.squarefree_odd
        if total != self.n:
            raise InvariantViolation(f"census classes sum to {total}, expected n={self.n}")
        identity = self.ones + self.squarefree_even - self.primes - self.squarefree_odd
        if identity != self.mertens:
            raise InvariantViolation(
                f"M({self.n})={self.mertens} but 1 + T' - (Π + T'') = {identity}"
            )


@dataclass(frozen=True)
class MertensTrace:
    grid: tuple[int, ...]
    values: tuple[int, ...]
    max_abs_ratio: float
    argmax_abs: int
    max_ratio: float = 0.0
    argmax: int = 1
    min_ratio: float = 0.0
    argmin: int = 1
    n: int = 1
    start: int = 1


# =========================
# Guards
# =========================

def _require_u64(value: int, name: str = "n") -> int:
    if value > U64_MAX:
        raise ArithmeticOverflowError(f"{name}={value} exceeds the unsigned 64-bit range")
    return value


def _require_positive(value: int, name: str = "n") -> int:
    if value < 1:
        raise DomainError(f"{name} must be >= 1 (got {value})")
    return _require_u64(value, name)


# =========================
# Trial-division oracle
# =========================

def mobius(n: int) -> int:
    """
    μ(n) by trial division up to √n. Independent of the sieve and used to
    check it.
    """
    _require_positive(n)
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1 if p == 2 else 2
    if n > 1:
        result = -result
    return result


# =========================
# Integer roots
# =========================

def _power_exceeds(base: int, k: int, limit: int) -> bool:
    """True when base**k > limit; stops multiplying as soon as it is."""
    acc = 1
    for _ in range(k):
        acc *= base
        if acc > limit:
            return True
    return False


def integer_kth_root(n: int, k: int) -> int:
    """
    The unique r with r**k <= n < (r+1)**k. A floating seed is corrected with
    guarded integer power checks, so the result is exact for every 64-bit n.
    """
    if k < 1:
        raise DomainError(f"root index k must be >= 1 (got {k})")
    _require_positive(n)
    if k == 1:
        return n
    if k >= n.bit_length():
        # 2**k > n
        return 1
    r = max(1, int(round(n ** (1.0 / k))))
    while _power_exceeds(r, k, n):
        r -= 1
    while not _power_exceeds(r + 1, k, n):
        r += 1
    return r


@lru_cache(maxsize=256)
def _power_table(k: int, limit: int) -> np.ndarray:
    top = integer_kth_root(limit, k) + 1
    bases = np.arange(1, top + 1, dtype=np.int64)
    if top ** k > np.iinfo(np.int64).max:
        return np.array([b ** k for b in range(1, top + 1)], dtype=object)
    return bases ** k


def floor_roots(n_values: np.ndarray, k: int) -> np.ndarray:
    """
    Exact ⌊n^(1/k)⌋ for an array of positive integers: the number of bases
    a >= 1 with a**k <= n, found by binary search in a table of k-th powers.
    """
    if k < 1:
        raise DomainError(f"root index k must be >= 1 (got {k})")
    n_values = np.asarray(n_values, dtype=np.int64)
    if n_values.size == 0:
        return np.zeros(0, dtype=np.int64)
    if k == 1:
        return n_values.copy()
    table = _power_table(k, int(n_values.max()))
    return np.searchsorted(table, n_values, side="right").astype(np.int64)


# =========================
# Segmented sieve
# =========================

@lru_cache(maxsize=8)
def base_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain sieve of Eratosthenes."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_block(lo: int, hi: int, primes: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """
    μ and the distinct prime factor count for [lo, hi].

    Each prime p <= √hi flips the sign of its multiples and multiplies their
    running radical by p; multiples of p² are zeroed. An entry whose radical
    falls short of n has exactly one prime factor above √hi left.
    """
    size = hi - lo + 1
    mu = np.ones(size, dtype=np.int8)
    omega = np.zeros(size, dtype=np.int8)
    radical = np.ones(size, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        start = (-lo) % p
        if start >= size:
            continue
        view = mu[start::p]
        np.negative(view, out=view)
        radical[start::p] *= p
        omega[start::p] += 1
        square = p * p
        start = (-lo) % square
        if start < size:
            mu[start::square] = 0
    numbers = np.arange(lo, hi + 1, dtype=np.int64)
    leftover = (radical != numbers) & (mu != 0)
    mu[leftover] = -mu[leftover]
    omega[leftover] += 1
    omega[mu == 0] = 0
    return mu, omega


def _sieve_task(bounds: tuple[int, int]) -> tuple[int, int, np.ndarray, np.ndarray]:
    lo, hi = bounds
    primes = base_primes(math.isqrt(hi))
    mu, omega = _sieve_block(lo, hi, primes)
    return lo, hi, mu, omega


def _check_segment_bounds(lo: int, hi: int) -> None:
    if lo < 1:
        raise DomainError(f"segment start must be >= 1 (got {lo})")
    if hi < lo:
        raise DomainError(f"segment end {hi} precedes start {lo}")
    _require_u64(hi, "hi")


def sieve_mobius_range(
    lo: int,
    hi: int,
    *,
    max_segment_size: int = DEFAULT_MAX_SEGMENT_SIZE,
) -> MobiusSegment:
    """μ(n) for every n in [lo, hi] in one segment."""
    _check_segment_bounds(lo, hi)
    if hi - lo + 1 > max_segment_size:
        raise SegmentSizeError(
            f"segment [{lo}, {hi}] holds {hi - lo + 1} integers, cap is {max_segment_size}"
        )
    _, _, mu, omega = _sieve_task((lo, hi))
    return MobiusSegment(lo=lo, hi=hi, values=mu, prime_factor_counts=omega)


def segment_bounds(lo: int, hi: int, segment_size: int) -> list[tuple[int, int]]:
    """Consecutive [a, b] pieces of [lo, hi], each at most segment_size long."""
    if segment_size < 1:
        raise DomainError(f"segment size must be >= 1 (got {segment_size})")
    bounds = []
    start = lo
    while start <= hi:
        end = min(start + segment_size - 1, hi)
        bounds.append((start, end))
        start = end + 1
    return bounds


def ordered_map(func, items: Iterable, workers: int = 1) -> Iterator:
    """
    map() that fans out to a process pool when workers > 1. Results come back
    in input order either way, which keeps every reduction deterministic.
    """
    if workers < 1:
        raise DomainError(f"worker count must be >= 1 (got {workers})")
    items = list(items)
    if workers == 1 or len(items) < 2:
        yield from map(func, items)
        return
    with ProcessPoolExecutor(max_workers=workers) as executor:
        try:
            yield from executor.map(func, items)
        except BaseException:
            # drop queued items when the consumer stops early
            executor.shutdown(cancel_futures=True)
            raise


def iter_mobius_segments(
    lo: int,
    hi: int,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
    max_n: int = DEFAULT_MAX_N,
    max_segment_size: int = DEFAULT_MAX_SEGMENT_SIZE,
) -> Iterator[MobiusSegment]:
    """
    Stream μ over [lo, hi] in ascending segments. Segments are sieved by up to
    `workers` processes and always yielded in order.
    """
    _check_segment_bounds(lo, hi)
    if hi > max_n:
        raise CapacityError(f"n={hi} exceeds the configured sieve capacity {max_n}")
    if segment_size > max_segment_size:
        raise SegmentSizeError(f"segment size {segment_size} exceeds the cap {max_segment_size}")
    bounds = segment_bounds(lo, hi, segment_size)
    logger.debug("[iter_mobius_segments] [%d, %d] segments=%d workers=%d", lo, hi, len(bounds), workers)
    for seg_lo, seg_hi, mu, omega in ordered_map(_sieve_task, bounds, workers):
        yield MobiusSegment(lo=seg_lo, hi=seg_hi, values=mu, prime_factor_counts=omega)


# =========================
# Mertens function
# =========================

@dataclass
class _MertensState:
    total: int = 0
    max_abs_ratio: float = -1.0
    argmax_abs: int = 1
    max_ratio: float = -math.inf
    argmax: int = 1
    min_ratio: float = math.inf
    argmin: int = 1
    recorded: dict = field(default_factory=dict)


def iter_mertens_blocks(n: int, **stream_options) -> Iterator[tuple[MobiusSegment, np.ndarray]]:
    """
    Pairs (segment, M over the segment) for [1, n]. Per-segment prefix sums
    are offset by the running total strictly in segment order.
    """
    _require_positive(n)
    total = 0
    for segment in iter_mobius_segments(1, n, **stream_options):
        block = np.cumsum(segment.values, dtype=np.int64) + total
        total = int(block[-1])
        yield segment, block


def mertens_prefix(
    n: int,
    checkpoints: Iterable[int] = (),
    *,
    start: int = 1,
    **stream_options,
) -> MertensTrace:
    """
    M(k) for every checkpoint k <= n, plus the extremes of M(k)/√k over
    k in [start, n].
    """
    _require_positive(n)
    grid = tuple(int(k) for k in checkpoints) or (n,)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("checkpoints must be strictly ascending")
    if grid[0] < 1 or grid[-1] > n:
        raise DomainError(f"checkpoints must lie in [1, {n}]")
    if not 1 <= start <= n:
        raise DomainError(f"start must lie in [1, {n}]")

    state = _MertensState()
    wanted = np.asarray(grid, dtype=np.int64)
    for segment, block in iter_mertens_blocks(n, **stream_options):
        inside = wanted[(wanted >= segment.lo) & (wanted <= segment.hi)]
        for k in inside.tolist():
            state.recorded[k] = int(block[k - segment.lo])
        first = max(start, segment.lo)
        if first > segment.hi:
            continue
        offset = first - segment.lo
        numbers = np.arange(first, segment.hi + 1, dtype=np.float64)
        ratios = block[offset:] / np.sqrt(numbers)
        _fold_extremes(state, ratios, first)
    state.total = int(block[-1])

    logger.info("[mertens_prefix] n=%d M(n)=%d max|M|/sqrt=%.6f at %d", n, state.total, state.max_abs_ratio, state.argmax_abs)
    return MertensTrace(
        grid=grid,
        values=tuple(state.recorded[k] for k in grid),
        max_abs_ratio=float(state.max_abs_ratio),
        argmax_abs=state.argmax_abs,
        max_ratio=float(state.max_ratio),
        argmax=state.argmax,
        min_ratio=float(state.min_ratio),
        argmin=state.argmin,
        n=n,
        start=start,
    )


def _fold_extremes(state: _MertensState, ratios: np.ndarray, first: int) -> None:
    # strict comparisons keep the smallest argument on ties
    i = int(np.argmax(np.abs(ratios)))
    if abs(ratios[i]) > state.max_abs_ratio:
        state.max_abs_ratio, state.argmax_abs = float(abs(ratios[i])), first + i
    i = int(np.argmax(ratios))
    if ratios[i] > state.max_ratio:
        state.max_ratio, state.argmax = float(ratios[i]), first + i
    i = int(np.argmin(ratios))
    if ratios[i] < state.min_ratio:
        state.min_ratio, state.argmin = float(ratios[i]), first + i


def mertens_oracle(n: int) -> int:
    """M(n) by summing the trial-division μ; slow, for cross-checks only."""
    _require_positive(n)
    return sum(mobius(k) for k in range(1, n + 1))


# =========================
# Classification census
# =========================

def class_masks(segment: MobiusSegment) -> dict[str, np.ndarray]:
    """
    The five disjoint classes of [lo, hi]: the unit, primes, non-squarefree
    numbers, squarefree numbers with an even (>= 2) and an odd (>= 3) count of
    prime factors.
    """
    if segment.prime_factor_counts is None:
        raise DomainError("segment was sieved without prime factor counts")
    numbers = segment.numbers()
    omega = segment.prime_factor_counts
    squarefree = segment.values != 0
    return {
        "ones": numbers == 1,
        "primes": squarefree & (omega == 1),
        "nonsquarefree": ~squarefree,
        "squarefree_even": squarefree & (omega >= 2) & (omega % 2 == 0),
        "squarefree_odd": squarefree & (omega >= 3) & (omega % 2 == 1),
    }


def classify_census(n: int, **stream_options) -> ClassificationCensus:
    """Class counts of [1, n] in one sieve pass; both identities are enforced."""
    _require_positive(n)
    counts = dict.fromkeys(("ones", "primes", "nonsquarefree", "squarefree_even", "squarefree_odd"), 0)
    mertens = 0
    for segment in iter_mobius_segments(1, n, **stream_options):
        for name, mask in class_masks(segment).items():
            counts[name] += int(np.count_nonzero(mask))
        mertens += int(segment.values.sum(dtype=np.int64))
    census = ClassificationCensus(n=n, mertens=mertens, **counts)
    logger.info("[classify_census] n=%d M=%d primes=%d", n, census.mertens, census.primes)
    return census
