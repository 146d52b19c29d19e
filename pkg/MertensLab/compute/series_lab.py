"""
Finite exponential functional series Σ n^(1/k), the matching geometric
progressions, their closed forms and the ratio probes built from them.
"""
from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import mpmath
import numpy as np
from scipy import special

from .arith_core import U64_MAX, floor_roots, integer_kth_root, ordered_map
from .exceptions import ArithmeticOverflowError, DomainError, ModeError
from .summation import CompensatedSum

logger = logging.getLogger(__name__)

# F1 above this n switches to the head + analytic tail evaluation.
F1_SPLIT_THRESHOLD = 10 ** 7
TAIL_ORDER = 16
CHUNK = 1 << 20
PROBE_MIN_N = 16


class SeriesFamily(enum.Enum):
    F1 = "F1"
    F2 = "F2"
    F4 = "F4"
    PHI1 = "PHI1"
    PHI2 = "PHI2"
    PHI4 = "PHI4"

    @property
    def is_progression(self) -> bool:
        return self.name.startswith("PHI")


class SeriesMode(enum.Enum):
    REAL = "REAL"
    FLOORED = "FLOORED"


class ClosedForm(enum.Enum):
    S1 = "S1"
    S4 = "S4"


class Probe(enum.Enum):
    K1 = "K1"
    K2 = "K2"
    K3 = "K3"
    K4 = "K4"


@dataclass(frozen=True)
class SeriesSpec:
    family: SeriesFamily
    mode: SeriesMode
    n: int

    def __post_init__(self):
        if self.mode is SeriesMode.FLOORED and self.family.is_progression:
            raise ModeError(f"{self.family.value} is a progression; FLOORED mode applies to F-families only")
        if self.n > U64_MAX:
            raise ArithmeticOverflowError(f"n={self.n} exceeds the unsigned 64-bit range")


@dataclass(frozen=True)
class SeriesSample:
    spec: SeriesSpec
    # int in FLOORED mode, float in REAL mode
    value: float | int
    term_count: int


@dataclass(frozen=True)
class RatioTrace:
    probe: Probe
    grid: tuple[int, ...]
    ratios: tuple[float, ...]


class RootGap(NamedTuple):
    gap: float
    bound: float
    holds: bool


# =========================
# Index ranges
# =========================

def root_indices(family: SeriesFamily, n: int) -> range:
    """Root indices k summed by an F-family at n."""
    if family is SeriesFamily.F1:
        return range(2, n + 1)
    if family is SeriesFamily.F2:
        return range(2, math.isqrt(n) + 1)
    if family is SeriesFamily.F4:
        # k = 2·k1 with k1 = 2 .. ⌊√n⌋/2
        return range(4, 2 * (math.isqrt(n) // 2) + 1, 2)
    raise ModeError(f"{family.value} is not a series family")


# =========================
# REAL-mode term sums
# =========================

def _sum_root_terms(log_n: float, indices: range) -> float:
    """Σ exp(ln n / k) over k in `indices`, fsum per chunk, compensated across chunks."""
    total = CompensatedSum()
    for start in range(0, len(indices), CHUNK):
        piece = indices[start:start + CHUNK]
        ks = np.arange(piece.start, piece.stop, piece.step, dtype=np.float64)
        total += math.fsum(np.exp(log_n / ks))
    return total.value


def f1_real_many(n_values: Iterable[int] | np.ndarray) -> np.ndarray:
    """
    f₁(n) = Σ_{k=2}^{n} n^(1/k) for an array of n.

    Terms with k <= K0 = 8⌊log₂ n⌋ are summed directly. Beyond K0 each term is
    expanded as Σ_j (ln n / k)^j / j!, and the inner sums Σ k^(-j) over
    (K0, n] come from digamma (j = 1) and the Hurwitz zeta function (j >= 2).
    Since ln n / K0 < 0.09 the expansion is exhausted long before TAIL_ORDER.
    """
    n = np.asarray(n_values, dtype=np.float64)
    if n.size == 0:
        return np.zeros(0, dtype=np.float64)
    if np.any(n < 2):
        raise DomainError("f1 needs n >= 2")
    log_n = np.log(n)
    head_end = np.minimum(8.0 * np.floor(np.log2(n)), n)

    head = np.zeros_like(n)
    ks = np.arange(2, int(head_end.max()) + 1, dtype=np.float64)
    for row in range(0, n.size, 4096):
        rows = slice(row, row + 4096)
        terms = np.exp(log_n[rows, None] / ks[None, :])
        terms[ks[None, :] > head_end[rows, None]] = 0.0
        head[rows] = terms.sum(axis=1)

    has_tail = head_end < n
    tail = np.zeros_like(n)
    if np.any(has_tail):
        lo = head_end[has_tail] + 1.0
        hi = n[has_tail] + 1.0
        L = log_n[has_tail]
        corr = L * (special.digamma(hi) - special.digamma(lo))
        factor = L.copy()
        for j in range(2, TAIL_ORDER + 1):
            factor = factor * L / j
            corr += factor * (special.zeta(j, lo) - special.zeta(j, hi))
        tail[has_tail] = (n[has_tail] - head_end[has_tail]) + corr
    return head + tail


# =========================
# FLOORED-mode term sums
# =========================

def _floored_sum(n: int, indices: range) -> int:
    """Σ ⌊n^(1/k)⌋; roots are 1 once 2^k > n, so only k < bit_length is rooted."""
    if not indices:
        return 0
    limit = n.bit_length()
    total = 0
    rooted = 0
    for k in indices:
        if k >= limit:
            break
        total += integer_kth_root(n, k)
        rooted += 1
    return total + (len(indices) - rooted)


def floored_parity_sums(n_values: Iterable[int] | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    For each n, the FLOORED sums of series (5) over even root indices
    2 <= k <= ⌊√n⌋ and over odd root indices 3 <= k <= ⌊√n⌋.
    """
    n = np.asarray(n_values, dtype=np.int64)
    even = np.zeros(n.shape, dtype=np.int64)
    odd = np.zeros(n.shape, dtype=np.int64)
    if n.size == 0:
        return even, odd
    if np.any(n < 1):
        raise DomainError("floored parity sums need n >= 1")
    sqrt_n = floor_roots(n, 2)
    limit = int(n.max()).bit_length()
    for k in range(2, limit):
        terms = np.where(sqrt_n >= k, floor_roots(n, k), 0)
        if k % 2 == 0:
            even += terms
        else:
            odd += terms
    # every k >= limit contributes a 1 while k <= ⌊√n⌋
    even += np.maximum(sqrt_n // 2 - (limit - 1) // 2, 0)
    odd += np.maximum(np.maximum((sqrt_n - 1) // 2, 0) - max((limit - 2) // 2, 0), 0)
    return even, odd


# =========================
# Series and progressions
# =========================

def eval_series(spec: SeriesSpec) -> SeriesSample:
    """Value of an F-family series at spec.n in the requested mode."""
    if spec.family.is_progression:
        raise ModeError(f"{spec.family.value} is a progression; use eval_progression")
    if spec.n < 2:
        raise DomainError(f"series need n >= 2 (got {spec.n})")
    indices = root_indices(spec.family, spec.n)
    if spec.mode is SeriesMode.FLOORED:
        value = _floored_sum(spec.n, indices)
    elif spec.family is SeriesFamily.F1 and spec.n > F1_SPLIT_THRESHOLD:
        value = float(f1_real_many([spec.n])[0])
    else:
        value = _sum_root_terms(math.log(spec.n), indices)
    logger.debug("[eval_series] %s %s n=%d terms=%d", spec.family.value, spec.mode.value, spec.n, len(indices))
    return SeriesSample(spec=spec, value=value, term_count=len(indices))


def _geometric_with_tail(scale: float, log_q: float, span: float) -> tuple[float, int]:
    """
    scale · Σ q^j over the exponent interval [0, span) in unit steps: whole
    terms for j < ⌊span⌋ and one terminal term weighted by (q^f - 1)/(q - 1),
    f = span - ⌊span⌋.
    """
    whole = math.floor(span)
    fraction = span - whole
    total = CompensatedSum()
    for start in range(0, whole, CHUNK):
        js = np.arange(start, min(start + CHUNK, whole), dtype=np.float64)
        total += math.fsum(np.exp(js * log_q))
    count = whole
    if fraction > 0.0:
        total += math.exp(whole * log_q) * math.expm1(fraction * log_q) / math.expm1(log_q)
        count += 1
    return scale * total.value, count


def eval_progression(spec: SeriesSpec) -> SeriesSample:
    """
    Value of a PHI-family progression at spec.n.

    PHI1 and PHI4 cover their exponent interval exactly: when the ladder
    endpoint (n^(1/2) for PHI1, n^(1/4) for PHI4) falls between grid points,
    the last term is weighted by (q^f - 1)/(q - 1), f the fractional step,
    instead of entering whole. So PHI1 at odd n is not the literal sum up to
    j = (n-1)/2, and PHI4 can fall below 4 (PHI4(16) = 4/3), but both match
    the closed forms S1 and S4. At even n (PHI1), or when √n is a multiple
    of 8 (PHI4), the weight is 1.
    """
    if not spec.family.is_progression:
        raise ModeError(f"{spec.family.value} is not a progression family")
    n = spec.n
    if n < 4:
        raise DomainError(f"progressions need n >= 4 (got {n})")
    log_n = math.log(n)
    if spec.family is SeriesFamily.PHI1:
        value, count = _geometric_with_tail(2.0, log_n / n, n / 2)
    elif spec.family is SeriesFamily.PHI4:
        value, count = _geometric_with_tail(4.0, 2.0 * log_n / math.sqrt(n), math.sqrt(n) / 8)
    else:
        ks = np.arange(1, math.isqrt(n) // 2 + 1, dtype=np.float64)
        value = 2.0 * math.fsum([1.0, *np.exp(ks * log_n / math.sqrt(n))])
        count = len(ks) + 1
    return SeriesSample(spec=spec, value=value, term_count=count)


def evaluate(spec: SeriesSpec) -> SeriesSample:
    if spec.family.is_progression:
        return eval_progression(spec)
    return eval_series(spec)


def closed_form_sum(family: ClosedForm, n: int) -> float:
    """S1 = 2(√n - 1)/(n^(1/n) - 1) and S4 = 4(n^(1/4) - 1)/(n^(2/√n) - 1)."""
    if n < 4:
        raise DomainError(f"closed forms need n >= 4 (got {n})")
    log_n = math.log(n)
    if family is ClosedForm.S1:
        return 2.0 * math.expm1(log_n / 2) / math.expm1(log_n / n)
    return 4.0 * math.expm1(log_n / 4) / math.expm1(2.0 * log_n / math.sqrt(n))


def root_gap_check(n: int) -> RootGap:
    """n^(1/n) - 1 against 2/√n; the gap is 0 exactly at n = 1."""
    if n < 1:
        raise DomainError(f"root gap needs n >= 1 (got {n})")
    gap = math.expm1(math.log(n) / n)
    bound = 2.0 / math.sqrt(n)
    return RootGap(gap=gap, bound=bound, holds=0.0 <= gap < bound)


# =========================
# Ratio probes
# =========================

def _ceil_sqrt(x: int) -> int:
    return math.isqrt(x - 1) + 1


def complementary_last_index(n: int) -> int:
    """Last index j of the progression slice 2·Σ n^(j/n) paired with f₃."""
    return (n - _ceil_sqrt(4 * n)) // 2


def _f3(n: int) -> float:
    """Σ_{k=⌊√n⌋}^{n} n^(1/k)."""
    first = math.isqrt(n)
    if n <= F1_SPLIT_THRESHOLD:
        return _sum_root_terms(math.log(n), range(first, n + 1))
    return float(f1_real_many([n])[0]) - _sum_root_terms(math.log(n), range(2, first))


def _phi3(n: int) -> float:
    last = complementary_last_index(n)
    log_q = math.log(n) / n
    return 2.0 * math.expm1((last + 1) * log_q) / math.expm1(log_q)


def probe_value(probe: Probe, n: int) -> float:
    if n < PROBE_MIN_N:
        raise DomainError(f"ratio probes need n >= {PROBE_MIN_N} (got {n})")
    if probe is Probe.K1:
        return n / closed_form_sum(ClosedForm.S1, n)
    if probe is Probe.K2:
        return _f3(n) / _phi3(n)
    if probe is Probe.K3:
        f4 = eval_series(SeriesSpec(SeriesFamily.F4, SeriesMode.REAL, n)).value
        phi4 = eval_progression(SeriesSpec(SeriesFamily.PHI4, SeriesMode.REAL, n)).value
        return f4 / phi4
    return math.sqrt(n) / closed_form_sum(ClosedForm.S4, n)


def ratio_probe(probe: Probe, grid: Iterable[int], *, workers: int = 1) -> RatioTrace:
    """Raw probe values over an ascending grid; points may be evaluated in parallel."""
    grid = tuple(int(n) for n in grid)
    if not grid:
        raise DomainError("ratio probe grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("ratio probe grid must be strictly ascending")
    if grid[0] < PROBE_MIN_N:
        raise DomainError(f"ratio probes need n >= {PROBE_MIN_N} (got {grid[0]})")
    ratios = tuple(ordered_map(functools.partial(probe_value, probe), grid, workers))
    logger.info("[ratio_probe] %s points=%d last=%.12g", probe.value, len(grid), ratios[-1])
    return RatioTrace(probe=probe, grid=grid, ratios=ratios)


def reevaluate_probe(probe: Probe, n: int, dps: int = 40) -> float:
    """
    The same ratio with mpmath at `dps` digits. Series are summed term by term
    and progressions directly, so nothing is shared with probe_value.
    """
    if n < PROBE_MIN_N:
        raise DomainError(f"ratio probes need n >= {PROBE_MIN_N} (got {n})")
    with mpmath.workdps(dps):
        N = mpmath.mpf(n)
        root_n = mpmath.sqrt(N)
        if probe is Probe.K1:
            s1 = 2 * (root_n - 1) / (mpmath.root(N, n) - 1)
            return float(N / s1)
        if probe is Probe.K2:
            f3 = mpmath.fsum(mpmath.root(N, k) for k in range(math.isqrt(n), n + 1))
            phi3 = 2 * mpmath.fsum(N ** (mpmath.mpf(j) / n) for j in range(complementary_last_index(n) + 1))
            return float(f3 / phi3)
        if probe is Probe.K3:
            f4 = mpmath.fsum(mpmath.root(N, k) for k in root_indices(SeriesFamily.F4, n))
            span = root_n / 8
            whole = int(mpmath.floor(span))
            q = N ** (2 / root_n)
            phi4 = mpmath.fsum(q ** j for j in range(whole))
            fraction = span - whole
            if fraction > 0:
                phi4 += q ** whole * (q ** fraction - 1) / (q - 1)
            return float(f4 / (4 * phi4))
        s4 = 4 * (mpmath.root(N, 4) - 1) / (N ** (2 / root_n) - 1)
        return float(root_n / s4)
