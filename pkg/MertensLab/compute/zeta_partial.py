"""
Partial sums of Σ μ(n) n^(-s), directly and in summation-by-parts form.

Both forms come out of one pass over the ordered μ/M stream. The Abel form
keeps its boundary term M(N)·N^(-s), so the two agree to rounding.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import special

from .arith_core import DEFAULT_MAX_N, DEFAULT_SEGMENT_SIZE, iter_mertens_blocks
from .claims_harness import ClaimVerdict, verdict_from_margins
from .exceptions import DomainError
from .summation import ComplexCompensatedSum, exact_complex_sum

logger = logging.getLogger(__name__)

ABEL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ComplexPoint:
    sigma: float
    t: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0 (got {self.sigma})")

    @property
    def label(self) -> str:
        return f"sigma{self.sigma:g}_t{self.t:g}"


@dataclass(frozen=True)
class PartialSumTrace:
    s: ComplexPoint
    grid: tuple[int, ...]
    direct_values: tuple[complex, ...]
    abel_values: tuple[complex, ...]
    boundary_abs: tuple[float, ...]
    harmonic_bound: tuple[float, ...] | None = None
    claimed_constant: float | None = None
    c: float | None = None


def harmonic_number(n: int | np.ndarray):
    """H_n = ψ(n + 1) + γ."""
    return special.digamma(np.asarray(n, dtype=np.float64) + 1.0) + np.euler_gamma


def harmonic_majorant(c: float, grid: Iterable[int]) -> tuple[float, ...]:
    """(0.25·c/(c-1))·H_N at every N of the grid."""
    _require_c(c)
    factor = 0.25 * c / (c - 1)
    return tuple(float(factor * h) for h in harmonic_number(np.asarray(tuple(grid))))


def claimed_constant(sigma: float, c: float) -> float:
    """0.25·c/(ε(c-1)) with ε = σ - 1/2."""
    _require_c(c)
    epsilon = sigma - 0.5
    if not epsilon > 0:
        raise DomainError(f"the convergence constant needs sigma > 0.5 (got {sigma})")
    return 0.25 * c / (epsilon * (c - 1))


def _require_c(c: float) -> None:
    if not c > 1:
        raise DomainError(f"c must be > 1 (got {c})")


def n_power(s: ComplexPoint, numbers: np.ndarray) -> np.ndarray:
    """n^(-s) = e^(-σ ln n)(cos(t ln n) - i sin(t ln n))."""
    log_n = np.log(numbers)
    phase = s.t * log_n
    return np.exp(-s.sigma * log_n) * (np.cos(phase) - 1j * np.sin(phase))


def _grid(N: int, checkpoints: Iterable[int]) -> tuple[int, ...]:
    if N < 1:
        raise DomainError(f"N must be >= 1 (got {N})")
    grid = tuple(int(k) for k in checkpoints) or (N,)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("checkpoints must be strictly ascending")
    if grid[0] < 1 or grid[-1] > N:
        raise DomainError(f"checkpoints must lie in [1, {N}]")
    return grid


def partial_sum_trace(
    s: ComplexPoint,
    N: int,
    checkpoints: Iterable[int] = (),
    *,
    c: float | None = None,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
    max_n: int = DEFAULT_MAX_N,
) -> PartialSumTrace:
    """
    Σ_{n<=N} μ(n) n^(-s) and Σ_{n<N} M(n)(n^(-s) - (n+1)^(-s)) + M(N) N^(-s)
    at every checkpoint N, with |M(N) N^(-s)| alongside.
    """
    grid = _grid(N, checkpoints)
    direct = ComplexCompensatedSum()
    abel = ComplexCompensatedSum()
    direct_values, abel_values, boundary = [], [], []
    pending = iter(grid)
    target = next(pending, None)

    for segment, block in iter_mertens_blocks(N, segment_size=segment_size, workers=workers, max_n=max_n):
        powers = n_power(s, np.arange(segment.lo, segment.hi + 2, dtype=np.float64))
        here = powers[:-1]
        direct_terms = segment.values * here
        abel_terms = block * (here - powers[1:])
        direct_from = abel_from = 0
        while target is not None and target <= segment.hi:
            at = target - segment.lo
            direct.add(exact_complex_sum(direct_terms[direct_from:at + 1]))
            abel.add(exact_complex_sum(abel_terms[abel_from:at]))
            direct_from, abel_from = at + 1, at
            edge = complex(block[at] * here[at])
            direct_values.append(direct.value)
            abel_values.append(abel.value + edge)
            boundary.append(abs(edge))
            target = next(pending, None)
        direct.add(exact_complex_sum(direct_terms[direct_from:]))
        abel.add(exact_complex_sum(abel_terms[abel_from:]))

    harmonic = None
    constant = None
    if c is not None:
        if math.isclose(s.sigma, 0.5):
            harmonic = harmonic_majorant(c, grid)
        elif s.sigma > 0.5:
            constant = claimed_constant(s.sigma, c)

    logger.info("[partial_sum_trace] %s N=%d value=%r", s.label, N, direct_values[-1])
    return PartialSumTrace(
        s=s,
        grid=grid,
        direct_values=tuple(direct_values),
        abel_values=tuple(abel_values),
        boundary_abs=tuple(boundary),
        harmonic_bound=harmonic,
        claimed_constant=constant,
        c=c,
    )


def partial_sum_direct(s: ComplexPoint, N: int, checkpoints: Iterable[int] = (), **options) -> PartialSumTrace:
    """Direct partial sums; read `direct_values` off the trace."""
    return partial_sum_trace(s, N, checkpoints, **options)


def partial_sum_abel(s: ComplexPoint, N: int, checkpoints: Iterable[int] = (), **options) -> PartialSumTrace:
    """Summation-by-parts partial sums; read `abel_values` off the trace."""
    return partial_sum_trace(s, N, checkpoints, **options)


def sigma_sweep(
    sigmas: Iterable[float],
    N_grid: Iterable[int],
    c: float,
    *,
    t: float = 0.0,
    **options,
) -> list[PartialSumTrace]:
    """One trace per σ, in ascending σ."""
    _require_c(c)
    sigmas = sorted(set(sigmas))
    if not sigmas:
        return []
    grid = tuple(N_grid)
    if not grid:
        raise DomainError("N grid is empty")
    return [
        partial_sum_trace(ComplexPoint(sigma, t), grid[-1], grid, c=c, **options)
        for sigma in sigmas
    ]


def abel_verdict(trace: PartialSumTrace) -> ClaimVerdict:
    """|direct - abel| <= 1e-9·(1 + |direct|) at every checkpoint."""
    direct = np.asarray(trace.direct_values, dtype=np.complex128)
    abel = np.asarray(trace.abel_values, dtype=np.complex128)
    margins = ABEL_TOLERANCE * (1 + np.abs(direct)) - np.abs(direct - abel)
    return verdict_from_margins(
        f"theorem3_abel_{trace.s.label}", np.asarray(trace.grid, dtype=np.int64), margins, strict=False,
    )


def convergence_verdict(trace: PartialSumTrace, constant: float | None = None) -> ClaimVerdict:
    """|partial sum| <= the claimed convergence constant at every checkpoint."""
    constant = trace.claimed_constant if constant is None else constant
    if constant is None:
        raise DomainError("trace carries no convergence constant (needs sigma > 0.5 and c)")
    magnitudes = np.abs(np.asarray(trace.direct_values, dtype=np.complex128))
    return verdict_from_margins(
        f"theorem3_convergence_{trace.s.label}", np.asarray(trace.grid, dtype=np.int64), constant - magnitudes, strict=False,
    )
