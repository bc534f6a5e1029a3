"""Globally optimal relay spacing on a line segment.

A chain of N relay nodes forwards traffic generated uniformly along [0, L]
toward a sink at 0; every node relays everything collected beyond it.  The
largest per-meter load q a placement can sustain is limited by each hop:
a hop of length d_i must carry q * (d_i/2 + sum of all spacings beyond i).

For a fixed q the headroom of a single hop is captured by the surplus

    surplus(x) = R(x)/q - x/2

the chain length a hop of length x can still feed after serving its own
half-cell.  Maximizing total covered length at fixed q has a closed-form
solution: either a single active hop (heavy load), or a backward recursion
that makes every hop's constraint tight, producing spacings that grow with
distance from the sink.  The optimal supportable load q_sup for a given L is
then found by bisecting q until the maximal covered length equals L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import RateFunction
from .scalar import (MonotoneFn, NoBracketError, Tolerance, bisect_monotone,
                     bracket_monotone)

__all__ = [
    "CASE_I",
    "CASE_II",
    "Placement",
    "SubproblemResult",
    "SolveResult",
    "OutOfRangeError",
    "WrongBranchError",
    "NumericalInfeasibleError",
    "surplus",
    "surplus_inverse",
    "critical_load",
    "critical_length",
    "solve_subproblem",
    "solve",
    "decay_factor",
    "surplus_slope",
]

CASE_I = "case-i"    # single active hop: load too heavy for a chain to help
CASE_II = "case-ii"  # all hop constraints tight, spacings strictly increasing

_SUM_TOL = 1e-6      # relative slack allowed on sum(distances) == length
_CLAMP_REL = 1e-9    # numeric overshoot tolerated on the recursion argument


class OutOfRangeError(ValueError):
    """Requested surplus value exceeds the maximum R(0)/q attained at x = 0."""


class WrongBranchError(RuntimeError):
    """Decay factor requested at a load where the chain solution is inactive."""


class NumericalInfeasibleError(RuntimeError):
    """Backward recursion left the surplus domain by more than roundoff."""


# ---------------------------------------------------------------------------
# placements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Placement:
    """Ordered hop spacings d_1..d_N from the sink outward; node N sits at L."""

    distances: np.ndarray
    length: float

    def __post_init__(self) -> None:
        d = np.asarray(self.distances, dtype=float)
        object.__setattr__(self, "distances", d)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("distances must be a 1-D array with at least one hop")
        if self.length <= 0:
            raise ValueError("length must be > 0")
        if float(d.min()) < 0.0:
            raise ValueError("distances must be >= 0")
        total = float(d.sum())
        if abs(total - self.length) > _SUM_TOL * self.length:
            raise ValueError(
                f"distances sum to {total:.9g}, expected {self.length:.9g} "
                f"within {_SUM_TOL:g} relative")

    @property
    def n(self) -> int:
        return int(self.distances.size)

    @property
    def positions(self) -> np.ndarray:
        """Node positions x_0 = 0, x_1, ..., x_N."""
        out = np.empty(self.distances.size + 1)
        out[0] = 0.0
        np.cumsum(self.distances, out=out[1:])
        return out


@dataclass(frozen=True)
class SubproblemResult:
    """Coverage-maximizing spacings at a fixed load q."""

    distances: np.ndarray
    coverage: float          # sum of spacings
    branch: str              # CASE_I or CASE_II


@dataclass(frozen=True)
class SolveResult:
    """Optimal placement for N hops over [0, L] and the load it supports."""

    q_sup: float                 # largest supportable per-meter load [bit/s per m]
    placement: Placement
    q0: float                    # load threshold where the single-hop branch takes over
    L0: float                    # coverage at that threshold; L <= L0 means branch case-i
    branch: str
    gamma: Optional[float]       # spacing decay factor, only on the chain branch
    iterations: int              # bisection steps on q
    bracket_width: float         # final q bracket width [bit/s per m]
    coverage_residual: float = field(default=0.0)  # |coverage - L| before rescaling


# ---------------------------------------------------------------------------
# surplus machinery
# ---------------------------------------------------------------------------

def surplus(rate: RateFunction, q: float, x):
    """Chain length a hop of length x can feed at load q: R(x)/q - x/2."""
    if q <= 0:
        raise ValueError("load q must be > 0")
    r = rate(x)
    if isinstance(x, np.ndarray):
        return r / q - 0.5 * x
    return r / q - 0.5 * float(x)


def surplus_inverse(rate: RateFunction, q: float, t: float, *,
                    seed: float | None = None) -> float:
    """Hop length x >= 0 with surplus(x) = t; t may not exceed R(0)/q."""
    if q <= 0:
        raise ValueError("load q must be > 0")
    g0 = rate.r0 / q
    t = float(t)
    if t > g0:
        if t - g0 <= _CLAMP_REL * max(1.0, abs(g0)):
            return 0.0
        raise OutOfRangeError(f"surplus target {t:.9g} exceeds maximum {g0:.9g}")
    if t == g0:
        return 0.0
    r = rate.scalar
    qinv = 1.0 / q

    def f(x: float) -> float:
        return r(x) * qinv - 0.5 * x

    mono = MonotoneFn(f, "decreasing", lower_bound=0.0, open_lower=False)
    lo, hi = bracket_monotone(mono, t, seed if seed and seed > 0 else 1.0)
    tol = Tolerance(abs_x=1e-9 * max(1.0, hi), abs_f=1e-9 * max(1.0, abs(t)))
    return bisect_monotone(mono, t, lo, hi, tol)


def critical_load(rate: RateFunction) -> float:
    """Load q0 above which a single active hop outperforms any chain.

    Unique root of the strictly increasing map q -> R(R(0)/q) - R(0)/2.
    """
    r0 = rate.r0
    r = rate.scalar

    def f(q: float) -> float:
        return r(r0 / q) - 0.5 * r0

    mono = MonotoneFn(f, "increasing", lower_bound=0.0, open_lower=True)
    lo, hi = bracket_monotone(mono, 0.0, r0)
    tol = Tolerance(abs_x=1e-9 * max(1.0, hi), abs_f=1e-9 * r0)
    return bisect_monotone(mono, 0.0, lo, hi, tol)


def critical_length(rate: RateFunction) -> float:
    """Coverage L0 of the single active hop at the critical load."""
    return surplus_inverse(rate, critical_load(rate), 0.0)


def surplus_slope(rate: RateFunction, q: float, x: float) -> float:
    """Numeric derivative of the surplus: R'(x)/q - 1/2."""
    if q <= 0:
        raise ValueError("load q must be > 0")
    return rate.derivative(x) / q - 0.5


def decay_factor(rate: RateFunction, q: float) -> float:
    """Geometric factor gamma in (0, 1) bounding how fast spacings shrink sink-ward.

    Defined as 1 + 1/surplus_slope(0); only meaningful on the chain branch
    (q below the critical load), where the slope at 0 is below -1.
    """
    if q <= 0:
        raise ValueError("load q must be > 0")
    if q >= critical_load(rate):
        raise WrongBranchError("decay factor is defined only below the critical load")
    slope0 = surplus_slope(rate, q, 0.0)
    return 1.0 + 1.0 / slope0


# ---------------------------------------------------------------------------
# coverage maximization at fixed load
# ---------------------------------------------------------------------------

def solve_subproblem(rate: RateFunction, q: float, n: int) -> SubproblemResult:
    """Spacings maximizing covered length with n hops at fixed load q.

    Heavy load (surplus_inverse(0) >= R(0)/q): one active hop next to the
    sink, the remaining nodes collapse onto it.  Otherwise every constraint
    is made tight by a backward recursion from the farthest hop inward,
    yielding strictly increasing spacings.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if q <= 0:
        raise ValueError("load q must be > 0")
    g0 = rate.r0 / q
    d_far = surplus_inverse(rate, q, 0.0)
    d = np.zeros(n)
    if d_far >= g0:
        # case i: the single hop already out-reaches anything a chain could add
        d[0] = d_far
        return SubproblemResult(distances=d, coverage=d_far, branch=CASE_I)
    d[n - 1] = d_far
    total = d_far
    for i in range(n - 2, -1, -1):
        t = total
        if t > g0:
            if t - g0 <= _CLAMP_REL * max(1.0, g0):
                t = g0
            else:
                raise NumericalInfeasibleError(
                    f"relayed-tail total {t:.9g} exceeds surplus maximum {g0:.9g}")
        d[i] = surplus_inverse(rate, q, t, seed=d[i + 1])
        total += d[i]
    return SubproblemResult(distances=d, coverage=total, branch=CASE_II)


# ---------------------------------------------------------------------------
# optimal load for a fixed segment
# ---------------------------------------------------------------------------

def solve(rate: RateFunction, n: int, length: float,
          tol_q: float | None = None) -> SolveResult:
    """Bisect the load until n hops exactly cover [0, length].

    Coverage is continuous and strictly decreasing in q, so the supportable
    load is the unique q with coverage(q) = length.  Default tolerance:
    1e-6 of the seed load R(length/n) * n / length.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if length <= 0:
        raise ValueError("length must be > 0")
    q_guess = rate.scalar(length / n) * n / length
    if tol_q is None:
        tol_q = 1e-6 * q_guess
    if tol_q <= 0:
        raise ValueError("tol_q must be > 0")

    def coverage(q: float) -> float:
        return solve_subproblem(rate, q, n).coverage

    # geometric bracket: q_lo still covers the segment, q_up no longer does
    if coverage(q_guess) >= length:
        q_lo = q_guess
        q_up = q_guess
        for _ in range(60):
            q_up *= 2.0
            if coverage(q_up) < length:
                break
            q_lo = q_up
        else:
            raise NoBracketError("coverage never fell below the segment length")
    else:
        q_up = q_guess
        q_lo = q_guess
        for _ in range(60):
            q_lo *= 0.5
            if coverage(q_lo) >= length:
                break
            q_up = q_lo
        else:
            raise NoBracketError("coverage never reached the segment length")

    iterations = 0
    while q_up - q_lo > tol_q and iterations < 200:
        mid = 0.5 * (q_lo + q_up)
        if coverage(mid) >= length:
            q_lo = mid
        else:
            q_up = mid
        iterations += 1
    q_sup = 0.5 * (q_lo + q_up)

    sub = solve_subproblem(rate, q_sup, n)
    residual = abs(sub.coverage - length)
    distances = sub.distances * (length / sub.coverage)
    q0 = critical_load(rate)
    l0 = surplus_inverse(rate, q0, 0.0)
    gamma = None
    if sub.branch == CASE_II:
        gamma = 1.0 + 1.0 / surplus_slope(rate, q_sup, 0.0)
    return SolveResult(
        q_sup=q_sup,
        placement=Placement(distances=distances, length=length),
        q0=q0,
        L0=l0,
        branch=sub.branch,
        gamma=gamma,
        iterations=iterations,
        bracket_width=q_up - q_lo,
        coverage_residual=residual,
    )
