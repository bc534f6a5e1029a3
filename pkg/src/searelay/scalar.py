"""Root finding for strictly monotone scalar functions.

Everything downstream (surplus inversion, critical-load search, the load
bisection itself) reduces to "solve f(x) = target for monotone f".  Pure
bisection after a geometric bracket walk: slower than secant-type methods but
immune to the near-flat tails these rate models produce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

__all__ = [
    "Tolerance",
    "MonotoneFn",
    "NoBracketError",
    "MaxItersError",
    "bracket_monotone",
    "bisect_monotone",
    "bracket_then_bisect",
]

_MAX_GEOMETRIC_STEPS = 60  # walk limit: 2**60 * seed


class NoBracketError(RuntimeError):
    """Geometric walk ran out of range without straddling the target."""


class MaxItersError(RuntimeError):
    """Bisection hit the iteration cap before reaching tolerance."""


@dataclass(frozen=True)
class Tolerance:
    abs_x: float          # stop when bracket width <= abs_x
    abs_f: float          # or when |f(mid) - target| <= abs_f
    max_iters: int = 200

    def __post_init__(self) -> None:
        if self.abs_x <= 0 or self.abs_f <= 0:
            raise ValueError("tolerances must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class MonotoneFn:
    """A strictly monotone callable on [lower_bound, inf) (open at the bound if flagged)."""

    fn: Callable[[float], float]
    direction: str = "increasing"   # or "decreasing"
    lower_bound: float = 0.0
    open_lower: bool = False

    def __post_init__(self) -> None:
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError("direction must be 'increasing' or 'decreasing'")


def _oriented(f: MonotoneFn, target: float) -> Callable[[float], float]:
    """Shifted copy of f that is increasing with a root at the solution."""
    fn = f.fn
    if f.direction == "increasing":
        return lambda x: fn(x) - target
    return lambda x: target - fn(x)


def bracket_monotone(f: MonotoneFn, target: float, seed: float) -> tuple[float, float]:
    """Geometric walk from seed until [lo, hi] straddles the target value.

    Doubles away from the lower bound, halves toward it.  A closed lower
    bound is probed directly, which settles targets attained only there.
    """
    if seed <= f.lower_bound:
        raise ValueError("seed must exceed the domain lower bound")
    s = _oriented(f, target)
    s_seed = s(seed)
    if s_seed == 0.0:
        return seed, seed
    lb = f.lower_bound
    if s_seed > 0.0:
        # root below the seed
        hi = seed
        if not f.open_lower:
            if s(lb) <= 0.0:
                return lb, hi
            raise NoBracketError("no sign change down to the domain lower bound")
        gap = seed - lb
        for _ in range(_MAX_GEOMETRIC_STEPS):
            gap *= 0.5
            lo = lb + gap
            if s(lo) <= 0.0:
                return lo, hi
            hi = lo
        raise NoBracketError("no sign change after halving toward the lower bound")
    # root above the seed
    lo = seed
    gap = seed - lb
    for _ in range(_MAX_GEOMETRIC_STEPS):
        gap *= 2.0
        hi = lb + gap
        if s(hi) >= 0.0:
            return lo, hi
        lo = hi
    raise NoBracketError("no sign change after doubling away from the seed")


def bisect_monotone(f: MonotoneFn, target: float, lo: float, hi: float,
                    tol: Tolerance) -> float:
    """Bisect a bracketing interval down to tolerance.

    The returned point always lies inside the final bracket, whose endpoints
    straddle the target.
    """
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    s = _oriented(f, target)
    if lo == hi:
        return lo
    s_lo = s(lo)
    if abs(s_lo) <= tol.abs_f:
        return lo
    s_hi = s(hi)
    if abs(s_hi) <= tol.abs_f:
        return hi
    if s_lo > 0.0 or s_hi < 0.0:
        raise ValueError("interval does not bracket the target")
    for _ in range(tol.max_iters):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol.abs_x:
            return mid
        s_mid = s(mid)
        if abs(s_mid) <= tol.abs_f:
            return mid
        if s_mid < 0.0:
            lo = mid
        else:
            hi = mid
    raise MaxItersError(f"bisection did not converge in {tol.max_iters} iterations")


def bracket_then_bisect(f: MonotoneFn, target: float, seed: float,
                        tol: Tolerance) -> float:
    """Solve f(x) = target for strictly monotone f, starting the search at seed."""
    lo, hi = bracket_monotone(f, target, seed)
    return bisect_monotone(f, target, lo, hi, tol)
