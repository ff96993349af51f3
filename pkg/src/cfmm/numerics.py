"""Scalar root finding and small derivative-free convex minimization.

Everything here works on plain Python callables. Predicates are monotone
boolean functions of a positive scalar (membership of a rescaled point is the
typical case). Objectives are convex functions evaluated on an interval or on
the open positive orthant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import MaxIterExceeded, NoBracketFound, NonBracketing

__all__ = [
    "Tolerance",
    "Bracket",
    "DEFAULT_TOL",
    "MACHINE_TOL",
    "bisect_boundary",
    "expand_bracket",
    "minimize_scalar_convex",
    "minimize_positive_orthant",
    "minimize_box",
]


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10
    abs: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (self.rel > 0):
            raise ValueError(f"rel must be positive, got {self.rel}")
        if not (self.abs > 0):
            raise ValueError(f"abs must be positive, got {self.abs}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")

    def width(self, x: float) -> float:
        return max(self.abs, self.rel * abs(x))


DEFAULT_TOL = Tolerance()
# Bisection runs until the bracket cannot shrink any further in floating
# point. Used by property suites that compare against 1e-9 level bounds.
MACHINE_TOL = Tolerance(rel=2.3e-16, abs=1e-300, max_iter=2200)


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")


def _midpoint(lo: float, hi: float) -> float:
    # Geometric steps cover brackets spanning many decades in few iterations.
    if lo > 0 and hi > 4.0 * lo:
        return math.sqrt(lo) * math.sqrt(hi)
    return lo + 0.5 * (hi - lo)


def bisect_boundary(pred: Callable[[float], bool], bracket: Bracket,
                    tol: Tolerance = DEFAULT_TOL) -> float:
    """Locate the threshold where a monotone predicate flips.

    Returns the bracket end that lies on the side where ``pred`` is true, so
    callers that bisect on membership always get a member back.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    p_lo, p_hi = bool(pred(lo)), bool(pred(hi))
    if p_lo == p_hi:
        raise NonBracketing(f"predicate is {p_lo} at both {lo} and {hi}")
    for _ in range(int(tol.max_iter)):
        x_true = lo if p_lo else hi
        if hi - lo <= tol.width(x_true):
            return x_true
        mid = _midpoint(lo, hi)
        if not (lo < mid < hi):
            return x_true
        if bool(pred(mid)) == p_lo:
            lo = mid
        else:
            hi = mid
    x_true = lo if p_lo else hi
    if hi - lo <= tol.width(x_true):
        return x_true
    raise MaxIterExceeded(f"bisection stopped at width {hi - lo:.3e} after {tol.max_iter} steps")


def _growth(step: int) -> float:
    # Plain doubling at first, then squared factors every eight steps so the
    # whole range [1e-300, 1e300] is reachable within the expansion budget.
    return 2.0 ** (2 ** (step // 8))


def expand_bracket(pred: Callable[[float], bool], seed: float, *,
                   lo_limit: float = 1e-300, hi_limit: float = 1e300,
                   max_expansions: int = 128) -> Bracket:
    """Grow a bracket around ``seed`` until the predicate changes value.

    Searches upward and downward alternately. Raises :class:`NoBracketFound`
    when both directions reach their limits without a flip, meaning the
    threshold sits at 0 or at infinity.
    """
    if not (seed > 0):
        raise ValueError(f"seed must be positive, got {seed}")
    p0 = bool(pred(seed))
    up = down = float(seed)
    up_step = down_step = 0
    up_done = up >= hi_limit
    down_done = down <= lo_limit
    expansions = 0
    while expansions < max_expansions and not (up_done and down_done):
        if not up_done:
            nxt = min(up * _growth(up_step), hi_limit)
            up_step += 1
            expansions += 1
            if bool(pred(nxt)) != p0:
                return Bracket(up, nxt)
            up = nxt
            up_done = up >= hi_limit
        if not down_done and expansions < max_expansions:
            nxt = max(down / _growth(down_step), lo_limit)
            down_step += 1
            expansions += 1
            if bool(pred(nxt)) != p0:
                return Bracket(nxt, down)
            down = nxt
            down_done = down <= lo_limit
    raise NoBracketFound(f"predicate stayed {p0} on [{down:.3e}, {up:.3e}]")


def minimize_scalar_convex(g: Callable[[float], float], bracket: Bracket,
                           tol: Tolerance = DEFAULT_TOL) -> Tuple[float, float]:
    """Bounded Brent minimization of a convex function on ``[lo, hi]``.

    The endpoints are compared against the interior result at the end, since
    Brent's method never evaluates them and convex minimizers often sit on the
    boundary.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    xatol = max(tol.abs, tol.rel * max(abs(lo), abs(hi)))
    res = minimize_scalar(g, bounds=(lo, hi), method="bounded",
                          options={"xatol": xatol, "maxiter": int(tol.max_iter)})
    if res.status == 1:
        raise MaxIterExceeded(f"line search on [{lo}, {hi}] hit {tol.max_iter} iterations")
    best_x, best_f = float(res.x), float(res.fun)
    for x in (lo, hi):
        f = float(g(x))
        if f < best_f:
            best_x, best_f = x, f
    return best_x, best_f


_LOG_FLOOR = math.log(1e-9)
_LOG_CEIL = math.log(1e9)


def _coordinate_descent(g: Callable[[np.ndarray], float], lo: np.ndarray, hi: np.ndarray,
                        z: np.ndarray, tol: Tolerance, max_sweeps: int) -> Tuple[np.ndarray, float]:
    free = z.shape[0]
    f = float(g(z))
    if free == 0:
        return z, f
    directions = [np.eye(free)[i] for i in range(free)]
    if free >= 2:
        for i in range(free):
            for j in range(i + 1, free):
                for sign in (1.0, -1.0):
                    d = np.zeros(free)
                    d[i], d[j] = 1.0, sign
                    directions.append(d)

    line_tol = Tolerance(rel=max(tol.rel, 1e-12), abs=max(tol.abs, 1e-12), max_iter=max(tol.max_iter, 200))
    for _sweep in range(max_sweeps):
        f_start = f
        for d in directions:
            # Step range along d that keeps z inside the box.
            t_lo, t_hi = -np.inf, np.inf
            for k in np.nonzero(d)[0]:
                a = (lo[k] - z[k]) / d[k]
                b = (hi[k] - z[k]) / d[k]
                t_lo = max(t_lo, min(a, b))
                t_hi = min(t_hi, max(a, b))
            if not (t_hi - t_lo > 1e-14):
                continue
            base = z.copy()
            t, ft = minimize_scalar_convex(lambda s: float(g(base + s * d)), Bracket(t_lo, t_hi), line_tol)
            if ft < f:
                z = np.clip(base + t * d, lo, hi)
                f = ft
        if free == 1:
            return z, f
        if f_start - f <= max(tol.rel * abs(f), tol.abs):
            return z, f
    raise MaxIterExceeded(f"coordinate descent did not settle in {max_sweeps} sweeps")


def minimize_box(g: Callable[[np.ndarray], float], lower: Sequence[float], upper: Sequence[float],
                 tol: Tolerance = DEFAULT_TOL, *, x0: Optional[Sequence[float]] = None,
                 max_sweeps: int = 60) -> Tuple[np.ndarray, float]:
    """Coordinate descent for a convex function on a box of signed reals."""
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if lo.shape != hi.shape or np.any(lo > hi):
        raise ValueError("invalid box")
    z = 0.5 * (lo + hi) if x0 is None else np.clip(np.asarray(x0, dtype=float), lo, hi)
    return _coordinate_descent(g, lo, hi, z, tol, max_sweeps)


def minimize_positive_orthant(g: Callable[[np.ndarray], float], dim: int,
                              tol: Tolerance = DEFAULT_TOL, *,
                              x0: Optional[Sequence[float]] = None,
                              simplex: bool = False,
                              lower: Optional[Sequence[float]] = None,
                              upper: Optional[Sequence[float]] = None,
                              max_sweeps: int = 60) -> Tuple[np.ndarray, float]:
    """Cyclic coordinate descent in log coordinates over ``x > 0``.

    With ``simplex=True`` the search is over ``{x > 0, sum(x) = 1}``: the last
    log coordinate is pinned to zero and points are normalized before ``g``
    sees them. Homogeneous objectives should use this mode. ``lower`` and
    ``upper`` bound each coordinate (positive numbers, orthant mode only);
    the default box is ``[1e-9, 1e9]`` per coordinate.

    For two or more free coordinates each sweep also searches the pairwise
    diagonals, which keeps the method from stalling on ridges of nonsmooth
    objectives.
    """
    dim = int(dim)
    if dim < 1:
        raise ValueError("dim must be at least 1")
    free = dim - 1 if simplex else dim

    if simplex:
        lo = np.full(free, _LOG_FLOOR)
        hi = np.full(free, _LOG_CEIL)
    else:
        lo = np.log(np.asarray(lower, dtype=float)) if lower is not None else np.full(dim, _LOG_FLOOR)
        hi = np.log(np.asarray(upper, dtype=float)) if upper is not None else np.full(dim, _LOG_CEIL)
        if lo.shape != (dim,) or hi.shape != (dim,) or np.any(lo > hi):
            raise ValueError("invalid coordinate bounds")

    def point(z: np.ndarray) -> np.ndarray:
        if simplex:
            full = np.append(z, 0.0)
            w = np.exp(full - full.max())
            return w / w.sum()
        return np.exp(z)

    if x0 is None:
        z = np.zeros(free) if simplex else np.clip(np.zeros(dim), lo, hi)
    else:
        x0 = np.asarray(x0, dtype=float)
        z = np.log(x0[:-1]) - math.log(x0[-1]) if simplex else np.log(x0)
        z = np.clip(z, lo, hi)

    z, f = _coordinate_descent(lambda z: g(point(z)), lo, hi, z, tol, max_sweeps)
    return point(z), f
