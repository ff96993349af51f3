"""Liquidity cone, its dual, and the transforms between phi and V.

The portfolio value ``V(c) = min{c^T R : R in S}`` and the canonical trading
function determine each other:

    V(c)   = inf_R c^T R / phi(R)
    phi(R) = inf_c c^T R / V(c)

Both infima are over rays, so they are taken on the unit simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .numerics import DEFAULT_TOL, Tolerance, minimize_positive_orthant
from .reachable import ReachableSet, as_vector, portfolio_value

__all__ = [
    "LiquidityConePoint",
    "DualConePoint",
    "PortfolioValueFn",
    "pv_function",
    "cone_contains",
    "dual_cone_contains",
    "pv_and_minimizer",
    "pv_from_phi",
    "phi_from_pv",
    "rmm_phi0",
    "separation_certificate",
]

_BIG = 1e300


@dataclass(frozen=True)
class LiquidityConePoint:
    reserves: np.ndarray
    scale: float

    def __post_init__(self):
        object.__setattr__(self, "reserves", as_vector(self.reserves, name="reserves"))
        if not (self.scale >= 0):
            raise ValueError(f"scale must be nonnegative, got {self.scale}")


@dataclass(frozen=True)
class DualConePoint:
    price: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "price", as_vector(self.price, name="price"))


@dataclass(frozen=True)
class PortfolioValueFn:
    """A portfolio value function ``c -> V(c)`` on ``dim`` assets."""

    fn: Callable[[np.ndarray], float] = field(repr=False)
    dim: int

    def __call__(self, c) -> float:
        return float(self.fn(as_vector(c, self.dim, "prices")))


def pv_function(S: ReachableSet, tol: Tolerance = DEFAULT_TOL) -> PortfolioValueFn:
    return PortfolioValueFn(lambda c: portfolio_value(S, c, tol)[0], S.dim)


def cone_contains(S: ReachableSet, point: LiquidityConePoint) -> bool:
    R = as_vector(point.reserves, S.dim, "reserves")
    if point.scale == 0:
        return bool(np.all(R >= 0))
    return S.contains(R / point.scale)


def dual_cone_contains(V: Callable[[np.ndarray], float], point: DualConePoint) -> bool:
    c = point.price
    if np.any(c < 0):
        return False
    eta = float(point.offset)
    return bool(float(V(c)) + eta >= -1e-12 * max(1.0, abs(eta)))


def pv_and_minimizer(phi_fn: Callable[[np.ndarray], float], c,
                     tol: Tolerance = DEFAULT_TOL) -> Tuple[float, Optional[np.ndarray]]:
    """Minimize ``c^T R / phi(R)`` over the simplex and rescale to the boundary."""
    c = as_vector(c, name="prices")

    def ratio(R):
        p = phi_fn(R)
        if not (p > 0):
            return _BIG
        return float(c @ R) / p

    Rs, _ = minimize_positive_orthant(ratio, c.shape[0], tol, simplex=True)
    p = phi_fn(Rs)
    if not (p > 0) or not np.isfinite(p):
        return 0.0, None
    R = Rs / p
    return float(c @ R), R


def pv_from_phi(phi_fn: Callable[[np.ndarray], float], c, tol: Tolerance = DEFAULT_TOL) -> float:
    return pv_and_minimizer(phi_fn, c, tol)[0]


def phi_from_pv(V: Callable[[np.ndarray], float], R, tol: Tolerance = DEFAULT_TOL) -> float:
    """``inf_c c^T R / V(c)`` over the simplex."""
    R = as_vector(R, name="reserves")

    def ratio(c):
        v = float(V(c))
        if not (v > 0):
            return _BIG
        return float(c @ R) / v

    _, val = minimize_positive_orthant(ratio, R.shape[0], tol, simplex=True)
    return float(val)


def rmm_phi0(V: Callable[[np.ndarray], float], R, tol: Tolerance = DEFAULT_TOL) -> float:
    """Simplex-restricted ``inf_c c^T R - V(c)``; nonnegative iff ``R`` is in the set."""
    R = as_vector(R, name="reserves")
    _, val = minimize_positive_orthant(lambda c: float(c @ R) - float(V(c)), R.shape[0], tol, simplex=True)
    return float(val)


def separation_certificate(S: ReachableSet, R, tol: Tolerance = DEFAULT_TOL) -> Optional[Tuple[np.ndarray, float]]:
    """Price vector proving ``R`` is outside ``S``, or ``None`` if it is inside.

    A certificate ``(c, gap)`` has ``V(c) - c^T R = gap > 0``: the point
    ``(c, -V(c))`` of the dual cone has negative inner product with ``(R, 1)``.
    """
    R = as_vector(R, S.dim, "reserves")
    if S.contains(R):
        return None

    def V(c):
        return portfolio_value(S, c, tol)[0]

    c, _ = minimize_positive_orthant(lambda c: float(c @ R) - V(c), S.dim, tol, simplex=True)
    gap = V(c) - float(c @ R)
    if gap > max(tol.abs, tol.rel * max(1.0, float(np.max(R)))):
        return c, gap
    return None
