"""Fee-free CFMMs described by their reachable sets.

A reachable set ``S`` is a closed, convex, upward-closed subset of the
nonnegative orthant. Everything else (canonical trading function, prices,
portfolio value) is derived from the membership test, with optional closed
forms supplied by concrete subclasses.
"""

from __future__ import annotations

from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, NonSmoothPoint, NoBracketFound, Unsupported, ZeroLiquidity, CFMMError
from .numerics import DEFAULT_TOL, MACHINE_TOL, Tolerance, bisect_boundary, expand_bracket

__all__ = [
    "MEMBERSHIP_SLACK",
    "ReachableSet",
    "PsiSet",
    "as_vector",
    "contains",
    "phi",
    "phi_bisect",
    "scale_to_boundary",
    "grad_phi",
    "marginal_prices",
    "portfolio_value",
]

MEMBERSHIP_SLACK = 1e-12


def as_vector(x, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"{name} has dimension {v.shape[0]}, expected {dim}")
    return v


class ReachableSet:
    """Base class. Subclasses implement ``_contains`` and may override the
    closed-form hooks, which raise :class:`Unsupported` by default."""

    dim: int

    def contains(self, R) -> bool:
        R = as_vector(R, self.dim, "reserves")
        if np.any(np.isnan(R)) or np.any(R < 0):
            return False
        return bool(self._contains(R))

    def _contains(self, R: np.ndarray) -> bool:
        raise NotImplementedError

    def phi_closed(self, R: np.ndarray) -> float:
        raise Unsupported(f"{type(self).__name__} has no closed-form phi")

    def grad_phi_closed(self, R: np.ndarray) -> np.ndarray:
        raise Unsupported(f"{type(self).__name__} has no closed-form gradient")

    def portfolio_value_closed(self, c: np.ndarray) -> Tuple[float, Optional[np.ndarray]]:
        raise Unsupported(f"{type(self).__name__} has no closed-form portfolio value")


class PsiSet(ReachableSet):
    """Superlevel set ``{R >= 0 : psi(R) >= level}`` of a quasiconcave function."""

    def __init__(self, psi: Callable[[np.ndarray], float], level: float, dim: int):
        self.psi = psi
        self.level = float(level)
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self._contains(np.zeros(self.dim)):
            raise ValueError("reachable set contains the zero vector")

    def _contains(self, R: np.ndarray) -> bool:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = float(self.psi(R))
        return bool(v - self.level >= -MEMBERSHIP_SLACK)


def contains(S: ReachableSet, R) -> bool:
    return S.contains(R)


def phi_bisect(S: ReachableSet, R, tol: Tolerance = DEFAULT_TOL) -> float:
    """Canonical trading function by bisection on ``lam -> R/lam in S``.

    The predicate is true for small ``lam`` and false for large ones. Returns
    0 when no positive scale works and ``inf`` when every scale does.
    """
    R = as_vector(R, S.dim, "reserves")
    if np.any(R < 0):
        raise ValueError("reserves must be nonnegative")

    def pred(lam: float) -> bool:
        return S.contains(R / lam)

    try:
        br = expand_bracket(pred, 1.0, lo_limit=1e-12)
    except NoBracketFound:
        return float("inf") if pred(1.0) else 0.0
    return bisect_boundary(pred, br, tol)


def phi(S: ReachableSet, R, tol: Tolerance = DEFAULT_TOL) -> float:
    R = as_vector(R, S.dim, "reserves")
    if np.any(R < 0):
        raise ValueError("reserves must be nonnegative")
    try:
        return float(S.phi_closed(R))
    except Unsupported:
        return phi_bisect(S, R, tol)


def scale_to_boundary(S: ReachableSet, R, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    R = as_vector(R, S.dim, "reserves")
    p = phi(S, R, tol)
    if p == 0:
        raise ZeroLiquidity(f"phi vanishes at {R.tolist()}")
    if not np.isfinite(p):
        raise CFMMError(f"phi is unbounded at {R.tolist()}")
    return R / p


def grad_phi(S: ReachableSet, R, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unnormalized gradient of the canonical trading function."""
    R = as_vector(R, S.dim, "reserves")
    if np.any(R <= 0):
        raise ValueError("gradient needs strictly positive reserves")
    try:
        return np.asarray(S.grad_phi_closed(R), dtype=float)
    except Unsupported:
        pass
    ftol = MACHINE_TOL
    f0 = phi(S, R, ftol)
    g = np.empty(S.dim)
    for i in range(S.dim):
        h = min(1e-6 * max(1.0, R[i]), 0.5 * R[i])
        e = np.zeros(S.dim)
        e[i] = h
        fp = phi(S, R + e, ftol)
        fm = phi(S, R - e, ftol)
        fwd = (fp - f0) / h
        bwd = (f0 - fm) / h
        scale = max(abs(fwd), abs(bwd), 1e-300)
        if abs(fwd - bwd) > 1e-4 * scale:
            raise NonSmoothPoint(f"one-sided slopes {bwd:.6g} and {fwd:.6g} differ in coordinate {i}")
        g[i] = (fp - fm) / (2 * h)
    return g


def marginal_prices(S: ReachableSet, R, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Gradient of phi normalized so the last asset (the numeraire) has price 1."""
    g = grad_phi(S, R, tol)
    if g[-1] > 0:
        return g / g[-1]
    # Numeraire has zero marginal price here; fall back to a simplex scaling.
    s = g.sum()
    if s <= 0:
        raise NonSmoothPoint("gradient vanishes")
    return g / s


def portfolio_value(S: ReachableSet, c, tol: Tolerance = DEFAULT_TOL) -> Tuple[float, Optional[np.ndarray]]:
    """``min c^T R`` over ``S`` with the minimizing reserves.

    The minimizer is ``None`` when the infimum is not attained (for example a
    zero price on an unbounded direction).
    """
    c = as_vector(c, S.dim, "prices")
    if np.any(c < 0) or not np.any(c > 0):
        raise ValueError("prices must be nonnegative and not all zero")
    try:
        return S.portfolio_value_closed(c)
    except Unsupported:
        pass
    from .duality import pv_and_minimizer

    return pv_and_minimizer(lambda R: phi(S, R, tol), c, tol)
