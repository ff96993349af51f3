"""Optimal routing across several trading sets through the dual problem.

The primal problem is

    maximize U(Psi)  subject to  Psi = sum_i A_i delta_i,  delta_i in T_i

and its dual is ``minimize Ubar(nu) + sum_i arb_i(A_i^T nu)``. For the
arbitrage utility ``U(Psi) = c^T Psi`` on ``Psi >= 0`` the conjugate ``Ubar``
is 0 for ``nu >= c`` and ``+inf`` elsewhere, so the dual is a box-constrained
minimization of summed arbitrage profits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .compose import AssetMapping
from .errors import DimensionMismatch, NotConverged
from .numerics import DEFAULT_TOL, Tolerance, minimize_positive_orthant
from .reachable import as_vector
from .trade import TradingSet, arb, marginal_price_cone_contains

__all__ = [
    "Arbitrage",
    "RoutingInstance",
    "RoutingSolution",
    "dual_objective",
    "primal_value",
    "route",
    "verify_optimality",
]

INF = float("inf")


@dataclass(frozen=True)
class Arbitrage:
    """Maximize ``c^T Psi``; with ``nonnegative`` the net flow must be ``>= 0``.

    Without the constraint the utility is linear on all of ``R^n`` and its
    conjugate is finite only at ``nu = c``.
    """

    prices: np.ndarray
    nonnegative: bool = True

    def __post_init__(self):
        c = as_vector(self.prices, name="prices")
        if np.any(c < 0) or not np.any(c > 0):
            raise ValueError("prices must be nonnegative and not all zero")
        object.__setattr__(self, "prices", c)

    def conjugate(self, nu: np.ndarray) -> float:
        c = self.prices
        if self.nonnegative:
            return 0.0 if np.all(nu >= c * (1 - 1e-15)) else INF
        return 0.0 if np.allclose(nu, c, rtol=1e-15, atol=0.0) else INF

    def utility(self, psi: np.ndarray) -> float:
        return float(self.prices @ psi)


@dataclass(frozen=True)
class RoutingInstance:
    n: int
    pools: Tuple[Tuple[TradingSet, AssetMapping], ...]
    utility: Arbitrage

    def __post_init__(self):
        object.__setattr__(self, "pools", tuple((T, m) for T, m in self.pools))
        if self.utility.prices.shape[0] != self.n:
            raise DimensionMismatch("utility prices do not match the number of assets")
        for T, m in self.pools:
            if m.n != self.n:
                raise DimensionMismatch(f"mapping targets {m.n} assets, instance has {self.n}")
            if len(m.local_to_global) != T.dim:
                raise DimensionMismatch("mapping length differs from the pool's asset count")


@dataclass
class RoutingSolution:
    trades: List[np.ndarray]
    psi: np.ndarray
    primal: float
    dual: float
    nu: np.ndarray
    gap: float
    violation: float
    converged: bool = field(default=True)


def dual_objective(instance: RoutingInstance, nu, tol: Tolerance = DEFAULT_TOL) -> float:
    nu = as_vector(nu, instance.n, "dual prices")
    u = instance.utility.conjugate(nu)
    if not np.isfinite(u):
        return INF
    total = u
    for T, m in instance.pools:
        total += arb(T, m.restrict(nu), tol)[0]
    return float(total)


def primal_value(instance: RoutingInstance, trades: Sequence[np.ndarray]) -> Tuple[np.ndarray, float, float]:
    """Net flow, utility ``c^T Psi`` and the largest violation of ``Psi >= 0``."""
    psi = np.zeros(instance.n)
    for (T, m), d in zip(instance.pools, trades):
        psi = psi + m.embed(d)
    violation = max(0.0, -float(np.min(psi))) if instance.utility.nonnegative else 0.0
    return psi, instance.utility.utility(psi), violation


def _net_flow(instance: RoutingInstance, nu: np.ndarray, tol: Tolerance) -> np.ndarray:
    psi = np.zeros(instance.n)
    for T, m in instance.pools:
        psi = psi + m.embed(arb(T, m.restrict(nu), tol)[1])
    return psi


def _polish(instance: RoutingInstance, nu: np.ndarray, lower: np.ndarray, upper: np.ndarray, tol: Tolerance,
            sweeps: int = 50) -> np.ndarray:
    """Refine ``nu`` with the dual's gradient, which is the net flow ``Psi``.

    Line searches on function values pin ``nu`` only to about the square
    root of the value tolerance. Here each coordinate instead solves
    ``Psi_j = 0`` (or sits at its lower bound when ``Psi_j >= 0`` there),
    which is exact complementary slackness for ``Psi >= 0``.
    """
    nu = nu.copy()
    for _ in range(sweeps):
        moved = 0.0
        for j in range(instance.n):
            def flow(t):
                v = nu.copy()
                v[j] = t
                return _net_flow(instance, v, tol)[j]

            if flow(lower[j]) >= 0:
                t = lower[j]
            elif flow(upper[j]) < 0:
                t = upper[j]
            else:
                t = brentq(flow, lower[j], upper[j], xtol=1e-300, rtol=8.9e-16, maxiter=500)
            moved = max(moved, abs(t - nu[j]) / nu[j])
            nu[j] = t
        if moved <= 4e-16:
            break
    return nu


def route(instance: RoutingInstance, tol: Tolerance = DEFAULT_TOL, *, gap_tol: float = 1e-8,
          nu_max_factor: float = 1e6) -> RoutingSolution:
    """Solve the dual by coordinate descent over ``nu`` in ``[c, c * nu_max_factor]``.

    Trades are recovered as each pool's arbitrage solution at ``nu*``. The
    primal utility is ``c^T Psi`` for the recovered flow, reported together
    with how far ``Psi`` dips below zero. Raises :class:`NotConverged`, with
    the solution attached, when ``dual - primal`` exceeds ``gap_tol`` or the
    flow violates nonnegativity by more than ``gap_tol``.
    """
    c = instance.utility.prices
    if instance.utility.nonnegative:
        floor = np.maximum(c, 1e-12 * float(np.max(c)))
        nu, _ = minimize_positive_orthant(lambda v: dual_objective(instance, v, tol), instance.n, tol,
                                          x0=floor, lower=floor, upper=floor * nu_max_factor)
        nu = _polish(instance, nu, floor, floor * nu_max_factor, tol)
    else:
        nu = c.copy()
    dual = dual_objective(instance, nu, tol)
    trades = [arb(T, m.restrict(nu), tol)[1] for T, m in instance.pools]
    psi, primal, violation = primal_value(instance, trades)
    gap = dual - primal
    converged = abs(gap) <= gap_tol * max(1.0, abs(dual)) and violation <= gap_tol
    sol = RoutingSolution(trades, psi, primal, dual, nu, gap, violation, converged)
    if not converged:
        raise NotConverged(f"duality gap {gap:.3e}, flow violation {violation:.3e}", solution=sol)
    return sol


def verify_optimality(instance: RoutingInstance, solution: RoutingSolution, tol: float = 1e-6) -> bool:
    """Feasibility, a closed duality gap, and ``A_i^T nu`` in each pool's price cone."""
    for (T, _), d in zip(instance.pools, solution.trades):
        if not T.contains(d):
            return False
    psi, primal, violation = primal_value(instance, solution.trades)
    if violation > tol:
        return False
    dual = dual_objective(instance, solution.nu)
    if not (abs(dual - primal) <= tol * max(1.0, abs(dual))):
        return False
    for (T, m), d in zip(instance.pools, solution.trades):
        if not marginal_price_cone_contains(T, d, m.restrict(solution.nu), tol):
            return False
    return True
