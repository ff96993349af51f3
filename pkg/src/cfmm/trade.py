"""Single-trade CFMMs with fees.

A trade ``delta`` is signed: positive entries are received by the trader,
negative entries are tendered. A trading set ``T`` contains 0, is convex and
downward closed, and can only pay out what the pool holds.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, InfeasibleFirstTrade, NoBracketFound, NotInSet, Unsupported
from .numerics import (DEFAULT_TOL, MACHINE_TOL, Bracket, Tolerance, bisect_boundary, expand_bracket,
                       minimize_positive_orthant, minimize_scalar_convex)
from .pools import UniswapV2, UniswapV3Tick
from .reachable import PsiSet, ReachableSet, as_vector

__all__ = [
    "TradingSet",
    "FeePoolTradingSet",
    "ReachableTradingSet",
    "SumTradingSet",
    "trade_feasible",
    "trade_phi",
    "v2_fee_phi_closed",
    "arb",
    "in_no_trade_cone",
    "marginal_price_cone_contains",
    "bounded_liquidity",
    "trading_set_from_reachable",
    "path_independence_check",
]

INF = float("inf")


class TradingSet:
    """Base class. ``bound`` returns the reserves that cap any payout."""

    dim: int

    def contains(self, delta) -> bool:
        d = as_vector(delta, self.dim, "trade")
        if not np.all(np.isfinite(d)):
            return False
        return bool(self._contains(d))

    def _contains(self, d: np.ndarray) -> bool:
        raise NotImplementedError

    def bound(self) -> Optional[np.ndarray]:
        return None

    def after(self, delta) -> "TradingSet":
        """Trading set once ``delta`` has executed."""
        raise Unsupported(f"{type(self).__name__} does not track state")

    def max_output(self, i: int, j: int, x: float) -> float:
        """Most of asset ``i`` receivable for tendering ``x`` of asset ``j``."""
        R = self.bound()
        if R is None:
            raise Unsupported("max_output needs a finite bound")

        def ok(y):
            d = np.zeros(self.dim)
            d[i], d[j] = y, -x
            return self.contains(d)

        if ok(R[i]):
            return float(R[i])
        if not ok(0.0):
            return 0.0
        return bisect_boundary(ok, Bracket(0.0, float(R[i])), MACHINE_TOL)


class FeePoolTradingSet(TradingSet):
    """Trades against a pool with fee ``1 - gamma`` on the tendered side.

    ``delta`` is accepted when ``psi(R + gamma*delta_minus - delta_plus) >=
    psi(R)`` and the post-trade reserves stay nonnegative.
    """

    def __init__(self, pool: PsiSet, R, gamma: float = 1.0):
        R = as_vector(R, pool.dim, "reserves")
        if not (0.0 <= gamma <= 1.0):
            raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
        if not pool.contains(R):
            raise NotInSet(f"reserves {R.tolist()} are outside the pool's reachable set")
        self.pool = pool
        self.R = R
        self.gamma = float(gamma)
        self.dim = pool.dim
        self.level = float(pool.psi(R))

    def __repr__(self):
        return f"FeePoolTradingSet({self.pool!r}, R={self.R.tolist()}, gamma={self.gamma!r})"

    def bound(self):
        return self.R.copy()

    def _contains(self, d):
        post = self.R + self.gamma * np.maximum(-d, 0.0) - np.maximum(d, 0.0)
        if np.any(post < 0):
            return False
        with np.errstate(divide="ignore", invalid="ignore"):
            return bool(float(self.pool.psi(post)) >= self.level)

    def after(self, delta):
        return FeePoolTradingSet(self.pool, self.R - as_vector(delta, self.dim), self.gamma)

    def max_output(self, i, j, x):
        R, g = self.R, self.gamma
        if isinstance(self.pool, UniswapV2):
            return float(R[i] * g * x / (R[j] + g * x)) if x > 0 else 0.0
        if isinstance(self.pool, UniswapV3Tick):
            shift = (self.pool.alpha, self.pool.beta)
            y = (R[i] + shift[i]) * g * x / (R[j] + shift[j] + g * x) if x > 0 else 0.0
            return float(min(y, R[i]))
        return super().max_output(i, j, x)

    def best_tender(self, i, j, ci, cj):
        """Profit-maximizing tender of asset ``j`` for asset ``i`` (v2 and v3 only).

        Solves ``ci * y'(x) = cj`` for the hyperbolic payout curve, then
        clips at the point where the pool runs out of asset ``i``.
        """
        R, g = self.R, self.gamma
        if isinstance(self.pool, UniswapV2):
            a = (0.0, 0.0)
        elif isinstance(self.pool, UniswapV3Tick):
            a = (self.pool.alpha, self.pool.beta)
        else:
            return None
        if g == 0:
            return 0.0
        A, B = R[i] + a[i], R[j] + a[j]
        x = (math.sqrt(ci * g * A * B / cj) - B) / g
        if a[i] > 0:
            x = min(x, R[i] * B / (g * a[i]))
        return max(x, 0.0)


class ReachableTradingSet(TradingSet):
    """Path-independent trading set ``T = R - S``."""

    def __init__(self, S: ReachableSet, R):
        R = as_vector(R, S.dim, "reserves")
        if not S.contains(R):
            raise NotInSet(f"reserves {R.tolist()} are outside the reachable set")
        self.S = S
        self.R = R
        self.dim = S.dim

    def __repr__(self):
        return f"ReachableTradingSet({self.S!r}, R={self.R.tolist()})"

    def bound(self):
        return self.R.copy()

    def _contains(self, d):
        post = self.R - d
        return bool(np.all(post >= 0) and self.S.contains(post))

    def after(self, delta):
        return ReachableTradingSet(self.S, self.R - as_vector(delta, self.dim))


class SumTradingSet(TradingSet):
    """Minkowski sum of trading sets on the same assets.

    Arbitrage adds across the summands. Membership uses that fact: ``delta``
    is in the sum iff ``c^T delta <= sum_i arb_i(c)`` for all prices ``c``.
    """

    def __init__(self, children: Sequence[TradingSet], tol: Tolerance = DEFAULT_TOL):
        children = list(children)
        if not children:
            raise ValueError("sum needs at least one trading set")
        dims = {T.dim for T in children}
        if len(dims) != 1:
            raise DimensionMismatch(f"summands have dimensions {sorted(dims)}")
        self.children = children
        self.dim = children[0].dim
        self.tol = tol

    def bound(self):
        bounds = [T.bound() for T in self.children]
        if any(b is None for b in bounds):
            return None
        return np.sum(bounds, axis=0)

    def _contains(self, d):
        if np.all(d <= 0):
            return True

        def slack(c):
            return float(c @ d) - sum(arb(T, c, self.tol)[0] for T in self.children)

        _, worst = minimize_positive_orthant(lambda c: -slack(c), self.dim, self.tol, simplex=True)
        return -worst <= 1e-9 * max(1.0, float(np.max(np.abs(d))))


def trade_feasible(T: TradingSet, delta) -> bool:
    return T.contains(delta)


def trade_phi(T: TradingSet, delta, tol: Tolerance = DEFAULT_TOL) -> float:
    """``inf{lam > 0 : delta/lam in T}``, with ``inf`` for no feasible scale.

    Scales beyond ``1e10 * max|delta| / max(bound)`` count as infeasible:
    past that point ``delta/lam`` is below floating-point resolution of the
    reserves and membership only reflects rounding.
    """
    d = as_vector(delta, T.dim, "trade")
    if np.all(d <= 0):
        return 0.0
    R = T.bound()
    scale = float(np.max(R)) if R is not None and np.max(R) > 0 else 1.0
    hi_limit = 1e10 * float(np.max(np.abs(d))) / scale
    lo_limit = 1e-12 * float(np.max(np.abs(d))) / scale

    def ok(lam):
        return T.contains(d / lam)

    seed = min(max(1.0, lo_limit), hi_limit)
    try:
        br = expand_bracket(ok, seed, lo_limit=lo_limit, hi_limit=hi_limit)
    except NoBracketFound:
        return 0.0 if ok(seed) else INF
    return bisect_boundary(ok, br, tol)


def v2_fee_phi_closed(R, k: float, gamma: float, delta) -> float:
    """Closed-form trading function of a constant-product pool with fees.

    With ``d = gamma*delta_minus - delta_plus`` the value is
    ``-d1 d2 / (R1 d2 + R2 d1)`` when the denominator is positive and
    ``inf`` otherwise. ``k`` does not enter: the fee set keeps the current
    product ``R1 R2``, not the pool's minimum level.
    """
    R = as_vector(R, 2, "reserves")
    d = as_vector(delta, 2, "trade")
    if np.all(d <= 0):
        return 0.0
    e = gamma * np.maximum(-d, 0.0) - np.maximum(d, 0.0)
    denom = R[0] * e[1] + R[1] * e[0]
    if not (denom > 0):
        return INF
    return max(0.0, -e[0] * e[1] / denom)


def _feasible_output(T: TradingSet, i: int, j: int, x: float, y: float) -> float:
    """Shave ``y`` by a few ulps until the closed-form boundary trade is a member."""
    d = np.zeros(T.dim)
    d[j] = -x
    step = 1.0
    for _ in range(64):
        d[i] = y
        if T.contains(d):
            return y
        y = max(0.0, y - step * math.ulp(y)) if y > 0 else 0.0
        step *= 2.0
    return 0.0


def _arb_pair(T: TradingSet, c: np.ndarray, i: int, j: int) -> Tuple[float, float, float]:
    """Best trade receiving asset ``i`` and tendering asset ``j``."""
    R = T.bound()
    if c[i] == 0:
        return 0.0, 0.0, 0.0
    if c[j] == 0:
        x = 1e12 * max(1.0, float(np.max(R)))
        y = T.max_output(i, j, x)
        return c[i] * y, x, y
    x_max = c[i] * R[i] / c[j]
    if not (x_max > 0):
        return 0.0, 0.0, 0.0
    closed = getattr(T, "best_tender", None)
    x = closed(i, j, c[i], c[j]) if closed is not None else None
    if x is not None:
        y = _feasible_output(T, i, j, x, T.max_output(i, j, x))
        profit = c[i] * y - c[j] * x
        return (profit, x, y) if profit > 0 else (0.0, 0.0, 0.0)
    x, neg = minimize_scalar_convex(lambda x: c[j] * x - c[i] * T.max_output(i, j, x), Bracket(0.0, x_max),
                                    Tolerance(rel=1e-13, abs=1e-15, max_iter=500))
    if -neg <= 0:
        return 0.0, 0.0, 0.0
    return -neg, x, T.max_output(i, j, x)


def arb(T: TradingSet, c, tol: Tolerance = DEFAULT_TOL) -> Tuple[float, Optional[np.ndarray]]:
    """``sup{c^T delta : delta in T}`` and a maximizing trade.

    Negative prices give ``inf`` with no trade. Sums of trading sets add
    their children's answers; other sets must have two assets.
    """
    c = as_vector(c, T.dim, "prices")
    if np.any(c < 0):
        return INF, None
    if isinstance(T, SumTradingSet):
        parts = [arb(child, c, tol) for child in T.children]
        if any(t is None for _, t in parts):
            return INF, None
        return float(sum(p for p, _ in parts)), np.sum([t for _, t in parts], axis=0)
    if T.dim != 2:
        raise Unsupported("direct arbitrage is implemented for two-asset trading sets")
    best, trade = 0.0, np.zeros(2)
    for i, j in ((0, 1), (1, 0)):
        profit, x, y = _arb_pair(T, c, i, j)
        if profit > best:
            best = profit
            trade = np.zeros(2)
            trade[i], trade[j] = y, -x
    return float(best), trade


def in_no_trade_cone(T: TradingSet, c, tol: float = 1e-8) -> bool:
    c = as_vector(c, T.dim, "prices")
    if np.any(c < 0):
        return False
    R = T.bound()
    ref = abs(float(c @ R)) if R is not None else 0.0
    return arb(T, c)[0] <= tol * (1.0 + ref)


def marginal_price_cone_contains(T: TradingSet, delta, c, tol: float = 1e-8) -> bool:
    """Whether ``delta`` is an optimal trade at prices ``c``."""
    d = as_vector(delta, T.dim, "trade")
    c = as_vector(c, T.dim, "prices")
    if not T.contains(d):
        raise NotInSet("trade is not in the trading set")
    value = float(c @ d)
    return abs(value - arb(T, c)[0]) <= tol * (1.0 + abs(value))


def bounded_liquidity(T: TradingSet, asset: int, tol: Tolerance = DEFAULT_TOL) -> Optional[Tuple[float, bool]]:
    """Supremum of the amount of ``asset`` receivable, as ``(value, attained)``.

    Every other asset is tendered up to a large cap ``X``. If the payout at
    ``X`` equals the payout at ``X/2`` the supremum is attained; otherwise the
    value is extrapolated from the ``1/X`` tail and reported as not attained.
    Returns ``None`` for sets without a finite bound.
    """
    R = T.bound()
    if R is None:
        return None
    if not (0 <= asset < T.dim):
        raise IndexError(f"asset {asset} out of range")
    if R[asset] == 0:
        return 0.0, True
    cap = 1e6 * max(1.0, float(np.max(R)))

    def payout(x):
        if T.dim == 2:
            return T.max_output(asset, 1 - asset, x)

        def ok(y):
            d = np.full(T.dim, -x)
            d[asset] = y
            return T.contains(d)

        if ok(R[asset]):
            return float(R[asset])
        return bisect_boundary(ok, Bracket(0.0, float(R[asset])), MACHINE_TOL)

    y_full, y_half = payout(cap), payout(cap / 2)
    if abs(y_full - y_half) <= 1e-14 * max(1.0, y_full):
        return y_full, True
    return min(2.0 * y_full - y_half, float(R[asset])), False


def trading_set_from_reachable(S: ReachableSet, R) -> ReachableTradingSet:
    return ReachableTradingSet(S, R)


def path_independence_check(make_T: Callable[[np.ndarray], TradingSet], R, delta1, delta2,
                            tol: float = 1e-9) -> bool:
    """Whether trading ``delta1`` then ``delta2`` is equivalent to ``delta1 + delta2``.

    A mismatch only counts if it persists when ``delta2`` is scaled by
    ``1 - tol`` and ``1 + tol``, so rounding at the boundary is ignored.
    """
    R = as_vector(R)
    d1 = as_vector(delta1, R.shape[0], "trade")
    d2 = as_vector(delta2, R.shape[0], "trade")
    T0 = make_T(R)
    if not T0.contains(d1):
        raise InfeasibleFirstTrade("first trade is not feasible")
    T1 = make_T(R - d1)
    for s in (1.0, 1.0 - tol, 1.0 + tol):
        if T1.contains(s * d2) == T0.contains(d1 + s * d2):
            return True
    return False
