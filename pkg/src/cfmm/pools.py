"""Reference pools with closed-form trading functions.

These give analytic answers for every generic routine: constant product,
a single concentrated-liquidity tick, the two-asset Curve invariant, and the
LMSR reachable set (no closed-form phi, so phi goes through bisection; its
portfolio value is closed form).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .numerics import DEFAULT_TOL, Tolerance
from .reachable import PsiSet, ReachableSet, as_vector, phi

__all__ = [
    "UniswapV2",
    "UniswapV3Tick",
    "CurveTwoAsset",
    "LMSRSet",
    "curve_phi",
    "pool_phi_closed",
    "pool_pv_closed",
    "pool_grad_phi",
]


class UniswapV2(PsiSet):
    """Constant product pool ``R1 R2 >= k``."""

    def __init__(self, k: float = 1.0):
        if not (k > 0):
            raise ValueError(f"k must be positive, got {k}")
        self.k = float(k)
        super().__init__(lambda R: R[0] * R[1], self.k, 2)

    def __repr__(self):
        return f"UniswapV2(k={self.k!r})"

    def phi_closed(self, R):
        return math.sqrt(R[0] * R[1] / self.k)

    def grad_phi_closed(self, R):
        s = 2.0 * math.sqrt(self.k * R[0] * R[1])
        return np.array([R[1] / s, R[0] / s])

    def portfolio_value_closed(self, c):
        c1, c2 = float(c[0]), float(c[1])
        if c1 == 0 or c2 == 0:
            return 0.0, None
        R = np.array([math.sqrt(self.k * c2 / c1), math.sqrt(self.k * c1 / c2)])
        return 2.0 * math.sqrt(self.k * c1 * c2), R


class UniswapV3Tick(PsiSet):
    """One concentrated-liquidity tick ``(R1 + alpha)(R2 + beta) >= k``."""

    def __init__(self, alpha: float, beta: float, k: float):
        alpha, beta, k = float(alpha), float(beta), float(k)
        if alpha < 0 or beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        if not (k > alpha * beta):
            raise ValueError(f"need k > alpha*beta, got k={k}, alpha*beta={alpha * beta}")
        self.alpha, self.beta, self.k = alpha, beta, k
        super().__init__(lambda R: (R[0] + alpha) * (R[1] + beta), k, 2)

    def __repr__(self):
        return f"UniswapV3Tick(alpha={self.alpha!r}, beta={self.beta!r}, k={self.k!r})"

    def phi_closed(self, R):
        a, b = self.alpha, self.beta
        D = self.k - a * b
        B = b * R[0] + a * R[1]
        return (B + math.sqrt(B * B + 4.0 * D * R[0] * R[1])) / (2.0 * D)

    def grad_phi_closed(self, R):
        a, b = self.alpha, self.beta
        D = self.k - a * b
        B = b * R[0] + a * R[1]
        root = math.sqrt(B * B + 4.0 * D * R[0] * R[1])
        g1 = (b + (B * b + 2.0 * D * R[1]) / root) / (2.0 * D)
        g2 = (a + (B * a + 2.0 * D * R[0]) / root) / (2.0 * D)
        return np.array([g1, g2])

    def portfolio_value_closed(self, c):
        a, b, k = self.alpha, self.beta, self.k
        c1, c2 = float(c[0]), float(c[1])
        # Corner where only asset 1 is held: the tangency point would need
        # negative R2.
        if c1 * k <= c2 * b * b:
            if b == 0:
                return 0.0, None
            return c1 * (k / b - a), np.array([k / b - a, 0.0])
        if c1 * a * a >= c2 * k:
            if a == 0:
                return 0.0, None
            return c2 * (k / a - b), np.array([0.0, k / a - b])
        x = math.sqrt(k * c2 / c1)
        y = math.sqrt(k * c1 / c2)
        return 2.0 * math.sqrt(k * c1 * c2) - a * c1 - b * c2, np.array([x - a, y - b])


def _curve_cubic(lam, alpha, p, q):
    return -alpha * lam ** 3 - p * lam + q


def curve_phi(R1: float, R2: float, alpha: float, k: float) -> float:
    """Positive root of ``-alpha l^3 - k R1 R2 l + R1 R2 (R1 + R2) = 0``.

    Uses the real Cardano root when the cubic has a single real root and
    checks the residual; otherwise falls back to a bracketed root search.
    """
    prod = R1 * R2
    if prod <= 0:
        return 0.0
    p = k * prod
    q = prod * (R1 + R2)
    lam = float("nan")
    if p >= 0:
        pa, qa = p / alpha, q / alpha
        disc = 0.25 * qa * qa + pa ** 3 / 27.0
        w = np.cbrt(0.5 * qa + math.sqrt(disc))
        # Algebraically w - pa/(3w), rearranged to avoid cancellation.
        v = pa / (3.0 * w)
        lam = qa / (w * w + pa / 3.0 + v * v)
    scale = max(q, alpha * abs(lam) ** 3 if np.isfinite(lam) else 0.0, abs(p * lam) if np.isfinite(lam) else 0.0)
    if not (np.isfinite(lam) and lam > 0 and abs(_curve_cubic(lam, alpha, p, q)) <= 1e-9 * scale):
        hi = max(1.0, (q / alpha) ** (1.0 / 3.0))
        while _curve_cubic(hi, alpha, p, q) > 0:
            hi *= 2.0
        lam = brentq(_curve_cubic, 0.0, hi, args=(alpha, p, q), xtol=1e-300, rtol=8.9e-16, maxiter=500)
    return float(lam)


class CurveTwoAsset(PsiSet):
    """Two-asset Curve invariant ``R1 + R2 - alpha/(R1 R2) >= k``."""

    def __init__(self, alpha: float, k: float):
        alpha, k = float(alpha), float(k)
        if not (alpha > 0):
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.alpha, self.k = alpha, k

        def psi(R):
            prod = R[0] * R[1]
            if prod <= 0:
                return -math.inf
            return R[0] + R[1] - alpha / prod

        super().__init__(psi, k, 2)

    def __repr__(self):
        return f"CurveTwoAsset(alpha={self.alpha!r}, k={self.k!r})"

    def phi_closed(self, R):
        return curve_phi(float(R[0]), float(R[1]), self.alpha, self.k)

    def grad_phi_closed(self, R):
        R1, R2 = float(R[0]), float(R[1])
        lam = curve_phi(R1, R2, self.alpha, self.k)
        # Implicit differentiation of the cubic F(lam, R) = 0.
        f_lam = -3.0 * self.alpha * lam * lam - self.k * R1 * R2
        f_1 = R2 * (2.0 * R1 + R2 - self.k * lam)
        f_2 = R1 * (R1 + 2.0 * R2 - self.k * lam)
        return np.array([-f_1 / f_lam, -f_2 / f_lam])


class LMSRSet(PsiSet):
    """Reachable set ``sum exp(-R_i / b) <= 1`` of the LMSR market maker."""

    def __init__(self, b: float = 1.0, n: int = 2):
        b, n = float(b), int(n)
        if not (b > 0):
            raise ValueError(f"b must be positive, got {b}")
        if n < 2:
            raise ValueError("LMSR needs at least two outcomes")
        self.b, self.n = b, n
        super().__init__(lambda R: -float(np.sum(np.exp(-R / b))), -1.0, n)

    def __repr__(self):
        return f"LMSRSet(b={self.b!r}, n={self.n!r})"

    def portfolio_value_closed(self, c):
        # Minimizer R_i = b log(s / c_i) with s = sum(c); a zero price sends
        # its coordinate to infinity, so the infimum is not attained.
        c = np.asarray(c, dtype=float)
        pos = c > 0
        if not np.any(pos):
            return 0.0, None
        s = float(np.sum(c))
        v = self.b * float(np.sum(c[pos] * np.log(s / c[pos])))
        if not np.all(pos):
            return v, None
        return v, self.b * np.log(s / c)


def pool_phi_closed(pool: ReachableSet, R, tol: Tolerance = DEFAULT_TOL) -> float:
    """Closed-form phi; pools without one (LMSR) go through bisection."""
    return phi(pool, as_vector(R, pool.dim, "reserves"), tol)


def pool_pv_closed(pool: ReachableSet, c) -> float:
    c = as_vector(c, pool.dim, "prices")
    if np.any(c < 0):
        raise ValueError("prices must be nonnegative")
    return float(pool.portfolio_value_closed(c)[0])


def pool_grad_phi(pool: ReachableSet, R) -> np.ndarray:
    R = as_vector(R, pool.dim, "reserves")
    return np.asarray(pool.grad_phi_closed(R), dtype=float)
