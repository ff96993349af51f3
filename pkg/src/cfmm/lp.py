"""Liquidity provision: proportional reserve changes and share weights.

Adding ``nu * R`` to the reserves (``nu > 0``) keeps prices fixed because the
canonical trading function is homogeneous. The depositor's weight becomes
``(w_j + nu) / (1 + nu)`` and everyone else is diluted by ``1 / (1 + nu)``.
Removal is the same formula with ``nu -> -nu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, Tuple

import numpy as np

from .errors import NonPositiveFraction, RemoveExceedsShare
from .reachable import ReachableSet, as_vector, marginal_prices

__all__ = [
    "ShareLedger",
    "LiquidityEvent",
    "apply_liquidity",
    "prices_match",
    "price_invariance_check",
]


@dataclass(frozen=True)
class ShareLedger:
    weights: Dict[Hashable, float] = field(default_factory=dict)

    def __post_init__(self):
        w = {k: float(v) for k, v in self.weights.items()}
        if any(v < 0 for v in w.values()):
            raise ValueError("weights must be nonnegative")
        if w and abs(sum(w.values()) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {sum(w.values())!r}, not 1")
        object.__setattr__(self, "weights", w)

    def weight(self, provider) -> float:
        return self.weights.get(provider, 0.0)

    def total(self) -> float:
        return float(sum(self.weights.values()))


@dataclass(frozen=True)
class LiquidityEvent:
    provider: Hashable
    fraction: float
    direction: str = "add"

    def __post_init__(self):
        if self.direction not in ("add", "remove"):
            raise ValueError(f"direction must be 'add' or 'remove', got {self.direction!r}")
        if not (self.fraction > 0):
            raise NonPositiveFraction(f"fraction must be positive, got {self.fraction}")


def apply_liquidity(ledger: ShareLedger, R, event: LiquidityEvent) -> Tuple[ShareLedger, np.ndarray]:
    """New ledger and reserves after a proportional deposit or withdrawal."""
    R = as_vector(R, name="reserves")
    nu = float(event.fraction)
    if event.direction == "remove":
        wj = ledger.weight(event.provider)
        if nu > wj or nu >= 1.0:
            raise RemoveExceedsShare(f"cannot remove {nu} with a share of {wj}")
        nu = -nu
    elif not ledger.weights:
        # First deposit into an empty pool: the depositor owns everything.
        return ShareLedger({event.provider: 1.0}), (1.0 + nu) * R

    scale = 1.0 + nu
    w = {k: v / scale for k, v in ledger.weights.items()}
    w[event.provider] = w.get(event.provider, 0.0) + nu / scale
    for k, v in w.items():
        if v < 0:
            # Only rounding can push a fully withdrawn share below zero.
            w[k] = 0.0
    total = sum(w.values())
    if abs(total - 1.0) > 1e-13:
        w = {k: v / total for k, v in w.items()}
    return ShareLedger(w), scale * R


def prices_match(S: ReachableSet, R_before, R_after, tol: float = 1e-6) -> bool:
    """Whether normalized marginal prices agree at two reserve vectors."""
    p0 = marginal_prices(S, R_before)
    p1 = marginal_prices(S, R_after)
    return bool(np.all(np.abs(p1 - p0) <= tol * np.maximum(1.0, np.abs(p0))))


def price_invariance_check(S: ReachableSet, R, nu: float, tol: float = 1e-6) -> bool:
    """Prices at ``(1 + nu) R`` equal prices at ``R``."""
    R = as_vector(R, S.dim, "reserves")
    return prices_match(S, R, (1.0 + nu) * R, tol)
