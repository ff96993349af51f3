"""Prediction-market cost functions and their reachable sets.

A cost function ``C`` and a reachable set ``S`` describe the same market:

    C(q) = min{a : a*1 - q in S}
    S    = {R >= 0 : C(-R) <= 0}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CFMMError, NoBracketFound
from .numerics import DEFAULT_TOL, Tolerance, bisect_boundary, expand_bracket, minimize_box
from .reachable import ReachableSet, as_vector

__all__ = [
    "CostFn",
    "CostSet",
    "lmsr_cost",
    "lmsr_cost_fn",
    "cost_from_set",
    "cost_fn_from_set",
    "set_from_cost",
    "expected_payoff",
]


@dataclass(frozen=True)
class CostFn:
    """Convex, nondecreasing, translation-invariant cost over share vectors."""

    fn: Callable[[np.ndarray], float] = field(repr=False)
    dim: int

    def __call__(self, q) -> float:
        return float(self.fn(as_vector(q, self.dim, "shares")))


def lmsr_cost(b: float, q) -> float:
    if not (b > 0):
        raise ValueError(f"b must be positive, got {b}")
    z = np.asarray(q, dtype=float) / b
    m = float(np.max(z))
    return b * (m + float(np.log(np.sum(np.exp(z - m)))))


def lmsr_cost_fn(b: float, n: int) -> CostFn:
    return CostFn(lambda q: lmsr_cost(b, q), int(n))


def cost_from_set(S: ReachableSet, q, tol: Tolerance = DEFAULT_TOL, *, clamp_nonnegative: bool = False) -> float:
    """Smallest ``a`` with ``a*1 - q`` in ``S``.

    ``a*1 - q`` must be nonnegative, so the search starts at ``max(q)``. By
    default ``a`` ranges over all reals, which keeps the result translation
    invariant. ``clamp_nonnegative=True`` restricts to ``a >= 0``.
    """
    q = as_vector(q, S.dim, "shares")
    base = float(np.max(q))
    if clamp_nonnegative:
        base = max(base, 0.0)
    ones = np.ones(S.dim)

    def member(t: float) -> bool:
        return S.contains((base + t) * ones - q)

    if member(0.0):
        return base
    try:
        br = expand_bracket(member, 1.0)
    except NoBracketFound:
        raise CFMMError("no multiple of the all-ones vector reaches the set") from None
    return base + bisect_boundary(member, br, tol)


def cost_fn_from_set(S: ReachableSet, tol: Tolerance = DEFAULT_TOL) -> CostFn:
    return CostFn(lambda q: cost_from_set(S, q, tol), S.dim)


class CostSet(ReachableSet):
    """Reachable set ``{R >= 0 : C(-R) <= 0}`` of a cost function."""

    def __init__(self, C: CostFn):
        self.C = C
        self.dim = C.dim
        if self._contains(np.zeros(self.dim)):
            raise ValueError("cost function is nonpositive at zero, so the set contains 0")

    def __repr__(self):
        return f"CostSet({self.C!r})"

    def _contains(self, R):
        return self.C(-R) <= 1e-12


def set_from_cost(C: CostFn) -> CostSet:
    return CostSet(C)


def expected_payoff(C: CostFn, q0, p, tol: Tolerance = DEFAULT_TOL, *, radius: float = 50.0) -> float:
    """Best expected profit ``max_q p^T q - (C(q0 + q) - C(q0))`` for belief ``p``.

    The purchase ``q`` is searched in ``[-radius, radius]^n``. Translation
    invariance makes the objective flat along the all-ones direction, so the
    last coordinate of ``q`` is fixed at 0.
    """
    q0 = as_vector(q0, C.dim, "shares")
    p = as_vector(p, C.dim, "probabilities")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-9:
        raise ValueError("p must be a probability vector")
    c0 = C(q0)

    def loss(x):
        q = np.append(x, 0.0)
        return (C(q0 + q) - c0) - float(p @ q)

    n = C.dim - 1
    _, val = minimize_box(loss, np.full(n, -radius), np.full(n, radius), tol, x0=np.zeros(n))
    return max(0.0, -val)
