"""Building reachable sets out of other reachable sets.

Scaling, Minkowski sums, intersections and asset-selection images all give
reachable sets again. Their portfolio values compose as

    V_{aS}      = a V_S
    V_{S + S'}  = V_S + V_S'
    V_{A S}     = V_S(A^T c)

which is how sum membership is decided: ``R`` is in ``S + S'`` iff
``c^T R >= V_S(c) + V_S'(c)`` for every price vector ``c``.

Asset indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, InvalidScale, NonSmoothPoint
from .numerics import DEFAULT_TOL, Tolerance, minimize_positive_orthant
from .reachable import ReachableSet, as_vector, grad_phi, phi, portfolio_value
from .duality import phi_from_pv

__all__ = [
    "AssetMapping",
    "ScaledSet",
    "SumSet",
    "IntersectionSet",
    "AssetImageSet",
    "scale_set",
    "sum_sets",
    "intersect_sets",
    "asset_image",
    "aggregate",
    "composed_pv",
]


@dataclass(frozen=True)
class AssetMapping:
    """Injective map from a pool's local asset slots into ``n`` global assets."""

    local_to_global: Tuple[int, ...]
    n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.local_to_global)
        object.__setattr__(self, "local_to_global", idx)
        if len(set(idx)) != len(idx):
            raise IndexOutOfRange(f"mapping repeats an asset: {idx}")
        for i in idx:
            if not (0 <= i < self.n):
                raise IndexOutOfRange(f"asset index {i} outside 0..{self.n - 1}")

    @classmethod
    def identity(cls, n: int) -> "AssetMapping":
        return cls(tuple(range(n)), n)

    @property
    def index(self) -> np.ndarray:
        return np.asarray(self.local_to_global, dtype=int)

    def restrict(self, x: np.ndarray) -> np.ndarray:
        """``A^T x``: pick out the local coordinates."""
        return np.asarray(x, dtype=float)[self.index]

    def embed(self, x: np.ndarray) -> np.ndarray:
        """``A x``: scatter local coordinates into a global zero vector."""
        out = np.zeros(self.n)
        out[self.index] = x
        return out


class ScaledSet(ReachableSet):
    def __init__(self, alpha: float, child: ReachableSet):
        if not (alpha > 0) or not np.isfinite(alpha):
            raise InvalidScale(f"scale must be positive and finite, got {alpha}")
        self.alpha = float(alpha)
        self.child = child
        self.dim = child.dim

    def __repr__(self):
        return f"ScaledSet({self.alpha!r}, {self.child!r})"

    def _contains(self, R):
        return self.child.contains(R / self.alpha)

    def phi_closed(self, R):
        return phi(self.child, R) / self.alpha

    def grad_phi_closed(self, R):
        return grad_phi(self.child, R) / self.alpha

    def portfolio_value_closed(self, c):
        v, R = portfolio_value(self.child, c)
        return self.alpha * v, (None if R is None else self.alpha * R)


class SumSet(ReachableSet):
    """Minkowski sum, with membership decided by the summed portfolio value."""

    def __init__(self, children: Sequence[ReachableSet], tol: Tolerance = DEFAULT_TOL):
        children = list(children)
        if not children:
            raise ValueError("sum needs at least one set")
        dims = {S.dim for S in children}
        if len(dims) != 1:
            raise DimensionMismatch(f"summands have dimensions {sorted(dims)}")
        self.children = children
        self.dim = children[0].dim
        self.tol = tol

    def __repr__(self):
        return f"SumSet({self.children!r})"

    def value(self, c) -> float:
        c = np.asarray(c, dtype=float)
        return float(sum(portfolio_value(S, c, self.tol)[0] for S in self.children))

    def _contains(self, R):
        _, gap = minimize_positive_orthant(lambda c: float(c @ R) - self.value(c), self.dim, self.tol, simplex=True)
        return gap >= -max(self.tol.abs, self.tol.rel) * max(1.0, float(np.max(R)))

    def phi_closed(self, R):
        return phi_from_pv(self.value, R, self.tol)

    def portfolio_value_closed(self, c):
        total, parts = 0.0, []
        for S in self.children:
            v, R = portfolio_value(S, c, self.tol)
            total += v
            parts.append(R)
        if any(R is None for R in parts):
            return total, None
        return total, np.sum(parts, axis=0)


class IntersectionSet(ReachableSet):
    def __init__(self, children: Sequence[ReachableSet]):
        children = list(children)
        if not children:
            raise ValueError("intersection needs at least one set")
        dims = {S.dim for S in children}
        if len(dims) != 1:
            raise DimensionMismatch(f"sets have dimensions {sorted(dims)}")
        self.children = children
        self.dim = children[0].dim

    def __repr__(self):
        return f"IntersectionSet({self.children!r})"

    def _contains(self, R):
        return all(S.contains(R) for S in self.children)

    def phi_closed(self, R):
        # R/lam lies in every child iff lam is below every child's phi.
        return min(phi(S, R) for S in self.children)

    def grad_phi_closed(self, R):
        vals = [phi(S, R) for S in self.children]
        order = np.argsort(vals)
        if len(vals) > 1 and vals[order[1]] - vals[order[0]] <= 1e-9 * max(1.0, vals[order[0]]):
            raise NonSmoothPoint("two intersected sets are active at the same point")
        return grad_phi(self.children[order[0]], R)


class AssetImageSet(ReachableSet):
    """Image of a set under an asset-selection matrix, plus the orthant."""

    def __init__(self, mapping: AssetMapping, child: ReachableSet):
        if len(mapping.local_to_global) != child.dim:
            raise DimensionMismatch(f"mapping has {len(mapping.local_to_global)} slots, set has {child.dim} assets")
        self.mapping = mapping
        self.child = child
        self.dim = mapping.n

    def __repr__(self):
        return f"AssetImageSet({self.mapping!r}, {self.child!r})"

    def _contains(self, R):
        return self.child.contains(self.mapping.restrict(R))

    def phi_closed(self, R):
        return phi(self.child, self.mapping.restrict(R))

    def grad_phi_closed(self, R):
        return self.mapping.embed(grad_phi(self.child, self.mapping.restrict(R)))

    def portfolio_value_closed(self, c):
        sub = self.mapping.restrict(c)
        if not np.any(sub > 0):
            return 0.0, None
        v, R = portfolio_value(self.child, sub)
        return v, (None if R is None else self.mapping.embed(R))


def scale_set(alpha: float, S: ReachableSet) -> ScaledSet:
    return ScaledSet(alpha, S)


def sum_sets(sets: Sequence[ReachableSet], tol: Tolerance = DEFAULT_TOL) -> SumSet:
    return SumSet(sets, tol)


def intersect_sets(sets: Sequence[ReachableSet]) -> IntersectionSet:
    return IntersectionSet(sets)


def asset_image(mapping: AssetMapping, S: ReachableSet) -> AssetImageSet:
    return AssetImageSet(mapping, S)


def aggregate(children: Sequence[Tuple[ReachableSet, AssetMapping]], tol: Tolerance = DEFAULT_TOL) -> ReachableSet:
    """Aggregate CFMM ``sum_i A_i S_i`` over a shared asset universe."""
    children = list(children)
    if not children:
        raise ValueError("aggregate needs at least one pool")
    ns = {m.n for _, m in children}
    if len(ns) != 1:
        raise DimensionMismatch(f"mappings disagree on the number of assets: {sorted(ns)}")
    images = [AssetImageSet(m, S) for S, m in children]
    if len(images) == 1:
        return images[0]
    return SumSet(images, tol)


def composed_pv(S: ReachableSet, c, tol: Tolerance = DEFAULT_TOL) -> float:
    """Portfolio value using the composition rules; intersections and plain
    sets go through :func:`cfmm.reachable.portfolio_value`."""
    c = as_vector(c, S.dim, "prices")
    if isinstance(S, ScaledSet):
        return S.alpha * composed_pv(S.child, c, tol)
    if isinstance(S, SumSet):
        return float(sum(composed_pv(child, c, tol) for child in S.children))
    if isinstance(S, AssetImageSet):
        sub = S.mapping.restrict(c)
        if not np.any(sub > 0):
            return 0.0
        return composed_pv(S.child, sub, tol)
    return portfolio_value(S, c, tol)[0]
