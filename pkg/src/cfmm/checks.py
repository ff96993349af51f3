"""Sampled property suites for reachable sets, trading sets and cost functions.

Each suite draws random probes from a seeded generator and counts violations
of one property at a time. The thresholds are the ones the library promises
in its docstrings; callers can loosen them but the defaults are the contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .numerics import MACHINE_TOL, Tolerance
from .prediction import CostFn
from .reachable import ReachableSet, phi
from .trade import TradingSet, trade_phi

__all__ = [
    "CheckResult",
    "CheckReport",
    "reachable_suite",
    "trading_suite",
    "cost_suite",
    "pv_suite",
]


@dataclass
class CheckResult:
    name: str
    probes: int
    violations: int
    worst: float = 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass
class CheckReport:
    subject: str
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def add(self, name: str, excesses: List[float]) -> CheckResult:
        """Record a property from per-probe excess values; positive means violated."""
        bad = [e for e in excesses if e > 0]
        res = CheckResult(name, len(excesses), len(bad), max(bad) if bad else 0.0)
        self.results.append(res)
        return res

    def as_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "results": [
                {"name": r.name, "probes": r.probes, "violations": r.violations, "worst": r.worst}
                for r in self.results
            ],
        }


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def reachable_suite(S: ReachableSet, probes: int = 500, seed=0, lo: float = 0.1, hi: float = 10.0,
                    tol: Tolerance = MACHINE_TOL, name: Optional[str] = None) -> CheckReport:
    """Axioms of a reachable set and the consistency of its canonical phi.

    Homogeneity is checked to ``1e-8`` relative, midpoint concavity to
    ``1e-9``, monotonicity to ``1e-12``, and set recovery outside a ``1e-9``
    band around ``phi = 1``.
    """
    rng = _rng(seed)
    n = S.dim
    rep = CheckReport(name or repr(S))
    f = lambda R: phi(S, R, tol)

    rep.add("zero_excluded", [1.0 if S.contains(np.zeros(n)) else -1.0])
    big = np.full(n, 1e6 * hi)
    rep.add("nonempty", [-1.0 if S.contains(big) else 1.0])

    hom, conc, mono, recov, pos, upward, convex = [], [], [], [], [], [], []
    for _ in range(probes):
        R = rng.uniform(lo, hi, n)
        R2 = rng.uniform(lo, hi, n)
        t = float(rng.uniform(0.1, 10.0))
        fR, fR2 = f(R), f(R2)
        fmid = f(0.5 * (R + R2))
        hom.append(abs(f(t * R) - t * fR) - 1e-8 * t * fR)
        conc.append(0.5 * (fR + fR2) - 1e-9 - fmid)
        Rup = R + rng.uniform(0.0, 1.0, n) * rng.integers(0, 2, n)
        mono.append(fR - 1e-12 - f(Rup))
        pos.append(-1.0 if fR > 0 else 1.0)
        if abs(fR - 1.0) > 1e-9:
            recov.append(-1.0 if S.contains(R) == (fR >= 1.0) else 1.0)
        if S.contains(R):
            upward.append(-1.0 if S.contains(Rup) else 1.0)
        # Points on the boundary are members; their midpoint must be too.
        if fR > 0 and fR2 > 0:
            B1, B2 = R / fR, R2 / fR2
            both = S.contains(B1) and S.contains(B2)
            convex.append(-1.0 if (not both or S.contains(0.5 * (B1 + B2))) else 1.0)
    rep.add("homogeneity", hom)
    rep.add("midpoint_concavity", conc)
    rep.add("monotonicity", mono)
    rep.add("positive_reachability", pos)
    rep.add("set_recovery", recov)
    rep.add("upward_closed", upward)
    rep.add("convexity", convex)
    return rep


def pv_suite(V: Callable[[np.ndarray], float], dim: int, probes: int = 200, seed=0,
             name: str = "portfolio value") -> CheckReport:
    """Nondecreasing, homogeneous and concave in prices, to ``1e-8`` relative."""
    rng = _rng(seed)
    rep = CheckReport(name)
    mono, hom, conc = [], [], []
    for _ in range(probes):
        c = rng.uniform(0.1, 10.0, dim)
        c2 = rng.uniform(0.1, 10.0, dim)
        t = float(rng.uniform(0.1, 10.0))
        v, v2 = V(c), V(c2)
        scale = 1e-8 * max(1.0, abs(v), abs(v2))
        mono.append(v - V(c + rng.uniform(0, 1, dim)) - scale)
        hom.append(abs(V(t * c) - t * v) - 1e-8 * max(1.0, t * abs(v)))
        conc.append(0.5 * (v + v2) - V(0.5 * (c + c2)) - scale)
    rep.add("nondecreasing", mono)
    rep.add("homogeneity", hom)
    rep.add("concavity", conc)
    return rep


def trading_suite(T: TradingSet, probes: int = 300, seed=0, name: Optional[str] = None) -> CheckReport:
    """Zero trade, downward closure, convexity, finite tender and homogeneity of
    the trading function, sampled on trades sized like the reserves."""
    rng = _rng(seed)
    n = T.dim
    R = T.bound()
    scale = float(np.max(R)) if R is not None else 1.0
    rep = CheckReport(name or repr(T))
    rep.add("zero_trade", [-1.0 if T.contains(np.zeros(n)) else 1.0])
    down, convex, tender, hom = [], [], [], []
    for _ in range(probes):
        d = rng.uniform(-scale, scale, n)
        d2 = rng.uniform(-scale, scale, n)
        in1, in2 = T.contains(d), T.contains(d2)
        if in1:
            lower = d - rng.uniform(0, scale, n)
            down.append(-1.0 if T.contains(lower) else 1.0)
            if R is not None:
                tender.append(float(np.max(d - R)))
        if in1 and in2:
            convex.append(-1.0 if T.contains(0.5 * (d + d2)) else 1.0)
        p = trade_phi(T, d)
        if np.isfinite(p) and p > 0:
            t = float(rng.uniform(0.5, 2.0))
            hom.append(abs(trade_phi(T, t * d) - t * p) - 1e-8 * t * p)
    rep.add("downward_closed", down)
    rep.add("convexity", convex)
    rep.add("finite_tender", tender)
    rep.add("phi_homogeneity", hom)
    return rep


def cost_suite(C: CostFn, probes: int = 200, seed=0, name: str = "cost function") -> CheckReport:
    """Convexity, monotonicity and translation invariance of a cost function."""
    rng = _rng(seed)
    n = C.dim
    rep = CheckReport(name)
    conv, mono, trans = [], [], []
    for _ in range(probes):
        q = rng.uniform(-3, 3, n)
        q2 = rng.uniform(-3, 3, n)
        a = float(rng.uniform(-3, 3))
        cq = C(q)
        conv.append(C(0.5 * (q + q2)) - 0.5 * (cq + C(q2)) - 1e-9)
        mono.append(cq - C(q + rng.uniform(0, 1, n)) - 1e-12)
        trans.append(abs(C(q + a) - cq - a) - 1e-8)
    rep.add("convexity", conv)
    rep.add("monotonicity", mono)
    rep.add("translation_invariance", trans)
    return rep
