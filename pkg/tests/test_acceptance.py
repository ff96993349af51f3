"""Acceptance criteria, one test each.

Every test prints a single ``[ACCEPT n] PASS|FAIL`` line with the measured
quantity, then asserts. Reference values come from the oracles in
``oracles.py`` or from exact closed forms; none of them call the code path
under test.
"""

import math

import numpy as np
import pytest

from cfmm.checks import reachable_suite
from cfmm.compose import AssetMapping, composed_pv, intersect_sets, scale_set, sum_sets
from cfmm.duality import phi_from_pv, pv_from_phi, rmm_phi0, pv_function
from cfmm.lp import LiquidityEvent, ShareLedger, apply_liquidity, price_invariance_check
from cfmm.pools import CurveTwoAsset, LMSRSet, UniswapV2, UniswapV3Tick
from cfmm.prediction import cost_fn_from_set, cost_from_set, set_from_cost
from cfmm.reachable import PsiSet, phi, phi_bisect
from cfmm.routing import Arbitrage, RoutingInstance, route, verify_optimality
from cfmm.trade import (FeePoolTradingSet, ReachableTradingSet, arb, in_no_trade_cone, path_independence_check,
                        trade_phi, v2_fee_phi_closed)

import oracles

V2 = UniswapV2(1.0)
V3 = UniswapV3Tick(1.0, 1.0, 4.0)
CURVE = CurveTwoAsset(1.0, 1.0)
LMSR = LMSRSet(1.0, 2)


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPT {n:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    return emit


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_01_closed_form_agreement(report):
    rng = np.random.default_rng(101)
    worst = {}
    for name, S, oracle in (("v2", V2, lambda R: oracles.v2_phi(R, 1.0)),
                            ("v3", V3, lambda R: oracles.v3_phi_by_roots(R, 1, 1, 4)),
                            ("curve", CURVE, lambda R: oracles.curve_phi_by_roots(R, 1, 1))):
        err = 0.0
        for _ in range(1000):
            R = rng.uniform(0.1, 10, 2)
            closed = S.phi_closed(R)
            err = max(err, rel(phi_bisect(S, R), closed))
            # The closed form itself is pinned to an independent root finder.
            err = max(err, rel(closed, oracle(R)))
        worst[name] = err
    ok = max(worst.values()) <= 1e-8
    report(1, "bisection vs closed phi, 1000 points each",
           ok, ", ".join(f"{k} max rel {v:.2e}" for k, v in worst.items()))
    assert ok


def test_02_consistency_suite(report):
    sets = {
        "v2": V2, "v3": V3, "curve": CURVE, "lmsr": LMSR,
        "scaled 2*v3": scale_set(2.0, V3),
        "sum v2+v3": sum_sets([V2, V3]),
        "intersection v2&curve": intersect_sets([V2, CURVE]),
    }
    failed = []
    for name, S in sets.items():
        rep = reachable_suite(S, probes=500, seed=202, name=name)
        if not rep.passed:
            failed.append((name, [r for r in rep.as_dict()["results"] if r["violations"]]))
    ok = not failed
    report(2, "axiom suite on 4 pools and 3 composed sets, 500 probes", ok,
           "zero violations" if ok else str(failed))
    assert ok


def test_03_uniqueness(report):
    k = 2.0
    S1 = PsiSet(lambda R: R[0] * R[1], k, 2)
    S3 = PsiSet(lambda R: (R[0] * R[1]) ** 3, k ** 3, 2)
    rng = np.random.default_rng(303)
    err = 0.0
    for _ in range(500):
        R = rng.uniform(0.1, 10, 2)
        err = max(err, rel(phi_bisect(S3, R), phi_bisect(S1, R)))
    ok = err <= 1e-8
    report(3, "psi and psi^3 give the same phi on 500 points", ok, f"max rel {err:.2e}")
    assert ok


def test_04_duality_roundtrips(report):
    grid = np.linspace(0.2, 5.0, 20)
    worst = {}
    for name, S in (("v2", V2), ("v3", V3)):
        V = pv_function(S)
        f = lambda R, S=S: S.phi_closed(R)
        phi_hat = lambda R, V=V: phi_from_pv(V, R)
        V_hat = lambda c, f=f: pv_from_phi(f, c)
        e_v, e_f = 0.0, 0.0
        for a in grid:
            for b in grid:
                x = np.array([a, b])
                # V -> phi -> V and phi -> V -> phi.
                e_v = max(e_v, rel(pv_from_phi(phi_hat, x), V(x)))
                e_f = max(e_f, rel(phi_from_pv(V_hat, x), f(x)))
        worst[name] = (e_v, e_f)
    e_eq = max(rel(pv_from_phi(lambda R: V2.phi_closed(R), np.array([a, b])), oracles.v2_pv([a, b], 1.0))
               for a in grid for b in grid)
    ok = max(max(v) for v in worst.values()) <= 1e-6 and e_eq <= 1e-6
    detail = ", ".join(f"{k} V->phi->V {v[0]:.1e} phi->V->phi {v[1]:.1e}" for k, v in worst.items())
    report(4, "duality roundtrips on a 20x20 grid", ok, f"{detail}, v2 closed PV {e_eq:.1e}")
    assert ok


def test_05_rmm_sign(report):
    rng = np.random.default_rng(505)
    stats = {}
    for name, S in (("v2", V2), ("v3", V3), ("curve", CURVE), ("lmsr", LMSR)):
        V = pv_function(S)
        agree = total = 0
        for _ in range(1000):
            R = rng.uniform(0.05, 4, 2)
            v = rmm_phi0(V, R)
            if abs(v) <= 1e-7:
                continue
            total += 1
            agree += (v >= 0) == S.contains(R)
        stats[name] = (agree, total)
    ok = all(a == t for a, t in stats.values())
    report(5, "rmm phi0 sign vs membership, 1000 points per pool", ok,
           ", ".join(f"{k} {a}/{t}" for k, (a, t) in stats.items()))
    assert ok


def test_06_composition(report):
    rng = np.random.default_rng(606)
    S = sum_sets([V2, V2])
    e_pv = 0.0
    for _ in range(200):
        c = rng.uniform(0.01, 10, 2)
        e_pv = max(e_pv, abs(composed_pv(S, c) - 4 * math.sqrt(c[0] * c[1])))
    # Sum of two unit pools is the k = 4 pool, phi = sqrt(R1 R2 / 4).
    mism_sum = 0
    for _ in range(500):
        R = rng.uniform(0, 5, 2)
        exact = math.sqrt(R[0] * R[1] / 4) >= 1
        mism_sum += S.contains(R) != exact
        mism_sum += (phi(S, R) >= 1) != exact
    D, K4 = scale_set(2.0, V2), UniswapV2(4.0)
    mism_scale = sum(D.contains(R) != K4.contains(R) for R in rng.uniform(0, 5, (500, 2)))
    ok = e_pv <= 1e-9 and mism_sum == 0 and mism_scale == 0
    report(6, "composition rules", ok,
           f"sum PV max err {e_pv:.1e}, sum membership mismatches {mism_sum}, scaled mismatches {mism_scale}")
    assert ok


def test_07_cost_roundtrips(report):
    rng = np.random.default_rng(707)
    stats = {}
    for name, S in (("v2", V2), ("lmsr", LMSR)):
        back = set_from_cost(cost_fn_from_set(S))
        agree = total = 0
        for _ in range(1000):
            R = rng.uniform(0, 4, 2)
            f = phi_bisect(S, R) if R.min() > 0 else 0.0
            if abs(f - 1) <= 1e-7:
                continue
            total += 1
            agree += back.contains(R) == S.contains(R)
        stats[name] = (agree, total)
    trans = 0.0
    for S in (V2, LMSR):
        for _ in range(200):
            q = rng.uniform(-3, 3, 2)
            a = rng.uniform(-3, 3)
            trans = max(trans, abs(cost_from_set(S, q + a) - cost_from_set(S, q) - a))
    ok = all(a == t for a, t in stats.values()) and trans <= 1e-8
    report(7, "set -> cost -> set and translation invariance", ok,
           ", ".join(f"{k} {a}/{t}" for k, (a, t) in stats.items()) + f", translation residual {trans:.1e}")
    assert ok


def test_08_fee_trading_function(report):
    rng = np.random.default_rng(808)
    worst = {}
    for g in (1.0, 0.99, 0.9):
        err = 0.0
        for _ in range(500):
            R = rng.uniform(0.5, 5, 2)
            T = FeePoolTradingSet(UniswapV2(R[0] * R[1]), R, g)
            i = int(rng.integers(0, 2))
            x = rng.uniform(0.01, 3)
            y = rng.uniform(0.01, 1.0) * oracles.v2_output(R, g, x if i == 0 else -x)[i]
            d = np.zeros(2)
            d[i], d[1 - i] = y, -x
            assert T.contains(d)
            err = max(err, rel(trade_phi(T, d), v2_fee_phi_closed(R, R[0] * R[1], g, d)))
        worst[g] = err
    ok = max(worst.values()) <= 1e-8
    report(8, "fee closed form vs bisection, 500 feasible trades per gamma", ok,
           ", ".join(f"gamma={g} max rel {e:.1e}" for g, e in worst.items()))
    assert ok


def test_09_fee_free_reduction(report):
    rng = np.random.default_rng(909)
    err = 0.0
    for S, R in ((V2, np.array([2.0, 0.5])), (V3, np.array([1.0, 1.0])), (UniswapV2(3.0), np.array([1.0, 3.0]))):
        T = FeePoolTradingSet(S, R, 1.0)
        for _ in range(200):
            c = rng.uniform(0.01, 10, 2)
            ref = float(c @ R) - oracles.v3_pv_grid(c, S.alpha, S.beta, S.k) if isinstance(S, UniswapV3Tick) \
                else float(c @ R) - oracles.v2_pv(c, S.k)
            err = max(err, abs(arb(T, c)[0] - ref))
    ok = err <= 1e-7
    report(9, "gamma=1 arb equals c.R - V(c), 200 prices per pool", ok, f"max abs err {err:.1e}")
    assert ok


def test_10_no_trade_band(report):
    g, R = 0.9, np.array([1.0, 1.0])
    T = FeePoolTradingSet(V2, R, g)

    def profitable(p):
        return oracles.v2_arb_grid(R, g, [p, 1.0], n=20001) > 1e-12

    def threshold(lo, hi):
        # lo and hi straddle the flip; bisect on the grid oracle.
        want = profitable(hi)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if profitable(mid) == want:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    lo_ref, hi_ref = threshold(1.0, 0.5), threshold(1.0, 1.5)
    ps = np.linspace(0.5, 1.5, 100001)
    inside = np.array([in_no_trade_cone(T, [p, 1.0], tol=1e-12) for p in ps])
    idx = np.flatnonzero(inside)
    lo_det, hi_det = ps[idx[0]], ps[idx[-1]]
    contiguous = idx[-1] - idx[0] + 1 == idx.size
    err = max(abs(lo_det - lo_ref), abs(hi_det - hi_ref))
    ok = contiguous and err <= 1e-4
    report(10, "no-trade band endpoints", ok,
           f"detected [{lo_det:.6f}, {hi_det:.6f}] vs oracle [{lo_ref:.6f}, {hi_ref:.6f}] "
           f"(gamma={g}, 1/gamma={1 / g:.6f}), max err {err:.1e}")
    assert ok


def test_11_path_independence(report):
    rng = np.random.default_rng(1111)
    make_free = lambda Rx: ReachableTradingSet(V2, Rx)
    held = 0
    for _ in range(200):
        R = rng.uniform(0.5, 3, 2)
        R = R / math.sqrt(R[0] * R[1]) * rng.uniform(1.0, 1.5)
        x1 = rng.uniform(0.01, 1)
        i = int(rng.integers(0, 2))
        d1 = np.zeros(2)
        d1[i], d1[1 - i] = rng.uniform(0.2, 1.0) * oracles.v2_output(R, 1.0, x1 if i == 0 else -x1)[i], -x1
        d1[i] = min(d1[i], (R[i] - 1 / (R[1 - i] + x1)) * rng.uniform(0.2, 1.0)) if R[i] * (R[1 - i] + x1) > 1 \
            else 0.0
        R1 = R - d1
        x2 = rng.uniform(0.01, 1)
        j = int(rng.integers(0, 2))
        d2 = np.zeros(2)
        top = R1[j] - 1.0 / (R1[1 - j] + x2)
        d2[j], d2[1 - j] = top * rng.uniform(0.5, 1.5), -x2
        held += path_independence_check(make_free, R, d1, d2)
    make_fee = lambda Rx: FeePoolTradingSet(V2, Rx, 0.97)
    witness = None
    for _ in range(2000):
        R = np.array([1.0, 1.0]) * rng.uniform(1.0, 2.0)
        x1, x2 = rng.uniform(0.05, 1.0, 2)
        T0 = make_fee(R)
        d1 = np.array([T0.max_output(0, 1, x1), -x1])
        d2 = np.array([rng.uniform(0.5, 1.5) * make_fee(R - d1).max_output(0, 1, x2), -x2])
        if not path_independence_check(make_fee, R, d1, d2):
            witness = (R, d1, d2)
            break
    ok = held == 200 and witness is not None
    wtxt = "none" if witness is None else f"R={witness[0].round(4).tolist()}, d1={witness[1].round(4).tolist()}, " \
                                          f"d2={witness[2].round(4).tolist()}"
    report(11, "path independence", ok, f"gamma=1 holds on {held}/200 pairs; gamma=0.97 witness {wtxt}")
    assert ok


def test_12_routing(report):
    ident = AssetMapping.identity(2)
    pools = [(FeePoolTradingSet(UniswapV2(2.0), [1, 2], 1.0), ident),
             (FeePoolTradingSet(UniswapV2(2.0), [2, 1], 1.0), ident)]
    inst = RoutingInstance(2, pools, Arbitrage(np.array([1.0, 1.0])))
    sol = route(inst)
    best, _, _ = oracles.two_pool_route_grid([1, 2], [2, 1], 1.0, [1, 1])
    verified = verify_optimality(inst, sol)
    err = abs(sol.primal - best)
    ok = err <= 1e-4 and abs(sol.gap) <= 1e-6 and verified
    report(12, "two-pool routing", ok,
           f"profit {sol.primal:.8f} vs grid {best:.8f} (err {err:.1e}), gap {sol.gap:.1e}, verified {verified}")
    assert ok


def test_13_lp_accounting(report):
    rng = np.random.default_rng(1313)
    p = np.array([1.3, 0.7])
    w_err = v_err = 0.0
    for _ in range(10_000):
        ledger, R = ShareLedger({0: 1.0}), rng.uniform(0.5, 2, 2)
        for _ in range(int(rng.integers(1, 9))):
            who = int(rng.integers(0, 4))
            if rng.random() < 0.4 and ledger.weight(who) > 0:
                ev = LiquidityEvent(who, ledger.weight(who) * rng.uniform(0.01, 0.99) * 0.99, "remove")
            else:
                ev = LiquidityEvent(who, rng.uniform(0.01, 1.0))
            V0 = float(p @ R)
            new, R = apply_liquidity(ledger, R, ev)
            V1 = float(p @ R)
            for k, w in ledger.weights.items():
                if k != who:
                    v_err = max(v_err, abs(new.weight(k) * V1 - w * V0))
            ledger = new
            w_err = max(w_err, abs(ledger.total() - 1.0))
    inv = all(price_invariance_check(S, rng.uniform(0.2, 5, 2), rng.uniform(-0.9, 3))
              for S in (V2, V3) for _ in range(500))
    ok = w_err <= 1e-12 and v_err <= 1e-10 and inv
    report(13, "LP accounting over 10^4 sequences", ok,
           f"max |sum w - 1| {w_err:.1e}, max non-participant value drift {v_err:.1e}, price invariance {inv}")
    assert ok


def test_14_v3_concavity(report):
    rng = np.random.default_rng(1414)
    pools = [V3] + [UniswapV3Tick(a, b, a * b + d) for a, b, d in rng.uniform(0.01, 3, (9, 3))]
    worst, bad = -math.inf, 0
    for _ in range(10_000):
        P = pools[int(rng.integers(0, len(pools)))]
        R, Q = rng.uniform(0, 10, 2), rng.uniform(0, 10, 2)
        excess = 0.5 * (P.phi_closed(R) + P.phi_closed(Q)) - P.phi_closed(0.5 * (R + Q))
        worst = max(worst, excess)
        bad += excess > 1e-9
    ok = bad == 0
    report(14, "v3 midpoint concavity on 10^4 pairs", ok, f"violations {bad}, max excess {worst:.1e}")
    assert ok
