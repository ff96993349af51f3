"""Command-line front end.

Every subcommand prints one JSON document on stdout, except ``export-curve``
which writes CSV. Exit codes: 0 success, 1 domain error, 2 usage error,
3 non-convergence. Errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, List, Optional

import numpy as np

from .checks import pv_suite, reachable_suite
from .compose import AssetMapping, asset_image, intersect_sets, scale_set, sum_sets
from .duality import phi_from_pv, pv_from_phi
from .errors import CFMMError, NotConverged
from .lp import LiquidityEvent, ShareLedger, apply_liquidity
from .numerics import MACHINE_TOL, bisect_boundary, expand_bracket
from .pools import CurveTwoAsset, LMSRSet, UniswapV2, UniswapV3Tick
from .prediction import cost_from_set
from .reachable import PsiSet, ReachableSet, phi, portfolio_value
from .routing import Arbitrage, RoutingInstance, route
from .trade import FeePoolTradingSet, TradingSet, arb, in_no_trade_cone, trading_set_from_reachable

__all__ = ["parse_pool", "parse_routing", "run", "main"]


class UsageError(Exception):
    pass


# ---- serialization -------------------------------------------------------

def _num(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj: Any) -> str:
    """JSON with every float written to 17 significant digits."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---- input parsing -------------------------------------------------------

def _read_text(arg: str) -> str:
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            return fh.read()
    return arg


def parse_vector(arg: str) -> np.ndarray:
    text = _read_text(arg).replace("\n", ",").replace(" ", ",")
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()], dtype=float)
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {arg!r}") from exc


def load_json(arg: str) -> Any:
    text = arg
    if arg.startswith("@"):
        text = _read_text(arg)
    elif not arg.lstrip().startswith(("{", "[")) and os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {arg!r}: {exc}") from exc


def parse_pool(spec: dict) -> ReachableSet:
    """Build a reachable set from a pool specification dictionary."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise UsageError("pool spec must be an object with a 'type'")
    kind = spec["type"]
    try:
        if kind == "uniswap_v2":
            return UniswapV2(float(spec.get("k", 1.0)))
        if kind == "uniswap_v3_tick":
            return UniswapV3Tick(float(spec["alpha"]), float(spec["beta"]), float(spec["k"]))
        if kind == "curve2":
            return CurveTwoAsset(float(spec["alpha"]), float(spec["k"]))
        if kind == "lmsr":
            return LMSRSet(float(spec.get("b", 1.0)), int(spec.get("n", 2)))
        if kind == "scaled":
            return scale_set(float(spec["alpha"]), parse_pool(spec["child"]))
        if kind == "sum":
            return sum_sets([parse_pool(c) for c in spec["children"]])
        if kind == "intersection":
            return intersect_sets([parse_pool(c) for c in spec["children"]])
        if kind == "asset_image":
            return asset_image(AssetMapping(tuple(spec["mapping"]), int(spec["n"])), parse_pool(spec["child"]))
    except KeyError as exc:
        raise UsageError(f"pool spec of type {kind!r} is missing {exc}") from exc
    raise UsageError(f"unknown pool type {kind!r}")


def _trading_set(S: ReachableSet, R: np.ndarray, gamma: float) -> TradingSet:
    if isinstance(S, PsiSet):
        return FeePoolTradingSet(S, R, gamma)
    if gamma != 1.0:
        raise UsageError("fees need a pool defined by a trading function, not a composed set")
    return trading_set_from_reachable(S, R)


def parse_routing(spec: dict) -> RoutingInstance:
    try:
        names = list(spec["assets"])
        index = {a: i for i, a in enumerate(names)}
        n = len(names)
        pools = []
        for entry in spec["pools"]:
            S = parse_pool(entry.get("pool", entry))
            R = np.asarray(entry["reserves"], dtype=float)
            T = _trading_set(S, R, float(entry.get("gamma", 1.0)))
            local = entry.get("assets", names[: S.dim])
            mapping = AssetMapping(tuple(index[a] for a in local), n)
            pools.append((T, mapping))
        util = spec["utility"]
        if util.get("type", "arbitrage") != "arbitrage":
            raise UsageError(f"unsupported utility {util.get('type')!r}")
        utility = Arbitrage(np.asarray(util["prices"], dtype=float), bool(util.get("nonnegative", True)))
    except KeyError as exc:
        raise UsageError(f"routing spec is missing {exc}") from exc
    return RoutingInstance(n, tuple(pools), utility)


# ---- subcommands ---------------------------------------------------------

def _cmd_eval_phi(a) -> dict:
    S = parse_pool(load_json(a.pool))
    return {"phi": phi(S, parse_vector(a.reserves))}


def _cmd_eval_pv(a) -> dict:
    S = parse_pool(load_json(a.pool))
    v, R = portfolio_value(S, parse_vector(a.prices))
    return {"value": v, "minimizer": None if R is None else R}


def _cmd_dualize(a) -> dict:
    S = parse_pool(load_json(a.pool))
    V = lambda c: portfolio_value(S, c)[0]
    f = lambda R: phi(S, R)
    if a.direction == "pv-to-phi":
        if a.reserves is None:
            raise UsageError("pv-to-phi needs --reserves")
        R = parse_vector(a.reserves)
        val = phi_from_pv(V, R)
        ref = f(R)
        return {"phi": val, "roundtrip_residual": abs(val - ref) / max(abs(ref), 1e-300)}
    if a.prices is None:
        raise UsageError("phi-to-pv needs --prices")
    c = parse_vector(a.prices)
    val = pv_from_phi(f, c)
    ref = V(c)
    return {"value": val, "roundtrip_residual": abs(val - ref) / max(abs(ref), 1e-300)}


def _cmd_cost(a) -> dict:
    S = parse_pool(load_json(a.pool))
    return {"cost": cost_from_set(S, parse_vector(a.shares), clamp_nonnegative=a.clamp)}


def _cmd_arb(a) -> dict:
    S = parse_pool(load_json(a.pool))
    T = _trading_set(S, parse_vector(a.reserves), a.gamma)
    profit, trade = arb(T, parse_vector(a.prices))
    return {"profit": profit, "trade": trade}


def _cmd_no_trade(a) -> dict:
    S = parse_pool(load_json(a.pool))
    T = _trading_set(S, parse_vector(a.reserves), a.gamma)
    c = parse_vector(a.prices)
    return {"in_no_trade_cone": in_no_trade_cone(T, c, a.tol), "profit": arb(T, c)[0]}


def _solution_dict(sol) -> dict:
    return {
        "profit": sol.primal,
        "dual": sol.dual,
        "gap": sol.gap,
        "violation": sol.violation,
        "converged": sol.converged,
        "nu": sol.nu,
        "psi": sol.psi,
        "trades": [t for t in sol.trades],
    }


def _cmd_route(a) -> dict:
    inst = parse_routing(load_json(a.instance))
    return _solution_dict(route(inst, gap_tol=a.gap_tol))


def _cmd_lp(a) -> dict:
    raw = load_json(a.ledger)
    weights = raw.get("weights", raw) if isinstance(raw, dict) else None
    if not isinstance(weights, dict):
        raise UsageError("ledger must be a JSON object of provider weights")
    ledger, R = apply_liquidity(ShareLedger(weights), parse_vector(a.reserves),
                                LiquidityEvent(a.provider, a.fraction, a.direction))
    return {"weights": {k: ledger.weights[k] for k in sorted(ledger.weights)}, "reserves": R}


def _boundary(S: ReachableSet, x: float, axis: int) -> float:
    other = 1 - axis

    def member(y):
        R = np.zeros(2)
        R[axis], R[other] = x, y
        return S.contains(R)

    if member(0.0):
        return 0.0
    try:
        br = expand_bracket(member, 1.0)
    except CFMMError:
        return float("inf")
    return bisect_boundary(member, br, MACHINE_TOL)


def _cmd_export_curve(a) -> str:
    S = parse_pool(load_json(a.pool))
    if S.dim != 2:
        raise UsageError("export-curve needs a two-asset pool")
    if a.axis not in (0, 1):
        raise UsageError("axis must be 0 or 1")
    lo, hi = parse_vector(a.range)[:2]
    if not (0 < lo < hi) or a.samples < 2:
        raise UsageError("range must be 0 < lo < hi and samples >= 2")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r1", "r2_boundary"] if a.axis == 0 else ["r2", "r1_boundary"])
    for x in np.linspace(lo, hi, a.samples):
        w.writerow([format(float(x), ".17g"), format(_boundary(S, float(x), a.axis), ".17g")])
    return buf.getvalue()


def _cmd_check(a) -> dict:
    S = parse_pool(load_json(a.pool))
    reports = [reachable_suite(S, a.probes, a.seed, name="reachable set"),
               pv_suite(lambda c: portfolio_value(S, c)[0], S.dim, max(1, a.probes // 5), a.seed)]
    return {"passed": all(r.passed for r in reports), "suites": [r.as_dict() for r in reports]}


# ---- entry points --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfmm", description="Constant function market maker toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def pool_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--pool", required=True, help="pool spec: JSON file, @file or inline JSON")
        return sp

    sp = pool_cmd("eval-phi", "canonical trading function at reserves")
    sp.add_argument("--reserves", required=True)
    sp.set_defaults(func=_cmd_eval_phi)

    sp = pool_cmd("eval-pv", "portfolio value at prices")
    sp.add_argument("--prices", required=True)
    sp.set_defaults(func=_cmd_eval_pv)

    sp = pool_cmd("dualize", "convert between phi and V with a roundtrip residual")
    sp.add_argument("--direction", choices=["pv-to-phi", "phi-to-pv"], required=True)
    sp.add_argument("--reserves")
    sp.add_argument("--prices")
    sp.set_defaults(func=_cmd_dualize)

    sp = pool_cmd("cost", "prediction-market cost of a share vector")
    sp.add_argument("--shares", required=True)
    sp.add_argument("--clamp", action="store_true", help="restrict the cost to be nonnegative")
    sp.set_defaults(func=_cmd_cost)

    for name, func, help_ in (("arb", _cmd_arb, "optimal arbitrage against a pool"),
                              ("no-trade", _cmd_no_trade, "whether prices lie in the no-trade cone")):
        sp = pool_cmd(name, help_)
        sp.add_argument("--reserves", required=True)
        sp.add_argument("--prices", required=True)
        sp.add_argument("--gamma", type=float, default=1.0)
        if name == "no-trade":
            sp.add_argument("--tol", type=float, default=1e-8)
        sp.set_defaults(func=func)

    sp = sub.add_parser("route", help="optimal routing over several pools")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--gap-tol", type=float, default=1e-8)
    sp.set_defaults(func=_cmd_route)

    sp = sub.add_parser("lp", help="apply a liquidity event to a share ledger")
    sp.add_argument("--ledger", required=True)
    sp.add_argument("--reserves", required=True)
    sp.add_argument("--provider", required=True)
    sp.add_argument("--fraction", type=float, required=True)
    sp.add_argument("--direction", choices=["add", "remove"], default="add")
    sp.set_defaults(func=_cmd_lp)

    sp = pool_cmd("export-curve", "CSV of the reachable-set boundary")
    sp.add_argument("--axis", type=int, default=0)
    sp.add_argument("--range", required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp.set_defaults(func=_cmd_export_curve)

    sp = pool_cmd("check", "axiom and consistency suite")
    sp.add_argument("--probes", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_check)
    return p


def _fail(code: int, kind: str, message: str, stderr) -> int:
    stderr.write(dumps({"error": kind, "message": message}) + "\n")
    return code


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        out = args.func(args)
    except UsageError as exc:
        return _fail(2, "usage", str(exc), stderr)
    except NotConverged as exc:
        if exc.solution is not None:
            stdout.write(dumps(_solution_dict(exc.solution)) + "\n")
        return _fail(3, type(exc).__name__, str(exc), stderr)
    except (CFMMError, ValueError, ZeroDivisionError, OSError) as exc:
        return _fail(1, type(exc).__name__, str(exc), stderr)
    if isinstance(out, str):
        stdout.write(out)
    else:
        stdout.write(dumps(out) + "\n")
        if args.command == "check" and not out["passed"]:
            return 1
    return 0


def main() -> None:
    sys.exit(run())
