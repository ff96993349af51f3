"""Liquidity provider shares under deposits and withdrawals."""

import numpy as np

from cfmm import LiquidityEvent, ShareLedger, UniswapV2, apply_liquidity, price_invariance_check

ledger, R = ShareLedger({"alice": 1.0}), np.array([1.0, 4.0])
events = [LiquidityEvent("bob", 1.0), LiquidityEvent("carol", 0.5), LiquidityEvent("alice", 0.2, "remove")]
for ev in events:
    ledger, R = apply_liquidity(ledger, R, ev)
    print(f"{ev.direction:6s} {ev.provider:5s} {ev.fraction}: reserves {R.tolist()} weights "
          + ", ".join(f"{k}={w:.4f}" for k, w in ledger.weights.items()))

print("prices unchanged by proportional deposits:", price_invariance_check(UniswapV2(1.0), [1, 4], 0.5))
