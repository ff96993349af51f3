"""Fee trading sets, arbitrage and the no-trade band."""

import numpy as np

from cfmm import FeePoolTradingSet, UniswapV2, arb, bounded_liquidity, in_no_trade_cone, trade_phi
from cfmm import v2_fee_phi_closed

T = FeePoolTradingSet(UniswapV2(1.0), [1.0, 1.0], 0.9)
d = np.array([0.45, -1.0])
print("trade", d, "phi bisect", trade_phi(T, d), "closed", v2_fee_phi_closed([1, 1], 1, 0.9, d))

for p in (0.85, 0.9, 1.0, 1.1, 1.12, 2.0):
    profit, trade = arb(T, [p, 1.0])
    print(f"price {p:5.2f}: no-trade={in_no_trade_cone(T, [p, 1.0])!s:5s} profit={profit:.6f} trade={trade.round(6)}")

print("bounded liquidity of asset 0:", bounded_liquidity(T, 0))
