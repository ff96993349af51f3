"""Arbitrage routed across two pools through the dual problem."""

import numpy as np

from cfmm import Arbitrage, AssetMapping, FeePoolTradingSet, RoutingInstance, UniswapV2, route
from cfmm import verify_optimality

ident = AssetMapping.identity(2)
pools = [(FeePoolTradingSet(UniswapV2(2.0), [1, 2], 1.0), ident),
         (FeePoolTradingSet(UniswapV2(2.0), [2, 1], 1.0), ident)]
inst = RoutingInstance(2, pools, Arbitrage(np.array([1.0, 1.0])))
sol = route(inst)

print("profit", sol.primal, "dual", sol.dual, "gap", sol.gap)
print("dual prices", sol.nu)
for k, d in enumerate(sol.trades):
    print(f"pool {k} trade {d.round(8)}")
print("net flow", sol.psi.round(12), "optimal:", verify_optimality(inst, sol))
