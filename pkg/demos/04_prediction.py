"""Cost functions derived from reachable sets, and the LMSR."""

import math

import numpy as np

from cfmm import UniswapV2, cost_from_set, expected_payoff, lmsr_cost, lmsr_cost_fn, set_from_cost

print("Uniswap cost C(0,0):", cost_from_set(UniswapV2(1.0), [0, 0]))
q = np.array([0.7, -0.2])
print("Uniswap cost C(q):", cost_from_set(UniswapV2(1.0), q),
      "quadratic root:", 0.5 * q.sum() + 0.5 * math.sqrt((q[0] - q[1]) ** 2 + 4))

C = lmsr_cost_fn(1.0, 2)
S = set_from_cost(C)
print("LMSR C(q):", lmsr_cost(1.0, q), "via its reachable set:", cost_from_set(S, q))

for p in ([0.5, 0.5], [0.8, 0.2], [1.0, 0.0]):
    print(f"expected payoff at belief {p}: {expected_payoff(C, [0, 0], p):.6f}")
