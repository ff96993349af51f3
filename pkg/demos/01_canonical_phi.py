"""Canonical trading functions of the reference pools, closed form vs bisection."""

import numpy as np

from cfmm import CurveTwoAsset, LMSRSet, UniswapV2, UniswapV3Tick, marginal_prices, phi, phi_bisect

pools = [UniswapV2(1.0), UniswapV3Tick(1.0, 1.0, 4.0), CurveTwoAsset(1.0, 1.0), LMSRSet(1.0, 2)]
R = np.array([2.0, 3.0])

for S in pools:
    f = phi(S, R)
    fb = phi_bisect(S, R)
    print(f"{S!r:45s} phi={f:.12f} bisect={fb:.12f} prices={marginal_prices(S, R).round(6).tolist()}")

# phi is homogeneous: scaling reserves scales phi.
S = pools[1]
print("phi(3R) / phi(R) =", phi(S, 3 * R) / phi(S, R))
