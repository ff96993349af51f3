"""Scaling, sums, intersections and aggregate pools over a shared asset universe."""

import numpy as np

from cfmm import AssetMapping, UniswapV2, UniswapV3Tick, aggregate, composed_pv, intersect_sets, phi
from cfmm import scale_set, sum_sets

v2, v3 = UniswapV2(1.0), UniswapV3Tick(1.0, 1.0, 4.0)

two = sum_sets([v2, v2])
print("V(sum of two v2) at (1,1):", composed_pv(two, [1, 1]), "(= 4 sqrt(c1 c2))")
print("2*v2 contains (2,2):", scale_set(2, v2).contains([2, 2]))

both = intersect_sets([v2, v3])
R = np.array([0.5, 3.0])
print("phi of intersection:", phi(both, R), "= min of", phi(v2, R), phi(v3, R))

# Two pools on disjoint pairs of a four-asset universe.
ag = aggregate([(v2, AssetMapping((0, 1), 4)), (v3, AssetMapping((2, 3), 4))])
print("aggregate contains (1,1,1,1):", ag.contains([1, 1, 1, 1]))
print("aggregate V at (1,2,1,2):", composed_pv(ag, [1, 2, 1, 2]))
