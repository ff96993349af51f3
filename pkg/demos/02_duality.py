"""Portfolio value and canonical phi recover each other."""

import numpy as np

from cfmm import UniswapV3Tick, phi_from_pv, portfolio_value, pv_from_phi, pv_function, rmm_phi0
from cfmm import separation_certificate

S = UniswapV3Tick(1.0, 1.0, 4.0)
V = pv_function(S)

for c in ([1.0, 1.0], [0.1, 1.0], [5.0, 1.0]):
    v, R = portfolio_value(S, c)
    print(f"c={c} V={v:.6f} minimizer={None if R is None else R.round(6).tolist()}")
    print(f"   V from phi: {pv_from_phi(S.phi_closed, np.array(c)):.6f}")

R = np.array([2.0, 0.5])
print("phi closed", S.phi_closed(R), "phi from V", phi_from_pv(V, R))
print("rmm phi0 at R:", rmm_phi0(V, R))

# A point outside the set comes with a separating price vector.
c, gap = separation_certificate(S, [0.3, 0.3])
print("certificate c =", c.round(6).tolist(), "gap =", round(gap, 6))
