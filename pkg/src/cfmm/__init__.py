"""Geometry of constant function market makers.

Reachable sets, canonical trading functions, portfolio values and their
duality, composition of pools, prediction-market cost functions, fee-aware
trading sets, arbitrage, routing and liquidity-provider accounting.
"""

from .errors import *  # noqa: F401,F403
from .numerics import (DEFAULT_TOL, MACHINE_TOL, Bracket, Tolerance, bisect_boundary, expand_bracket,
                       minimize_box, minimize_positive_orthant, minimize_scalar_convex)
from .reachable import (PsiSet, ReachableSet, contains, grad_phi, marginal_prices, phi, phi_bisect,
                        portfolio_value, scale_to_boundary)
from .pools import (CurveTwoAsset, LMSRSet, UniswapV2, UniswapV3Tick, pool_grad_phi, pool_phi_closed,
                    pool_pv_closed)
from .duality import (DualConePoint, LiquidityConePoint, PortfolioValueFn, cone_contains, dual_cone_contains,
                      phi_from_pv, pv_from_phi, pv_function, rmm_phi0, separation_certificate)
from .compose import (AssetImageSet, AssetMapping, IntersectionSet, ScaledSet, SumSet, aggregate, asset_image,
                      composed_pv, intersect_sets, scale_set, sum_sets)
from .prediction import (CostFn, CostSet, cost_fn_from_set, cost_from_set, expected_payoff, lmsr_cost,
                         lmsr_cost_fn, set_from_cost)
from .trade import (FeePoolTradingSet, ReachableTradingSet, SumTradingSet, TradingSet, arb, bounded_liquidity,
                    in_no_trade_cone, marginal_price_cone_contains, path_independence_check, trade_feasible,
                    trade_phi, trading_set_from_reachable, v2_fee_phi_closed)
from .routing import Arbitrage, RoutingInstance, RoutingSolution, dual_objective, route, verify_optimality
from .lp import LiquidityEvent, ShareLedger, apply_liquidity, price_invariance_check, prices_match

__version__ = "0.1.0"
