import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cfmm.errors import NonPositiveFraction, RemoveExceedsShare
from cfmm.lp import LiquidityEvent, ShareLedger, apply_liquidity, price_invariance_check, prices_match
from cfmm.pools import CurveTwoAsset, UniswapV2, UniswapV3Tick


def test_ledger_validation():
    with pytest.raises(ValueError):
        ShareLedger({"a": 0.5})
    with pytest.raises(ValueError):
        ShareLedger({"a": 1.5, "b": -0.5})
    assert ShareLedger({}).total() == 0.0


def test_add_example():
    ledger, R = apply_liquidity(ShareLedger({"a": 1.0}), [1, 2], LiquidityEvent("b", 1.0))
    assert ledger.weights == {"a": 0.5, "b": 0.5}
    assert np.array_equal(R, [2, 4])


def test_remove_example():
    ledger, R = apply_liquidity(ShareLedger({"a": 0.5, "b": 0.5}), [2, 4], LiquidityEvent("b", 0.5, "remove"))
    assert ledger.weight("a") == 1.0 and ledger.weight("b") == 0.0
    assert np.array_equal(R, [1, 2])


def test_event_validation():
    with pytest.raises(NonPositiveFraction):
        LiquidityEvent("a", 0.0)
    with pytest.raises(ValueError):
        LiquidityEvent("a", 0.1, "sideways")
    with pytest.raises(RemoveExceedsShare):
        apply_liquidity(ShareLedger({"a": 0.7, "b": 0.3}), [1, 1], LiquidityEvent("b", 0.31, "remove"))
    with pytest.raises(RemoveExceedsShare):
        apply_liquidity(ShareLedger({"a": 1.0}), [1, 1], LiquidityEvent("a", 1.0, "remove"))


def test_first_deposit():
    ledger, R = apply_liquidity(ShareLedger({}), [1, 1], LiquidityEvent("a", 0.5))
    assert ledger.weights == {"a": 1.0} and np.array_equal(R, [1.5, 1.5])


@given(st.lists(st.tuples(st.integers(0, 4), st.floats(0.01, 2.0), st.booleans()), min_size=1, max_size=30))
@settings(max_examples=200, deadline=None)
def test_weights_conserved(events):
    ledger, R = ShareLedger({0: 1.0}), np.array([1.0, 1.0])
    for who, nu, remove in events:
        if remove:
            nu = min(nu, 0.99) * ledger.weight(who)
            if nu <= 0:
                continue
            ev = LiquidityEvent(who, nu, "remove")
        else:
            ev = LiquidityEvent(who, nu)
        before = dict(ledger.weights)
        ledger, R2 = apply_liquidity(ledger, R, ev)
        scale = 1 + (-nu if remove else nu)
        assert np.allclose(R2, scale * R, rtol=0, atol=0)
        for k, w in before.items():
            if k != who:
                # Non-participants keep their value: w+ V+ = w V.
                assert abs(ledger.weight(k) * scale - w) < 1e-12
        R = R2
        assert abs(ledger.total() - 1.0) <= 1e-12
        assert all(w >= 0 for w in ledger.weights.values())


def test_fractional_value_change():
    nu = 0.3
    V = 5.0
    Vp = (1 + nu) * V
    assert abs((Vp - V) / Vp - nu / (1 + nu)) < 1e-15


@pytest.mark.parametrize("S, R, nu", [(UniswapV2(1), [1, 4], 0.5), (UniswapV3Tick(1, 1, 4), [1, 1], 1.0),
                                      (CurveTwoAsset(1, 1), [1, 2], 0.25)])
def test_price_invariance_examples(S, R, nu):
    assert price_invariance_check(S, R, nu)


def test_nonproportional_change_moves_prices():
    S = UniswapV2(1)
    assert not prices_match(S, [1, 4], [2, 4])
