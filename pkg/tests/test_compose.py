import numpy as np
import pytest

from cfmm.checks import reachable_suite
from cfmm.compose import (AssetMapping, aggregate, asset_image, composed_pv, intersect_sets, scale_set,
                          sum_sets)
from cfmm.errors import DimensionMismatch, IndexOutOfRange, InvalidScale
from cfmm.pools import LMSRSet, UniswapV2, UniswapV3Tick
from cfmm.reachable import phi, phi_bisect, portfolio_value

V2 = UniswapV2(1.0)
V3 = UniswapV3Tick(1.0, 1.0, 4.0)


def test_mapping_validation():
    with pytest.raises(IndexOutOfRange):
        AssetMapping((0, 3), 3)
    with pytest.raises(IndexOutOfRange):
        AssetMapping((1, 1), 3)
    m = AssetMapping((0, 2), 3)
    assert np.array_equal(m.restrict([1, 2, 3]), [1, 3])
    assert np.array_equal(m.embed([5, 6]), [5, 0, 6])


def test_scale_examples():
    S = scale_set(2, V2)
    assert S.contains([2, 2]) and not S.contains([1.99, 2])
    k4 = UniswapV2(4)
    rng = np.random.default_rng(0)
    for _ in range(500):
        R = rng.uniform(0, 5, 2)
        assert S.contains(R) == k4.contains(R)
    with pytest.raises(InvalidScale):
        scale_set(0, V2)


def test_scale_phi_and_pv():
    S = scale_set(2, V3)
    R = np.array([3.0, 1.5])
    assert abs(phi(S, R) - phi(V3, R) / 2) < 1e-15
    v, Rm = portfolio_value(S, [1, 2])
    assert abs(v - 2 * portfolio_value(V3, [1, 2])[0]) < 1e-15
    assert S.contains(Rm * (1 + 1e-12))


def test_sum_examples():
    S = sum_sets([V2, V2])
    assert S.contains([2, 2])
    assert not S.contains([1, 1])
    assert abs(composed_pv(S, [1, 1]) - 4.0) < 1e-15


def test_sum_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        sum_sets([V2, LMSRSet(1, 3)])


def test_sum_of_ticks_contains_translated_children():
    a, b = UniswapV3Tick(1, 0.5, 2), UniswapV3Tick(0.5, 1, 2)
    S = sum_sets([a, b])
    rng = np.random.default_rng(1)
    for _ in range(50):
        R1 = rng.uniform(0, 5, 2)
        R2 = rng.uniform(0, 5, 2)
        if a.contains(R1) and b.contains(R2):
            assert S.contains(R1 + R2)
    # Minimizers add up too.
    v, R = portfolio_value(S, [1, 2])
    assert abs(v - portfolio_value(a, [1, 2])[0] - portfolio_value(b, [1, 2])[0]) < 1e-15
    assert S.contains(R * (1 + 1e-9))


def test_sum_membership_agrees_with_bisected_phi():
    S = sum_sets([V2, V3])
    rng = np.random.default_rng(2)
    for _ in range(40):
        R = rng.uniform(0.1, 6, 2)
        f = phi_bisect(S, R)
        if abs(f - 1) > 1e-7:
            assert S.contains(R) == (f >= 1)
        assert abs(f - phi(S, R)) < 1e-8 * f


def test_intersection_examples():
    k4 = UniswapV2(4)
    I = intersect_sets([V2, k4])
    rng = np.random.default_rng(3)
    for _ in range(300):
        R = rng.uniform(0, 5, 2)
        assert I.contains(R) == k4.contains(R)
    J = intersect_sets([V2, V3])
    # (1, 1) lies on the boundary of both sets, so it is a member.
    assert J.contains([1, 1])
    assert not J.contains([0.9, 0.9])
    assert J.contains([2, 2])
    K = intersect_sets([V3, V3])
    for _ in range(100):
        R = rng.uniform(0, 3, 2)
        assert K.contains(R) == V3.contains(R)


def test_intersection_phi_is_min():
    J = intersect_sets([V2, V3])
    for R in ([1.0, 3.0], [0.2, 7.0], [5.0, 5.0]):
        assert phi(J, R) == min(phi(V2, R), phi(V3, R))
        assert abs(phi_bisect(J, R) - phi(J, R)) < 1e-9 * phi(J, R)


def test_intersection_pv_max_rule():
    # Where max(V, V') is concave the intersection satisfies the max rule.
    J = intersect_sets([V2, UniswapV2(4)])
    for c in ([1, 1], [3, 1], [0.5, 2]):
        assert abs(composed_pv(J, c) - max(portfolio_value(V2, c)[0], portfolio_value(UniswapV2(4), c)[0])) < 1e-8


def test_asset_image_examples():
    m = AssetMapping((0, 2), 3)
    A = asset_image(m, V2)
    assert A.contains([1, 7, 1])
    assert not A.contains([1, 7, 0.5])
    assert abs(composed_pv(A, [1, 9, 1]) - 2.0) < 1e-15
    Id = asset_image(AssetMapping.identity(2), V3)
    rng = np.random.default_rng(4)
    for _ in range(200):
        R = rng.uniform(0, 3, 2)
        assert Id.contains(R) == V3.contains(R)


def test_asset_image_dimension_check():
    with pytest.raises(DimensionMismatch):
        asset_image(AssetMapping((0,), 3), V2)


def test_aggregate_examples():
    ag = aggregate([(V2, AssetMapping((0, 1), 4)), (V2, AssetMapping((2, 3), 4))])
    assert ag.contains([1, 1, 1, 1])
    assert not ag.contains([1, 1, 1, 0.9])
    assert not ag.contains([0.9, 1, 1, 1])
    single = aggregate([(V2, AssetMapping((0, 2), 3))])
    assert single.contains([1, 0, 1]) and not single.contains([1, 5, 0.9])
    same = aggregate([(V2, AssetMapping((0, 1), 2)), (V2, AssetMapping((0, 1), 2))])
    assert same.contains([2, 2]) and not same.contains([1.99, 2])


def test_aggregate_requires_common_universe():
    with pytest.raises(DimensionMismatch):
        aggregate([(V2, AssetMapping((0, 1), 2)), (V2, AssetMapping((0, 1), 3))])


def test_composed_pv_examples():
    assert composed_pv(scale_set(2, V2), [1, 1]) == 4.0
    assert composed_pv(sum_sets([V2, V2]), [1, 1]) == 4.0


def test_composed_sets_pass_axiom_suite():
    for S in (scale_set(3, V3), intersect_sets([V2, V3]), asset_image(AssetMapping((2, 0), 3), V2)):
        rep = reachable_suite(S, probes=100, seed=5)
        assert rep.passed, rep.as_dict()
