import math

import numpy as np
import pytest

from strichartz_gap.special.quadrature import (
    WEIGHT_MASS,
    beta_moment,
    default_order,
    jacobi_rule,
)


def test_default_order_follows_lmax():
    assert default_order(0) == 16
    assert default_order(10) == 36


def test_weights_sum_to_weight_mass():
    for npoints in (1, 2, 5, 17, 64):
        rule = jacobi_rule(npoints)
        assert rule.order == npoints
        assert rule.weights.sum() == pytest.approx(3 * math.pi / 8)
        assert WEIGHT_MASS == pytest.approx(3 * math.pi / 8)


def test_rule_is_symmetric_and_interior():
    rule = jacobi_rule(12)
    assert np.all(np.abs(rule.nodes) < 1.0)
    assert np.allclose(rule.nodes, -rule.nodes[::-1])
    assert np.allclose(rule.weights, rule.weights[::-1])
    assert np.all(rule.weights > 0)


def test_rule_integrates_even_moments_exactly():
    for npoints in (2, 6, 10):
        rule = jacobi_rule(npoints)
        for k in range(npoints):
            approx = rule.integrate(lambda t, k=k: t ** (2 * k))
            assert approx == pytest.approx(beta_moment(k), rel=1e-12)


def test_rule_arrays_are_read_only():
    rule = jacobi_rule(4)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


def test_rule_rejects_empty():
    with pytest.raises(ValueError):
        jacobi_rule(0)
    with pytest.raises(ValueError):
        beta_moment(-1)
