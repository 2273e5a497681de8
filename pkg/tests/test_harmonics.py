import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strichartz_gap.harmonics.coupling import c5, mult_x0, x0_coupling_audit, x0_matrix
from strichartz_gap.harmonics.lattice import (
    CoeffField,
    MultiIndex,
    harmonic_dimension,
    index_set,
)


@pytest.mark.parametrize("ell", range(0, 21))
def test_index_set_size_matches_closed_form(ell):
    assert len(index_set(ell)) == harmonic_dimension(ell)
    assert harmonic_dimension(ell) == math.comb(ell + 5, 5) - math.comb(ell + 3, 5)


def test_index_set_is_lexicographic_and_starts_zonal():
    indices = index_set(2)
    assert indices[0] == MultiIndex(2)
    assert [index.m for index in indices] == sorted(index.m for index in indices)
    assert len(index_set(1)) == 6


def test_multi_index_rejects_out_of_order_tuples():
    with pytest.raises(ValueError):
        MultiIndex(1, (2, 0, 0, 0))
    with pytest.raises(ValueError):
        MultiIndex(3, (2, 1, 1, 2))
    with pytest.raises(ValueError):
        index_set(-1)


def test_shifted_stops_below_m1():
    index = MultiIndex(3, (2, 1, 0, 0))
    assert index.shifted(1) == MultiIndex(4, (2, 1, 0, 0))
    assert index.shifted(-1) == MultiIndex(2, (2, 1, 0, 0))
    assert index.shifted(-2) is None
    assert index.label() == "(3,2,1,0,0)"


def test_coeff_field_arithmetic_and_chains():
    m = (1, 0, 0, 0)
    left = CoeffField({MultiIndex(2): 1.0, MultiIndex(2, m): 2.0}, 3)
    right = CoeffField.zonal({2: 0.5, 3: -1.0})
    total = left.add(right)
    assert total.get(2) == pytest.approx(1.5)
    assert total.get(3) == pytest.approx(-1.0)
    assert total.get(2, m) == pytest.approx(2.0)
    assert total.get(0, m) == 0.0
    assert left.scale(2.0).get(2, m) == pytest.approx(4.0)
    assert left.dot(right) == pytest.approx(0.5)
    assert total.chains() == {(0, 0, 0, 0): {2: 1.5, 3: -1.0}, m: {2: 2.0}}
    assert not total.is_zonal
    assert right.is_zonal


def test_coeff_field_truncation_and_padding():
    field = CoeffField.zonal({1: 1.0, 4: 2.0})
    assert field.truncated(2).support() == [MultiIndex(1)]
    assert field.padded(6).lmax == 6
    with pytest.raises(ValueError):
        field.padded(2)
    with pytest.raises(ValueError):
        CoeffField({MultiIndex(5): 1.0}, 4)


def test_coeff_field_json_merges_duplicate_entries():
    payload = {
        "lmax": 3,
        "entries": [
            {"l": 2, "m": [1, 1, 0, 0], "value": 0.25},
            {"l": 2, "m": [1, 1, 0, 0], "value": 0.5},
            {"l": 3, "value": 1.0},
        ],
    }
    field = CoeffField.from_json(payload)
    assert field.get(2, (1, 1, 0, 0)) == pytest.approx(0.75)
    assert field.get(3) == pytest.approx(1.0)
    assert CoeffField.from_json(field.to_json()) == field
    with pytest.raises(ValueError):
        CoeffField.from_json({"entries": []})
    with pytest.raises(ValueError):
        CoeffField.from_json({"lmax": 2, "entries": [{"m": [0, 0, 0, 0]}]})


def test_c5_values():
    assert c5(0, 0) == pytest.approx(math.sqrt(1 / 6))
    assert c5(1, 1) == pytest.approx(0.5 * math.sqrt(6 / 12))
    assert c5(2, 3) == 0.0
    assert c5(-1, 0) == 0.0


def test_mult_x0_matches_chain_matrix():
    m = (2, 1, 0, 0)
    values = {ell: 1.0 / (ell + 1) for ell in range(2, 8)}
    field = CoeffField({MultiIndex(ell, m): value for ell, value in values.items()}, 7)
    product = mult_x0(field)
    matrix = x0_matrix(2, 8)
    vector = np.array([values.get(ell, 0.0) for ell in range(2, 9)])
    expected = matrix @ vector
    for row, ell in enumerate(range(2, 9)):
        assert product.get(ell, m) == pytest.approx(expected[row])
    assert product.lmax == 8


def test_x0_matrix_norm_at_most_one():
    for m1 in (0, 1, 5):
        matrix = x0_matrix(m1, 60)
        assert np.allclose(matrix, matrix.T)
        assert np.max(np.abs(np.linalg.eigvalsh(matrix))) <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        x0_matrix(4, 3)


_coefficients = st.lists(
    st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=6, max_size=6
)


@settings(max_examples=40, deadline=None)
@given(left=_coefficients, right=_coefficients, m1=st.integers(min_value=0, max_value=2))
def test_mult_x0_is_self_adjoint(left, right, m1):
    m = (m1, 0, 0, 0)
    f = CoeffField({MultiIndex(m1 + k, m): v for k, v in enumerate(left)}, m1 + 5)
    g = CoeffField({MultiIndex(m1 + k, m): v for k, v in enumerate(right)}, m1 + 5)
    assert mult_x0(f).dot(g) == pytest.approx(f.dot(mult_x0(g)), abs=1e-9)


def test_coupling_audit_confirms_c5():
    audit = x0_coupling_audit(10, 4)
    assert audit.passed
    assert audit.max_deviation < 1e-10
    with pytest.raises(ValueError):
        x0_coupling_audit(31, 2)
