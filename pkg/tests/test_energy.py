import math

import numpy as np
import pytest

from strichartz_gap.energy.space import (
    SphereState,
    decompose_tangent_part,
    fstar,
    h_inner,
    h_norm_sq,
    project_orth,
    project_tilde,
    random_tilde_state,
    tangent_basis,
    tangent_monomial_coefficients,
    tilde_violation,
)
from strichartz_gap.harmonics.lattice import CoeffField, MultiIndex


def test_maximiser_energy():
    assert h_norm_sq(fstar()) == pytest.approx(4 * math.pi**3)
    assert h_norm_sq(fstar(10)) == pytest.approx(4 * math.pi**3)
    with pytest.raises(ValueError):
        fstar(-1)


def test_h_inner_is_symmetric_and_positive():
    rng = np.random.default_rng(3)
    for _ in range(5):
        x = random_tilde_state(rng, 6)
        y = random_tilde_state(rng, 6)
        assert h_inner(x, y) == pytest.approx(h_inner(y, x))
        assert h_norm_sq(x) > 0


def test_position_pairing_couples_neighbouring_degrees():
    x = SphereState.from_f0(CoeffField.zonal({2: 1.0}))
    y = SphereState.from_f0(CoeffField.zonal({3: 1.0}))
    expected = 0.5 * math.sqrt(3 * 6 / (4 * 5)) * 4 * 5
    assert h_inner(x, y) == pytest.approx(expected)
    assert h_norm_sq(x) == pytest.approx(16.0)


def test_monomial_constants():
    kappa = tangent_monomial_coefficients()
    assert kappa.constant == pytest.approx(math.sqrt(math.pi**3))
    assert kappa.zonal == pytest.approx(math.sqrt(math.pi**3 / 6))
    assert kappa.transverse == pytest.approx(math.sqrt(math.pi**3 / 6))


def test_tilde_violation_names_first_offender():
    assert tilde_violation(fstar(2)) == ("f0", MultiIndex(0))
    velocity = SphereState.from_f1(CoeffField.zonal({1: 0.5, 3: 1.0}))
    assert tilde_violation(velocity) == ("f1", MultiIndex(1))
    allowed = SphereState.from_f1(CoeffField({MultiIndex(1, (1, 0, 0, 0)): 1.0}, 2))
    assert tilde_violation(allowed) is None


def test_project_tilde_is_idempotent():
    state = fstar(3).add(SphereState.from_f1(CoeffField.zonal({0: 1.0, 1: 2.0, 2: 3.0})))
    projected = project_tilde(state)
    assert tilde_violation(projected) is None
    assert project_tilde(projected) == projected
    assert projected.f1.get(2) == pytest.approx(3.0)


def test_tangent_basis_gram_is_positive_definite():
    basis = tangent_basis(3)
    assert len(basis.states) == 9
    assert basis.labels[0] == "f0:1"
    assert basis.labels[-1] == "f1:X0"
    eigenvalues = np.linalg.eigvalsh(basis.gram())
    assert np.all(eigenvalues > 0)


def test_project_orth_leaves_energy_orthogonal_remainder():
    rng = np.random.default_rng(11)
    x = random_tilde_state(rng, 5).add(fstar(5).scale(0.3))
    split = project_orth(x)
    for state in tangent_basis(5).states:
        assert h_inner(state, split.perp) == pytest.approx(0.0, abs=1e-9)
    rebuilt = fstar(5).scale(split.c).add(split.tangent).add(split.perp)
    assert h_norm_sq(rebuilt.sub(x)) == pytest.approx(0.0, abs=1e-18)


def test_project_orth_of_maximiser():
    split = project_orth(fstar(4))
    assert split.c == pytest.approx(1.0)
    assert h_norm_sq(split.perp) == pytest.approx(0.0, abs=1e-18)


def test_decompose_tangent_part_splits_coefficients():
    rng = np.random.default_rng(5)
    p = random_tilde_state(rng, 4).add(tangent_basis(4).states[3])
    g, h = decompose_tangent_part(p)
    assert tilde_violation(g) is None
    assert h_norm_sq(g.add(h).sub(p)) == pytest.approx(0.0, abs=1e-20)
    assert all(index.ell <= 1 for index, value in h.f0.items() if value != 0.0)


def test_random_tilde_state_respects_floors():
    rng = np.random.default_rng(0)
    state = random_tilde_state(rng, 6, zonal=True)
    assert state.is_zonal
    assert tilde_violation(state) is None
    assert min(index.ell for index, _ in state.f0.items()) == 2
    with pytest.raises(ValueError):
        random_tilde_state(rng, 1)


def test_sphere_state_json_roundtrip_and_validation():
    state = SphereState(CoeffField.zonal({2: 1.0}), CoeffField.zonal({3: -2.0}))
    assert state.lmax == 3
    assert SphereState.from_json(state.to_json()) == state
    with pytest.raises(ValueError):
        SphereState.from_json({"f0": state.f0.to_json()})
    with pytest.raises(ValueError):
        state.component("f2")
