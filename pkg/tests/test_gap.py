import math

import numpy as np
import pytest

from strichartz_gap.certify.gap import (
    Tridiagonal,
    count_below,
    gap_survey,
    gram_matrix,
    q_matrix,
    smallest_eigenvalue,
    spectral_gap,
)
from strichartz_gap.errors import DiagnosticError
from strichartz_gap.quadform.forms import Block

SHARP = 36 / 85


def test_count_below_on_diagonal_pencil():
    q = Tridiagonal(np.array([1.0, 2.0, 3.0]), np.zeros(2))
    g = Tridiagonal(np.ones(3), np.zeros(2))
    assert count_below(q, g, 0.5) == 0
    assert count_below(q, g, 2.5) == 2
    assert count_below(q, g, 10.0) == 3


def test_smallest_eigenvalue_matches_dense_solver():
    rng = np.random.default_rng(2)
    diagonal = rng.uniform(1.0, 3.0, 12)
    offdiagonal = rng.uniform(-0.4, 0.4, 11)
    q = Tridiagonal(diagonal, offdiagonal)
    g = Tridiagonal(np.full(12, 2.0), np.full(11, 0.3))
    value, iterations = smallest_eigenvalue(q, g)
    expected = np.min(np.linalg.eigvals(np.linalg.solve(g.dense(), q.dense())).real)
    assert value == pytest.approx(expected, rel=1e-10)
    assert iterations > 0


def test_chain_matrices_have_matching_sizes():
    for block in Block:
        for m1 in (0, 1, 3):
            q = q_matrix(block, m1, 9)
            g = gram_matrix(block, m1, 9)
            assert q.size == g.size
            assert q.offdiagonal.size == q.size - 1
    velocity = q_matrix(Block.F1, 1, 5)
    assert velocity.diagonal[0] == pytest.approx(1 / (12 * math.pi))


@pytest.mark.parametrize("block", list(Block))
@pytest.mark.parametrize("m1", [0, 1, 2, 5])
def test_gap_respects_dominance_bound(block, m1):
    report = spectral_gap(block, m1, 60)
    assert report.lambda_min >= SHARP - 1e-9
    assert report.residual < 1e-8
    assert report.dimension == 60 - report.floor + 1


@pytest.mark.parametrize("block", list(Block))
def test_gap_nonincreasing_in_lmax(block):
    values = [spectral_gap(block, 0, lmax).lambda_min for lmax in (6, 12, 24, 48)]
    for coarse, fine in zip(values, values[1:]):
        assert fine <= coarse + 1e-12


def test_gap_survey_skips_chains_above_truncation():
    reports = gap_survey(6, 8)
    assert len(reports) == 14
    assert {report.block for report in reports} == {"F0", "F1"}
    assert max(report.m1 for report in reports) == 6
    assert all(report.lambda_min >= SHARP - 1e-9 for report in reports)
    assert set(reports[0].to_json()) >= {"block", "m1", "lmax", "lambda_min", "residual"}


def test_gap_validates_arguments():
    with pytest.raises(ValueError):
        spectral_gap(Block.F0, 0, 3)
    with pytest.raises(ValueError):
        spectral_gap(Block.F0, 9, 6)
    with pytest.raises(ValueError):
        gap_survey(10, -1)


def test_diagnostic_error_is_runtime_error():
    assert issubclass(DiagnosticError, RuntimeError)


def test_gap_survey_at_full_truncation():
    reports = gap_survey(200, 10)
    assert len(reports) == 22
    for report in reports:
        assert report.lmax == 200
        assert report.lambda_min >= SHARP - 1e-9
        assert report.residual < 1e-6
