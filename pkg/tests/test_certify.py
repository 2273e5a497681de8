import json
import math
from fractions import Fraction

import pytest
import sympy

from strichartz_gap.certify.dominance import (
    CertificateRow,
    Verdict,
    chain_floor,
    combine_verdicts,
    dominance_check,
    max_dominant_constant,
    monotonicity_reduction,
    tail_certificate,
    zonal_margin_expression,
)
from strichartz_gap.quadform.forms import SHARP_CONSTANT, Block


def test_position_block_certified_at_sharp_constant():
    certificate = dominance_check(Block.F0, "36/85", 50)
    assert certificate.verdict is Verdict.CERTIFIED
    assert certificate.exit_code == 0
    assert certificate.checked_range == (2, 50)
    assert certificate.row(2, 0).exact_pi == 0
    assert certificate.binding_row().ell == 2
    assert certificate.failures() == []


def test_velocity_block_includes_degree_one_row():
    certificate = dominance_check("F1", SHARP_CONSTANT, 50)
    assert certificate.verdict is Verdict.CERTIFIED
    assert certificate.checked_range == (1, 50)
    first = certificate.row(1, 1)
    assert first.value == pytest.approx(0.0043568, abs=1e-6)
    assert first.interval[0] > 0
    second = certificate.row(2, 1)
    expected = (64 / 1275 - 2 * math.sqrt(7) / 255 - 9 * math.sqrt(15) / 1700) / math.pi
    assert second.value == pytest.approx(expected, rel=1e-12)
    assert second.interval[0] > 0.002
    assert second.interval[1] - second.interval[0] < 1e-12
    assert len(certificate.notes) == 1


def test_zonal_margins_are_exact_rationals():
    certificate = dominance_check(Block.F0, SHARP_CONSTANT, 20)
    for ell in range(3, 21):
        row = certificate.row(ell, 0)
        assert isinstance(row.exact_pi, Fraction)
        assert row.exact_pi > 0
    third = Fraction(1, 4 * 4 * 6) * (Fraction(36, 24) - Fraction(18, 85))
    assert certificate.row(3, 0).exact_pi == third


def test_larger_constant_is_falsified_at_degree_two():
    for block in Block:
        certificate = dominance_check(block, "1/2", 10)
        assert certificate.verdict is Verdict.FALSIFIED
        assert certificate.exit_code == 1
        binding = certificate.binding_row()
        assert (binding.ell, binding.m1) == (2, 0)
        assert binding.exact_pi == Fraction(-13, 2400)


def test_dominance_check_validates_arguments():
    with pytest.raises(ValueError):
        dominance_check(Block.F0, "1", 10)
    with pytest.raises(ValueError):
        dominance_check(Block.F0, SHARP_CONSTANT, 2)
    with pytest.raises(ValueError):
        dominance_check("F2", SHARP_CONSTANT, 10)


def test_certificate_json_is_reproducible():
    first = json.dumps(dominance_check(Block.F1, SHARP_CONSTANT, 12).to_json(), sort_keys=True)
    second = json.dumps(dominance_check(Block.F1, SHARP_CONSTANT, 12).to_json(), sort_keys=True)
    assert first == second
    payload = json.loads(first)
    assert payload["C"] == "36/85"
    assert payload["verdict"] == "certified"
    zonal = [row for row in payload["rows"] if row["m1"] == 0]
    assert zonal[0]["margin"] == {"exact": "0/1 over pi"}
    assert "interval" in payload["rows"][-1]["margin"]


def test_tail_certificate_at_sharp_constant():
    tail = tail_certificate(SHARP_CONSTANT, 2)
    assert tail.numerator == (1221, 268, 67)
    assert tail.criterion == "all-coeffs-positive"
    assert tail.closed_form_residual == "0"
    assert tail.bracket_nonnegative
    assert tail.verdict is Verdict.CERTIFIED
    assert tail.to_json()["poly"] == ["1221", "268", "67"]


def test_tail_matches_closed_form_margin():
    ell = sympy.Symbol("l", positive=True)
    expr = zonal_margin_expression(SHARP_CONSTANT)
    closed = ((ell**2 + 4 * ell + 15) / ((ell + 1) * (ell + 3)) - sympy.Rational(18, 85)) / (
        4 * (ell + 1) * (ell + 3)
    )
    assert sympy.simplify(expr - closed) == 0
    certificate = dominance_check(Block.F0, SHARP_CONSTANT, 30)
    for degree in range(3, 31):
        value = expr.subs(ell, degree)
        assert Fraction(int(value.p), int(value.q)) == certificate.row(degree, 0).exact_pi


def test_tail_certificate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        tail_certificate(Fraction(3, 2), 5)
    with pytest.raises(ValueError):
        tail_certificate(SHARP_CONSTANT, 1)


def test_monotonicity_reduction():
    reduction = monotonicity_reduction()
    assert reduction.holds
    assert reduction.a_gap == "6*m1**2 + 18*m1"
    assert reduction.factor_gap == "m1**2 + 3*m1"


def test_chain_floors():
    assert chain_floor(Block.F0, 0) == 2
    assert chain_floor(Block.F0, 1) == 2
    assert chain_floor(Block.F0, 5) == 5
    assert chain_floor(Block.F1, 0) == 2
    assert chain_floor(Block.F1, 1) == 1


def test_row_verdicts_and_combination():
    assert CertificateRow(2, 1, 0.0, interval=(-1e-9, 1e-9)).verdict is Verdict.INCONCLUSIVE
    assert CertificateRow(2, 1, -1.0, interval=(-2.0, -0.5)).verdict is Verdict.FALSIFIED
    assert CertificateRow(2, 0, 0.0, exact_pi=Fraction(0)).verdict is Verdict.CERTIFIED
    assert combine_verdicts([Verdict.CERTIFIED, Verdict.INCONCLUSIVE]) is Verdict.INCONCLUSIVE
    assert combine_verdicts([Verdict.INCONCLUSIVE, Verdict.FALSIFIED]) is Verdict.FALSIFIED
    assert combine_verdicts([]) is Verdict.CERTIFIED
    assert [verdict.exit_code for verdict in Verdict] == [0, 1, 2]


def test_max_dominant_constant_is_sharp_constant():
    value = max_dominant_constant(tol=1e-6, blocks=(Block.F0,), lcut=8)
    assert value == pytest.approx(36 / 85, abs=1e-6)
    with pytest.raises(ValueError):
        max_dominant_constant(tol=0.0)
