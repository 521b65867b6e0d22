import logging
from fractions import Fraction

import pytest

from pipelines import (
    ShiftInput, hypothesis_battery, milnor_orlik, mu_star_triple, shift_milnor,
    zariski_surface_report, zeta_multiplicity_check,
)
from symbolic_poly import parse
from toolkit_errors import DomainError, HypothesisError
from zeta_engine import varchenko_zeta


@pytest.mark.parametrize("w,d,expected", [
    ((2, 2, 1), 6, 20),
    ((1, 2), 4, 3),
    ((1, 1, 1), 4, 27),
    ((3, 5), 15, 8),
])
def test_milnor_orlik(w, d, expected):
    assert milnor_orlik(w, d) == expected


def test_milnor_orlik_warns_on_fractions(caplog):
    with caplog.at_level(logging.WARNING, logger="pipelines"):
        assert milnor_orlik((2, 3), 4) == Fraction(1, 3)
    assert "not an integer" in caplog.text
    with pytest.raises(DomainError):
        milnor_orlik((0, 1), 2)


def test_shift_input(surface221):
    inp = ShiftInput.build(surface221, (2, 2, 1), 2, 1)
    assert inp.d == 6
    assert inp.d_exponents == (3, 3, 6)
    assert inp.shifted() == surface221 + parse("z2^4", 3)
    assert inp.to_dict()["w"] == [2, 2, 1]
    with pytest.raises(DomainError):
        ShiftInput.build(surface221, (2, 2, 1), 4, 1)
    with pytest.raises(DomainError):
        ShiftInput.build(surface221, (2, 2, 1), 1, 0)


@pytest.mark.parametrize("d,m,mu_tot,expected", [
    (6, 1, 12, (137, 25, 5)),
    (2, 1, 0, (1, 1, 1)),
    (3, 1, 1, (9, 4, 2)),
])
def test_mu_star_triple(d, m, mu_tot, expected):
    assert mu_star_triple(d, m, mu_tot) == expected


def test_mu_star_triple_preconditions():
    with pytest.raises(DomainError):
        mu_star_triple(1, 1, 0)
    with pytest.raises(DomainError):
        mu_star_triple(3, 0, 0)


def test_battery_names_the_failing_hypothesis(conic_pair):
    inp = ShiftInput.build(conic_pair, (1, 1, 1), 1, 1)
    battery = hypothesis_battery(inp)
    assert battery.checks["convenient"]
    assert battery.checks["weighted-homogeneous"]
    assert battery.checks["pure-powers"]
    assert battery.checks["proper-restrictions-nondegenerate"]
    assert not battery.checks["pre-nondegenerate"]
    assert battery.evidence["singular-points"]["code"] == "algebraic-point"
    with pytest.raises(HypothesisError) as info:
        shift_milnor(inp)
    assert "pre-nondegenerate" in info.value.details["failing"]


def test_user_asserted_milnor_numbers_complete_the_battery(conic_pair, conic_pair_local):
    inp = ShiftInput.build(conic_pair, (1, 1, 1), 1, 1)
    battery = hypothesis_battery(inp, local_records=conic_pair_local)
    assert battery.passed
    assert battery.evidence["pre-nondegenerate"] == "user-asserted"
    result = shift_milnor(inp, local_records=conic_pair_local)
    assert result.mu_tot == 4
    assert result.mu == 27 + 4


def test_surface221_default_chart_finds_a_rational_point(surface221):
    battery = hypothesis_battery(ShiftInput.build(surface221, (2, 2, 1), 2, 1))
    assert battery.passed
    assert battery.cone.generators == ((2, 2, 1), (1, 0, 0), (0, 1, 0))
    assert battery.mu_total == 2


def test_battery_rejects_non_homogeneous_input(cusp):
    inp = ShiftInput.build(cusp + parse("z1*z2", 2), (3, 2), 1, 1)
    battery = hypothesis_battery(inp)
    assert not battery.checks["weighted-homogeneous"]
    assert not battery.passed


def test_battery_with_the_shear(surface221, surface221_local):
    inp = ShiftInput.build(surface221, (2, 2, 1), 2, 1)
    battery = hypothesis_battery(inp, local_records=surface221_local)
    assert battery.passed
    assert battery.mu_total == 2
    assert battery.cone.generators[1] == (1, 1, 1)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_surface221_shift_formula(surface221, surface221_local, m):
    inp = ShiftInput.build(surface221, (2, 2, 1), 2, m)
    result = shift_milnor(inp, local_records=surface221_local)
    assert result.mu == 20 + 4 * m
    assert result.mu_tot == 2
    assert result.evidence["milnor_orlik"] == 20
    assert result.evidence["slope"] == 4


def test_shift_adds_nothing_without_singular_points():
    f = parse("z1^3 + z2^3 + z3^3", 3)
    for m in (1, 5):
        result = shift_milnor(ShiftInput.build(f, (1, 1, 1), 1, m))
        assert result.mu == 8
        assert result.mu_tot == 0


@pytest.mark.slow
def test_nodal_cubic_shift_agrees_with_linear_algebra_and_zeta(nodal_cubic):
    inp = ShiftInput.build(nodal_cubic, (1, 1, 1), 1, 1)
    result = shift_milnor(inp, cross_check=True, zeta_check=True)
    assert result.mu == 9
    assert result.evidence["milnor_linear"]["mu"] == 9
    assert result.evidence["zeta"]["degree"] == -10


@pytest.mark.parametrize("d", [2, 3])
def test_zeta_multiplicity_of_fermat_plus_higher_term(d, caplog):
    g = parse(f"z1^{d} + z2^{d} + z3^{d} + z1^{d + 1}", 3)
    zeta = varchenko_zeta(g)
    with caplog.at_level(logging.WARNING, logger="pipelines"):
        check = zeta_multiplicity_check(g, zeta, d, mu_tot=0)
    assert check["zeta_multiplicity"] == d
    assert check["exponent"] == -(d * d - 3 * d + 3)
    assert check["matches_oracle"]
    assert not check["printed_constant_matches"]
    assert check["bounded_by_multiplicity"]
    assert "d^2+3d-3" in caplog.text


@pytest.mark.slow
def test_identical_curves_are_a_candidate(nodal_cubic):
    report = zariski_surface_report(nodal_cubic, nodal_cubic, k=1, m=1)
    assert report.verdict == "mu-star-zariski-candidate"
    payload = report.to_dict()
    assert payload["mu_star"] == [[9, 4, 2], [9, 4, 2]]
    assert payload["zeta"][0] == payload["zeta"][1]
    assert set(payload) >= {"inputs", "hypotheses", "zeta", "mu_star", "verdict", "citations"}


@pytest.mark.slow
def test_extra_node_is_a_mismatch_both_ways(nodal_cubic, line_conic):
    forward = zariski_surface_report(nodal_cubic, line_conic, k=1, m=1)
    backward = zariski_surface_report(line_conic, nodal_cubic, k=1, m=1)
    assert forward.verdict == backward.verdict == "mismatch"
    assert forward.to_dict()["mu_star"] == [[9, 4, 2], [10, 4, 2]]
    assert backward.to_dict()["mu_star"] == [[10, 4, 2], [9, 4, 2]]


def test_failed_hypotheses_are_reported(nodal_cubic, cuspidal_cubic):
    report = zariski_surface_report(nodal_cubic, cuspidal_cubic, k=1, m=1)
    assert report.verdict == "hypotheses-failed"
    assert report.to_dict()["hypotheses"]["curve1"]["convenient"] is False
