import random
from fractions import Fraction

import pytest

from fan_toric import (
    Cone, Fan, chart_pullback, chart_pullback_shifted, check_coverage, embed_in_chart,
    fan_from_dual_diagram, fan_from_json, fan_to_json, hj_subdivide_2d, is_admissible_cone,
    is_regular, linear_part_determinant, local_shift, regular_chart, regular_refinement,
    stellar_subdivide, unit_vector, validate_fan,
)
from symbolic_poly import Polynomial, parse, substitute_monomial_map
from toolkit_errors import DomainError, FanError

from conftest import SURFACE221_CHART


def test_cone_rejects_non_primitive_generators():
    with pytest.raises(DomainError):
        Cone(((2, 0), (0, 1)))
    with pytest.raises(DomainError):
        Cone(((0, 0), (0, 1)))


def test_regularity():
    assert is_regular(Cone(SURFACE221_CHART))
    assert not is_regular(Cone(((0, 1), (3, 2))))
    assert is_regular(Cone(((1, 1, 1), (0, 1, 0))))
    assert not is_regular(Cone(((1, 1, 0), (1, -1, 0))))


def test_regular_chart_completes_the_weight():
    assert regular_chart((2, 2, 1)).generators == ((2, 2, 1), (1, 0, 0), (0, 1, 0))
    cone = regular_chart((2, 3))
    assert cone.generators[0] == (2, 3)
    assert is_regular(cone)
    assert all(x >= 0 for g in cone.generators for x in g)
    with pytest.raises(DomainError):
        regular_chart((2, 4))


def test_chart_pullback_reassembles_on_surface221_charts(surface221):
    charts = [
        Cone(SURFACE221_CHART),
        regular_chart((2, 2, 1)),
        Cone(((1, 1, 1), (1, 0, 0), (0, 1, 0))),
        Cone(((2, 0, 1), (1, 0, 0), (0, 1, 0))),
    ]
    for cone in charts:
        pull = chart_pullback(surface221, cone)
        assert pull.reassembled() == substitute_monomial_map(surface221, cone.matrix())
        assert all(x >= 0 for e in pull.cofactor.support for x in e)


def test_chart_pullback_of_the_top_face_is_free_of_the_divisor(surface221):
    pull = chart_pullback(surface221, Cone(SURFACE221_CHART))
    assert pull.multiplicities == (6, 3, 0)
    assert pull.free_of_first
    expected = parse("7*z2^3 + 5*z2^2*z3 + 12*z2^2 - 8*z2*z3^2 + 6*z2 + 4*z3^3 + 1", 3)
    assert pull.cofactor == expected


def test_chart_pullback_needs_a_regular_cone(cusp):
    with pytest.raises(DomainError):
        chart_pullback(cusp, Cone(((0, 1), (3, 2))))


def test_shifted_pullback_adds_one_monomial(surface221):
    cone = Cone(SURFACE221_CHART)
    pull = chart_pullback_shifted(surface221, cone, 2, 1)
    base = chart_pullback(surface221, cone)
    # z2^4 -> y1^8 y2^4, divided by y1^6 y2^3
    assert pull.cofactor - base.cofactor == Polynomial.monomial((2, 1, 0))
    assert pull.reassembled() == substitute_monomial_map(surface221 + parse("z2^4", 3), cone.matrix())


def test_local_shift_and_change(surface221):
    pull = chart_pullback(surface221, Cone(SURFACE221_CHART))
    h = Polynomial(2, {e[1:]: c for e, c in pull.cofactor.terms.items()})
    local = local_shift(h, (Fraction(-1, 2), Fraction(-1, 4)))
    assert local.coefficient((0, 0)) == 0
    assert local.coefficient((1, 0)) == 0 and local.coefficient((0, 1)) == 0
    shear = [parse("z1+2*z2", 2), parse("z2", 2)]
    assert linear_part_determinant(shear) == 1
    with pytest.raises(DomainError):
        local_shift(h, (0, 0), [parse("z1+1", 2), parse("z2", 2)])
    assert embed_in_chart(local).nvars == 3


def test_hj_subdivision_examples():
    fan = hj_subdivide_2d(Cone(((1, 0), (1, 2))))
    assert fan.vertices == [(1, 0), (1, 1), (1, 2)]
    fan = hj_subdivide_2d(Cone(((1, 0), (1, 3))))
    assert fan.vertices == [(1, 0), (1, 1), (1, 2), (1, 3)]


def test_hj_subdivision_adjacent_determinants_are_one():
    rng = random.Random(42)
    done = 0
    while done < 50:
        a = (rng.randint(0, 9), rng.randint(0, 9))
        b = (rng.randint(0, 9), rng.randint(0, 9))
        det = a[0] * b[1] - a[1] * b[0]
        if det == 0:
            continue
        try:
            cone = Cone((a, b))
        except DomainError:
            continue
        fan = hj_subdivide_2d(cone)
        chain = fan.vertices
        assert chain[0] in (a, b) and chain[-1] in (a, b)
        for u, v in zip(chain, chain[1:]):
            assert abs(u[0] * v[1] - u[1] * v[0]) == 1
        assert all(is_regular(c) for c in fan.maximal_cones)
        done += 1


def test_dual_diagram_fan_validation(cusp):
    fan = fan_from_dual_diagram(cusp)
    result = validate_fan(fan, cusp, samples=200, seed=1)
    assert not result["regular"]
    assert result["admissible"]
    assert result["small"]
    refined = regular_refinement(fan)
    assert validate_fan(refined, cusp, samples=200, seed=1)["regular"]


def test_coverage_gap_has_a_witness():
    fan = Fan.from_cones([Cone(((1, 0), (1, 1)))])
    with pytest.raises(FanError) as info:
        check_coverage(fan, samples=10)
    assert "witness" in info.value.details


def test_overlapping_cones_are_reported():
    fan = Fan.from_cones([Cone(((1, 0), (0, 1))), Cone(((1, 0), (1, 1))), Cone(((1, 1), (0, 1)))])
    with pytest.raises(FanError):
        check_coverage(fan, samples=10)


def test_fan_json_round_trip():
    fan = Fan.from_cones([Cone(((1, 0), (1, 1))), Cone(((1, 1), (0, 1)))])
    again = fan_from_json(fan_to_json(fan))
    assert again.vertices == fan.vertices
    assert [c.generators for c in again.maximal_cones] == [c.generators for c in fan.maximal_cones]
    with pytest.raises(FanError):
        fan_from_json({"vertices": [[1, 0]], "maximal_cones": [[0, 3]]})


def test_stellar_subdivision():
    fan = Fan.from_cones([Cone((unit_vector(3, 1), unit_vector(3, 2), unit_vector(3, 3)))])
    star = stellar_subdivide(fan, (1, 1, 1))
    assert len(star.maximal_cones) == 3
    assert check_coverage(star, samples=100)
    with pytest.raises(FanError):
        stellar_subdivide(fan, (-1, 0, 0))


def test_admissibility(cusp):
    assert is_admissible_cone(Cone(((1, 0), (3, 2))), cusp)
    assert not is_admissible_cone(Cone(((1, 0), (0, 1))), cusp)


def test_hj_subdivision_of_a_determinant_three_cone():
    fan = hj_subdivide_2d(Cone(((0, 1), (3, 2))))
    assert fan.vertices == [(0, 1), (1, 1), (3, 2)]
    assert all(is_regular(c) for c in fan.maximal_cones)


@pytest.mark.parametrize("text,n", [("z1^2 + z2^3", 2), ("z1^3 + z2^3 + z3^3", 3)])
def test_fan_validation_ignores_the_order_of_cones(text, n):
    f = parse(text, n)
    fan = fan_from_dual_diagram(f)
    reordered = Fan.from_cones(list(reversed(fan.maximal_cones)))
    first = validate_fan(fan, f, samples=100, seed=3)
    second = validate_fan(reordered, f, samples=100, seed=3)
    for key in ("regular", "admissible", "small"):
        assert first[key] == second[key]
    assert sorted(first["report"]["irregular_cones"]) == sorted(second["report"]["irregular_cones"])
    assert first["report"]["cones"] == second["report"]["cones"]
