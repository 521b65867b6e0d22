import random
from itertools import permutations

import pytest

from newton_geometry import (
    chi, complex_to_json, dual_newton_diagram, diagram_to_json, is_convenient, newton_complex,
    newton_number, normalized_volume, positive_facets, principal_part, restriction_facets,
)
from symbolic_poly import Polynomial, parse, weighted_min
from toolkit_errors import DomainError


def test_cusp_face_lattice(cusp):
    complex_ = newton_complex(cusp)
    compact = complex_.compact_faces()
    assert sorted(face.dim for face in compact) == [0, 0, 1]
    edge = complex_.compact_faces(1)[0]
    assert edge.points == frozenset({(2, 0), (0, 3)})
    assert edge.normals == ((3, 2),)
    assert complex_.positive_facets() == [((3, 2), 6)]
    assert complex_.convenient


def test_fermat_surface_has_one_compact_facet():
    f = parse("z1^3 + z2^3 + z3^3", 3)
    complex_ = newton_complex(f)
    facets = complex_.compact_faces(2)
    assert len(facets) == 1
    assert facets[0].weight() == (1, 1, 1)
    assert len(complex_.compact_faces(1)) == 3
    assert len(complex_.compact_faces(0)) == 3


def test_surface221_boundary(surface221):
    complex_ = newton_complex(surface221)
    assert ((2, 2, 1), 6) in complex_.positive_facets()
    assert complex_.convenient


def test_non_convenient_polynomial():
    f = parse("z1^2*z2 + z2^3", 2)
    assert not is_convenient(f)
    with pytest.raises(DomainError):
        newton_number(f)


def test_positive_facets_skip_dominated_points():
    facets = positive_facets([(4, 0), (2, 1), (0, 3), (3, 3)])
    assert [(w, d) for w, d, _ in facets] == [((1, 1), 3), ((1, 2), 4)]
    assert facets[0][2] == frozenset({(0, 3), (2, 1)})
    assert facets[1][2] == frozenset({(2, 1), (4, 0)})


def test_principal_part_drops_interior_terms():
    f = parse("z1^2 + z2^3 + z1*z2^2 + z1^3", 2)
    assert principal_part(f) == parse("z1^2 + z2^3", 2)


def test_restriction_facets_are_zero_extended(surface221):
    facets = restriction_facets(surface221, (1, 3))
    assert [(w, d) for w, d, _ in facets] == [((2, 0, 1), 6)]


def test_dual_diagram_of_the_cusp(cusp):
    diagram = dual_newton_diagram(cusp)
    maximal = sorted(cone.generators for cone in diagram.maximal_cones)
    assert maximal == [((0, 1), (3, 2)), ((1, 0), (3, 2))]
    assert diagram.positive_vertices == [(3, 2)]
    cones = diagram.cones_containing((3, 2))
    assert any(cone.face.points == frozenset({(2, 0), (0, 3)}) for cone in cones)
    payload = diagram_to_json(diagram)
    assert payload["positive_vertices"] == [[3, 2]]


def test_volumes_and_chi(cusp):
    edge = newton_complex(cusp).compact_faces(1)[0]
    assert normalized_volume(edge, (1, 2)) == 6
    assert chi((3, 2), cusp, (1, 2)) == -1
    assert chi((1, 0), cusp, (1,)) == 1


def test_volume_of_a_face_through_the_origin_is_zero():
    assert normalized_volume([(0, 0), (1, 2)], (1, 2)) == 0


@pytest.mark.parametrize("a,b", [(2, 2), (2, 3), (3, 4), (2, 7), (5, 5)])
def test_newton_number_of_brieskorn_curves(a, b):
    assert newton_number(parse(f"z1^{a} + z2^{b}", 2)) == (a - 1) * (b - 1)


def test_newton_number_in_three_variables():
    assert newton_number(parse("z1^3 + z2^3 + z3^3", 3)) == 8
    assert newton_number(parse("z1^2 + z2^3 + z3^5", 3)) == 8
    assert newton_number(parse("z1^4 + z1^2*z2^2 + z2^4", 2)) == 9


def test_volume_is_independent_of_the_triangulation():
    rng = random.Random(8)
    checked = 0
    while checked < 50:
        n = rng.choice((2, 3))
        size = n + rng.randint(0, 2)
        points = {tuple(rng.randint(0, 6) for _ in range(n)) for _ in range(size)}
        f = Polynomial(n, {p: 1 for p in points} | {tuple(7 if j == i else 0 for j in range(n)): 1
                                                  for i in range(n)})
        for face in newton_complex(f).compact_faces(n - 1):
            indices = tuple(range(1, n + 1))
            assert normalized_volume(face, indices, "lexmin") == normalized_volume(face, indices, "lexmax")
            checked += 1


def test_complex_json_lists_facets(cusp):
    payload = complex_to_json(newton_complex(cusp))
    assert {"normal": [3, 2], "d": 6} in payload["facets"]
    assert payload["convenient"] is True


SAMPLE_POLYS = [
    ("z1^2 + z2^3", 2),
    ("z1^4 + z1^2*z2 + z2^5 + z1*z2^2", 2),
    ("7*z3^6+5*z1*z3^4+12*z2*z3^4-8*z1^2*z3^2+6*z2^2*z3^2+4*z1^3+z2^3", 3),
    ("z1^4 + z2^3 + z3^5 + z1^2*z2 + z1*z2*z3", 3),
]


def _permuted(f, order):
    return Polynomial(f.nvars, {tuple(e[i] for i in order): c for e, c in f.terms.items()})


@pytest.mark.parametrize("text,n", SAMPLE_POLYS)
def test_dual_diagram_covers_sampled_weights(text, n):
    f = parse(text, n)
    diagram = dual_newton_diagram(f)
    rng = random.Random(17)
    for _ in range(40):
        w = tuple(rng.randint(1, 9) for _ in range(n))
        _, face = weighted_min(f, w)
        containing = diagram.cones_containing(w)
        assert containing
        assert all(cone.face.points <= face for cone in containing)
        assert face in {cone.face.points for cone in containing}


@pytest.mark.parametrize("text,n", SAMPLE_POLYS)
def test_facets_agree_with_the_weighted_minimum(text, n):
    f = parse(text, n)
    complex_ = newton_complex(f)
    levels = dict(complex_.facets)
    for face in complex_.compact_faces(n - 1):
        (w,) = face.normals
        assert weighted_min(f, w) == (levels[w], face.points)


@pytest.mark.parametrize("text,n", SAMPLE_POLYS)
def test_newton_number_ignores_the_order_of_variables(text, n):
    f = parse(text, n)
    nu = newton_number(f)
    for order in permutations(range(n)):
        assert newton_number(_permuted(f, order)) == nu
