import random
from fractions import Fraction
from itertools import combinations

import pytest

from symbolic_poly import (
    Polynomial, compose, drop_variable, face_function, from_sympy, initial_polynomial,
    insert_variable, integer_content_scale, is_reduced_homogeneous, is_weighted_homogeneous,
    monomial_gcd, multiplicity, parse, partial, restrict, serialize, shift_exponents,
    substitute_monomial_map, symbols, to_sympy, translate, truncate, weighted_min,
)
from toolkit_errors import DomainError, PolynomialSyntaxError


def test_parse_collects_terms_and_coefficients():
    f = parse("3*z1^2*z2 - 1/2*z3 + z1^2*z2", 3)
    assert f.coefficient((2, 1, 0)) == 4
    assert f.coefficient((0, 0, 1)) == Fraction(-1, 2)
    assert len(f) == 2


def test_parse_accepts_implicit_products_and_leading_sign():
    f = parse("-z1z2^2 + 2z3", 3)
    assert f.coefficient((1, 2, 0)) == -1
    assert f.coefficient((0, 0, 1)) == 2


@pytest.mark.parametrize("text", ["", "z1^-2", "z4", "z1 ++ z2", "2*", "z1 & z2", "z1^1/2"])
def test_parse_rejects_malformed_input(text):
    with pytest.raises(PolynomialSyntaxError):
        parse(text, 3)


def test_serialize_is_canonical():
    f = parse("z2^3 + 4*z1^3 - 8*z1^2*z3^2", 3)
    text = serialize(f)
    assert parse(text, 3) == f
    assert serialize(parse(text, 3)) == text
    assert serialize(Polynomial.zero(2)) == "0"


def test_arithmetic():
    x, y = Polynomial.variable(2, 1), Polynomial.variable(2, 2)
    f = (x + y) ** 2
    assert f == x * x + 2 * x * y + y * y
    assert f - f == Polynomial.zero(2)
    assert (x + 1).evaluate((Fraction(1, 2), 0)) == Fraction(3, 2)
    with pytest.raises(DomainError):
        x + Polynomial.variable(3, 1)


def test_restrict_keeps_terms_in_the_coordinate_subspace():
    f = parse("z1^3 + z1*z2 + z2^2 + z3^4", 3)
    assert restrict(f, (1, 2)) == parse("z1^3 + z1*z2 + z2^2", 3)
    assert restrict(f, (3,)) == parse("z3^4", 3)


def test_weighted_minimum_and_face(surface221):
    d, face = weighted_min(surface221, (2, 2, 1))
    assert d == 6
    assert len(face) == 7
    assert is_weighted_homogeneous(surface221, (2, 2, 1))
    assert face_function(surface221, (1, 1, 1)) == parse("4*z1^3 + z2^3", 3)


def test_multiplicity_and_initial_polynomial():
    f = parse("z1^2 + z2^3 + z1*z2", 2)
    assert multiplicity(f) == 2
    assert initial_polynomial(f) == parse("z1^2 + z1*z2", 2)
    with pytest.raises(DomainError):
        initial_polynomial(parse("1 + z1", 2))


def test_reduced_homogeneous(nodal_cubic):
    assert is_reduced_homogeneous(nodal_cubic)
    assert not is_reduced_homogeneous(parse("z1^2*z2 + 2*z1*z2^2 + z2^3", 2))
    with pytest.raises(DomainError):
        is_reduced_homogeneous(parse("z1^2 + z2^3", 2))


def test_monomial_map_composes():
    f = parse("z1^2*z2 + 3*z2^3", 2)
    a = [[1, 1], [0, 1]]
    b = [[2, 1], [1, 1]]
    ab = [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert substitute_monomial_map(f, ab) == substitute_monomial_map(substitute_monomial_map(f, b), a)


def test_monomial_map_needs_laurent_flag_for_negative_exponents():
    f = parse("z1", 2)
    with pytest.raises(DomainError):
        substitute_monomial_map(f, [[1, 0], [-1, 1]])
    image = substitute_monomial_map(f, [[1, 0], [-1, 1]], laurent=True)
    assert image.coefficient((1, -1)) == 1


def test_monomial_gcd_and_shift():
    f = parse("z1^2*z2 + z1^3*z2^2", 2)
    assert monomial_gcd(f) == (2, 1)
    assert shift_exponents(f, (-2, -1), laurent=False) == parse("1 + z1*z2", 2)


def test_drop_and_insert_variable():
    f = parse("z1 + z3^2", 3)
    assert drop_variable(f, 2) == parse("z1 + z2^2", 2)
    assert insert_variable(drop_variable(f, 2), 2) == f
    with pytest.raises(DomainError):
        drop_variable(f, 1)


def test_compose_and_translate():
    f = parse("z1^2 - z2", 2)
    x = Polynomial.variable(1, 1)
    assert compose(f, [x, x * x]) == Polynomial.zero(1)
    g = translate(f, (1, 1))
    assert g == parse("z1^2 + 2*z1 - z2", 2)


def test_partial_and_truncate():
    f = parse("z1^3*z2 + 5*z2^2 + z1", 2)
    assert partial(f, 1) == parse("3*z1^2*z2 + 1", 2)
    assert partial(f, 2) == parse("z1^3 + 10*z2", 2)
    assert truncate(f, 2) == parse("5*z2^2 + z1", 2)


def test_sympy_bridge_round_trip():
    rng = random.Random(7)
    gens = symbols(3)
    for _ in range(10):
        terms = {
            tuple(rng.randint(0, 3) for _ in range(3)): Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            for _ in range(4)
        }
        f = Polynomial(3, terms)
        assert from_sympy(to_sympy(f, gens), gens) == f


def test_integer_content_scale():
    f = parse("1/2*z1 - 3/4*z2", 2)
    scaled = integer_content_scale(f)
    assert all(c.denominator == 1 for c in scaled.terms.values())
    assert scaled == f * 4 or scaled == f * -4


def _random_polynomial(rng, n):
    terms = {tuple(rng.randint(0, 4) for _ in range(n)): rng.choice((-3, -1, 1, 2, 5)) for _ in range(4)}
    return Polynomial(n, terms)


def test_weighted_minimum_is_additive_on_products():
    rng = random.Random(21)
    for _ in range(40):
        n = rng.choice((2, 3))
        f, g = _random_polynomial(rng, n), _random_polynomial(rng, n)
        w = tuple(rng.randint(0, 5) for _ in range(n))
        assert weighted_min(f * g, w)[0] == weighted_min(f, w)[0] + weighted_min(g, w)[0]
        assert face_function(f * g, w) == face_function(f, w) * face_function(g, w)


def test_restrict_composes_as_an_intersection():
    f = parse("z1^3 + z1*z2 + z2^2*z3 + z3^4 + z1*z3 + 5", 3)
    subsets = [s for k in range(4) for s in combinations((1, 2, 3), k)]
    for first in subsets:
        for second in subsets:
            assert restrict(restrict(f, first), second) == restrict(f, set(first) & set(second))
