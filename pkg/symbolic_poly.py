"""
symbolic_poly.py - Exact sparse multivariate polynomials over Q

Features:
- Polynomial values keyed by exponent tuples with Fraction coefficients
- Parser / serializer for the `[coef][*]z1^a*z2^b` grammar (graded-lex order)
- Support-level operations: restriction to coordinate subspaces, weighted
  minima and face functions, initial polynomial, multiplicity
- Monomial substitutions (toric chart maps) with an explicit Laurent flag
- Composition, translation, partial derivatives and sympy conversion

Variable indices in the public API are 1-based (z1 ... zn).
"""

import logging
import re
from fractions import Fraction
from functools import reduce
from math import gcd

import sympy

from toolkit_errors import DomainError, PolynomialSyntaxError

logger = logging.getLogger(__name__)


def _graded_key(exponents):
    # ascending total degree, z1-heavy terms first inside a degree
    return (sum(exponents), tuple(-e for e in exponents))


class Polynomial:
    """Immutable sparse polynomial in nvars variables"""

    __slots__ = ("nvars", "_terms", "laurent", "_hash")

    def __init__(self, nvars, terms=None, laurent=False):
        self.nvars = int(nvars)
        self.laurent = bool(laurent)
        cleaned = {}
        for exponents, coefficient in (terms or {}).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != self.nvars:
                raise DomainError(
                    f"exponent vector {exponents} does not have length {self.nvars}",
                    exponents=exponents,
                )
            if not self.laurent and any(e < 0 for e in exponents):
                raise DomainError(f"negative exponent in {exponents}", exponents=exponents)
            coefficient = Fraction(coefficient)
            if coefficient != 0:
                cleaned[exponents] = cleaned.get(exponents, Fraction(0)) + coefficient
                if cleaned[exponents] == 0:
                    del cleaned[exponents]
        self._terms = cleaned
        self._hash = None

    # construction helpers

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, index):
        if not 1 <= index <= nvars:
            raise DomainError(f"variable z{index} outside z1..z{nvars}", index=index)
        exponents = [0] * nvars
        exponents[index - 1] = 1
        return cls(nvars, {tuple(exponents): 1})

    @classmethod
    def monomial(cls, exponents, coefficient=1):
        return cls(len(exponents), {tuple(exponents): coefficient})

    # read access

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        """Terms in canonical graded-lex order"""
        return sorted(self._terms.items(), key=lambda item: _graded_key(item[0]))

    @property
    def support(self):
        return frozenset(self._terms)

    def coefficient(self, exponents):
        return self._terms.get(tuple(exponents), Fraction(0))

    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def total_degree(self):
        if not self._terms:
            raise DomainError("zero polynomial has no degree")
        return max(sum(e) for e in self._terms)

    def degree_in(self, index):
        return max((e[index - 1] for e in self._terms), default=0)

    def evaluate(self, point):
        """Exact value at a rational point"""
        point = [Fraction(x) for x in point]
        total = Fraction(0)
        for exponents, coefficient in self._terms.items():
            value = coefficient
            for x, e in zip(point, exponents):
                value *= x ** e
            total += value
        return total

    # arithmetic

    def _check_same_ring(self, other):
        if self.nvars != other.nvars:
            raise DomainError(f"variable counts differ: {self.nvars} vs {other.nvars}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check_same_ring(other)
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        merged = dict(self._terms)
        for exponents, coefficient in other._terms.items():
            merged[exponents] = merged.get(exponents, Fraction(0)) + coefficient
        return Polynomial(self.nvars, merged, self.laurent or other.laurent)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()}, self.laurent)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            factor = Fraction(other)
            return Polynomial(self.nvars, {e: c * factor for e, c in self._terms.items()}, self.laurent)
        self._check_same_ring(other)
        product = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                exponents = tuple(a + b for a, b in zip(ea, eb))
                product[exponents] = product.get(exponents, Fraction(0)) + ca * cb
        return Polynomial(self.nvars, product, self.laurent or other.laurent)

    __rmul__ = __mul__

    def __pow__(self, power):
        if power < 0:
            raise DomainError("negative powers of polynomials are not supported")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self.nvars}, {serialize(self)!r})"

    def __str__(self):
        return serialize(self)


# grammar

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>z(?P<idx>\d+))|(?P<op>[-+*^]))")


def _tokenize(text):
    tokens = []
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN.match(stripped, position)
        if not match:
            raise PolynomialSyntaxError(
                f"unexpected character {stripped[position:].lstrip()[:1]!r} at offset {position}",
                text=text, offset=position,
            )
        if match.group("num"):
            tokens.append(("num", match.group("num")))
        elif match.group("var"):
            tokens.append(("var", int(match.group("idx"))))
        else:
            tokens.append(("op", match.group("op")))
        position = match.end()
    return tokens


def parse(text, n):
    """Parse `text` into a Polynomial in z1..zn"""
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialSyntaxError("empty polynomial", text=text)
    terms = {}
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    while pos < len(tokens):
        sign = 1
        kind, value = peek()
        if pos == 0 and kind == "op" and value in "+-":
            sign = -1 if value == "-" else 1
            pos += 1
        elif pos > 0:
            if kind != "op" or value not in "+-":
                raise PolynomialSyntaxError(f"expected '+' or '-' before {value!r}", text=text)
            sign = -1 if value == "-" else 1
            pos += 1

        coefficient = Fraction(sign)
        exponents = [0] * n
        seen_factor = False
        kind, value = peek()
        if kind == "num":
            coefficient *= Fraction(value)
            pos += 1
            seen_factor = True
            if peek() == ("op", "*"):
                pos += 1
                if peek()[0] != "var":
                    raise PolynomialSyntaxError("'*' must be followed by a variable", text=text)
        while peek()[0] == "var":
            index = peek()[1]
            pos += 1
            if not 1 <= index <= n:
                raise PolynomialSyntaxError(f"variable z{index} outside z1..z{n}", text=text, index=index)
            power = 1
            if peek() == ("op", "^"):
                pos += 1
                if peek() == ("op", "-"):
                    raise PolynomialSyntaxError(f"negative exponent on z{index}", text=text, index=index)
                kind, value = peek()
                if kind != "num" or "/" in value:
                    raise PolynomialSyntaxError(f"expected integer exponent after z{index}^", text=text)
                power = int(value)
                pos += 1
            exponents[index - 1] += power
            seen_factor = True
            if peek() == ("op", "*"):
                pos += 1
                if peek()[0] != "var":
                    raise PolynomialSyntaxError("'*' must be followed by a variable", text=text)
        if not seen_factor:
            raise PolynomialSyntaxError("empty term", text=text, offset=pos)
        key = tuple(exponents)
        terms[key] = terms.get(key, Fraction(0)) + coefficient

    return Polynomial(n, terms)


def _format_coefficient(value):
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def serialize(f):
    """Canonical text form; parse(serialize(f), f.nvars) == f"""
    if f.is_zero():
        return "0"
    pieces = []
    for exponents, coefficient in f.items():
        monomial = "*".join(
            f"z{i + 1}" if e == 1 else f"z{i + 1}^{e}"
            for i, e in enumerate(exponents) if e != 0
        )
        magnitude = abs(coefficient)
        if not monomial:
            body = _format_coefficient(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{_format_coefficient(magnitude)}*{monomial}"
        if not pieces:
            pieces.append(f"-{body}" if coefficient < 0 else body)
        else:
            pieces.append(f"- {body}" if coefficient < 0 else f"+ {body}")
    return " ".join(pieces)


def coefficient_to_json(value):
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def coefficient_from_json(text):
    return Fraction(str(text))


# support-level operations

def restrict(f, indices):
    """f^I: keep exactly the terms supported in the coordinates I"""
    keep = {i - 1 for i in indices}
    return Polynomial(
        f.nvars,
        {e: c for e, c in f.terms.items() if all(x == 0 for j, x in enumerate(e) if j not in keep)},
        f.laurent,
    )


def weighted_degree(exponents, w):
    return sum(a * b for a, b in zip(exponents, w))


def weighted_min(f, w):
    """(d(w;f), support points attaining it)"""
    if f.is_zero():
        raise DomainError("weighted minimum of the zero polynomial")
    values = {e: weighted_degree(e, w) for e in f.support}
    d = min(values.values())
    return d, frozenset(e for e, v in values.items() if v == d)


def face_function(f, w):
    _, face = weighted_min(f, w)
    return Polynomial(f.nvars, {e: f.coefficient(e) for e in face}, f.laurent)


def is_weighted_homogeneous(f, w):
    if f.is_zero():
        return True
    return face_function(f, w) == f


def multiplicity(f):
    """Order of vanishing at the origin"""
    if f.is_zero():
        raise DomainError("multiplicity of the zero polynomial")
    return min(sum(e) for e in f.support)


def initial_polynomial(f):
    if f.is_zero():
        raise DomainError("initial polynomial of the zero polynomial")
    if f.coefficient((0,) * f.nvars) != 0:
        raise DomainError("initial polynomial needs f(0) = 0", polynomial=serialize(f))
    return face_function(f, (1,) * f.nvars)


def is_reduced_homogeneous(h):
    """Squarefree test for a homogeneous polynomial"""
    if h.is_zero():
        raise DomainError("reducedness of the zero polynomial")
    degrees = {sum(e) for e in h.support}
    if len(degrees) != 1:
        raise DomainError("is_reduced_homogeneous expects a homogeneous polynomial",
                          polynomial=serialize(h))
    _, factors = sympy.sqf_list(to_sympy(h), *symbols(h.nvars))
    return all(power == 1 for _, power in factors)


# monomial maps and substitutions

def substitute_monomial_map(f, matrix, laurent=False):
    """Apply z_j -> prod_i y_i^(A[i][j]); z^alpha -> y^(A alpha)

    The rows of A are the cone generators when A is a chart matrix, so
    substitute(f, A @ B) == substitute(substitute(f, B), A).
    """
    size = len(matrix)
    image = {}
    for exponents, coefficient in f.terms.items():
        new = tuple(sum(matrix[i][j] * exponents[j] for j in range(f.nvars)) for i in range(size))
        if not laurent and any(x < 0 for x in new):
            raise DomainError(
                f"monomial map produced negative exponent {new}; pass laurent=True for chart pullbacks",
                exponents=new,
            )
        image[new] = image.get(new, Fraction(0)) + coefficient
    return Polynomial(size, image, laurent)


def monomial_gcd(f):
    """Largest monomial dividing every term"""
    if f.is_zero():
        return (0,) * f.nvars
    return tuple(min(e[i] for e in f.support) for i in range(f.nvars))


def shift_exponents(f, delta, laurent=None):
    """Multiply by the (possibly Laurent) monomial y^delta"""
    laurent = f.laurent if laurent is None else laurent
    return Polynomial(
        f.nvars,
        {tuple(a + b for a, b in zip(e, delta)): c for e, c in f.terms.items()},
        laurent,
    )


def drop_variable(f, index):
    """Remove z_index from the ring; f must not involve it"""
    if any(e[index - 1] for e in f.support):
        raise DomainError(f"polynomial still depends on z{index}", polynomial=serialize(f))
    return Polynomial(
        f.nvars - 1,
        {e[:index - 1] + e[index:]: c for e, c in f.terms.items()},
        f.laurent,
    )


def insert_variable(f, index):
    """Embed f into a ring with a new variable at position index"""
    return Polynomial(
        f.nvars + 1,
        {e[:index - 1] + (0,) + e[index - 1:]: c for e, c in f.terms.items()},
        f.laurent,
    )


def compose(f, maps):
    """Substitute maps[j] (Polynomials in a common ring) for z_{j+1}"""
    if len(maps) != f.nvars:
        raise DomainError(f"need {f.nvars} substitutions, got {len(maps)}")
    target = maps[0].nvars if maps else 0
    powers = [{0: Polynomial.constant(target, 1)} for _ in maps]

    def power(j, e):
        cache = powers[j]
        if e not in cache:
            k = max(k for k in cache if k < e)
            value = cache[k]
            for step in range(k + 1, e + 1):
                value = value * maps[j]
                cache[step] = value
        return cache[e]

    result = Polynomial.zero(target)
    for exponents, coefficient in f.items():
        term = Polynomial.constant(target, coefficient)
        for j, e in enumerate(exponents):
            if e:
                term = term * power(j, e)
        result = result + term
    return result


def translate(f, point):
    """f(z + p)"""
    maps = [
        Polynomial.variable(f.nvars, i + 1) + Fraction(p)
        for i, p in enumerate(point)
    ]
    return compose(f, maps)


def partial(f, index):
    i = index - 1
    derived = {}
    for exponents, coefficient in f.terms.items():
        if exponents[i] != 0:
            lowered = list(exponents)
            lowered[i] -= 1
            derived[tuple(lowered)] = coefficient * exponents[i]
    return Polynomial(f.nvars, derived, f.laurent)


def truncate(f, degree):
    """Drop terms of total degree above `degree`"""
    return Polynomial(f.nvars, {e: c for e, c in f.terms.items() if sum(e) <= degree}, f.laurent)


# sympy bridge

def symbols(n, prefix="z"):
    return sympy.symbols(" ".join(f"{prefix}{i}" for i in range(1, n + 1)), seq=True)


def to_sympy(f, gens=None):
    gens = gens or symbols(f.nvars)
    expr = sympy.Integer(0)
    for exponents, coefficient in f.terms.items():
        term = sympy.Rational(coefficient.numerator, coefficient.denominator)
        for g, e in zip(gens, exponents):
            term *= g ** e
        expr += term
    return expr


def from_sympy(expr, gens):
    """Polynomial in len(gens) variables from a sympy expression"""
    poly = sympy.Poly(sympy.expand(expr), *gens)
    if poly.is_zero:
        return Polynomial.zero(len(gens))
    terms = {}
    for exponents, coefficient in poly.terms():
        rational = sympy.Rational(coefficient)
        terms[tuple(exponents)] = Fraction(int(rational.p), int(rational.q))
    return Polynomial(len(gens), terms)


def integer_content_scale(f):
    """Primitive integer multiple of f (positive leading coefficient)"""
    if f.is_zero():
        return f
    denominators = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in f.terms.values()), 1)
    numerators = [int(c * denominators) for c in f.terms.values()]
    content = reduce(gcd, (abs(x) for x in numerators), 0)
    leading = f.items()[-1][1]
    scale = Fraction(denominators, content) * (1 if leading > 0 else -1)
    return f * scale
