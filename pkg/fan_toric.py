"""
fan_toric.py - Regular simplicial fans and toric chart pullbacks

Features:
- Cones with primitive generators, regularity via determinants / maximal minors
- Fan validation against the dual Newton diagram: regularity, admissibility,
  smallness, exact facet pairing plus seeded sampling for coverage (n <= 3)
- Chart pullbacks f(pi_sigma(y)) = prod y_i^d(w_i;f) * cofactor, plain and for
  the shifted function f + z_k^(d_k+m)
- Local coordinates at a point of the exceptional divisor
- 2-D regular subdivision by continued fractions, stellar subdivision with a
  cone budget, fans from JSON
"""

import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations, product
from math import gcd

from exact_linalg import (
    bareiss_det, extended_gcd, is_primitive, primitive, rank, rational_det, solve_rational,
)
from newton_geometry import dual_newton_diagram
from symbolic_poly import (
    Polynomial, compose, insert_variable, is_weighted_homogeneous, monomial_gcd,
    shift_exponents, substitute_monomial_map, weighted_min,
)
from toolkit_errors import DomainError, FanError

logger = logging.getLogger(__name__)


def unit_vector(n, i):
    """e_i, 1-based"""
    return tuple(int(j == i - 1) for j in range(n))


@dataclass(frozen=True)
class Cone:
    generators: tuple

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if not any(g):
                raise DomainError("cone generator is the zero vector")
            if not is_primitive(g):
                raise DomainError(f"non-primitive generator {g}", generator=g)

    @property
    def nvars(self):
        return len(self.generators[0])

    @property
    def dim(self):
        return rank([list(g) for g in self.generators])

    @property
    def simplicial(self):
        return self.dim == len(self.generators)

    def matrix(self):
        """Generators as rows (the chart matrix)"""
        return [list(g) for g in self.generators]

    def determinant(self):
        if len(self.generators) != self.nvars:
            raise DomainError("determinant needs a full-dimensional simplicial cone")
        return bareiss_det(self.matrix())

    def coordinates(self, w):
        """w in the generator basis (full-dimensional simplicial cones)"""
        columns = [[g[i] for g in self.generators] for i in range(self.nvars)]
        return solve_rational(columns, list(w))

    def contains(self, w):
        coords = self.coordinates(w)
        return coords is not None and all(c >= 0 for c in coords)

    def to_json(self):
        return [list(g) for g in self.generators]


@dataclass
class Fan:
    vertices: list
    maximal_cones: list = field(default_factory=list)

    @property
    def nvars(self):
        return len(self.vertices[0])

    @classmethod
    def from_cones(cls, cones):
        vertices = sorted({g for cone in cones for g in cone.generators})
        return cls(vertices=vertices, maximal_cones=list(cones))

    def cones_containing(self, w):
        return [cone for cone in self.maximal_cones if cone.contains(w)]


@dataclass
class ChartPullback:
    cone: Cone
    multiplicities: tuple
    cofactor: Polynomial
    divisor_equations: list = field(default_factory=list)
    free_of_first: bool = False

    def reassembled(self):
        """prod y_i^d_i * cofactor"""
        return shift_exponents(self.cofactor, self.multiplicities, laurent=False)


# regularity

def _maximal_minors_gcd(matrix):
    k = len(matrix)
    n = len(matrix[0])
    minors = (
        bareiss_det([[row[j] for j in cols] for row in matrix])
        for cols in combinations(range(n), k)
    )
    return reduce(gcd, (abs(m) for m in minors), 0)


def is_regular(cone):
    """Generators extend to a basis of Z^n"""
    if not cone.simplicial:
        return False
    if len(cone.generators) == cone.nvars:
        return abs(cone.determinant()) == 1
    return _maximal_minors_gcd(cone.matrix()) == 1


# JSON

def fan_from_json(payload):
    """Build a Fan from {"vertices": [...], "maximal_cones": [[i, j, k], ...]}"""
    if isinstance(payload, str):
        payload = json.loads(payload)
    try:
        vertices = [tuple(int(x) for x in v) for v in payload["vertices"]]
        cones = [Cone(tuple(vertices[i] for i in idx)) for idx in payload["maximal_cones"]]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise FanError(f"malformed fan description: {exc}") from exc
    return Fan(vertices=vertices, maximal_cones=cones)


def fan_to_json(fan):
    index = {v: i for i, v in enumerate(fan.vertices)}
    return {
        "vertices": [list(v) for v in fan.vertices],
        "maximal_cones": [[index[g] for g in cone.generators] for cone in fan.maximal_cones],
    }


def fan_from_dual_diagram(f):
    """Gamma*(f) as a Fan when all its maximal cones are simplicial"""
    diagram = dual_newton_diagram(f)
    cones = []
    for dual in diagram.maximal_cones:
        if len(dual.generators) != f.nvars:
            raise FanError("dual Newton diagram is not simplicial", generators=dual.generators)
        cones.append(Cone(dual.generators))
    return Fan.from_cones(cones)


# validation

def _facet_key(generators):
    return tuple(sorted(generators))


def _on_boundary(generators, n):
    return any(all(g[i] == 0 for g in generators) for i in range(n))


def _side(facet, point, n):
    """Sign of point against the hyperplane spanned by the facet generators"""
    return bareiss_det([list(g) for g in facet] + [list(point)])


def check_coverage(fan, samples=1000, seed=0):
    """Exact facet pairing plus sampled membership; raises FanError on gaps or overlaps"""
    n = fan.nvars
    if n > 3:
        raise DomainError("coverage certification is limited to n <= 3", n=n)
    for cone in fan.maximal_cones:
        if len(cone.generators) != n or not cone.simplicial:
            raise FanError("maximal cone is not full-dimensional simplicial", cone=cone.to_json())
        if any(x < 0 for g in cone.generators for x in g):
            raise FanError("cone leaves the non-negative orthant", cone=cone.to_json())

    incidences = {}
    for cone in fan.maximal_cones:
        for opposite in cone.generators:
            facet = tuple(g for g in cone.generators if g != opposite)
            incidences.setdefault(_facet_key(facet), []).append((cone, opposite))

    for facet, users in sorted(incidences.items()):
        if _on_boundary(facet, n):
            if len(users) != 1:
                raise FanError("boundary facet shared by several cones", facet=facet)
            continue
        if len(users) == 1:
            _, opposite = users[0]
            scale = max(opposite) + 1
            witness = tuple(scale * sum(g[i] for g in facet) - opposite[i] for i in range(n))
            raise FanError("coverage gap beyond an unpaired facet", witness=witness, facet=facet)
        if len(users) > 2:
            raise FanError("overlap: facet shared by more than two cones", facet=facet)
        (_, first), (_, second) = users
        if _side(facet, first, n) * _side(facet, second, n) >= 0:
            raise FanError("overlap: cones on the same side of a shared facet", facet=facet)

    rng = random.Random(seed)
    for _ in range(samples):
        w = tuple(rng.randint(1, 1000) for _ in range(n))
        interiors = [
            cone for cone in fan.maximal_cones
            if all(c > 0 for c in (cone.coordinates(w) or [-1]))
        ]
        closed = fan.cones_containing(w)
        if not closed:
            raise FanError("coverage gap", witness=w)
        if len(interiors) > 1:
            raise FanError("overlap at sampled weight", witness=w)
    return True


def is_admissible_cone(cone, f):
    """cone lies in the closure of one equivalence class of Gamma*(f)"""
    common = None
    for g in cone.generators:
        _, face = weighted_min(f, g)
        common = face if common is None else common & face
    return bool(common)


def validate_fan(fan, f, samples=1000, seed=0):
    """Regularity, admissibility, smallness and coverage of fan against f"""
    n = f.nvars
    if fan.nvars != n:
        raise DomainError(f"fan lives in dimension {fan.nvars}, polynomial in {n}")
    check_coverage(fan, samples=samples, seed=seed)

    irregular = [cone.to_json() for cone in fan.maximal_cones if not is_regular(cone)]
    inadmissible = [cone.to_json() for cone in fan.maximal_cones if not is_admissible_cone(cone, f)]

    # smallness is tested on the monomial-factor-free part
    factor = monomial_gcd(f)
    reduced = shift_exponents(f, tuple(-x for x in factor), laurent=False)
    units = {unit_vector(n, i) for i in range(1, n + 1)}
    not_small = [
        list(v) for v in fan.vertices
        if v not in units and weighted_min(reduced, v)[0] <= 0
    ]
    report = {
        "cones": len(fan.maximal_cones),
        "irregular_cones": irregular,
        "inadmissible_cones": inadmissible,
        "non_small_vertices": not_small,
        "covering": True,
    }
    result = {
        "regular": not irregular,
        "admissible": not inadmissible,
        "small": not not_small,
        "report": report,
    }
    logger.info(
        f"Fan with {len(fan.maximal_cones)} cones: regular={result['regular']} "
        f"admissible={result['admissible']} small={result['small']}"
    )
    return result


# charts

def chart_pullback(f, cone):
    """Toric chart pullback of f for a regular full-dimensional cone"""
    if len(cone.generators) != f.nvars or not is_regular(cone):
        raise DomainError("chart pullback needs a regular full-dimensional cone",
                          cone=cone.to_json())
    pulled = substitute_monomial_map(f, cone.matrix(), laurent=True)
    multiplicities = tuple(weighted_min(f, g)[0] for g in cone.generators)
    cofactor = shift_exponents(pulled, tuple(-d for d in multiplicities), laurent=True)
    cofactor = Polynomial(cofactor.nvars, cofactor.terms)
    free = not any(e[0] for e in cofactor.support)
    divisors = [
        Polynomial(cofactor.nvars, {e: c for e, c in cofactor.terms.items() if e[i] == 0})
        for i in range(cofactor.nvars)
    ]
    return ChartPullback(cone=cone, multiplicities=multiplicities, cofactor=cofactor,
                         divisor_equations=divisors, free_of_first=free)


def shifted_exponents(f, cone, k, m):
    """Chart exponents of the monomial z_k^(d_k+m) relative to the multiplicities of f"""
    w = cone.generators[0]
    d, _ = weighted_min(f, w)
    if w[k - 1] == 0 or d % w[k - 1]:
        raise DomainError(f"w_k = {w[k - 1]} does not divide the weighted degree {d}", k=k)
    d_k = d // w[k - 1]
    exponents = []
    for g in cone.generators:
        exponents.append((d_k + m) * g[k - 1] - weighted_min(f, g)[0])
    return d_k, tuple(exponents)


def chart_pullback_shifted(f, cone, k, m):
    """Pullback data for g = f + z_k^(d_k+m), multiplicities taken from f"""
    if m < 1:
        raise DomainError("shift amount m must be at least 1", m=m)
    w = cone.generators[0]
    if not is_weighted_homogeneous(f, w):
        raise DomainError("shifted pullback needs f weighted homogeneous for the first generator",
                          w=w)
    base = chart_pullback(f, cone)
    _, exponents = shifted_exponents(f, cone, k, m)
    if any(e < 0 for e in exponents):
        raise FanError("negative exponent in shifted chart; cone incompatible with the shift",
                       exponents=exponents, cone=cone.to_json())
    cofactor = base.cofactor + Polynomial.monomial(exponents)
    return ChartPullback(cone=cone, multiplicities=base.multiplicities, cofactor=cofactor,
                         divisor_equations=base.divisor_equations, free_of_first=False)


def regular_chart(w, search_bound=2):
    """A regular cone with first generator w and non-negative remaining generators"""
    w = tuple(int(x) for x in w)
    n = len(w)
    if not is_primitive(w) or any(x < 0 for x in w):
        raise DomainError(f"weight {w} is not a primitive non-negative vector", w=w)
    for i in range(n):
        if w[i] == 1:
            cone = Cone((w,) + tuple(unit_vector(n, j) for j in range(1, n + 1) if j != i + 1))
            return cone
    candidates = sorted(
        (v for v in product(range(search_bound + 1), repeat=n) if any(v) and is_primitive(v)),
        key=lambda v: (sum(v), v),
    )
    for rest in combinations(candidates, n - 1):
        if w in rest:
            continue
        if abs(bareiss_det([list(w)] + [list(v) for v in rest])) == 1:
            return Cone((w,) + rest)
    raise FanError(f"no regular chart with entries <= {search_bound} completes {w}", w=w)


def local_shift(cofactor, point, change=None):
    """cofactor(p + Phi(x)); Phi is a list of polynomials with Phi(0) = 0"""
    nvars = cofactor.nvars
    if len(point) != nvars:
        raise DomainError(f"point has {len(point)} coordinates, cofactor {nvars} variables")
    if change is None:
        change = [Polynomial.variable(nvars, i + 1) for i in range(nvars)]
    if len(change) != nvars:
        raise DomainError(f"coordinate change has {len(change)} entries, expected {nvars}")
    origin = (0,) * nvars
    for phi in change:
        if phi.coefficient(origin) != 0:
            raise DomainError("coordinate change does not fix the origin", change=str(phi))
    maps = [phi + Fraction(p) for phi, p in zip(change, point)]
    return compose(cofactor, maps)


def linear_part_determinant(change):
    """Determinant of the linear part of a coordinate change"""
    nvars = len(change)
    units = [tuple(int(i == j) for i in range(nvars)) for j in range(nvars)]
    return rational_det([[phi.coefficient(e) for e in units] for phi in change])


def embed_in_chart(local, first=1):
    """Add the divisor coordinate x1 back to a polynomial in x2..xn"""
    return insert_variable(local, first)


# subdivisions

def _det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def hj_subdivide_2d(cone):
    """Minimal regular refinement of a 2-D cone by continued fractions"""
    if len(cone.generators) != 2 or cone.nvars != 2:
        raise DomainError("hj_subdivide_2d expects a 2-dimensional cone in Z^2")
    a, b = cone.generators
    flipped = _det2(a, b) < 0
    if flipped:
        a, b = b, a
    if _det2(a, b) == 0:
        raise DomainError("cone generators are parallel")
    chain = [a]
    current = a
    while _det2(current, b) > 1:
        det = _det2(current, b)
        x, y, _ = extended_gcd(current[0], current[1])
        # det(current, c) = 1 for c = (-y, x)
        c = (-int(y), int(x))
        shift = -(_det2(c, b) // det)
        c = (c[0] + shift * current[0], c[1] + shift * current[1])
        chain.append(c)
        current = c
    chain.append(b)
    if flipped:
        chain.reverse()
    cones = [Cone((chain[i], chain[i + 1])) for i in range(len(chain) - 1)]
    logger.debug(f"continued fraction subdivision inserted {len(chain) - 2} rays")
    return Fan(vertices=list(chain), maximal_cones=cones)


def stellar_subdivide(fan, v):
    """Star subdivision of every maximal cone containing v"""
    v = tuple(int(x) for x in v)
    cones = []
    touched = False
    for cone in fan.maximal_cones:
        coords = cone.coordinates(v)
        if coords is None or any(c < 0 for c in coords):
            cones.append(cone)
            continue
        touched = True
        for i, c in enumerate(coords):
            if c > 0:
                gens = list(cone.generators)
                gens[i] = v
                cones.append(Cone(tuple(gens)))
    if not touched:
        raise FanError("stellar subdivision point lies in no cone", point=v)
    return Fan.from_cones(cones)


def _box_point(cone):
    """Lowest nonzero lattice point of the half-open parallelepiped of the cone"""
    n = cone.nvars
    upper = [sum(g[i] for g in cone.generators) for i in range(n)]
    best = None
    for point in product(*(range(u + 1) for u in upper)):
        if not any(point):
            continue
        coords = cone.coordinates(point)
        if coords is None or any(c < 0 or c >= 1 for c in coords):
            continue
        height = sum(coords)
        if best is None or (height, point) < best[0]:
            best = ((height, point), point)
    return best[1] if best else None


def regular_refinement(fan, budget=64):
    """Iterated stellar subdivision until all cones are regular"""
    while True:
        irregular = [cone for cone in fan.maximal_cones if not is_regular(cone)]
        if not irregular:
            return fan
        target = min(irregular, key=lambda cone: (abs(cone.determinant()), cone.generators))
        point = _box_point(target)
        if point is None:
            raise FanError("no interior lattice point found for an irregular cone",
                           cone=target.to_json())
        fan = stellar_subdivide(fan, primitive(point))
        if len(fan.maximal_cones) > budget:
            raise FanError(f"regular refinement exceeded the budget of {budget} cones",
                           budget=budget)
