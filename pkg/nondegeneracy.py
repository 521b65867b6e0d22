"""
nondegeneracy.py - Newton non-degeneracy of faces and singular points of E(w)

Features:
- Per-face verdicts after a unimodular reduction to the essential variables:
  monomials, edges (squarefree test), 2-variable faces (Groebner unit test
  on the saturated critical system); larger faces are "undecided" unless the
  probabilistic modular mode is switched on
- nd_profile: degenerate facets and the weakly almost non-degenerate check
- Exact rational singular points of E(w) in a regular chart with their
  local Milnor numbers
- Newton pre-non-degeneracy verification for user supplied coordinate changes
- Local data files (JSON) for singular points
"""

import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from exact_linalg import column_echelon_transform, vec_mat
from fan_toric import chart_pullback, linear_part_determinant, local_shift, regular_chart
from milnor_linear import MilnorSettings, milnor_number_with
from newton_geometry import Face, is_convenient, newton_complex, principal_part
from symbolic_poly import (
    Polynomial, drop_variable, face_function, integer_content_scale, is_weighted_homogeneous,
    parse, serialize, symbols, to_sympy, translate, weighted_min,
)
from toolkit_errors import (
    AlgebraicPointError, DomainError, FanError, NonIsolatedSingularityError, UndecidedError,
)

logger = logging.getLogger(__name__)


@dataclass
class NondegeneracySettings:
    probabilistic: bool = False
    probabilistic_trials: int = 5
    seed: int = 0

    @classmethod
    def from_config(cls, section, seed=0):
        section = section or {}
        return cls(
            probabilistic=bool(section.get("probabilistic", cls.probabilistic)),
            probabilistic_trials=int(section.get("probabilistic_trials", cls.probabilistic_trials)),
            seed=seed,
        )


@dataclass
class FaceVerdict:
    face: frozenset
    nondegenerate: object
    method: str
    witness: object = None

    @property
    def undecided(self):
        return self.nondegenerate is None

    def to_dict(self):
        return {
            "face": [list(p) for p in sorted(self.face)],
            "nondegenerate": self.nondegenerate,
            "method": self.method,
            "witness": self.witness,
        }


@dataclass
class SingularPointRecord:
    chart: tuple
    coordinates: tuple
    local_milnor: int
    local_equation: Polynomial = None

    def to_dict(self):
        return {
            "chart": [list(g) for g in self.chart],
            "point": [_rational_str(x) for x in self.coordinates],
            "mu": self.local_milnor,
            "local_equation": serialize(self.local_equation) if self.local_equation else None,
        }


@dataclass
class NDProfile:
    nondegenerate: bool
    degenerate_facets: list = field(default_factory=list)
    degenerate_faces: list = field(default_factory=list)
    weakly_almost: bool = True
    verdicts: list = field(default_factory=list)
    undecided: list = field(default_factory=list)

    def to_dict(self):
        return {
            "nondegenerate": self.nondegenerate,
            "degenerate_facets": [{"w": list(w), "d": d} for w, d in self.degenerate_facets],
            "degenerate_faces": [[list(p) for p in sorted(face)] for face in self.degenerate_faces],
            "weakly_almost": self.weakly_almost,
            "undecided": [[list(p) for p in sorted(face)] for face in self.undecided],
            "faces": [v.to_dict() for v in self.verdicts],
        }


@dataclass
class LocalDataRecord:
    """User supplied data for one singular point"""

    chart: tuple
    point: tuple
    mu: int = None
    change: list = None
    zeta: list = None


def _rational_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _unit_ideal(basis):
    return any(g.is_number and g != 0 for g in basis.exprs)


# face reduction

def reduce_face(f, points):
    """Face function in its essential variables: (h, r)

    A unimodular monomial change moves the face into the first r
    coordinates; the remaining coordinates only contribute a monomial
    factor, which does not change torus critical points.
    """
    points = sorted(points)
    n = len(points[0])
    base = points[0]
    rows = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    transform, r = column_echelon_transform(rows, n)
    images = {p: vec_mat(p, transform)[:r] for p in points}
    lows = [min(q[i] for q in images.values()) for i in range(r)]
    terms = {}
    for p, q in images.items():
        key = tuple(a - b for a, b in zip(q, lows))
        terms[key] = terms.get(key, Fraction(0)) + f.coefficient(p)
    return Polynomial(r, terms), r


def _critical_system(h):
    gens = symbols(h.nvars, prefix="u")
    expr = to_sympy(h, gens)
    return gens, [expr] + [sympy.diff(expr, g) for g in gens]


def _saturated_basis(system, gens, modulus=None, order="grevlex"):
    t = sympy.Dummy("t")
    polys = list(system) + [1 - t * sympy.Mul(*gens)]
    options = {"order": order}
    if modulus:
        options["modulus"] = modulus
    return sympy.groebner(polys, t, *gens, **options)


def _edge_verdict(face, h):
    u = symbols(1, prefix="u")[0]
    expr = to_sympy(h, [u])
    _, factors = sympy.sqf_list(expr, u)
    repeated = [str(factor) for factor, power in factors if power > 1 and sympy.degree(factor, u) > 0
                and factor != u]
    if repeated:
        return FaceVerdict(face, False, "edge-discriminant", witness={"repeated_factor": repeated[0]})
    return FaceVerdict(face, True, "edge-discriminant")


def _surface_verdict(face, h):
    gens, system = _critical_system(h)
    basis = _saturated_basis(system, gens)
    if _unit_ideal(basis):
        return FaceVerdict(face, True, "surface-resultant")
    return FaceVerdict(face, False, "surface-resultant",
                       witness={"critical_ideal": [str(g) for g in basis.exprs]})


def _probabilistic_verdict(face, h, settings):
    scaled = integer_content_scale(h)
    gens, system = _critical_system(scaled)
    rng = random.Random(settings.seed)
    primes = []
    votes = []
    for _ in range(settings.probabilistic_trials):
        prime = int(sympy.nextprime(rng.randrange(10 ** 6, 10 ** 7)))
        primes.append(prime)
        votes.append(_unit_ideal(_saturated_basis(system, gens, modulus=prime)))
    witness = {"primes": primes, "agreeing": max(votes.count(True), votes.count(False))}
    if all(votes):
        return FaceVerdict(face, True, "probabilistic", witness=witness)
    if not any(votes):
        return FaceVerdict(face, False, "probabilistic", witness=witness)
    return FaceVerdict(face, None, "undecided", witness=witness)


def face_nondegenerate(f, face, settings=None):
    """Verdict for one compact face (a Face or a set of support points)"""
    settings = settings or NondegeneracySettings()
    points = frozenset(face.points if isinstance(face, Face) else (tuple(p) for p in face))
    if isinstance(face, Face) and not face.compact:
        raise DomainError("non-degeneracy is tested on compact faces", face=sorted(points))
    h, r = reduce_face(f, points)
    logger.debug(f"face with {len(points)} points has {r} essential variables")
    if r == 0:
        return FaceVerdict(points, True, "monomial")
    if r == 1:
        return _edge_verdict(points, h)
    if r == 2:
        return _surface_verdict(points, h)
    if settings.probabilistic:
        return _probabilistic_verdict(points, h, settings)
    return FaceVerdict(points, None, "undecided", witness={"essential_variables": r})


def assumed_verdict(face):
    points = frozenset(face.points if isinstance(face, Face) else face)
    return FaceVerdict(points, True, "user-asserted")


def _face_verdicts(f, settings):
    complex_ = newton_complex(f)
    return complex_, [face_nondegenerate(f, face, settings) for face in complex_.compact_faces()]


def is_newton_nondegenerate(f, settings=None):
    """Every compact face of Gamma(f) is non-degenerate"""
    _, verdicts = _face_verdicts(f, settings)
    undecided = [v for v in verdicts if v.undecided]
    if undecided:
        raise UndecidedError("non-degeneracy undecided on some faces",
                             faces=[sorted(v.face) for v in undecided])
    return all(v.nondegenerate for v in verdicts)


def nd_profile(f, settings=None, milnor_settings=None):
    """Aggregated face verdicts and the weakly almost non-degenerate check"""
    complex_, verdicts = _face_verdicts(f, settings)
    top = f.nvars - 1
    undecided = [v.face for v in verdicts if v.undecided]
    degenerate = [v for v in verdicts if v.nondegenerate is False]
    facets = {}
    for face in complex_.compact_faces(top):
        d = weighted_min(f, face.weight())[0]
        facets[face.points] = (face.normals[0], d)
    degenerate_facets = [facets[v.face] for v in degenerate if v.face in facets]

    weakly_almost = not undecided and all(v.face in facets for v in degenerate)
    if weakly_almost:
        for v in degenerate:
            w = facets[v.face][0]
            try:
                sing_points(face_function(f, w), w, settings=milnor_settings)
            except AlgebraicPointError:
                continue
            except NonIsolatedSingularityError:
                weakly_almost = False
                break
            except FanError as e:
                # no chart to look for singular points in
                logger.warning(f"facet w={tuple(w)} left undecided: {e.message}")
                undecided.append(v.face)
                weakly_almost = False
    profile = NDProfile(
        nondegenerate=not degenerate and not undecided,
        degenerate_facets=sorted(degenerate_facets),
        degenerate_faces=[v.face for v in degenerate],
        weakly_almost=weakly_almost,
        verdicts=verdicts,
        undecided=undecided,
    )
    logger.info(
        f"nd profile: {len(degenerate)} degenerate faces, {len(undecided)} undecided, "
        f"weakly almost = {weakly_almost}"
    )
    return profile


# singular points of E(w)

def _torus_points(polys, gens):
    """Rational common zeros with all coordinates nonzero"""
    polys = [p for p in (sympy.expand(q) for q in polys) if p != 0]
    if not gens:
        return [] if polys else [()]
    if not polys:
        raise NonIsolatedSingularityError("critical locus contains a whole torus orbit")
    # lex with the last variable smallest leaves a univariate element
    basis = _saturated_basis(polys, gens, order="lex")
    if _unit_ideal(basis):
        return []
    last = gens[-1]
    t_free = [g for g in basis.exprs if g.free_symbols and g.free_symbols <= {last}]
    if not t_free:
        raise NonIsolatedSingularityError("critical locus is not finite in the chart torus")
    _, factors = sympy.factor_list(t_free[0], last)
    points = []
    for factor, _ in factors:
        degree = sympy.degree(factor, last)
        if degree == 0:
            continue
        if degree > 1:
            raise AlgebraicPointError(
                "algebraic point: supply local data manually", factor=str(factor)
            )
        a, b = sympy.Poly(factor, last).all_coeffs()
        root = sympy.Rational(-b, a)
        if root == 0:
            continue
        for head in _torus_points([p.subs(last, root) for p in polys], gens[:-1]):
            points.append(head + (Fraction(int(root.p), int(root.q)),))
    return points


def chart_equation(f, w, cone=None):
    """E(w) in the chart: the cofactor with the divisor coordinate removed"""
    if not is_weighted_homogeneous(f, w):
        raise DomainError(f"f is not weighted homogeneous for w={tuple(w)}", w=tuple(w))
    cone = cone or regular_chart(w)
    if tuple(cone.generators[0]) != tuple(w):
        raise DomainError("chart must have w as its first generator", chart=cone.to_json())
    pull = chart_pullback(f, cone)
    return cone, drop_variable(pull.cofactor, 1)


def sing_points(f, w, cone=None, settings=None):
    """Singular points of E(w) in the torus of a regular chart, with local mu"""
    settings = settings or MilnorSettings()
    cone, h = chart_equation(f, w, cone)
    if h.nvars == 0:
        return []
    gens, system = _critical_system(h)
    found = _torus_points(system, gens)
    records = []
    for point in sorted(found):
        local = translate(h, point)
        mu = milnor_number_with(local, settings).mu
        records.append(SingularPointRecord(chart=cone.generators, coordinates=point,
                                           local_milnor=mu, local_equation=local))
    logger.info(f"E(w) for w={tuple(w)} has {len(records)} singular points in chart {cone.generators}")
    return records


def total_milnor(records):
    return sum(r.local_milnor for r in records)


# pre-non-degeneracy

def verify_pre_nondegenerate(f, w, changes=None, cone=None, settings=None, milnor_settings=None):
    """Check each singular point's transformed local equation is convenient and ND"""
    changes = changes or {}
    cone, h = chart_equation(f, w, cone)
    records = sing_points(f, w, cone, milnor_settings)
    points = []
    locals_ = []
    for record in records:
        change = changes.get(record.coordinates)
        if change is not None:
            if linear_part_determinant(change) == 0:
                raise DomainError("coordinate change is not invertible at the origin",
                                  point=[_rational_str(x) for x in record.coordinates])
        local = local_shift(h, record.coordinates, change)
        convenient = is_convenient(local)
        if convenient:
            nondegenerate = is_newton_nondegenerate(local, settings)
            reason = None if nondegenerate else "degenerate"
        else:
            nondegenerate = False
            reason = "not convenient"
        points.append({
            "point": [_rational_str(x) for x in record.coordinates],
            "mu": record.local_milnor,
            "change": [serialize(phi) for phi in change] if change else "identity",
            "convenient": convenient,
            "nondegenerate": nondegenerate,
            "principal_part": serialize(principal_part(local)),
            "reason": reason,
            "local_equation": serialize(local),
        })
        locals_.append(local)
    verdict = all(p["convenient"] and p["nondegenerate"] for p in points)
    logger.info(f"pre-non-degeneracy for w={tuple(w)}: {verdict}")
    return {"verdict": verdict, "chart": cone.to_json(), "points": points,
            "records": records, "local_equations": locals_}


# local data files

def load_local_data(payload, nvars):
    """Parse [{chart, point, mu, change, zeta}, ...] for charts in nvars variables"""
    if isinstance(payload, str):
        payload = json.loads(payload)
    records = []
    for entry in payload:
        try:
            chart = tuple(tuple(int(x) for x in g) for g in entry["chart"])
            point = entry.get("point")
            point = tuple(Fraction(str(x)) for x in point) if point is not None else None
            change = entry.get("change")
            if change is not None:
                change = [parse(text, nvars - 1) for text in change]
            zeta = entry.get("zeta")
            records.append(LocalDataRecord(chart=chart, point=point, mu=entry.get("mu"),
                                           change=change, zeta=zeta))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed local data entry: {exc}", entry=entry) from exc
    return records


def changes_from_local_data(records):
    return {r.point: r.change for r in records if r.point is not None and r.change is not None}
