"""
zeta_engine.py - Monodromy zeta-functions in factored form

Features:
- ZetaFactored: prod (1 - t^d)^nu as a period -> exponent map, closed under
  multiplication and integer powers; degree, pairs and display forms
- A'Campo formula from (multiplicity, Euler characteristic) data
- Varchenko formula from the Newton boundary, with a per-subset report and
  non-degeneracy checks on every f^I
- Oka formula for weakly almost non-degenerate functions: zeta of the
  Newton boundary, the correction over degenerate facets, and local zetas at
  the singular points of E(w)
- Milnor number from the degree, zeta-multiplicity and its factor
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from fan_toric import chart_pullback
from newton_geometry import chi, coordinate_subsets, newton_complex, restriction_facets
from nondegeneracy import (
    SingularPointRecord, chart_equation, face_nondegenerate, nd_profile, sing_points,
)
from symbolic_poly import Polynomial, compose, face_function, restrict, shift_exponents, weighted_min
from toolkit_errors import AlgebraicPointError, DomainError, HypothesisError

logger = logging.getLogger(__name__)


class ZetaFactored:
    """prod_d (1 - t^d)^nu_d with nonzero integer exponents"""

    __slots__ = ("_factors",)

    def __init__(self, factors=None):
        merged = {}
        for period, exponent in (factors.items() if isinstance(factors, dict) else (factors or [])):
            period = int(period)
            if period < 1:
                raise DomainError(f"zeta period must be positive, got {period}", period=period)
            merged[period] = merged.get(period, 0) + int(exponent)
        self._factors = {d: nu for d, nu in sorted(merged.items()) if nu != 0}

    @classmethod
    def one(cls):
        return cls()

    @property
    def factors(self):
        return dict(self._factors)

    def __mul__(self, other):
        merged = dict(self._factors)
        for d, nu in other._factors.items():
            merged[d] = merged.get(d, 0) + nu
        return ZetaFactored(merged)

    def __pow__(self, k):
        return ZetaFactored({d: nu * k for d, nu in self._factors.items()})

    def __truediv__(self, other):
        return self * other ** -1

    def __eq__(self, other):
        return isinstance(other, ZetaFactored) and self._factors == other._factors

    def __hash__(self):
        return hash(tuple(self._factors.items()))

    def __repr__(self):
        return f"ZetaFactored({self.display()})"

    def is_one(self):
        return not self._factors

    def degree(self):
        return sum(d * nu for d, nu in self._factors.items())

    def to_pairs(self):
        return [[d, nu] for d, nu in self._factors.items()]

    def display(self):
        if not self._factors:
            return "1"
        parts = []
        for d, nu in self._factors.items():
            base = f"(1-t^{d})" if d > 1 else "(1-t)"
            parts.append(base if nu == 1 else f"{base}^{nu}")
        return "".join(parts)

    def expand(self):
        """Rational function in t (display only)"""
        t = sympy.Symbol("t")
        expr = sympy.Integer(1)
        for d, nu in self._factors.items():
            expr *= (1 - t ** d) ** nu
        return sympy.factor(expr)


def zeta_from_pairs(pairs):
    return ZetaFactored([(d, nu) for d, nu in pairs])


def zeta_mul(a, b):
    return a * b


def zeta_pow(a, k):
    return a ** k


def degree(zeta):
    return zeta.degree()


def acampo_zeta(components):
    """prod (1 - t^m_i)^(-chi_i)"""
    factors = {}
    for m, euler in components:
        if m < 1:
            raise DomainError(f"multiplicity must be positive, got {m}", multiplicity=m)
        factors[m] = factors.get(m, 0) - int(euler)
    return ZetaFactored(factors)


# Varchenko

@dataclass
class VarchenkoReport:
    zeta: ZetaFactored
    per_subset: dict = field(default_factory=dict)
    contributions: list = field(default_factory=list)

    def to_dict(self):
        return {
            "zeta": self.zeta.to_pairs(),
            "display": self.zeta.display(),
            "degree": self.zeta.degree(),
            "per_subset": {
                ",".join(map(str, subset)): {"zeta": z.to_pairs(), "degree": z.degree()}
                for subset, z in self.per_subset.items()
            },
            "contributions": [
                {"I": list(subset), "w": list(w), "d": d, "chi": str(value)}
                for subset, w, d, value in self.contributions
            ],
        }


def check_restrictions_nondegenerate(f, settings=None):
    """Raise HypothesisError naming the first degenerate or undecided face of some f^I"""
    seen = {}
    for subset in coordinate_subsets(f.nvars):
        sub = restrict(f, subset)
        if sub.is_zero():
            continue
        for face in newton_complex(sub).compact_faces():
            key = face.points
            if key not in seen:
                seen[key] = face_nondegenerate(sub, face, settings)
            verdict = seen[key]
            if verdict.nondegenerate is not True:
                raise HypothesisError(
                    f"face of f^I is {'undecided' if verdict.undecided else 'degenerate'}",
                    hypothesis="newton-nondegenerate",
                    indices=list(subset),
                    face=sorted(face.points),
                    method=verdict.method,
                )
    return True


def varchenko_report(f, assume_nd=False, settings=None):
    """Varchenko's formula over all I with f^I not identically zero"""
    if f.is_zero():
        raise DomainError("zeta-function of the zero polynomial")
    if not assume_nd:
        check_restrictions_nondegenerate(f, settings)
    exponents = {}
    per_subset = {}
    contributions = []
    for subset in coordinate_subsets(f.nvars):
        sub = restrict(f, subset)
        if sub.is_zero():
            continue
        local = {}
        for w, d, _ in restriction_facets(f, subset):
            value = chi(w, f, subset)
            contributions.append((subset, w, d, value))
            local[d] = local.get(d, Fraction(0)) - value
            exponents[d] = exponents.get(d, Fraction(0)) - value
        if any(v.denominator != 1 for v in local.values()):
            per_subset[subset] = None
        else:
            per_subset[subset] = ZetaFactored({d: int(v) for d, v in local.items()})
    broken = {d: v for d, v in exponents.items() if v.denominator != 1}
    if broken:
        raise DomainError("non-integral zeta exponents after merging",
                          exponents={d: str(v) for d, v in broken.items()})
    zeta = ZetaFactored({d: int(v) for d, v in exponents.items()})
    per_subset = {k: v for k, v in per_subset.items() if v is not None}
    logger.debug(f"Varchenko zeta of {f}: {zeta.display()}")
    return VarchenkoReport(zeta=zeta, per_subset=per_subset, contributions=contributions)


def varchenko_zeta(f, assume_nd=False, settings=None):
    return varchenko_report(f, assume_nd=assume_nd, settings=settings).zeta


# Oka

@dataclass
class DegenerateFaceData:
    w: tuple
    d: int
    points: list = field(default_factory=list)
    local_zetas: list = field(default_factory=list)

    @property
    def mu_total(self):
        return sum(p.local_milnor for p in self.points)


@dataclass
class OkaResult:
    zeta: ZetaFactored
    zeta_prime: ZetaFactored
    zeta_fs: ZetaFactored

    def to_dict(self):
        return {
            "zeta": self.zeta.to_pairs(),
            "zeta_prime": self.zeta_prime.to_pairs(),
            "zeta_fs": self.zeta_fs.to_pairs(),
            "display": {
                "zeta": self.zeta.display(),
                "zeta_prime": self.zeta_prime.display(),
                "zeta_fs": self.zeta_fs.display(),
            },
            "degree": self.zeta.degree(),
        }


def local_polynomial(cofactor, point, change, divisor_multiplicity):
    """x1^d * cofactor(x1, p + Phi(x')) in local coordinates at p"""
    n = cofactor.nvars
    if len(point) != n - 1:
        raise DomainError(f"point needs {n - 1} coordinates, got {len(point)}")
    maps = [Polynomial.variable(n, 1)]
    for i, p in enumerate(point, start=2):
        if change is None:
            phi = Polynomial.variable(n, i)
        else:
            phi = Polynomial(n, {(0,) + e: c for e, c in change[i - 2].terms.items()})
            if phi.coefficient((0,) * n) != 0:
                raise DomainError("coordinate change does not fix the origin")
        maps.append(phi + Fraction(p))
    local = compose(cofactor, maps)
    return shift_exponents(local, (divisor_multiplicity,) + (0,) * (n - 1), laurent=False)


def local_zeta(cofactor, point, change, divisor_multiplicity, assume_nd=False, settings=None):
    """Varchenko zeta of the local function at a singular point of E(w)"""
    local = local_polynomial(cofactor, point, change, divisor_multiplicity)
    return varchenko_zeta(local, assume_nd=assume_nd, settings=settings)


def oka_zeta(f, degenerate_data, degenerate_facets=None, assume_nd=False, settings=None):
    """zeta, zeta' and zeta_{f_s} for a weakly almost non-degenerate f

    degenerate_facets, when given, is the P0 list from nd_profile and must
    match the facets covered by degenerate_data.
    """
    n = f.nvars
    covered = sorted(tuple(entry.w) for entry in degenerate_data)
    if degenerate_facets is not None:
        expected = sorted(tuple(w) for w, _ in degenerate_facets)
        if expected != covered:
            raise DomainError("degenerate facet data does not match P0",
                              expected=expected, supplied=covered)
    zeta_fs = varchenko_zeta(f, assume_nd=True)
    zeta_prime = zeta_fs
    locals_product = ZetaFactored.one()
    for entry in degenerate_data:
        if len(entry.local_zetas) != len(entry.points):
            raise DomainError("missing local zeta for some singular point", w=tuple(entry.w),
                              points=len(entry.points), local_zetas=len(entry.local_zetas))
        zeta_prime = zeta_prime * ZetaFactored({entry.d: (-1) ** (n - 1) * entry.mu_total})
        for local in entry.local_zetas:
            locals_product = locals_product * local
    zeta = zeta_prime * locals_product
    logger.info(f"Oka zeta: {zeta.display()} (zeta' = {zeta_prime.display()})")
    return OkaResult(zeta=zeta, zeta_prime=zeta_prime, zeta_fs=zeta_fs)


def milnor_from_zeta(zeta, n):
    """mu = (-1)^n (deg zeta + 1)"""
    mu = (-1) ** n * (zeta.degree() + 1)
    if mu < 0:
        raise DomainError(f"zeta degree {zeta.degree()} gives negative Milnor number", mu=mu)
    return mu


def zeta_multiplicity_factor(zeta):
    if zeta.is_one():
        raise DomainError("zeta-multiplicity of the trivial zeta-function")
    d = min(zeta.factors)
    return d, zeta.factors[d]


def zeta_multiplicity(zeta):
    return zeta_multiplicity_factor(zeta)[0]


def degenerate_face_data(g, w, cone=None, changes=None, local_records=None,
                         assume_nd=False, settings=None, milnor_settings=None):
    """DegenerateFaceData for the facet w of g, local zetas computed in a chart

    Points with irrational coordinates are taken from local_records, which
    must then carry mu and zeta.
    """
    changes = changes or {}
    local_records = local_records or []
    w = tuple(w)
    d = weighted_min(g, w)[0]
    f_w = face_function(g, w)
    cone, _ = chart_equation(f_w, w, cone)
    cofactor = chart_pullback(g, cone).cofactor
    supplied = {r.point: r for r in local_records if tuple(r.chart) == cone.generators}
    try:
        points = sing_points(f_w, w, cone, milnor_settings)
    except AlgebraicPointError:
        manual = [r for r in supplied.values() if r.mu is not None and r.zeta is not None]
        if not manual:
            raise
        logger.info(f"using {len(manual)} user supplied singular points for w={w}")
        points = [SingularPointRecord(chart=cone.generators, coordinates=r.point, local_milnor=int(r.mu))
                  for r in manual]
        return DegenerateFaceData(w=w, d=d, points=points,
                                  local_zetas=[zeta_from_pairs(r.zeta) for r in manual])
    zetas = []
    for record in points:
        user = supplied.get(record.coordinates)
        if user is not None and user.zeta is not None:
            zetas.append(zeta_from_pairs(user.zeta))
            continue
        change = changes.get(record.coordinates)
        if change is None and user is not None:
            change = user.change
        zetas.append(local_zeta(cofactor, record.coordinates, change, d,
                                assume_nd=assume_nd, settings=settings))
    return DegenerateFaceData(w=w, d=d, points=points, local_zetas=zetas)


def oka_zeta_for(g, charts=None, changes=None, local_records=None, assume_nd=False,
                 settings=None, milnor_settings=None):
    """Oka zeta of g with its degenerate facets found by nd_profile

    charts maps a facet normal to the regular cone used for it.
    """
    charts = charts or {}
    profile = nd_profile(g, settings, milnor_settings)
    if not profile.weakly_almost:
        raise HypothesisError("function is not weakly almost Newton non-degenerate",
                              hypothesis="weakly-almost-nondegenerate",
                              degenerate_faces=[sorted(face) for face in profile.degenerate_faces])
    data = [
        degenerate_face_data(g, w, charts.get(tuple(w)), changes, local_records,
                             assume_nd, settings, milnor_settings)
        for w, _ in profile.degenerate_facets
    ]
    return oka_zeta(g, data, degenerate_facets=profile.degenerate_facets), data
