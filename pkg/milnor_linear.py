"""
milnor_linear.py - Milnor numbers by linear algebra on truncated jets

Features:
- Truncated quotient P(n, m) / J_m(f) with the graded monomial basis
- Sparse fraction-free elimination pivoting on the lowest monomial
- Milnor number by stabilization (two equal consecutive truncations) or in
  safe mode (truncation at least mu), with a hard truncation budget
- Exact isolation test of the critical locus at the origin (Groebner bases
  of coordinate saturations) once the truncations keep growing
- Generic plane sections and the mu*-sequence with a certification report
- Sampled membership tests for W(n, m, mu), V(n, m, mu) and W*(n, m, mu*)
"""

import logging
import random
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations_with_replacement
from math import comb, gcd, lcm

import sympy
from tqdm import tqdm

from symbolic_poly import Polynomial, compose, multiplicity, partial, symbols, to_sympy
from toolkit_errors import CertificationError, DomainError, NonIsolatedSingularityError

logger = logging.getLogger(__name__)


@dataclass
class MilnorSettings:
    """Knobs read from the `milnor` section of config.yaml"""

    mode: str = "stabilized"
    start_truncation: int = 1
    max_truncation: int = 40
    isolation_check_after: int = 4
    trials: int = 3
    max_trials: int = 12
    coefficient_range: int = 7
    seed: int = 0
    progress: bool = False

    @classmethod
    def from_config(cls, section):
        section = section or {}
        return cls(
            mode=section.get("mode", cls.mode),
            start_truncation=int(section.get("start_truncation", cls.start_truncation)),
            max_truncation=int(section.get("max_truncation", cls.max_truncation)),
            isolation_check_after=int(section.get("isolation_check_after", cls.isolation_check_after)),
            trials=int(section.get("trials", cls.trials)),
            max_trials=int(section.get("max_trials", cls.max_trials)),
            coefficient_range=int(section.get("coefficient_range", cls.coefficient_range)),
            seed=int(section.get("seed", cls.seed)),
            progress=bool(section.get("progress", cls.progress)),
        )


@dataclass
class MilnorReport:
    mu: int
    certificate: str
    truncation: int
    history: list = field(default_factory=list)

    def to_dict(self):
        return {
            "mu": self.mu,
            "certificate": self.certificate,
            "truncation": self.truncation,
            "history": [[m, value] for m, value in self.history],
        }


@dataclass
class MuStarSequence:
    values: tuple
    certification: dict = field(default_factory=dict)

    def to_dict(self):
        return {"mu_star": list(self.values), "certification": self.certification}


class TruncatedSpace:
    """P(n, m): polynomials of total degree <= m in n variables"""

    def __init__(self, nvars, truncation):
        if truncation < 0:
            raise DomainError("truncation must be non-negative", m=truncation)
        self.nvars = nvars
        self.truncation = truncation
        self.basis = []
        for degree in range(truncation + 1):
            block = []
            for combo in combinations_with_replacement(range(nvars), degree):
                exponents = [0] * nvars
                for i in combo:
                    exponents[i] += 1
                block.append(tuple(exponents))
            block.sort(reverse=True)
            self.basis.extend(block)
        self.index = {e: i for i, e in enumerate(self.basis)}

    @property
    def dimension(self):
        return comb(self.nvars + self.truncation, self.nvars)

    def monomials_up_to(self, degree):
        return [e for e in self.basis if sum(e) <= degree]

    def vector(self, f):
        """Coordinates of pi_m(f) as a sparse {basis index: int} dict, content removed"""
        entries = {}
        for exponents, coefficient in f.terms.items():
            if sum(exponents) <= self.truncation:
                entries[self.index[exponents]] = coefficient
        if not entries:
            return {}
        scale = reduce(lcm, (c.denominator for c in entries.values()), 1)
        return _normalize({k: int(c * scale) for k, c in entries.items()})


def jacobian_span(f, truncation):
    """Spanning vectors pi_m(M * df/dz_i) of J_m(f) in P(n, m)"""
    space = TruncatedSpace(f.nvars, truncation)
    vectors = []
    seen = set()
    for i in range(1, f.nvars + 1):
        derivative = partial(f, i)
        if derivative.is_zero():
            continue
        order = multiplicity(derivative)
        for monomial in space.monomials_up_to(truncation - order):
            product = Polynomial(f.nvars, {
                tuple(a + b for a, b in zip(monomial, e)): c
                for e, c in derivative.terms.items()
                if sum(e) + sum(monomial) <= truncation
            })
            vector = space.vector(product)
            key = frozenset(vector.items())
            if vector and key not in seen:
                seen.add(key)
                vectors.append(vector)
    return space, vectors


def _normalize(vector):
    content = reduce(gcd, (abs(v) for v in vector.values()), 0)
    lead = vector[min(vector)]
    if lead < 0:
        content = -content
    return {k: v // content for k, v in vector.items()}


def sparse_rank(vectors):
    """Rank by fraction-free elimination, pivoting on the lowest basis index"""
    pivots = {}
    for vector in vectors:
        v = dict(vector)
        while v:
            lead = min(v)
            pivot = pivots.get(lead)
            if pivot is None:
                pivots[lead] = _normalize(v)
                break
            a, b = pivot[lead], v[lead]
            merged = {k: a * x for k, x in v.items()}
            for k, x in pivot.items():
                value = merged.get(k, 0) - b * x
                if value:
                    merged[k] = value
                else:
                    merged.pop(k, None)
            v = _normalize(merged) if merged else merged
    return len(pivots)


def truncated_milnor(f, truncation):
    """dim P(n, m) / J_m(f); the zero polynomial has value dim P(n, m)"""
    space, vectors = jacobian_span(f, truncation)
    return space.dimension - sparse_rank(vectors)


def is_isolated_at_origin(f):
    """The critical locus of f meets a small ball around the origin only in the origin

    Exact: for every coordinate z_i the saturation J(f) : z_i^inf must keep
    a generator that does not vanish at the origin.
    """
    gens = symbols(f.nvars)
    expr = to_sympy(f, gens)
    jacobian = [p for p in (sympy.diff(expr, g) for g in gens) if p != 0]
    if not jacobian:
        return False
    basis = sympy.groebner(jacobian, *gens, order="grevlex")
    if any(p.is_number for p in basis.exprs) or basis.is_zero_dimensional:
        return True
    origin = {g: 0 for g in gens}
    t = sympy.Dummy("t")
    for g in gens:
        # lex with t first: the t-free elements generate J : g^inf
        saturated = sympy.groebner(jacobian + [1 - t * g], t, *gens, order="lex")
        eliminated = [p for p in saturated.exprs if t not in p.free_symbols]
        if all(p.subs(origin) == 0 for p in eliminated):
            logger.debug(f"critical locus has a branch through the origin off {{{g} = 0}}")
            return False
    return True


def milnor_number(f, mode="stabilized", start_truncation=1, max_truncation=40, progress=False,
                  isolation_check_after=4):
    """Milnor number of f at the origin with a certificate

    When isolation_check_after truncations have not stabilized, the critical
    locus is tested once for isolation so non-isolated input fails early.
    """
    if f.is_zero():
        raise NonIsolatedSingularityError("the zero polynomial has a non-isolated singularity")
    if mode not in ("stabilized", "safe"):
        raise DomainError(f"unknown certification mode '{mode}'", mode=mode)
    if f.coefficient((0,) * f.nvars) != 0:
        f = f - f.coefficient((0,) * f.nvars)
    history = []
    previous = None
    steps = range(max(start_truncation, 0), max_truncation + 1)
    for m in tqdm(steps, desc="truncations", disable=not progress, leave=False):
        value = truncated_milnor(f, m)
        history.append((m, value))
        logger.debug(f"truncation {m}: dim P/J_m = {value}")
        if previous is not None and value == previous:
            if m >= value:
                return MilnorReport(mu=value, certificate="safe", truncation=m, history=history)
            if mode == "stabilized":
                return MilnorReport(mu=value, certificate="stabilized", truncation=m, history=history)
        previous = value
        if isolation_check_after and len(history) == isolation_check_after and not is_isolated_at_origin(f):
            raise NonIsolatedSingularityError(
                "critical locus has a positive-dimensional branch through the origin",
                truncation=m,
                history=history,
            )
    raise NonIsolatedSingularityError(
        f"dim P/J_m did not stabilize up to truncation {max_truncation}",
        max_truncation=max_truncation,
        history=history,
    )


def milnor_number_with(f, settings):
    return milnor_number(f, mode=settings.mode, start_truncation=settings.start_truncation,
                         max_truncation=settings.max_truncation, progress=settings.progress,
                         isolation_check_after=settings.isolation_check_after)


# plane sections

def hyperplane_restriction(f, coefficients):
    """phi_n(f, b): substitute z_n = sum b_i z_i, result in n-1 variables"""
    n = f.nvars
    if len(coefficients) != n - 1:
        raise DomainError(f"need {n - 1} hyperplane coefficients, got {len(coefficients)}")
    maps = [Polynomial.variable(n - 1, i) for i in range(1, n)]
    last = Polynomial.zero(n - 1)
    for i, b in enumerate(coefficients, start=1):
        last = last + Polynomial.variable(n - 1, i) * b
    return compose(f, maps + [last])


def graph_section(f, dimension, coefficients):
    """Restrict f to the i-plane z_j = sum_{l <= i} c_{j,l} z_l (j > i)"""
    n = f.nvars
    maps = [Polynomial.variable(dimension, i) for i in range(1, dimension + 1)]
    for row in coefficients:
        image = Polynomial.zero(dimension)
        for l, c in enumerate(row, start=1):
            image = image + Polynomial.variable(dimension, l) * c
        maps.append(image)
    if len(maps) != n:
        raise DomainError(f"section needs {n - dimension} coefficient rows")
    return compose(f, maps)


def _random_nonzero(rng, bound):
    value = 0
    while value == 0:
        value = rng.randint(-bound, bound)
    return value


def _random_plane(rng, n, dimension, bound):
    return [[_random_nonzero(rng, bound) for _ in range(dimension)] for _ in range(n - dimension)]


def section_milnor(f, dimension, settings=None):
    """mu^(i): Milnor number of a generic i-plane section, sampled

    The minimum over sampled planes is accepted once it is attained by at
    least three planes; otherwise trials and the coefficient range grow until
    max_trials.
    """
    settings = settings or MilnorSettings()
    n = f.nvars
    if not 1 <= dimension <= n:
        raise DomainError(f"section dimension {dimension} outside 1..{n}")
    if dimension == n:
        report = milnor_number_with(f, settings)
        return report.mu, {"planes": 0, "attained": 1, "certificate": report.certificate}
    rng = random.Random(settings.seed + 7919 * dimension)
    trials = settings.trials
    bound = settings.coefficient_range
    values = []
    while True:
        while len(values) < trials:
            plane = _random_plane(rng, n, dimension, bound)
            section = graph_section(f, dimension, plane)
            try:
                values.append(milnor_number_with(section, settings).mu)
            except NonIsolatedSingularityError:
                logger.debug(f"non-isolated section for plane {plane}, skipped")
                values.append(None)
        finite = [v for v in values if v is not None]
        if finite:
            best = min(finite)
            attained = finite.count(best)
            if attained >= 3:
                return best, {"planes": len(values), "attained": attained,
                              "coefficient_range": bound}
        if trials >= settings.max_trials:
            raise CertificationError(
                f"generic {dimension}-plane section not certified after {trials} planes",
                dimension=dimension, values=values,
            )
        trials = min(settings.max_trials, trials * 2)
        bound *= 2
        logger.info(f"escalating section sampling to {trials} planes, range {bound}")


def mu_star(f, settings=None):
    """(mu^(n), ..., mu^(1)) with per-entry certification"""
    settings = settings or MilnorSettings()
    n = f.nvars
    values = []
    certification = {}
    for dimension in range(n, 0, -1):
        value, evidence = section_milnor(f, dimension, settings)
        values.append(value)
        certification[f"mu{dimension}"] = evidence
    expected_last = multiplicity(f) - 1
    if values[-1] != expected_last:
        raise CertificationError(
            f"mu^(1) = {values[-1]} disagrees with mult - 1 = {expected_last}",
            mu1=values[-1], multiplicity=expected_last + 1,
        )
    certification["mu1_matches_multiplicity"] = True
    return MuStarSequence(values=tuple(values), certification=certification)


# truncated strata

def in_W(f, truncation, mu):
    """f in W(n, m, mu): dim P/J_m(f) == mu"""
    return truncated_milnor(f, truncation) == mu


def in_V(f, truncation, mu):
    """f in V(n, m, mu): rank J_m(f) < dim P(n, m) - mu"""
    space, vectors = jacobian_span(f, truncation)
    return sparse_rank(vectors) < space.dimension - mu


def generic_flag_predicates(f, truncation, mu_sequence, settings=None):
    """Sampled A and B predicates of the W* recursion at the top level

    A: some sampled hyperplane section lies in W*(n-1, m, mu*_{n-1}).
    B: some sampled hyperplane section has truncated value below mu^(n-1).
    """
    settings = settings or MilnorSettings()
    n = f.nvars
    rng = random.Random(settings.seed + 104729 * n)
    section_ok = False
    special = False
    for _ in range(settings.trials):
        b = [_random_nonzero(rng, settings.coefficient_range) for _ in range(n - 1)]
        section = hyperplane_restriction(f, b)
        value = truncated_milnor(section, truncation)
        if value < mu_sequence[1]:
            special = True
        if not section_ok and in_W_star(section, truncation, mu_sequence[1:], settings):
            section_ok = True
    return section_ok, special


def in_W_star(f, truncation, mu_sequence, settings=None):
    """f in W*(n, m, mu*) = A minus B, recursively down to W(1, m, mu^(1))"""
    mu_sequence = tuple(mu_sequence)
    if len(mu_sequence) != f.nvars:
        raise DomainError(f"mu* needs {f.nvars} entries, got {len(mu_sequence)}")
    if not in_W(f, truncation, mu_sequence[0]):
        return False
    if f.nvars == 1:
        return True
    section_ok, special = generic_flag_predicates(f, truncation, mu_sequence, settings)
    return section_ok and not special


def w_star_report(f, truncation, mu_sequence, settings=None):
    """Membership in W* with the certification flag m >= max(mu*)"""
    member = in_W_star(f, truncation, mu_sequence, settings)
    return {
        "member": member,
        "truncation": truncation,
        "mu_star": list(mu_sequence),
        "certified": truncation >= max(mu_sequence),
        "sampled": True,
    }
