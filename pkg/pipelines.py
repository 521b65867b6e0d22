"""
pipelines.py - Shift formula, Milnor-Orlik, mu*-triples and Zariski reports

Features:
- ShiftInput for a convenient weighted homogeneous f and the shifted
  function g_k = f + z_k^(d_k+m)
- Hypothesis battery with named checks, shared by every pipeline
- Shift formula mu(g_k) = prod(d_i - 1) + m w_k mu_tot with an evidence
  trail and optional cross-checks against the linear-algebra Milnor number
  and the Oka zeta-function
- mu*-triple of g = f + z_k^(d+m) for homogeneous curves f
- Zeta-multiplicity check against the Varchenko-derived oracle
- Zariski pair report for two projective curves, analysed in two threads
"""

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from exact_linalg import is_primitive
from fan_toric import Cone, regular_chart
from milnor_linear import MilnorSettings, milnor_number_with, mu_star
from newton_geometry import coordinate_subsets, is_convenient
from nondegeneracy import (
    SingularPointRecord, changes_from_local_data, is_newton_nondegenerate, verify_pre_nondegenerate,
)
from symbolic_poly import (
    Polynomial, is_reduced_homogeneous, is_weighted_homogeneous, multiplicity, restrict,
    serialize, weighted_min,
)
from toolkit_errors import (
    AlgebraicPointError, CertificationError, DomainError, HypothesisError,
    NonIsolatedSingularityError, ToolkitError, UndecidedError,
)
from zeta_engine import milnor_from_zeta, oka_zeta_for, zeta_multiplicity_factor

logger = logging.getLogger(__name__)

CITATIONS = {
    "shift": "shift formula: mu(g_k) = prod(d_i - 1) + m * w_k * mu_tot",
    "milnor-orlik": "Milnor-Orlik formula: mu = prod(d / w_i - 1)",
    "oka": "Oka formula: zeta = zeta(f_s) * prod (1 - t^d(w))^((-1)^(n-1) mu_tot) * prod local zetas",
    "varchenko": "Varchenko formula: zeta = prod_I prod_w (1 - t^d(w; f^I))^(-chi(w))",
    "mu-star": "mu*(f + z^(d+m)) = ((d-1)^3 + m mu_tot, (d-1)^2, d-1)",
    "zeta-degree": "deg zeta = -1 + (-1)^n mu",
    "zariski": "candidates share zeta and mu*; separation in the mu*-constant stratum is cited, not computed",
    "newton-polyhedron": "Newton polyhedron: convex hull of supp(f) + R_+^n, compact faces only",
    "dual-diagram": "dual Newton diagram: cones of weights attaining the same face of f",
    "kouchnirenko": "Kouchnirenko: nu(f) = sum_I (-1)^(n-|I|) |I|! V_I(f)",
    "nondegeneracy": "f_Delta has no critical point in the torus for every compact face Delta",
    "acampo": "A'Campo formula: zeta = prod_j (1 - t^m_j)^(-chi(E_j))",
    "milnor-truncation": "mu = dim O / (J(f) + m^(t+1)) once m^(t+1) lies in J(f)",
    "w-strata": "W(n, m, mu) and W*(n, m, mu*): truncations of order m with fixed mu or mu*",
    "fan": "regular fan admissible for the dual Newton diagram",
    "chart": "toric chart pullback: z_i = prod_j x_j^(p_ji)",
}


def milnor_orlik(w, d):
    """prod (d / w_i - 1) as an exact rational"""
    if any(x == 0 for x in w):
        raise DomainError("Milnor-Orlik formula needs nonzero weights", w=tuple(w))
    value = Fraction(1)
    for x in w:
        value *= Fraction(d, x) - 1
    if value.denominator != 1:
        logger.warning(f"Milnor-Orlik value {value} for w={tuple(w)}, d={d} is not an integer")
    return value


@dataclass
class ShiftInput:
    f: Polynomial
    w: tuple
    d: int
    d_exponents: tuple
    k: int
    m: int

    @classmethod
    def build(cls, f, w, k, m):
        w = tuple(int(x) for x in w)
        if len(w) != f.nvars:
            raise DomainError(f"weight has {len(w)} entries for {f.nvars} variables")
        if not 1 <= k <= f.nvars:
            raise DomainError(f"shift index k={k} outside 1..{f.nvars}", k=k)
        if m < 1:
            raise DomainError("shift amount m must be at least 1", m=m)
        d = weighted_min(f, w)[0]
        exponents = tuple(d // x if x and d % x == 0 else None for x in w)
        return cls(f=f, w=w, d=d, d_exponents=exponents, k=k, m=m)

    def shifted(self):
        """g_k = f + z_k^(d_k + m)"""
        d_k = self.d_exponents[self.k - 1]
        if d_k is None:
            raise DomainError(f"w_k does not divide d for k={self.k}", k=self.k)
        exponents = tuple(d_k + self.m if i == self.k - 1 else 0 for i in range(self.f.nvars))
        return self.f + Polynomial.monomial(exponents)

    def to_dict(self):
        return {
            "f": serialize(self.f),
            "w": list(self.w),
            "d": self.d,
            "d_exponents": list(self.d_exponents),
            "k": self.k,
            "m": self.m,
        }


@dataclass
class HypothesisBattery:
    checks: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    cone: object = None

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def failing(self):
        return [name for name, ok in self.checks.items() if not ok]

    @property
    def mu_total(self):
        return sum(r.local_milnor for r in self.records)

    def to_dict(self):
        return {"checks": dict(self.checks), "evidence": self.evidence, "mu_tot": self.mu_total}


def _safe_check(name, evidence, func):
    """Run one check; toolkit failures count as a failed check with evidence"""
    try:
        return bool(func())
    except (UndecidedError, NonIsolatedSingularityError, DomainError) as exc:
        evidence[name] = exc.to_dict()
        return False


def _chart_from_records(w, records):
    """The chart named by local data whose first generator is w, if any"""
    for record in records:
        if record.chart and tuple(record.chart[0]) == tuple(w):
            return Cone(record.chart)
    return None


def hypothesis_battery(inp, cone=None, changes=None, local_records=None,
                       nd_settings=None, milnor_settings=None):
    """Named booleans for the shift-formula hypotheses"""
    f, w = inp.f, inp.w
    n = f.nvars
    local_records = local_records or []
    changes = dict(changes or {})
    changes.update(changes_from_local_data(local_records))
    battery = HypothesisBattery()
    checks, evidence = battery.checks, battery.evidence

    checks["primitive-weight"] = is_primitive(w) and all(x > 0 for x in w)
    checks["weighted-homogeneous"] = is_weighted_homogeneous(f, w)
    checks["convenient"] = is_convenient(f)
    checks["pure-powers"] = all(
        e is not None and f.coefficient(tuple(e if j == i else 0 for j in range(n))) != 0
        for i, e in enumerate(inp.d_exponents)
    )

    def proper_restrictions():
        failing = [
            list(subset) for subset in coordinate_subsets(n)
            if len(subset) < n and not restrict(f, subset).is_zero()
            and not is_newton_nondegenerate(restrict(f, subset), nd_settings)
        ]
        if failing:
            evidence["degenerate-restrictions"] = failing
        return not failing

    checks["proper-restrictions-nondegenerate"] = _safe_check(
        "proper-restrictions-nondegenerate", evidence, proper_restrictions)

    if not (checks["primitive-weight"] and checks["weighted-homogeneous"]):
        checks["one-dimensional-singular-locus"] = False
        checks["pre-nondegenerate"] = False
        return battery

    battery.cone = cone or _chart_from_records(w, local_records) or regular_chart(w)
    try:
        report = verify_pre_nondegenerate(f, w, changes, battery.cone, nd_settings, milnor_settings)
        battery.records = report["records"]
        checks["one-dimensional-singular-locus"] = True
        checks["pre-nondegenerate"] = report["verdict"]
        evidence["singular-points"] = [r.to_dict() for r in report["records"]]
        evidence["pre-nondegenerate"] = [
            {key: value for key, value in p.items() if key != "local_equation"} for p in report["points"]
        ]
    except AlgebraicPointError as exc:
        manual = [r for r in local_records if r.mu is not None]
        evidence["singular-points"] = exc.to_dict()
        checks["one-dimensional-singular-locus"] = bool(manual)
        checks["pre-nondegenerate"] = bool(manual)
        if manual:
            battery.records = [
                SingularPointRecord(chart=battery.cone.generators, coordinates=r.point,
                                    local_milnor=int(r.mu)) for r in manual
            ]
            evidence["pre-nondegenerate"] = "user-asserted"
    except (NonIsolatedSingularityError, UndecidedError, DomainError) as exc:
        evidence["singular-points"] = exc.to_dict()
        checks["one-dimensional-singular-locus"] = False
        checks["pre-nondegenerate"] = False
    logger.info(f"hypothesis battery: {sum(checks.values())}/{len(checks)} checks pass")
    return battery


@dataclass
class ShiftResult:
    mu: int
    mu_tot: int
    evidence: dict = field(default_factory=dict)

    def to_dict(self):
        return {"mu": self.mu, "mu_tot": self.mu_tot, "evidence": self.evidence,
                "citations": [CITATIONS["shift"], CITATIONS["milnor-orlik"]]}


def shift_milnor(inp, cone=None, changes=None, local_records=None, cross_check=False,
                 zeta_check=False, nd_settings=None, milnor_settings=None):
    """Milnor number of g_k by the shift formula, hypotheses checked first"""
    changes = dict(changes or {})
    changes.update(changes_from_local_data(local_records or []))
    battery = hypothesis_battery(inp, cone, changes, local_records, nd_settings, milnor_settings)
    if not battery.passed:
        raise HypothesisError(f"shift formula hypotheses fail: {', '.join(battery.failing)}",
                              failing=battery.failing, evidence=battery.evidence)
    mu_tot = battery.mu_total
    base = 1
    for e in inp.d_exponents:
        base *= e - 1
    w_k = inp.w[inp.k - 1]
    mu = base + inp.m * w_k * mu_tot
    evidence = {
        "input": inp.to_dict(),
        "hypotheses": battery.to_dict(),
        "milnor_orlik": base,
        "slope": w_k * mu_tot,
    }
    g = inp.shifted()
    if cross_check:
        report = milnor_number_with(g, milnor_settings or MilnorSettings())
        evidence["milnor_linear"] = report.to_dict()
        if report.mu != mu:
            raise CertificationError(f"shift formula gives {mu}, linear algebra gives {report.mu}",
                                     formula=mu, linear=report.mu)
    if zeta_check:
        result, _ = oka_zeta_for(g, charts={inp.w: battery.cone}, changes=changes,
                                 local_records=local_records, settings=nd_settings,
                                 milnor_settings=milnor_settings)
        from_zeta = milnor_from_zeta(result.zeta, g.nvars)
        evidence["zeta"] = result.to_dict()
        if from_zeta != mu:
            raise CertificationError(f"shift formula gives {mu}, zeta degree gives {from_zeta}",
                                     formula=mu, zeta=from_zeta)
    logger.info(f"shift formula: mu(g_{inp.k}) = {mu} with mu_tot = {mu_tot}")
    return ShiftResult(mu=mu, mu_tot=mu_tot, evidence=evidence)


def mu_star_triple(d, m, mu_tot):
    """((d-1)^3 + m mu_tot, (d-1)^2, d-1)"""
    if d < 2 or m < 1 or mu_tot < 0:
        raise DomainError("mu* triple needs d >= 2, m >= 1, mu_tot >= 0", d=d, m=m, mu_tot=mu_tot)
    return ((d - 1) ** 3 + m * mu_tot, (d - 1) ** 2, d - 1)


def zeta_multiplicity_check(g, zeta, d=None, mu_tot=0):
    """Compare the zeta-multiplicity factor of g with its oracles

    For g = f + z_k^(d+m) with f homogeneous of degree d in 3 variables the
    exponent must be -(d^2 - 3d + 3) + mu_tot.
    """
    period, exponent = zeta_multiplicity_factor(zeta)
    mult = multiplicity(g)
    result = {
        "zeta_multiplicity": period,
        "exponent": exponent,
        "multiplicity": mult,
        "bounded_by_multiplicity": period >= mult,
    }
    if d is not None:
        oracle = -(d * d - 3 * d + 3) + mu_tot
        printed = -(d * d + 3 * d - 3) + mu_tot
        result.update({
            "oracle_exponent": oracle,
            "matches_oracle": period == d and exponent == oracle,
            "printed_constant": d * d + 3 * d - 3,
            "printed_constant_matches": exponent == printed,
        })
        if exponent != printed:
            logger.warning(
                f"zeta-multiplicity exponent {exponent} disagrees with the constant "
                f"d^2+3d-3 = {d * d + 3 * d - 3}; the derived value -(d^2-3d+3) = {-(d * d - 3 * d + 3)} fits"
            )
    return result


# Zariski pairs

@dataclass
class CurveAnalysis:
    f: Polynomial
    checks: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    zeta: object = None
    mu_star: tuple = None
    mu_tot: int = None

    def to_dict(self):
        return {
            "f": serialize(self.f),
            "hypotheses": dict(self.checks),
            "evidence": self.evidence,
            "zeta": self.zeta.to_pairs() if self.zeta is not None else None,
            "zeta_display": self.zeta.display() if self.zeta is not None else None,
            "mu_star": list(self.mu_star) if self.mu_star else None,
            "mu_tot": self.mu_tot,
        }


@dataclass
class ZariskiReport:
    inputs: dict
    curves: list
    verdict: str

    @property
    def hypotheses(self):
        return [c.checks for c in self.curves]

    def to_dict(self):
        return {
            "inputs": self.inputs,
            "hypotheses": {f"curve{i}": c.checks for i, c in enumerate(self.curves)},
            "zeta": [c.zeta.to_pairs() if c.zeta is not None else None for c in self.curves],
            "mu_star": [list(c.mu_star) if c.mu_star else None for c in self.curves],
            "curves": [c.to_dict() for c in self.curves],
            "verdict": self.verdict,
            "citations": [CITATIONS["oka"], CITATIONS["mu-star"], CITATIONS["zariski"]],
        }


def analyse_curve(f, k, m, cone=None, local_records=None, milnor_check=False,
                  nd_settings=None, milnor_settings=None):
    """Hypotheses, zeta and mu* of g = f + z_k^(d+m) for a homogeneous curve f"""
    analysis = CurveAnalysis(f=f)
    checks = analysis.checks
    n = f.nvars
    degrees = {sum(e) for e in f.support}
    checks["homogeneous"] = len(degrees) == 1 and n == 3
    if not checks["homogeneous"]:
        return analysis
    d = degrees.pop()
    checks["reduced"] = is_reduced_homogeneous(f)
    inp = ShiftInput.build(f, (1,) * n, k, m)
    battery = hypothesis_battery(inp, cone, None, local_records, nd_settings, milnor_settings)
    checks.update(battery.checks)
    analysis.evidence = battery.evidence
    if not all(checks.values()):
        return analysis
    analysis.mu_tot = battery.mu_total
    g = inp.shifted()
    changes = changes_from_local_data(local_records or [])
    result, _ = oka_zeta_for(g, charts={inp.w: battery.cone}, changes=changes,
                             local_records=local_records, settings=nd_settings,
                             milnor_settings=milnor_settings)
    analysis.zeta = result.zeta
    analysis.mu_star = mu_star_triple(d, m, analysis.mu_tot)
    analysis.evidence["zeta_multiplicity"] = zeta_multiplicity_check(g, result.zeta, d, analysis.mu_tot)
    if milnor_check:
        computed = mu_star(g, milnor_settings or MilnorSettings())
        analysis.evidence["milnor_linear_mu_star"] = computed.to_dict()
        if computed.values != analysis.mu_star:
            raise CertificationError("mu* from linear algebra disagrees with the triple formula",
                                     formula=list(analysis.mu_star), linear=list(computed.values))
    return analysis


def zariski_surface_report(f0, f1, k=1, m=1, cones=(None, None), local_data=(None, None),
                           milnor_check=False, nd_settings=None, milnor_settings=None):
    """Compare g_l = f_l + z_k^(d+m) for two curves; the analyses run in parallel threads"""
    curves = [f0, f1]
    results = [None, None]
    errors = [None, None]

    def worker(index):
        try:
            results[index] = analyse_curve(curves[index], k, m, cones[index], local_data[index],
                                           milnor_check, nd_settings, milnor_settings)
        except ToolkitError as exc:
            errors[index] = exc
        except Exception as exc:
            logger.exception(f"curve {index} analysis failed")
            errors[index] = exc

    threads = [threading.Thread(target=worker, args=(i,), name=f"curve-{i}") for i in range(2)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    for error in errors:
        if error is not None:
            raise error

    if any(not all(a.checks.values()) for a in results):
        verdict = "hypotheses-failed"
    else:
        d0 = {sum(e) for e in f0.support}
        d1 = {sum(e) for e in f1.support}
        same = d0 == d1 and results[0].zeta == results[1].zeta and results[0].mu_star == results[1].mu_star
        verdict = "mu-star-zariski-candidate" if same else "mismatch"
    logger.info(f"Zariski report verdict: {verdict}")
    inputs = {"f0": serialize(f0), "f1": serialize(f1), "k": k, "m": m}
    return ZariskiReport(inputs=inputs, curves=results, verdict=verdict)
