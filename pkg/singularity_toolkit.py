"""
singularity_toolkit.py - Command-line surface of the singularity toolkit

Features:
- Subcommands for Newton polyhedra, non-degeneracy, zeta-functions, Milnor
  numbers, mu*-sequences, the shift formula, Zariski reports and fans
- YAML configuration (config.yaml or --config) with command-line overrides
- Rotating log file plus console logging on stderr; stdout carries JSON only
- Structured JSON errors and stable exit codes (0 ok, 1 usage, 2 hypothesis
  or computation failure)

Run with:  python singularity_toolkit.py milnor -n 2 "z1^2+z2^3"
"""

import argparse
import json
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

import yaml

from fan_toric import (
    Cone, chart_pullback, chart_pullback_shifted, fan_from_dual_diagram, fan_from_json,
    fan_to_json, regular_refinement, validate_fan,
)
from milnor_linear import MilnorSettings, in_W, milnor_number_with, mu_star, truncated_milnor, w_star_report
from newton_geometry import (
    complex_to_json, dual_newton_diagram, diagram_to_json, is_convenient, newton_complex,
    newton_number, principal_part,
)
from nondegeneracy import NondegeneracySettings, changes_from_local_data, load_local_data, nd_profile
from pipelines import (
    CITATIONS, ShiftInput, milnor_orlik, shift_milnor, zariski_surface_report,
)
from symbolic_poly import parse, serialize
from toolkit_errors import HypothesisError, PolynomialSyntaxError, ToolkitError
from zeta_engine import acampo_zeta, milnor_from_zeta, oka_zeta_for, varchenko_report

DEFAULT_CONFIG = {
    "logging": {
        "level": "INFO",
        "file": "logs/toolkit.log",
        "max_log_size": 5 * 1024 * 1024,
        "backup_count": 3,
        "console": True,
    },
    "milnor": {},
    "nondegeneracy": {},
    "fan": {"coverage_samples": 1000, "stellar_budget": 64},
    "output": {"indent": 2, "progress": False},
}

COMMAND_CITATIONS = {
    "newton": ["newton-polyhedron", "kouchnirenko"],
    "dual": ["dual-diagram"],
    "nd": ["nondegeneracy"],
    "newton-number": ["kouchnirenko"],
    "zeta-varchenko": ["varchenko", "zeta-degree"],
    "zeta-oka": ["oka", "zeta-degree"],
    "zeta-acampo": ["acampo"],
    "milnor": ["milnor-truncation", "milnor-orlik"],
    "mu-star": ["mu-star", "milnor-truncation"],
    "in-w": ["w-strata"],
    "in-w-star": ["w-strata", "mu-star"],
    "shift": ["shift", "milnor-orlik"],
    "zariski-report": ["oka", "mu-star", "zariski"],
    "fan-validate": ["fan", "dual-diagram"],
    "chart-pullback": ["chart"],
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class UsageError(Exception):
    """Bad arguments, unreadable files or malformed configuration"""


def _merge(defaults, overrides):
    merged = {}
    for key, value in defaults.items():
        if isinstance(value, dict):
            merged[key] = _merge(value, (overrides or {}).get(key) or {})
        else:
            merged[key] = (overrides or {}).get(key, value)
    for key, value in (overrides or {}).items():
        merged.setdefault(key, value)
    return merged


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma separated integer list, got '{text}'") from exc


def _parse_chart(text):
    return Cone(tuple(tuple(_int_list(row)) for row in text.split(";")))


class SingularityToolkit:
    """Reads config, sets up logging and dispatches subcommands"""

    _handlers = []

    def __init__(self, config_path=None):
        self.config = self._load_config(config_path)
        self.setup_logging()

    def _load_config(self, config_path):
        """Load configuration from YAML file"""
        explicit = config_path is not None
        path = Path(config_path or "config.yaml")
        if not path.exists():
            if explicit:
                raise UsageError(f"config file not found: {path}")
            return _merge(DEFAULT_CONFIG, {})
        try:
            with open(path, "r") as f:
                loaded = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise UsageError(f"Error loading config {path}: {e}") from e
        if not isinstance(loaded, dict):
            raise UsageError(f"config {path} is not a mapping")
        return _merge(DEFAULT_CONFIG, loaded)

    def setup_logging(self):
        """Setup rotating log handler and console output on stderr"""
        section = self.config["logging"]
        log_level = getattr(logging, str(section.get("level", "INFO")).upper(), logging.INFO)
        root = logging.getLogger()
        for handler in SingularityToolkit._handlers:
            root.removeHandler(handler)
        SingularityToolkit._handlers = []

        formatter = logging.Formatter('%(asctime)s %(levelname)s [%(threadName)s] %(message)s')
        log_file = section.get("file")
        if log_file:
            os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)
            handler = RotatingFileHandler(
                log_file,
                maxBytes=section.get("max_log_size", 5 * 1024 * 1024),
                backupCount=section.get("backup_count", 3),
            )
            handler.setFormatter(formatter)
            SingularityToolkit._handlers.append(handler)
        if section.get("console", True):
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setFormatter(formatter)
            SingularityToolkit._handlers.append(console_handler)
        for handler in SingularityToolkit._handlers:
            root.addHandler(handler)
        root.setLevel(log_level)
        self.logger = logging.getLogger("singularity_toolkit")

    # settings

    def milnor_settings(self, args):
        settings = MilnorSettings.from_config(self.config.get("milnor"))
        settings.progress = bool(self.config["output"].get("progress", False))
        if getattr(args, "mode", None):
            settings.mode = args.mode
        if getattr(args, "safe", False):
            settings.mode = "safe"
        if getattr(args, "seed", None) is not None:
            settings.seed = args.seed
        if getattr(args, "trials", None) is not None:
            settings.trials = args.trials
            settings.max_trials = max(settings.max_trials, args.trials)
        if getattr(args, "truncation", None) is not None:
            settings.start_truncation = args.truncation
        if getattr(args, "max_truncation", None) is not None:
            settings.max_truncation = args.max_truncation
        return settings

    def nd_settings(self, args):
        seed = args.seed if getattr(args, "seed", None) is not None else 0
        settings = NondegeneracySettings.from_config(self.config.get("nondegeneracy"), seed=seed)
        if getattr(args, "probabilistic", False):
            settings.probabilistic = True
        return settings

    # inputs

    def read_polynomial(self, text, n):
        """Polynomial from the command line or from a file holding it"""
        if os.path.isfile(text):
            with open(text, "r") as f:
                text = f.read().strip()
        return parse(text, n)

    def read_json(self, path):
        try:
            with open(path, "r") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read JSON file {path}: {e}") from e

    def local_records(self, path, n):
        return load_local_data(self.read_json(path), n) if path else []

    # commands

    def cmd_newton(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        payload = complex_to_json(newton_complex(f))
        payload["principal_part"] = serialize(principal_part(f))
        if is_convenient(f):
            payload["newton_number"] = newton_number(f)
        return payload

    def cmd_dual(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        return diagram_to_json(dual_newton_diagram(f))

    def cmd_nd(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        return nd_profile(f, self.nd_settings(args), self.milnor_settings(args)).to_dict()

    def cmd_newton_number(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        return {"nu": newton_number(f)}

    def cmd_zeta_varchenko(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        report = varchenko_report(f, assume_nd=args.assume_nd, settings=self.nd_settings(args))
        payload = report.to_dict()
        payload["factors"] = report.zeta.to_pairs()
        return payload

    def cmd_zeta_oka(self, args):
        g = self.read_polynomial(args.polynomial, args.n)
        records = self.local_records(args.local_data, args.n)
        charts = {record.chart[0]: Cone(record.chart) for record in records if record.chart}
        if args.chart:
            cone = _parse_chart(args.chart)
            charts[cone.generators[0]] = cone
        result, data = oka_zeta_for(
            g, charts=charts, changes=changes_from_local_data(records), local_records=records,
            assume_nd=args.assume_nd, settings=self.nd_settings(args),
            milnor_settings=self.milnor_settings(args),
        )
        payload = result.to_dict()
        payload["milnor_from_zeta"] = milnor_from_zeta(result.zeta, g.nvars)
        payload["degenerate_facets"] = [
            {
                "w": list(entry.w),
                "d": entry.d,
                "points": [p.to_dict() for p in entry.points],
                "local_zetas": [z.to_pairs() for z in entry.local_zetas],
            }
            for entry in data
        ]
        return payload

    def cmd_zeta_acampo(self, args):
        components = []
        for item in args.components.split(","):
            try:
                m, euler = item.split(":")
                components.append((int(m), int(euler)))
            except ValueError as exc:
                raise UsageError(f"component '{item}' is not of the form m:chi") from exc
        zeta = acampo_zeta(components)
        return {"factors": zeta.to_pairs(), "display": zeta.display(), "degree": zeta.degree()}

    def cmd_milnor(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        payload = milnor_number_with(f, self.milnor_settings(args)).to_dict()
        if args.w:
            if args.d is None:
                raise UsageError("--w needs --d for the Milnor-Orlik comparison")
            payload["milnor_orlik"] = str(milnor_orlik(_int_list(args.w), args.d))
        return payload

    def cmd_mu_star(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        return mu_star(f, self.milnor_settings(args)).to_dict()

    def cmd_in_w(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        return {
            "member": in_W(f, args.m, args.mu),
            "truncated_value": truncated_milnor(f, args.m),
            "m": args.m,
            "mu": args.mu,
        }

    def cmd_in_w_star(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        return w_star_report(f, args.m, _int_list(args.mu_star), self.milnor_settings(args))

    def cmd_shift(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        inp = ShiftInput.build(f, _int_list(args.w), args.k, args.m)
        records = self.local_records(args.local_data, args.n)
        cone = _parse_chart(args.chart) if args.chart else None
        result = shift_milnor(
            inp, cone=cone, local_records=records, cross_check=args.cross_check,
            zeta_check=args.zeta_check, nd_settings=self.nd_settings(args),
            milnor_settings=self.milnor_settings(args),
        )
        return result.to_dict()

    def cmd_zariski_report(self, args):
        f0 = self.read_polynomial(args.f0, 3)
        f1 = self.read_polynomial(args.f1, 3)
        report = zariski_surface_report(
            f0, f1, k=args.k, m=args.m,
            local_data=(self.local_records(args.local_data0, 3), self.local_records(args.local_data1, 3)),
            milnor_check=args.milnor_check, nd_settings=self.nd_settings(args),
            milnor_settings=self.milnor_settings(args),
        )
        return report.to_dict()

    def cmd_fan_validate(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        fan = fan_from_json(self.read_json(args.fan)) if args.fan else fan_from_dual_diagram(f)
        samples = args.samples
        if samples is None:
            samples = self.config["fan"].get("coverage_samples", 1000)
        seed = args.seed if args.seed is not None else 0
        if args.refine:
            fan = regular_refinement(fan, budget=self.config["fan"].get("stellar_budget", 64))
        result = validate_fan(fan, f, samples=samples, seed=seed)
        result["fan"] = fan_to_json(fan)
        return result

    def cmd_chart_pullback(self, args):
        f = self.read_polynomial(args.polynomial, args.n)
        cone = _parse_chart(args.chart)
        if args.k is not None:
            pull = chart_pullback_shifted(f, cone, args.k, args.m)
        else:
            pull = chart_pullback(f, cone)
        return {
            "chart": cone.to_json(),
            "multiplicities": list(pull.multiplicities),
            "cofactor": serialize(pull.cofactor),
            "free_of_first": pull.free_of_first,
        }

    # plumbing

    def emit(self, payload, args):
        indent = self.config["output"].get("indent", 2)
        text = json.dumps(payload, indent=indent, default=str)
        if args.output:
            with open(args.output, "w") as f:
                f.write(text + "\n")
        else:
            sys.stdout.write(text + "\n")

    def dispatch(self, args):
        handler = getattr(self, "cmd_" + args.command.replace("-", "_"))
        payload = handler(args)
        if hasattr(args, "polynomial") and "input" not in payload:
            payload = {"command": args.command, "input": self._canonical_input(args), **payload}
        payload.setdefault("citations", [CITATIONS[key] for key in COMMAND_CITATIONS[args.command]])
        return payload

    def _canonical_input(self, args):
        try:
            return serialize(self.read_polynomial(args.polynomial, args.n))
        except (PolynomialSyntaxError, OSError):
            return args.polynomial


def build_parser():
    parser = argparse.ArgumentParser(
        prog="singularity_toolkit",
        description="Exact Newton polyhedra, zeta-functions and Milnor numbers",
    )
    parser.add_argument("--config", help="YAML configuration file (default: ./config.yaml)")
    parser.add_argument("--output", help="write JSON here instead of stdout")
    parser.add_argument("--seed", type=int, help="seed for sampled planes and primes")
    parser.add_argument("--trials", type=int, help="number of sampled planes")
    sub = parser.add_subparsers(dest="command", required=True)

    def poly_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-n", type=int, required=True, help="number of variables")
        p.add_argument("polynomial", help="polynomial text or a file containing it")
        p.add_argument("--probabilistic", action="store_true",
                       help="decide faces with 3+ essential variables modulo random primes")
        return p

    def milnor_flags(p):
        p.add_argument("--safe", action="store_true", help="certify with truncation >= mu")
        p.add_argument("--mode", choices=["stabilized", "safe"])
        p.add_argument("--truncation", type=int, help="first truncation degree")
        p.add_argument("--max-truncation", type=int, help="stabilization budget")

    poly_command("newton", "Newton polyhedron face lattice")
    poly_command("dual", "dual Newton diagram")
    milnor_flags(poly_command("nd", "non-degeneracy profile"))
    poly_command("newton-number", "Kouchnirenko Newton number")

    p = poly_command("zeta-varchenko", "Varchenko zeta-function")
    p.add_argument("--assume-nd", action="store_true")

    p = poly_command("zeta-oka", "Oka zeta-function of a weakly almost non-degenerate function")
    p.add_argument("--assume-nd", action="store_true")
    p.add_argument("--local-data", help="JSON list of singular point records")
    p.add_argument("--chart", help="regular chart as 'g1;g2;g3' with comma separated entries")
    milnor_flags(p)

    p = sub.add_parser("zeta-acampo", help="A'Campo zeta-function from resolution data")
    p.add_argument("components", help="comma separated m:chi pairs")

    p = poly_command("milnor", "Milnor number by truncated linear algebra")
    milnor_flags(p)
    p.add_argument("--w", help="weights for a Milnor-Orlik comparison")
    p.add_argument("--d", type=int, help="weighted degree for the Milnor-Orlik comparison")

    milnor_flags(poly_command("mu-star", "mu*-sequence by generic plane sections"))

    p = poly_command("in-w", "membership in W(n, m, mu)")
    p.add_argument("--m", type=int, required=True, help="truncation degree")
    p.add_argument("--mu", type=int, required=True)

    p = poly_command("in-w-star", "membership in W*(n, m, mu*)")
    p.add_argument("--m", type=int, required=True, help="truncation degree")
    p.add_argument("--mu-star", required=True, help="comma separated mu* values")
    milnor_flags(p)

    p = poly_command("shift", "shift formula for g_k = f + z_k^(d_k+m)")
    p.add_argument("--w", required=True, help="comma separated weight vector")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--local-data", help="JSON list of singular point records")
    p.add_argument("--chart", help="regular chart as 'g1;g2;g3'")
    p.add_argument("--cross-check", action="store_true", help="recompute mu by linear algebra")
    p.add_argument("--zeta-check", action="store_true", help="recompute mu from the Oka zeta")
    milnor_flags(p)

    p = sub.add_parser("zariski-report", help="compare f0 + z_k^(d+m) and f1 + z_k^(d+m)")
    p.add_argument("f0")
    p.add_argument("f1")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--local-data0")
    p.add_argument("--local-data1")
    p.add_argument("--milnor-check", action="store_true", help="also compute mu* by linear algebra")
    p.add_argument("--probabilistic", action="store_true")
    milnor_flags(p)

    p = poly_command("fan-validate", "validate a fan against the dual Newton diagram")
    p.add_argument("--fan", help="fan JSON file (default: the dual diagram itself)")
    p.add_argument("--samples", type=int, help="sampled weights for the coverage check")
    p.add_argument("--refine", action="store_true", help="stellar refinement to a regular fan first")

    p = poly_command("chart-pullback", "toric chart pullback")
    p.add_argument("--chart", required=True, help="regular chart as 'g1;g2;g3'")
    p.add_argument("--k", type=int, help="shifted variable for f + z_k^(d_k+m)")
    p.add_argument("--m", type=int, default=1)
    return parser


def run(argv=None):
    """Parse argv, run one command, print JSON; returns the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        toolkit = SingularityToolkit(args.config)
    except UsageError as e:
        sys.stderr.write(json.dumps({"error": {"code": "usage-error", "message": str(e)}}) + "\n")
        return EXIT_USAGE

    logger = toolkit.logger
    try:
        payload = toolkit.dispatch(args)
        toolkit.emit(payload, args)
        if payload.get("verdict") == "hypotheses-failed":
            return EXIT_FAILURE
        return EXIT_OK
    except UsageError as e:
        logger.error(f"usage error: {e}")
        toolkit.emit({"error": {"code": "usage-error", "message": str(e)}}, args)
        return EXIT_USAGE
    except PolynomialSyntaxError as e:
        logger.error(f"syntax error: {e.message}")
        toolkit.emit({"error": e.to_dict()}, args)
        return EXIT_USAGE
    except HypothesisError as e:
        logger.error(f"hypothesis failed: {e.message}")
        toolkit.emit({"error": e.to_dict()}, args)
        return EXIT_FAILURE
    except ToolkitError as e:
        logger.error(f"{e.code}: {e.message}")
        toolkit.emit({"error": e.to_dict()}, args)
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
