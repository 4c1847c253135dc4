#!/usr/bin/env python3
"""
packlab command dispatcher
Parses the command line, runs one subcommand and renders its result
"""

import argparse
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from __version__ import get_version_info
from symplectic.blowup import (
    RadiiList,
    blow_up,
    correspond_cp2_to_s2xs2,
    correspond_s2xs2_to_cp2,
    correspondence_volumes,
)
from symplectic.errors import DimensionMismatchError, PacklabError, UncertifiedInvariantError
from symplectic.exceptional import (
    ClassFormatError,
    CP2BlowupClass,
    cp2_exceptional_classes,
    cremona_reduce,
    exceptional_set_for,
)
from symplectic.invariants import SearchBudget, d_omega, emptiness_certificate
from symplectic.model_core import (
    H2Class,
    ManifoldModel,
    RationalFormatError,
    parse_rational,
    validate,
)
from symplectic.packing import (
    PackingReport,
    form_class_certificate,
    n_threshold,
    packing_feasible,
    packing_number,
    vn_exact,
    vn_report,
)
from utils.config import LOG_LEVELS, OUTPUT_FORMATS, ConfigError, PacklabConfig, load_config
from utils.logger import configure_logger, logger
from utils.model_io import ModelSchemaError, model_loader, model_to_dict

from cli.gallery import gallery_report
from cli.render import format_class, rational_or_inf, render, render_json

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2


class UsageError(Exception):
    """Malformed command line"""


USAGE_ERRORS = (UsageError, ModelSchemaError, RationalFormatError, ClassFormatError, ConfigError)

Table = Tuple[Sequence[str], Sequence[Sequence[Any]]]


@dataclass
class CommandResult:
    payload: Dict[str, Any]
    table: Optional[Table] = None
    exit_code: int = EXIT_OK


class PacklabArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def rational_arg(text: str):
    try:
        return parse_rational(text)
    except RationalFormatError as e:
        raise argparse.ArgumentTypeError(str(e))


def int_at_least(minimum: int) -> Callable[[str], int]:
    def convert(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return convert


class PacklabCLI:
    """packlab command line"""

    def __init__(self, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None):
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.config = PacklabConfig()
        self.parser = self.build_parser()
        self.setup_commands()

    def setup_commands(self):
        """Map subcommands to handlers"""
        self.commands: Dict[str, Callable[[argparse.Namespace], CommandResult]] = {
            "d": self.cmd_d_omega,
            "vn": self.cmd_vn,
            "pnum": self.cmd_pnum,
            "feasible": self.cmd_feasible,
            "exc-check": self.cmd_exc_check,
            "exc-enumerate": self.cmd_exc_enumerate,
            "blowup": self.cmd_blowup,
            "correspond": self.cmd_correspond,
            "certify-empty": self.cmd_certify_empty,
            "validate": self.cmd_validate,
            "gallery": self.cmd_gallery,
        }

    def build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format (default: json)")
        common.add_argument("--quiet", action="store_true", help="Only log errors")
        common.add_argument("--config", help="YAML configuration file")
        common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="Log level")
        common.add_argument("--progress", action="store_true", help="Show progress bars on stderr")

        model = argparse.ArgumentParser(add_help=False)
        model.add_argument("--model", required=True, help="Model file or gallery:<name>")

        budget = argparse.ArgumentParser(add_help=False)
        budget.add_argument("--c1-max", type=int_at_least(2), help="Largest c1(B) searched")
        budget.add_argument("--coeff-max", type=int_at_least(1), help="Coefficient box bound")

        radii = argparse.ArgumentParser(add_help=False)
        radii.add_argument(
            "--radius2",
            "--capacity",
            dest="radii",
            type=rational_arg,
            action="append",
            default=[],
            help="Squared radius of one ball (repeatable)",
        )

        parser = PacklabArgumentParser(
            prog="packlab", description="Symplectic ball packing invariants"
        )
        parser.add_argument("--version", action="store_true", help="Print the version and exit")
        sub = parser.add_subparsers(dest="command", metavar="COMMAND")

        p = sub.add_parser("d", parents=[common, model, budget], help="Compute d_Omega")
        p.set_defaults(handler="d")

        p = sub.add_parser("vn", parents=[common, model, budget], help="Packing fraction v_N")
        p.add_argument("--n", type=int_at_least(1), required=True, help="Number of balls")
        p.add_argument("--exact", action="store_true", help="Exact v_N for built-in families")
        p.set_defaults(handler="vn")

        p = sub.add_parser("pnum", parents=[common, model], help="Packing number P")
        p.set_defaults(handler="pnum")

        p = sub.add_parser(
            "feasible", parents=[common, model, budget, radii], help="Test a packing by given balls"
        )
        p.set_defaults(handler="feasible")

        exc = sub.add_parser("exc", help="Exceptional classes")
        exc_sub = exc.add_subparsers(dest="exc_command", metavar="ACTION")
        exc_sub.required = True
        p = exc_sub.add_parser("check", parents=[common], help="Decide exceptionality of d;m1,...")
        p.add_argument("cls", metavar="CLASS", help="Class as d;m1,m2,...,mN")
        p.set_defaults(handler="exc-check")
        p = exc_sub.add_parser("enumerate", parents=[common], help="List exceptional classes")
        target = p.add_mutually_exclusive_group(required=True)
        target.add_argument("--points", type=int_at_least(0), help="Blow-up of CP2 at N <= 8 points")
        target.add_argument("--model", help="Model file or gallery:<name>")
        p.add_argument("--coeff-max", type=int_at_least(1), default=3, help="Box bound for user models")
        p.set_defaults(handler="exc-enumerate")

        p = sub.add_parser("blowup", parents=[common, model, budget, radii], help="Blow up points")
        p.add_argument("--points", type=int_at_least(1), required=True, help="Number of points")
        p.set_defaults(handler="blowup")

        p = sub.add_parser(
            "correspond", parents=[common, radii], help="S2xS2 <-> CP2 packing correspondence"
        )
        p.add_argument("--alpha", type=rational_arg, help="Area of the first sphere")
        p.add_argument("--beta", type=rational_arg, help="Area of the second sphere")
        p.add_argument("--scale", type=rational_arg, help="CP2 scale (inverse direction)")
        p.set_defaults(handler="correspond")

        p = sub.add_parser("certify-empty", parents=[common, model], help="Certify D_Omega is empty")
        p.set_defaults(handler="certify-empty")

        p = sub.add_parser("validate", parents=[common, model], help="Validate a model")
        p.set_defaults(handler="validate")

        p = sub.add_parser("gallery", parents=[common], help="Bundled example models")
        p.set_defaults(handler="gallery")

        return parser

    def run(self, argv: Sequence[str]) -> int:
        try:
            args = self.parser.parse_args(list(argv))
        except UsageError as e:
            return self._fail(EXIT_USAGE_ERROR, e)
        except SystemExit as e:
            # --help
            return e.code if isinstance(e.code, int) else EXIT_OK

        if args.version:
            info = get_version_info()
            self.stdout.write(f"packlab {info['version']} (built {info['build_date']})\n")
            return EXIT_OK
        if not getattr(args, "handler", None):
            return self._fail(EXIT_USAGE_ERROR, UsageError("packlab: a command is required"))

        try:
            self.config = self.configure(args)
            result = self.commands[args.handler](args)
        except USAGE_ERRORS as e:
            return self._fail(EXIT_USAGE_ERROR, e)
        except PacklabError as e:
            return self._fail(EXIT_DOMAIN_ERROR, e)
        except Exception as e:
            logger.error(f"Command {args.handler} failed: {e}")
            raise

        self.stdout.write(render(result.payload, self.config.output_format, result.table))
        return result.exit_code

    def configure(self, args: argparse.Namespace) -> PacklabConfig:
        """Flags override the config file, which overrides the environment"""
        config = load_config(args.config)
        if args.format:
            config.output_format = args.format
        if args.quiet:
            config.quiet = True
        if args.log_level:
            config.log_level = args.log_level
        if args.progress:
            config.progress = True
        config.check()
        configure_logger(config.effective_log_level(), config.log_file)
        return config

    def _fail(self, code: int, error: Exception) -> int:
        detail = {"type": type(error).__name__, "message": str(error)}
        if isinstance(error, ModelSchemaError) and error.path:
            detail["path"] = error.path
        self.stderr.write(render_json({"error": detail}))
        return code

    def _budget(self, args: argparse.Namespace) -> SearchBudget:
        return SearchBudget(
            c1_max=args.c1_max or self.config.c1_max,
            coeff_max=args.coeff_max or self.config.coeff_max,
        )

    def _radii(self, args: argparse.Namespace) -> RadiiList:
        return RadiiList(tuple(args.radii))

    def cmd_d_omega(self, args) -> CommandResult:
        model = model_loader.load(args.model)
        result = d_omega(
            model, self._budget(args), threads=self.config.threads, progress=self.config.progress
        )
        labels = model.lattice.basis_labels
        payload = {
            "model": model.name,
            "value": rational_or_inf(result.value),
            "status": result.status,
            "witness": format_class(labels, result.witness) if result.witness else None,
            "witness_coords": result.witness,
            "lower_bound": result.lower_bound,
        }
        return CommandResult(payload)

    def _report_payload(self, model: ManifoldModel, report: PackingReport, exact: bool) -> Dict[str, Any]:
        payload = {
            "model": model.name,
            "N": report.N,
            "v_lower": report.v_lower,
            "lower_certified": report.lower_certified,
        }
        if exact:
            obstructor = report.obstructor
            if isinstance(obstructor, H2Class):
                labels = blow_up(model, report.N).model.lattice.basis_labels
                obstructor = format_class(labels, obstructor)
            payload.update(
                {"v_exact": report.v_exact, "obstructor": obstructor, "full": report.full}
            )
        return payload

    def cmd_vn(self, args) -> CommandResult:
        model = model_loader.load(args.model)
        threads = self.config.threads
        if args.exact:
            report = vn_exact(model, args.n, threads=threads)
        else:
            report = vn_report(model, args.n, self._budget(args), threads=threads)
        return CommandResult(self._report_payload(model, report, args.exact))

    def cmd_pnum(self, args) -> CommandResult:
        model = model_loader.load(args.model)
        bracket = packing_number(model)
        try:
            threshold = n_threshold(model, threads=self.config.threads)
        except UncertifiedInvariantError:
            threshold = None
        payload = {
            "model": model.name,
            "lower": bracket.lower,
            "upper": bracket.upper,
            "exact": bracket.exact,
            "n_threshold": threshold,
        }
        return CommandResult(payload)

    def cmd_feasible(self, args) -> CommandResult:
        model = model_loader.load(args.model)
        radii = self._radii(args)
        report = packing_feasible(model, radii, self._budget(args), threads=self.config.threads)
        payload = {
            "model": model.name,
            "radii2": list(radii),
            "feasible": report.feasible,
            "exact": report.exact,
            "method": report.method,
            "reason": report.reason,
            "violator": report.violator,
        }
        return CommandResult(payload)

    def cmd_exc_check(self, args) -> CommandResult:
        c = CP2BlowupClass.parse(args.cls)
        payload: Dict[str, Any] = {
            "class": str(c),
            "self_intersection": c.self_intersection(),
            "c1": c.c1(),
            "numerically_exceptional": c.is_numerically_exceptional(),
            "exceptional": False,
            "reduced": None,
            "trace": [],
        }
        if c.is_numerically_exceptional():
            reduction = cremona_reduce(c)
            payload.update(
                {
                    "exceptional": reduction.exceptional,
                    "reduced": str(reduction.reduced),
                    "trace": [list(move) for move in reduction.trace],
                }
            )
        table = (("step", "move"), [[i + 1, list(move)] for i, move in enumerate(payload["trace"])])
        return CommandResult(payload, table if payload["trace"] else None)

    def cmd_exc_enumerate(self, args) -> CommandResult:
        threads = self.config.threads
        if args.points is not None:
            classes = [str(c) for c in cp2_exceptional_classes(args.points, threads)]
            payload = {"points": args.points, "complete": True}
        else:
            model = model_loader.load(args.model)
            found = exceptional_set_for(model, coeff_max=args.coeff_max, threads=threads)
            labels = model.lattice.basis_labels
            classes = [format_class(labels, B) for B in found]
            payload = {"model": model.name, "complete": found.complete}
        payload.update({"count": len(classes), "classes": classes})
        table = (("#", "class"), [[i + 1, c] for i, c in enumerate(classes)])
        return CommandResult(payload, table)

    def cmd_blowup(self, args) -> CommandResult:
        model = model_loader.load(args.model)
        radii = self._radii(args)
        if len(radii) and len(radii) != args.points:
            raise DimensionMismatchError(f"{len(radii)} radii given for {args.points} points")

        if len(radii):
            certificate = form_class_certificate(
                model, radii, self._budget(args), threads=self.config.threads
            )
            payload = model_to_dict(certificate.blowup.model)
            payload["form_class"] = {
                "values": list(certificate.form.values),
                "square": certificate.square,
                "certified": certificate.certified,
            }
        else:
            payload = model_to_dict(blow_up(model, args.points).model)
        return CommandResult(payload)

    def cmd_correspond(self, args) -> CommandResult:
        radii = self._radii(args)
        if args.scale is not None:
            if args.alpha is not None or args.beta is not None:
                raise UsageError("correspond: give either --alpha/--beta or --scale")
            alpha, beta, out = correspond_cp2_to_s2xs2(args.scale, radii)
            payload = {
                "cp2_scale": args.scale,
                "cp2_radii2": list(radii),
                "alpha": alpha,
                "beta": beta,
                "radii2": list(out),
            }
            return CommandResult(payload)

        if args.alpha is None or args.beta is None:
            raise UsageError("correspond: --alpha and --beta are required")
        scale, out = correspond_s2xs2_to_cp2(args.alpha, args.beta, radii)
        lhs, rhs = correspondence_volumes(args.alpha, args.beta, radii.values[0])
        payload = {
            "alpha": args.alpha,
            "beta": args.beta,
            "radii2": list(radii),
            "cp2_scale": scale,
            "cp2_radii2": list(out),
            "volume_check": {"cp2_side": lhs, "s2xs2_side": rhs, "equal": lhs == rhs},
        }
        return CommandResult(payload)

    def cmd_certify_empty(self, args) -> CommandResult:
        model = model_loader.load(args.model)
        certificate = emptiness_certificate(model)
        payload = {
            "model": model.name,
            "certified": certificate.certified,
            "checks": {
                "b_plus": certificate.b_plus,
                "K2": certificate.K2,
                "K_omega": certificate.K_omega,
            },
        }
        if certificate.certified:
            payload["packing_number"] = 1
        return CommandResult(payload)

    def cmd_validate(self, args) -> CommandResult:
        model = model_loader.load(args.model, check=False)
        report = validate(model)
        payload = {
            "model": model.name,
            "valid": report.valid,
            "errors": report.errors,
            "warnings": report.warnings,
            "b_plus": report.b_plus,
        }
        return CommandResult(payload, exit_code=EXIT_OK if report.valid else EXIT_DOMAIN_ERROR)

    def cmd_gallery(self, args) -> CommandResult:
        entries = gallery_report(threads=self.config.threads)
        table = (
            ("ref", "d_omega", "status", "n_threshold", "P"),
            [
                [
                    e["ref"],
                    e["d_omega"],
                    e["d_status"],
                    e["n_threshold"],
                    e["packing_number"]["exact"]
                    or f"{e['packing_number']['lower']}..{e['packing_number']['upper']}",
                ]
                for e in entries
            ],
        )
        return CommandResult({"models": entries}, table)


def run(
    argv: Optional[List[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Run one packlab command and return its exit code"""
    return PacklabCLI(stdout=stdout, stderr=stderr).run(sys.argv[1:] if argv is None else argv)
