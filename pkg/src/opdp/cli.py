"""Command-line interface: enumerate, eval, verify and table subcommands."""

import argparse
import json
import logging
import re
import shlex
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from dotenv import load_dotenv

from opdp.config import MAX_ARITY_LIMIT, MAX_DEGREE_LIMIT, Config
from opdp.errors import OpdpError, ParseError
from opdp.formatting import format_free_gamma, format_free_step, format_listing, format_report
from opdp.freegamma import FreeGammaElement, gamma_eval
from opdp.levelstep import (
    BhsSequence,
    FreeStepElement,
    StepFunction,
    bhs_from_generator,
    enumerate_bhs,
    enumerate_c_r,
    level_dot,
    phi_eval,
    phi_eval_bhs,
    star,
    theta_from_phi,
)
from opdp.permcomb import Composition, enumerate_compositions, enumerate_partitions
from opdp.scalar import FieldSpec
from opdp.setoperad import COM, LEV, LevElement, get_operad, lev_orbit_representatives
from opdp.tables import build_table
from opdp.verifier import (
    ORACLE_FIELDS,
    CheckReport,
    FaultSpec,
    check_beta_suite,
    check_cartan_suite,
    check_gamma_suite,
    check_oracle,
    check_permrep_diagrams,
    check_roundtrip_suite,
    check_step_suite,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

ENUMERATION_KINDS = ("lev", "bhs", "c_r", "compositions", "partitions")
VERIFY_SUITES = ("beta", "gamma", "step", "cartan", "oracle", "permrep", "roundtrip")
GENERATOR_NAME = re.compile(r"[A-Za-z]\w*")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="q or fp:<prime> (default: OPDP_FIELD or q)")
    common.add_argument("--max-arity", type=int, dest="max_arity")
    common.add_argument("--max-degree", type=int, dest="max_degree")
    common.add_argument("--max-index", type=int, dest="max_index")
    common.add_argument("--seed", type=int)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--out", type=Path, help="write output to this file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="opdp", description="Exact divided power operations over set operads."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enumerate_cmd = sub.add_parser("enumerate", parents=[common], help="list a finite set")
    enumerate_cmd.add_argument("kind", choices=ENUMERATION_KINDS)
    enumerate_cmd.add_argument("params", nargs="+")
    enumerate_cmd.add_argument(
        "--orbits", action="store_true", help="lev: one representative per Σ_n-orbit"
    )
    enumerate_cmd.set_defaults(handler=cmd_enumerate)

    eval_cmd = sub.add_parser("eval", parents=[common], help="evaluate one operation")
    eval_cmd.add_argument("expr")
    eval_cmd.add_argument("--operad", choices=("com", "lev"), default="lev")
    eval_cmd.set_defaults(handler=cmd_eval)

    verify_cmd = sub.add_parser("verify", parents=[common], help="run a relation suite")
    verify_cmd.add_argument("suite", choices=VERIFY_SUITES)
    verify_cmd.add_argument("--operad", choices=("com", "lev"), default="lev")
    verify_cmd.add_argument("--model", choices=("bhs", "com"), default="bhs")
    verify_cmd.add_argument("--fault", type=int, help="corrupt the case with this index")
    verify_cmd.set_defaults(handler=cmd_verify)

    table_cmd = sub.add_parser("table", parents=[common], help="export structure constants")
    table_cmd.add_argument("operad", choices=("com", "lev"))
    table_cmd.set_defaults(handler=cmd_table)
    return parser


def _parse_int(text: str, name: str, low: int = 0, high: int | None = None) -> int:
    if not re.fullmatch(r"\d+", text.strip()):
        raise ParseError(f"{name} must be a non-negative integer, got {text!r}")
    value = int(text)
    if value < low or (high is not None and value > high):
        raise ParseError(f"{name} must be between {low} and {high}")
    return value


def _need(params: Sequence[str], count: int, usage: str) -> None:
    if len(params) != count:
        raise ParseError(f"expected {usage}")


def cmd_enumerate(args: argparse.Namespace, config: Config) -> tuple[str, int]:
    """Deterministic sorted listing with a count header."""
    kind, params = args.kind, args.params
    if kind == "lev":
        _need(params, 1, "enumerate lev <n>")
        limit = MAX_DEGREE_LIMIT if args.orbits else MAX_ARITY_LIMIT
        n = _parse_int(params[0], "n", 0, limit)
        depths = lev_orbit_representatives(n) if args.orbits else LEV.enumerate(n)
        items = [
            f"{LevElement(h)} {LevElement(h).partition_form()}" for h in depths
        ]
    elif kind == "bhs":
        _need(params, 1, "enumerate bhs <n>")
        items = [str(u) for u in enumerate_bhs(_parse_int(params[0], "n", 0, MAX_DEGREE_LIMIT))]
    elif kind == "c_r":
        _need(params, 1, 'enumerate c_r "(r_1,...,r_p)"')
        r = Composition.parse(params[0])
        if r.n > MAX_ARITY_LIMIT:
            raise ParseError(f"step functions on more than {MAX_ARITY_LIMIT} points are not listed")
        items = [str(step) for step in enumerate_c_r(r)]
    elif kind == "compositions":
        _need(params, 2, "enumerate compositions <n> <p>")
        n = _parse_int(params[0], "n", 0, MAX_DEGREE_LIMIT)
        p = _parse_int(params[1], "p", 0, MAX_DEGREE_LIMIT)
        items = [str(r) for r in enumerate_compositions(n, p)]
    else:
        _need(params, 1, 'enumerate partitions "(r_1,...,r_p)"')
        r = Composition.parse(params[0])
        if r.n > MAX_ARITY_LIMIT:
            raise ParseError(f"partitions of more than {MAX_ARITY_LIMIT} points are not listed")
        items = [str(partition) for partition in enumerate_partitions(r)]

    title = f"{kind} {' '.join(params)}"
    if args.json:
        payload = {"kind": kind, "params": list(params), "count": str(len(items)), "items": items}
        return json.dumps(payload, indent=2, ensure_ascii=False), EXIT_OK
    return format_listing(title, items), EXIT_OK


def _bhs_args(tokens: Sequence[str], f: FieldSpec) -> list[FreeStepElement]:
    return [FreeStepElement.of(BhsSequence.parse(token), f) for token in tokens]


def _generator_args(
    tokens: Sequence[str], operad_name: str, f: FieldSpec
) -> list[FreeGammaElement]:
    operad = get_operad(operad_name)
    for token in tokens:
        if not GENERATOR_NAME.fullmatch(token):
            raise ParseError(f"bad generator name {token!r}")
    return [FreeGammaElement.generator(operad, f, token) for token in tokens]


def evaluate_expression(expr: str, f: FieldSpec, operad_name: str = "lev") -> str:
    """Evaluate one expression of the text grammar and render the normal form.

    phi <h=[..]@r=(..)> <bhs>...     closed form on sequences
    phi-oracle <step> <bhs>...       the same through the monad multiplication
    star <bhs> <bhs>                 level product
    dot <bhs> <bhs>                  u·v without coefficient
    gen <bhs>                        u rebuilt from the unit sequence
    theta <h=[..]> <(r)> <bhs>...    θ_{[I]_r, r}
    gamma <id|com|h=[..]> <(r)> <generator>...
    """
    try:
        tokens = shlex.split(expr)
    except ValueError as e:
        raise ParseError(f"cannot tokenize {expr!r}: {e}") from e
    if not tokens:
        raise ParseError("empty expression")
    op, rest = tokens[0].lower(), tokens[1:]

    if op in ("phi", "phi-oracle"):
        if not rest:
            raise ParseError(f"expected {op} <step> <sequence>...")
        step = StepFunction.parse(rest[0])
        phi = phi_eval_bhs if op == "phi" else phi_eval
        return format_free_step(phi(step, _bhs_args(rest[1:], f)))
    if op == "star":
        _need(rest, 2, "star <sequence> <sequence>")
        a, b = _bhs_args(rest, f)
        return format_free_step(star(a, b))
    if op == "dot":
        _need(rest, 2, "dot <sequence> <sequence>")
        return str(level_dot(BhsSequence.parse(rest[0]), BhsSequence.parse(rest[1])))
    if op == "gen":
        _need(rest, 1, "gen <sequence>")
        return format_free_step(bhs_from_generator(BhsSequence.parse(rest[0]), f))
    if op == "theta":
        if len(rest) < 2:
            raise ParseError("expected theta <h=[..]> <(r)> <sequence>...")
        element = LevElement.parse(rest[0])
        r = Composition.parse(rest[1])
        return format_free_step(theta_from_phi(element, r, _bhs_args(rest[2:], f), phi_eval_bhs))
    if op == "gamma":
        if len(rest) < 2:
            raise ParseError("expected gamma <id|com|h=[..]> <(r)> <generator>...")
        r = Composition.parse(rest[1])
        if rest[0] == "id":
            operad = get_operad(operad_name)
            x = operad.unit()
        elif rest[0] == "com":
            operad, x = COM, (0,) * r.n
        else:
            operad, x = LEV, LevElement.parse(rest[0]).depths
        args = _generator_args(rest[2:], operad.name, f)
        return format_free_gamma(gamma_eval(operad, x, r, args))
    raise ParseError(f"unknown operation {op!r}")


def cmd_eval(args: argparse.Namespace, config: Config) -> tuple[str, int]:
    result = evaluate_expression(args.expr, config.field_spec(), args.operad)
    if args.json:
        payload = {"expression": args.expr, "field": config.field, "result": result}
        return json.dumps(payload, indent=2, ensure_ascii=False), EXIT_OK
    return result, EXIT_OK


def run_suite(args: argparse.Namespace, config: Config) -> CheckReport:
    f = config.field_spec()
    fault = FaultSpec(args.fault) if args.fault is not None else None
    common = {"threads": config.threads, "fault": fault}
    suite = args.suite
    if suite in ("beta", "gamma", "roundtrip"):
        checks: dict[str, Callable[..., CheckReport]] = {
            "beta": check_beta_suite,
            "gamma": check_gamma_suite,
            "roundtrip": check_roundtrip_suite,
        }
        return checks[suite](
            get_operad(args.operad), f, config.max_arity, seed=config.seed, **common
        )
    if suite == "step":
        return check_step_suite(
            f, config.max_degree, model=args.model, seed=config.seed, **common
        )
    if suite == "cartan":
        return check_cartan_suite(f, config.max_index, seed=config.seed, **common)
    if suite == "oracle":
        fields = (f,) if args.field is not None else ORACLE_FIELDS
        return check_oracle(config.max_degree, fields, **common)
    return check_permrep_diagrams(config.max_arity, f, **common)


def cmd_verify(args: argparse.Namespace, config: Config) -> tuple[str, int]:
    """Exit 0 iff the suite has no failures."""
    report = run_suite(args, config)
    code = EXIT_OK if report.ok else EXIT_FAILURE
    if args.json:
        return report.model_dump_json(indent=2), code
    return format_report(report), code


def cmd_table(args: argparse.Namespace, config: Config) -> tuple[str, int]:
    bound = config.max_degree if args.operad == "lev" else config.max_arity
    table = build_table(args.operad, config.field_spec(), bound)
    return table.model_dump_json(indent=2), EXIT_OK


def emit(text: str, out: Path | None) -> int:
    if out is None:
        print(text)
        return EXIT_OK
    try:
        out.write_text(text + "\n", encoding="utf-8")
    except OSError as e:
        logger.error("Failed to write %s: %s", out, e)
        return EXIT_FAILURE
    logger.info("Wrote %s", out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = Config.from_env().with_overrides(
            field=args.field,
            max_arity=args.max_arity,
            max_degree=args.max_degree,
            max_index=args.max_index,
            seed=args.seed,
        )
    except ValueError as e:
        print(f"opdp: invalid environment: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=getattr(logging, config.log_level, logging.WARNING),
        stream=sys.stderr,
    )

    try:
        config.validate()
    except ValueError as e:
        logger.error("Configuration validation failed: %s", e)
        return EXIT_USAGE

    try:
        text, code = args.handler(args, config)
    except ParseError as e:
        logger.error("Parse error: %s", e)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except OpdpError as e:
        logger.error("Computation failed: %s", e)
        return EXIT_FAILURE

    written = emit(text, args.out)
    return code if written == EXIT_OK else written
