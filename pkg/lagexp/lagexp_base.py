import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from lxml import etree

from lagexp.basis import BasisKind
from lagexp.catalog import parse_catalog
from lagexp.exceptions import InvalidArgumentError, LagexpError, NumericalDiagnostic
from lagexp.expansion import CoefficientArray, expand, parseval_residual, reconstruct
from lagexp.operator import apply_E_power, apply_H_power, eta_norm, lp_eta_verdict
from lagexp.quadrature import gauss_laguerre_rule
from lagexp.seqspace import classify, flat_inclusion_demo
from lagexp.transform import TransformOptions, hul_report, luh_report
from lagexp.utils.ap import CommaSeparated, FullPath
from lagexp.verify import SUITES, run_suite, write_report


logger = logging.getLogger(__name__)
"""lagexp.lagexp_base log object"""

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DIAGNOSTIC = 3


def main(args: Optional[Sequence[str]] = None) -> None:
    """
    Run one ``lagexp`` subcommand

    Exits with 1 when verification rows fail, 2 on usage errors (including an
    output file that exists without ``-f``) and 3 on numerical diagnostics.

    Args:
        args (Optional[Sequence[str]]) = None: Arguments List
    """

    p_args = parse_args(args)
    logging.basicConfig(
        level=p_args.log_level,
        format="[ %(asctime)s | %(levelname)-8s | %(name)s ]\n%(message)s",
    )

    try:
        code = p_args.handler(p_args)
    except NumericalDiagnostic as err:
        logger.error(f"{type(err).__name__}: {err}")
        print(f"lagexp {p_args.command}: {type(err).__name__}: {err}", file=sys.stderr)
        code = EXIT_DIAGNOSTIC
    except (LagexpError, OSError) as err:
        print(f"lagexp {p_args.command}: error: {err}", file=sys.stderr)
        code = EXIT_USAGE

    if code != EXIT_OK:
        sys.exit(code)


def _blocked(path: Optional[Path], force: bool) -> bool:
    """True, after logging why, when ``path`` exists and ``force`` is not set"""
    if path is None or force or not path.exists():
        return False
    logger.error(f'File "{path}" not written. Please use `-f` to overwrite it')
    return True


def _write_output(path: Path, data: bytes, force: bool) -> bool:
    if _blocked(path, force):
        return False
    logger.info(f"Writing: {path}")
    path.write_bytes(data)
    return True


def _format_number(value: Union[float, complex]) -> str:
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return f"{value:.17g}"


def _caps_argument(caps: List[int]) -> Union[int, List[int]]:
    if any(cap < 0 for cap in caps):
        raise InvalidArgumentError(f"caps must be >= 0, got {caps}")
    return caps[0] if len(caps) == 1 else caps


def cmd_basis_eval(p_args: argparse.Namespace) -> int:
    kind = BasisKind(p_args.kind, p_args.gamma)
    index = p_args.n[0] if len(p_args.n) == 1 else p_args.n
    print(_format_number(kind.evaluate(index, p_args.x)))
    return EXIT_OK


def cmd_expand(p_args: argparse.Namespace) -> int:
    if _blocked(p_args.out, p_args.force):
        return EXIT_USAGE
    caps = _caps_argument(p_args.caps)
    f = parse_catalog(p_args.fn)
    c = expand(f, p_args.basis, caps, p_args.quad_order)
    c.save(p_args.out, force=True)
    print(f"parseval_residual: {parseval_residual(f, c):.6g}")
    return EXIT_OK


def cmd_reconstruct(p_args: argparse.Namespace) -> int:
    c = CoefficientArray.load(p_args.coeffs)
    if len(p_args.x) != c.dimension:
        raise InvalidArgumentError(
            f"--x has {len(p_args.x)} components, the coefficients are "
            f"{c.dimension} dimensional"
        )
    print(_format_number(reconstruct(c, p_args.x)))
    return EXIT_OK


def _serialize(
    to_dict: Callable[[], Dict[str, Any]],
    to_xml: Optional[Callable[[], Any]],
    fmt: str,
    pretty_print: bool,
) -> bytes:
    if fmt == "XML" and to_xml is not None:
        return etree.tostring(
            to_xml(), xml_declaration=True, encoding="UTF-8", pretty_print=pretty_print
        )
    indent = 2 if pretty_print else None
    return json.dumps(to_dict(), indent=indent, sort_keys=True).encode("utf-8")


def cmd_classify(p_args: argparse.Namespace) -> int:
    c = CoefficientArray.load(p_args.coeffs)
    decision = classify(c, p_args.target)
    report = _serialize(
        decision.to_dict, decision.to_xml, p_args.format, p_args.pretty_print
    )
    print(decision.summary())
    if p_args.out is None:
        print(report.decode("utf-8"))
    elif not _write_output(p_args.out, report, p_args.force):
        return EXIT_USAGE
    return EXIT_OK


def cmd_transform(p_args: argparse.Namespace) -> int:
    opts = TransformOptions(
        K_tail=p_args.k_tail,
        eps_tail=p_args.eps,
        out_caps=None if p_args.out_caps is None else _caps_argument(p_args.out_caps),
    )
    if _blocked(p_args.out, p_args.force):
        return EXIT_USAGE
    c = CoefficientArray.load(p_args.coeffs)
    if p_args.direction == "luh":
        result, report = luh_report(c, opts)
    else:
        result, report = hul_report(c, opts)
    result.save(p_args.out, force=True)
    for key, value in report.to_dict().items():
        print(f"{key}: {value}")
    return EXIT_OK


def _check_operator_flags(p_args: argparse.Namespace) -> None:
    if p_args.power < 0:
        raise InvalidArgumentError(f"--power must be >= 0, got {p_args.power}")
    if p_args.out is None and p_args.eta is None:
        raise InvalidArgumentError("give --out, --eta or both")
    if p_args.eta is not None:
        if p_args.op != "E":
            raise InvalidArgumentError("--eta is defined through E, use --op E")
        if len(p_args.eta) != 2 or min(p_args.eta) <= 0:
            raise InvalidArgumentError(f"--eta takes h,alpha > 0, got {p_args.eta}")
    elif p_args.n_max is not None or p_args.lp is not None:
        raise InvalidArgumentError("--n-max and --lp need --eta")
    if p_args.lp is not None and not p_args.lp >= 1:
        raise InvalidArgumentError(f"--lp must be >= 1, got {p_args.lp}")
    if p_args.quad_order is not None and p_args.lp is None:
        raise InvalidArgumentError("--quad-order needs --lp")


def cmd_operator(p_args: argparse.Namespace) -> int:
    _check_operator_flags(p_args)
    if _blocked(p_args.out, p_args.force):
        return EXIT_USAGE
    c = CoefficientArray.load(p_args.coeffs)

    if p_args.out is not None:
        apply = apply_E_power if p_args.op == "E" else apply_H_power
        apply(c, p_args.power).save(p_args.out, force=True)

    if p_args.eta is not None:
        h, alpha = p_args.eta
        options = {} if p_args.n_max is None else {"N_max": p_args.n_max}
        if p_args.lp is None:
            result = eta_norm(c, h, alpha, **options)
        else:
            rule = None
            if p_args.quad_order is not None:
                rule = gauss_laguerre_rule(p_args.quad_order)
            result = lp_eta_verdict(c, h, alpha, p_args.lp, rule, **options)
        print(json.dumps(result.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_verify(p_args: argparse.Namespace) -> int:
    if p_args.jobs < 1:
        raise InvalidArgumentError(f"--jobs must be >= 1, got {p_args.jobs}")
    if _blocked(p_args.report, p_args.force):
        return EXIT_USAGE

    rows = run_suite(p_args.suite, p_args.jobs)
    if p_args.report is None:
        write_report(rows, sys.stdout)
    else:
        logger.info(f"Writing: {p_args.report}")
        with p_args.report.open("w", newline="") as stream:
            write_report(rows, stream)

    failed = [row.invariant_id for row in rows if not row.passed]
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed", file=sys.stderr)
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_demo_flat(p_args: argparse.Namespace) -> int:
    if p_args.caps < 10:
        raise InvalidArgumentError(f"--caps must be >= 10, got {p_args.caps}")
    report = flat_inclusion_demo(p_args.caps)
    print(report.table())
    print(f"monotone: {report.monotone}")
    print(f"strict_witness: {report.strict_witness}")
    if p_args.out is not None:
        data = _serialize(report.to_dict, None, "JSON", p_args.pretty_print)
        if not _write_output(p_args.out, data, p_args.force):
            return EXIT_USAGE
    return EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument(
        "-f",
        "--force",
        action="store_true",
        help="overwrite output files even if they already exist",
    )
    parent.add_argument(
        "-p",
        "--pretty-print",
        action="store_true",
        help="enable pretty print for report files",
    )

    logger_group_parent = parent.add_argument_group(
        title="logging arguments",
        description="Control what log level the log outputs (default: ERROR)",
    )
    logger_group = logger_group_parent.add_mutually_exclusive_group()
    default_log_level = logging.ERROR

    logger_group.add_argument(
        "-d",
        "--debug",
        dest="log_level",
        action="store_const",
        const=logging.DEBUG,
        default=default_log_level,
        help="Set log level to DEBUG",
    )
    logger_group.add_argument(
        "-v",
        "--verbose",
        dest="log_level",
        action="store_const",
        const=logging.INFO,
        default=default_log_level,
        help="Set log level to INFO",
    )
    return parent


COEFFICIENT_SUFFIXES = (".json",)


def _path_argument(
    parser: argparse.ArgumentParser,
    flag: str,
    suffixes: Sequence[str] = COEFFICIENT_SUFFIXES,
    **kwargs: Any,
) -> None:
    parser.add_argument(flag, action=FullPath, suffixes=suffixes, **kwargs)


def parse_args(args: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parse the arguments

    Args:
        args (Optional[Sequence[str]]) = None: Arguments List

    Returns:
        :class:`argparse.Namespace`: Namespace object of all parsed arguments, with
        the subcommand's function in ``handler``
    """

    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="lagexp",
        description=(
            "Laguerre and Hermite expansions, sequence space classification and "
            "the transforms between even Hermite and Laguerre coefficients"
        ),
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    basis_eval = commands.add_parser(
        "basis-eval", parents=[common], help="evaluate one basis element at a point"
    )
    basis_eval.add_argument(
        "--kind", choices=list(BasisKind.TAGS), required=True, help="basis family"
    )
    basis_eval.add_argument(
        "--n", action=CommaSeparated, required=True, help="degree or multi-index"
    )
    basis_eval.add_argument(
        "--x",
        action=CommaSeparated,
        element_type=float,
        required=True,
        help="point, one value per dimension",
    )
    basis_eval.add_argument(
        "--gamma", type=float, default=0.0, help="order of the Laguerre polynomial"
    )
    basis_eval.set_defaults(handler=cmd_basis_eval)

    expand_cmd = commands.add_parser(
        "expand", parents=[common], help="compute expansion coefficients"
    )
    expand_cmd.add_argument(
        "--fn", required=True, help="catalog expression or path of a samples JSON file"
    )
    expand_cmd.add_argument(
        "--basis",
        choices=[CoefficientArray.LAGUERRE, CoefficientArray.HERMITE],
        default=CoefficientArray.LAGUERRE,
        help="expansion basis",
    )
    expand_cmd.add_argument(
        "--caps",
        action=CommaSeparated,
        required=True,
        help="maximum degree per axis, one value applies to every axis",
    )
    expand_cmd.add_argument(
        "--quad-order", type=int, help="quadrature nodes per axis (default: caps + 40)"
    )
    _path_argument(expand_cmd, "--out", required=True, help="coefficient file")
    expand_cmd.set_defaults(handler=cmd_expand)

    reconstruct_cmd = commands.add_parser(
        "reconstruct", parents=[common], help="evaluate a truncated series"
    )
    _path_argument(reconstruct_cmd, "--coeffs", required=True, help="coefficient file")
    reconstruct_cmd.add_argument(
        "--x",
        action=CommaSeparated,
        element_type=float,
        required=True,
        help="point, one value per dimension",
    )
    reconstruct_cmd.set_defaults(handler=cmd_reconstruct)

    classify_cmd = commands.add_parser(
        "classify", parents=[common], help="decide sequence space membership"
    )
    _path_argument(classify_cmd, "--coeffs", required=True, help="coefficient file")
    classify_cmd.add_argument(
        "--target",
        required=True,
        help="roumieu:ALPHA, beurling:ALPHA, flat-r:SIGMA, flat-b:SIGMA, schwartz "
        "or finite",
    )
    classify_cmd.add_argument(
        "-t",
        "--format",
        type=str,
        choices=["JSON", "XML"],
        default="JSON",
        help="report format",
    )
    _path_argument(
        classify_cmd,
        "--out",
        suffixes=(".json", ".xml"),
        help="report file, printed when not given",
    )
    classify_cmd.set_defaults(handler=cmd_classify)

    transform_cmd = commands.add_parser(
        "transform", parents=[common], help="map between Laguerre and even Hermite"
    )
    _path_argument(transform_cmd, "--coeffs", required=True, help="coefficient file")
    transform_cmd.add_argument(
        "--direction", choices=["luh", "hul"], required=True, help="transform"
    )
    transform_cmd.add_argument(
        "--eps", type=float, default=1e-10, help="relative tail of the inner sums"
    )
    transform_cmd.add_argument(
        "--k-tail", type=int, default=256, help="largest inner shell summed"
    )
    transform_cmd.add_argument(
        "--out-caps", action=CommaSeparated, help="caps of the produced array"
    )
    _path_argument(transform_cmd, "--out", required=True, help="coefficient file")
    transform_cmd.set_defaults(handler=cmd_transform)

    operator_cmd = commands.add_parser(
        "operator", parents=[common], help="apply E or H and evaluate eta norms"
    )
    _path_argument(operator_cmd, "--coeffs", required=True, help="coefficient file")
    operator_cmd.add_argument("--op", choices=["E", "H"], default="E", help="operator")
    operator_cmd.add_argument("--power", type=int, default=1, help="power N")
    _path_argument(operator_cmd, "--out", help="coefficients of the result")
    operator_cmd.add_argument(
        "--eta",
        action=CommaSeparated,
        element_type=float,
        help="h,alpha: print the eta norm of the input",
    )
    operator_cmd.add_argument("--n-max", type=int, help="last N of the eta scan")
    operator_cmd.add_argument(
        "--lp", type=float, help="use the L^p norm of E^N f instead of l^2"
    )
    operator_cmd.add_argument(
        "--quad-order", type=int, help="Gauss-Laguerre nodes for --lp"
    )
    operator_cmd.set_defaults(handler=cmd_operator)

    verify_cmd = commands.add_parser(
        "verify", parents=[common], help="run the numerical invariant checks"
    )
    verify_cmd.add_argument(
        "--suite", choices=["all", *SUITES], default="all", help="checks to run"
    )
    _path_argument(
        verify_cmd,
        "--report",
        suffixes=(".csv",),
        help="CSV report, stdout when not given",
    )
    verify_cmd.add_argument("--jobs", type=int, default=1, help="worker threads")
    verify_cmd.set_defaults(handler=cmd_verify)

    demo_cmd = commands.add_parser(
        "demo-flat", parents=[common], help="membership matrix of the flat spaces"
    )
    demo_cmd.add_argument("--caps", type=int, default=64, help="sequence truncation")
    _path_argument(demo_cmd, "--out", help="JSON report")
    demo_cmd.set_defaults(handler=cmd_demo_flat)

    return parser.parse_args(args)


if __name__ == "__main__":
    main()
