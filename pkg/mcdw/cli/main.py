"""Command-line interface for MCDW - the Macdonald group workbench."""
import argparse
import asyncio
import logging
import sys
from typing import List, Optional

from mcdw.config.settings import ConfigError, load_config
from mcdw.core.construct import uses_presentation
from mcdw.core.enumerate import EnumerationError
from mcdw.core.group import GroupError, upper_central_series
from mcdw.core.params import ParameterError, make_params
from mcdw.core.presentations import PresentationError, format_presentation, macdonald_presentation, presentation
from mcdw.core.verify import (
    APPENDIX_ELLS,
    THEOREMS,
    Workbench,
    certify_pair,
    default_suite,
    run_checks,
    search_pair,
    verify_appendix,
    verify_lift_obstruction,
    verify_m2_map,
    verify_pair,
    verify_residue_identities,
    verify_series_factors,
    verify_structure,
    verify_sufficiency_grid,
    verify_theorem,
)
from mcdw.models.params import CaseTag, Family, FamilyParams
from mcdw.models.report import CheckReport, CheckStatus, SearchOutcome
from mcdw.output.json import render_json, render_reports
from mcdw.output.markdown import render_series, render_summary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 3

CHECKS = ("structure", "pair", "series-factors", "m2-map", "lift-obstruction", "sufficiency-grid",
          "appendix", "residue-identities", "suite")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _params(family: str, p: Optional[int], m: Optional[int], ell: Optional[int],
            beta: Optional[int] = None) -> FamilyParams:
    """FamilyParams from CLI values; p and m default where the family fixes them."""
    family = Family(family)
    if family is Family.G:
        return make_params(family, beta=beta)
    if p is None and family.index == 2:
        p = 2
    if family.index == 3:
        p = 3 if p is None else p
        m = 1 if m is None else m
    return make_params(family, p, m, ell)


def _reports_exit_code(reports: List[CheckReport]) -> int:
    statuses = {r.status for r in reports}
    if CheckStatus.FAIL in statuses:
        return EXIT_FAIL
    if statuses & {CheckStatus.TIMEOUT, CheckStatus.SKIPPED}:
        return EXIT_UNDECIDED
    return EXIT_OK


def run_construct(args, bench: Workbench) -> int:
    params = _params(args.family, args.p, args.m, args.ell, args.beta)
    G = bench.group(params)
    series = upper_central_series(G)
    payload = {
        "params": params.model_dump(mode="json", exclude_none=True),
        "label": params.label(),
        "order": G.order,
        "class": series.nilpotency_class,
    }
    if args.show_presentation:
        family = Family(args.family)
        if family is Family.G:
            payload["presentation"] = format_presentation(macdonald_presentation(params.beta))
        elif uses_presentation(family, params):
            payload["presentation"] = format_presentation(presentation(family, params))
    if args.json:
        print(render_json(payload))
    else:
        print(f"{payload['label']}: order {payload['order']}, class {payload['class']}")
        if "presentation" in payload:
            print(payload["presentation"])
    return EXIT_OK


def run_series(args, bench: Workbench) -> int:
    params = _params(args.family, args.p, args.m, args.ell, args.beta)
    series = upper_central_series(bench.group(params))
    if args.json:
        print(render_json(series))
    else:
        print(render_series(params.label(), series))
    return EXIT_OK


def run_iso(args, bench: Workbench) -> int:
    family = Family(args.family)
    params_a = _params(family, args.p, args.m, args.ellA, args.betaA)
    params_b = _params(family, args.p, args.m, args.ellB, args.betaB)
    if args.search:
        method, result = "search", search_pair(family, params_a, params_b, bench)
    else:
        method, result = certify_pair(family, params_a, params_b, bench)
    payload = {"source": params_b.label(), "target": params_a.label(), "method": method, **result.to_dict()}
    if args.json:
        print(render_json(payload))
    elif result.outcome is SearchOutcome.FOUND:
        print(f"{params_b.label()} ≅ {params_a.label()} ({method}): images {result.certificate.images}")
    else:
        print(f"{params_b.label()} -> {params_a.label()}: {result.outcome.value} ({result.reason})")
    if result.outcome is SearchOutcome.FOUND:
        return EXIT_OK
    if result.outcome is SearchOutcome.EXHAUSTED:
        return EXIT_FAIL
    return EXIT_UNDECIDED


def _check_jobs(args, bench: Workbench):
    if args.theorem:
        return [(verify_theorem, (args.theorem,), {"bench": bench, "necessity": args.necessity})]
    check = args.check
    if check == "suite":
        return default_suite(bench, slow=args.slow)
    if check == "sufficiency-grid":
        return [(verify_sufficiency_grid, (CaseTag(args.case),), {"p": args.p, "m": args.m, "bench": bench})]
    params = _params(args.family, args.p, args.m, args.ell, args.beta)
    if check in ("pair", "series-factors", "m2-map") and args.ell_prime is None:
        raise ParameterError(f"--check {check} needs --ell-prime")
    if check == "structure":
        return [(verify_structure, (args.family, params, bench), {})]
    if check == "pair":
        other = _params(args.family, args.p, args.m, args.ell_prime)
        return [(verify_pair, (args.family, params, other, bench), {})]
    if check == "series-factors":
        other = _params(args.family, args.p, args.m, args.ell_prime)
        return [(verify_series_factors, (args.family, params, other, bench), {})]
    if check == "m2-map":
        return [(verify_m2_map, (params, args.ell_prime, bench), {})]
    if check == "lift-obstruction":
        return [(verify_lift_obstruction, (params,), {"bench": bench})]
    if check == "residue-identities":
        return [(verify_residue_identities, (params, bench), {})]
    return [(verify_appendix, (params, bench), {})]


async def run_verify(args, bench: Workbench) -> int:
    if not args.theorem and not args.check:
        raise ParameterError("verify needs --theorem or --check")
    reports = await run_checks(_check_jobs(args, bench))
    print(render_reports(reports) if args.json else render_summary(reports))
    return _reports_exit_code(reports)


def run_appendix(args, bench: Workbench) -> int:
    reports = []
    for ell in args.ell:
        params = _params("J2", 2, args.m, ell)
        reports.append(verify_appendix(params, bench, include_lemmas=not args.no_lemmas))
        if args.residue:
            reports.append(verify_residue_identities(params, bench))
    print(render_reports(reports) if args.json else render_summary(reports))
    return _reports_exit_code(reports)


def _add_family_args(parser: argparse.ArgumentParser, ell_flag: str = "--ell") -> None:
    parser.add_argument("--family", default="J2", choices=[f.value for f in Family],
                        help="Group family (default: J2)")
    parser.add_argument("--p", type=int, help="Prime p (implied for the index-2 and index-3 families)")
    parser.add_argument("--m", type=int, help="Exponent m >= 1 (implied for the index-3 families)")
    if ell_flag:
        parser.add_argument(ell_flag, type=int, dest="ell", help="Parameter ell, not divisible by p")
    parser.add_argument("--beta", type=int, help="Parameter beta for family G")
    parser.add_argument("--json", action="store_true", help="Machine-readable JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mcdw",
        description="MCDW - construct, classify and verify Macdonald groups and their Sylow subgroups",
        epilog="Examples:\n"
               "  mcdw construct --family J2 --p 2 --m 1 --ell 1\n"
               "  mcdw iso --family J1 --p 5 --m 1 --ellA 1 --ellB 6\n"
               "  mcdw verify --theorem C",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--config", help="Path to a YAML config file (default: ~/.mcdw/config.yaml)")
    parser.add_argument("--verbose", action="store_true", help="Log diagnostics to stderr")
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)

    construct_parser = subparsers.add_parser("construct", help="Build (or load) a group and print its order and class")
    _add_family_args(construct_parser)
    construct_parser.add_argument("--show-presentation", action="store_true",
                                  help="Also print the defining presentation")

    series_parser = subparsers.add_parser("series", help="Upper central series with factor invariants")
    _add_family_args(series_parser)

    iso_parser = subparsers.add_parser("iso", help="Decide isomorphism of two members of a family")
    _add_family_args(iso_parser, ell_flag="")
    iso_parser.add_argument("--ellA", type=int, help="ell of the target group")
    iso_parser.add_argument("--ellB", type=int, help="ell of the source group")
    iso_parser.add_argument("--betaA", type=int, help="beta of the target group (family G)")
    iso_parser.add_argument("--betaB", type=int, help="beta of the source group (family G)")
    iso_parser.add_argument("--search", action="store_true", help="Skip explicit maps and search directly")

    verify_parser = subparsers.add_parser("verify", help="Run named checks and report pass/fail with witnesses")
    _add_family_args(verify_parser)
    target = verify_parser.add_mutually_exclusive_group()
    target.add_argument("--theorem", choices=THEOREMS, help="Classification theorem to check")
    target.add_argument("--check", choices=CHECKS, help="Named check")
    verify_parser.add_argument("--ell-prime", type=int, dest="ell_prime", help="Second ell for pair checks")
    verify_parser.add_argument("--case", choices=[c.value for c in CaseTag], default=CaseTag.CASE2.value,
                               help="Case for the sufficiency grid")
    verify_parser.add_argument("--necessity", action=argparse.BooleanOptionalAction, default=True,
                               help="Exhaustive non-isomorphism searches for theorem A (default: on)")
    verify_parser.add_argument("--slow", action="store_true", help="Include the larger checks in the suite")

    appendix_parser = subparsers.add_parser("appendix", help="Evaluate the lift identities of J2 for m >= 3")
    appendix_parser.add_argument("--m", type=int, default=3, help="Exponent m >= 3 (default: 3)")
    appendix_parser.add_argument("--ell", type=int, nargs="+", default=list(APPENDIX_ELLS),
                                 help="Odd ell values (default: 1 3)")
    appendix_parser.add_argument("--no-lemmas", action="store_true", help="Skip the supplementary lemmas")
    appendix_parser.add_argument("--residue", action="store_true", help="Also tally the residue identities")
    appendix_parser.add_argument("--json", action="store_true", help="Machine-readable JSON output")
    return parser


def main(argv: Optional[List[str]] = None):
    """Parse command line arguments and execute appropriate command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    if not args.command:
        parser.print_help()
        sys.exit(EXIT_USAGE)

    try:
        bench = Workbench(load_config(args.config))
        if args.command == "construct":
            code = run_construct(args, bench)
        elif args.command == "series":
            code = run_series(args, bench)
        elif args.command == "iso":
            code = run_iso(args, bench)
        elif args.command == "verify":
            code = asyncio.run(run_verify(args, bench))
        else:
            code = run_appendix(args, bench)
    except (ParameterError, PresentationError, ConfigError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except (GroupError, EnumerationError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_UNDECIDED)
    except Exception as e:  # pylint: disable=broad-except
        logger.debug("Unhandled error", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_FAIL)
    sys.exit(code)


if __name__ == "__main__":
    main()
