"""Command-line entry point.

Exit codes: 0 success, 1 fatal lint or validation findings (including a
failed review checklist), 2 I/O or parse error, 3 computation error such
as an undefined unit cost.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

from . import __version__
from .anchors import anchor_table
from .core import MoneyOverflowError
from .cost import UndefinedUnitCostError, evaluate_cost_model
from .lint import ReportValidationError, check_review_package, lint_report
from .metrics import campaign_summary, compare_campaigns, generation_spend
from .render import FORMATS, render, render_findings
from .sensitivity import DEFAULT_SAMPLES, IntervalDivisionError, analyze
from .serialize import (
    DocumentError,
    campaign_from_dict,
    cost_model_from_dict,
    load_campaign,
    load_document,
    load_policy,
    load_review_package,
    load_scenario,
    load_sensitivity,
)
from .sim import run_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_COMPUTE = 3


class _Invalid(Exception):
    """Validation failed; the output has already been rendered."""


def cmd_metrics(args) -> str:
    return render(campaign_summary(load_campaign(args.file)), args.format)


def cmd_cost(args) -> str:
    doc, text, source = load_document(args.file)
    if isinstance(doc, dict) and "campaign_id" in doc:
        return render(_campaign_cost(campaign_from_dict(doc, text, source)), args.format)
    return render(evaluate_cost_model(cost_model_from_dict(doc, text, source)), args.format)


def _campaign_cost(report):
    summary = campaign_summary(report)
    if generation_spend(report) is None:
        raise UndefinedUnitCostError("unit cost undefined: the campaign discloses no expenditure")
    units = list(summary.unit_costs.values())
    if not units:
        raise UndefinedUnitCostError("unit cost undefined: no finding count to divide by")
    return units


def cmd_sensitivity(args) -> str:
    target, params, samples, seed = load_sensitivity(args.file)
    n = args.samples if args.samples is not None else samples or DEFAULT_SAMPLES
    s = args.seed if args.seed is not None else seed or 0
    return render(analyze(params, target, n_samples=n, seed=s, workers=args.workers), args.format)


def cmd_simulate(args) -> str:
    config = load_scenario(args.file)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return render(run_scenario(config), args.format)


def cmd_lint(args) -> str:
    report = lint_report(load_campaign(args.file))
    out = render(report, args.format)
    if report.fatal:
        raise _Invalid(out)
    return out


def cmd_review_lint(args) -> str:
    policy = load_policy(args.policy) if args.policy else None
    result = check_review_package(load_review_package(args.file), policy)
    out = render(result, args.format)
    if not result.passed:
        raise _Invalid(out)
    return out


def cmd_compare(args) -> str:
    return render(compare_campaigns([load_campaign(p) for p in args.files]), args.format)


def cmd_anchors(args) -> str:
    return render(anchor_table(), args.format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bugonomics",
        description="Cost accounting, metrics and reporting checks for vulnerability-discovery campaigns.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--format", choices=FORMATS, default="table", help="output format (default: table)")
        p.set_defaults(func=func)
        return p

    file_help = "campaign document path, or fixture:<name> for a built-in"
    add("metrics", cmd_metrics, "derived metrics for one campaign").add_argument("file", help=file_help)
    add("cost", cmd_cost, "cost breakdown and unit costs from a cost model or campaign").add_argument(
        "file", help="cost-model or campaign document"
    )
    p = add("sensitivity", cmd_sensitivity, "interval bounds and Monte Carlo summary for a cost formula")
    p.add_argument("file", help="sensitivity document")
    p.add_argument("--samples", type=int, default=None, help=f"sample count (default: document or {DEFAULT_SAMPLES})")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: document or 0)")
    p.add_argument("--workers", type=int, default=1, help="sampling threads; results do not depend on it")
    p = add("simulate", cmd_simulate, "run the pipeline simulator on a scenario")
    p.add_argument("file", help="scenario document")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    add("lint", cmd_lint, "check a campaign document against the reporting fields").add_argument(
        "file", help=file_help
    )
    p = add("review-lint", cmd_review_lint, "check a review package against the ownership-model checklist")
    p.add_argument("file", help="review package document")
    p.add_argument("--policy", default=None, help="policy document overriding required artifacts")
    add("compare", cmd_compare, "side-by-side metrics for several campaigns").add_argument(
        "files", nargs="+", help=file_help
    )
    add("anchors", cmd_anchors, "public anchor values and the quantities derived from them")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except _Invalid as exc:
        sys.stdout.write(str(exc))
        return EXIT_INVALID
    except ReportValidationError as exc:
        sys.stderr.write(render_findings(exc.findings))
        return EXIT_INVALID
    except (DocumentError, OSError, UnicodeDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except (UndefinedUnitCostError, IntervalDivisionError, MoneyOverflowError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_COMPUTE
    except ValueError as exc:
        # remaining value errors come from inputs the schema accepts but the models reject
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
