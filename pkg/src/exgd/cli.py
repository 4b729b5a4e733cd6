"""Command-line interface: ``exgd {fit,compare,props,sample,curves}``.

Reports go to stdout. Failures print a JSON error object to stderr and exit
with 2 (usage or invalid arguments), 3 (data) or 4 (convergence).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import distribution as dist
from . import properties as props
from .comparators import MODELS
from .data import bundled_path, gastric_cancer, ingest
from .errors import ConvergenceError, DataError, DomainError, SeriesConvergenceError
from .estimation import METHODS, fit
from .report import dumps_json, fmt_sig
from .selection import annotate, compare_models
from .series import SeriesConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONVERGENCE = 0, 2, 3, 4
SPEC_VERSION = 1
BUNDLED_PREFIX = "bundled:"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="exgd", description="Exponentiated xgamma distribution toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("json", "csv", "table"), default="json")

    def series(p):
        p.add_argument("--rel-tol", type=float, default=SeriesConfig.rel_tol)
        p.add_argument("--max-terms", type=int, default=SeriesConfig.max_terms)
        p.add_argument("--tail-tol", type=float, default=SeriesConfig.tail_tol)

    def params(p):
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--theta", type=float, required=True)

    data_help = f"path to a data file, or {BUNDLED_PREFIX}gastric_cancer"

    p = sub.add_parser("fit", help="estimate EXGD parameters from data")
    p.add_argument("--data", required=True, help=data_help)
    p.add_argument("--method", choices=METHODS, default="mle")
    common(p)

    p = sub.add_parser("compare", help="fit all comparison models and tabulate criteria")
    p.add_argument("--data", required=True, help=data_help)
    p.add_argument("--model", action="append", choices=MODELS, help="restrict to these models (repeatable)")
    common(p)

    p = sub.add_parser("props", help="moments and shape measures for given parameters")
    params(p)
    series(p)
    common(p)

    p = sub.add_parser("sample", help="draw random variates")
    params(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mixture", action="store_true", help="use the gamma-mixture draw (exact only at alpha = 1)")
    common(p)

    p = sub.add_parser("curves", help="grids of pdf/cdf/survival/hazard and Lorenz/Bonferroni values")
    params(p)
    p.add_argument("--curve", choices=("density", "inequality", "both"), default="both")
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--curve-method", choices=("series", "quadrature"), default="series")
    series(p)
    common(p)
    return parser


# -- helpers -----------------------------------------------------------------------

def _load(spec: str):
    if spec.startswith(BUNDLED_PREFIX):
        name = spec[len(BUNDLED_PREFIX):]
        bundled_path(name)  # validates the name
        return gastric_cancer()
    return ingest(spec)


def _params(args) -> dist.Parameters:
    return dist.Parameters(args.alpha, args.theta)


def _cfg(args) -> SeriesConfig:
    return SeriesConfig(max_terms=args.max_terms, rel_tol=args.rel_tol, tail_tol=args.tail_tol)


def _keyvalue(record: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps_json(record)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("key", "value"))
        for k, v in record.items():
            w.writerow((k, repr(v) if isinstance(v, float) else v))
        return buf.getvalue()
    width = max(len(k) for k in record)
    lines = []
    for k, v in record.items():
        text = fmt_sig(v, 6) if isinstance(v, float) else str(v)
        lines.append(f"{k.ljust(width)}  {text}")
    return "\n".join(lines) + "\n"


def _grid(columns: dict, fmt: str, name: str) -> str:
    keys = list(columns)
    n = len(columns[keys[0]])
    if fmt == "json":
        return dumps_json({"spec_version": SPEC_VERSION, "curve": name, **{k: list(v) for k, v in columns.items()}})
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for i in range(n):
            w.writerow([repr(float(columns[k][i])) for k in keys])
        return buf.getvalue()
    lines = ["  ".join(k.rjust(12) for k in keys)]
    for i in range(n):
        lines.append("  ".join(fmt_sig(columns[k][i], 6).rjust(12) for k in keys))
    return "\n".join(lines) + "\n"


# -- commands ------------------------------------------------------------------------

def cmd_fit(args, out) -> int:
    s = _load(args.data)
    r = fit(s, args.method)
    record = {
        "spec_version": SPEC_VERSION,
        "command": "fit",
        "method": r.method,
        "n": s.n,
        "alpha": r.params.alpha,
        "theta": r.params.theta,
        "neg_log_lik": r.neg_log_lik,
        "objective_at_optimum": r.objective_at_optimum,
        "converged": r.converged,
        "iterations": r.iterations,
    }
    out.write(_keyvalue(record, args.format))
    if not r.converged:
        raise ConvergenceError(f"{r.method} fit did not converge within the iteration cap")
    return EXIT_OK


def cmd_compare(args, out) -> int:
    s = _load(args.data)
    table = compare_models(s, tuple(args.model) if args.model else MODELS)
    if s.values == gastric_cancer().values:
        table = annotate(table)
    if args.format == "json":
        out.write(table.to_json())
    elif args.format == "csv":
        out.write(table.to_csv())
    else:
        out.write(table.to_text())
    return EXIT_OK


def cmd_props(args, out) -> int:
    p, cfg = _params(args), _cfg(args)
    m = props.moments(p, cfg)
    record = {
        "spec_version": SPEC_VERSION,
        "command": "props",
        "alpha": p.alpha,
        "theta": p.theta,
    }
    for r, v in enumerate(m.raw, start=1):
        record[f"raw_moment_{r}"] = v
    for r, v in zip((2, 3, 4), m.central):
        record[f"central_moment_{r}"] = v
    record.update(
        pearson_sk=m.pearson_sk,
        pearson_kr=m.pearson_kr,
        bowley_skewness=dist.bowley_skewness(p),
        moors_kurtosis=dist.moors_kurtosis(p),
        mean_deviation=props.mean_deviation(p, cfg),
        gini_index=props.gini_index(p, cfg),
        bonferroni_index=props.bonferroni_index(p, cfg),
    )
    out.write(_keyvalue(record, args.format))
    return EXIT_OK


def cmd_sample(args, out) -> int:
    p = _params(args)
    draw = dist.sample_mixture if args.mixture else dist.sample
    values = draw(args.n, p, seed=args.seed)
    if args.format == "json":
        out.write(dumps_json({
            "spec_version": SPEC_VERSION, "command": "sample", "alpha": p.alpha, "theta": p.theta,
            "n": int(args.n), "seed": args.seed, "algorithm": "mixture" if args.mixture else "inverse",
            "values": list(values),
        }))
    else:
        # full precision either way, so the output can be re-read exactly
        header = "x\n" if args.format == "csv" else ""
        out.write(header + "".join(f"{float(v)!r}\n" for v in values))
    return EXIT_OK


def cmd_curves(args, out) -> int:
    p, cfg = _params(args), _cfg(args)
    if args.points < 2:
        raise DomainError("--points must be at least 2")
    parts = []
    if args.curve in ("density", "both"):
        top = dist.quantile(0.999, p)
        x = top * np.arange(1, args.points + 1) / args.points
        parts.append(("density", {
            "x": x,
            "pdf": dist.exgd_pdf(x, p),
            "cdf": dist.exgd_cdf(x, p),
            "survival": dist.exgd_survival(x, p),
            "hazard": dist.exgd_hazard(x, p),
        }))
    if args.curve in ("inequality", "both"):
        u = np.arange(1, args.points + 1) / (args.points + 1)
        lor = props.lorenz_curve(u, p, cfg, method=args.curve_method)
        parts.append(("inequality", {"p": u, "lorenz": lor, "bonferroni": lor / u}))
    if args.format == "json":
        out.write(dumps_json({
            "spec_version": SPEC_VERSION, "command": "curves", "alpha": p.alpha, "theta": p.theta,
            **{name: {k: list(v) for k, v in cols.items()} for name, cols in parts},
        }))
    else:
        out.write("\n".join(_grid(cols, args.format, name) for name, cols in parts))
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "compare": cmd_compare, "props": cmd_props, "sample": cmd_sample, "curves": cmd_curves}


def _error(err, kind: str, code: int, **extra) -> None:
    obj = {"spec_version": SPEC_VERSION, "error": {"type": kind, "message": str(err), "exit_code": code, **extra}}
    sys.stderr.write(dumps_json(obj))


def run(argv=None, out=None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        _error(exc, "usage", EXIT_USAGE)
        return EXIT_USAGE
    except DataError as exc:
        _error(exc, "data", EXIT_DATA)
        return EXIT_DATA
    except SeriesConvergenceError as exc:
        _error(exc, "convergence", EXIT_CONVERGENCE, estimate=exc.estimate, error_estimate=exc.error_estimate,
               hint="raise --max-terms or loosen --tail-tol")
        return EXIT_CONVERGENCE
    except ConvergenceError as exc:
        _error(exc, "convergence", EXIT_CONVERGENCE)
        return EXIT_CONVERGENCE
    except (DomainError, ArithmeticError, ValueError) as exc:
        _error(exc, "invalid_argument", EXIT_USAGE)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
