"""Command-line interface.

Exit codes: 0 ok, 1 ``validate`` found violations, 2 usage or dimension
errors, 3 quadrature failure, 4 data errors (parse, ties), 5 unreconciled
cells under ``reproduce --strict-paper``.

``--config FILE`` reads flat ``key = value`` lines whose keys are flag names
of the chosen subcommand (``theta``, ``alpha``, ``reps``; dashes or
underscores). Blank lines and ``#`` comments are ignored. Flags given on the
command line win over the file.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import coefficients as coef
from . import experiments as exp
from .charts import write_line_chart
from .copulas import CopulaModel, normalize_family, reflect, survival_evaluator, validate_copula
from .dataset import format_number, read_csv, write_csv
from .direction import Direction, parse_directions
from .errors import DataError, DimensionError, ParameterError, QuadratureError
from .estimators import TIE_POLICIES, phi_hat, phi_hat_all, ranks
from .quadrature import QuadratureSpec
from .sampling import RngStream, sample_model

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_DATA = 4
EXIT_POLICY = 5

METHODS = ("best", "closed", "quadrature", "decompose", "semi")
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off", ""}
SIGNS = re.compile(r"[+-]+(,[+-]+)*")


class UsageError(Exception):
    pass


# -- argument helpers ------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        out = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _float_grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:count`` (inclusive, evenly spaced)."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(x) for x in np.linspace(float(start), float(stop), int(count))]
        out = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list a,b,c or a range start:stop:count, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty grid")
    return out


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _add_model(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--family", help="clayton, cuadras_auge (ca), fgm, independence, comonotone, countermonotone")
    g.add_argument("--theta", type=float, help="Clayton theta > 0 or Cuadras-Augé theta in [0, 1]")
    g.add_argument("--lambda", dest="lam", type=float, help="FGM lambda in [-1, 1]")
    g.add_argument("--d", type=int, help="dimension (>= 2)")


def _add_threads(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--threads",
        type=_nonneg_int,
        help="worker threads, 0 = all cores (default: $FOOTRULE_DIR_THREADS or 0); never changes results",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirfootrule",
        description="Directional Spearman footrule coefficients: exact values, rank estimates and simulations.",
    )
    parser.add_argument("--config", metavar="FILE", help="flat key = value file; command-line flags win")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("phi-exact", help="exact coefficient(s) of a copula model")
    _add_model(p)
    p.add_argument("--alpha", default="all", help="sign string such as +--+, a comma list, or 'all' (default: all)")
    p.add_argument("--method", choices=METHODS, default="best", help="evaluation route (default: best)")
    p.add_argument("--tol", type=float, default=1e-10, help="absolute quadrature tolerance (default: 1e-10)")
    p.add_argument("--max-panels", type=int, default=4096, help="quadrature panel budget (default: 4096)")
    p.add_argument("--pretty", action="store_true", help="aligned table with 5 decimals instead of CSV")

    p = sub.add_parser("phi-estimate", help="rank estimate(s) from a dataset CSV")
    p.add_argument("--input", help="dataset CSV: header row, one observation per row")
    p.add_argument("--alpha", default="all", help="sign string, comma list or 'all' (default: all)")
    p.add_argument("--ties", choices=TIE_POLICIES, default="first_occurrence", help="tie policy (default: first_occurrence)")
    p.add_argument("--pretty", action="store_true", help="aligned table with 5 decimals instead of CSV")

    p = sub.add_parser("sample", help="draw a dataset from a copula model")
    _add_model(p)
    p.add_argument("--n", type=int, help="number of observations")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p.add_argument("--stream", type=int, default=0, help="stream index under the master seed (default: 0)")
    p.add_argument("--out", help="output CSV path (default: standard output)")

    p = sub.add_parser("simulate", help="replicated estimates over sample sizes")
    _add_model(p)
    p.add_argument("--alpha", default="all", help="sign string, comma list or 'all' (default: all)")
    p.add_argument("--n", type=_int_list, default=[20, 50, 100, 500], help="sample sizes, comma list (default: 20,50,100,500)")
    p.add_argument("--reps", type=int, default=1000, help="replications per sample size (default: 1000)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p.add_argument("--out", help="report CSV path (default: standard output)")
    p.add_argument("--chart", metavar="SVG", help="box summary chart (median, quartiles, whiskers) per direction")
    _add_threads(p)

    p = sub.add_parser("reproduce", help="rerun a published simulation table")
    p.add_argument("--table", type=str.upper, choices=sorted(exp.TABLES), help="table id")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p.add_argument("--reps", type=int, default=1000, help="replications per cell (default: 1000)")
    p.add_argument("--out", metavar="DIR", help="write <table>.csv and <table>_exact.csv here (default: report to standard output)")
    p.add_argument("--strict-paper", action="store_true", help="exit 5 when a cell is flagged unreconciled")
    _add_threads(p)

    p = sub.add_parser("sweep", help="exact coefficients along a parameter grid")
    _add_model(p)
    p.add_argument("--thetas", type=_float_grid, help="parameter grid: a,b,c or start:stop:count")
    p.add_argument("--alpha", help="directions (default: one per number of + signs)")
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--chart", metavar="SVG", help="line chart of the curves")

    p = sub.add_parser("validate", help="check the copula axioms on a grid")
    _add_model(p)
    p.add_argument("--resolution", type=int, default=8, help="grid cells per axis (default: 8)")
    p.add_argument("--tol", type=float, default=1e-9, help="violation threshold (default: 1e-9)")
    p.add_argument("--reflect", help="1-based coordinates to reflect before checking, e.g. 1,3")
    p.add_argument("--survival", action="store_true", help="check the survival copula instead")
    return parser


# -- config handling -------------------------------------------------------


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], args: argparse.Namespace) -> argparse.Namespace:
    config = read_config(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in config.items():
        dest = "lam" if key == "lambda" else key
        if dest not in actions or dest == "help":
            raise UsageError(f"config key {key!r} is not a flag of {args.command}")
        action = actions[dest]
        if isinstance(action, argparse._StoreTrueAction):
            word = value.lower()
            if word not in TRUE_WORDS | FALSE_WORDS:
                raise UsageError(f"config key {key!r} expects true or false, got {value!r}")
            defaults[dest] = word in TRUE_WORDS
        else:
            # string defaults go through the flag's type conversion
            defaults[dest] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


# -- shared pieces ---------------------------------------------------------


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + ("lambda" if n == "lam" else n.replace("_", "-")) for n in missing)
        raise UsageError(f"{args.command}: missing required {flags}")


def _model(args: argparse.Namespace) -> CopulaModel:
    _require(args, "family", "d")
    family = normalize_family(args.family)
    if family == "fgm":
        if args.theta is not None and args.lam is None:
            param = args.theta
        else:
            param = args.lam
    else:
        if args.lam is not None:
            raise UsageError("--lambda applies to the fgm family only")
        param = args.theta
    return CopulaModel(family, args.d, param)


def _directions(text: str, d: int) -> list[Direction]:
    return parse_directions(text, d)


def _open_out(path: str | None, out: TextIO) -> tuple[TextIO, bool]:
    if path is None:
        return out, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _print_pretty(header: Sequence[str], rows: Sequence[Sequence[str]], out: TextIO) -> None:
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for r in rows:
        out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _human(x: float) -> str:
    return f"{x:.5f}"


# -- subcommands -----------------------------------------------------------


def cmd_phi_exact(args: argparse.Namespace, out: TextIO) -> int:
    model = _model(args)
    spec = QuadratureSpec(abs_tol=args.tol, max_panels=args.max_panels)
    directions = _directions(args.alpha, model.d)
    values = [(a, coef.phi_by_method(model, a, args.method, spec)) for a in directions]
    theta = "" if model.param is None else format_number(model.param)
    header = ["family", "theta", "d", "alpha", "value", "method", "abs_error"]
    rows = [
        [model.family, theta, str(model.d), str(a), format_number(v.value), v.method, format_number(v.abs_error_estimate)]
        for a, v in values
    ]
    if args.alpha.strip() == "all":
        total = math.fsum(v.value for _, v in values)
        err = math.fsum(v.abs_error_estimate for _, v in values)
        rows.append([model.family, theta, str(model.d), "sum", format_number(total), "sum", format_number(err)])
    if args.pretty:
        for r in rows:
            r[4] = _human(float(r[4]))
            r[6] = f"{float(r[6]):.1e}"
        _print_pretty(header, rows, out)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return EXIT_OK


def cmd_phi_estimate(args: argparse.Namespace, out: TextIO) -> int:
    _require(args, "input")
    data = read_csv(args.input)
    rm = ranks(data, args.ties)
    if args.alpha.strip() == "all":
        estimates = phi_hat_all(rm)
    else:
        estimates = [phi_hat(rm, a) for a in _directions(args.alpha, data.d)]
    header = ["alpha", "n", "value"]
    rows = [[str(e.direction), str(e.n), format_number(e.value)] for e in estimates]
    if args.alpha.strip() == "all":
        rows.append(["sum", str(rm.n), format_number(math.fsum(e.value for e in estimates))])
    if args.pretty:
        _print_pretty(header, [[a, n, _human(float(v))] for a, n, v in rows], out)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return EXIT_OK


def cmd_sample(args: argparse.Namespace, out: TextIO) -> int:
    _require(args, "n")
    model = _model(args)
    data = sample_model(model, args.n, RngStream(args.seed, args.stream))
    if args.out:
        write_csv(data, args.out)
    else:
        write_csv(data, out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, out: TextIO) -> int:
    model = _model(args)
    directions = _directions(args.alpha, model.d)
    config = exp.ExperimentConfig(model, directions, args.n, args.reps, args.seed)
    stats = exp.run_experiment(config, threads=args.threads)
    rows = exp.report_rows(model, stats)
    fh, close = _open_out(args.out, out)
    try:
        exp.write_report(rows, fh)
    finally:
        if close:
            fh.close()
    if args.chart:
        series = {}
        for alpha in directions:
            cell = sorted((s for s in stats if s.direction == alpha), key=lambda s: s.n)
            ns = [s.n for s in cell]
            series[f"{alpha} median"] = (ns, [s.median for s in cell])
            series[f"{alpha} q25"] = (ns, [s.q25 for s in cell])
            series[f"{alpha} q75"] = (ns, [s.q75 for s in cell])
            series[f"{alpha} exact"] = (ns, [s.exact.value for s in cell])
        write_line_chart(args.chart, series, model.label, "n", "estimate")
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace, out: TextIO) -> int:
    _require(args, "table")
    report = exp.reproduce_table(args.table, args.seed, args.reps, args.threads)
    if args.out:
        for path in report.write(args.out):
            print(f"wrote {path}", file=sys.stderr)
    else:
        exp.write_report(report.rows, out)
    for row in report.out_of_band:
        s = row.stats
        print(
            f"warning: {row.family} theta={row.theta:g} alpha={s.direction} n={s.n}: "
            f"mean {s.mean:.5f} is outside {s.band:.5f} of exact {s.exact.value:.5f}",
            file=sys.stderr,
        )
    flagged = report.unreconciled
    if flagged:
        print(f"{len(flagged)} cell(s) flagged unreconciled against the printed values", file=sys.stderr)
        if args.strict_paper:
            return EXIT_POLICY
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, out: TextIO) -> int:
    _require(args, "family", "d", "thetas")
    d = args.d
    directions = None if args.alpha is None else _directions(args.alpha, d)
    rows = exp.theta_sweep(args.family, d, args.thetas, directions)
    fh, close = _open_out(args.out, out)
    try:
        exp.write_sweep(rows, fh)
    finally:
        if close:
            fh.close()
    if args.chart:
        series: dict[str, tuple[list, list]] = {}
        for r in rows:
            xs, ys = series.setdefault(str(r.direction), ([], []))
            xs.append(r.theta)
            ys.append(r.value.value)
        family = rows[0].family if rows else args.family
        write_line_chart(args.chart, series, f"{family}, d={d}", "parameter", "coefficient")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, out: TextIO) -> int:
    model = _model(args)
    target = model.evaluator()
    if args.reflect:
        try:
            coords = [int(p) - 1 for p in args.reflect.split(",") if p.strip()]
        except ValueError:
            raise UsageError(f"--reflect expects 1-based coordinates such as 1,3, got {args.reflect!r}") from None
        if any(not 0 <= c < model.d for c in coords):
            raise DimensionError(f"--reflect coordinates must lie in 1..{model.d}")
        target = reflect(target, coords)
    if args.survival:
        target = survival_evaluator(target)
    report = validate_copula(target, args.resolution, args.tol)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kind", "location", "magnitude"])
    for v in report.violations:
        w.writerow([v.kind, " ".join(format_number(x) for x in v.location), format_number(v.magnitude)])
    print(
        f"{len(report.violations)} violation(s); {report.checked_points} points and "
        f"{report.checked_cells} cells checked at tol {report.tol:g}",
        file=sys.stderr,
    )
    return EXIT_OK if report.ok else EXIT_VIOLATIONS


COMMANDS = {
    "phi-exact": cmd_phi_exact,
    "phi-estimate": cmd_phi_estimate,
    "sample": cmd_sample,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def _join_sign_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--alpha -++`` as ``--alpha=-++`` so argparse does not read the value as a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--alpha" and i + 1 < len(argv) and SIGNS.fullmatch(argv[i + 1]):
            out.append(f"--alpha={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    argv = _join_sign_values(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("dirfootrule: error: a command is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.config:
            try:
                args = _apply_config(parser, argv, args)
            except SystemExit as exc:
                return int(exc.code or 0)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"dirfootrule: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"dirfootrule: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DataError as exc:
        print(f"dirfootrule: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DimensionError, ParameterError, ValueError) as exc:
        print(f"dirfootrule: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
