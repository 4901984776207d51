"""Seeded Monte Carlo studies of the rank estimator.

Replication ``r`` always draws from ``RngStream(master_seed, r)``, and
replicates are aggregated in index order, so reports do not depend on the
number of worker threads.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import coefficients as coef
from .coefficients import CoefficientValue
from .copulas import CopulaModel, normalize_family
from .dataset import format_number
from .direction import Direction, all_directions
from .estimators import _rank_columns, phi_hat_batch
from .reference_tables import TABLES, TableSpec
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .sampling import RngStream, sample_model

THREADS_ENV = "FOOTRULE_DIR_THREADS"
CHUNK = 50

REPORT_COLUMNS = (
    "family", "theta", "d", "alpha", "n", "replications", "mean", "sd", "bias", "rmse",
    "q25", "median", "q75", "exact", "exact_method", "paper_ref_value", "flag",
)  # fmt: skip

OK = "ok"
UNRECONCILED = "unreconciled"


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``$FOOTRULE_DIR_THREADS``, else CPU count (0 = auto)."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "0") or 0)
    if threads < 0:
        raise ValueError("threads must be >= 0")
    return threads or (os.cpu_count() or 1)


@dataclass(frozen=True)
class ExperimentConfig:
    model: CopulaModel
    directions: Sequence[Direction] | str = "all"
    sample_sizes: Sequence[int] = (500,)
    replications: int = 1000
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if any(n < 2 for n in self.sample_sizes):
            raise ValueError("every sample size must be >= 2")
        if isinstance(self.directions, str):
            if self.directions != "all":
                raise ValueError("directions must be 'all' or a list of Direction")
        else:
            object.__setattr__(self, "directions", tuple(self.directions))
            for alpha in self.directions:
                if alpha.d != self.model.d:
                    raise ValueError(f"direction {alpha} does not match dimension {self.model.d}")
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))

    def direction_list(self) -> list[Direction]:
        if isinstance(self.directions, str):
            return list(all_directions(self.model.d))
        return list(self.directions)


@dataclass(frozen=True)
class ReplicationStats:
    """Summary of the replicated estimates for one ``(direction, n)`` cell."""

    direction: Direction
    n: int
    replications: int
    mean: float
    sd: float
    bias: float
    rmse: float
    min: float
    max: float
    q25: float
    median: float
    q75: float
    exact: CoefficientValue
    replicates: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_replicates(cls, direction: Direction, n: int, values: np.ndarray, exact: CoefficientValue):
        values = np.asarray(values, dtype=float)
        r = len(values)
        mean = float(np.mean(values))
        sd = float(np.std(values, ddof=1)) if r > 1 else 0.0
        q25, median, q75 = (float(q) for q in np.quantile(values, [0.25, 0.5, 0.75]))
        return cls(
            direction=direction,
            n=n,
            replications=r,
            mean=mean,
            sd=sd,
            bias=mean - exact.value,
            rmse=float(np.sqrt(np.mean((values - exact.value) ** 2))),
            min=float(values.min()),
            max=float(values.max()),
            q25=q25,
            median=median,
            q75=q75,
            exact=exact,
            replicates=values,
        )

    @property
    def standard_error(self) -> float:
        return self.sd / math.sqrt(self.replications)

    @property
    def band(self) -> float:
        """Acceptance half-width ``max(0.01, 4 sd / sqrt(R))``."""
        return acceptance_band(self.sd, self.replications)


def acceptance_band(sd: float, replications: int) -> float:
    return max(0.01, 4.0 * sd / math.sqrt(replications))


def simulate_estimates(
    model: CopulaModel,
    directions: Sequence[Direction],
    n: int,
    replications: int,
    master_seed: int,
    threads: int | None = None,
) -> np.ndarray:
    """Estimates of shape ``(replications, len(directions))``, row ``r`` from stream ``r``."""
    out = np.empty((replications, len(directions)))

    def work(start: int) -> None:
        stop = min(start + CHUNK, replications)
        try:
            block = np.stack(
                [sample_model(model, n, RngStream(master_seed, r)).values for r in range(start, stop)]
            )
        except Exception as exc:
            raise RuntimeError(f"sampling failed for n={n}, replications {start}..{stop - 1}: {exc}") from exc
        ranks = _rank_columns(block)
        for k, alpha in enumerate(directions):
            out[start:stop, k] = phi_hat_batch(ranks, alpha)

    starts = range(0, replications, CHUNK)
    workers = resolve_threads(threads)
    if workers == 1:
        for s in starts:
            work(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    return out


def run_experiment(
    config: ExperimentConfig, spec: QuadratureSpec = DEFAULT_SPEC, threads: int | None = None
) -> list[ReplicationStats]:
    """Sample, rank and estimate for every ``(n, replication)``; one summary per ``(direction, n)``."""
    directions = config.direction_list()
    exact = [coef.best_coefficient(config.model, a, spec) for a in directions]
    stats = []
    for n in config.sample_sizes:
        est = simulate_estimates(config.model, directions, n, config.replications, config.master_seed, threads)
        for k, alpha in enumerate(directions):
            stats.append(ReplicationStats.from_replicates(alpha, n, est[:, k], exact[k]))
    return stats


def monte_carlo_coefficient(
    model: CopulaModel, alpha: Direction, draws: int = 10**7, master_seed: int = 0, chunk: int = 10**6
) -> tuple[float, float]:
    """Independent check of a coefficient from exact-sampler draws.

    Averages ``(min_J U - max_I U)_+`` (empty min = 1, empty max = 0) and
    returns ``(estimate, standard error)``.
    """
    neg, pos = list(alpha.negatives), list(alpha.positives)
    total = 0.0
    total_sq = 0.0
    done = 0
    stream = 0
    while done < draws:
        m = min(chunk, draws - done)
        u = sample_model(model, m, RngStream(master_seed, stream)).values
        upper = u[:, pos].min(axis=1) if pos else np.ones(m)
        lower = u[:, neg].max(axis=1) if neg else np.zeros(m)
        gap = np.maximum(upper - lower, 0.0)
        total += math.fsum(gap)
        total_sq += math.fsum(gap * gap)
        done += m
        stream += 1
    mean = total / draws
    var = max(total_sq / draws - mean * mean, 0.0)
    c = coef.scale(model.d)
    mass = float(coef.independence_mass(alpha.n_negative, alpha.n_positive))
    return c * (mean - mass), c * math.sqrt(var / draws)


# -- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    family: str
    theta: float | None
    stats: ReplicationStats
    paper_ref_value: float | None
    flag: str

    @property
    def d(self) -> int:
        return self.stats.direction.d

    def as_record(self) -> dict[str, str]:
        s = self.stats
        num = format_number
        return {
            "family": self.family,
            "theta": "" if self.theta is None else num(self.theta),
            "d": str(self.d),
            "alpha": str(s.direction),
            "n": str(s.n),
            "replications": str(s.replications),
            "mean": num(s.mean),
            "sd": num(s.sd),
            "bias": num(s.bias),
            "rmse": num(s.rmse),
            "q25": num(s.q25),
            "median": num(s.median),
            "q75": num(s.q75),
            "exact": num(s.exact.value),
            "exact_method": s.exact.method,
            "paper_ref_value": "" if self.paper_ref_value is None else num(self.paper_ref_value),
            "flag": self.flag,
        }


def flag_cell(stats: ReplicationStats, printed: float | None) -> str:
    """``unreconciled`` when the printed value sits outside the band around our mean or our exact value."""
    if printed is None:
        return OK
    band = stats.band
    if abs(stats.mean - printed) > band or abs(stats.exact.value - printed) > band:
        return UNRECONCILED
    return OK


def in_band(stats: ReplicationStats) -> bool:
    """Internal consistency: simulated mean within the band of our exact value."""
    return abs(stats.mean - stats.exact.value) <= stats.band


def report_rows(
    model: CopulaModel, stats: Sequence[ReplicationStats], printed_means: dict | None = None
) -> list[ReportRow]:
    printed_means = printed_means or {}
    rows = []
    for s in stats:
        printed_value = printed_means.get((model.param, str(s.direction), s.n))
        rows.append(ReportRow(model.family, model.param, s, printed_value, flag_cell(s, printed_value)))
    return rows


def write_report(rows: Sequence[ReportRow], target: str | Path | TextIO) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            write_report(rows, fh)
        return
    writer = csv.DictWriter(target, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_record())


@dataclass(frozen=True)
class ExactCheck:
    theta: float
    direction: str
    ours: CoefficientValue
    printed: float

    @property
    def abs_diff(self) -> float:
        return abs(self.ours.value - self.printed)


@dataclass(frozen=True)
class TableReport:
    table: TableSpec
    rows: tuple[ReportRow, ...]
    exact_checks: tuple[ExactCheck, ...]

    @property
    def out_of_band(self) -> list[ReportRow]:
        return [r for r in self.rows if not in_band(r.stats)]

    @property
    def unreconciled(self) -> list[ReportRow]:
        return [r for r in self.rows if r.flag == UNRECONCILED]

    def write(self, out_dir: str | Path) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        main = out_dir / f"{self.table.table_id}.csv"
        write_report(self.rows, main)
        paths = [main]
        if self.exact_checks:
            ex = out_dir / f"{self.table.table_id}_exact.csv"
            with open(ex, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["family", "theta", "d", "alpha", "exact", "exact_method", "printed_exact", "abs_diff"])
                for c in self.exact_checks:
                    w.writerow([
                        self.table.family, format_number(c.theta), self.table.d, c.direction,
                        format_number(c.ours.value), c.ours.method, format_number(c.printed),
                        format_number(c.abs_diff),
                    ])  # fmt: skip
            paths.append(ex)
        return paths


def reproduce_table(
    table_id: str,
    master_seed: int,
    replications: int = 1000,
    threads: int | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> TableReport:
    """Rerun one published simulation grid and compare it with our exact values."""
    try:
        table = TABLES[table_id.upper()]
    except KeyError:
        raise ValueError(f"unknown table {table_id!r}; expected one of {sorted(TABLES)}") from None
    rows: list[ReportRow] = []
    checks: list[ExactCheck] = []
    directions = [Direction.parse(a) for a in table.directions]
    for theta in table.thetas:
        model = CopulaModel(table.family, table.d, theta)
        config = ExperimentConfig(model, directions, table.sample_sizes, replications, master_seed)
        stats = run_experiment(config, spec, threads)
        rows.extend(report_rows(model, stats, table.printed_means))
        for alpha in directions:
            printed = table.printed_exact.get((theta, str(alpha)))
            if printed is not None:
                checks.append(ExactCheck(theta, str(alpha), coef.phi_dir_quadrature(model, alpha, spec), printed))
    return TableReport(table, tuple(rows), tuple(checks))


# -- convergence and parameter sweeps --------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    mean: float
    sd: float
    bias: float
    q25: float
    median: float
    q75: float
    whisker_low: float
    whisker_high: float
    exact: float


@dataclass(frozen=True)
class ConvergenceStudy:
    model: CopulaModel
    direction: Direction
    rows: tuple[ConvergenceRow, ...]

    @property
    def sd_strictly_decreasing(self) -> bool:
        sds = [r.sd for r in sorted(self.rows, key=lambda r: r.n)]
        return all(a > b for a, b in zip(sds, sds[1:]))


def convergence_study(
    model: CopulaModel,
    alpha: Direction,
    sample_sizes: Sequence[int],
    replications: int,
    master_seed: int,
    threads: int | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> ConvergenceStudy:
    """Box-plot summaries of the estimator at each sample size (whiskers at 1.5 IQR)."""
    config = ExperimentConfig(model, [alpha], sample_sizes, replications, master_seed)
    rows = []
    for s in run_experiment(config, spec, threads):
        iqr = s.q75 - s.q25
        vals = s.replicates
        low = float(vals[vals >= s.q25 - 1.5 * iqr].min())
        high = float(vals[vals <= s.q75 + 1.5 * iqr].max())
        rows.append(ConvergenceRow(s.n, s.mean, s.sd, s.bias, s.q25, s.median, s.q75, low, high, s.exact.value))
    return ConvergenceStudy(model, alpha, tuple(rows))


@dataclass(frozen=True)
class SweepRow:
    family: str
    d: int
    theta: float
    direction: Direction
    value: CoefficientValue

    @property
    def n_positive(self) -> int:
        return self.direction.n_positive


SWEEP_COLUMNS = ("family", "d", "theta", "n_positive", "alpha", "value", "method", "abs_error")


def theta_sweep(
    family: str,
    d: int,
    theta_grid: Sequence[float],
    directions: Sequence[Direction] | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> list[SweepRow]:
    """Exact coefficients along a parameter grid; one direction per ``|J|`` class by default."""
    family = normalize_family(family)
    if directions is None:
        directions = [Direction.with_counts(d - j, j) for j in range(d + 1)]
    rows = []
    for theta in theta_grid:
        model = CopulaModel(family, d, theta)
        for alpha in directions:
            rows.append(SweepRow(family, d, float(theta), alpha, coef.best_coefficient(model, alpha, spec)))
    return rows


def write_sweep(rows: Sequence[SweepRow], target: str | Path | TextIO) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            write_sweep(rows, fh)
        return
    w = csv.writer(target, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([
            r.family, r.d, format_number(r.theta), r.n_positive, str(r.direction),
            format_number(r.value.value), r.value.method, format_number(r.value.abs_error_estimate),
        ])  # fmt: skip
