"""Acceptance suite.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion. Tolerances are the contract values and are not
to be loosened to make a line green.
"""

import csv
import itertools
import math
import time

import numpy as np
import pytest

import oracles
from dirfootrule import cli
from dirfootrule import coefficients as coef
from dirfootrule import experiments as exp
from dirfootrule.copulas import CopulaModel, survival_evaluator
from dirfootrule.direction import Direction, all_directions
from dirfootrule.estimators import (
    RankMatrix,
    phi_hat,
    phi_hat_all,
    phi_hat_decompose,
    phi_hat_via_process,
)
from dirfootrule.quadrature import QuadratureSpec
from dirfootrule.reference_tables import T1, T3, T4
from dirfootrule.sampling import RngStream, sample_cuadras_auge, sample_model

P = Direction.parse
criterion = pytest.mark.criterion


def one_per_class(d):
    """One direction for each number of + signs (models here are exchangeable)."""
    return [Direction.with_counts(d - k, k) for k in range(d + 1)]


def band(row):
    return max(0.01, 4 * float(row["sd"]) / math.sqrt(float(row["replications"])))


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# -- shared reproduction runs ----------------------------------------------


@pytest.fixture(scope="module")
def t3_runs(tmp_path_factory):
    """``reproduce --table T3 --seed 42`` with two thread counts."""
    dirs = []
    for threads in ("1", "4"):
        out = tmp_path_factory.mktemp(f"t3_threads{threads}")
        code = cli.main(["reproduce", "--table", "T3", "--seed", "42", "--out", str(out), "--threads", threads])
        assert code == 0
        dirs.append(out)
    return dirs


@pytest.fixture(scope="module")
def t6_report():
    return exp.reproduce_table("T6", master_seed=42, replications=1000)


# -- 1 ---------------------------------------------------------------------

C1 = "Table 1 exact values by quadrature within 2e-4, under 1 s"


@criterion("1", C1)
def test_c1_table1_exact_quadrature():
    model = CopulaModel("clayton", 3, 5.0)
    spec = QuadratureSpec(abs_tol=1e-10)
    start = time.perf_counter()
    values = {str(a): coef.phi_dir_quadrature(model, a, spec).value for a in all_directions(3)}
    elapsed = time.perf_counter() - start
    for alpha, value in values.items():
        assert abs(value - T1.printed_exact[(5.0, alpha)]) <= 2e-4, alpha
    assert elapsed < 1.0


# -- 2 ---------------------------------------------------------------------

C2 = "Clayton d=4 and d=5 exact columns within 2e-4, Monte Carlo arbitration"


@criterion("2", C2)
@pytest.mark.parametrize("table", [T3, T4], ids=["T3", "T4"])
def test_c2_exact_columns(table):
    alpha = P(table.directions[0])
    for theta in table.thetas:
        model = CopulaModel("clayton", table.d, theta)
        ours = coef.phi_dir_quadrature(model, alpha).value
        printed = table.printed_exact[(theta, str(alpha))]
        if abs(ours - printed) > 2e-4:
            value, se = exp.monte_carlo_coefficient(model, alpha, draws=10_000_000, master_seed=2024)
            assert abs(ours - value) <= 4 * se, (theta, ours, printed, value)


# -- 3 ---------------------------------------------------------------------

C3 = "closed form vs quadrature vs decomposition within 1e-8 over ~200 cells, under 30 s"


def closed_form_matrix():
    cells = []
    for d in (2, 3, 4, 5):
        models = [CopulaModel("independence", d), CopulaModel("comonotone", d)]
        models += [CopulaModel("fgm", d, lam) for lam in (-1.0, -0.5, 0.5, 1.0)]
        models += [CopulaModel("cuadras_auge", d, t) for t in (0.2, 0.5, 0.8)]
        models += [CopulaModel("clayton", d, t) for t in (1.0, 5.0)]
        if d == 2:
            models.append(CopulaModel("countermonotone", 2))
        for m in models:
            cells += [(m, a) for a in one_per_class(d)]
    for theta in (0.4, 0.8):  # all five d=4 cases again with the printed parameters
        cells += [(CopulaModel("cuadras_auge", 4, theta), a) for a in one_per_class(4)]
    return cells


def reference_value(model, alpha):
    if model.family == "clayton":
        return coef.phi_Clayton_semi(model.d, model.param, alpha)
    return coef.closed_form(model, alpha)


@criterion("3", C3)
def test_c3_closed_form_matrix():
    cells = closed_form_matrix()
    assert 190 <= len(cells) <= 260
    worst = 0.0
    bad = []
    start = time.perf_counter()
    for model, alpha in cells:
        ref = reference_value(model, alpha).value
        quad = coef.phi_dir_quadrature(model, alpha).value
        dec = coef.phi_dir_decompose(model, alpha).value
        gap = max(abs(ref - quad), abs(ref - dec), abs(quad - dec))
        worst = max(worst, gap)
        if gap > 1e-8:
            bad.append((model.label, str(alpha), ref, quad, dec))
    elapsed = time.perf_counter() - start
    assert not bad
    assert elapsed < 30.0


@criterion("3", C3)
def test_c3_fgm_parity_and_ca_cases():
    from test_coefficients import ca_case

    for theta in (0.4, 0.8):
        for j in range(5):
            ours = coef.phi_CA_closed(4, theta, Direction.with_counts(4 - j, j)).value
            assert abs(ours - ca_case(j, theta)) <= 1e-12
    for d in (2, 3, 4, 5):
        for j in range(d + 1):
            v = coef.phi_FGM_closed(d, 1.0, Direction.with_counts(d - j, j)).value
            assert math.copysign(1.0, v) == (-1) ** j


# -- 4 ---------------------------------------------------------------------

C4 = "estimator identities: exhaustive n<=4 d<=3, 1000 random n<=50 d<=5, comonotone exact"


def check_identities(rm):
    ests = phi_hat_all(rm)
    assert abs(math.fsum(e.value for e in ests)) <= 1e-12
    for e in ests:
        assert abs(phi_hat_via_process(rm, e.direction).value - e.value) <= 1e-12
        assert abs(phi_hat_decompose(rm, e.direction).value - e.value) <= 1e-12


@criterion("4", C4)
def test_c4_exhaustive_small():
    start = time.perf_counter()
    count = 0
    for n in range(1, 5):
        perms = list(itertools.permutations(range(1, n + 1)))
        for d in (2, 3):
            for cols in itertools.product(perms, repeat=d):
                check_identities(RankMatrix(np.array(cols).T.reshape(n, d)))
                count += 1
    assert count == sum(math.factorial(n) ** 2 + math.factorial(n) ** 3 for n in range(1, 5))
    assert time.perf_counter() - start < 60.0


@criterion("4", C4)
def test_c4_random_matrices():
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    for _ in range(1000):
        n = int(rng.integers(1, 51))
        d = int(rng.integers(2, 6))
        rm = RankMatrix(np.column_stack([rng.permutation(n) + 1 for _ in range(d)]))
        check_identities(rm)
        alpha = Direction(tuple(int(s) for s in rng.choice([-1, 1], d)))
        assert phi_hat(rm, alpha).value == float(oracles.phi_hat_loops(rm.ranks.tolist(), alpha.signs))
    assert time.perf_counter() - start < 60.0


@criterion("4", C4)
def test_c4_comonotone_exact():
    for n in range(1, 51):
        for d in (2, 3, 4, 5):
            rm = RankMatrix.comonotone(n, d)
            assert phi_hat(rm, Direction.ones(d)).value == 1.0
            assert phi_hat(rm, Direction.minus_ones(d)).value == 1.0


# -- 5 ---------------------------------------------------------------------

C5 = "reproduce T1, T3, T4: means within max(0.01, 4 sd/sqrt(R)) of exact, under 5 min"


@criterion("5", C5)
def test_c5_reproduce_t1(tmp_path):
    start = time.perf_counter()
    assert cli.main(["reproduce", "--table", "T1", "--seed", "42", "--reps", "1000", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "T1.csv")
    assert len(rows) == 8 and {r["n"] for r in rows} == {"500"}
    for r in rows:
        assert abs(float(r["mean"]) - float(r["exact"])) <= band(r), r["alpha"]
        assert abs(float(r["paper_ref_value"]) - float(r["exact"])) <= band(r), r["alpha"]
    assert time.perf_counter() - start < 300


@criterion("5", C5)
def test_c5_reproduce_t3(t3_runs):
    rows = read_rows(t3_runs[0] / "T3.csv")
    assert len(rows) == 20
    for r in rows:
        assert abs(float(r["mean"]) - float(r["exact"])) <= band(r), (r["theta"], r["n"])


@criterion("5", C5)
def test_c5_reproduce_t4(tmp_path):
    start = time.perf_counter()
    assert cli.main(["reproduce", "--table", "T4", "--seed", "42", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "T4.csv")
    assert len(rows) == 20
    for r in rows:
        assert abs(float(r["mean"]) - float(r["exact"])) <= band(r), (r["theta"], r["n"])
    assert time.perf_counter() - start < 300


# -- 6 ---------------------------------------------------------------------

C6 = "T6: mixed cells in band, extreme cells flagged, all n=500 means inside our band"


def t6_cells(report, n=500):
    return [r for r in report.rows if r.stats.n == n]


@criterion("6", C6)
def test_c6_mixed_cells_in_band(t6_report):
    for row in t6_cells(t6_report):
        if not row.stats.direction.is_extreme:
            assert exp.in_band(row.stats), (row.theta, str(row.stats.direction))


@criterion("6", C6)
def test_c6_extreme_cells_flagged(t6_report):
    extreme = [r for r in t6_cells(t6_report) if r.stats.direction.is_extreme]
    assert len(extreme) == 4
    assert all(r.flag == exp.UNRECONCILED for r in extreme)
    exact = {(r.theta, str(r.stats.direction)): round(r.stats.exact.value, 5) for r in extreme}
    assert exact == {(0.4, "----"): 0.21053, (0.4, "++++"): 0.40283, (0.8, "----"): 0.61538, (0.8, "++++"): 0.8174}


@criterion("6", C6)
def test_c6_internal_consistency(t6_report):
    misses = [
        (r.theta, str(r.stats.direction), round(r.stats.mean, 5), round(r.stats.exact.value, 5), round(r.stats.band, 5))
        for r in t6_cells(t6_report)
        if not exp.in_band(r.stats)
    ]
    assert not misses


# -- 7 ---------------------------------------------------------------------

C7 = "sum-to-zero, reflection symmetry, footrule identity, FGM monotonicity"


def family_matrix():
    out = [CopulaModel("countermonotone", 2)]
    for d in (2, 3, 4, 5):
        out += [CopulaModel("independence", d), CopulaModel("comonotone", d)]
        out += [CopulaModel("fgm", d, lam) for lam in (-1.0, -0.3, 0.6, 1.0)]
        out += [CopulaModel("clayton", d, t) for t in (0.4, 2.0, 5.0)]
        out += [CopulaModel("cuadras_auge", d, t) for t in (0.3, 0.8)]
    return out


FAMILY_MATRIX = family_matrix()


@criterion("7", C7)
@pytest.mark.parametrize("model", FAMILY_MATRIX, ids=[m.label for m in FAMILY_MATRIX])
def test_c7_sum_to_zero_and_footrule(model):
    table = coef.direction_table(model, method="quadrature")
    assert table.deviation <= 1e-8
    values = {str(a): v.value for a, v in table.rows}
    mixed = math.fsum(v for a, v in values.items() if not P(a).is_extreme)
    assert abs(coef.phi_footrule(model).value - (-0.5 * mixed)) <= 1e-6


@criterion("7", C7)
@pytest.mark.parametrize("model", FAMILY_MATRIX, ids=[m.label for m in FAMILY_MATRIX])
def test_c7_reflection_symmetry(model):
    survival = survival_evaluator(model)
    for alpha in one_per_class(model.d):
        lhs = coef.best_coefficient(model, alpha).value
        rhs = coef.phi_dir_quadrature(survival, -alpha).value
        assert abs(lhs - rhs) <= 1e-6, str(alpha)


@criterion("7", C7)
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_c7_fgm_monotone_in_lambda(d):
    grid = np.linspace(-1.0, 1.0, 21)
    for alpha in one_per_class(d):
        vals = [coef.phi_dir_quadrature(CopulaModel("fgm", d, float(lam)), alpha).value for lam in grid]
        steps = np.diff(vals) * (-1) ** alpha.n_positive
        assert np.all(steps > 0), str(alpha)


# -- 8 ---------------------------------------------------------------------

C8 = "sampler CDF at 5 probe points within 4 binomial SE at n=200000; CA endpoints exact"

SAMPLER_MODELS = [
    CopulaModel("clayton", 3, 2.0),
    CopulaModel("clayton", 4, 0.4),
    CopulaModel("cuadras_auge", 4, 0.4),
    CopulaModel("cuadras_auge", 3, 0.8),
    CopulaModel("fgm", 3, 1.0),
    CopulaModel("fgm", 4, -0.7),
    CopulaModel("independence", 3),
    CopulaModel("comonotone", 3),
    CopulaModel("countermonotone", 2),
]


@criterion("8", C8)
@pytest.mark.parametrize("model", SAMPLER_MODELS, ids=[m.label for m in SAMPLER_MODELS])
def test_c8_sampler_cdf(model):
    n = 200_000
    x = sample_model(model, n, RngStream(8, 0)).values
    probes = np.random.default_rng(99).uniform(0.15, 0.9, size=(5, model.d))
    for u in probes:
        p = float(oracles.family_cdf(model.family, model.param)(u[None])[0])
        se = math.sqrt(max(p * (1 - p), 1e-12) / n)
        assert abs(oracles.empirical_cdf(x, u) - p) <= 4 * se, u


@criterion("8", C8)
def test_c8_ca_endpoints():
    one = sample_cuadras_auge(4, 1.0, 5000, RngStream(1)).values
    assert np.all(one == one[:, :1])
    zero = sample_cuadras_auge(4, 0.0, 5000, RngStream(1)).values
    assert np.array_equal(zero, RngStream(1).generator.random((5000, 4)))
    u = np.random.default_rng(3).random((200, 4))
    assert np.array_equal(CopulaModel("cuadras_auge", 4, 1.0).cdf(u), u.min(axis=1))
    assert np.array_equal(CopulaModel("cuadras_auge", 4, 0.0).cdf(u), CopulaModel("independence", 4).cdf(u))


# -- 9 ---------------------------------------------------------------------

C9 = "reproduce T3 --seed 42 byte-identical across thread counts"


@criterion("9", C9)
def test_c9_thread_count_determinism(t3_runs):
    a, b = t3_runs
    for name in ("T3.csv", "T3_exact.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


# -- convergence -----------------------------------------------------------

CC = "sd strictly decreasing over n=20..500 and |bias| < 0.01 at n=500 for every tested cell"

CONVERGENCE_CELLS = [
    (CopulaModel("cuadras_auge", 4, 0.8), "++++"),
    (CopulaModel("cuadras_auge", 4, 0.8), "+-++"),
    (CopulaModel("cuadras_auge", 4, 0.4), "--++"),
    (CopulaModel("clayton", 4, 2.0), "-++-"),
    (CopulaModel("clayton", 5, 2.0), "+-+-+"),
    (CopulaModel("clayton", 3, 5.0), "+++"),
]


@pytest.fixture(scope="module")
def convergence_runs():
    return {
        (m.label, a): exp.convergence_study(m, P(a), (20, 50, 100, 500), 1000, 7)
        for m, a in CONVERGENCE_CELLS
    }


@criterion("convergence", CC)
@pytest.mark.parametrize("model, alpha", CONVERGENCE_CELLS, ids=[f"{m.label}-{a}" for m, a in CONVERGENCE_CELLS])
def test_convergence_cells(convergence_runs, model, alpha):
    study = convergence_runs[(model.label, alpha)]
    assert study.sd_strictly_decreasing
    assert abs(study.rows[-1].bias) < 0.01


@criterion("convergence", CC)
def test_convergence_ca_median(convergence_runs):
    study = convergence_runs[(CopulaModel("cuadras_auge", 4, 0.8).label, "++++")]
    assert abs(study.rows[-1].median - 0.81740) <= 0.02
