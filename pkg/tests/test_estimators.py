import io
import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dirfootrule.dataset import Dataset, read_csv, write_csv
from dirfootrule.direction import Direction, all_directions
from dirfootrule.errors import DataError, DimensionError, TieError
from dirfootrule.estimators import (
    RankMatrix,
    empirical_dir_copula,
    phi_hat,
    phi_hat_all,
    phi_hat_batch,
    phi_hat_decompose,
    phi_hat_from_csv,
    phi_hat_via_process,
    phi_minus_hat,
    ranks,
)
from dirfootrule.sampling import RngStream, sample_clayton, sample_reference

P = Direction.parse


@st.composite
def rank_matrices(draw, max_n=50, max_d=5):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(2, max_d))
    cols = [draw(st.permutations(range(1, n + 1))) for _ in range(d)]
    return RankMatrix(np.array(cols).T)


def test_ranks_examples():
    r = ranks(np.array([[0.3, 1.0], [0.1, 2.0], [0.9, 3.0]]))
    assert r.ranks[:, 0].tolist() == [2, 1, 3]
    with pytest.warns(UserWarning):
        r = ranks(np.array([[5.0, 1.0], [5.0, 2.0], [1.0, 3.0]]))
    assert r.ranks[:, 0].tolist() == [2, 3, 1]
    with pytest.raises(TieError) as info:
        ranks(np.array([[5.0, 1.0], [5.0, 2.0], [1.0, 3.0]]), "strict")
    assert info.value.column == 0 and info.value.rows == (0, 1)


def test_rank_matrix_validation():
    with pytest.raises(ValueError):
        RankMatrix(np.array([[1, 1], [1, 2]]))
    with pytest.raises(DimensionError):
        RankMatrix(np.array([1, 2, 3]))


def test_comonotone_examples():
    for n in (1, 2, 7, 50):
        for d in (2, 3, 5):
            rm = RankMatrix.comonotone(n, d)
            assert phi_hat(rm, Direction.ones(d)).value == 1.0
            assert phi_hat(rm, Direction.minus_ones(d)).value == 1.0
    vals = {str(e.direction): e.value for e in phi_hat_all(RankMatrix.comonotone(9, 2))}
    assert vals == {"++": 1.0, "-+": -1.0, "+-": -1.0, "--": 1.0}


@pytest.mark.parametrize("n", [2, 4, 6, 10])
def test_countermonotone_examples(n):
    r = np.column_stack([np.arange(1, n + 1), np.arange(n, 0, -1)])
    rm = RankMatrix(r)
    assert phi_hat(rm, P("-+")).value == pytest.approx(3 * n / (2 * (n + 1)) - 1, abs=1e-15)
    if n == 4:
        assert phi_hat(rm, P("-+")).value == pytest.approx(0.2, abs=1e-15)
    if n == 2:
        assert phi_hat(rm, P("++")).value == 0.0
        assert phi_hat_decompose(rm, P("-+")).value == pytest.approx(0.0, abs=1e-15)
        assert phi_hat_decompose(RankMatrix.comonotone(2, 2), P("-+")).value == pytest.approx(-1.0, abs=1e-15)


@given(rank_matrices(max_n=20, max_d=4), st.data())
@settings(max_examples=150, deadline=None)
def test_matches_loop_oracle(rm, data):
    alpha = Direction(tuple(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=rm.d, max_size=rm.d))))
    expected = oracles.phi_hat_loops(rm.ranks.tolist(), alpha.signs)
    assert phi_hat(rm, alpha).value == float(expected)
    batch = phi_hat_batch(rm.ranks[None], alpha)[0]
    assert batch == pytest.approx(float(expected), abs=1e-12)


@given(rank_matrices())
@settings(max_examples=100, deadline=None)
def test_identities(rm):
    ests = phi_hat_all(rm)
    assert abs(math.fsum(e.value for e in ests)) < 1e-12
    for e in ests:
        assert phi_hat_via_process(rm, e.direction).value == pytest.approx(e.value, abs=1e-12)
        assert phi_hat_decompose(rm, e.direction).value == pytest.approx(e.value, abs=1e-12)


def test_process_identity_exhaustive_n3_d2():
    worst = 0.0
    perms = list(itertools.permutations([1, 2, 3]))
    for p1, p2 in itertools.product(perms, perms):
        rm = RankMatrix(np.column_stack([p1, p2]))
        for alpha in all_directions(2):
            worst = max(worst, abs(phi_hat_via_process(rm, alpha).value - phi_hat(rm, alpha).value))
    assert worst < 1e-13


@given(rank_matrices(max_n=30, max_d=4), st.data())
@settings(max_examples=80, deadline=None)
def test_permutation_equivariance(rm, data):
    order = data.draw(st.permutations(range(rm.d)))
    alpha = Direction(tuple(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=rm.d, max_size=rm.d))))
    permuted = RankMatrix(rm.ranks[:, list(order)])
    assert phi_hat(permuted, alpha.permuted(order)).value == phi_hat(rm, alpha).value


def test_rank_invariance():
    data = sample_clayton(3, 2.0, 200, RngStream(1))
    v = data.values.copy()
    transformed = np.column_stack([np.exp(v[:, 0]), v[:, 1] ** 3, np.arctan(10 * v[:, 2])])
    for alpha in all_directions(3):
        assert phi_hat(ranks(Dataset(transformed)), alpha).value == phi_hat(ranks(data), alpha).value


def test_phi_minus_hat_matches_full_estimate():
    data = sample_clayton(4, 1.0, 100, RngStream(2))
    rm = ranks(data)
    assert phi_minus_hat(rm, range(4)) == pytest.approx(phi_hat(rm, Direction.minus_ones(4)).value, abs=1e-15)


def test_empirical_dir_copula_examples():
    rm = RankMatrix.comonotone(2, 2)
    assert empirical_dir_copula(rm, Direction.ones(2), [0.9, 0.9]) == pytest.approx(2 / 3)
    r = ranks(sample_clayton(3, 1.0, 20, RngStream(3)))
    assert empirical_dir_copula(r, Direction.ones(3), [1.0, 1.0, 1.0]) == pytest.approx(20 / 21)
    assert empirical_dir_copula(r, Direction.ones(3), [0.01, 1.0, 1.0]) == 0.0


def test_independence_consistency():
    rm = ranks(sample_reference("independence", 3, 5000, RngStream(4)))
    assert all(abs(e.value) < 0.05 for e in phi_hat_all(rm))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        phi_hat(RankMatrix.comonotone(5, 3), P("+-"))


# -- CSV input -------------------------------------------------------------


def test_csv_round_trip_and_estimate(tmp_path):
    data = sample_clayton(3, 2.0, 50, RngStream(5))
    path = tmp_path / "x.csv"
    write_csv(data, path)
    back = read_csv(path)
    assert np.array_equal(back.values, data.values)
    assert back.column_names == ("U1", "U2", "U3")
    assert phi_hat_from_csv(path, P("+-+")).value == phi_hat(ranks(data), P("+-+")).value


def test_csv_comonotone_is_one(tmp_path):
    z = np.linspace(0.01, 0.99, 30)
    path = tmp_path / "co.csv"
    write_csv(Dataset(np.column_stack([z, z**2, np.sqrt(z)])), path)
    assert phi_hat_from_csv(path, P("+++")).value == 1.0


def test_csv_errors_name_the_cell(tmp_path):
    with pytest.raises(DataError, match=r"row 2, column 2 \('b'\)"):
        read_csv(io.StringIO("a,b\n0.1,0.2\n0.3,oops\n"))
    with pytest.raises(DataError, match="row 1"):
        read_csv(io.StringIO("a,b\n0.1\n"))
    with pytest.raises(DataError):
        read_csv(io.StringIO(""))
    with pytest.raises(DataError):
        read_csv(tmp_path / "missing.csv")
    path = tmp_path / "ties.csv"
    path.write_text("a,b\n1,2\n1,3\n0,4\n")
    with pytest.raises(TieError):
        phi_hat_from_csv(path, P("++"), "strict")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert phi_hat_from_csv(path, P("++")).n == 3
    with pytest.raises(DimensionError):
        phi_hat_from_csv(path, P("+++"))
