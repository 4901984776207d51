"""Rank-based estimation of directional footrule coefficients.

With column ranks ``R`` (1 = smallest) and pseudo-observations ``R / (n+1)``,
the estimate for a direction with negative set ``I`` and positive set ``J`` is::

    2(d+1) / ((d-1)(n+1)) * [ (1/n) sum_j (min_J R_j - max_I R_j)_+ - (n+1) |I|!|J|! / (d+1)! ]

with ``min`` over an empty set equal to ``n+1`` and ``max`` over an empty
set equal to ``0``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .coefficients import decomposition_weight, independence_mass, independence_offset, scale
from .dataset import Dataset, read_csv
from .direction import Direction, all_directions
from .errors import DimensionError, TieError

FIRST_OCCURRENCE = "first_occurrence"
STRICT = "strict"
TIE_POLICIES = (FIRST_OCCURRENCE, STRICT)

MAX_ALL_DIM = 12


@dataclass(frozen=True)
class RankMatrix:
    """Column-wise ranks; every column is a permutation of ``1..n``."""

    ranks: np.ndarray

    def __post_init__(self) -> None:
        r = np.array(self.ranks, dtype=np.int64)
        if r.ndim != 2:
            raise DimensionError(f"rank matrix must be 2-D, got shape {r.shape}")
        n, d = r.shape
        if n < 1 or d < 2:
            raise DimensionError(f"rank matrix needs n >= 1 and d >= 2, got {n}x{d}")
        expected = np.arange(1, n + 1)
        for col in range(d):
            if not np.array_equal(np.sort(r[:, col]), expected):
                raise ValueError(f"column {col} is not a permutation of 1..{n}")
        r.setflags(write=False)
        object.__setattr__(self, "ranks", r)

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def d(self) -> int:
        return self.ranks.shape[1]

    @classmethod
    def comonotone(cls, n: int, d: int) -> "RankMatrix":
        return cls(np.repeat(np.arange(1, n + 1)[:, None], d, axis=1))


@dataclass(frozen=True)
class EstimateValue:
    value: float
    direction: Direction
    n: int


def _rank_columns(values: np.ndarray) -> np.ndarray:
    """Ordinal ranks along axis -2, ties broken by row order."""
    order = np.argsort(values, axis=-2, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(1, values.shape[-2] + 1)[:, None], axis=-2)
    return ranks


def ranks(data: Dataset | np.ndarray, tie_policy: str = FIRST_OCCURRENCE) -> RankMatrix:
    """Column-wise ranks of the observations, 1 = smallest."""
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"unknown tie policy {tie_policy!r}; expected one of {TIE_POLICIES}")
    values = data.values if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if values.ndim != 2 or values.shape[0] < 2:
        raise DimensionError("ranking needs at least 2 observations in a 2-D matrix")
    for col in range(values.shape[1]):
        column = values[:, col]
        order = np.argsort(column, kind="stable")
        dup = np.nonzero(np.diff(column[order]) == 0)[0]
        if dup.size:
            rows = tuple(sorted({int(order[i]) for i in dup} | {int(order[i + 1]) for i in dup}))
            if tie_policy == STRICT:
                raise TieError(col, rows)
            warnings.warn(f"ties in column {col} broken by row order", stacklevel=2)
    return RankMatrix(_rank_columns(values))


def _check(rm: RankMatrix, alpha: Direction) -> None:
    if alpha.d != rm.d:
        raise DimensionError(f"direction {alpha} has {alpha.d} entries but the data has {rm.d} columns")


def gap_sums(r: np.ndarray, alpha: Direction) -> np.ndarray:
    """``sum_j (min_J R_j - max_I R_j)_+`` over the row axis; ``r`` has shape ``(..., n, d)``."""
    n = r.shape[-2]
    neg, pos = list(alpha.negatives), list(alpha.positives)
    upper = r[..., pos].min(axis=-1) if pos else np.full(r.shape[:-1], n + 1, dtype=r.dtype)
    lower = r[..., neg].max(axis=-1) if neg else np.zeros(r.shape[:-1], dtype=r.dtype)
    return np.maximum(upper - lower, 0).sum(axis=-1)


def phi_hat_batch(r: np.ndarray, alpha: Direction) -> np.ndarray:
    """Floating-point estimates for a stack of rank matrices of shape ``(..., n, d)``."""
    n, d = r.shape[-2], r.shape[-1]
    mass = float(independence_mass(alpha.n_negative, alpha.n_positive))
    s = gap_sums(r, alpha).astype(float)
    return scale(d) / (n + 1) * (s / n - (n + 1) * mass)


def phi_hat(rm: RankMatrix, alpha: Direction) -> EstimateValue:
    """The estimate, evaluated in exact rational arithmetic and rounded once."""
    _check(rm, alpha)
    n, d = rm.n, rm.d
    s = int(gap_sums(rm.ranks, alpha))
    mass = independence_mass(alpha.n_negative, alpha.n_positive)
    inner = Fraction(s, n) - (n + 1) * mass
    value = Fraction(2 * (d + 1), (d - 1) * (n + 1)) * inner
    return EstimateValue(float(value), alpha, n)


def phi_hat_all(rm: RankMatrix) -> list[EstimateValue]:
    if rm.d > MAX_ALL_DIM:
        raise DimensionError(f"all-direction estimates are limited to d <= {MAX_ALL_DIM}")
    return [phi_hat(rm, alpha) for alpha in all_directions(rm.d)]


def empirical_dir_copula(rm: RankMatrix, alpha: Direction, u) -> np.ndarray | float:
    """Directional empirical copula ``(1/(n+1)) sum_j prod_i 1{alpha_i R_ij/(n+1) <= alpha_i u_i}``.

    ``u`` may be a single point or an array of points of shape ``(..., d)``.
    """
    _check(rm, alpha)
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != rm.d:
        raise DimensionError(f"point has {u.shape[-1]} coordinates, expected {rm.d}")
    n = rm.n
    pseudo = rm.ranks / (n + 1.0)
    signs = np.asarray(alpha.signs, dtype=float)
    # (..., 1, d) against (n, d)
    hit = (signs * pseudo) <= (signs * u)[..., None, :]
    out = hit.all(axis=-1).sum(axis=-1) / (n + 1.0)
    return float(out) if u.ndim == 1 else out


def phi_hat_via_process(rm: RankMatrix, alpha: Direction) -> EstimateValue:
    """Estimate from the integral of the opposite-direction empirical copula along the diagonal.

    That diagonal is a step function with jumps only at multiples of
    ``1/(n+1)``, so the integral is the sum of its midpoint values times the
    step width.
    """
    _check(rm, alpha)
    n, d = rm.n, rm.d
    mids = (np.arange(n + 1) + 0.5) / (n + 1.0)
    pts = np.repeat(mids[:, None], d, axis=1)
    heights = empirical_dir_copula(rm, -alpha, pts)
    integral = math.fsum(heights) / (n + 1.0)
    value = scale(d) * (n + 1) / n * integral - independence_offset(d, alpha.n_positive)
    return EstimateValue(value, alpha, n)


def phi_minus_hat(rm: RankMatrix, columns) -> float:
    """Downward estimate ``phi~^-`` on a column subset, via reversed ranks ``n+1-R``."""
    columns = list(columns)
    m = len(columns)
    if m < 2:
        raise DimensionError("phi^- needs at least 2 columns")
    n = rm.n
    reversed_ranks = n + 1 - rm.ranks[:, columns]
    s = int(reversed_ranks.min(axis=1).sum())
    inner = Fraction(s, n) - Fraction(n + 1, m + 1)
    return float(Fraction(2 * (m + 1), (m - 1) * (n + 1)) * inner)


def phi_hat_decompose(rm: RankMatrix, alpha: Direction) -> EstimateValue:
    """Estimate as a signed combination of ``phi~^-`` on the column subsets ``I u K``, ``K <= J``."""
    _check(rm, alpha)
    d = rm.d
    if d > MAX_ALL_DIM:
        raise DimensionError(f"decomposition is limited to d <= {MAX_ALL_DIM}")
    neg, pos = alpha.negatives, alpha.positives
    terms = []
    for r in range(len(pos) + 1):
        m = len(neg) + r
        if m <= 1:
            continue
        for sub in itertools.combinations(pos, r):
            terms.append(((-1) ** r) * decomposition_weight(m) * phi_minus_hat(rm, neg + sub))
    return EstimateValue(scale(d) * math.fsum(terms), alpha, rm.n)


def phi_hat_from_csv(path: str | Path, alpha: Direction, tie_policy: str = FIRST_OCCURRENCE) -> EstimateValue:
    data = read_csv(path)
    if data.d != alpha.d:
        raise DimensionError(f"direction {alpha} has {alpha.d} entries but the CSV has {data.d} columns")
    return phi_hat(ranks(data, tie_policy), alpha)
