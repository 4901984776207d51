"""Directional footrule coefficients of a copula.

For a direction ``alpha`` with negative set ``I`` and positive set ``J``::

    phi^alpha(C) = 2(d+1)/(d-1) * int_0^1 P[U_I <= u, U_J > u] du - 2 / ((d-1) binom(d, |J|))

and the orthant probability expands by inclusion-exclusion into subset
marginal diagonals, ``sum_{S <= J} (-1)^|S| delta_{C_{I u S}}(u)``.
Three routes are provided: family closed forms, one-dimensional
quadrature of that expansion, and the expansion into lower-dimensional
``phi^-`` coefficients.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from . import copulas as cop
from .copulas import CopulaModel, Target
from .direction import Direction, all_directions
from .errors import DimensionError, ParameterError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
DECOMPOSITION = "decomposition"

MAX_TABLE_DIM = 12


@dataclass(frozen=True)
class CoefficientValue:
    value: float
    method: str
    abs_error_estimate: float = 0.0


def scale(d: int) -> float:
    """Normalising factor ``2(d+1)/(d-1)``."""
    if d < 2:
        raise DimensionError("coefficients need d >= 2")
    return 2.0 * (d + 1) / (d - 1)


def independence_mass(n_negative: int, n_positive: int) -> Fraction:
    """``|I|! |J|! / (d+1)!``, the integral of the orthant probability under independence."""
    d = n_negative + n_positive
    return Fraction(math.factorial(n_negative) * math.factorial(n_positive), math.factorial(d + 1))


def independence_offset(d: int, n_positive: int) -> float:
    """``2 / ((d-1) binom(d, |J|))``."""
    return float(Fraction(2, (d - 1) * math.comb(d, n_positive)))


def _tightened(spec: QuadratureSpec, factor: float) -> QuadratureSpec:
    # integrals get multiplied by `factor`; shrink their tolerance to match
    return dataclasses.replace(spec, abs_tol=spec.abs_tol / max(factor, 1.0))


def _check(target: Target, alpha: Direction | None = None) -> int:
    d = cop.dimension_of(target)
    if d < 2:
        raise DimensionError("coefficients need d >= 2")
    if alpha is not None and alpha.d != d:
        raise DimensionError(f"direction {alpha} has {alpha.d} entries but the copula has dimension {d}")
    return d


def orthant_diagonal(target: Target, alpha: Direction) -> Callable[[np.ndarray], np.ndarray]:
    """``u -> P[U_i <= u for i in I, U_j > u for j in J]`` via marginal diagonals."""
    neg, pos = alpha.negatives, alpha.positives
    if isinstance(target, CopulaModel):
        n_i, n_j = len(neg), len(pos)
        weights = [((-1) ** k) * math.comb(n_j, k) for k in range(n_j + 1)]

        def f(u: np.ndarray) -> np.ndarray:
            total = np.zeros_like(u)
            for k, wk in enumerate(weights):
                total = total + wk * target.diagonal(n_i + k, u)
            return total

        return f

    ev = cop.as_evaluator(target)
    subsets = [
        ((-1) ** r, neg + sub) for r in range(len(pos) + 1) for sub in itertools.combinations(pos, r)
    ]

    def g(u: np.ndarray) -> np.ndarray:
        total = np.zeros_like(u)
        for sign, sub in subsets:
            total = total + sign * np.asarray(ev.marginal_diagonal(sub, u), dtype=float)
        return total

    return g


def phi_dir_quadrature(target: Target, alpha: Direction, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientValue:
    d = _check(target, alpha)
    integral, err = integrate(orthant_diagonal(target, alpha), _tightened(spec, scale(d)))
    mass = float(independence_mass(alpha.n_negative, alpha.n_positive))
    c = scale(d)
    return CoefficientValue(c * (integral - mass), QUADRATURE, c * err)


def phi_minus(target: Target, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientValue:
    """Downward diagonal index ``phi^-``, from the diagonal section of ``C``."""
    d = _check(target)
    if isinstance(target, CopulaModel):
        return _phi_minus_model(target, spec)
    ev = cop.as_evaluator(target)
    full = tuple(range(d))
    integral, err = integrate(
        lambda u: np.asarray(ev.marginal_diagonal(full, u), dtype=float), _tightened(spec, scale(d))
    )
    c = scale(d)
    return CoefficientValue(c * integral - 2.0 / (d - 1), QUADRATURE, c * err)


@lru_cache(maxsize=1024)
def _phi_minus_model(model: CopulaModel, spec: QuadratureSpec) -> CoefficientValue:
    d = model.d
    integral, err = integrate(lambda u: model.diagonal(d, u), _tightened(spec, scale(d)))
    c = scale(d)
    return CoefficientValue(c * integral - 2.0 / (d - 1), QUADRATURE, c * err)


def phi_plus(target: Target, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientValue:
    """Upward diagonal index ``phi^+``, from the survival diagonal."""
    d = _check(target)
    return phi_dir_quadrature(target, Direction.ones(d), spec)


def phi_footrule(target: Target, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientValue:
    """Multivariate Spearman footrule as the mean of ``phi^+`` and ``phi^-``."""
    plus = phi_plus(target, spec)
    minus = phi_minus(target, spec)
    return CoefficientValue(
        0.5 * (plus.value + minus.value),
        QUADRATURE,
        0.5 * (plus.abs_error_estimate + minus.abs_error_estimate),
    )


def decomposition_weight(m: int) -> float:
    """Coefficient ``(m-1) / (2(m+1))`` of a size-``m`` ``phi^-`` term (zero for ``m <= 1``)."""
    return 0.0 if m <= 1 else (m - 1) / (2.0 * (m + 1))


def phi_dir_decompose(target: Target, alpha: Direction, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientValue:
    """Expand ``phi^alpha`` into ``phi^-`` coefficients of the marginals ``I u S``, ``S <= J``.

    Terms of size 0 and 1 carry no ``phi^-`` and contribute nothing.
    """
    d = _check(target, alpha)
    neg, pos = alpha.negatives, alpha.positives
    total = 0.0
    err = 0.0
    weight_sum = sum(
        math.comb(len(pos), k) * decomposition_weight(len(neg) + k) for k in range(len(pos) + 1)
    )
    spec = _tightened(spec, scale(d) * weight_sum)
    if isinstance(target, CopulaModel):
        for k in range(len(pos) + 1):
            m = len(neg) + k
            if m <= 1:
                continue
            pm = phi_minus(target.marginal(m), spec)
            w = ((-1) ** k) * math.comb(len(pos), k) * decomposition_weight(m)
            total += w * pm.value
            err += abs(w) * pm.abs_error_estimate
    else:
        ev = cop.as_evaluator(target)
        for r in range(len(pos) + 1):
            m = len(neg) + r
            if m <= 1:
                continue
            for sub in itertools.combinations(pos, r):
                pm = phi_minus(ev.restrict(tuple(sorted(neg + sub))), spec)
                w = ((-1) ** r) * decomposition_weight(m)
                total += w * pm.value
                err += abs(w) * pm.abs_error_estimate
    c = scale(d)
    return CoefficientValue(c * total, DECOMPOSITION, c * err)


# -- family closed forms ---------------------------------------------------


def phi_M_closed(d: int, k: int) -> CoefficientValue:
    """Comonotone copula ``M_d`` with ``k`` entries equal to ``-1``."""
    if d < 2 or not 0 <= k <= d:
        raise ValueError(f"need d >= 2 and 0 <= k <= d, got d={d}, k={k}")
    if k in (0, d):
        return CoefficientValue(1.0, CLOSED_FORM)
    return CoefficientValue(-float(Fraction(2, (d - 1) * math.comb(d, k))), CLOSED_FORM)


def phi_W_closed(alpha: Direction) -> CoefficientValue:
    """Countermonotone ``W`` (d = 2): ``-1/2`` at the extreme directions, ``1/2`` otherwise."""
    if alpha.d != 2:
        raise DimensionError("W is a copula only for d = 2")
    return CoefficientValue(-0.5 if alpha.is_extreme else 0.5, CLOSED_FORM)


def phi_FGM_closed(d: int, lam: float, alpha: Direction) -> CoefficientValue:
    if alpha.d != d:
        raise DimensionError(f"direction {alpha} does not have {d} entries")
    if not -1.0 <= lam <= 1.0:
        raise ParameterError(f"FGM lambda must lie in [-1, 1], got {lam}")
    base = Fraction(2 * (d + 1) * math.factorial(d) ** 2, (d - 1) * math.factorial(2 * d + 1))
    sign = -1.0 if alpha.n_positive % 2 else 1.0
    return CoefficientValue(sign * lam * float(base), CLOSED_FORM)


def _ca_term(theta: float, m: int) -> float:
    # int_0^1 u^(m - theta(m-1)) du - 1/(m+1); vanishes for the empty marginal
    if m == 0:
        return 0.0
    return theta * (m - 1) / ((m + 1) ** 2 - theta * (m * m - 1))


def phi_CA_closed(d: int, theta: float, alpha: Direction) -> CoefficientValue:
    if alpha.d != d:
        raise DimensionError(f"direction {alpha} does not have {d} entries")
    if not 0.0 <= theta <= 1.0:
        raise ParameterError(f"Cuadras-Augé theta must lie in [0, 1], got {theta}")
    n_i, n_j = alpha.n_negative, alpha.n_positive
    s = sum(((-1) ** k) * math.comb(n_j, k) * _ca_term(theta, n_i + k) for k in range(n_j + 1))
    return CoefficientValue(scale(d) * s, CLOSED_FORM)


def phi_Clayton_semi(
    d: int, theta: float, alpha: Direction, spec: QuadratureSpec = DEFAULT_SPEC
) -> CoefficientValue:
    """Clayton coefficient as an alternating sum of separately integrated diagonals."""
    if alpha.d != d:
        raise DimensionError(f"direction {alpha} does not have {d} entries")
    if not theta > 0:
        raise ParameterError(f"Clayton theta must be > 0, got {theta}")
    n_i, n_j = alpha.n_negative, alpha.n_positive
    total = 0.0
    err = 0.0
    spec = _tightened(spec, scale(d) * 2**n_j)
    for k in range(n_j + 1):
        m = n_i + k
        if m == 0:
            integral, e = 1.0, 0.0
        elif m == 1:
            integral, e = 0.5, 0.0
        else:
            integral, e = integrate(lambda u, m=m: u * (m + (1.0 - m) * u**theta) ** (-1.0 / theta), spec)
        w = ((-1) ** k) * math.comb(n_j, k)
        total += w * integral
        err += abs(w) * e
    c = scale(d)
    return CoefficientValue(c * total - independence_offset(d, n_j), QUADRATURE, c * err)


def closed_form(model: CopulaModel, alpha: Direction) -> CoefficientValue | None:
    """The family closed form, or ``None`` when the family has none (Clayton)."""
    _check(model, alpha)
    f = model.family
    if f == cop.INDEPENDENCE:
        return CoefficientValue(0.0, CLOSED_FORM)
    if f == cop.COMONOTONE:
        return phi_M_closed(model.d, alpha.n_negative)
    if f == cop.COUNTERMONOTONE:
        return phi_W_closed(alpha)
    if f == cop.FGM:
        return phi_FGM_closed(model.d, model.param, alpha)
    if f == cop.CUADRAS_AUGE:
        return phi_CA_closed(model.d, model.param, alpha)
    return None


def best_coefficient(target: Target, alpha: Direction, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientValue:
    """Closed form if available, then the decomposition, then direct quadrature."""
    if isinstance(target, CopulaModel):
        value = closed_form(target, alpha)
        if value is not None:
            return value
        return phi_dir_decompose(target, alpha, spec)
    return phi_dir_quadrature(target, alpha, spec)


def phi_by_method(target: Target, alpha: Direction, method: str, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientValue:
    """Dispatch on a method name: ``best``, ``closed``, ``quadrature``, ``decompose`` or ``semi``."""
    if method == "best":
        return best_coefficient(target, alpha, spec)
    if method == "quadrature":
        return phi_dir_quadrature(target, alpha, spec)
    if method == "decompose":
        return phi_dir_decompose(target, alpha, spec)
    if method in ("closed", "semi"):
        if not isinstance(target, CopulaModel):
            raise ValueError(f"method {method!r} needs a parametric model")
        if method == "semi":
            if target.family != cop.CLAYTON:
                raise ValueError("the 'semi' method applies to the Clayton family only")
            return phi_Clayton_semi(target.d, target.param, alpha, spec)
        value = closed_form(target, alpha)
        if value is None:
            raise ValueError(f"no closed form for the {target.family} family")
        return value
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class DirectionTable:
    rows: tuple[tuple[Direction, CoefficientValue], ...]

    @property
    def total(self) -> float:
        return math.fsum(v.value for _, v in self.rows)

    @property
    def deviation(self) -> float:
        return abs(self.total)


def direction_table(target: Target, spec: QuadratureSpec = DEFAULT_SPEC, method: str = "best") -> DirectionTable:
    """Coefficients for all ``2**d`` directions in lexicographic order.

    Models are exchangeable, so one value per ``|J|`` class is computed and
    shared across the class.
    """
    d = _check(target)
    if d > MAX_TABLE_DIM:
        raise DimensionError(f"direction tables are limited to d <= {MAX_TABLE_DIM}")
    per_class: dict[int, CoefficientValue] = {}
    rows = []
    for alpha in all_directions(d):
        if isinstance(target, CopulaModel):
            key = alpha.n_positive
            if key not in per_class:
                per_class[key] = phi_by_method(target, alpha, method, spec)
            rows.append((alpha, per_class[key]))
        else:
            rows.append((alpha, phi_by_method(target, alpha, method, spec)))
    return DirectionTable(tuple(rows))
