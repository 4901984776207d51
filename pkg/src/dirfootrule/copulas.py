"""Copula models as evaluable objects.

Every evaluator here is vectorised over leading axes: a point array of shape
``(..., k)`` maps to values of shape ``(...)``. Plain 1-D points give floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import DimensionError, ParameterError

INDEPENDENCE = "independence"
COMONOTONE = "comonotone"
COUNTERMONOTONE = "countermonotone"
FGM = "fgm"
CLAYTON = "clayton"
CUADRAS_AUGE = "cuadras_auge"

FAMILIES = (INDEPENDENCE, COMONOTONE, COUNTERMONOTONE, FGM, CLAYTON, CUADRAS_AUGE)
PARAMETRIC = (FGM, CLAYTON, CUADRAS_AUGE)

_ALIASES = {
    "pi": INDEPENDENCE,
    "product": INDEPENDENCE,
    "m": COMONOTONE,
    "min": COMONOTONE,
    "w": COUNTERMONOTONE,
    "ca": CUADRAS_AUGE,
    "cuadras-auge": CUADRAS_AUGE,
    "cuadrasauge": CUADRAS_AUGE,
    "fgm": FGM,
    "clayton": CLAYTON,
}


def normalize_family(name: str) -> str:
    key = name.strip().lower()
    if key in FAMILIES:
        return key
    try:
        return _ALIASES[key]
    except KeyError:
        raise ParameterError(f"unknown copula family {name!r}; expected one of {FAMILIES}") from None


def _as_points(u, k: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 1
    if arr.ndim == 0 or arr.shape[-1] != k:
        raise DimensionError(f"expected points with {k} coordinates, got shape {arr.shape}")
    return arr, scalar


def _finish(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


@dataclass(frozen=True)
class CopulaModel:
    """A parametric copula: family tag, dimension and (optional) parameter.

    ``param`` is the FGM ``lambda`` in ``[-1, 1]``, the Clayton ``theta > 0``
    or the Cuadras-Augé ``theta`` in ``[0, 1]``; it must be ``None`` for the
    three reference copulas.
    """

    family: str
    d: int
    param: float | None = None

    def __post_init__(self) -> None:
        family = normalize_family(self.family)
        object.__setattr__(self, "family", family)
        if int(self.d) != self.d or self.d < 2:
            raise DimensionError(f"copula dimension must be an integer >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if family in PARAMETRIC:
            if self.param is None:
                raise ParameterError(f"{family} copula needs a parameter")
            p = float(self.param)
            object.__setattr__(self, "param", p)
            if family == FGM and not -1.0 <= p <= 1.0:
                raise ParameterError(f"FGM lambda must lie in [-1, 1], got {p}")
            if family == CLAYTON and not (p > 0.0 and np.isfinite(p)):
                raise ParameterError(f"Clayton theta must be > 0, got {p}")
            if family == CUADRAS_AUGE and not 0.0 <= p <= 1.0:
                raise ParameterError(f"Cuadras-Augé theta must lie in [0, 1], got {p}")
        elif self.param is not None:
            raise ParameterError(f"{family} copula takes no parameter")
        if family == COUNTERMONOTONE and self.d != 2:
            raise DimensionError("the countermonotone copula W exists only for d = 2")

    @property
    def label(self) -> str:
        if self.param is None:
            return f"{self.family}(d={self.d})"
        return f"{self.family}(d={self.d}, {self.param:g})"

    # -- evaluation -------------------------------------------------------

    def cdf(self, u):
        """Evaluate the copula at ``u`` (shape ``(..., d)``)."""
        arr, scalar = _as_points(u, self.d)
        return _finish(_family_cdf(self.family, self.param, arr), scalar)

    def marginal(self, size: int) -> "CopulaModel":
        """The copula of any ``size`` coordinates (all families are exchangeable).

        FGM marginals of size below ``d`` are independence copulas: putting a
        coordinate at 1 kills the single d-fold product term.
        """
        if not 2 <= size <= self.d:
            raise DimensionError(f"marginal size must lie in [2, {self.d}], got {size}")
        if size == self.d:
            return self
        if self.family == FGM:
            return CopulaModel(INDEPENDENCE, size)
        return CopulaModel(self.family, size, self.param)

    def diagonal(self, size: int, u):
        """Diagonal section of a size-``size`` marginal, ``C_K(u, ..., u)``.

        Size 0 is the empty marginal (identically 1) and size 1 is a uniform
        margin.
        """
        if not 0 <= size <= self.d:
            raise DimensionError(f"marginal size must lie in [0, {self.d}], got {size}")
        u = np.asarray(u, dtype=float)
        if size == 0:
            return np.ones_like(u) if u.ndim else 1.0
        if size == 1:
            return u.copy() if u.ndim else float(u)
        out = _family_diagonal(self.family, self.param, self.d, size, u)
        return out if u.ndim else float(out)

    def evaluator(self) -> "CopulaEvaluator":
        return CopulaEvaluator(
            func=self.cdf,
            dim=self.d,
            provenance="model",
            diagonal_rule=lambda subset, u: self.diagonal(len(subset), u),
        )


def _family_cdf(family: str, param: float | None, u: np.ndarray) -> np.ndarray:
    if family == INDEPENDENCE:
        return np.prod(u, axis=-1)
    if family == COMONOTONE:
        return np.min(u, axis=-1)
    if family == COUNTERMONOTONE:
        return np.maximum(u[..., 0] + u[..., 1] - 1.0, 0.0)
    if family == FGM:
        return np.prod(u, axis=-1) * (1.0 + param * np.prod(1.0 - u, axis=-1))
    if family == CLAYTON:
        return _clayton_cdf(u, param)
    if family == CUADRAS_AUGE:
        if param == 0.0:
            return np.prod(u, axis=-1)
        if param == 1.0:
            return np.min(u, axis=-1)
        return np.prod(u, axis=-1) ** (1.0 - param) * np.min(u, axis=-1) ** param
    raise ParameterError(f"unknown family {family!r}")


def _clayton_cdf(u: np.ndarray, theta: float) -> np.ndarray:
    # Factor out the smallest coordinate m:
    # C(u) = m * (sum_i (m/u_i)^theta - (d-1) m^theta)^(-1/theta), no overflow near 0.
    d = u.shape[-1]
    m = np.min(u, axis=-1)
    positive = m > 0.0
    m_safe = np.where(positive, m, 1.0)
    u_safe = np.where(positive[..., None], u, 1.0)
    ratios = (m_safe[..., None] / u_safe) ** theta
    s = ratios.sum(axis=-1) - (d - 1) * m_safe**theta
    return np.where(positive, m_safe * s ** (-1.0 / theta), 0.0)


def _family_diagonal(family: str, param: float | None, d: int, size: int, u: np.ndarray) -> np.ndarray:
    if family == INDEPENDENCE:
        return u**size
    if family == COMONOTONE:
        return u.copy()
    if family == COUNTERMONOTONE:
        return np.maximum(2.0 * u - 1.0, 0.0)
    if family == FGM:
        if size < d:
            return u**size
        return u**size * (1.0 + param * (1.0 - u) ** size)
    if family == CLAYTON:
        # (m u^-theta + 1 - m)^(-1/theta) rewritten as u (m + (1-m) u^theta)^(-1/theta)
        return u * (size + (1.0 - size) * u**param) ** (-1.0 / param)
    if family == CUADRAS_AUGE:
        if param == 0.0:
            return u**size
        if param == 1.0:
            return u.copy()
        return u ** (size - param * (size - 1))
    raise ParameterError(f"unknown family {family!r}")


DiagonalRule = Callable[[tuple, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CopulaEvaluator:
    """An immutable function-like copula of dimension ``dim``.

    ``diagonal_rule`` optionally short-cuts subset-marginal diagonals
    (exchangeable models key them by subset size); without it, marginals
    are obtained by setting the other coordinates to 1.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    provenance: str = "custom"
    diagonal_rule: DiagonalRule | None = field(default=None, compare=False)

    def __call__(self, u):
        arr, scalar = _as_points(u, self.dim)
        return _finish(np.asarray(self.func(arr), dtype=float), scalar)

    def marginal_diagonal(self, subset: Iterable[int], u):
        subset = tuple(sorted(set(int(i) for i in subset)))
        if any(i < 0 or i >= self.dim for i in subset):
            raise DimensionError(f"subset {subset} out of range for dimension {self.dim}")
        u = np.asarray(u, dtype=float)
        if not subset:
            return np.ones_like(u) if u.ndim else 1.0
        if len(subset) == 1:
            return u.copy() if u.ndim else float(u)
        if self.diagonal_rule is not None:
            return self.diagonal_rule(subset, u)
        pts = np.ones(u.shape + (self.dim,))
        pts[..., list(subset)] = u[..., None]
        out = np.asarray(self.func(pts), dtype=float)
        return out if u.ndim else float(out)

    def restrict(self, subset: Sequence[int]) -> "CopulaEvaluator":
        """The marginal copula of the coordinates in ``subset`` (in that order)."""
        subset = tuple(int(i) for i in subset)
        if len(subset) < 1 or len(set(subset)) != len(subset):
            raise DimensionError(f"invalid subset {subset}")
        base = self

        def func(v: np.ndarray) -> np.ndarray:
            pts = np.ones(v.shape[:-1] + (base.dim,))
            pts[..., list(subset)] = v
            return base.func(pts)

        rule = None
        if self.diagonal_rule is not None:
            rule = lambda sub, u: base.diagonal_rule(tuple(subset[i] for i in sub), u)  # noqa: E731
        return CopulaEvaluator(func, len(subset), self.provenance, rule)


Target = Union[CopulaModel, CopulaEvaluator]


def as_evaluator(target: Target) -> CopulaEvaluator:
    if isinstance(target, CopulaModel):
        return target.evaluator()
    if isinstance(target, CopulaEvaluator):
        return target
    raise TypeError(f"expected CopulaModel or CopulaEvaluator, got {type(target).__name__}")


def dimension_of(target: Target) -> int:
    return target.d if isinstance(target, CopulaModel) else target.dim


# -- module-level operations ----------------------------------------------


def cdf(model: CopulaModel, u):
    return model.cdf(u)


def marginal_diagonal(target: Target, subset: Iterable[int], u):
    """``C_K(u, ..., u)`` for a 0-based index set ``K`` (empty set gives 1)."""
    subset = tuple(subset)
    if isinstance(target, CopulaModel):
        k = len(set(subset))
        if any(i < 0 or i >= target.d for i in subset):
            raise DimensionError(f"subset {subset} out of range for dimension {target.d}")
        return target.diagonal(k, u)
    return as_evaluator(target).marginal_diagonal(subset, u)


def reflect(target: Target, flip: Iterable[int]) -> CopulaEvaluator:
    """Copula of the vector whose coordinates in ``flip`` are replaced by ``1 - U_i``.

    Evaluated by inclusion-exclusion over the marginals containing the kept
    coordinates, so each call costs ``2**len(flip)`` base evaluations.
    """
    base = as_evaluator(target)
    flip = tuple(sorted(set(int(i) for i in flip)))
    if any(i < 0 or i >= base.dim for i in flip):
        raise DimensionError(f"flip set {flip} out of range for dimension {base.dim}")
    keep = [i for i in range(base.dim) if i not in flip]
    terms = []
    for r in range(len(flip) + 1):
        for sub in itertools.combinations(flip, r):
            terms.append(((-1) ** r, list(sub)))

    def func(u: np.ndarray) -> np.ndarray:
        total = np.zeros(u.shape[:-1])
        for sign, sub in terms:
            v = np.ones_like(u)
            v[..., keep] = u[..., keep]
            if sub:
                v[..., sub] = 1.0 - u[..., sub]
            total = total + sign * np.asarray(base.func(v), dtype=float)
        return total

    if not flip:
        return CopulaEvaluator(base.func, base.dim, base.provenance, base.diagonal_rule)
    return CopulaEvaluator(func, base.dim, "reflected")


def survival_evaluator(target: Target) -> CopulaEvaluator:
    """The survival copula ``C^(u) = P[U > 1 - u]`` as an evaluator."""
    ev = reflect(target, range(dimension_of(target)))
    return CopulaEvaluator(ev.func, ev.dim, "survival")


def survival_cdf(target: Target, u):
    return survival_evaluator(target)(u)


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        lo = tuple(float(x) for x in self.lower)
        hi = tuple(float(x) for x in self.upper)
        if len(lo) != len(hi):
            raise DimensionError("box corners have different dimensions")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"box lower corner {lo} exceeds upper corner {hi}")
        if any(not 0.0 <= x <= 1.0 for x in lo + hi):
            raise ValueError("box corners must lie in [0, 1]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)


def c_volume(target: Target, box: Box) -> float:
    """Signed vertex sum of ``C`` over ``box``: the mass it assigns to the box."""
    ev = as_evaluator(target)
    k = len(box.lower)
    if k != ev.dim:
        raise DimensionError(f"box has {k} coordinates, copula has {ev.dim}")
    bits = np.array(list(itertools.product((0, 1), repeat=k)), dtype=bool)
    vertices = np.where(bits, np.asarray(box.upper), np.asarray(box.lower))
    n_lower = k - bits.sum(axis=1)
    signs = np.where(n_lower % 2 == 0, 1.0, -1.0)
    return float(np.sum(signs * ev(vertices)))


@dataclass(frozen=True)
class Violation:
    kind: str  # "grounded" | "margin" | "volume" | "range"
    location: tuple[float, ...]
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]
    worst: float
    checked_points: int
    checked_cells: int
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_copula(target: Target, grid_resolution: int, tol: float = 1e-9) -> ValidationReport:
    """Check the copula axioms on a uniform grid with ``grid_resolution`` cells per axis.

    Returns every violation above ``tol``; never raises for a bad copula.
    """
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    ev = as_evaluator(target)
    k = ev.dim
    g = np.linspace(0.0, 1.0, grid_resolution + 1)
    mesh = np.stack(np.meshgrid(*([g] * k), indexing="ij"), axis=-1)
    vals = np.asarray(ev(mesh.reshape(-1, k)), dtype=float).reshape(mesh.shape[:-1])

    found: list[Violation] = []
    worst = 0.0

    def note(kind: str, mask: np.ndarray, magnitude: np.ndarray, loc_of) -> None:
        nonlocal worst
        for idx in zip(*np.nonzero(mask)):
            mag = float(magnitude[idx])
            worst = max(worst, mag)
            found.append(Violation(kind, loc_of(idx), mag))

    point_loc = lambda idx: tuple(float(g[i]) for i in idx)  # noqa: E731

    grounded = np.zeros(vals.shape, dtype=bool)
    for axis in range(k):
        sl = [slice(None)] * k
        sl[axis] = 0
        grounded[tuple(sl)] = True
    err = np.where(grounded, np.abs(vals), 0.0)
    note("grounded", err > tol, err, point_loc)

    margin_err = np.zeros(vals.shape)
    for axis in range(k):
        sl = [-1] * k
        sl[axis] = slice(None)
        margin_err[tuple(sl)] = np.maximum(margin_err[tuple(sl)], np.abs(vals[tuple(sl)] - g))
    note("margin", margin_err > tol, margin_err, point_loc)

    range_err = np.maximum(-vals, vals - 1.0)
    note("range", range_err > tol, range_err, point_loc)

    vol = vals
    for axis in range(k):
        vol = np.diff(vol, axis=axis)
    neg = -vol
    cell_loc = lambda idx: tuple(float(g[i]) for i in idx)  # noqa: E731  (lower corner)
    note("volume", neg > tol, neg, cell_loc)

    return ValidationReport(tuple(found), worst, int(vals.size), int(vol.size), tol)
