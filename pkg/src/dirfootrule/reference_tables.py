"""Printed values of the published simulation tables, kept as reference constants.

Keys are ``(theta, alpha)`` for exact values and ``(theta, alpha, n)`` for
estimator means; ``alpha`` uses the ``+``/``-`` sign-string form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .direction import all_directions

THETAS_CLAYTON = (0.4, 0.6, 1.0, 2.0, 5.0)
SAMPLE_SIZES = (20, 50, 100, 500)


@dataclass(frozen=True)
class TableSpec:
    table_id: str
    family: str
    d: int
    thetas: tuple[float, ...]
    directions: tuple[str, ...]
    sample_sizes: tuple[int, ...]
    caption: str
    printed_exact: dict = field(default_factory=dict)
    printed_means: dict = field(default_factory=dict)


def _grid(thetas, alpha, exact, means) -> tuple[dict, dict]:
    ex = {(t, alpha): v for t, v in zip(thetas, exact)}
    mn = {}
    for t, row in zip(thetas, means):
        for n, v in zip(SAMPLE_SIZES, row):
            mn[(t, alpha, n)] = v
    return ex, mn


_T1_ROWS = {
    "---": (0.68975, 0.68924),
    "-++": (-0.24935, -0.24848),
    "+-+": (-0.24935, -0.24889),
    "++-": (-0.24935, -0.24874),
    "+--": (-0.22020, -0.22004),
    "--+": (-0.22020, -0.22030),
    "-+-": (-0.22020, -0.22045),
    "+++": (0.71890, 0.71768),
}

T1 = TableSpec(
    table_id="T1",
    family="clayton",
    d=3,
    thetas=(5.0,),
    directions=tuple(str(a) for a in all_directions(3)),
    sample_sizes=(500,),
    caption="Clayton 3-copula, theta = 5, all directions, n = 500",
    printed_exact={(5.0, a): v[0] for a, v in _T1_ROWS.items()},
    printed_means={(5.0, a, 500): v[1] for a, v in _T1_ROWS.items()},
)

_T3_EXACT = (-0.02042, -0.02829, -0.04053, -0.05946, -0.08234)
_T3_MEANS = (
    (-0.02660, -0.02147, -0.02198, -0.02036),
    (-0.03366, -0.02891, -0.02960, -0.02816),
    (-0.04402, -0.04090, -0.04141, -0.04029),
    (-0.06104, -0.05920, -0.06000, -0.05915),
    (-0.08166, -0.08144, -0.08218, -0.08213),
)
_t3_ex, _t3_mn = _grid(THETAS_CLAYTON, "-++-", _T3_EXACT, _T3_MEANS)
T3 = TableSpec(
    table_id="T3",
    family="clayton",
    d=4,
    thetas=THETAS_CLAYTON,
    directions=("-++-",),
    sample_sizes=SAMPLE_SIZES,
    caption="Clayton 4-copula, direction (-1,1,1,-1)",
    printed_exact=_t3_ex,
    printed_means=_t3_mn,
)

_T4_EXACT = (-0.01105, -0.01483, -0.02042, -0.02864, -0.03821)
_T4_MEANS = (
    (-0.01144, -0.01246, -0.01064, -0.01125),
    (-0.01607, -0.01475, -0.01491, -0.01475),
    (-0.02135, -0.02085, -0.02135, -0.02055),
    (-0.02897, -0.02892, -0.02863, -0.02865),
    (-0.03756, -0.03789, -0.03749, -0.03817),
)
_t4_ex, _t4_mn = _grid(THETAS_CLAYTON, "+-+-+", _T4_EXACT, _T4_MEANS)
T4 = TableSpec(
    table_id="T4",
    family="clayton",
    d=5,
    thetas=THETAS_CLAYTON,
    directions=("+-+-+",),
    sample_sizes=SAMPLE_SIZES,
    caption="Clayton 5-copula, direction (1,-1,1,-1,1)",
    printed_exact=_t4_ex,
    printed_means=_t4_mn,
)

# Only n = 500 means are printed for this table.
_T6_MEANS = {
    0.4: {
        "----": 0.38348, "+---": -0.06336, "-+--": -0.063197, "++--": -0.04292,
        "--+-": -0.06376, "+-+-": -0.04352, "-++-": -0.04279, "+++-": -0.06392,
        "---+": -0.06372, "+--+": -0.04319, "-+-+": -0.04314, "++-+": -0.06395,
        "--++": -0.04230, "+-++": -0.06362, "-+++": -0.06458, "++++": 0.38450,
    },
    0.8: {
        "----": 0.77980, "+---": -0.12969, "-+--": -0.12967, "++--": -0.08708,
        "--+-": -0.12984, "+-+-": -0.08672, "-++-": -0.08692, "+++-": -0.12987,
        "---+": -0.12956, "+--+": -0.08715, "-+-+": -0.08731, "++-+": -0.12933,
        "--++": -0.08718, "+-++": -0.12965, "-+++": -0.12932, "++++": 0.77950,
    },
}  # fmt: skip
T6 = TableSpec(
    table_id="T6",
    family="cuadras_auge",
    d=4,
    thetas=(0.4, 0.8),
    directions=tuple(str(a) for a in all_directions(4)),
    sample_sizes=SAMPLE_SIZES,
    caption="Cuadras-Augé 4-copula, theta in {0.4, 0.8}, all directions",
    printed_means={(t, a, 500): v for t, rows in _T6_MEANS.items() for a, v in rows.items()},
)

TABLES = {t.table_id: t for t in (T1, T3, T4, T6)}
