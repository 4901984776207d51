"""Sign vectors selecting the orientation of each coordinate."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DimensionError


@dataclass(frozen=True)
class Direction:
    """A vector of ``-1``/``+1`` signs.

    Coordinates with sign ``-1`` form the index set ``negatives`` (looked at
    from below, ``U_i < u``); coordinates with sign ``+1`` form ``positives``
    (looked at from above, ``U_i > u``). Indices are 0-based.
    """

    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        signs = tuple(int(s) for s in self.signs)
        if len(signs) < 2:
            raise DimensionError(f"direction needs at least 2 entries, got {len(signs)}")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError(f"direction entries must be -1 or +1, got {self.signs!r}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text: str) -> "Direction":
        """Build a direction from a ``+``/``-`` string such as ``"-++-"``."""
        text = text.strip()
        if not text or any(c not in "+-" for c in text):
            raise ValueError(f"direction string must consist of '+' and '-', got {text!r}")
        return cls(tuple(1 if c == "+" else -1 for c in text))

    @classmethod
    def ones(cls, d: int) -> "Direction":
        return cls((1,) * d)

    @classmethod
    def minus_ones(cls, d: int) -> "Direction":
        return cls((-1,) * d)

    @classmethod
    def with_counts(cls, n_negative: int, n_positive: int) -> "Direction":
        """Representative direction with the negatives first."""
        return cls((-1,) * n_negative + (1,) * n_positive)

    @property
    def d(self) -> int:
        return len(self.signs)

    @property
    def negatives(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.signs) if s < 0)

    @property
    def positives(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.signs) if s > 0)

    @property
    def n_negative(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def n_positive(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def is_extreme(self) -> bool:
        return self.n_negative in (0, self.d)

    def __neg__(self) -> "Direction":
        return Direction(tuple(-s for s in self.signs))

    def permuted(self, order: Sequence[int]) -> "Direction":
        return Direction(tuple(self.signs[i] for i in order))

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


def all_directions(d: int) -> Iterator[Direction]:
    """All ``2**d`` directions in lexicographic order (``-1`` before ``+1``)."""
    if d < 2:
        raise DimensionError(f"dimension must be >= 2, got {d}")
    for signs in itertools.product((-1, 1), repeat=d):
        yield Direction(signs)


def parse_directions(text: str, d: int) -> list[Direction]:
    """Parse ``all`` or a comma-separated list of sign strings."""
    text = text.strip()
    if text == "all":
        return list(all_directions(d))
    out = [Direction.parse(part) for part in text.split(",") if part.strip()]
    for alpha in out:
        if alpha.d != d:
            raise DimensionError(f"direction {alpha} has {alpha.d} entries, expected {d}")
    if not out:
        raise ValueError("no direction given")
    return out
