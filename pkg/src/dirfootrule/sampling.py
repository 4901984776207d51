"""Reproducible samplers for the copula families.

Streams are numpy ``PCG64`` generators seeded through
``SeedSequence(master_seed, spawn_key=(stream_index,))``: each replication
gets its own statistically independent stream, and the same
``(master_seed, stream_index)`` always replays the same numbers.
"""

from __future__ import annotations

import numpy as np

from . import copulas as cop
from .copulas import CopulaModel
from .dataset import Dataset
from .errors import DimensionError, ParameterError


class RngStream:
    """One random stream; do not share an instance between concurrent consumers."""

    def __init__(self, master_seed: int, stream_index: int = 0):
        if not 0 <= master_seed < 2**64 or not 0 <= stream_index < 2**64:
            raise ValueError("master_seed and stream_index must be unsigned 64-bit integers")
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")


def _check_d(d: int) -> None:
    if d < 2:
        raise DimensionError(f"dimension must be >= 2, got {d}")


def sample_clayton(d: int, theta: float, n: int, rng: RngStream) -> Dataset:
    """Gamma-frailty construction: ``U_i = (1 + E_i / W)^(-1/theta)``, ``W ~ Gamma(1/theta)``."""
    _check_d(d)
    _check_n(n)
    if not theta > 0:
        raise ParameterError(f"Clayton theta must be > 0, got {theta}")
    g = rng.generator
    w = g.standard_gamma(1.0 / theta, size=n)
    e = g.standard_exponential(size=(n, d))
    return Dataset(np.power(1.0 + e / w[:, None], -1.0 / theta))


def sample_cuadras_auge(d: int, theta: float, n: int, rng: RngStream) -> Dataset:
    """``U_i = max(V_i^(1/(1-theta)), Z^(1/theta))`` with independent uniforms ``V_i``, ``Z``."""
    _check_d(d)
    _check_n(n)
    if not 0.0 <= theta <= 1.0:
        raise ParameterError(f"Cuadras-Augé theta must lie in [0, 1], got {theta}")
    g = rng.generator
    v = g.random((n, d))
    z = g.random(n)
    if theta == 0.0:
        return Dataset(v)
    if theta == 1.0:
        return Dataset(np.repeat(z[:, None], d, axis=1))
    return Dataset(np.maximum(v ** (1.0 / (1.0 - theta)), (z ** (1.0 / theta))[:, None]))


def fgm_proposals(d: int, lam: float, size: int, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``size`` uniform proposals and the FGM acceptance mask for each.

    A proposal ``u`` is kept with probability ``(1 + lam * prod(1 - 2 u_i)) / 2``,
    i.e. its FGM density over the bound 2.
    """
    g = rng.generator
    u = g.random((size, d))
    w = g.random(size)
    accept = 2.0 * w < 1.0 + lam * np.prod(1.0 - 2.0 * u, axis=1)
    return u, accept


def sample_fgm(d: int, lam: float, n: int, rng: RngStream) -> Dataset:
    _check_d(d)
    _check_n(n)
    if not -1.0 <= lam <= 1.0:
        raise ParameterError(f"FGM lambda must lie in [-1, 1], got {lam}")
    chunks = []
    have = 0
    while have < n:
        # 2 proposals per accepted row on average; a little slack saves a round trip
        u, accept = fgm_proposals(d, lam, 2 * (n - have) + 16, rng)
        kept = u[accept]
        chunks.append(kept)
        have += len(kept)
    return Dataset(np.concatenate(chunks)[:n])


def sample_reference(kind: str, d: int, n: int, rng: RngStream) -> Dataset:
    """Independence, comonotone (one uniform copied across columns) or countermonotone ``(Z, 1-Z)``."""
    _check_d(d)
    _check_n(n)
    kind = cop.normalize_family(kind)
    g = rng.generator
    if kind == cop.INDEPENDENCE:
        return Dataset(g.random((n, d)))
    if kind == cop.COMONOTONE:
        return Dataset(np.repeat(g.random(n)[:, None], d, axis=1))
    if kind == cop.COUNTERMONOTONE:
        if d != 2:
            raise DimensionError("countermonotone samples exist only for d = 2")
        z = g.random(n)
        return Dataset(np.column_stack([z, 1.0 - z]))
    raise ParameterError(f"{kind!r} is not a reference copula")


def sample_model(model: CopulaModel, n: int, rng: RngStream) -> Dataset:
    f = model.family
    if f == cop.CLAYTON:
        return sample_clayton(model.d, model.param, n, rng)
    if f == cop.CUADRAS_AUGE:
        return sample_cuadras_auge(model.d, model.param, n, rng)
    if f == cop.FGM:
        return sample_fgm(model.d, model.param, n, rng)
    if f in (cop.INDEPENDENCE, cop.COMONOTONE, cop.COUNTERMONOTONE):
        return sample_reference(f, model.d, n, rng)
    raise ParameterError(f"no sampler for family {f!r}")
