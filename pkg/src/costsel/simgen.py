"""Seeded synthetic regression data.

Features are i.i.d. standard normal. The first ``p_rel`` columns are
relevant with common coefficient ``beta``; the response is
``beta0 + beta * sum(relevant columns) + sqrt(sigma2) * noise``.

Randomness is organised in independent streams. A stream is identified
by ``(master_seed, setting_id, replicate_id, role)`` and seeds a PCG64
generator through ``numpy.random.SeedSequence`` with that tuple as the
spawn key, so any replicate can be regenerated alone, in any order, on
any thread. Normal variates come from the Box-Muller transform applied
to the stream's uniform doubles (not numpy's ziggurat sampler), which
fixes the mapping from stream to data.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .criteria import CostVector
from .model import Dataset, Role

_ROLE_CODE = {Role.TRAIN: 0, Role.TEST: 1}


@dataclass(frozen=True)
class SimConfig:
    """One cell of the simulation grid.

    Defaults follow the reference study: 100 training and 1000 test
    observations, intercept 1, unit residual variance, 1000 replicates.
    """

    p_rel: int
    p_noise: int
    beta: float
    theta: float = 1.0
    n_train: int = 100
    n_test: int = 1000
    beta0: float = 1.0
    sigma2: float = 1.0
    replicates: int = 1000
    master_seed: int = 0

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("invalid SimConfig: " + "; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        for name in ("p_rel", "n_train", "n_test", "replicates"):
            if not (isinstance(getattr(self, name), (int, np.integer)) and getattr(self, name) >= 1):
                out.append(f"{name} must be a positive integer, got {getattr(self, name)!r}")
        if not (isinstance(self.p_noise, (int, np.integer)) and self.p_noise >= 0):
            out.append(f"p_noise must be a non-negative integer, got {self.p_noise!r}")
        if not (np.isfinite(self.beta) and self.beta >= 0):
            out.append(f"beta must be finite and >= 0, got {self.beta!r}")
        if not (np.isfinite(self.theta) and self.theta > 0):
            out.append(f"theta must be finite and > 0, got {self.theta!r}")
        if not np.isfinite(self.beta0):
            out.append(f"beta0 must be finite, got {self.beta0!r}")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            out.append(f"sigma2 must be finite and > 0, got {self.sigma2!r}")
        for name in ("n_train", "n_test"):
            if isinstance(getattr(self, name), (int, np.integer)) and getattr(self, name) == 1:
                out.append(f"{name} must be at least 2")
        if not (isinstance(self.master_seed, (int, np.integer)) and 0 <= self.master_seed < 2**64):
            out.append(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")
        return out

    @property
    def p(self) -> int:
        return self.p_rel + self.p_noise


def data_key(config: SimConfig) -> int:
    """Stable 63-bit id of everything that shapes the data except the seed and ``theta``.

    Settings differing only in ``theta`` share a key and hence identical
    replicate datasets ("matched seeds").
    """
    text = "|".join(
        repr(v)
        for v in (
            int(config.p_rel),
            int(config.p_noise),
            float(config.beta),
            int(config.n_train),
            int(config.n_test),
            float(config.beta0),
            float(config.sigma2),
        )
    )
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    setting_id: int
    replicate_id: int
    role: Role

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            int(self.master_seed),
            spawn_key=(int(self.setting_id), int(self.replicate_id), _ROLE_CODE[Role(self.role)]),
        )
        return np.random.Generator(np.random.PCG64(seq))


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` standard normal draws via the Box-Muller transform."""
    m = (size + 1) // 2
    u = rng.random(2 * m)
    radius = np.sqrt(-2.0 * np.log1p(-u[:m]))  # 1 - u lies in (0, 1]
    angle = 2.0 * np.pi * u[m:]
    z = np.empty(2 * m)
    z[:m] = radius * np.cos(angle)
    z[m:] = radius * np.sin(angle)
    return z[:size]


def draw_dataset(config: SimConfig, stream: RngStream, n: int) -> Dataset:
    """Draw ``n`` observations from ``stream``.

    Row-major feature draws come first, then the residual noise.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    rng = stream.generator()
    p = config.p
    X = standard_normals(rng, n * p).reshape(n, p)
    eps = standard_normals(rng, n)
    y = config.beta0 + config.beta * X[:, : config.p_rel].sum(axis=1) + np.sqrt(config.sigma2) * eps
    return Dataset(X, y, Role(stream.role))


def draw_replicate(config: SimConfig, setting_id: int, replicate_id: int) -> tuple[Dataset, Dataset]:
    """Fresh ``(train, test)`` pair for one replicate."""
    train = draw_dataset(
        config, RngStream(config.master_seed, setting_id, replicate_id, Role.TRAIN), config.n_train
    )
    test = draw_dataset(
        config, RngStream(config.master_seed, setting_id, replicate_id, Role.TEST), config.n_test
    )
    return train, test


def relevant_cost_vector(config: SimConfig) -> CostVector:
    """Cost ``theta`` for each relevant feature, 1 for each noise feature."""
    if not config.theta > 0:
        raise ValueError("theta must be > 0")
    return CostVector(np.concatenate([np.full(config.p_rel, float(config.theta)), np.ones(config.p_noise)]))
