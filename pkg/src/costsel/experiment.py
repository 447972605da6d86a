"""Monte-Carlo study of the first forward-selection step.

Each replicate fits the intercept model and every one-feature model,
takes the best test-RMSE gain within the relevant and within the noise
group, and classifies the step by comparing ``rel_gain / theta`` with
``noise_gain`` and zero. Raw gains are stored unscaled; ``theta`` is
applied only when classifying, so one set of replicates serves every
``theta`` of a sweep.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CostselError, ReplicateError
from .model import single_feature_gains
from .simgen import SimConfig, data_key, draw_replicate

PAPER_THETAS = (1.0, 10.0, 100.0, 1000.0)
PAPER_P_REL = (1, 2, 5, 10)
PAPER_P_NOISE = (1, 10, 50)
PAPER_BETAS = tuple(round(0.01 * k, 2) for k in range(51))


class Outcome(enum.IntEnum):
    RELEVANT = 0
    NOISE = 1
    NONE = 2


@dataclass(frozen=True)
class ReplicateResult:
    delta_rel: float
    delta_noise: float  # nan when there are no noise features
    outcome: Outcome


@dataclass(frozen=True, eq=False)
class SettingSummary:
    setting: SimConfig
    setting_id: int
    counts: tuple[int, int, int]
    rel_gain_samples: np.ndarray
    noise_gain_samples: np.ndarray

    @property
    def p_relevant_selected(self) -> float:
        return self.counts[Outcome.RELEVANT] / self.setting.replicates

    @property
    def p_noise_selected(self) -> float:
        return self.counts[Outcome.NOISE] / self.setting.replicates

    @property
    def p_none_selected(self) -> float:
        return self.counts[Outcome.NONE] / self.setting.replicates

    def outcomes(self) -> np.ndarray:
        return classify(self.rel_gain_samples, self.noise_gain_samples, self.setting.theta)


@dataclass(frozen=True)
class SettingFailure:
    """Stands in for the summary of a setting whose replicate failed."""

    setting: SimConfig
    setting_id: int
    replicate_id: int
    message: str


def classify(delta_rel, delta_noise, theta: float) -> np.ndarray:
    """Outcome codes for arrays of group-best gains.

    A group is admissible only with a strictly positive raw gain. The
    relevant group wins ties, being the lower feature indices.
    """
    rel = np.asarray(delta_rel, dtype=np.float64)
    noise = np.asarray(delta_noise, dtype=np.float64)
    rel_ok = rel > 0
    noise_ok = noise > 0  # nan compares False
    with np.errstate(invalid="ignore"):
        relevant = rel_ok & (~noise_ok | (rel / theta >= noise))
    out = np.full(np.broadcast(rel, noise).shape, Outcome.NONE, dtype=np.int8)
    out[noise_ok & ~relevant] = Outcome.NOISE
    out[relevant] = Outcome.RELEVANT
    return out


def _group_gains(config: SimConfig, setting_id: int, replicate_id: int) -> tuple[float, float]:
    train, test = draw_replicate(config, setting_id, replicate_id)
    gains = single_feature_gains(train, test)
    rel = float(gains[: config.p_rel].max())
    noise = float(gains[config.p_rel :].max()) if config.p_noise else float("nan")
    return rel, noise


def run_replicate(config: SimConfig, setting_id: Optional[int] = None, replicate_id: int = 0) -> ReplicateResult:
    """Simulate and classify one replicate.

    ``setting_id`` keys the random streams and defaults to
    ``data_key(config)``, which ignores ``theta``.

    Raises:
        ReplicateError: wrapping any numerical failure.
    """
    sid = data_key(config) if setting_id is None else setting_id
    try:
        rel, noise = _group_gains(config, sid, replicate_id)
    except CostselError as exc:
        raise ReplicateError(sid, replicate_id, exc) from exc
    return ReplicateResult(rel, noise, Outcome(int(classify(rel, noise, config.theta))))


def simulate_gains(config: SimConfig, setting_id: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Group-best raw gains for all replicates, ordered by replicate id."""
    sid = data_key(config) if setting_id is None else setting_id
    rel = np.empty(config.replicates)
    noise = np.empty(config.replicates)
    for r in range(config.replicates):
        try:
            rel[r], noise[r] = _group_gains(config, sid, r)
        except CostselError as exc:
            raise ReplicateError(sid, r, exc) from exc
    rel.flags.writeable = False
    noise.flags.writeable = False
    return rel, noise


def summarize(config: SimConfig, setting_id: int, rel: np.ndarray, noise: np.ndarray) -> SettingSummary:
    outcomes = classify(rel, noise, config.theta)
    counts = np.bincount(outcomes, minlength=3)
    return SettingSummary(config, setting_id, tuple(int(c) for c in counts), rel, noise)


def run_setting(config: SimConfig, setting_id: Optional[int] = None) -> SettingSummary:
    sid = data_key(config) if setting_id is None else setting_id
    return summarize(config, sid, *simulate_gains(config, sid))


def run_grid(grid: Sequence[SimConfig], threads: int = 1) -> list[Union[SettingSummary, SettingFailure]]:
    """Run every setting, in input order.

    Settings that differ only in ``theta`` share their replicate data and
    are simulated once. Work is spread over ``threads`` threads by data
    cell; results do not depend on the thread count. A failed replicate
    turns its setting(s) into ``SettingFailure`` entries, the rest of the
    grid still runs.
    """
    if not grid:
        raise ValueError("grid is empty")
    if threads < 1:
        raise ValueError("threads must be >= 1")

    cells: dict[SimConfig, int] = {}
    for cfg in grid:
        cells.setdefault(replace(cfg, theta=1.0), data_key(cfg))

    def work(item):
        cfg, sid = item
        try:
            return simulate_gains(cfg, sid)
        except ReplicateError as exc:
            return exc

    items = list(cells.items())
    if threads == 1:
        results = [work(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, items))
    by_cell = dict(zip(cells, results))

    out: list[Union[SettingSummary, SettingFailure]] = []
    for cfg in grid:
        sid = cells[replace(cfg, theta=1.0)]
        res = by_cell[replace(cfg, theta=1.0)]
        if isinstance(res, ReplicateError):
            out.append(SettingFailure(cfg, sid, res.replicate_id, str(res)))
        else:
            out.append(summarize(cfg, sid, *res))
    return out


def paper_grid(replicates: int = 1000, master_seed: int = 0, **overrides) -> list[SimConfig]:
    """The full 4 x 4 x 3 x 51 grid of the reference study.

    Ordered with ``theta`` outermost, then ``p_rel``, ``p_noise``, ``beta``.
    """
    return [
        SimConfig(
            p_rel=p_rel,
            p_noise=p_noise,
            beta=beta,
            theta=theta,
            replicates=replicates,
            master_seed=master_seed,
            **overrides,
        )
        for theta, p_rel, p_noise, beta in itertools.product(
            PAPER_THETAS, PAPER_P_REL, PAPER_P_NOISE, PAPER_BETAS
        )
    ]
