"""Benefit/cost trade-off scores and cost-vector transforms.

A criterion turns a performance gain and a feature cost into a single
score that forward selection maximizes. Scores work elementwise on
scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NonPositiveCost


@dataclass(frozen=True)
class PlainGain:
    """Ignores costs entirely."""

    def score(self, gain, cost):
        return gain


@dataclass(frozen=True)
class BenefitCostRatio:
    """``gain / cost``."""

    def score(self, gain, cost):
        return gain / cost


@dataclass(frozen=True)
class AdaptedBCR:
    """``gain / cost**gamma``.

    ``gamma`` interpolates between ignoring costs (0) and the plain
    ratio (1); values in between damp large cost differences.
    """

    gamma: float

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be a finite non-negative number, got {self.gamma}")

    def score(self, gain, cost):
        return gain / np.power(cost, float(self.gamma))


@dataclass(frozen=True)
class WeightedSum:
    """``gain - lam * cost``."""

    lam: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lambda must be a finite non-negative number, got {self.lam}")

    def score(self, gain, cost):
        return gain - self.lam * cost


TradeoffCriterion = Union[PlainGain, BenefitCostRatio, AdaptedBCR, WeightedSum]

_NAMES = {
    "plain": PlainGain,
    "bcr": BenefitCostRatio,
    "adapted-bcr": AdaptedBCR,
    "weighted-sum": WeightedSum,
}


def criterion_from_name(name: str, *, gamma: float | None = None, lam: float | None = None) -> TradeoffCriterion:
    """Build a criterion from its CLI name (``plain``, ``bcr``, ``adapted-bcr``, ``weighted-sum``)."""
    key = name.strip().lower().replace("_", "-")
    if key not in _NAMES:
        raise ValueError(f"unknown criterion {name!r}; choose from {sorted(_NAMES)}")
    if key == "adapted-bcr":
        if gamma is None:
            raise ValueError("adapted-bcr requires gamma")
        return AdaptedBCR(gamma)
    if key == "weighted-sum":
        if lam is None:
            raise ValueError("weighted-sum requires lambda")
        return WeightedSum(lam)
    return _NAMES[key]()


def _check_costs(cost) -> None:
    c = np.asarray(cost, dtype=np.float64)
    if not np.all(np.isfinite(c) & (c > 0)):
        raise NonPositiveCost(f"costs must be finite and > 0, got {cost!r}")


def score(criterion: TradeoffCriterion, gain, cost):
    """Score ``gain`` against ``cost`` under ``criterion``.

    For the ratio family the score has the sign of the gain.

    Raises:
        NonPositiveCost: if any cost is not a finite positive number.
    """
    _check_costs(cost)
    if np.ndim(gain) == 0 and np.ndim(cost) == 0:
        return float(criterion.score(float(gain), float(cost)))
    return criterion.score(np.asarray(gain, dtype=np.float64), np.asarray(cost, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class CostVector:
    """Strictly positive, finite per-feature costs (read-only)."""

    costs: np.ndarray

    def __post_init__(self):
        c = np.array(self.costs, dtype=np.float64, copy=True).reshape(-1)
        _check_costs(c)
        c.flags.writeable = False
        object.__setattr__(self, "costs", c)

    def __len__(self):
        return self.costs.shape[0]

    def __getitem__(self, idx):
        return self.costs[idx]


def epsilon_floor(costs, epsilon: float) -> CostVector:
    """Raise every cost below ``epsilon`` (including zero) to ``epsilon``."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    c = np.asarray(costs, dtype=np.float64)
    return CostVector(np.where(c < epsilon, epsilon, c))


def log_rescale(costs: CostVector | np.ndarray) -> CostVector:
    """Map each cost to ``1 + ln(c / min(c))``.

    Order is preserved and the cheapest feature gets cost exactly 1, so
    a 1000-fold cost spread shrinks to roughly 1 : 7.9. This is one
    reasonable compression among many; pick another if the domain
    suggests it.
    """
    c = costs.costs if isinstance(costs, CostVector) else np.asarray(costs, dtype=np.float64)
    _check_costs(c)
    return CostVector(1.0 + np.log(c / c.min()))
