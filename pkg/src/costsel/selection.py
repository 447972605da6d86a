"""Cost-sensitive sequential forward selection.

Every step fits the current model and each one-feature extension on the
training data and measures the test-RMSE gain of the extension. Only
candidates with a strictly positive raw gain are admissible; among them
the highest criterion score wins. For the ratio criteria this is the
same as requiring a positive score; for ``WeightedSum`` a feature with a
positive gain can still win with a negative score.

Ties are resolved deterministically: a zero gain never beats "no
selection", and equal scores go to the lowest feature index.

``sfs`` reuses one test set for every step, so gains after the first
step are optimistically biased estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .criteria import CostVector, TradeoffCriterion, score
from .errors import DimensionMismatch, EmptyCandidates
from .model import Dataset, fit_ols, rmse


@dataclass(frozen=True, eq=False)
class StepResult:
    selected: Optional[int]
    candidates: tuple[int, ...]
    scores: np.ndarray
    gains: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, StepResult):
            return NotImplemented
        return (
            self.selected == other.selected
            and self.candidates == other.candidates
            and self.scores.tobytes() == other.scores.tobytes()
            and self.gains.tobytes() == other.gains.tobytes()
        )


def admissible_argmax(indices: Sequence[int], scores, gains) -> Optional[int]:
    """Feature index with the best score among strictly positive gains.

    Returns ``None`` when no gain is positive. Score ties go to the
    smallest index regardless of input order.
    """
    best = None
    best_score = -np.inf
    for j, s, g in sorted(zip(indices, scores, gains)):
        if g > 0 and (best is None or s > best_score):
            best, best_score = j, s
    return best


def select_step(
    train: Dataset,
    test: Dataset,
    current_subset: Sequence[int],
    candidates: Sequence[int],
    costs: CostVector,
    criterion: TradeoffCriterion,
) -> StepResult:
    """One forward-selection step from ``current_subset``.

    Raises:
        EmptyCandidates: ``candidates`` is empty.
        DimensionMismatch: candidates overlap the subset or lack a cost.
    """
    current = tuple(int(j) for j in current_subset)
    cands = tuple(int(j) for j in candidates)
    if not cands:
        raise EmptyCandidates("no candidate features to choose from")
    if set(cands) & set(current):
        raise DimensionMismatch(f"candidates {sorted(set(cands) & set(current))} already selected")
    if len(set(cands)) != len(cands):
        raise DimensionMismatch("duplicate candidate indices")
    if max(cands) >= len(costs) or min(cands) < 0:
        raise DimensionMismatch(f"costs cover {len(costs)} features, candidates reach {max(cands)}")

    base_rmse = rmse(fit_ols(train, current), test)
    gains = np.array([base_rmse - rmse(fit_ols(train, current + (j,)), test) for j in cands])
    scores = np.asarray(score(criterion, gains, costs.costs[list(cands)]), dtype=np.float64)
    gains.flags.writeable = False
    scores.flags.writeable = False
    return StepResult(admissible_argmax(cands, scores, gains), cands, scores, gains)


def sfs(
    train: Dataset,
    test: Dataset,
    costs: CostVector,
    criterion: TradeoffCriterion,
    max_steps: int,
) -> list[StepResult]:
    """Greedy forward selection starting from the intercept model.

    Stops after ``max_steps`` steps or at the first step that selects
    nothing (that step is included in the trace).
    """
    if not 1 <= max_steps <= train.p:
        raise ValueError(f"max_steps must be in [1, {train.p}], got {max_steps}")
    if len(costs) != train.p:
        raise DimensionMismatch(f"{len(costs)} costs for {train.p} features")
    subset: list[int] = []
    trace = []
    for _ in range(max_steps):
        remaining = [j for j in range(train.p) if j not in subset]
        step = select_step(train, test, subset, remaining, costs, criterion)
        trace.append(step)
        if step.selected is None:
            break
        subset.append(step.selected)
    return trace


def selected_features(trace: Sequence[StepResult]) -> list[int]:
    return [step.selected for step in trace if step.selected is not None]
