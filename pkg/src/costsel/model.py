"""Least-squares linear models and test-set RMSE.

Feature indices are 0-based column positions throughout the package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, SingularDesign

#: Cholesky pivots (squared) below this fraction of the largest Gram
#: diagonal entry are treated as singular.
PIVOT_TOL = 1e-12


class Role(str, enum.Enum):
    TRAIN = "train"
    TEST = "test"


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``n x p`` feature matrix with its response vector.

    Arrays are copied on construction and made read-only.
    """

    features: np.ndarray
    response: np.ndarray
    role: Role = Role.TRAIN

    def __post_init__(self):
        X = self.features
        if isinstance(X, np.ndarray) and X.ndim == 1 and X.size == 0:
            X = X.reshape(len(self.response), 0)
        X = _frozen(X, 2, "features")
        y = _frozen(self.response, 1, "response")
        if X.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"features have {X.shape[0]} rows but response has {y.shape[0]} entries"
            )
        if y.shape[0] < 2:
            raise DimensionMismatch("a dataset needs at least 2 observations")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset entries must be finite")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "response", y)
        object.__setattr__(self, "role", Role(self.role))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class FittedLinearModel:
    """``y = intercept + sum_j coefficients[k] * x[subset[k]]``."""

    subset: tuple[int, ...]
    intercept: float
    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "subset", tuple(int(j) for j in self.subset))
        coef = _frozen(self.coefficients, 1, "coefficients")
        if coef.shape[0] != len(self.subset):
            raise DimensionMismatch("coefficients must align with subset")
        if len(set(self.subset)) != len(self.subset):
            raise DimensionMismatch(f"duplicate feature indices in subset {self.subset}")
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "intercept", float(self.intercept))


def _check_subset(subset: Sequence[int], p: int) -> tuple[int, ...]:
    s = tuple(int(j) for j in subset)
    if len(set(s)) != len(s):
        raise DimensionMismatch(f"duplicate feature indices in subset {s}")
    bad = [j for j in s if not 0 <= j < p]
    if bad:
        raise DimensionMismatch(f"feature indices {bad} out of range for p={p}")
    return s


def cholesky_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``gram @ x = rhs`` for symmetric positive definite ``gram``.

    Raises:
        SingularDesign: if a squared pivot falls below ``PIVOT_TOL`` times
            the largest diagonal entry, or the factorization breaks down.
    """
    scale = float(np.max(np.diag(gram)))
    if not scale > 0:
        raise SingularDesign("Gram matrix has no positive diagonal entry")
    try:
        L = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise SingularDesign(f"Cholesky factorization failed: {exc}") from None
    pivots = np.diag(L) ** 2
    if np.min(pivots) < PIVOT_TOL * scale:
        raise SingularDesign(
            f"smallest pivot {np.min(pivots):.3e} below {PIVOT_TOL:g} x {scale:.3e}"
        )
    z = solve_triangular(L, rhs, lower=True)
    return solve_triangular(L.T, z, lower=False)


def _fit_normal_equations(X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    design = np.column_stack([np.ones(X.shape[0]), X])
    beta = cholesky_solve(design.T @ design, design.T @ y)
    return float(beta[0]), beta[1:]


def _fit_closed_form(X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    # intercept-only or simple regression
    y_mean = y.mean()
    if X.shape[1] == 0:
        return float(y_mean), np.zeros(0)
    x = X[:, 0]
    x_mean = x.mean()
    xc = x - x_mean
    sxx = xc @ xc
    # second Cholesky pivot of [1, x]'[1, x] equals sxx
    if sxx < PIVOT_TOL * max(float(x.shape[0]), float(x @ x)):
        raise SingularDesign("feature column is (numerically) constant")
    slope = (xc @ (y - y_mean)) / sxx
    return float(y_mean - slope * x_mean), np.array([slope])


def fit_ols(train: Dataset, subset: Sequence[int] = (), *, method: str = "auto") -> FittedLinearModel:
    """Fit ``y = b0 + X[:, subset] @ b`` by ordinary least squares.

    Args:
        train: training data.
        subset: feature indices to include, in order. Empty gives the
            intercept model, whose intercept is the training mean.
        method: ``"auto"`` uses the closed-form simple-regression formulas
            for at most one feature and the normal equations otherwise;
            ``"closed"`` and ``"normal"`` force one path.

    Raises:
        DimensionMismatch: invalid or duplicate indices.
        SingularDesign: the design Gram matrix is not positive definite.
    """
    s = _check_subset(subset, train.p)
    X = train.features[:, list(s)]
    if method == "auto":
        method = "closed" if len(s) <= 1 else "normal"
    if method == "closed":
        if len(s) > 1:
            raise ValueError("closed-form fit supports at most one feature")
        b0, b = _fit_closed_form(X, train.response)
    elif method == "normal":
        b0, b = _fit_normal_equations(X, train.response)
    else:
        raise ValueError(f"unknown method {method!r}")
    return FittedLinearModel(s, b0, b)


def predict(model: FittedLinearModel, data: Dataset) -> np.ndarray:
    if model.subset and max(model.subset) >= data.p:
        raise DimensionMismatch(
            f"model uses feature {max(model.subset)} but data has {data.p} columns"
        )
    X = data.features[:, list(model.subset)]
    return model.intercept + X @ model.coefficients


def rmse(model: FittedLinearModel, test: Dataset) -> float:
    """Root of the mean squared prediction error on ``test``."""
    resid = test.response - predict(model, test)
    return float(np.sqrt(np.mean(resid * resid)))


def delta_rmse(baseline: FittedLinearModel, candidate: FittedLinearModel, test: Dataset) -> float:
    """Test RMSE of ``baseline`` minus that of ``candidate``.

    Positive values mean the candidate predicts better.
    """
    return rmse(baseline, test) - rmse(candidate, test)


def training_sse(model: FittedLinearModel, train: Dataset) -> float:
    resid = train.response - predict(model, train)
    return float(resid @ resid)


def single_feature_gains(train: Dataset, test: Dataset) -> np.ndarray:
    """Test-RMSE gain of every one-feature model over the intercept model.

    Vectorized over all columns with the closed-form simple-regression
    fit; entry ``j`` equals ``delta_rmse(fit_ols(train), fit_ols(train, [j]), test)``.

    Raises:
        SingularDesign: if any training column is numerically constant.
    """
    if train.p != test.p:
        raise DimensionMismatch(f"train has {train.p} features, test has {test.p}")
    X, y = train.features, train.response
    y_mean = y.mean()
    x_mean = X.mean(axis=0)
    Xc = X - x_mean
    sxx = np.einsum("ij,ij->j", Xc, Xc)
    limit = PIVOT_TOL * np.maximum(float(X.shape[0]), np.einsum("ij,ij->j", X, X))
    if np.any(sxx < limit):
        bad = np.flatnonzero(sxx < limit).tolist()
        raise SingularDesign(f"feature columns {bad} are (numerically) constant")
    slope = (Xc.T @ (y - y_mean)) / sxx
    intercept = y_mean - slope * x_mean

    yt = test.response
    r0 = yt - y_mean
    rmse0 = np.sqrt(np.mean(r0 * r0))
    resid = yt[:, None] - intercept - test.features * slope
    rmse_j = np.sqrt(np.mean(resid * resid, axis=0))
    return rmse0 - rmse_j
