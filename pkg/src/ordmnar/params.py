"""Parameter containers for the outcome and missingness models.

The outcome model is a descending cumulative logit: logit P(Y > j) =
theta_j + x'beta for j = 1..J-1, which requires theta strictly decreasing
for all category probabilities to be positive. Containers are permissive at
construction (shape and finiteness only); feasibility is enforced where
probabilities are evaluated, so optimizer trial points can be represented.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError


def _as_readonly_vector(v, name: str, allow_nan: bool = False) -> np.ndarray:
    arr = np.array(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    finite = np.isfinite(arr) | (np.isnan(arr) if allow_nan else False)
    if not np.all(finite):
        raise ValidationError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PoParams:
    """Cut points and slopes of the cumulative-logit outcome model."""

    theta: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _as_readonly_vector(self.theta, "theta"))
        object.__setattr__(self, "beta", _as_readonly_vector(self.beta, "beta"))
        if self.theta.shape[0] < 1:
            raise ValidationError("theta needs at least one cut point (J >= 2)")

    @property
    def n_categories(self) -> int:
        return self.theta.shape[0] + 1

    @property
    def n_covariates(self) -> int:
        return self.beta.shape[0]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.theta, self.beta])

    @classmethod
    def from_vector(cls, vec, n_categories: int) -> "PoParams":
        vec = np.asarray(vec, dtype=np.float64)
        k = n_categories - 1
        return cls(theta=vec[:k], beta=vec[k:])

    def to_ascending(self) -> tuple[np.ndarray, np.ndarray]:
        """Equivalent ascending-convention parameters.

        The same model written as logit P(Y' <= j) = theta'_j + x'beta' for
        the relabeled response Y' = J+1-Y has theta'_j = -theta_{J-j} (order
        reversed, sign flipped) and beta' = -beta.
        """
        return -self.theta[::-1].copy(), -self.beta.copy()

    @classmethod
    def from_ascending(cls, theta_asc, beta_asc) -> "PoParams":
        theta_asc = np.asarray(theta_asc, dtype=np.float64)
        beta_asc = np.asarray(beta_asc, dtype=np.float64)
        return cls(theta=-theta_asc[::-1], beta=-beta_asc)


@dataclass(frozen=True)
class MissingnessParams:
    """Logistic selection model for the missingness indicator.

    P(R = 1 | x_miss, y) = sigmoid(alpha' (1, x_miss, y)), so ``alpha`` has
    length q+2 for q missingness covariates: intercept, covariate slopes,
    response slope. A zero response slope is the ignorable (MAR) special
    case. An all-NaN alpha is allowed and marks a fit that was degenerate
    (e.g. a dataset with no missing responses).
    """

    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_readonly_vector(self.alpha, "alpha", allow_nan=True))
        if self.alpha.shape[0] < 2:
            raise ValidationError("alpha needs at least an intercept and a response slope")

    @property
    def n_covariates(self) -> int:
        return self.alpha.shape[0] - 2

    @property
    def intercept(self) -> float:
        return float(self.alpha[0])

    @property
    def y_slope(self) -> float:
        return float(self.alpha[-1])

    @property
    def is_mar(self) -> bool:
        return self.y_slope == 0.0

    @property
    def is_mcar(self) -> bool:
        return bool(np.all(self.alpha[1:] == 0.0))


@dataclass(frozen=True)
class GammaParams:
    """Joint parameter (theta, beta, alpha) of the two-part model."""

    po: PoParams
    miss: MissingnessParams

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.po.theta, self.po.beta, self.miss.alpha])

    @classmethod
    def from_vector(cls, vec, n_categories: int, n_covariates: int) -> "GammaParams":
        vec = np.asarray(vec, dtype=np.float64)
        k = n_categories - 1 + n_covariates
        return cls(
            po=PoParams.from_vector(vec[:k], n_categories),
            miss=MissingnessParams(alpha=vec[k:]),
        )

    @property
    def n_params(self) -> int:
        return self.po.theta.shape[0] + self.po.beta.shape[0] + self.miss.alpha.shape[0]


def sum_abs_change(a: GammaParams, b: GammaParams) -> float:
    """Sum of absolute differences across the stacked parameter vector."""
    return float(np.sum(np.abs(a.as_vector() - b.as_vector())))
