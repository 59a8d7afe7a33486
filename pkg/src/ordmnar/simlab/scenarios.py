"""Scenario configuration for simulation runs.

A scenario pins everything a run depends on: sample size, replication
count, true parameters, treatment allocation, which estimators to fit,
and the seed. Two runs with equal configs produce identical results
regardless of worker count, so a config (or its JSON form) is a complete
provenance record for a results table.
"""
import json
from dataclasses import asdict, dataclass, replace
from typing import Tuple

from ..exceptions import ValidationError
from ..params import MissingnessParams, PoParams
from .generate import MISS_NAMES, OUTCOME_NAMES, TREATMENT_BERNOULLI, TREATMENT_FIXED

ESTIMATOR_WHOLE = "whole"
ESTIMATOR_CC = "cc"
ESTIMATOR_EM = "em"
ALL_ESTIMATORS = (ESTIMATOR_WHOLE, ESTIMATOR_CC, ESTIMATOR_EM)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    n: int
    theta: Tuple[float, ...]
    beta: Tuple[float, ...]
    alpha: Tuple[float, ...]
    replications: int = 1000
    base_seed: int = 20260816
    treatment: str = TREATMENT_FIXED
    estimators: Tuple[str, ...] = ALL_ESTIMATORS
    ci_level: float = 0.95

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))
        object.__setattr__(self, "beta", tuple(float(v) for v in self.beta))
        object.__setattr__(self, "alpha", tuple(float(v) for v in self.alpha))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.n < 10:
            raise ValidationError("scenario n must be at least 10")
        if self.replications < 1:
            raise ValidationError("replications must be at least 1")
        if len(self.beta) != len(OUTCOME_NAMES):
            raise ValidationError(
                f"beta must have {len(OUTCOME_NAMES)} slopes, one per outcome covariate"
            )
        if len(self.alpha) != len(MISS_NAMES) + 2:
            raise ValidationError(
                f"alpha must have {len(MISS_NAMES) + 2} entries: "
                "intercept, one slope per covariate, response slope"
            )
        if len(self.theta) < 1:
            raise ValidationError("theta needs at least one cut point")
        if any(t2 >= t1 for t1, t2 in zip(self.theta, self.theta[1:])):
            # strictly decreasing cut points <=> positive category probabilities
            raise ValidationError("theta must be strictly decreasing")
        if self.treatment not in (TREATMENT_FIXED, TREATMENT_BERNOULLI):
            raise ValidationError(f"unknown treatment allocation {self.treatment!r}")
        bad = [e for e in self.estimators if e not in ALL_ESTIMATORS]
        if bad:
            raise ValidationError(f"unknown estimators {bad}; choose from {ALL_ESTIMATORS}")
        if not self.estimators:
            raise ValidationError("at least one estimator is required")
        if not 0.0 < self.ci_level < 1.0:
            raise ValidationError("ci_level must be strictly between 0 and 1")

    @property
    def n_categories(self) -> int:
        return len(self.theta) + 1

    @property
    def po_true(self) -> PoParams:
        return PoParams(theta=self.theta, beta=self.beta)

    @property
    def miss_true(self) -> MissingnessParams:
        return MissingnessParams(alpha=self.alpha)

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema_version"] = SCHEMA_VERSION
        return d

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        version = d.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValidationError(f"unsupported scenario schema version {version}")
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown scenario fields {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(json.loads(text))
