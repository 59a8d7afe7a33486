"""Summary metrics over a scenario's replicates.

Conventions frozen here so every table in the package agrees:

* bias is mean(estimate) - truth; the reported column is its absolute value
* sd uses the population divisor (ddof=0)
* mse = bias^2 + sd^2, algebraically equal to mean squared error about the
  truth under that divisor
* cp is the share of replicate confidence intervals covering the truth
* relative bias is bias/truth, undefined when the truth is 0

Each estimator's metrics use only the replicates where that estimator
succeeded; failures are counted separately and never imputed. An
estimator with no successful replicates still gets its rows (so the CSV
shape is fixed by the config alone) with every summary cell NaN.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .generate import MISS_NAMES, OUTCOME_NAMES
from .runner import ScenarioResult
from .scenarios import ESTIMATOR_EM, ScenarioConfig

CSV_COLUMNS = (
    "scenario", "n", "estimator", "parameter", "truth", "n_used", "n_failed",
    "mean", "abs_bias", "sd", "mean_se", "mse", "cp", "rel_bias",
)

# Parameters of the missingness model are prefixed so the CSV writers can
# route them to their own file; the main metrics CSV holds one row per
# outcome parameter per estimator.
MISSPARAM_PREFIX = "m_"


def param_names(config: ScenarioConfig, estimator: str) -> Tuple[str, ...]:
    """Row labels for one estimator's parameter vector, in vector order."""
    names = [f"cut{j}" for j in range(1, config.n_categories)]
    names.extend(OUTCOME_NAMES)
    if estimator == ESTIMATOR_EM:
        names.append("m_const")
        names.extend(f"m_{c}" for c in MISS_NAMES)
        names.append("m_y")
    return tuple(names)


def truth_vector(config: ScenarioConfig, estimator: str) -> np.ndarray:
    out = config.po_true.as_vector()
    if estimator == ESTIMATOR_EM:
        return np.concatenate([out, config.miss_true.alpha])
    return out


@dataclass(frozen=True)
class MetricsRow:
    estimator: str
    parameter: str
    truth: float
    n_used: int
    n_failed: int
    mean: float
    abs_bias: float
    sd: float
    mean_se: float
    mse: float
    cp: float
    rel_bias: float  # nan when the truth is 0

    @property
    def rel_bias_defined(self) -> bool:
        return self.truth != 0.0

    @property
    def bias(self) -> float:
        return self.mean - self.truth


@dataclass(frozen=True)
class MetricsTable:
    scenario: str
    n: int
    replications: int
    missing_fraction: float  # realized, averaged over all replicates
    rows: Tuple[MetricsRow, ...]
    failure_counts: Dict[str, Dict[str, int]]

    def row(self, estimator: str, parameter: str) -> MetricsRow:
        for r in self.rows:
            if r.estimator == estimator and r.parameter == parameter:
                return r
        raise KeyError(f"no row for ({estimator!r}, {parameter!r})")

    def rows_for(self, estimator: str) -> Tuple[MetricsRow, ...]:
        return tuple(r for r in self.rows if r.estimator == estimator)

    @property
    def outcome_rows(self) -> Tuple[MetricsRow, ...]:
        return tuple(r for r in self.rows
                     if not r.parameter.startswith(MISSPARAM_PREFIX))

    @property
    def missparam_rows(self) -> Tuple[MetricsRow, ...]:
        return tuple(r for r in self.rows
                     if r.parameter.startswith(MISSPARAM_PREFIX))


def summarize(result: ScenarioResult) -> MetricsTable:
    """Collapse a scenario's replicates into one metrics table."""
    cfg = result.config
    rows = []
    failure_counts: Dict[str, Dict[str, int]] = {}
    for est in cfg.estimators:
        truth = truth_vector(cfg, est)
        names = param_names(cfg, est)
        ok = [rec.fits[est] for rec in result.records if est in rec.fits]
        tags: Dict[str, int] = {}
        for rec in result.records:
            if est in rec.failures:
                tags[rec.failures[est]] = tags.get(rec.failures[est], 0) + 1
        failure_counts[est] = tags
        n_used = len(ok)
        n_failed = len(result.records) - n_used
        if n_used == 0:
            nan = np.full(len(names), np.nan)
            mean = bias = sd = mse = cp = mean_se = nan
        else:
            E = np.array([f.estimates for f in ok])
            S = np.array([f.se for f in ok])
            lo = np.array([f.ci[:, 0] for f in ok])
            hi = np.array([f.ci[:, 1] for f in ok])
            mean = E.mean(axis=0)
            bias = mean - truth
            sd = E.std(axis=0)
            mse = bias ** 2 + sd ** 2
            cp = ((lo <= truth) & (truth <= hi)).mean(axis=0)
            mean_se = S.mean(axis=0)
        for d, name in enumerate(names):
            t = float(truth[d])
            rows.append(MetricsRow(
                estimator=est,
                parameter=name,
                truth=t,
                n_used=n_used,
                n_failed=n_failed,
                mean=float(mean[d]),
                abs_bias=float(abs(bias[d])),
                sd=float(sd[d]),
                mean_se=float(mean_se[d]),
                mse=float(mse[d]),
                cp=float(cp[d]),
                rel_bias=float(bias[d] / t) if t != 0.0 else float("nan"),
            ))
    frac = float(np.mean([rec.n_missing for rec in result.records])) / cfg.n
    return MetricsTable(
        scenario=cfg.name,
        n=cfg.n,
        replications=cfg.replications,
        missing_fraction=frac,
        rows=tuple(rows),
        failure_counts=failure_counts,
    )


def _cell(v) -> str:
    if isinstance(v, float):
        # repr is the shortest round-trip form, so the CSV is byte-stable
        return "" if np.isnan(v) else repr(v)
    return str(v)


def _render(rows, table: MetricsTable) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(_cell(v) for v in (
            table.scenario, table.n, r.estimator, r.parameter, r.truth,
            r.n_used, r.n_failed, r.mean, r.abs_bias, r.sd, r.mean_se,
            r.mse, r.cp, r.rel_bias,
        )))
    return "\n".join(lines) + "\n"


def to_csv(table: MetricsTable) -> str:
    """Deterministic CSV of the outcome-parameter rows: one row per
    cutpoint and slope per estimator."""
    return _render(table.outcome_rows, table)


def to_missparams_csv(table: MetricsTable) -> str:
    """Same columns as :func:`to_csv`, restricted to the missingness-model
    parameters (EM only); empty apart from the header when no estimator
    reports them."""
    return _render(table.missparam_rows, table)


def to_relbias_csv(table: MetricsTable) -> str:
    """Long-format relative-bias rows for plotting against sample size.

    One row per outcome (estimator, parameter); the rel_bias cell is empty
    where the truth is 0 and the quantity is undefined.
    """
    lines = ["scenario,n,estimator,parameter,truth,rel_bias"]
    for r in table.outcome_rows:
        lines.append(",".join(_cell(v) for v in (
            table.scenario, table.n, r.estimator, r.parameter, r.truth, r.rel_bias,
        )))
    return "\n".join(lines) + "\n"
