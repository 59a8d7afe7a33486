"""Fit reports: one structure feeding both the text and JSON renderings.

The numbers live in :class:`FitReport` only; ``to_text`` and ``to_json_dict``
are pure renderings of it, so the two output formats cannot drift apart.

Odds-ratio direction. Under the descending convention (logit P(Y > j) =
theta_j + x'beta) a negative slope shifts subjects toward lower response
categories. ``or_direction="lower"`` reports exp(-estimate), the odds
multiplier for landing at or below any fixed category; ``"upper"`` reports
exp(estimate), the multiplier for exceeding it. Missingness-model odds
ratios are always exp(estimate): that model is an ordinary logistic
regression for P(response missing) and has no direction ambiguity.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .data import OrdinalDataset, augment_dataset
from .em import EmOptions, em_fit, se_and_ci, wald_p_values
from .po import fit_po_weighted

OR_LOWER = "lower"
OR_UPPER = "upper"

METHOD_EM = "em"
METHOD_CC = "cc"


@dataclass(frozen=True)
class CoefRow:
    name: str
    estimate: float
    se: float
    ci_low: float
    ci_high: float
    p_value: float
    # odds-ratio triple; None on cut points, where an OR has no meaning
    odds_ratio: Optional[float]
    or_low: Optional[float]
    or_high: Optional[float]


@dataclass(frozen=True)
class FitReport:
    method: str
    n: int
    n_categories: int
    n_missing: int
    missing_fraction: float
    level_labels: Tuple[str, ...]
    ci_level: float
    or_direction: str
    converged: bool
    iterations: int
    loglik: float
    loglik_trace: Tuple[float, ...]
    outcome: Tuple[CoefRow, ...]
    missingness: Optional[Tuple[CoefRow, ...]]  # None for the cc method


def _or_triple(est: float, lo: float, hi: float, direction: str):
    if direction == OR_LOWER:
        return float(np.exp(-est)), float(np.exp(-hi)), float(np.exp(-lo))
    return float(np.exp(est)), float(np.exp(lo)), float(np.exp(hi))


def _coef_rows(names, est, se, ci, p, n_cuts: int, direction: Optional[str]) -> List[CoefRow]:
    rows = []
    for i, name in enumerate(names):
        is_cut = i < n_cuts
        if is_cut or direction is None:
            orr = (None, None, None) if is_cut else (
                float(np.exp(est[i])), float(np.exp(ci[i, 0])), float(np.exp(ci[i, 1]))
            )
        else:
            orr = _or_triple(est[i], ci[i, 0], ci[i, 1], direction)
        rows.append(CoefRow(
            name=name, estimate=float(est[i]), se=float(se[i]),
            ci_low=float(ci[i, 0]), ci_high=float(ci[i, 1]), p_value=float(p[i]),
            odds_ratio=orr[0], or_low=orr[1], or_high=orr[2],
        ))
    return rows


def build_fit_report(ds: OrdinalDataset, method: str = METHOD_EM,
                     ci_level: float = 0.95,
                     or_direction: str = OR_LOWER) -> FitReport:
    """Fit ``ds`` by the requested method and assemble the report.

    Estimation errors propagate; the caller decides how to surface them.
    """
    if method not in (METHOD_EM, METHOD_CC):
        raise ValueError(f"method must be '{METHOD_EM}' or '{METHOD_CC}'")
    if or_direction not in (OR_LOWER, OR_UPPER):
        raise ValueError(f"or_direction must be '{OR_LOWER}' or '{OR_UPPER}'")
    k = ds.n_categories - 1
    cut_names = [f"cut{j}" for j in range(1, k + 1)]
    out_names = cut_names + list(ds.covariate_names)

    if method == METHOD_CC:
        cc = ds.complete_cases()
        res = fit_po_weighted(augment_dataset(cc))
        est = res.params.as_vector()
        se, ci = se_and_ci(res.neg_hessian, est, ci_level)
        p = wald_p_values(est, se)
        outcome = _coef_rows(out_names, est, se, ci, p, k, or_direction)
        return FitReport(
            method=method, n=ds.n_subjects, n_categories=ds.n_categories,
            n_missing=ds.n_missing, missing_fraction=ds.n_missing / ds.n_subjects,
            level_labels=ds.level_labels, ci_level=ci_level,
            or_direction=or_direction, converged=res.converged,
            iterations=res.iterations, loglik=res.loglik,
            loglik_trace=(res.loglik,), outcome=tuple(outcome), missingness=None,
        )

    fit = em_fit(ds, options=EmOptions(ci_level=ci_level))
    d1 = k + ds.n_covariates
    est = fit.gamma.as_vector()
    p = wald_p_values(est, fit.se)
    outcome = _coef_rows(out_names, est[:d1], fit.se[:d1], fit.ci[:d1], p[:d1],
                         k, or_direction)
    miss_names = ["const"] + list(ds.miss_covariate_names) + ["response"]
    missingness = _coef_rows(miss_names, est[d1:], fit.se[d1:], fit.ci[d1:],
                             p[d1:], 0, None)
    return FitReport(
        method=method, n=ds.n_subjects, n_categories=ds.n_categories,
        n_missing=ds.n_missing, missing_fraction=ds.n_missing / ds.n_subjects,
        level_labels=ds.level_labels, ci_level=ci_level,
        or_direction=or_direction, converged=fit.converged,
        iterations=fit.iterations, loglik=fit.loglik,
        loglik_trace=tuple(float(v) for v in fit.loglik_trace),
        outcome=tuple(outcome), missingness=tuple(missingness),
    )


def _fmt(v: Optional[float], width: int = 9, prec: int = 4) -> str:
    if v is None:
        return " " * width
    return f"{v:{width}.{prec}f}"


def _table(rows: Tuple[CoefRow, ...], ci_level: float) -> List[str]:
    pct = f"{100 * ci_level:g}%"
    head = f"{'term':<12} {'estimate':>9} {'se':>9} {pct + ' CI':>21} {'p':>7} {'OR':>9} {'OR ' + pct + ' CI':>21}"
    lines = [head, "-" * len(head)]
    for r in rows:
        ci = f"({_fmt(r.ci_low)},{_fmt(r.ci_high)})"
        if r.odds_ratio is None:
            orr, orci = " " * 9, " " * 21
        else:
            orr = _fmt(r.odds_ratio)
            orci = f"({_fmt(r.or_low)},{_fmt(r.or_high)})"
        lines.append(
            f"{r.name:<12} {_fmt(r.estimate)} {_fmt(r.se)} {ci} {r.p_value:7.4f} {orr} {orci}"
        )
    return lines


def to_text(report: FitReport) -> str:
    """Human-readable rendering."""
    method = {"em": "joint model (EM)", "cc": "complete cases"}[report.method]
    lines = [
        f"method: {method}",
        f"subjects: {report.n}   categories: {report.n_categories} "
        f"({' < '.join(report.level_labels)})",
        f"missing responses: {report.n_missing} ({100 * report.missing_fraction:.1f}%)",
        f"converged: {'yes' if report.converged else 'no'} in {report.iterations} iterations"
        f"   loglik: {report.loglik:.6f}",
        f"odds-ratio direction: {report.or_direction}",
        "",
        "outcome model",
    ]
    lines.extend(_table(report.outcome, report.ci_level))
    if report.missingness is not None:
        lines.append("")
        lines.append("missingness model (logit P(response missing))")
        lines.extend(_table(report.missingness, report.ci_level))
    return "\n".join(lines) + "\n"


def _row_dict(r: CoefRow) -> dict:
    return {
        "term": r.name, "estimate": r.estimate, "se": r.se,
        "ci_low": r.ci_low, "ci_high": r.ci_high, "p_value": r.p_value,
        "odds_ratio": r.odds_ratio, "or_low": r.or_low, "or_high": r.or_high,
    }


def to_json_dict(report: FitReport) -> dict:
    """JSON-ready rendering; numbers are exactly the FitReport's."""
    return {
        "method": report.method,
        "n": report.n,
        "n_categories": report.n_categories,
        "n_missing": report.n_missing,
        "missing_fraction": report.missing_fraction,
        "levels": list(report.level_labels),
        "ci_level": report.ci_level,
        "or_direction": report.or_direction,
        "converged": report.converged,
        "iterations": report.iterations,
        "loglik": report.loglik,
        "loglik_trace": list(report.loglik_trace),
        "outcome": [_row_dict(r) for r in report.outcome],
        "missingness": None if report.missingness is None
        else [_row_dict(r) for r in report.missingness],
    }
