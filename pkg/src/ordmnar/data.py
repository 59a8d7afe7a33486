"""Dataset containers, validation, CSV ingestion, and augmentation.

An :class:`OrdinalDataset` holds one row per subject: an ordinal response
coded 1..J (0 where missing), outcome-model covariates, and a possibly
different covariate set for the missingness model. ``augment_dataset``
expands each missing-response subject into J candidate rows (one per
category) carrying fractional weights; observed subjects keep a single row
with weight 1. The EM machinery operates on the augmented form.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import ValidationError

MISSING_TOKENS = {"", "NA"}


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class OrdinalDataset:
    """Per-subject data for the two-part model.

    ``y`` uses codes 1..J with 0 for a missing response; ``missing`` is the
    corresponding mask. ``x`` feeds the outcome model and ``x_miss`` the
    missingness model (they may share columns or differ).
    """

    y: np.ndarray
    missing: np.ndarray
    x: np.ndarray
    x_miss: np.ndarray
    n_categories: int
    subject_ids: tuple
    level_labels: tuple
    covariate_names: tuple
    miss_covariate_names: tuple

    def __post_init__(self):
        n = self.y.shape[0]
        if n == 0:
            raise ValidationError("dataset is empty")
        if self.n_categories < 2:
            raise ValidationError("need at least two response categories")
        if self.missing.shape != (n,) or self.x.shape[0] != n or self.x_miss.shape[0] != n:
            raise ValidationError("array lengths disagree")
        if len(self.subject_ids) != n:
            raise ValidationError("subject_ids length disagrees with data")
        obs = ~self.missing
        if not obs.any():
            raise ValidationError("every response is missing")
        bad = (self.y[obs] < 1) | (self.y[obs] > self.n_categories)
        if bad.any():
            raise ValidationError("observed response codes must lie in 1..J")
        if (self.y[self.missing] != 0).any():
            raise ValidationError("missing responses must carry code 0")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.x_miss))):
            raise ValidationError("covariates must be finite")
        if len(self.level_labels) != self.n_categories:
            raise ValidationError("level_labels length must equal the category count")
        if len(self.covariate_names) != self.x.shape[1]:
            raise ValidationError("covariate_names length must match x columns")
        if len(self.miss_covariate_names) != self.x_miss.shape[1]:
            raise ValidationError("miss_covariate_names length must match x_miss columns")

    @classmethod
    def from_arrays(
        cls,
        y,
        x,
        n_categories: Optional[int] = None,
        x_miss=None,
        missing=None,
        subject_ids: Optional[Sequence] = None,
        level_labels: Optional[Sequence[str]] = None,
        covariate_names: Optional[Sequence[str]] = None,
        miss_covariate_names: Optional[Sequence[str]] = None,
    ) -> "OrdinalDataset":
        """Build and validate a dataset from plain arrays.

        ``missing`` defaults to ``y == 0``; ``x_miss`` defaults to ``x``;
        ``n_categories`` defaults to the largest observed code.
        """
        y = np.asarray(y, dtype=np.int64).copy()
        x = np.asarray(x, dtype=np.float64).reshape(y.shape[0], -1).copy()
        missing = np.asarray(y == 0 if missing is None else missing, dtype=bool).copy()
        y[missing] = 0
        shared = x_miss is None
        x_miss = x if shared else np.asarray(x_miss, dtype=np.float64).reshape(y.shape[0], -1).copy()
        if n_categories is None:
            if not (~missing).any():
                raise ValidationError("cannot infer the category count: no observed responses")
            n_categories = int(y[~missing].max())
        ids = tuple(str(i) for i in range(y.shape[0])) if subject_ids is None else tuple(str(s) for s in subject_ids)
        levels = tuple(str(k) for k in range(1, n_categories + 1)) if level_labels is None else tuple(level_labels)
        xn = tuple(f"x{k + 1}" for k in range(x.shape[1])) if covariate_names is None else tuple(covariate_names)
        if miss_covariate_names is not None:
            mn = tuple(miss_covariate_names)
        else:
            mn = xn if shared else tuple(f"z{k + 1}" for k in range(x_miss.shape[1]))
        return cls(
            y=_readonly(y),
            missing=_readonly(missing),
            x=_readonly(np.ascontiguousarray(x)),
            x_miss=_readonly(np.ascontiguousarray(np.asarray(x_miss, dtype=np.float64))),
            n_categories=int(n_categories),
            subject_ids=ids,
            level_labels=levels,
            covariate_names=xn,
            miss_covariate_names=mn,
        )

    @property
    def n_subjects(self) -> int:
        return self.y.shape[0]

    @property
    def n_missing(self) -> int:
        return int(self.missing.sum())

    @property
    def n_covariates(self) -> int:
        return self.x.shape[1]

    @property
    def n_miss_covariates(self) -> int:
        return self.x_miss.shape[1]

    def complete_cases(self) -> "OrdinalDataset":
        """The observed-response subset (used by the complete-case fit)."""
        keep = ~self.missing
        return replace(
            self,
            y=_readonly(self.y[keep].copy()),
            missing=_readonly(np.zeros(int(keep.sum()), dtype=bool)),
            x=_readonly(self.x[keep].copy()),
            x_miss=_readonly(self.x_miss[keep].copy()),
            subject_ids=tuple(s for s, k in zip(self.subject_ids, keep) if k),
        )


def validate_dataset(rows: Iterable[tuple], n_categories: Optional[int] = None) -> OrdinalDataset:
    """Validate raw per-subject records into an :class:`OrdinalDataset`.

    Each record is ``(subject_id, y, covariates)`` with ``y`` an integer
    code 1..J or None for missing. Raises :class:`ValidationError` on ragged
    covariates, codes outside 1..J, non-finite values, or empty input.
    """
    ids, ys, xs = [], [], []
    for rec in rows:
        try:
            sid, y, x = rec
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"record {rec!r} is not (id, y, covariates)") from exc
        ids.append(sid)
        if y is None:
            ys.append(0)
        else:
            yi = int(y)
            if yi != y or yi < 1:
                raise ValidationError(f"subject {sid!r}: response {y!r} is not a positive integer code")
            ys.append(yi)
        xs.append([float(v) for v in x])
    if not ids:
        raise ValidationError("dataset is empty")
    widths = {len(x) for x in xs}
    if len(widths) != 1:
        raise ValidationError("covariate rows have inconsistent lengths")
    return OrdinalDataset.from_arrays(
        y=np.array(ys, dtype=np.int64),
        x=np.array(xs, dtype=np.float64).reshape(len(ids), -1),
        n_categories=n_categories,
        subject_ids=ids,
    )


@dataclass(frozen=True)
class AugmentedDataset:
    """Row-expanded data for EM.

    Observed subjects contribute one row with ``r = 0`` and weight exactly
    1; each missing subject contributes J consecutive rows (categories
    1..J, ``r = 1``) whose weights an E-step normalizes to sum to 1.
    ``group_starts`` delimits each subject's row block.
    """

    y: np.ndarray
    x: np.ndarray
    x_miss: np.ndarray
    r: np.ndarray
    weights: np.ndarray
    subject_index: np.ndarray
    group_starts: np.ndarray
    n_categories: int
    source: OrdinalDataset

    def __post_init__(self):
        m = self.y.shape[0]
        J = self.n_categories
        if not (self.x.shape[0] == self.x_miss.shape[0] == self.r.shape[0] == self.weights.shape[0] == m):
            raise ValidationError("augmented arrays disagree in length")
        if self.group_starts[0] != 0 or self.group_starts[-1] != m:
            raise ValidationError("group offsets do not cover the rows")
        sizes = np.diff(self.group_starts)
        if not np.all((sizes == 1) | (sizes == J)):
            raise ValidationError("each group must have 1 row (observed) or J rows (missing)")
        if np.any((self.weights < 0.0) | (self.weights > 1.0)):
            raise ValidationError("weights must lie in [0, 1]")
        if np.any((self.y < 1) | (self.y > J)):
            raise ValidationError("augmented response codes must lie in 1..J")

    @property
    def n_rows(self) -> int:
        return self.y.shape[0]

    @property
    def n_subjects(self) -> int:
        return self.group_starts.shape[0] - 1

    def group_rows(self, i: int) -> slice:
        return slice(int(self.group_starts[i]), int(self.group_starts[i + 1]))

    @property
    def missing_group_mask(self) -> np.ndarray:
        """Boolean per subject: True where the response was missing."""
        return np.diff(self.group_starts) > 1

    def miss_design(self) -> np.ndarray:
        """Design matrix (1, x_miss, y) for the missingness model."""
        m = self.n_rows
        Z = np.empty((m, self.x_miss.shape[1] + 2), dtype=np.float64)
        Z[:, 0] = 1.0
        Z[:, 1:-1] = self.x_miss
        Z[:, -1] = self.y.astype(np.float64)
        return Z

    def replace_weights(self, weights: np.ndarray) -> "AugmentedDataset":
        w = np.asarray(weights, dtype=np.float64).copy()
        return replace(self, weights=_readonly(w))


def augment_dataset(ds: OrdinalDataset) -> AugmentedDataset:
    """Expand missing-response subjects into one row per candidate category.

    All rows start with weight 1 (observed rows keep it; an E-step replaces
    the candidate-row weights with posterior category probabilities).
    """
    J = ds.n_categories
    sizes = np.where(ds.missing, J, 1)
    starts = np.zeros(ds.n_subjects + 1, dtype=np.int64)
    np.cumsum(sizes, out=starts[1:])
    m = int(starts[-1])

    y = np.empty(m, dtype=np.int64)
    r = np.zeros(m, dtype=np.int64)
    subject_index = np.empty(m, dtype=np.int64)
    x = np.empty((m, ds.x.shape[1]), dtype=np.float64)
    x_miss = np.empty((m, ds.x_miss.shape[1]), dtype=np.float64)
    for i in range(ds.n_subjects):
        s = slice(starts[i], starts[i + 1])
        subject_index[s] = i
        x[s] = ds.x[i]
        x_miss[s] = ds.x_miss[i]
        if ds.missing[i]:
            y[s] = np.arange(1, J + 1)
            r[s] = 1
        else:
            y[s] = ds.y[i]
    return AugmentedDataset(
        y=_readonly(y),
        x=_readonly(x),
        x_miss=_readonly(x_miss),
        r=_readonly(r),
        weights=_readonly(np.ones(m, dtype=np.float64)),
        subject_index=_readonly(subject_index),
        group_starts=_readonly(starts),
        n_categories=J,
        source=ds,
    )


def read_ordinal_csv(
    path,
    response: str,
    covariates: Sequence[str],
    id_column: Optional[str] = None,
    levels: Optional[Sequence[str]] = None,
    miss_covariates: Optional[Sequence[str]] = None,
) -> OrdinalDataset:
    """Read a headered CSV into an :class:`OrdinalDataset`.

    The response column holds category labels; an empty cell or ``NA``
    marks a missing response. Labels map to codes 1..J either by the
    user-supplied ``levels`` order or lexicographically. ``miss_covariates``
    selects a separate column set for the missingness model (defaults to
    the outcome covariates).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValidationError(f"{path}: no header row")
        header = [h.strip() for h in reader.fieldnames]
        needed = [response, *covariates, *(miss_covariates or [])]
        if id_column:
            needed.append(id_column)
        for col in needed:
            if col not in header:
                raise ValidationError(f"{path}: column {col!r} not in header {header}")
        records = list(reader)
    if not records:
        raise ValidationError(f"{path}: no data rows")

    raw_labels = [rec[response].strip() for rec in records]
    observed_labels = sorted({lab for lab in raw_labels if lab not in MISSING_TOKENS})
    if levels is None:
        level_order = observed_labels
    else:
        level_order = [str(l) for l in levels]
        unknown = [lab for lab in observed_labels if lab not in level_order]
        if unknown:
            raise ValidationError(f"{path}: labels {unknown} not covered by --levels {level_order}")
    if len(level_order) < 2:
        raise ValidationError(f"{path}: need at least two observed response levels")
    code = {lab: k + 1 for k, lab in enumerate(level_order)}

    n = len(records)
    y = np.zeros(n, dtype=np.int64)
    x = np.empty((n, len(covariates)), dtype=np.float64)
    mc = list(miss_covariates) if miss_covariates is not None else None
    x_miss = np.empty((n, len(mc)), dtype=np.float64) if mc is not None else None
    ids = []
    for i, rec in enumerate(records):
        lab = raw_labels[i]
        y[i] = 0 if lab in MISSING_TOKENS else code[lab]
        for j, col in enumerate(covariates):
            try:
                x[i, j] = float(rec[col])
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{path}: row {i + 2}, column {col!r}: {rec[col]!r} is not numeric") from exc
        if mc is not None:
            for j, col in enumerate(mc):
                try:
                    x_miss[i, j] = float(rec[col])
                except (TypeError, ValueError) as exc:
                    raise ValidationError(f"{path}: row {i + 2}, column {col!r}: {rec[col]!r} is not numeric") from exc
        ids.append(rec[id_column].strip() if id_column else str(i + 1))

    return OrdinalDataset.from_arrays(
        y=y,
        x=x,
        n_categories=len(level_order),
        x_miss=x_miss,
        subject_ids=ids,
        level_labels=level_order,
        covariate_names=covariates,
        miss_covariate_names=mc,
    )
