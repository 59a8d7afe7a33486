"""Synthetic data generators for the replication studies.

The design is a four-covariate clinical-trial shape: a treatment
indicator, a binary comorbidity flag, and two positive continuous
measurements. The outcome model uses columns (x1, x3, x4); the
missingness model sees all four covariates plus the response, so the
fitted missingness model is deliberately richer than the outcome model.
"""
from typing import Tuple, Union

import numpy as np

from ..data import OrdinalDataset
from ..params import MissingnessParams, PoParams
from ..po import category_prob_matrix

OUTCOME_COLUMNS = (0, 2, 3)
OUTCOME_NAMES = ("x1", "x3", "x4")
MISS_NAMES = ("x1", "x2", "x3", "x4")

TREATMENT_FIXED = "fixed"
TREATMENT_BERNOULLI = "bernoulli"


def gen_covariates(n: int, rng: np.random.Generator,
                   treatment: str = TREATMENT_FIXED) -> np.ndarray:
    """Draw the (n, 4) covariate matrix.

    x1 is the treatment arm: with the default fixed allocation the first
    ceil(n/3) subjects are control (0) and the rest active (1); the
    bernoulli option instead draws arms independently with P(active) =
    0.67. x2 ~ Bernoulli(0.3), x3 ~ Gamma(shape 17, rate 0.2),
    x4 ~ Lognormal(meanlog 3.1, sdlog 0.65).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if treatment == TREATMENT_FIXED:
        x1 = np.ones(n)
        x1[: int(np.ceil(n / 3.0))] = 0.0
    elif treatment == TREATMENT_BERNOULLI:
        x1 = (rng.random(n) < 0.67).astype(np.float64)
    else:
        raise ValueError(f"unknown treatment allocation {treatment!r}")
    x2 = (rng.random(n) < 0.3).astype(np.float64)
    x3 = rng.gamma(17.0, 5.0, n)
    x4 = rng.lognormal(3.1, 0.65, n)
    return np.column_stack([x1, x2, x3, x4])


def gen_response(x_out: np.ndarray, po: PoParams, rng: np.random.Generator) -> np.ndarray:
    """Draw one ordinal response per row of the outcome design.

    Each row gets a single draw from its category distribution under
    ``po``. Raises ValueError when the truth puts nonpositive mass on a
    category for some row.
    """
    probs = category_prob_matrix(po, x_out)
    if np.any(probs <= 0.0):
        raise ValueError("true parameters give nonpositive category probabilities")
    u = rng.random(x_out.shape[0])
    return (u[:, None] > probs.cumsum(axis=1)).sum(axis=1).astype(np.int64) + 1


def gen_missingness(x_all: np.ndarray, y: np.ndarray,
                    alpha: Union[np.ndarray, MissingnessParams],
                    rng: np.random.Generator) -> np.ndarray:
    """Draw the missingness indicator (True = response missing).

    The selection design is (1, x_all, y) so alpha must have
    x_all.shape[1] + 2 entries; its last entry is the response slope.
    """
    if isinstance(alpha, MissingnessParams):
        alpha = alpha.alpha
    alpha = np.asarray(alpha, dtype=np.float64)
    n = x_all.shape[0]
    if alpha.shape[0] != x_all.shape[1] + 2:
        raise ValueError(
            f"alpha has {alpha.shape[0]} entries, design needs {x_all.shape[1] + 2}"
        )
    u = alpha[0] + x_all @ alpha[1:-1] + alpha[-1] * y
    # expit via tanh keeps the tails exact without overflow warnings
    p = 0.5 * (1.0 + np.tanh(0.5 * u))
    return rng.random(n) < p


def gen_replicate(n: int, po: PoParams, miss: MissingnessParams,
                  rng: np.random.Generator,
                  treatment: str = TREATMENT_FIXED,
                  ) -> Tuple[OrdinalDataset, OrdinalDataset]:
    """Generate one replicate.

    Returns (observed, full): the dataset with the response blanked where
    the missingness indicator fired, and the pre-deletion dataset with
    every response retained.
    """
    x_all = gen_covariates(n, rng, treatment)
    x_out = x_all[:, OUTCOME_COLUMNS]
    y = gen_response(x_out, po, rng)
    r = gen_missingness(x_all, y, miss, rng)
    y_obs = y.copy()
    y_obs[r] = 0
    J = po.n_categories
    observed = OrdinalDataset.from_arrays(
        y_obs, x_out, missing=r, x_miss=x_all, n_categories=J,
        covariate_names=OUTCOME_NAMES, miss_covariate_names=MISS_NAMES,
    )
    full = OrdinalDataset.from_arrays(
        y, x_out, missing=np.zeros(n, dtype=bool), x_miss=x_all, n_categories=J,
        covariate_names=OUTCOME_NAMES, miss_covariate_names=MISS_NAMES,
    )
    return observed, full
