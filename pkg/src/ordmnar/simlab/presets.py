"""Built-in benchmark scenarios and their published reference values.

Four named studies share one outcome/missingness design family:

* ``t2``, ``t3``, ``t4``: three response categories, selection intercept
  chosen so that roughly 10%, 25%, 45% of responses go missing
* ``supp5``: five response categories at roughly 25% missing; the source
  study left its selection coefficients unstated, so the covariate and
  response slopes here were chosen from the same family and the intercept
  calibrated to the 25% target

``alt250`` is a fifth configuration (three categories, different truth,
45% missing at n=250) that ships runnable but has no reference rows.

``REFERENCE_X1`` carries the published treatment-slope rows the
``replicate`` command prints beside fresh runs: mean, absolute bias, MSE
and coverage for the whole-data, complete-case and EM fits. A NaN means
the source table did not report that cell.
"""
from typing import Dict, NamedTuple, Optional

from ..exceptions import ValidationError
from .scenarios import ScenarioConfig

DEFAULT_BASE_SEED = 20260816
DEFAULT_REPLICATIONS = 1000

NAN = float("nan")

_THETA3 = (1.0, -0.6)
_BETA3 = (-1.0, 0.005, -0.1)
_TAIL3 = (-2.0, -0.6, 0.05, -0.1, -4.0)

_PRESET_PARAMS = {
    # name: (theta, beta, alpha, default n)
    "t2": (_THETA3, _BETA3, (1.0,) + _TAIL3, 1000),
    "t3": (_THETA3, _BETA3, (2.8,) + _TAIL3, 1000),
    "t4": (_THETA3, _BETA3, (4.8,) + _TAIL3, 1000),
    "supp5": (
        (0.6, 0.5, -0.2, -0.7),
        (-1.3, 0.008, -0.02),
        (0.36, -2.0, -0.6, 0.05, -0.1, -1.0),
        500,
    ),
    "alt250": (
        (1.0, -0.6),
        (0.5, -0.05, 0.1),
        (4.8, 1.0, -0.6, 0.05, -0.1, -3.0),
        250,
    ),
}

PRESET_NAMES = tuple(_PRESET_PARAMS)

# nominal missing fractions the three-category presets were calibrated to
NOMINAL_MISSING = {"t2": 0.10, "t3": 0.25, "t4": 0.45, "supp5": 0.25, "alt250": 0.45}


def preset(name: str, n: Optional[int] = None,
           replications: int = DEFAULT_REPLICATIONS,
           base_seed: int = DEFAULT_BASE_SEED) -> ScenarioConfig:
    """Instantiate a named benchmark scenario.

    ``n`` defaults to the size the study's headline rows use. Seed and
    replication count are free so subsets rerun cheaply.
    """
    if name not in _PRESET_PARAMS:
        raise ValidationError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    theta, beta, alpha, default_n = _PRESET_PARAMS[name]
    return ScenarioConfig(
        name=name,
        n=default_n if n is None else int(n),
        theta=theta,
        beta=beta,
        alpha=alpha,
        replications=replications,
        base_seed=base_seed,
    )


class RefRow(NamedTuple):
    """Published treatment-slope row: mean, abs bias, MSE, coverage."""

    mean: float
    abs_bias: float
    mse: float
    cp: float


# published x1 rows, keyed preset -> n -> estimator
REFERENCE_X1: Dict[str, Dict[int, Dict[str, RefRow]]] = {
    "t2": {
        60: {"whole": RefRow(-1.095, 0.095, 0.4590, 0.945),
             "cc": RefRow(-1.490, 0.490, 0.8709, 0.931),
             "em": RefRow(-1.216, 0.216, 0.6465, 0.931)},
        150: {"whole": RefRow(-1.033, 0.033, 0.1601, 0.949),
              "cc": RefRow(-1.390, 0.390, 0.3557, 0.874),
              "em": RefRow(-1.077, 0.077, 0.1869, 0.942)},
        250: {"whole": RefRow(-1.021, 0.021, 0.0844, 0.954),
              "cc": RefRow(-1.369, 0.369, 0.2450, 0.824),
              "em": RefRow(-1.036, 0.036, 0.0938, 0.953)},
        500: {"whole": RefRow(-1.010, 0.010, 0.0437, 0.944),
              "cc": RefRow(-1.357, 0.357, 0.1818, 0.683),
              "em": RefRow(-1.024, 0.024, 0.0492, 0.941)},
        1000: {"whole": RefRow(-1.001, 0.001, 0.0199, 0.949),
               "cc": RefRow(-1.342, 0.342, 0.1421, 0.452),
               "em": RefRow(-1.005, 0.005, 0.0218, 0.952)},
    },
    "t3": {
        60: {"whole": RefRow(-1.095, 0.095, 0.4590, 0.945),
             "cc": RefRow(-1.805, 0.805, 1.9163, 0.912),
             "em": RefRow(-1.300, 0.300, 1.1524, 0.942)},
        150: {"whole": RefRow(-1.033, 0.033, 0.1601, 0.949),
              "cc": RefRow(-1.619, 0.619, 0.6831, 0.815),
              "em": RefRow(-1.072, 0.072, 0.2257, 0.946)},
        250: {"whole": RefRow(-1.021, 0.021, 0.0844, 0.954),
              "cc": RefRow(-1.600, 0.600, 0.5102, 0.711),
              "em": RefRow(-1.044, 0.044, 0.1120, 0.956)},
        500: {"whole": RefRow(-1.010, 0.010, 0.0437, 0.944),
              "cc": RefRow(-1.581, 0.581, 0.4149, 0.463),
              "em": RefRow(-1.030, 0.030, 0.0590, 0.940)},
        1000: {"whole": RefRow(-1.001, 0.001, 0.0199, 0.949),
               "cc": RefRow(-1.554, 0.554, 0.3411, 0.163),
               "em": RefRow(-1.006, 0.006, 0.0253, 0.951)},
    },
    "t4": {
        60: {"whole": RefRow(-1.095, 0.095, 0.4590, 0.945),
             "cc": RefRow(-2.850, 1.850, 11.0145, 0.959),
             "em": RefRow(-1.583, 0.583, 2.9001, 0.949)},
        150: {"whole": RefRow(-1.033, 0.033, 0.1601, 0.949),
              "cc": RefRow(-2.047, 1.047, 1.8011, 0.786),
              "em": RefRow(-1.109, 0.109, 0.4155, 0.929)},
        250: {"whole": RefRow(-1.021, 0.021, 0.0844, 0.954),
              "cc": RefRow(-1.957, 0.957, 1.2779, 0.628),
              "em": RefRow(-1.054, 0.054, 0.1862, 0.944)},
        500: {"whole": RefRow(-1.010, 0.010, 0.0437, 0.944),
              "cc": RefRow(-1.921, 0.921, 1.0064, 0.324),
              "em": RefRow(-1.048, 0.048, 0.0917, 0.939)},
        1000: {"whole": RefRow(-0.999, 0.001, 0.0206, 0.948),
               "cc": RefRow(-1.850, 0.850, 0.7945, 0.096),
               "em": RefRow(-1.001, 0.001, 0.0391, 0.957)},
    },
    "supp5": {
        500: {"whole": RefRow(-1.311, 0.011, 0.0375, 0.9520),
              "cc": RefRow(-1.844, 0.544, 0.3435, 0.3073),
              "em": RefRow(-1.376, 0.076, 0.0759, 0.9423)},
        1000: {"whole": RefRow(-1.306, 0.006, 0.017, NAN),
               "cc": RefRow(-1.836, 0.536, 0.311, NAN),
               "em": RefRow(-1.346, 0.046, 0.035, NAN)},
    },
}

# sample sizes with published rows, per replicate-capable preset
REFERENCE_SIZES = {name: tuple(sorted(rows)) for name, rows in REFERENCE_X1.items()}
