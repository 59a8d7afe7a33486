"""Bundled example data.

``pga_synthetic``: a synthetic 960-subject, three-arm dose trial with a
five-level assessment response (labels "0" best through "4" worst) and
about 13% nonignorably missing responses. Generated from a known truth
(stored beside the CSV, see :func:`pga_synthetic_truth`) by
scripts/gen_bundled_dataset.py; real trial data of this shape are
typically proprietary, so a synthetic stand-in with documented generating
parameters ships instead.
"""
import json
from importlib.resources import files
from pathlib import Path

from ..data import OrdinalDataset, read_ordinal_csv

PGA_RESPONSE = "PGA"
PGA_COVARIATES = ("DOSE_5MG", "DOSE_10MG", "AGEYR", "SEX", "WEIGHT", "ONSETAGE")
PGA_LEVELS = ("0", "1", "2", "3", "4")


def pga_synthetic_path() -> Path:
    return Path(str(files(__package__) / "pga_synthetic.csv"))


def pga_synthetic_truth() -> dict:
    """Generating parameters of the bundled dataset."""
    with (files(__package__) / "pga_synthetic_truth.json").open() as fh:
        return json.load(fh)


def load_pga_synthetic() -> OrdinalDataset:
    return read_ordinal_csv(
        pga_synthetic_path(),
        response=PGA_RESPONSE,
        covariates=PGA_COVARIATES,
        levels=PGA_LEVELS,
    )
