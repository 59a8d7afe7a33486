import numpy as np
import pytest

from ordmnar.data import (
    MISSING_TOKENS,
    OrdinalDataset,
    augment_dataset,
    read_ordinal_csv,
    validate_dataset,
)
from ordmnar.exceptions import ValidationError


def small_ds():
    y = [2, 0, 1, 3, 0]
    x = np.arange(10.0).reshape(5, 2)
    return OrdinalDataset.from_arrays(y, x, n_categories=3)


class TestFromArrays:
    def test_missing_inferred_from_zero_codes(self):
        ds = small_ds()
        assert ds.missing.tolist() == [False, True, False, False, True]
        assert ds.n_missing == 2

    def test_explicit_mask_blanks_codes(self):
        ds = OrdinalDataset.from_arrays([2, 1, 3], np.zeros((3, 1)),
                                        missing=[False, True, False])
        assert ds.y.tolist() == [2, 0, 3]

    def test_category_count_inferred(self):
        ds = OrdinalDataset.from_arrays([1, 4, 2], np.zeros((3, 1)))
        assert ds.n_categories == 4

    def test_code_above_category_count_rejected(self):
        with pytest.raises(ValidationError):
            OrdinalDataset.from_arrays([1, 4], np.zeros((2, 1)), n_categories=3)

    def test_x_miss_defaults_to_x(self):
        ds = small_ds()
        assert ds.x_miss is ds.x

    def test_arrays_are_readonly(self):
        ds = small_ds()
        with pytest.raises(ValueError):
            ds.y[0] = 1

    def test_all_missing_needs_explicit_count(self):
        with pytest.raises(ValidationError):
            OrdinalDataset.from_arrays([0, 0], np.zeros((2, 1)))

    def test_name_length_checked(self):
        with pytest.raises(ValidationError):
            OrdinalDataset.from_arrays([1, 2], np.zeros((2, 2)),
                                       covariate_names=("a",))


class TestCompleteCases:
    def test_subset_drops_missing_rows(self):
        ds = small_ds()
        cc = ds.complete_cases()
        assert cc.n_subjects == 3
        assert cc.n_missing == 0
        assert cc.y.tolist() == [2, 1, 3]
        np.testing.assert_array_equal(cc.x, ds.x[~ds.missing])

    def test_levels_and_names_survive(self):
        ds = OrdinalDataset.from_arrays(
            [1, 0, 2], np.zeros((3, 1)), n_categories=2,
            level_labels=("lo", "hi"), covariate_names=("z",),
        )
        cc = ds.complete_cases()
        assert cc.level_labels == ("lo", "hi")
        assert cc.covariate_names == ("z",)


class TestValidateDataset:
    def test_none_marks_missing(self):
        ds = validate_dataset([("a", 1, [0.0]), ("b", None, [1.0])], n_categories=2)
        assert ds.missing.tolist() == [False, True]
        assert ds.subject_ids == ("a", "b")

    def test_ragged_rows_rejected(self):
        with pytest.raises(ValidationError):
            validate_dataset([("a", 1, [0.0]), ("b", 2, [1.0, 2.0])])

    def test_fractional_code_rejected(self):
        with pytest.raises(ValidationError):
            validate_dataset([("a", 1.5, [0.0])])


class TestAugment:
    def test_single_missing_subject_expands_to_all_categories(self):
        # a missing subject at J=5: five rows y=1..5 sharing that x row
        ds = OrdinalDataset.from_arrays([2, 0], [[0.0, 0.0], [3.0, 7.0]],
                                        n_categories=5)
        aug = augment_dataset(ds)
        block = aug.group_rows(1)
        assert aug.n_rows == 6
        assert aug.y[block].tolist() == [1, 2, 3, 4, 5]
        assert (aug.x[block] == [3.0, 7.0]).all()
        assert aug.r[block].tolist() == [1] * 5

    def test_observed_rows_stay_single(self):
        ds = small_ds()
        aug = augment_dataset(ds)
        assert aug.n_rows == 3 * 1 + 2 * 3
        assert aug.group_starts.tolist() == [0, 1, 4, 5, 6, 9]
        assert aug.missing_group_mask.tolist() == [False, True, False, False, True]
        # observed rows keep their code and weight 1
        obs = aug.r == 0
        assert (aug.weights[obs] == 1.0).all()
        assert aug.y[obs].tolist() == [2, 1, 3]

    def test_miss_design_layout(self):
        ds = OrdinalDataset.from_arrays([1, 0], [[5.0], [2.0]], n_categories=3)
        Z = augment_dataset(ds).miss_design()
        np.testing.assert_array_equal(
            Z, [[1.0, 5.0, 1.0],
                [1.0, 2.0, 1.0], [1.0, 2.0, 2.0], [1.0, 2.0, 3.0]]
        )

    def test_all_missing_dataset_rejected(self):
        with pytest.raises(ValidationError, match="every response"):
            OrdinalDataset.from_arrays([0], [[2.0]], n_categories=3)

    def test_replace_weights_checks_range(self):
        aug = augment_dataset(small_ds())
        with pytest.raises(ValidationError):
            aug.replace_weights(np.full(aug.n_rows, 1.5))


class TestReadCsv:
    def write(self, tmp_path, text):
        p = tmp_path / "d.csv"
        p.write_text(text)
        return p

    def test_reads_and_maps_levels(self, tmp_path):
        p = self.write(tmp_path, "resp,a,b\nmid,1,2\n,3,4\nlow,5,6\nNA,7,8\nhigh,0,1\n")
        ds = read_ordinal_csv(p, response="resp", covariates=["a", "b"],
                              levels=["low", "mid", "high"])
        assert ds.y.tolist() == [2, 0, 1, 0, 3]
        assert ds.missing.tolist() == [False, True, False, True, False]
        assert ds.level_labels == ("low", "mid", "high")
        assert ds.x[0].tolist() == [1.0, 2.0]

    def test_lexicographic_default_levels(self, tmp_path):
        p = self.write(tmp_path, "resp,a\n2,0\n1,0\n3,0\n")
        ds = read_ordinal_csv(p, response="resp", covariates=["a"])
        assert ds.level_labels == ("1", "2", "3")

    def test_unknown_label_rejected(self, tmp_path):
        p = self.write(tmp_path, "resp,a\nweird,0\n")
        with pytest.raises(ValidationError, match="weird"):
            read_ordinal_csv(p, response="resp", covariates=["a"], levels=["lo", "hi"])

    def test_missing_column_named_in_error(self, tmp_path):
        p = self.write(tmp_path, "resp,a\n1,0\n")
        with pytest.raises(ValidationError, match="nope"):
            read_ordinal_csv(p, response="resp", covariates=["nope"])

    def test_separate_missingness_columns(self, tmp_path):
        p = self.write(tmp_path, "resp,a,b\n1,1,10\n2,2,20\nNA,3,30\n")
        ds = read_ordinal_csv(p, response="resp", covariates=["a"],
                              miss_covariates=["a", "b"])
        assert ds.n_covariates == 1
        assert ds.n_miss_covariates == 2
        assert ds.x_miss[2].tolist() == [3.0, 30.0]

    def test_missing_tokens_are_blank_and_na(self):
        assert MISSING_TOKENS == {"", "NA"}
