import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppfs import (
    Dataset,
    DatasetError,
    FeatureKind,
    TaskKind,
    decode_column,
    decode_target,
    k_fold_indices,
    k_fold_partition,
    load_csv,
    permute_column,
    project_columns,
    take_rows,
    train_test_split,
)

from conftest import make_classification, make_regression


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_classification_labels_by_first_appearance(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,yes\n3,4,no\n5,6,yes\n7,8,no\n")
        ds = load_csv(path, "y", TaskKind.CLASSIFICATION)
        assert ds.d == 2
        assert ds.n_classes == 2
        assert ds.target_labels == ("yes", "no")
        assert list(ds.target) == [0, 1, 0, 1]

    def test_unknown_target_errors(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,yes\n3,4,no\n")
        with pytest.raises(DatasetError, match="unknown target"):
            load_csv(path, "z", TaskKind.CLASSIFICATION)

    def test_categorical_encoded_by_first_appearance(self, tmp_path):
        path = write(tmp_path, "c,y\nred,1.0\nblue,2.0\nred,3.0\n")
        ds = load_csv(path, "y", TaskKind.REGRESSION)
        assert ds.kinds[0] == FeatureKind.categorical(2)
        assert list(ds.values[:, 0]) == [0.0, 1.0, 0.0]

    def test_missing_cell_errors(self, tmp_path):
        path = write(tmp_path, "a,y\n1,2\n,3\n")
        with pytest.raises(DatasetError, match="missing value"):
            load_csv(path, "y", TaskKind.REGRESSION)

    def test_missing_file_errors(self, tmp_path):
        with pytest.raises(DatasetError, match="no such file"):
            load_csv(tmp_path / "nope.csv", "y", TaskKind.REGRESSION)

    def test_single_class_target_errors(self, tmp_path):
        path = write(tmp_path, "a,y\n1,x\n2,x\n3,x\n")
        with pytest.raises(DatasetError, match="single class"):
            load_csv(path, "y", TaskKind.CLASSIFICATION)

    def test_non_numeric_regression_target_errors(self, tmp_path):
        path = write(tmp_path, "a,y\n1,low\n2,high\n")
        with pytest.raises(DatasetError, match="non-numeric"):
            load_csv(path, "y", TaskKind.REGRESSION)

    def test_duplicate_header_errors(self, tmp_path):
        path = write(tmp_path, "a,a,y\n1,2,3\n")
        with pytest.raises(DatasetError, match="duplicate column"):
            load_csv(path, "y", TaskKind.REGRESSION)

    def test_override_numeric_to_categorical(self, tmp_path):
        path = write(tmp_path, "a,y\n3,1\n7,2\n3,3\n")
        ds = load_csv(path, "y", TaskKind.REGRESSION, kind_overrides={"a": "categorical"})
        assert ds.kinds[0].is_categorical
        assert list(ds.values[:, 0]) == [0.0, 1.0, 0.0]

    def test_override_text_to_continuous_errors(self, tmp_path):
        path = write(tmp_path, "a,y\nlow,1\nhigh,2\n")
        with pytest.raises(DatasetError, match="cannot be continuous"):
            load_csv(path, "y", TaskKind.REGRESSION, kind_overrides={"a": "continuous"})

    def test_ragged_row_errors(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,3\n4,5\n")
        with pytest.raises(DatasetError, match="row 3"):
            load_csv(path, "y", TaskKind.REGRESSION)

    def test_encoding_round_trip(self, tmp_path):
        raw = ["red", "blue", "red", "green", "blue"]
        path = write(tmp_path, "c,y\n" + "\n".join(f"{c},{i}" for i, c in enumerate(raw)) + "\n")
        ds = load_csv(path, "y", TaskKind.REGRESSION)
        assert decode_column(ds, 0) == raw

    def test_target_round_trip(self, tmp_path):
        raw = ["up", "down", "up", "down"]
        path = write(tmp_path, "a,y\n" + "\n".join(f"{i},{c}" for i, c in enumerate(raw)) + "\n")
        ds = load_csv(path, "y", TaskKind.CLASSIFICATION)
        assert decode_target(ds) == raw


class TestSplit:
    def test_sizes(self):
        ds = make_regression(n=100)
        pair = train_test_split(ds, 0.2, seed=1)
        assert pair.test.n == 20
        assert pair.train.n == 80

    def test_deterministic(self):
        ds = make_regression(n=50)
        a = train_test_split(ds, 0.2, seed=7)
        b = train_test_split(ds, 0.2, seed=7)
        assert np.array_equal(a.train.values, b.train.values)
        assert np.array_equal(a.test.values, b.test.values)

    def test_too_small_errors(self):
        ds = make_regression(n=4)
        with pytest.raises(DatasetError, match="at least 5"):
            train_test_split(ds, 0.2, seed=0)

    def test_partition_is_disjoint_and_complete(self):
        ds = make_regression(n=37, d=1)
        pair = train_test_split(ds, 0.2, seed=3)
        train_vals = set(pair.train.values[:, 0])
        test_vals = set(pair.test.values[:, 0])
        assert not train_vals & test_vals
        assert len(train_vals | test_vals) == 37

    def test_stratified_keeps_both_classes(self):
        ds = make_classification(n=40, seed=5)
        for seed in range(20):
            pair = train_test_split(ds, 0.2, seed=seed)
            assert np.unique(pair.test.target).size == 2


class TestKFold:
    def test_equal_fold_sizes(self):
        ds = make_regression(n=10)
        folds = k_fold_partition(ds, 5, seed=0)
        assert [f.n for f in folds] == [2, 2, 2, 2, 2]

    def test_uneven_fold_sizes(self):
        ds = make_regression(n=11)
        folds = k_fold_partition(ds, 5, seed=0)
        assert sorted(f.n for f in folds) == [2, 2, 2, 2, 3]

    def test_k_out_of_range(self):
        ds = make_regression(n=10)
        with pytest.raises(DatasetError):
            k_fold_partition(ds, 1, seed=0)
        with pytest.raises(DatasetError):
            k_fold_partition(ds, 11, seed=0)

    def test_every_row_in_exactly_one_fold(self):
        ds = make_regression(n=23)
        folds = k_fold_indices(ds, 4, seed=2)
        combined = np.sort(np.concatenate(folds))
        assert np.array_equal(combined, np.arange(23))

    def test_single_class_fold_error_names_fold(self):
        # 6/4 class balance dealt into 5 folds leaves fold 0 single-class
        values = np.arange(10, dtype=float).reshape(10, 1)
        target = np.array([0] * 6 + [1] * 4)
        ds = Dataset(
            names=("x",),
            kinds=(FeatureKind.continuous(),),
            values=values,
            target=target,
            task=TaskKind.CLASSIFICATION,
        )
        with pytest.raises(DatasetError, match="fold 0"):
            k_fold_indices(ds, 5, seed=0)

    def test_stratified_folds_have_both_classes(self):
        ds = make_classification(n=60, seed=3)
        for fold in k_fold_partition(ds, 6, seed=1):
            assert np.unique(fold.target).size == 2


class TestPermute:
    def test_preserves_multiset(self):
        ds = make_regression(n=30)
        out = permute_column(ds, 0, seed=5)
        assert sorted(out.values[:, 0]) == sorted(ds.values[:, 0])

    def test_single_row_identity(self):
        ds = Dataset(
            names=("x",),
            kinds=(FeatureKind.continuous(),),
            values=np.array([[3.0]]),
            target=np.array([1.0]),
            task=TaskKind.REGRESSION,
        )
        out = permute_column(ds, 0, seed=9)
        assert np.array_equal(out.values, ds.values)

    def test_other_columns_untouched(self):
        ds = make_regression(n=40, d=3)
        out = permute_column(ds, 0, seed=11)
        assert np.array_equal(out.values[:, 1], ds.values[:, 1])
        assert np.array_equal(out.values[:, 2], ds.values[:, 2])
        assert np.array_equal(out.target, ds.target)

    def test_deterministic(self):
        ds = make_regression(n=25)
        a = permute_column(ds, 1, seed=4)
        b = permute_column(ds, 1, seed=4)
        assert np.array_equal(a.values, b.values)

    def test_out_of_range(self):
        ds = make_regression(n=10)
        with pytest.raises(DatasetError):
            permute_column(ds, 3, seed=0)


class TestProject:
    def test_order_preserved(self):
        ds = make_regression(n=10, d=5)
        out = project_columns(ds, [3, 0])
        assert out.names == ("x3", "x0")
        assert np.array_equal(out.values[:, 0], ds.values[:, 3])
        assert np.array_equal(out.values[:, 1], ds.values[:, 0])

    def test_duplicates_error(self):
        ds = make_regression(n=10, d=3)
        with pytest.raises(DatasetError, match="duplicate"):
            project_columns(ds, [0, 0])

    def test_empty_error(self):
        ds = make_regression(n=10, d=3)
        with pytest.raises(DatasetError, match="non-empty"):
            project_columns(ds, [])

    def test_identity(self):
        ds = make_regression(n=10, d=4)
        out = project_columns(ds, list(range(4)))
        assert out.names == ds.names
        assert np.array_equal(out.values, ds.values)


class TestTakeRows:
    def test_subset(self):
        ds = make_regression(n=10)
        out = take_rows(ds, [2, 5])
        assert out.n == 2
        assert np.array_equal(out.values[0], ds.values[2])

    def test_bounds(self):
        ds = make_regression(n=10)
        with pytest.raises(DatasetError):
            take_rows(ds, [10])
        with pytest.raises(DatasetError):
            take_rows(ds, [])


class TestInvariants:
    def test_values_are_immutable(self):
        ds = make_regression(n=10)
        with pytest.raises(ValueError):
            ds.values[0, 0] = 99.0

    def test_missing_values_rejected_at_construction(self):
        with pytest.raises(DatasetError, match="finite"):
            Dataset(
                names=("x",),
                kinds=(FeatureKind.continuous(),),
                values=np.array([[np.nan]]),
                target=np.array([1.0]),
                task=TaskKind.REGRESSION,
            )

    @given(st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=25, deadline=None)
    def test_permute_column_multiset_property(self, seed):
        ds = make_regression(n=17, d=2, seed=1)
        out = permute_column(ds, 0, seed=seed)
        assert sorted(out.values[:, 0]) == sorted(ds.values[:, 0])
        assert np.array_equal(out.values[:, 1], ds.values[:, 1])

    @given(st.integers(min_value=0, max_value=2**31), st.integers(min_value=2, max_value=8))
    @settings(max_examples=25, deadline=None)
    def test_k_fold_covers_rows_property(self, seed, k):
        ds = make_regression(n=29)
        folds = k_fold_indices(ds, k, seed=seed)
        combined = np.sort(np.concatenate(folds))
        assert np.array_equal(combined, np.arange(29))
        sizes = sorted(len(f) for f in folds)
        assert sizes[-1] - sizes[0] <= 1
