import numpy as np
import pytest

from ppfs import (
    Dataset,
    FeatureKind,
    LearnerSpec,
    ModelError,
    TaskKind,
    empirical_risk,
    fit,
    per_sample_loss,
    predict,
    render_tree,
)

from conftest import make_classification, make_regression


def small_ds(values, target, task, kinds=None):
    values = np.asarray(values, dtype=float)
    d = values.shape[1]
    return Dataset(
        names=tuple(f"x{i}" for i in range(d)),
        kinds=kinds or tuple(FeatureKind.continuous() for _ in range(d)),
        values=values,
        target=np.asarray(target),
        task=task,
        target_labels=("0", "1") if task is TaskKind.CLASSIFICATION else None,
    )


class TestFit:
    def test_separable_by_one_split(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 1, (60, 1))
        y = (x[:, 0] > 0.5).astype(np.int64)
        ds = small_ds(x, y, TaskKind.CLASSIFICATION)
        model = fit(LearnerSpec(max_depth=2), ds)
        pred = predict(model, ds)
        assert np.mean(np.argmax(pred, axis=1) == y) == 1.0

    def test_constant_regression_target_single_leaf(self):
        ds = small_ds([[1.0], [2.0], [3.0]], [4.0, 4.0, 4.0], TaskKind.REGRESSION)
        model = fit(LearnerSpec(), ds)
        assert model.n_nodes == 1
        assert predict(model, ds).tolist() == [4.0, 4.0, 4.0]

    def test_deterministic_structure(self):
        ds = make_classification(n=80, seed=2)
        a = fit(LearnerSpec(), ds)
        b = fit(LearnerSpec(), ds)
        assert np.array_equal(a.feature, b.feature)
        assert np.array_equal(a.threshold, b.threshold)
        assert np.array_equal(a.leaf_value, b.leaf_value)

    def test_empty_training_set_rejected(self):
        # an empty Dataset cannot be constructed, so drive the guard with a stub
        class Hollow:
            n = 0

        with pytest.raises(ModelError, match="empty"):
            fit(LearnerSpec(), Hollow())

    def test_single_class_train_constant_leaf(self):
        ds = small_ds([[0.0], [1.0], [2.0]], [1, 1, 1], TaskKind.CLASSIFICATION)
        model = fit(LearnerSpec(), ds)
        assert model.n_nodes == 1
        pred = predict(model, ds)
        assert np.allclose(pred, [[0.0, 1.0]] * 3)

    def test_depth_respects_max_depth(self):
        ds = make_classification(n=200, seed=4)
        model = fit(LearnerSpec(max_depth=3), ds)
        assert model.depth() <= 3

    def test_categorical_codes_split(self):
        # an encoded 3-level column is threshold-splittable
        codes = np.array([[0.0], [1.0], [2.0], [0.0], [1.0], [2.0]])
        y = np.array([0, 0, 1, 0, 0, 1])
        ds = small_ds(codes, y, TaskKind.CLASSIFICATION,
                      kinds=(FeatureKind.categorical(3),))
        model = fit(LearnerSpec(), ds)
        pred = predict(model, ds)
        assert np.mean(np.argmax(pred, axis=1) == y) == 1.0

    def test_invalid_spec(self):
        with pytest.raises(ModelError):
            LearnerSpec(min_samples_split=1)
        with pytest.raises(ModelError):
            LearnerSpec(max_depth=0)
        with pytest.raises(ModelError):
            LearnerSpec(kind="svm")


class TestPredict:
    def test_single_leaf_regression_constant(self):
        ds = small_ds([[1.0], [2.0]], [3.0, 5.0], TaskKind.REGRESSION)
        model = fit(LearnerSpec(max_depth=None, min_samples_split=3), ds)
        assert model.n_nodes == 1
        out = predict(model, np.array([[100.0], [-7.0]]))
        assert out.tolist() == [4.0, 4.0]

    def test_leaf_probabilities_are_frequencies(self):
        ds = small_ds([[1.0], [1.0], [1.0]], [0, 0, 1], TaskKind.CLASSIFICATION)
        model = fit(LearnerSpec(), ds)
        pred = predict(model, ds)
        assert np.allclose(pred, [[2 / 3, 1 / 3]] * 3)

    def test_zero_rows(self):
        ds = make_regression(n=20, d=2)
        model = fit(LearnerSpec(), ds)
        out = predict(model, np.empty((0, 2)))
        assert out.shape == (0,)

    def test_column_mismatch(self):
        ds = make_regression(n=20, d=2)
        model = fit(LearnerSpec(), ds)
        with pytest.raises(ModelError, match="columns"):
            predict(model, np.zeros((4, 3)))

    def test_probability_rows_valid(self):
        ds = make_classification(n=150, seed=8)
        model = fit(LearnerSpec(), ds)
        pred = predict(model, ds)
        assert np.all(pred >= 0.0) and np.all(pred <= 1.0)
        assert np.allclose(pred.sum(axis=1), 1.0, atol=1e-12)


class TestLoss:
    def test_regression_examples(self):
        out = per_sample_loss(TaskKind.REGRESSION, [1.0, 2.0], [1.0, 4.0])
        assert out.tolist() == [0.0, 4.0]

    def test_certain_correct_prediction_clipped(self):
        out = per_sample_loss(TaskKind.CLASSIFICATION, [[0.0, 1.0]], [1])
        assert out[0] == pytest.approx(1e-15, rel=0.2)

    def test_half_probability(self):
        out = per_sample_loss(TaskKind.CLASSIFICATION, [[0.5, 0.5]], [0])
        assert out[0] == pytest.approx(np.log(2))

    def test_wrong_certain_prediction_is_finite(self):
        out = per_sample_loss(TaskKind.CLASSIFICATION, [[1.0, 0.0]], [1])
        assert np.isfinite(out[0])
        assert out[0] <= -np.log(1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ModelError, match="length"):
            per_sample_loss(TaskKind.REGRESSION, [1.0], [1.0, 2.0])

    def test_bad_probability_rows(self):
        with pytest.raises(ModelError, match="sum to 1"):
            per_sample_loss(TaskKind.CLASSIFICATION, [[0.7, 0.7]], [0])


class TestRisk:
    def test_mean(self):
        assert empirical_risk(np.array([0.0, 4.0])) == 2.0

    def test_zero(self):
        assert empirical_risk(np.zeros(5)) == 0.0

    def test_log2(self):
        assert empirical_risk(np.array([np.log(2), np.log(2)])) == pytest.approx(np.log(2))

    def test_empty_errors(self):
        with pytest.raises(ModelError, match="empty"):
            empirical_risk(np.array([]))

    def test_within_range_of_losses(self):
        rng = np.random.default_rng(0)
        loss = rng.uniform(0, 5, 40)
        r = empirical_risk(loss)
        assert loss.min() <= r <= loss.max()


class TestRegressionInvariant:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_train_risk_never_exceeds_target_variance(self, seed):
        ds = make_regression(n=120, d=4, seed=seed, signal=False)
        model = fit(LearnerSpec(max_depth=4), ds)
        risk = empirical_risk(per_sample_loss(TaskKind.REGRESSION, predict(model, ds), ds.target))
        assert risk <= np.var(ds.target) + 1e-12


class TestRender:
    def test_render_mentions_names_and_leaves(self):
        ds = make_classification(n=40, seed=1)
        model = fit(LearnerSpec(max_depth=2), ds)
        text = render_tree(model, ds.names)
        assert "x0" in text or "leaf" in text
        assert "leaf" in text
