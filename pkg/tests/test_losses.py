""" Unit tests for glitchnet.losses """

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from glitchnet import tensor as tc
from glitchnet.exceptions import DimensionError, ValidationError
from glitchnet.gradcheck import numerical_gradient, relative_error
from glitchnet.layers import softmax
from glitchnet.losses import cross_entropy, one_hot, softmax_xent_grad


def test_perfect_prediction_has_zero_loss():
    labels = one_hot([0, 2], 3)
    assert cross_entropy(labels.copy(), labels).value == 0


def test_uniform_prediction_over_twenty_classes(float64):
    loss = cross_entropy(tc.tensor(np.full((1, 20), 0.05)), one_hot([7], 20))
    assert loss.value == pytest.approx(math.log(20), abs=1e-9)


def test_loss_sums_over_samples(float64):
    probs = tc.tensor([[0.2, 0.5, 0.3]])
    single = cross_entropy(probs, one_hot([1], 3)).value
    double = cross_entropy(tc.tensor(np.repeat(probs, 2, axis=0)), one_hot([1, 1], 3))
    assert double.value == 2 * single
    assert double.value == sum(double.per_sample)


def test_mean_reduction(float64):
    probs = tc.tensor([[0.2, 0.8], [0.6, 0.4]])
    labels = one_hot([1, 1], 2)
    assert cross_entropy(probs, labels, "mean").value == pytest.approx(cross_entropy(probs, labels).value / 2)


def test_zero_probability_is_clamped():
    loss = cross_entropy(tc.tensor([[1.0, 0.0]]), one_hot([1], 2))
    assert loss.value == pytest.approx(-math.log(1e-12))


def test_rows_must_be_distributions():
    with pytest.raises(ValidationError, match="Row 1"):
        cross_entropy(tc.tensor([[0.5, 0.5], [0.5, 0.6]]), one_hot([0, 1], 2))
    with pytest.raises(ValidationError):
        cross_entropy(tc.tensor([[0.5, 0.5]]), tc.tensor([[0.5, 0.5]]))
    with pytest.raises(DimensionError):
        cross_entropy(tc.tensor([[0.5, 0.5]]), one_hot([0], 3))


def test_one_hot_rejects_out_of_range_labels():
    with pytest.raises(ValidationError):
        one_hot([3], 3)


def test_fused_gradient_at_optimum_is_zero():
    labels = one_hot([0, 1], 2)
    assert not softmax_xent_grad(labels.copy(), labels).any()


def test_fused_gradient_matches_finite_differences(float64):
    rng = np.random.default_rng(5)
    logits = tc.tensor(rng.normal(size=(3, 5)))
    labels = one_hot([0, 4, 2], 5)
    analytic = softmax_xent_grad(softmax(logits), labels)
    numeric = numerical_gradient(lambda: cross_entropy(softmax(logits), labels).value, logits)
    assert relative_error(analytic, numeric) < 1e-6


def test_fused_gradient_mean_reduction_divides_by_batch(float64):
    probs = tc.tensor([[0.2, 0.8], [0.6, 0.4]])
    labels = one_hot([1, 0], 2)
    np.testing.assert_allclose(softmax_xent_grad(probs, labels, "mean"), softmax_xent_grad(probs, labels) / 2)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["sum", "mean"]))
def test_fused_gradient_rows_sum_to_zero(seed, reduction):
    rng = np.random.default_rng(seed)
    with tc.precision("float64"):
        probs = softmax(tc.tensor(rng.normal(scale=4.0, size=(6, 20))))
        grad = softmax_xent_grad(probs, one_hot(rng.integers(0, 20, size=6), 20), reduction)
        np.testing.assert_allclose(grad.sum(axis=1), 0.0, atol=1e-12)
