""" Unit tests for glitchnet.tensor """

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from glitchnet import tensor as tc
from glitchnet.exceptions import DimensionError


def triple_loop_matmul(a, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.float64)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for p in range(a.shape[1]):
                out[i, j] += a[i, p] * b[p, j]
    return out


def test_default_precision_is_float32():
    assert tc.get_dtype() is np.float32
    assert tc.zeros((2, 3)).dtype == np.float32


def test_precision_context_restores_mode():
    with tc.precision("float64"):
        assert tc.tensor([1, 2]).dtype == np.float64
    assert tc.precision_name() == "float32"


def test_unknown_precision():
    with pytest.raises(ValueError, match="float16"):
        tc.set_precision("float16")


def test_tensor_from_flat_data_and_shape():
    t = tc.tensor(range(6), shape=(2, 3))
    assert t.shape == (2, 3)
    assert t[1, 0] == 3


@pytest.mark.parametrize("shape", [(), (0,), (2, 0), (3, -1)])
def test_invalid_shapes(shape):
    with pytest.raises(DimensionError):
        tc.as_shape(shape)


def test_element_count_must_match_shape():
    with pytest.raises(DimensionError, match="5"):
        tc.tensor(range(6), shape=(5,))


@given(st.lists(st.integers(1, 6), min_size=1, max_size=4).flatmap(
    lambda shape: st.tuples(st.just(tuple(shape)), st.tuples(*[st.integers(0, d - 1) for d in shape]))
))
def test_flat_index_is_row_major(case):
    shape, index = case
    assert tc.flat_index(index, shape) == np.ravel_multi_index(index, shape, order="C")


def test_flat_index_out_of_range():
    with pytest.raises(DimensionError):
        tc.flat_index((2, 0), (2, 3))


@pytest.mark.parametrize("index", [(1,), (0, 1, 2)])
def test_flat_index_rank_mismatch(index):
    with pytest.raises(DimensionError, match="coordinates"):
        tc.flat_index(index, (2, 3))


def test_matmul_hand_examples():
    np.testing.assert_array_equal(tc.matmul(tc.tensor([[1, 0], [0, 1]]), tc.tensor([[3, 4], [5, 6]])), [[3, 4], [5, 6]])
    np.testing.assert_array_equal(tc.matmul(tc.tensor([[1, 2]]), tc.tensor([[3], [4]])), [[11]])


def test_matmul_shape_mismatch_names_both_shapes():
    with pytest.raises(DimensionError, match=r"\(2, 3\).*\(2, 3\)"):
        tc.matmul(tc.zeros((2, 3)), tc.zeros((2, 3)))


@given(st.integers(1, 16), st.integers(1, 16), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_matmul_matches_triple_loop_float64(m, k, n, seed):
    rng = np.random.default_rng(seed)
    with tc.precision("float64"):
        a, b = tc.tensor(rng.normal(size=(m, k))), tc.tensor(rng.normal(size=(k, n)))
        np.testing.assert_allclose(tc.matmul(a, b), triple_loop_matmul(a, b), rtol=1e-12, atol=1e-12)


@given(st.integers(1, 16), st.integers(1, 16), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_matmul_matches_triple_loop_float32(m, k, n, seed):
    rng = np.random.default_rng(seed)
    a, b = tc.tensor(rng.uniform(0.5, 1.5, size=(m, k))), tc.tensor(rng.uniform(0.5, 1.5, size=(k, n)))
    np.testing.assert_allclose(tc.matmul(a, b), triple_loop_matmul(a, b), rtol=1e-5)


def test_matmul_identity():
    a = tc.tensor(np.random.default_rng(0).normal(size=(4, 4)))
    eye = tc.tensor(np.eye(4))
    np.testing.assert_array_equal(tc.matmul(eye, a), a)
    np.testing.assert_array_equal(tc.matmul(a, eye), a)


def test_elementwise_identities():
    x = tc.tensor(np.random.default_rng(1).normal(size=(3, 4)))
    np.testing.assert_array_equal(tc.elementwise("add", x, tc.zeros_like(x)), x)
    np.testing.assert_array_equal(tc.elementwise("scale", x, 1.0), x)
    np.testing.assert_array_equal(tc.elementwise("sub", x, x), np.zeros((3, 4)))
    np.testing.assert_array_equal(tc.elementwise("mul", x, x), x * x)


def test_elementwise_rejects_broadcasting():
    with pytest.raises(DimensionError):
        tc.elementwise("add", tc.zeros((2, 3)), tc.zeros((3,)))
    with pytest.raises(DimensionError):
        tc.elementwise("scale", tc.zeros((2, 3)), tc.zeros((2, 3)))


def test_reshape_round_trip():
    t = tc.tensor(range(6), shape=(2, 3))
    np.testing.assert_array_equal(tc.reshape(tc.reshape(t, (6,)), (2, 3)), t)
    with pytest.raises(DimensionError):
        tc.reshape(t, (5,))
