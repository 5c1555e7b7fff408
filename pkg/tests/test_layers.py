import io
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from irrepcore import (DenseParams, IrrepFeatures, TensorParams, activation,
                       dense_apply, dense_init, tensor_apply,
                       tensor_dense_apply, tensor_init, transform, wigner_d,
                       GroupElement)
from irrepcore.layers import (activation_kinds, read_params, scalar_activation,
                              tensor_paths, write_params)


def vector_feature(v, l=1):
    data = np.zeros((1, (l + 1) ** 2, 1))
    data[0, 1:4, 0] = v
    return IrrepFeatures(data)


def ones_paths(l_x, l_y, l_z, f=1, layout_x="compact", layout_y="compact"):
    init = tensor_init(l_x, l_y, l_z, f, layout_x, layout_y)
    return TensorParams(
        l_x=l_x, l_y=l_y, l_z=l_z, f=f, layout_x=layout_x, layout_y=layout_y,
        path_weights={k: np.ones(f) for k in init.path_weights},
    )


# -- activations ---------------------------------------------------------------


def test_relu_gate_zeroes_whole_channel(rng):
    data = rng.standard_normal((2, 9, 3))
    data[0, 0, :] = [-1.0, 2.0, 0.0]
    x = IrrepFeatures(data)
    y = activation(x, "relu")
    assert not y.data[:, :, 0].any()
    np.testing.assert_array_equal(y.data[:, :, 1], x.data[:, :, 1])
    assert not y.data[:, :, 2].any()  # gate at exactly 0 is 0


def test_swish_gate_halves_at_zero(rng):
    data = rng.standard_normal((2, 4, 2))
    data[0, 0, :] = 0.0
    x = IrrepFeatures(data)
    y = activation(x, "swish")
    np.testing.assert_allclose(y.data, 0.5 * x.data, atol=1e-15)


@pytest.mark.parametrize("kind", activation_kinds())
def test_scalar_reduction_for_every_kind(kind, rng):
    values = rng.standard_normal((1, 1, 16))
    x = IrrepFeatures(values)
    y = activation(x, kind)
    np.testing.assert_allclose(
        y.data, scalar_activation(values, kind), atol=1e-15
    )


@settings(max_examples=100, deadline=None)
@given(st.floats(-30, 30))
def test_gate_identity(s):
    for kind in activation_kinds():
        arr = np.array([s])
        gated = activation(IrrepFeatures(arr[None, None, :]), kind).data[0, 0, 0]
        assert gated == pytest.approx(float(scalar_activation(arr, kind)[0]),
                                      abs=1e-15)


def test_unknown_kind():
    with pytest.raises(ValueError, match="unknown activation"):
        activation(IrrepFeatures(np.zeros((1, 1, 1))), "tanhh")


# -- dense ----------------------------------------------------------------------


def test_dense_init_deterministic_and_counts():
    a = dense_init(9, 2, 4, 6, "general")
    b = dense_init(9, 2, 4, 6, "general")
    assert sorted(a.weights) == sorted(b.weights)
    for key in a.weights:
        assert np.array_equal(a.weights[key], b.weights[key])
    assert len(a.weights) == 6  # 2 (L+1) matrices
    assert len(dense_init(9, 2, 4, 6, "compact").weights) == 3  # L+1
    assert not a.bias.any()
    bound = sqrt(3.0 / 4)
    assert all(np.abs(w).max() <= bound for w in a.weights.values())


def test_dense_apply_worked_example():
    weights = {key: np.array([[2.0]]) for key in ((0, 1), (0, -1), (1, 1), (1, -1))}
    params = DenseParams(layout="general", max_degree=1, f_in=1, f_out=1,
                         weights=weights, bias=np.array([3.0]))
    data = np.zeros((2, 4, 1))
    data[0, 0, 0] = 1.0       # scalar
    data[1, 1, 0] = 1.0       # odd vector x-component
    y = dense_apply(params, IrrepFeatures(data))
    assert y.data[0, 0, 0] == 5.0
    np.testing.assert_array_equal(y.data[1, 1:4, 0], [2.0, 0.0, 0.0])


def test_dense_apply_zero_input_leaves_bias():
    params = dense_init(1, 2, 3, 5)
    params = DenseParams(layout="general", max_degree=2, f_in=3, f_out=5,
                         weights=params.weights, bias=np.arange(5.0))
    y = dense_apply(params, IrrepFeatures.zeros(2, 3))
    np.testing.assert_array_equal(y.data[0, 0, :], np.arange(5.0))
    assert not y.data[0, 1:, :].any() and not y.data[1].any()


def test_dense_reduces_to_affine_map_for_scalars(rng):
    params = dense_init(4, 0, 6, 3, "compact")
    params = DenseParams(layout="compact", max_degree=0, f_in=6, f_out=3,
                         weights=params.weights, bias=rng.standard_normal(3))
    x = rng.standard_normal((1, 1, 6))
    y = dense_apply(params, IrrepFeatures(x))
    np.testing.assert_allclose(
        y.data[0, 0], x[0, 0] @ params.weights[(0, 1)] + params.bias, atol=1e-15
    )


def test_dense_linearity(rng):
    params = dense_init(2, 3, 4, 4)
    zero_bias = params  # dense_init biases are zero already
    a, b = 0.7, -1.3
    x = IrrepFeatures(rng.standard_normal((2, 16, 4)))
    y = IrrepFeatures(rng.standard_normal((2, 16, 4)))
    lhs = dense_apply(zero_bias, IrrepFeatures(a * x.data + b * y.data))
    rhs = a * dense_apply(zero_bias, x).data + b * dense_apply(zero_bias, y).data
    assert np.abs(lhs.data - rhs).max() < 1e-12


def test_dense_shape_mismatch(rng):
    params = dense_init(0, 2, 4, 4)
    with pytest.raises(ValueError, match="feature count"):
        dense_apply(params, IrrepFeatures(rng.standard_normal((2, 9, 3))))
    with pytest.raises(ValueError, match="do not match"):
        dense_apply(params, IrrepFeatures(rng.standard_normal((1, 9, 4))))


# -- tensor ---------------------------------------------------------------------


def test_tensor_worked_vector_example(table8, rng):
    v = rng.standard_normal(3)
    x = vector_feature(v)
    params = ones_paths(1, 1, 2)
    z = tensor_apply(params, table8, x, x, 2)
    assert z.layout == "general"
    assert z.data[0, 0, 0] == pytest.approx((v @ v) / sqrt(3), rel=1e-14)
    assert np.abs(z.block(1, 1)).max() < 1e-15  # (v x v)/sqrt(2) = 0
    assert not z.block(1, -1).any()
    vx, vy, vz = v
    expected = np.array([
        vx * vx - vy * vy, 2 * vx * vy, 2 * vx * vz, 2 * vy * vz,
        (2 * vz * vz - vx * vx - vy * vy) / sqrt(3),
    ]) / sqrt(2)
    np.testing.assert_allclose(z.block(2, 1)[0, :, 0], expected, atol=1e-14)


def test_tensor_scalar_coupling_is_elementwise_product(table8, rng):
    x = IrrepFeatures(rng.standard_normal((1, 1, 5)))
    y = IrrepFeatures(rng.standard_normal((1, 1, 5)))
    w = rng.standard_normal(5)
    params = TensorParams(l_x=0, l_y=0, l_z=0, f=5, layout_x="compact",
                          layout_y="compact",
                          path_weights={(0, 1, 0, 1, 0, 1): w})
    z = tensor_apply(params, table8, x, y, 0)
    assert z.layout == "compact"
    np.testing.assert_allclose(
        z.data[0, 0], w * x.data[0, 0] * y.data[0, 0], atol=1e-15
    )


def test_tensor_bilinear(table8, rng):
    params = tensor_init(2, 2, 2, 3)
    x = IrrepFeatures(rng.standard_normal((2, 9, 3)))
    y = IrrepFeatures(rng.standard_normal((2, 9, 3)))
    z = IrrepFeatures(rng.standard_normal((2, 9, 3)))
    a, b = 0.6, -2.1
    lhs = tensor_apply(params, table8, x,
                       IrrepFeatures(a * y.data + b * z.data), 2)
    rhs = (a * tensor_apply(params, table8, x, y, 2).data
           + b * tensor_apply(params, table8, x, z, 2).data)
    assert np.abs(lhs.data - rhs).max() < 1e-12
    zero = tensor_apply(params, table8, x, IrrepFeatures.zeros(2, 3), 2)
    assert not zero.data.any()


def test_tensor_path_parity_bookkeeping():
    paths = tensor_paths(2, 2, 4, "compact", "compact")
    assert paths  # non-empty
    for a, alpha, b, beta, c, gamma in paths:
        assert alpha == (-1) ** a and beta == (-1) ** b
        assert gamma == alpha * beta  # parities multiply
        assert abs(a - b) <= c <= a + b
    # general inputs carry both parities per degree
    gen = tensor_paths(1, 1, 1, "general", "general")
    assert {(alpha, beta) for _, alpha, _, beta, _, _ in gen} == {
        (1, 1), (1, -1), (-1, 1), (-1, -1)
    }


def test_tensor_pseudovector_output(table8, rng):
    # two odd vectors coupled into c=1 land in the even (pseudovector) row
    u, v = rng.standard_normal(3), rng.standard_normal(3)
    params = ones_paths(1, 1, 1)
    z = tensor_apply(params, table8, vector_feature(u), vector_feature(v), 1)
    assert z.layout == "general"
    np.testing.assert_allclose(
        z.block(1, 1)[0, :, 0], np.cross(u, v) / sqrt(2), atol=1e-14
    )
    inv = GroupElement.inversion()
    zi = transform(z, inv, wigner_d(inv, 1, table8))
    np.testing.assert_array_equal(zi.block(1, 1), z.block(1, 1))
    np.testing.assert_array_equal(zi.block(1, -1), -np.asarray(z.block(1, -1)))


def test_tensor_compact_output_only_when_no_pseudo_paths(table8, rng):
    x = IrrepFeatures(rng.standard_normal((1, 4, 2)))
    z0 = tensor_apply(ones_paths(1, 1, 0, f=2), table8, x, x, 0)
    assert z0.layout == "compact"
    z2 = tensor_apply(ones_paths(1, 1, 2, f=2), table8, x, x, 2)
    assert z2.layout == "general"


def test_tensor_feature_count_mismatch(table8, rng):
    params = tensor_init(1, 1, 1, 2)
    x = IrrepFeatures(rng.standard_normal((2, 4, 2)))
    y = IrrepFeatures(rng.standard_normal((2, 4, 3)))
    with pytest.raises(ValueError, match="feature counts differ"):
        tensor_apply(params, table8, x, y, 1)


def test_tensor_init_fan_in_normalization():
    params = tensor_init(1, 1, 1, 4, "general", "general")
    gamma_plus_paths = [k for k in params.path_weights if k[4] == 1 and k[5] == 1]
    n = len(gamma_plus_paths)
    for key in gamma_plus_paths:
        np.testing.assert_allclose(params.path_weights[key], 1 / sqrt(n))


def test_tensor_dense_is_the_composition(table8, rng):
    f = 3
    p1 = dense_init(1, 2, f, f)
    p2 = dense_init(2, 2, f, f)
    pt = tensor_init(2, 2, 2, f)
    x = IrrepFeatures(rng.standard_normal((2, 9, f)))
    expected = tensor_apply(pt, table8, dense_apply(p1, x), dense_apply(p2, x), 2)
    got = tensor_dense_apply(p1, p2, pt, table8, x, 2)
    np.testing.assert_array_equal(got.data, expected.data)
    # identity-like projections reduce to tensor_apply(x, x)
    eye = {key: np.ones((1, 1)) for key in p1.weights}
    pid = DenseParams(layout="general", max_degree=2, f_in=1, f_out=1,
                      weights=eye, bias=np.zeros(1))
    xs = IrrepFeatures(rng.standard_normal((2, 9, 1)))
    pt1 = tensor_init(2, 2, 2, 1)
    np.testing.assert_allclose(
        tensor_dense_apply(pid, pid, pt1, table8, xs, 2).data,
        tensor_apply(pt1, table8, xs, xs, 2).data, atol=1e-15,
    )
    zero = tensor_dense_apply(p1, p2, pt, table8, IrrepFeatures.zeros(2, f), 2)
    assert not zero.data.any()


def test_params_blob_round_trips(rng):
    dense = dense_init(5, 2, 3, 4)
    buf = io.BytesIO()
    write_params(dense, buf)
    raw = buf.getvalue()
    assert raw[:4] == b"E3PR"
    restored = read_params(io.BytesIO(raw))
    assert isinstance(restored, DenseParams)
    for key in dense.weights:
        assert np.array_equal(restored.weights[key], dense.weights[key])
    assert np.array_equal(restored.bias, dense.bias)

    tensor = tensor_init(2, 1, 2, 6, "general", "compact")
    buf = io.BytesIO()
    write_params(tensor, buf)
    restored = read_params(io.BytesIO(buf.getvalue()))
    assert isinstance(restored, TensorParams)
    assert restored.layout_y == "compact"
    for key in tensor.path_weights:
        assert np.array_equal(restored.path_weights[key], tensor.path_weights[key])
