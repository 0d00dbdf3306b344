import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from latenthealth import nn
from latenthealth.errors import ShapeError

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_dense_forward_examples():
    assert np.allclose(nn.dense_forward(nn.DenseLayer(np.eye(2), np.zeros(2)), [3, -1]), [3, -1])
    assert np.allclose(nn.dense_forward(nn.DenseLayer([[1, 1]], [1]), [2, 3]), [6])
    layer = nn.DenseLayer(np.zeros((3, 4)), np.full(3, 5.0))
    assert np.allclose(nn.dense_forward(layer, [1, -2, 3, 9]), [5, 5, 5])


def test_dense_forward_rejects_wrong_length():
    with pytest.raises(ShapeError):
        nn.dense_forward(nn.DenseLayer(np.eye(2), np.zeros(2)), [1, 2, 3])


def test_dense_layer_validation():
    with pytest.raises(ShapeError):
        nn.DenseLayer(np.eye(2), np.zeros(3))
    with pytest.raises(ValueError):
        nn.DenseLayer([[np.nan]], [0.0])


def test_relu_examples():
    assert np.array_equal(nn.relu([0.0, 0.0]), [0.0, 0.0])
    assert np.array_equal(nn.relu([-2.0, 3.0]), [0.0, 3.0])
    assert np.array_equal(nn.relu([1e-9, -1e-9]), [1e-9, 0.0])


@given(arrays(np.float64, st.integers(1, 20), elements=finite))
def test_relu_matches_max(x):
    assert np.array_equal(nn.relu(x), np.maximum(x, 0.0))


def test_mlp_forward_examples(rng):
    spec = nn.MlpSpec((3, 3), ("identity",))
    v = rng.normal(size=3)
    assert np.allclose(nn.mlp_forward(spec, [nn.DenseLayer(np.eye(3), np.zeros(3))], v)[-1], v)
    spec = nn.MlpSpec((2, 1), ("relu",))
    assert np.array_equal(nn.mlp_forward(spec, [nn.DenseLayer([[1, 1]], [0])], [-1, -1])[-1], [0.0])
    spec = nn.MlpSpec((256, 128, 32, 8))
    acts = nn.mlp_forward(spec, nn.init_mlp(spec, rng), rng.normal(size=256))
    assert [a.shape for a in acts] == [(256,), (128,), (32,), (8,)]


def test_mlp_forward_rejects_layer_mismatch(rng):
    spec = nn.MlpSpec((4, 3, 2))
    layers = nn.init_mlp(nn.MlpSpec((4, 5, 2)), rng)
    with pytest.raises(ShapeError):
        nn.mlp_forward(spec, layers, np.zeros(4))


def test_mlp_spec_validation():
    with pytest.raises(ValueError):
        nn.MlpSpec((4,))
    with pytest.raises(ValueError):
        nn.MlpSpec((4, 2), ("tanh",))
    with pytest.raises(ValueError):
        nn.MlpSpec((4, 2, 1), ("relu",))


def test_init_mlp_bounds(rng):
    spec = nn.MlpSpec((50, 20, 7), ("relu", "identity"))
    layers = nn.init_mlp(spec, rng)
    assert np.abs(layers[0].weights).max() <= np.sqrt(6 / 50)
    assert np.abs(layers[1].weights).max() <= np.sqrt(6 / 27)
    assert all(np.all(layer.bias == 0) for layer in layers)


def test_backward_identity_and_zero(rng):
    spec = nn.MlpSpec((3, 3), ("identity",))
    layers = [nn.DenseLayer(np.eye(3), np.zeros(3))]
    acts = nn.mlp_forward(spec, layers, rng.normal(size=3))
    g = rng.normal(size=3)
    _, gin = nn.mlp_backward(spec, layers, acts, g)
    assert np.allclose(gin, g)

    spec = nn.MlpSpec((5, 4, 3))
    layers = nn.init_mlp(spec, rng)
    acts = nn.mlp_forward(spec, layers, rng.normal(size=(6, 5)))
    grads, gin = nn.mlp_backward(spec, layers, acts, np.zeros((6, 3)))
    assert all(not dw.any() and not db.any() for dw, db in grads)
    assert not gin.any()


@pytest.mark.parametrize("seed", range(5))
def test_backward_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    spec = nn.MlpSpec((5, 4, 3, 2), ("relu", "relu", "identity"))
    layers = nn.init_mlp(spec, rng)
    layers = [nn.DenseLayer(l.weights, rng.normal(0, 0.3, l.out_dim)) for l in layers]
    x = rng.normal(size=(7, 5))
    target = rng.normal(size=(7, 2))

    def loss(flat):
        out = nn.mlp_forward(spec, nn.layers_from_flat(flat), x)[-1]
        return 0.5 * np.sum((out - target) ** 2)

    acts = nn.mlp_forward(spec, layers, x)
    grads, _ = nn.mlp_backward(spec, layers, acts, acts[-1] - target)
    analytic = [g for pair in grads for g in pair]
    numeric = nn.finite_difference_gradient(loss, nn.flatten_layers(layers), 1e-6)
    for a, n in zip(analytic, numeric):
        assert np.allclose(a, n, rtol=1e-4, atol=1e-7)


def test_backward_input_gradient(rng):
    spec = nn.MlpSpec((4, 3, 2), ("relu", "identity"))
    layers = nn.init_mlp(spec, rng)
    x = rng.normal(size=4)
    f = lambda v: float(np.sum(nn.mlp_forward(spec, layers, v)[-1] ** 2))
    acts = nn.mlp_forward(spec, layers, x)
    _, gin = nn.mlp_backward(spec, layers, acts, 2 * acts[-1])
    assert np.allclose(gin, nn.finite_difference_gradient(f, x, 1e-6), rtol=1e-5, atol=1e-8)


def test_adam_first_step():
    p, st_ = nn.adam_step([np.array(0.0)], [np.array(1.0)], nn.AdamState.zeros_like([np.array(0.0)]), 1e-3)
    assert st_.t == 1
    # bias-corrected m_hat = 1, v_hat = 1 so the step is lr / (1 + eps)
    assert p[0] == pytest.approx(-1e-3 / (1 + 1e-8), rel=1e-12)


def test_adam_zero_gradient_keeps_params(rng):
    params = [rng.normal(size=(3, 2)), rng.normal(size=3)]
    state = nn.AdamState.zeros_like(params)
    new, st2 = nn.adam_step(params, [np.zeros((3, 2)), np.zeros(3)], state, 0.01)
    assert all(np.array_equal(a, b) for a, b in zip(new, params))
    assert st2.t == 1


def test_adam_descends_quadratic():
    p = [np.array(3.0)]
    state = nn.AdamState.zeros_like(p)
    values = [float(p[0] ** 2)]
    for _ in range(2):
        p, state = nn.adam_step(p, [2 * p[0]], state, 0.1)
        values.append(float(p[0] ** 2))
    assert values[2] < values[1] < values[0]


def test_adam_rejects_nonfinite():
    with pytest.raises(ValueError):
        nn.adam_step([np.zeros(2)], [np.array([1.0, np.inf])], nn.AdamState.zeros_like([np.zeros(2)]), 0.1)


def test_finite_difference_examples():
    assert nn.finite_difference_gradient(lambda x: float(x[0] ** 2), np.array([3.0]))[0] == pytest.approx(6.0, abs=1e-6)
    assert np.allclose(nn.finite_difference_gradient(lambda x: 4.2, np.ones(3)), 0.0)
    x = np.random.default_rng(0).normal(size=6)
    assert np.allclose(nn.finite_difference_gradient(lambda v: float(np.sum(v)), x), 1.0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6)), min_size=1, max_size=3))
def test_flatten_round_trip(shapes):
    rng = np.random.default_rng(0)
    layers = [nn.DenseLayer(rng.normal(size=(o, i)), rng.normal(size=o)) for o, i in shapes]
    back = nn.layers_from_flat(nn.flatten_layers(layers))
    assert all(np.array_equal(a.weights, b.weights) and np.array_equal(a.bias, b.bias)
               for a, b in zip(layers, back))
