import numpy as np
import pytest

from src.errors import DimensionMismatch, EmptyScenarioSet, NonFiniteLoss
from src.nn import (KIND_ICNN, KIND_RELU, Batch, IcnnParams, ReluNetParams, SurrogateModel, TrainConfig,
                    encode_features, encode_scenarios, forward_icnn, forward_relu, grad_check, grid_search,
                    init_encoder, init_icnn, init_models, init_relu, predict_value, preset_for,
                    project_nonnegative, train, with_widths)
from src.nn.forward import encoder_forward, icnn_forward, relu_forward
from src.utils import named_rng
from tests.helpers import scenario_set_from_features, synthetic_dataset


def zero_icnn(x_dim, xi_dim, hidden):
    d0 = x_dim + xi_dim
    dims = list(hidden) + [1]
    skips = [np.zeros((w, d0)) for w in dims]
    biases = [np.zeros(w) for w in dims]
    weights = [np.zeros((dims[k + 1], dims[k])) for k in range(len(dims) - 1)]
    return IcnnParams(x_dim, xi_dim, weights, skips, biases)


def loop_relu_forward(p: ReluNetParams, z):
    h = list(z)
    for layer, (w, b) in enumerate(zip(p.weights, p.biases)):
        out = []
        for i in range(w.shape[0]):
            acc = b[i]
            for j in range(w.shape[1]):
                acc += w[i, j] * h[j]
            out.append(acc if layer == len(p.weights) - 1 else max(acc, 0.0))
        h = out
    return h[0]


def scenario_set(features, set_id="set"):
    return scenario_set_from_features(features, set_id)


# encoder

def test_single_scenario_encoding_is_psi2_of_psi1():
    enc = init_encoder(3, (5, 4, 2), named_rng("enc", 0))
    f = np.array([0.3, -1.2, 2.0])
    h1 = np.maximum(enc.psi1_weights[0] @ f + enc.psi1_biases[0], 0.0)
    h2 = np.maximum(enc.psi1_weights[1] @ h1 + enc.psi1_biases[1], 0.0)
    expected = np.maximum(enc.psi2_weights[0] @ h2 + enc.psi2_biases[0], 0.0)
    np.testing.assert_allclose(encode_scenarios(enc, scenario_set([f])), expected, rtol=0, atol=1e-14)


def test_encoding_ignores_scenario_order():
    enc = init_encoder(3, (8, 6, 4), named_rng("enc", 1))
    features = named_rng("features").normal(size=(10, 3))
    xi = encode_scenarios(enc, scenario_set(features))
    for seed in range(3):
        perm = named_rng("perm", seed).permutation(10)
        np.testing.assert_allclose(encode_scenarios(enc, scenario_set(features[perm])), xi, rtol=0, atol=1e-14)


def test_encoding_ignores_duplication():
    enc = init_encoder(3, (8, 6, 4), named_rng("enc", 2))
    features = named_rng("features", 2).normal(size=(7, 3))
    once = encode_features(enc, features)
    twice = encode_features(enc, np.vstack([features, features]))
    np.testing.assert_allclose(twice, once, rtol=0, atol=1e-12)


def test_batched_encoder_matches_single_set_encoding():
    enc = init_encoder(2, (4, 4, 3), named_rng("enc", 3))
    features = named_rng("features", 3).normal(size=(6, 2))
    xi, _ = encoder_forward(enc, features, np.array([2, 4]))
    np.testing.assert_allclose(xi[0], encode_features(enc, features[:2]), atol=1e-12)
    np.testing.assert_allclose(xi[1], encode_features(enc, features[2:]), atol=1e-12)


def test_encoder_errors():
    enc = init_encoder(3, (4, 4, 2), named_rng("enc", 4))
    with pytest.raises(EmptyScenarioSet):
        encode_features(enc, np.zeros((0, 3)))
    with pytest.raises(DimensionMismatch):
        encode_features(enc, np.zeros((2, 5)))


# decision networks

def test_zero_icnn_outputs_zero():
    assert forward_icnn(zero_icnn(3, 2, [4, 4]), np.ones(3), np.ones(2)) == 0.0


def test_icnn_without_hidden_weights_is_affine():
    p = init_icnn(3, 0, [5, 4], named_rng("affine"))
    p.weights = [np.zeros_like(w) for w in p.weights]
    rng = named_rng("affine-points")
    f0 = forward_icnn(p, np.zeros(3), None)
    for _ in range(3):
        a, b = rng.normal(size=3), rng.normal(size=3)
        lhs = forward_icnn(p, a + b, None) - f0
        rhs = (forward_icnn(p, a, None) - f0) + (forward_icnn(p, b, None) - f0)
        assert lhs == pytest.approx(rhs, abs=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_icnn_is_convex_in_x(seed):
    p = init_icnn(4, 3, [16, 8], named_rng("convex", seed))
    rng = named_rng("convex-points", seed)
    xi = rng.normal(size=3)
    for _ in range(100):
        x1, x2 = rng.normal(size=4) * 3, rng.normal(size=4) * 3
        lam = rng.uniform()
        mid = forward_icnn(p, lam * x1 + (1 - lam) * x2, xi)
        assert mid <= lam * forward_icnn(p, x1, xi) + (1 - lam) * forward_icnn(p, x2, xi) + 1e-9


def test_zero_relu_net_outputs_zero():
    p = ReluNetParams(2, 1, [np.zeros((3, 3)), np.zeros((1, 3))], [np.zeros(3), np.zeros(1)])
    assert forward_relu(p, [1.0, 2.0], [3.0]) == 0.0


def test_single_linear_layer_is_a_dot_product():
    p = ReluNetParams(2, 1, [np.array([[1.0, -2.0, 0.5]])], [np.array([0.25])])
    assert forward_relu(p, [3.0, 1.0], [4.0]) == pytest.approx(3.0 - 2.0 + 2.0 + 0.25)


@pytest.mark.parametrize("seed", range(5))
def test_relu_forward_matches_loop_implementation(seed):
    p = init_relu(3, 2, [7, 5], named_rng("loop", seed))
    z = named_rng("loop-input", seed).normal(size=5)
    assert forward_relu(p, z[:3], z[3:]) == pytest.approx(loop_relu_forward(p, z), abs=1e-12)


def test_forward_rejects_wrong_dimensions():
    with pytest.raises(DimensionMismatch):
        forward_icnn(init_icnn(2, 1, [3], named_rng("dims")), np.ones(3), np.ones(1))
    with pytest.raises(DimensionMismatch):
        forward_relu(init_relu(2, 1, [3], named_rng("dims")), np.ones(2), np.ones(2))


def test_predict_value_restores_units_and_sign():
    p = ReluNetParams(1, 0, [np.array([[2.0]])], [np.array([1.0])])
    model = SurrogateModel(KIND_RELU, None, p, target_mean=10.0, target_std=3.0)
    assert predict_value(model, [1.0], None) == pytest.approx(19.0)
    model.negated = True
    assert predict_value(model, [1.0], None) == pytest.approx(-19.0)


# projection

def test_projection_clamps_only_hidden_weights():
    p = init_icnn(2, 1, [4, 3], named_rng("proj"))
    p.weights = [-np.abs(w) - 0.1 for w in p.weights]
    q = project_nonnegative(p)
    assert all(np.all(w == 0.0) for w in q.weights)
    for a, b in zip(p.skips + p.biases, q.skips + q.biases):
        np.testing.assert_array_equal(a, b)


def test_projection_of_feasible_params_is_identity():
    p = init_icnn(2, 1, [4, 3], named_rng("proj", 1))
    q = project_nonnegative(p)
    for a, b in zip(p.arrays(), q.arrays()):
        np.testing.assert_array_equal(a, b)


def test_projection_distance_is_the_negative_part():
    p = init_icnn(2, 1, [6, 5], named_rng("proj", 2))
    p.weights = [named_rng("mixed", k).normal(size=w.shape) for k, w in enumerate(p.weights)]
    q = project_nonnegative(p)
    for w, v in zip(p.weights, q.weights):
        assert np.linalg.norm(w - v) == pytest.approx(np.linalg.norm(np.minimum(w, 0.0)))
    again = project_nonnegative(q)
    for a, b in zip(q.arrays(), again.arrays()):
        np.testing.assert_array_equal(a, b)


# gradients

def _away_from_kinks(decoder, batch, encoder=None, margin=1e-3) -> bool:
    pres = []
    if encoder is not None:
        xi, cache = encoder_forward(encoder, batch.features, batch.counts)
        pres += [cache["a1"], cache["a2"], cache["a3"]]
        z0 = np.hstack([batch.x, xi])
    else:
        z0 = batch.x
    if isinstance(decoder, IcnnParams):
        _, cache = icnn_forward(decoder, z0)
    else:
        _, cache = relu_forward(decoder, z0)
    pres += cache["pre"]
    return all(np.min(np.abs(a)) > margin for a in pres if a.size)


def _checkable_sample(kind, with_encoder, seed_base):
    for attempt in range(50):
        rng = named_rng("gradcheck", kind, seed_base, attempt)
        encoder, decoder = init_models(kind, 2, 2 if with_encoder else None, [5, 4], (4, 3, 2), seed=attempt)
        x = rng.normal(size=(4, 2))
        y = rng.normal(size=4)
        if with_encoder:
            counts = np.array([1, 3, 2, 2])
            batch = Batch(x=x, y=y, features=rng.normal(size=(int(counts.sum()), 2)), counts=counts)
        else:
            batch = Batch(x=x, y=y)
        if _away_from_kinks(decoder, batch, encoder):
            return encoder, decoder, batch
    raise AssertionError("no kink-free sample found")


def test_linear_network_gradients_are_exact():
    p = ReluNetParams(3, 0, [named_rng("lin").normal(size=(1, 3))], [np.array([0.2])])
    batch = Batch(x=named_rng("lin-x").normal(size=(5, 3)), y=named_rng("lin-y").normal(size=5))
    assert grad_check(KIND_RELU, p, batch, eps=1e-5) <= 1e-9


@pytest.mark.parametrize("kind", [KIND_ICNN, KIND_RELU])
@pytest.mark.parametrize("with_encoder", [False, True])
def test_backprop_matches_finite_differences(kind, with_encoder):
    encoder, decoder, batch = _checkable_sample(kind, with_encoder, 0)
    params = (encoder, decoder) if with_encoder else decoder
    assert grad_check(kind, params, batch, eps=1e-5) <= 1e-4


def test_grad_check_rejects_bad_eps():
    p = ReluNetParams(1, 0, [np.ones((1, 1))], [np.zeros(1)])
    with pytest.raises(ValueError):
        grad_check(KIND_RELU, p, Batch(x=np.ones((1, 1)), y=np.ones(1)), eps=1e-2)


# training

@pytest.mark.parametrize("kind", [KIND_RELU, KIND_ICNN])
def test_constant_target_is_learned(kind):
    dataset = synthetic_dataset(lambda x: 7.5, 60, 1, seed=1)
    _, decoder = init_models(kind, 1, None, [4], seed=0)
    config = TrainConfig(epochs=200, batch_size=4, learning_rate=0.1, optimizer="sgd", seed=0)
    result = train(kind, None, decoder, dataset, config, show_progress=False)
    assert result.val_mae <= 1e-3
    assert predict_value(result.model, [0.5], None) == pytest.approx(7.5, abs=1e-3)


def test_zero_learning_rate_changes_nothing():
    dataset = synthetic_dataset(lambda x: x.sum() ** 2, 40, 3, seed=2)
    _, decoder = init_models(KIND_ICNN, 3, None, [6], seed=1)
    config = TrainConfig(epochs=5, batch_size=8, learning_rate=0.0, seed=0)
    result = train(KIND_ICNN, None, decoder, dataset, config, show_progress=False)
    for a, b in zip(decoder.arrays(), result.model.decoder.arrays()):
        np.testing.assert_array_equal(a, b)
    assert result.best_epoch == 0
    assert all(h["val_mae"] == result.val_mae for h in result.history)


def test_training_is_deterministic():
    pool = scenario_set(named_rng("pool-features").normal(size=(6, 2)), "pool")
    dataset = synthetic_dataset(lambda x: x[0] - x[1], 30, 2, seed=3, pool_ids=("s0", "s3", "s5"))
    runs = []
    for _ in range(2):
        encoder, decoder = init_models(KIND_RELU, 2, 2, [5], (4, 4, 2), seed=4)
        config = TrainConfig(epochs=3, batch_size=7, learning_rate=1e-2, seed=9, dropout_rate=0.1)
        runs.append(train(KIND_RELU, encoder, decoder, dataset, config, pool, show_progress=False))
    a, b = runs
    for u, v in zip(a.model.decoder.arrays() + a.model.encoder.arrays(),
                    b.model.decoder.arrays() + b.model.encoder.arrays()):
        assert u.tobytes() == v.tobytes()


def test_trained_icnn_keeps_nonnegative_weights_and_convexity():
    pool = scenario_set(named_rng("pool-features", 1).normal(size=(5, 2)), "pool")
    dataset = synthetic_dataset(lambda x: abs(x[0] - 0.5) + x[1], 50, 2, seed=4, pool_ids=("s1", "s2"))
    encoder, decoder = init_models(KIND_ICNN, 2, 2, [8, 6], (4, 4, 3), seed=0)
    config = TrainConfig(epochs=10, batch_size=8, learning_rate=5e-2, optimizer="rmsprop", dropout_rate=0.2)
    model = train(KIND_ICNN, encoder, decoder, dataset, config, pool, show_progress=False).model
    assert all(np.all(w >= 0.0) for w in model.decoder.weights)
    xi = encode_scenarios(model.encoder, pool.subset(["s1", "s2"]))
    rng = named_rng("trained-convexity")
    for _ in range(1000):
        x1, x2, lam = rng.uniform(size=2), rng.uniform(size=2), rng.uniform()
        mid = forward_icnn(model.decoder, lam * x1 + (1 - lam) * x2, xi)
        chord = lam * forward_icnn(model.decoder, x1, xi) + (1 - lam) * forward_icnn(model.decoder, x2, xi)
        assert mid <= chord + 1e-9


def test_diverging_training_reports_diagnostics():
    dataset = synthetic_dataset(lambda x: 3.0 * x[0] + x[1], 20, 2, seed=5)
    _, decoder = init_models(KIND_RELU, 2, None, [4], seed=0)
    config = TrainConfig(epochs=50, batch_size=1, learning_rate=1e6, optimizer="sgd")
    with np.errstate(all="ignore"), pytest.raises(NonFiniteLoss) as info:
        train(KIND_RELU, None, decoder, dataset, config, show_progress=False)
    assert "epoch" in info.value.diagnostics


def test_training_rejects_mismatched_inputs():
    dataset = synthetic_dataset(lambda x: 1.0, 10, 3)
    _, decoder = init_models(KIND_RELU, 2, None, [4], seed=0)
    with pytest.raises(DimensionMismatch):
        train(KIND_RELU, None, decoder, dataset, TrainConfig(epochs=1), show_progress=False)
    with pytest.raises(ValueError):
        train(KIND_ICNN, None, decoder, synthetic_dataset(lambda x: 1.0, 10, 2), TrainConfig(epochs=1),
              show_progress=False)
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)


@pytest.mark.slow
def test_icnn_fits_l1_norm():
    dataset = synthetic_dataset(lambda x: np.abs(x).sum(), 2000, 4, seed=6)
    _, decoder = init_models(KIND_ICNN, 4, None, [32], seed=0)
    config = TrainConfig(epochs=60, batch_size=64, learning_rate=1e-2, seed=0)
    result = train(KIND_ICNN, None, decoder, dataset, config, show_progress=False)
    assert result.val_mae <= 0.05


# presets and search

def test_presets():
    assert preset_for(KIND_ICNN, "CFLP_10_10_100").hidden_dims == (512,)
    assert preset_for(KIND_RELU, "INVP_B_E_4") is preset_for(KIND_RELU, "INVP_I_H")
    assert preset_for(KIND_RELU, "SSLP_15_45").hidden_dims == (128,)
    with pytest.raises(KeyError):
        preset_for(KIND_ICNN, "CFLP_3_3")
    config = preset_for(KIND_ICNN, "SSLP_5_25").train_config(epochs=7, seed=2)
    assert (config.epochs, config.seed, config.optimizer) == (7, 2, "rmsprop")
    narrow = with_widths(preset_for(KIND_ICNN, "CFLP_10_10"), hidden_dims=[16])
    assert narrow.hidden_dims == (16,) and narrow.embed_dims == (512, 64, 16)


def test_grid_search_keeps_the_best_point():
    dataset = synthetic_dataset(lambda x: x[0] + 2 * x[1], 40, 2, seed=7)
    best, table = grid_search(KIND_RELU, dataset, None, TrainConfig(epochs=3, seed=0),
                              hidden_grid=(4, 8), lr_grid=(1e-2,), batch_grid=(8,), show_progress=False)
    assert len(table) == 2
    assert best.val_mae == table["val_mae"].min()
