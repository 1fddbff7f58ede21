import numpy as np
import pytest

from icingplant.fitting import Dataset, fit_mlp
from icingplant.fitting.mlp import (
    MLPNet,
    SearchSpace,
    TrainingProtocol,
    mvd_mlp_structure,
    small_search_space,
    tn_mlp_structure,
)
from icingplant.fitting.tables import VARIABLES


def test_zero_weight_zero_bias_network_predicts_zero():
    net = MLPNet((3, 4, 1), "relu", seed=0)
    for w, b in zip(net.weights, net.biases):
        w[:] = 0.0
        b[:] = 0.0
    x = np.random.default_rng(0).normal(size=(10, 3))
    assert np.all(net.predict(x) == 0.0)


def gradient_check(net, x, y, eps=1e-5, samples=6, seed=0):
    """Worst relative disagreement between backprop and central
    differences over randomly probed parameters.

    eps near cbrt(machine epsilon) balances truncation against roundoff;
    near-zero gradient pairs are skipped (pure roundoff there).
    """
    gw, gb = net.gradients(x, y)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for li in range(len(net.weights)):
        for _ in range(samples):
            i = int(rng.integers(net.weights[li].shape[0]))
            j = int(rng.integers(net.weights[li].shape[1]))
            orig = net.weights[li][i, j]
            net.weights[li][i, j] = orig + eps
            up = net.loss(x, y)
            net.weights[li][i, j] = orig - eps
            dn = net.loss(x, y)
            net.weights[li][i, j] = orig
            fd = (up - dn) / (2 * eps)
            an = gw[li][i, j]
            denom = max(abs(fd), abs(an))
            if denom > 1e-8:
                worst = max(worst, abs(fd - an) / denom)
        b = int(rng.integers(net.biases[li].shape[0]))
        orig = net.biases[li][b]
        net.biases[li][b] = orig + eps
        up = net.loss(x, y)
        net.biases[li][b] = orig - eps
        dn = net.loss(x, y)
        net.biases[li][b] = orig
        fd = (up - dn) / (2 * eps)
        an = gb[li][b]
        denom = max(abs(fd), abs(an))
        if denom > 1e-8:
            worst = max(worst, abs(fd - an) / denom)
    return worst


def draw_smooth_batch(net, rng, n=12, margin=1e-4, tries=50):
    """Probe batch away from relu kinks; finite differences are invalid
    across the non-differentiable points."""
    for _ in range(tries):
        x = rng.normal(size=(n, net.layer_sizes[0]))
        y = rng.normal(size=n)
        if net.activation != "relu" or net.min_abs_preactivation(x) > margin:
            return x, y
    raise AssertionError("no kink-free probe batch found")


def test_gradients_match_finite_differences_20_architectures():
    rng = np.random.default_rng(2024)
    space = SearchSpace()
    candidates = space.candidates()
    picks = rng.choice(len(candidates), size=20, replace=False)
    for t, pick in enumerate(picks):
        sizes, act = candidates[int(pick)]
        net = MLPNet((3, *sizes, 1), act, seed=t)
        x, y = draw_smooth_batch(net, rng)
        assert gradient_check(net, x, y) <= 1e-5, (sizes, act)


def test_training_reduces_loss():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(40, 2))
    y = x[:, 0] - 2.0 * x[:, 1]
    net = MLPNet((2, 5, 1), "tanh", seed=2)
    before = net.loss(x, y)
    net.train(x, y, learning_rate=0.05, epochs=500)
    assert net.loss(x, y) < 0.1 * before


def linear_target_dataset(n=60, seed=42):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 2.0, size=(n, len(VARIABLES)))
    x[:, VARIABLES.index("T_n")] = 3.0 * x[:, VARIABLES.index("T_w")] + 0.5
    return Dataset.from_matrix(x, provenance="synthetic")


def test_relu_1x2_fits_linear_target():
    """CV MSE within 1e-3 of the target variance; a closed-form linear
    fit shows zero is achievable, so this bounds the training budget."""
    ds = linear_target_dataset()
    space = SearchSpace(hidden_layers=(1,), neurons=(2,), activations=("relu",))
    _, report = fit_mlp(ds, "T_n", ("T_w",), space=space, seed=1)
    var = float(np.var(ds.column("T_n")))
    assert report.cv_mean <= 1e-3 * var


def test_grid_search_deterministic():
    ds = linear_target_dataset(n=30, seed=3)
    space = SearchSpace(hidden_layers=(1,), neurons=(2, 3), activations=("tanh",))
    p1, r1 = fit_mlp(ds, "T_n", ("T_w", "T_a"), space=space, seed=5)
    p2, r2 = fit_mlp(ds, "T_n", ("T_w", "T_a"), space=space, seed=5)
    x = np.column_stack([ds.column("T_w"), ds.column("T_a")])
    assert np.array_equal(p1.predict(x), p2.predict(x))
    assert r1.cv_scores == r2.cv_scores


def test_search_space_size_matches_grid():
    assert len(SearchSpace().candidates()) == (9 + 81 + 729) * 3
    assert len(small_search_space().candidates()) == (4 + 16) * 3


def test_published_structures():
    assert tn_mlp_structure() == ((10, 4), "sigmoid")
    assert mvd_mlp_structure() == ((2, 7), "relu")


def test_report_mae_bounded_by_rmse():
    ds = linear_target_dataset(n=30, seed=6)
    space = SearchSpace(hidden_layers=(1,), neurons=(3,), activations=("sigmoid",))
    _, report = fit_mlp(ds, "T_n", ("T_w",), space=space, seed=2)
    assert report.mae <= report.rmse + 1e-12
