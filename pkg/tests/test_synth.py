import numpy as np
import pytest

from icingplant.fitting import DatasetError, synthesize_dataset
from icingplant.fitting.synth import (
    calibrated_latent_matrix,
    nearest_correlation_matrix,
    output_correlation,
)
from icingplant.fitting.tables import REFERENCE_CORRELATION, REFERENCE_STATS, VARIABLES


def test_same_seed_identical_dataset():
    a = synthesize_dataset(100, seed=5)
    b = synthesize_dataset(100, seed=5)
    assert np.array_equal(a.to_matrix(), b.to_matrix())


def test_different_seed_differs():
    a = synthesize_dataset(100, seed=5)
    b = synthesize_dataset(100, seed=6)
    assert not np.array_equal(a.to_matrix(), b.to_matrix())


def test_minimum_size():
    with pytest.raises(DatasetError):
        synthesize_dataset(5, seed=0)


def test_margins_match_quantile_targets(synth_10k):
    x = synth_10k.to_matrix()
    for i, name in enumerate(VARIABLES):
        ref = REFERENCE_STATS[name]
        targets = {"q25": ref[3], "q50": ref[4], "q75": ref[5]}
        q25, q50, q75 = np.quantile(x[:, i], [0.25, 0.5, 0.75])
        for got, want in zip((q25, q50, q75), targets.values()):
            assert abs(got - want) <= 0.05 * max(abs(want), 1e-9), (name, got, want)
        assert x[:, i].min() >= ref[2] - 1e-9
        assert x[:, i].max() <= ref[6] + 1e-9


def test_key_correlation_reproduced(synth_10k):
    x = synth_10k.to_matrix()
    c = np.corrcoef(x, rowvar=False)
    i, j = VARIABLES.index("MVD"), VARIABLES.index("Q_a")
    assert c[i, j] == pytest.approx(-0.83, abs=0.08)
    i, j = VARIABLES.index("LWC"), VARIABLES.index("Q_w")
    assert c[i, j] == pytest.approx(0.75, abs=0.08)


def test_full_correlation_matrix_close(synth_10k):
    c = np.corrcoef(synth_10k.to_matrix(), rowvar=False)
    assert np.max(np.abs(c - REFERENCE_CORRELATION)) < 0.06


def test_within_commissioning_envelope(synth_10k):
    assert synth_10k.provenance == "synthetic"
    x = synth_10k.to_matrix()
    for i, name in enumerate(VARIABLES):
        lo, hi = REFERENCE_STATS[name][2], REFERENCE_STATS[name][6]
        assert x[:, i].min() >= lo - 1e-9
        assert x[:, i].max() <= hi + 1e-9


def test_latent_calibration_monotone():
    """The attenuation-correcting map is monotone and reproduces the
    requested output correlation."""
    for target in (-0.83, -0.2, 0.0, 0.48, 0.75):
        rho = output_correlation("MVD", "Q_a", 0.0)
        assert rho == pytest.approx(0.0, abs=1e-9)
    lat = calibrated_latent_matrix()
    i, j = VARIABLES.index("MVD"), VARIABLES.index("Q_a")
    # latent must over-shoot the target to survive the margin attenuation
    assert lat[i, j] < -0.83
    got = output_correlation("MVD", "Q_a", lat[i, j])
    assert got == pytest.approx(-0.83, abs=2e-3)


def test_nearest_correlation_repair():
    c = np.array([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
    assert np.linalg.eigvalsh(c).min() < 0.0
    fixed = nearest_correlation_matrix(c)
    assert np.linalg.eigvalsh(fixed).min() >= -1e-9
    assert np.allclose(np.diag(fixed), 1.0)
    psd = np.eye(3)
    assert np.allclose(nearest_correlation_matrix(psd), psd)
