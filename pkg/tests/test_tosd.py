import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sskcsi import analytic, tosd
from sskcsi.channel import ChannelEstimate, estimate_channel, sample_channel
from sskcsi.config import SystemConfig
from sskcsi.errors import ConfigError


def test_encode_examples():
    # antennas are numbered from 0
    assert tosd.encode([0], 2) == 0
    assert tosd.encode([1, 1], 4) == 3
    assert tosd.encode([1, 0, 0], 8) == 4


def test_encode_wrong_length():
    with pytest.raises(ConfigError):
        tosd.encode([1, 0, 1], 4)


@given(st.integers(1, 6).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, 2**k - 1))))
def test_encode_decode_roundtrip(case):
    k, idx = case
    n_tx = 2**k
    assert tosd.encode(tosd.decode(idx, n_tx), n_tx) == idx


def test_noiseless_projection(rng):
    cfg = SystemConfig(n_tx=4, n_rx=2, snr_db=400.0)
    h = sample_channel(cfg, rng)
    rho = tosd.observe(2, h, cfg, rng)
    expected = np.zeros_like(h)
    expected[2] = h[2]
    assert np.allclose(rho, expected, atol=1e-15)


def test_projection_statistics(rng):
    cfg = SystemConfig(n_tx=2, n_rx=1, snr_db=3.0)
    n = 10**6
    h = np.broadcast_to(np.array([[0.8 - 0.3j], [0.1 + 0.5j]]), (n, 2, 1))
    rho = tosd.observe(np.zeros(n, dtype=int), h, cfg, rng)
    idle = rho[:, 1, 0]
    assert np.var(idle) == pytest.approx(2 * cfg.noise_psd, rel=0.01)
    se = math.sqrt(2 * cfg.noise_psd / n)
    assert abs(rho[:, 0, 0].mean() - (0.8 - 0.3j)) < 3 * se * math.sqrt(2)


def test_metrics_noiseless_pcsi(rng):
    cfg = SystemConfig(n_tx=4, n_rx=2, snr_db=400.0)
    h = sample_channel(cfg, rng)
    rho = tosd.observe(1, h, cfg, rng)
    d = tosd.decision_metrics(rho, ChannelEstimate(h, 0.0), cfg)
    energy = np.sum(np.abs(h) ** 2, axis=-1)
    assert d[1] == pytest.approx(0.5 * energy[1])
    for i in (0, 2, 3):
        assert d[i] == pytest.approx(-0.5 * energy[i])
        assert d[i] <= 0
    assert tosd.detect(d) == 1


def test_metrics_zero_estimate(rng):
    cfg = SystemConfig(n_tx=4, n_rx=2)
    h = sample_channel(cfg, rng)
    rho = tosd.observe(0, h, cfg, rng)
    assert np.all(tosd.decision_metrics(rho, np.zeros_like(h), cfg) == 0)


def test_metrics_shape_mismatch(rng):
    cfg = SystemConfig(n_tx=4, n_rx=2)
    with pytest.raises(ConfigError):
        tosd.decision_metrics(np.zeros((4, 2), complex), np.zeros((4, 1), complex), cfg)


def test_detect_examples():
    assert tosd.detect([0.3, -1.2]) == 0
    assert tosd.detect([0.5, 0.5]) == 0
    m = np.array([0.1, 2.0, -3.0, 1.9])
    assert tosd.detect(m) == tosd.detect(7.5 * m) == 1


@given(st.floats(0.01, 100.0))
def test_detection_scale_invariance(c):
    rng = np.random.default_rng(3)
    cfg = SystemConfig(n_tx=8, n_rx=2, n_pilots=3, snr_db=5.0)
    h = sample_channel(cfg, rng, (50,))
    est = estimate_channel(h, cfg, rng).gains
    rho = tosd.observe(rng.integers(0, 8, 50), h, cfg, rng)
    a = tosd.detect(tosd.decision_metrics(rho, est, cfg))
    b = tosd.detect(tosd.decision_metrics(c * rho, c * est, cfg))
    assert np.array_equal(a, b)


def test_high_snr_error_free(rng):
    cfg = SystemConfig(n_tx=2, n_rx=1, snr_db=60.0)
    errors, bits, sym = tosd.simulate_batch(cfg, 10**6, rng)
    assert sym / 10**6 < 1e-6


def test_zero_snr_uniform_guess(rng):
    cfg = SystemConfig(n_tx=4, n_rx=1, snr_db=-80.0)
    n = 200000
    _, _, sym = tosd.simulate_batch(cfg, n, rng)
    p = 1 - 1 / 4
    assert abs(sym / n - p) < 3 * math.sqrt(p * (1 - p) / n)


def test_metric_difference_matches_conditional_pep(rng):
    # one fixed channel draw, fresh noise and estimation error per trial
    cfg = SystemConfig(n_tx=2, n_rx=2, n_pilots=3, snr_db=6.0)
    h = np.array([[0.7 + 0.4j, -0.2 + 0.9j], [0.3 - 0.6j, 1.1 + 0.1j]])
    n = 10**6
    hb = np.broadcast_to(h, (n, 2, 2))
    est = estimate_channel(hb, cfg, rng)
    rho = tosd.observe(np.zeros(n, dtype=int), hb, cfg, rng)
    d = tosd.decision_metrics(rho, est, cfg)
    p_mc = np.mean(d[:, 0] - d[:, 1] < 0)
    e = np.abs(h) ** 2
    p = analytic.pep_conditional(e[0], e[1], analytic.cf_kernel(cfg))
    assert abs(p_mc - p) < 3 * math.sqrt(p * (1 - p) / n)


def test_simulate_batch_counts(rng):
    cfg = SystemConfig(n_tx=8, n_rx=1, n_pilots=1, snr_db=0.0)
    errors, bits, sym = tosd.simulate_batch(cfg, 1000, rng)
    assert bits == 3000
    assert sym <= errors <= 3 * sym
