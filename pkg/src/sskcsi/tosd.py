"""TOSD-SSK transmitter, equivalent discrete receiver model and mismatched ML detector.

Antenna indices are zero-based. The receiver works on the projections
``rho[i, l]`` of receive antenna ``l``'s signal onto pulse ``i``; with
orthonormal pulses these are

    rho[i, l] = sqrt(Em) * alpha[n, l] * delta(i, n) + eta[i, l]

where ``n`` is the active antenna and ``eta`` is i.i.d. complex Gaussian with
total variance ``2 N0``. All functions broadcast over leading batch axes.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelEstimate, complex_normal, estimate_channel, sample_channel
from .config import SystemConfig
from .errors import ConfigError


def encode(bits, n_tx: int) -> np.ndarray:
    """Map words of ``log2(n_tx)`` bits (last axis, MSB first) to antenna indices."""
    bits = np.asarray(bits)
    k = n_tx.bit_length() - 1
    if bits.shape[-1:] != (k,):
        raise ConfigError(f"expected words of {k} bits for Nt={n_tx}, got shape {bits.shape}")
    weights = 1 << np.arange(k - 1, -1, -1)
    return bits.astype(np.int64) @ weights


def decode(index, n_tx: int) -> np.ndarray:
    """Inverse of :func:`encode`."""
    k = n_tx.bit_length() - 1
    index = np.asarray(index, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1)
    return (index[..., None] >> shifts) & 1


def observe(sent, truth: np.ndarray, cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Projections of the received signal when antenna ``sent`` is active."""
    sent = np.asarray(sent)
    n_tx = truth.shape[-2]
    active = np.arange(n_tx) == sent[..., None]  # (..., Nt)
    signal = np.sqrt(cfg.symbol_energy) * truth * active[..., None]
    return signal + complex_normal(rng, truth.shape, 2.0 * cfg.noise_psd)


def decision_metrics(rx: np.ndarray, est, cfg: SystemConfig) -> np.ndarray:
    """Mismatched metric for every hypothesis, shape ``(..., Nt)``.

    ``D_i = sum_l Re{rho[i,l] conj(sqrt(Em) a[i,l])} - (Em/2) sum_l |a[i,l]|^2``
    with ``a`` the estimated gains.
    """
    gains = est.gains if isinstance(est, ChannelEstimate) else np.asarray(est)
    if gains.shape != rx.shape:
        raise ConfigError(f"projection shape {rx.shape} != estimate shape {gains.shape}")
    em = cfg.symbol_energy
    corr = np.sum((rx * np.conj(gains)).real, axis=-1) * np.sqrt(em)
    return corr - 0.5 * em * np.sum(gains.real**2 + gains.imag**2, axis=-1)


def detect(metrics) -> np.ndarray:
    """Index of the largest metric; exact ties go to the lowest index."""
    return np.argmax(np.asarray(metrics), axis=-1)


def simulate_batch(cfg: SystemConfig, n_trials: int, rng: np.random.Generator):
    """Run ``n_trials`` independent blocks, one symbol each.

    Every block gets a fresh channel, a fresh estimate and a uniformly random
    bit word. Returns ``(bit_errors, bits, symbol_errors)``.
    """
    n_tx = cfg.n_tx
    bits = rng.integers(0, 2, size=(n_trials, cfg.rate))
    sent = encode(bits, n_tx)
    truth = sample_channel(cfg, rng, (n_trials,))
    est = estimate_channel(truth, cfg, rng)
    rx = observe(sent, truth, cfg, rng)
    guess = detect(decision_metrics(rx, est, cfg))
    bit_errors = int(np.count_nonzero(decode(guess, n_tx) != bits))
    return bit_errors, n_trials * cfg.rate, int(np.count_nonzero(guess != sent))
