"""Alamouti 2 x Nr baseline with M-PSK and mismatched (estimate plug-in) combining.

The total energy per channel use is ``Em``, i.e. ``Em / 2`` per transmit
antenna. Both links of every receive antenna are estimated from ``Np``
pilots exactly as in the TOSD-SSK receiver, so the two schemes see the same
channel-knowledge quality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import complex_normal, estimate_channel, sample_channel
from .config import SystemConfig
from .errors import ConfigError

LABELINGS = ("gray", "binary")


@dataclass(frozen=True)
class PskConstellation:
    """Unit-modulus M-PSK points ``exp(j 2 pi k / M)`` with bit labels.

    ``labeling="gray"`` gives the reflected Gray code (neighbors differ in one
    bit); ``"binary"`` labels point ``k`` with the natural binary word of ``k``.
    """

    m: int
    labeling: str = "gray"
    points: np.ndarray = field(init=False, repr=False)
    labels: np.ndarray = field(init=False, repr=False)
    _position: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.m not in (2, 4, 8, 16):
            raise ConfigError(f"M must be one of 2, 4, 8, 16, got {self.m}")
        if self.labeling not in LABELINGS:
            raise ConfigError(f"unknown PSK labeling {self.labeling!r}")
        k = np.arange(self.m)
        labels = k ^ (k >> 1) if self.labeling == "gray" else k
        position = np.empty(self.m, dtype=np.int64)
        position[labels] = k
        object.__setattr__(self, "points", np.exp(2j * np.pi * k / self.m))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_position", position)

    @property
    def bits_per_symbol(self) -> int:
        return self.m.bit_length() - 1

    def _word_value(self, bits):
        bits = np.asarray(bits)
        k = self.bits_per_symbol
        if bits.shape[-1:] != (k,):
            raise ConfigError(f"expected words of {k} bits for M={self.m}, got shape {bits.shape}")
        return bits.astype(np.int64) @ (1 << np.arange(k - 1, -1, -1))

    def positions(self, bits) -> np.ndarray:
        """Constellation positions ``k`` for bit words (last axis, MSB first)."""
        return self._position[self._word_value(bits)]

    def decide(self, z) -> np.ndarray:
        """Nearest-point positions for received values ``z``."""
        step = 2.0 * np.pi / self.m
        return np.mod(np.rint(np.angle(z) / step), self.m).astype(np.int64)

    def label_bits(self, positions) -> np.ndarray:
        k = self.bits_per_symbol
        return (self.labels[positions][..., None] >> np.arange(k - 1, -1, -1)) & 1


def psk_map(bits, c: PskConstellation) -> np.ndarray:
    return c.points[c.positions(bits)]


def psk_demap(z, c: PskConstellation) -> np.ndarray:
    return c.label_bits(c.decide(z))


def encode_codeword(s1, s2, energy=1.0) -> np.ndarray:
    """Slot-major transmit layout ``[[s1, s2], [-s2*, s1*]] * sqrt(energy / 2)``."""
    s1, s2 = np.asarray(s1), np.asarray(s2)
    a = np.sqrt(energy / 2.0)
    return a * np.stack(
        [np.stack([s1, s2], -1), np.stack([-np.conj(s2), np.conj(s1)], -1)], -2
    )


def combine(r, gains) -> np.ndarray:
    """Alamouti combiner.

    ``r`` has shape ``(..., 2, Nr)`` (slot, receive antenna) and ``gains``
    shape ``(..., 2, Nr)`` (transmit antenna, receive antenna). Returns the two
    symbol statistics, shape ``(..., 2)``.
    """
    r1, r2 = r[..., 0, :], r[..., 1, :]
    h1, h2 = gains[..., 0, :], gains[..., 1, :]
    z1 = np.sum(np.conj(h1) * r1 + h2 * np.conj(r2), axis=-1)
    z2 = np.sum(np.conj(h2) * r1 - h1 * np.conj(r2), axis=-1)
    return np.stack([z1, z2], -1)


def transmit(x, truth, cfg: SystemConfig, rng) -> np.ndarray:
    """Received slots ``r[t, l] = sum_i x[t, i] h[i, l] + noise`` (noise variance ``2 N0``)."""
    signal = x @ truth
    return signal + complex_normal(rng, signal.shape, 2.0 * cfg.noise_psd)


def simulate_batch(cfg: SystemConfig, c: PskConstellation, n_codewords: int,
                   rng: np.random.Generator):
    """Simulate ``n_codewords`` blocks; returns ``(bit_errors, bits)``."""
    k = c.bits_per_symbol
    bits = rng.integers(0, 2, size=(n_codewords, 2, k))
    s = psk_map(bits, c)
    truth = sample_channel(cfg, rng, (n_codewords,), n_tx=2)
    est = estimate_channel(truth, cfg, rng)
    x = encode_codeword(s[:, 0], s[:, 1], cfg.symbol_energy)
    r = transmit(x, truth, cfg, rng)
    z = combine(r, est.gains)
    errors = int(np.count_nonzero(psk_demap(z, c) != bits))
    return errors, n_codewords * 2 * k


def simulate_codeword(cfg: SystemConfig, c: PskConstellation, rng: np.random.Generator):
    return simulate_batch(cfg, c, 1, rng)
