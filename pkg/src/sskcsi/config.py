"""System configuration for one experiment point.

Energies are normalized so that the per-antenna symbol energy is ``Em = 1``
and ``N0 = 1 / snr_linear``. ``N0`` is the noise power spectral density per
real dimension, so a complex noise sample has total variance ``2 * N0``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError

FADING_MODELS = ("rayleigh",)
PSK_LABELINGS = ("binary", "gray")


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """Antenna counts, pilot budget, SNR and fading model.

    ``n_pilots=None`` selects perfect channel knowledge at the receiver.
    ``psk_labeling`` only affects the Alamouti baseline, which sends
    ``2**rate``-PSK symbols.
    """

    n_tx: int = 2
    n_rx: int = 1
    n_pilots: Optional[int] = None
    pilot_ratio: float = 1.0
    snr_db: float = 10.0
    fading: str = "rayleigh"
    psk_labeling: str = "binary"

    def __post_init__(self):
        n_tx = self.n_tx
        if not isinstance(n_tx, int) or n_tx < 2 or n_tx & (n_tx - 1):
            raise ConfigError(f"Nt must be a power of two >= 2, got {n_tx!r}")
        if not isinstance(self.n_rx, int) or self.n_rx < 1:
            raise ConfigError(f"Nr must be a positive integer, got {self.n_rx!r}")
        if self.n_pilots is not None and (
            not isinstance(self.n_pilots, int) or self.n_pilots < 1
        ):
            raise ConfigError(
                f"Np must be a positive integer (or None for perfect CSI), got {self.n_pilots!r}"
            )
        if not self.pilot_ratio > 0 or not math.isfinite(self.pilot_ratio):
            raise ConfigError(f"pilot_ratio must be positive, got {self.pilot_ratio!r}")
        if not math.isfinite(self.snr_db):
            raise ConfigError(f"snr_db must be finite, got {self.snr_db!r}")
        if self.fading not in FADING_MODELS:
            raise ConfigError(f"unknown fading model {self.fading!r}")
        if self.psk_labeling not in PSK_LABELINGS:
            raise ConfigError(f"unknown PSK labeling {self.psk_labeling!r}")

    @property
    def pcsi(self) -> bool:
        return self.n_pilots is None

    @property
    def rate(self) -> int:
        """Bits per channel use, log2(Nt)."""
        return self.n_tx.bit_length() - 1

    @property
    def snr_linear(self) -> float:
        return db_to_linear(self.snr_db)

    @property
    def symbol_energy(self) -> float:
        return 1.0

    @property
    def noise_psd(self) -> float:
        """N0, per real dimension."""
        return self.symbol_energy / self.snr_linear

    @property
    def pilot_energy(self) -> float:
        return self.pilot_ratio * self.symbol_energy

    @property
    def estimation_error_variance(self) -> float:
        """Total complex variance of the channel estimation error."""
        if self.pcsi:
            return 0.0
        return 2.0 * self.noise_psd / (self.n_pilots * self.pilot_energy)

    def with_snr(self, snr_db: float) -> "SystemConfig":
        return dataclasses.replace(self, snr_db=float(snr_db))
