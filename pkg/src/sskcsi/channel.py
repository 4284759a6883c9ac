"""Block-fading channel realizations and pilot-based channel estimates.

Channel matrices are complex arrays of shape ``(..., Nt, Nr)``; leading axes
index independent trials, so every function here works for a single block or
a whole batch of blocks at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import SystemConfig
from .errors import DomainError


def complex_normal(rng: np.random.Generator, shape, variance=1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with total variance ``variance``."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True)
class ChannelEstimate:
    """Estimated gains ``gains = truth + error`` and the error's total complex variance."""

    gains: np.ndarray
    err_var: float


def sample_channel(cfg: SystemConfig, rng: np.random.Generator, batch=(), n_tx=None) -> np.ndarray:
    """Draw i.i.d. unit-power Rayleigh gains of shape ``batch + (Nt, Nr)``.

    ``n_tx`` overrides ``cfg.n_tx`` (the Alamouti baseline always uses two
    transmit antennas).
    """
    n_tx = cfg.n_tx if n_tx is None else n_tx
    return complex_normal(rng, tuple(batch) + (n_tx, cfg.n_rx), 1.0)


def estimate_channel(truth: np.ndarray, cfg: SystemConfig, rng: np.random.Generator) -> ChannelEstimate:
    """ML pilot estimate: ``truth`` plus independent complex Gaussian error.

    The error has total variance ``2 N0 / (Np Ep)`` (``N0 / (Np Ep)`` per
    real dimension). With perfect CSI the truth is returned unchanged.
    """
    var = cfg.estimation_error_variance
    if cfg.pcsi:
        return ChannelEstimate(truth.copy(), 0.0)
    return ChannelEstimate(truth + complex_normal(rng, truth.shape, var), var)


def mgf_rayleigh(s, power=1.0):
    """E{exp(s |alpha|^2)} for Rayleigh fading with E{|alpha|^2} = ``power``."""
    s = np.asarray(s, dtype=complex)
    if np.any((s * power).real >= 1.0):
        raise DomainError("Rayleigh MGF requires Re{s * power} < 1")
    return 1.0 / (1.0 - s * power)


MGF_ABS2: dict[str, Callable] = {"rayleigh": mgf_rayleigh}


def mgf_abs2(fading: str, s):
    """MGF of the squared channel envelope for the given fading model tag."""
    try:
        mgf = MGF_ABS2[fading]
    except KeyError:
        raise DomainError(f"no MGF registered for fading model {fading!r}") from None
    return mgf(s)
