"""Time-orthonormal Hermite-Gaussian pulses, one per transmit antenna.

The pulse of antenna ``i`` is the order-``i`` Hermite function. Distinct
orders are orthogonal over the real line; this module builds sampled pulse
sets and certifies numerically that their Gram matrix is the identity, which
is what licenses the per-antenna projection model used by the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .channel import complex_normal
from .errors import AccuracyError, ConfigError

MAX_ORDER = 64
# Energy fraction that must fall inside the signaling interval.
INTERVAL_ENERGY = 1.0 - 1e-6
# Energy fraction the sampling grid has to capture (keeps Gram error < 1e-8).
GRID_ENERGY = 1.0 - 1e-13


def hermite_function(order: int, x) -> np.ndarray:
    """Orthonormal Hermite function of the given order, evaluated at ``x``.

    Uses the three-term recurrence on the normalized functions, which stays
    finite for large orders where the raw polynomial would overflow.
    """
    if order < 0 or order > MAX_ORDER:
        raise ConfigError(f"Hermite order must be in [0, {MAX_ORDER}], got {order}")
    x = np.asarray(x, dtype=float)
    prev = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if order == 0:
        return prev
    cur = np.sqrt(2.0) * x * prev
    for n in range(1, order):
        prev, cur = cur, np.sqrt(2.0 / (n + 1)) * x * cur - np.sqrt(n / (n + 1)) * prev
    return cur


def hermite_pulse(order: int, t, scale: float = 1.0) -> np.ndarray:
    """Unit-energy Hermite-Gaussian pulse ``h_n(t / scale) exp(-(t / scale)^2 / 2)``."""
    if not scale > 0:
        raise ConfigError(f"scale must be positive, got {scale}")
    return hermite_function(order, np.asarray(t, dtype=float) / scale) / np.sqrt(scale)


def _tail_energy(order, x):
    # Energy of the unit-scale pulse outside [-x, x].
    f = lambda u: hermite_function(order, u) ** 2
    val, _ = integrate.quad(f, x, np.inf, epsabs=1e-16, epsrel=1e-12, limit=200)
    return 2.0 * val


@lru_cache(maxsize=None)
def energy_radius(order: int, fraction: float) -> float:
    """Half-width (unit scale) of the centered window holding ``fraction`` of the energy."""
    target = 1.0 - fraction
    hi = np.sqrt(2.0 * order + 1.0) + 2.0
    while _tail_energy(order, hi) > target:
        hi *= 1.5
    return optimize.brentq(lambda x: _tail_energy(order, x) - target, 0.0, hi, xtol=1e-10)


def energy_inside(order: int, half_width: float, scale: float = 1.0) -> float:
    return 1.0 - _tail_energy(order, half_width / scale)


@dataclass(frozen=True)
class PulseSet:
    orders: tuple
    duration: float
    scale: float
    t: np.ndarray
    amplitudes: np.ndarray  # (Nt, samples)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def samples_per_pulse(self) -> int:
        return self.t.size

    def __len__(self):
        return len(self.orders)


def make_pulse_set(n_tx: int, duration: float = 1.0, samples_per_std: float = 64.0,
                   grid_energy: float = GRID_ENERGY) -> PulseSet:
    """Sampled pulses of orders ``0 .. n_tx - 1``.

    The common time scale puts ``INTERVAL_ENERGY`` of the highest-order pulse
    inside the interval of length ``duration``. The sampling grid spans the
    window holding ``grid_energy`` of that pulse, with ``samples_per_std``
    samples per unit of ``t / scale``.
    """
    if n_tx < 1 or n_tx > MAX_ORDER:
        raise ConfigError(f"pulse count must be in [1, {MAX_ORDER}], got {n_tx}")
    top = n_tx - 1
    scale = duration / (2.0 * energy_radius(top, INTERVAL_ENERGY))
    half = energy_radius(top, grid_energy)
    dx = 1.0 / samples_per_std
    n_half = int(np.ceil(half / dx))
    x = dx * np.arange(-n_half, n_half + 1)
    t = scale * x
    amps = np.stack([hermite_pulse(k, t, scale) for k in range(n_tx)])
    return PulseSet(tuple(range(n_tx)), duration, scale, t, amps)


def gram_matrix(pulses: PulseSet, min_energy: float = INTERVAL_ENERGY) -> np.ndarray:
    """Discretized inner products of all pulse pairs.

    Raises :class:`AccuracyError` if the grid misses more than
    ``1 - min_energy`` of any pulse's energy.
    """
    half = max(abs(pulses.t[0]), abs(pulses.t[-1]))
    for order in pulses.orders:
        if energy_inside(order, half, pulses.scale) < min_energy:
            raise AccuracyError(
                f"sampling grid holds less than {min_energy:.7f} of pulse order {order}"
            )
    a = pulses.amplitudes
    return a @ a.T * pulses.dt


def max_gram_deviation(pulses: PulseSet) -> float:
    g = gram_matrix(pulses)
    return float(np.max(np.abs(g - np.eye(len(pulses)))))


def project_white_noise(pulses: PulseSet, n_draws: int, rng: np.random.Generator,
                        n0: float = 1.0, chunk: int = 5000) -> np.ndarray:
    """Project sampled complex white noise (PSD ``n0`` per dimension) onto each pulse.

    Returns complex coefficients of shape ``(n_draws, Nt)``.
    """
    dt = pulses.dt
    out = np.empty((n_draws, len(pulses)), dtype=complex)
    for start in range(0, n_draws, chunk):
        stop = min(start + chunk, n_draws)
        eta = complex_normal(rng, (stop - start, pulses.samples_per_pulse), 2.0 * n0 / dt)
        out[start:stop] = eta @ pulses.amplitudes.T * dt
    return out
