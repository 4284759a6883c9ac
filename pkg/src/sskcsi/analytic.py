"""Closed-form error probability of TOSD-SSK with pilot-based channel estimates.

Conditioned on the fading gains, the difference of the two mismatched metrics
of a pair of hypotheses is a quadratic form in complex Gaussians. Its
characteristic function (CF) factors into a gain-independent part
``upsilon(nu)`` and an exponential in ``delta_t(nu) * sum_l |alpha_{t,l}|^2``, so

* the conditional pairwise error probability (PEP) follows from Gil-Pelaez
  inversion of the CF, and
* averaging over fading only needs the MGF of ``|alpha|^2``, which gives the
  average PEP (APEP) as a single finite-range integral.

The ABEP is then the union bound over antenna pairs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .channel import complex_normal, mgf_abs2
from .config import SystemConfig
from .errors import AccuracyError, DomainError

EPSABS = 1e-12
EPSREL = 1e-9
QUAD_LIMIT = 400
# Below this |nu| the ratio Im{cf}/nu is replaced by a difference quotient.
NU_SMALL = 1e-9
NU_STEP = 1e-6
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class CfKernel:
    """Coefficients of the conditional CF of one pairwise test.

    ``v_a`` and ``v_b`` are infinite for perfect CSI, where ``upsilon`` is 1
    and ``delta`` reduces to ``-nu^2 g_a + j nu g_b``.
    """

    v_a: float
    v_b: float
    g_t1_a: float
    g_t1_b: float
    g_t2_a: float
    g_t2_b: float
    n_rx: int
    snr_linear: float

    @property
    def pcsi(self) -> bool:
        return math.isinf(self.v_a)

    @property
    def pilot_product(self) -> float:
        """``Np * r_pm`` (infinite for perfect CSI)."""
        return math.inf if self.pcsi else self.v_a * self.v_b


def make_kernel(snr_linear: float, n_rx: int, pilot_product=None) -> CfKernel:
    """Kernel for SNR ``Em/N0``, ``n_rx`` receive antennas and ``Np * r_pm``.

    ``pilot_product=None`` (or ``inf``) is perfect CSI.
    """
    if not snr_linear >= 0:
        raise DomainError(f"SNR must be non-negative, got {snr_linear}")
    if n_rx < 1:
        raise DomainError(f"n_rx must be >= 1, got {n_rx}")
    half = 0.5 * snr_linear
    if pilot_product is None or math.isinf(pilot_product):
        return CfKernel(math.inf, math.inf, half, half, half, -half, n_rx, snr_linear)
    if not pilot_product > 0:
        raise DomainError(f"Np * r_pm must be positive, got {pilot_product}")
    root = math.sqrt(0.25 + pilot_product)
    return CfKernel(root + 0.5, root - 0.5, half * (1.0 + 1.0 / pilot_product),
                    half, half, -half, n_rx, snr_linear)


def cf_kernel(cfg: SystemConfig) -> CfKernel:
    product = None if cfg.pcsi else cfg.n_pilots * cfg.pilot_ratio
    return make_kernel(cfg.snr_linear, cfg.n_rx, product)


def upsilon(nu, k: CfKernel):
    """Gain-independent CF factor ``(v_a v_b)^Nr / ((nu + j v_a)(nu - j v_b))^Nr``."""
    nu = np.asarray(nu, dtype=float)
    if k.pcsi:
        return np.ones_like(nu, dtype=complex)
    base = k.v_a * k.v_b / ((nu + 1j * k.v_a) * (nu - 1j * k.v_b))
    return base**k.n_rx


def delta(nu, g_a, g_b, k: CfKernel):
    """Per-unit-channel-energy CF exponent ``v_a v_b (-nu^2 g_a + j nu g_b) / ((nu + j v_a)(nu - j v_b))``."""
    nu = np.asarray(nu, dtype=float)
    num = -(nu**2) * g_a + 1j * nu * g_b
    if k.pcsi:
        return num
    return k.v_a * k.v_b * num / ((nu + 1j * k.v_a) * (nu - 1j * k.v_b))


def conditional_cf(nu, sum_t1: float, sum_t2: float, k: CfKernel):
    """CF of ``d_t1 - d_t2`` given the channel energies of both antennas."""
    nu = np.asarray(nu, dtype=float)
    expo = delta(nu, k.g_t1_a, k.g_t1_b, k) * sum_t1 + delta(-nu, k.g_t2_a, k.g_t2_b, k) * sum_t2
    return upsilon(nu, k) * upsilon(-nu, k) * np.exp(expo)


def average_cf(nu, k: CfKernel, fading: str = "rayleigh"):
    """Fading-averaged CF, i.i.d. links: each antenna contributes ``M(delta)^Nr``."""
    nu = np.asarray(nu, dtype=float)
    m1 = mgf_abs2(fading, delta(nu, k.g_t1_a, k.g_t1_b, k))
    m2 = mgf_abs2(fading, delta(-nu, k.g_t2_a, k.g_t2_b, k))
    return upsilon(nu, k) * upsilon(-nu, k) * (m1 * m2) ** k.n_rx


def kernel_scales(k: CfKernel) -> tuple:
    """Values of ``nu`` near which the CF of a pairwise test varies fastest."""
    scales = []
    if k.snr_linear > 0:
        scales += [1.0 / k.snr_linear, 1.0 / math.sqrt(k.snr_linear)]
    if not k.pcsi:
        scales += [k.v_b, k.v_a]
    return tuple(scales)


def gil_pelaez_negative(cf: Callable, scales=(), what: str = "probability") -> float:
    """``Pr{D < 0}`` from the CF of ``D``.

    Computes ``1/2 - (1/pi) int_0^inf Im{cf(nu)} / nu dnu`` after ``nu = tan(xi)``
    on ``(0, pi/2)`` with adaptive Gauss-Kronrod quadrature. ``scales`` are
    values of ``nu`` used as breakpoints, so narrow features at high SNR are
    not stepped over.
    """
    points = sorted({math.atan(s) for s in scales if 0 < s < math.inf})

    def integrand(xi):
        nu = math.tan(xi)
        if not math.isfinite(nu):
            return 0.0
        if nu < NU_SMALL:
            # Im{cf(0)} = 0, so Im{cf}/nu tends to the slope at the origin.
            slope = (cf(NU_STEP).imag - cf(-NU_STEP).imag) / (2.0 * NU_STEP)
            return float(slope) * (1.0 + nu * nu)
        return float(np.imag(cf(nu))) * (1.0 + nu * nu) / nu

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr, info, *rest = integrate.quad(
            integrand, 0.0, 0.5 * math.pi, epsabs=EPSABS, epsrel=EPSREL,
            limit=QUAD_LIMIT, full_output=1, points=points or None,
        )
    p = 0.5 - value / math.pi
    err = abserr / math.pi
    if rest and err > max(1e3 * EPSABS, 1e-3 * abs(p)):
        raise AccuracyError(f"{what} quadrature did not converge (err ~ {abserr:.2e})", p)
    return _clamp(p, what, max(CLAMP_TOL, 10.0 * err))


def _clamp(p: float, what: str, tol: float = CLAMP_TOL) -> float:
    # 1/2 - I/pi cancels: probabilities below ~1e-11 are not resolved and come out as ~0
    if p < -tol or p > 1.0 + tol:
        raise AccuracyError(f"{what} evaluated to {p!r}, outside [0, 1]", p)
    return min(max(p, 0.0), 1.0)


def pep_conditional(ch_t1, ch_t2, k: CfKernel) -> float:
    """Pairwise error probability given ``|alpha_{t,l}|^2`` of both antennas."""
    e1 = np.atleast_1d(np.asarray(ch_t1, dtype=float))
    e2 = np.atleast_1d(np.asarray(ch_t2, dtype=float))
    if e1.size != k.n_rx or e2.size != k.n_rx:
        raise DomainError("channel energy lists must have one entry per receive antenna")
    if np.any(e1 < 0) or np.any(e2 < 0):
        raise DomainError("channel energies must be non-negative")
    s1, s2 = float(e1.sum()), float(e2.sum())
    return gil_pelaez_negative(lambda nu: conditional_cf(nu, s1, s2, k), kernel_scales(k), "PEP")


def apep_iid(k: CfKernel, fading: str = "rayleigh") -> float:
    """Pairwise error probability averaged over i.i.d. fading."""
    return gil_pelaez_negative(lambda nu: average_cf(nu, k, fading), kernel_scales(k), "APEP")


def quadratic_form_oracle(ch_t1, ch_t2, k: CfKernel, trials: int,
                          rng: np.random.Generator) -> float:
    """Sampling estimate of the conditional PEP.

    Draws the Gaussian quantities of one pairwise test directly (normalized
    to ``N0``) and returns the fraction of trials with ``d_t1 - d_t2 < 0``,
    where ``d_t = sum_l [-|X|^2 / 2 + Re{X Y^*}]``.
    """
    if trials < 10_000:
        raise DomainError("the oracle needs at least 1e4 trials")
    a1 = np.sqrt(np.asarray(ch_t1, dtype=float))
    a2 = np.sqrt(np.asarray(ch_t2, dtype=float))
    nr = a1.size
    g = math.sqrt(k.snr_linear)
    err_var = 0.0 if k.pcsi else 2.0 / k.pilot_product
    shape = (trials, nr)
    x1 = g * a1 + complex_normal(rng, shape, err_var)
    y1 = g * a1 + complex_normal(rng, shape, 2.0)
    x2 = g * a2 + complex_normal(rng, shape, err_var)
    y2 = complex_normal(rng, shape, 2.0)

    def form(x, y):
        return np.sum(-0.5 * np.abs(x) ** 2 + (x * np.conj(y)).real, axis=-1)

    return float(np.mean(form(x1, y1) - form(x2, y2) < 0))


def abep_bound(n_tx: int, apep: float) -> float:
    """Union bound on the ABEP when all pairwise APEPs are equal: ``(Nt / 2) * APEP``."""
    if n_tx < 2:
        raise DomainError("need at least two transmit antennas")
    return 0.5 * n_tx * apep


def union_bound(apeps) -> float:
    """Union bound from a full ``Nt x Nt`` matrix of pairwise APEPs (diagonal ignored)."""
    apeps = np.asarray(apeps, dtype=float)
    n = apeps.shape[0]
    off = apeps.sum() - np.trace(apeps)
    return float(off / (2.0 * (n - 1)))


def abep(cfg: SystemConfig) -> float:
    """ABEP (union bound; exact for Nt = 2) of TOSD-SSK for ``cfg``."""
    return abep_bound(cfg.n_tx, apep_iid(cf_kernel(cfg), cfg.fading))


def snr_for_abep(target: float, cfg: SystemConfig, lo_db: float = -10.0,
                 hi_db: float = 60.0, xtol_db: float = 1e-3) -> float:
    """SNR (dB) at which the analytic ABEP equals ``target``.

    Root of ``log ABEP(snr) - log target`` on ``[lo_db, hi_db]``; ``cfg.snr_db``
    is ignored.
    """
    if not 0.0 < target < 0.5:
        raise DomainError(f"target must be in (0, 1/2), got {target}")

    def f(db):
        return math.log(max(abep(cfg.with_snr(db)), 1e-300)) - math.log(target)

    f_lo, f_hi = f(lo_db), f(hi_db)
    if f_lo < 0 or f_hi > 0:
        raise DomainError(f"target {target:g} not bracketed by [{lo_db}, {hi_db}] dB")
    return float(optimize.brentq(f, lo_db, hi_db, xtol=xtol_db))
