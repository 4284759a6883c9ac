"""Seeded Monte Carlo BER harness with early stopping and Wilson intervals.

Trials are grouped in fixed-size batches. Batch ``b`` of a point with seed
``s`` draws from ``SeedSequence([s, b])``, and batch results are merged in
index order, stopping at the first batch after which the stopping rule
fires. The outcome therefore depends only on ``(cfg, scheme, rule, seed)``,
never on how many worker processes evaluated the batches.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import optimize

from . import alamouti, analytic, tosd
from .config import SystemConfig
from .errors import DomainError

LOGGER = logging.getLogger(__name__)

SCHEMES = ("tosd_ssk", "alamouti")
BATCH_TRIALS = 1 << 15
WORKERS_ENV = "SSKCSI_WORKERS"
Z95 = 1.959963984540054


@dataclass(frozen=True)
class StoppingRule:
    min_errors: int = 200
    max_trials: int = 10**8

    def __post_init__(self):
        if self.min_errors < 1:
            raise DomainError("min_errors must be >= 1")
        if self.max_trials < 1:
            raise DomainError("max_trials must be >= 1")


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    scheme: str
    abep_mc: float
    ci_low: float
    ci_high: float
    trials: int
    bit_errors: int
    bits: int
    seed: int
    abep_analytic: Optional[float] = None
    error: Optional[str] = None

    @property
    def upper_bound_only(self) -> bool:
        """No errors observed: only ``ci_high`` is informative."""
        return self.error is None and self.bit_errors == 0


def wilson_ci(errors: int, total_bits: int, z: float = Z95):
    """Wilson score interval for a binomial proportion (95% by default)."""
    if total_bits < 1 or not 0 <= errors <= total_bits:
        raise DomainError(f"invalid counts: {errors} errors of {total_bits}")
    n = float(total_bits)
    p = errors / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = z / denom * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))
    low = 0.0 if errors == 0 else max(0.0, center - half)
    high = 1.0 if errors == total_bits else min(1.0, center + half)
    return low, high


def derive_seed(base_seed: int, index: int) -> int:
    """64-bit seed of point ``index`` in a sweep started from ``base_seed``."""
    state = np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1, np.uint64)
    return int(state[0])


def batch_rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(batch)]))


def bits_per_trial(cfg: SystemConfig, scheme: str) -> int:
    if scheme == "tosd_ssk":
        return cfg.rate
    if scheme == "alamouti":
        return 2 * cfg.rate
    raise DomainError(f"unknown scheme {scheme!r}")


def simulate(cfg: SystemConfig, scheme: str, n_trials: int, rng: np.random.Generator):
    """``(bit_errors, bits)`` over ``n_trials`` blocks of the given scheme."""
    if scheme == "tosd_ssk":
        errors, bits, _ = tosd.simulate_batch(cfg, n_trials, rng)
        return errors, bits
    if scheme == "alamouti":
        c = alamouti.PskConstellation(2**cfg.rate, cfg.psk_labeling)
        return alamouti.simulate_batch(cfg, c, n_trials, rng)
    raise DomainError(f"unknown scheme {scheme!r}")


def _run_batch(args):
    cfg, scheme, seed, batch, n_trials = args
    errors, bits = simulate(cfg, scheme, n_trials, batch_rng(seed, batch))
    return errors, bits, n_trials


def worker_count(workers=None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, int(workers))


def run_point(cfg: SystemConfig, scheme: str, rule: StoppingRule = StoppingRule(),
              seed: int = 0, workers=None) -> BerPoint:
    """Estimate the BER of ``scheme`` at ``cfg`` until ``rule`` fires."""
    bits_per_trial(cfg, scheme)
    workers = worker_count(workers)
    n_batches = -(-rule.max_trials // BATCH_TRIALS)

    def jobs(start, stop):
        for b in range(start, stop):
            n = min(BATCH_TRIALS, rule.max_trials - b * BATCH_TRIALS)
            yield cfg, scheme, seed, b, n

    errors = bits = trials = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        b = 0
        done = False
        while b < n_batches and not done:
            stop = min(b + workers, n_batches)
            wave = jobs(b, stop)
            results = pool.map(_run_batch, wave) if pool else map(_run_batch, wave)
            for e, nb, nt in results:
                errors += e
                bits += nb
                trials += nt
                if errors >= rule.min_errors:
                    done = True
                    break
            b = stop
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    low, high = wilson_ci(errors, bits)
    return BerPoint(cfg.snr_db, scheme, errors / bits, low, high, trials, errors, bits, seed)


def _failed_point(cfg, scheme, seed, exc) -> BerPoint:
    nan = float("nan")
    return BerPoint(cfg.snr_db, scheme, nan, nan, nan, 0, 0, 0, seed, error=str(exc))


def sweep(cfg: SystemConfig, scheme: str, snr_list, rule: StoppingRule = StoppingRule(),
          base_seed: int = 0, workers=None) -> list[BerPoint]:
    """One :func:`run_point` per SNR, seeded with ``derive_seed(base_seed, i)``.

    TOSD-SSK points also carry the analytic ABEP. A failing point is returned
    with its ``error`` set instead of aborting the sweep.
    """
    snr_list = list(snr_list)
    if not snr_list:
        raise DomainError("empty SNR list")
    points = []
    for i, db in enumerate(snr_list):
        point_cfg = cfg.with_snr(db)
        seed = derive_seed(base_seed, i)
        try:
            point = run_point(point_cfg, scheme, rule, seed, workers)
            if scheme == "tosd_ssk":
                point = _with_analytic(point, analytic.abep(point_cfg))
        except Exception as exc:  # recorded per point
            LOGGER.warning("point %s dB failed: %s", db, exc)
            point = _failed_point(point_cfg, scheme, seed, exc)
        points.append(point)
    return points


def _with_analytic(point: BerPoint, value: float) -> BerPoint:
    return replace(point, abep_analytic=value)


def mc_snr_for_ber(cfg: SystemConfig, scheme: str, target: float = 1e-4,
                   rule: StoppingRule = StoppingRule(min_errors=300), seed: int = 0,
                   start_db: float = 0.0, step_db: float = 5.0, max_db: float = 60.0,
                   xtol_db: float = 0.02, coarse_errors: int = 50, workers=None) -> float:
    """SNR (dB) where the simulated BER crosses ``target``.

    Every evaluation reuses ``seed`` (common random numbers), so the
    simulated curve is a nearly monotone function of SNR. The per-evaluation
    trial budget is capped at about three times what the error target needs
    at ``target``; far below the target this still decides the sign.

    The search runs twice: an upward scan plus Brent's method with a cheap
    rule (``coarse_errors`` errors) locates the crossing to ~0.25 dB, then the
    full ``rule`` brackets it within +-0.5 dB and narrows it to ``xtol_db``.
    """
    if not 0.0 < target < 0.5:
        raise DomainError(f"target must be in (0, 1/2), got {target}")
    per_trial = bits_per_trial(cfg, scheme)

    def objective(min_errors):
        cap = math.ceil(3.0 * min_errors / (target * per_trial))
        eval_rule = StoppingRule(min_errors, min(rule.max_trials, cap))

        def f(db):
            p = run_point(cfg.with_snr(db), scheme, eval_rule, seed, workers)
            ber = max(p.abep_mc, 0.5 / p.bits)
            return math.log(ber) - math.log(target)

        return f

    coarse = objective(min(coarse_errors, rule.min_errors))
    lo, hi = _scan_bracket(coarse, start_db, step_db, max_db, target)
    guess = optimize.brentq(coarse, lo, hi, xtol=0.25)

    fine = objective(rule.min_errors)
    lo, hi = _scan_bracket(fine, guess - 0.5, 0.5, max_db, target, allow_down=True)
    return float(optimize.brentq(fine, lo, hi, xtol=xtol_db))


def _scan_bracket(f, start, step, max_db, target, allow_down=False):
    lo = start
    while f(lo) <= 0:
        if not allow_down:
            raise DomainError(f"BER already below {target:g} at the scan start {start} dB")
        lo -= step
    while True:
        hi = min(lo + step, max_db)
        if f(hi) <= 0:
            return lo, hi
        if hi >= max_db:
            raise DomainError(f"BER still above {target:g} at {max_db} dB")
        lo = hi
