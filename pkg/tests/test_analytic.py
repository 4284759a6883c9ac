import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import comb

from sskcsi import analytic
from sskcsi.config import SystemConfig, db_to_linear
from sskcsi.errors import AccuracyError, DomainError


def pcsi_apep(gamma, nr):
    # with perfect CSI the pairwise test is MRC over 2 Nr branches at SNR gamma / 8
    c = gamma / 8
    mu = math.sqrt(c / (1 + c))
    big_l = 2 * nr
    return ((1 - mu) / 2) ** big_l * sum(comb(big_l - 1 + k, k) * ((1 + mu) / 2) ** k
                                         for k in range(big_l))


def eigen_apep(gamma, nr, pilot_product):
    """APEP from the eigenvalues of the fading-averaged Hermitian form, via mpmath."""
    ev = 2.0 / pilot_product
    r1 = np.array([[gamma + ev, gamma], [gamma, gamma + 2.0]])
    r2 = np.diag([gamma + ev, 2.0])
    q1 = np.array([[-0.5, 0.5], [0.5, 0.0]])
    lams = []
    for r, q in ((r1, q1), (r2, -q1)):
        s = np.linalg.cholesky(r)
        lams += list(np.linalg.eigvalsh(s.T @ q @ s))

    def cf(nu):
        out = mpmath.mpc(1)
        for lam in lams:
            out /= (1 - 1j * nu * lam) ** nr
        return out

    val = mpmath.quad(lambda nu: mpmath.im(cf(nu)) / nu, [0, 1e-3, 1e-1, 1, 10, mpmath.inf])
    return float(0.5 - val / mpmath.pi)


@pytest.mark.parametrize("product, va, vb", [(2, 2, 1), (6, 3, 2)])
def test_kernel_examples(product, va, vb):
    k = analytic.make_kernel(10.0, 1, product)
    assert k.v_a == pytest.approx(va) and k.v_b == pytest.approx(vb)


@given(st.floats(1e-3, 1e6), st.floats(0, 1e4), st.integers(1, 4))
def test_kernel_identities(product, gamma, nr):
    k = analytic.make_kernel(gamma, nr, product)
    assert k.v_a * k.v_b == pytest.approx(product, rel=1e-12)
    assert k.v_a - k.v_b == pytest.approx(1.0, abs=1e-9 * max(1.0, k.v_a))
    assert analytic.upsilon(0.0, k) == pytest.approx(1.0, abs=1e-15)
    assert analytic.delta(0.0, k.g_t1_a, k.g_t1_b, k) == 0


def test_cf_kernel_from_config():
    k = analytic.cf_kernel(SystemConfig(n_rx=2, n_pilots=5, pilot_ratio=2.0, snr_db=10.0))
    assert k.pilot_product == pytest.approx(10.0)
    assert k.n_rx == 2 and k.snr_linear == pytest.approx(10.0)
    assert k.g_t1_a == pytest.approx(5.0 * 1.1)
    assert analytic.cf_kernel(SystemConfig()).pcsi


def test_upsilon_decay():
    for nr in (1, 2, 3):
        k = analytic.make_kernel(10.0, nr, 3.0)
        mag = abs(analytic.upsilon(1e6, k))
        assert mag == pytest.approx(3.0**nr * 1e-12**nr, rel=1e-5)


def test_delta_limit():
    k = analytic.make_kernel(10.0, 1, 3.0)
    d = analytic.delta(1e6, k.g_t1_a, k.g_t1_b, k)
    assert d.real == pytest.approx(-k.v_a * k.v_b * k.g_t1_a, rel=1e-6)


def test_pep_zero_snr_and_zero_channel():
    k0 = analytic.make_kernel(0.0, 2, 3.0)
    assert analytic.pep_conditional([0.4, 1.3], [2.0, 0.1], k0) == pytest.approx(0.5, abs=1e-15)
    k = analytic.make_kernel(100.0, 2, 3.0)
    assert analytic.pep_conditional([0.0, 0.0], [0.0, 0.0], k) == pytest.approx(0.5, abs=1e-12)


def test_pep_input_validation():
    k = analytic.make_kernel(10.0, 2, 3.0)
    with pytest.raises(DomainError):
        analytic.pep_conditional([1.0], [1.0], k)
    with pytest.raises(DomainError):
        analytic.pep_conditional([1.0, -0.1], [1.0, 1.0], k)


def test_pep_pcsi_is_q_function():
    # PCSI: PEP = Q(sqrt(gamma (S1 + S2) / 4))
    k = analytic.make_kernel(db_to_linear(8.0), 2)
    s1, s2 = [0.7, 1.2], [0.3, 0.4]
    arg = math.sqrt(k.snr_linear * (sum(s1) + sum(s2)) / 4)
    assert analytic.pep_conditional(s1, s2, k) == pytest.approx(0.5 * math.erfc(arg / math.sqrt(2)), rel=1e-8)


def test_oracle_limits(rng):
    k = analytic.make_kernel(0.0, 1, 2.0)
    n = 40000
    p = analytic.quadratic_form_oracle([1.0], [1.0], k, n, rng)
    assert abs(p - 0.5) < 3 * math.sqrt(0.25 / n)
    k = analytic.make_kernel(1e7, 1)
    assert analytic.quadratic_form_oracle([1.0], [0.5], k, n, rng) == 0.0
    with pytest.raises(DomainError):
        analytic.quadratic_form_oracle([1.0], [1.0], k, 100, rng)


def test_apep_frozen_values():
    assert analytic.apep_iid(analytic.make_kernel(1.0, 1)) == pytest.approx(7 / 27, rel=1e-9)
    assert analytic.apep_iid(analytic.make_kernel(1.0, 1, 1.0)) == pytest.approx(0.37094242748112055, rel=1e-8)
    assert analytic.apep_iid(analytic.make_kernel(100.0, 1)) == pytest.approx(0.0010553229225456356, rel=1e-8)
    assert analytic.apep_iid(analytic.make_kernel(100.0, 2)) == pytest.approx(4.244090763814246e-06, rel=1e-8)


@pytest.mark.parametrize("db", [0.0, 10.0, 20.0, 30.0, 40.0])
@pytest.mark.parametrize("nr", [1, 2, 3])
def test_apep_pcsi_closed_form(db, nr):
    g = db_to_linear(db)
    assert analytic.apep_iid(analytic.make_kernel(g, nr)) == pytest.approx(pcsi_apep(g, nr), rel=1e-7)


@pytest.mark.parametrize("db, nr, product", [
    (0.0, 1, 1.0), (10.0, 1, 3.0), (20.0, 2, 1.0), (25.0, 2, 10.0), (30.0, 1, 0.5), (15.0, 3, 2.0),
])
def test_apep_against_eigen_oracle(db, nr, product):
    g = db_to_linear(db)
    ref = eigen_apep(g, nr, product)
    assert analytic.apep_iid(analytic.make_kernel(g, nr, product)) == pytest.approx(ref, rel=1e-6)


def test_apep_zero_snr_is_half():
    assert analytic.apep_iid(analytic.make_kernel(0.0, 2, 1.0)) == pytest.approx(0.5, abs=1e-15)
    assert analytic.apep_iid(analytic.make_kernel(1e-9, 1, 1.0)) == pytest.approx(0.5, abs=1e-8)


def test_large_pilot_limit():
    for nr in (1, 2):
        g = db_to_linear(15.0)
        p = analytic.apep_iid(analytic.make_kernel(g, nr))
        q = analytic.apep_iid(analytic.make_kernel(g, nr, 1e8))
        assert abs(q - p) / p < 1e-6


def test_apep_monotone_in_pilots_and_snr():
    g = db_to_linear(12.0)
    vals = [analytic.apep_iid(analytic.make_kernel(g, 1, n)) for n in (1, 2, 5, 20)]
    vals.append(analytic.apep_iid(analytic.make_kernel(g, 1)))
    assert all(a > b for a, b in zip(vals, vals[1:]))
    snrs = [analytic.apep_iid(analytic.make_kernel(db_to_linear(d), 2, 3.0)) for d in range(0, 40, 5)]
    assert all(a > b for a, b in zip(snrs, snrs[1:]))


def test_unknown_fading_is_domain_error():
    with pytest.raises(DomainError):
        analytic.apep_iid(analytic.make_kernel(10.0, 1), "rician")


def test_gil_pelaez_reports_failure():
    with pytest.raises(AccuracyError) as err:
        analytic.gil_pelaez_negative(lambda nu: complex(0.0, 5.0 / (1 + nu * nu)))
    assert err.value.estimate is not None


def test_gil_pelaez_gaussian():
    # D ~ N(1, 1): Pr{D < 0} = Q(1)
    cf = lambda nu: np.exp(1j * nu - 0.5 * nu * nu)
    assert analytic.gil_pelaez_negative(cf) == pytest.approx(0.5 * math.erfc(1 / math.sqrt(2)), rel=1e-9)


def test_abep_bound_examples():
    assert analytic.abep_bound(2, 0.013) == 0.013
    assert analytic.abep_bound(4, 0.013) == pytest.approx(0.026)
    assert analytic.abep_bound(16, 1e-5) == pytest.approx(8e-5)
    with pytest.raises(DomainError):
        analytic.abep_bound(1, 0.1)


def test_union_bound_matrix():
    p = 3e-4
    m = np.full((8, 8), p)
    np.fill_diagonal(m, 0.0)
    assert analytic.union_bound(m) == pytest.approx(analytic.abep_bound(8, p))


def test_snr_for_abep_examples():
    c = SystemConfig(n_tx=2, n_rx=2, n_pilots=10, pilot_ratio=1.0)
    assert analytic.snr_for_abep(1e-4, c) == pytest.approx(16.4, abs=0.3)
    c = SystemConfig(n_tx=2, n_rx=1, n_pilots=1)
    assert analytic.snr_for_abep(1e-4, c) == pytest.approx(27.1, abs=0.3)


def test_snr_for_abep_roundtrip_and_errors():
    c = SystemConfig(n_tx=4, n_rx=1, n_pilots=3)
    db = analytic.snr_for_abep(1e-3, c, xtol_db=1e-6)
    assert analytic.abep(c.with_snr(db)) == pytest.approx(1e-3, rel=1e-4)
    with pytest.raises(DomainError):
        analytic.snr_for_abep(1e-4, c, lo_db=-10.0, hi_db=5.0)
    with pytest.raises(DomainError):
        analytic.snr_for_abep(0.7, c)


@settings(max_examples=15, deadline=None)
@given(st.floats(-5, 45), st.sampled_from([1, 2]), st.sampled_from([None, 1, 3, 10]))
def test_apep_is_probability(db, nr, npil):
    p = analytic.abep(SystemConfig(n_tx=2, n_rx=nr, n_pilots=npil, snr_db=db))
    assert 0.0 <= p <= 0.5


def test_high_snr_stays_accurate():
    g = db_to_linear(55.0)
    assert analytic.apep_iid(analytic.make_kernel(g, 1)) == pytest.approx(pcsi_apep(g, 1), rel=1e-5)


@pytest.mark.parametrize("nr", [1, 2])
@pytest.mark.parametrize("npil", [1, 10, None])
def test_high_snr_slope_is_full_diversity(nr, npil):
    lo, hi = (SystemConfig(n_rx=nr, n_pilots=npil, snr_db=d) for d in (35.0, 40.0))
    slope = -(math.log10(analytic.abep(hi)) - math.log10(analytic.abep(lo))) / 0.5
    assert slope == pytest.approx(2 * nr, rel=0.01)
