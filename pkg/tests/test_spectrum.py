import numpy as np
import pytest

from ssbfsk import (autocorrelation, characteristic_sum, full_occupancy,
                    occupancy, psd, ssb_loss)
from conftest import lorentzian_scheme


def test_autocorrelation_basics(config_a):
    tau = np.linspace(0.0, (config_a.L + 1) * config_a.Ts, 300)
    R = autocorrelation(config_a, tau)
    assert R[0] == pytest.approx(1.0, abs=1e-12)
    assert (np.abs(R) <= 1.0 + 1e-12).all()
    with pytest.raises(ValueError):
        autocorrelation(config_a, [-0.5])
    with pytest.raises(ValueError):
        autocorrelation(config_a, tau, priors=[0.7, 0.7])


def test_tail_factorization(config_a):
    # beyond the pulse memory each extra symbol of lag contributes one factor
    # of the characteristic sum; this underpins the geometric-series closure
    C = characteristic_sum(config_a)
    L, Ts = config_a.L, config_a.Ts
    for taup in (0.0, 0.37, 0.81):
        base = autocorrelation(config_a, [taup + L * Ts])[0]
        for m in (1, 2, 3):
            lhs = autocorrelation(config_a, [taup + (L + m) * Ts])[0]
            assert abs(lhs - C ** m * base) < 1e-9


def test_characteristic_sum_values():
    assert characteristic_sum(lorentzian_scheme(2, 1.0, 4, 0.3)) == pytest.approx(1.0, abs=1e-12)
    assert characteristic_sum(lorentzian_scheme(2, 0.5, 4, 0.3)) == pytest.approx(0.0, abs=1e-12)
    rng = np.random.default_rng(4)
    for _ in range(10):
        h = float(rng.uniform(0.05, 2.0))
        sch = lorentzian_scheme(4, h, 2, 0.7)
        p = rng.dirichlet(np.ones(4))
        assert abs(characteristic_sum(sch, p)) <= 1.0 + 1e-12


def test_psd_nonnegative_and_normalized(config_a):
    est = psd(config_a)
    assert (est.S >= -1e-9).all()
    assert est.total_power == pytest.approx(1.0, abs=1e-3)
    assert np.trapezoid(est.S, est.freq) + sum(p for _, p in est.lines) == pytest.approx(1.0, rel=1e-12)


def test_spectral_concentration_rises_with_width():
    # wider pulses condense the power into the first 1/Ts of bandwidth
    conc = []
    for w in (0.3, 0.7, 1.3):
        sch = lorentzian_scheme(2, 0.78, 5, w)
        est = psd(sch)
        sel = (est.freq >= 0.0) & (est.freq <= 1.0)
        conc.append(np.trapezoid(est.S[sel], est.freq[sel]))
    assert conc[0] < conc[1] < conc[2]


def test_integer_index_produces_lines():
    sch = lorentzian_scheme(2, 1.0, 12, 0.37)
    est = psd(sch)
    assert len(est.lines) >= 2
    freqs = [fm for fm, _ in est.lines]
    # lines sit at whole multiples of the symbol rate when v = 0
    assert all(abs(fm - round(fm)) < 1e-9 for fm in freqs)
    assert sum(p for _, p in est.lines) > 0.1


def test_near_integer_index_quasi_lines(config_a_prime):
    est = psd(config_a_prime)
    assert not est.lines  # |C| < 1: continuous branch
    # sharp quasi-line near f*Ts = 1 + v
    C = characteristic_sum(config_a_prime)
    v = (np.angle(C) / (2 * np.pi)) % 1.0
    near = np.abs(est.freq - (1 + v)) < 0.004
    away = np.abs(est.freq - 1.5) < 0.1
    assert est.S[near].max() > 100 * est.S[away].mean()


def test_config_a_bandwidth_and_loss(config_a):
    est = psd(config_a)
    occ = full_occupancy(est, config_a.M)
    assert occ.b99 == pytest.approx(0.906, rel=0.03)
    assert occ.ssb_loss_percent == pytest.approx(1.764, abs=0.2)


def test_config_a_prime_bandwidth_and_loss(config_a_prime):
    est = psd(config_a_prime)
    occ = full_occupancy(est, config_a_prime.M)
    assert occ.b999 == pytest.approx(1.129, rel=0.03)
    assert occ.ssb_loss_percent == pytest.approx(0.366, abs=0.1)


def test_original_proposal_bandwidth_and_loss():
    sch = lorentzian_scheme(2, 1.0, 12, 0.37)
    est = psd(sch)
    occ = full_occupancy(est, sch.M)
    assert occ.b999 == pytest.approx(2.06, rel=0.03)
    assert occ.ssb_loss_percent == pytest.approx(0.469, abs=0.1)


def test_ssb_loss_trend_with_index():
    losses = {}
    for h in (0.5, 0.8, 1.04):
        est = psd(lorentzian_scheme(2, h, 12, 0.8))
        losses[h] = ssb_loss(est)
    assert losses[0.5] > losses[0.8] > losses[1.04]
    assert losses[0.5] == pytest.approx(2.06, abs=0.25)
    assert losses[0.8] == pytest.approx(1.63, abs=0.25)


def test_occupancy_symmetric_for_symmetric_spectrum(gmsk_scheme):
    est = psd(gmsk_scheme)
    occ = occupancy(est, 0.99, gmsk_scheme.M)
    lo, hi = occ.windows[0.99]
    assert abs(lo + hi) < 0.02  # within grid resolution of symmetric
    with pytest.raises(ValueError):
        occupancy(est, 1.5, 2)


def test_near_integer_continuity():
    # the geometric-factor branch converges to the delta/cotangent
    # decomposition as |C| -> 1, away from the line locations
    exact = psd(lorentzian_scheme(2, 1.0, 6, 0.5))
    approx = psd(lorentzian_scheme(2, 1.0 + 1e-3, 6, 0.5))
    mask = np.ones(len(exact.freq), dtype=bool)
    for fm, _ in exact.lines:
        mask &= np.abs(exact.freq - fm) > 0.05
    # renormalize the continuous parts over the compared region
    a = exact.S[mask]
    b = np.interp(exact.freq[mask], approx.freq, approx.S)
    scale = np.trapezoid(a, exact.freq[mask]) / np.trapezoid(b, exact.freq[mask])
    rms = np.sqrt(np.mean((a - scale * b) ** 2)) / np.sqrt(np.mean(a ** 2))
    assert rms < 0.02


@pytest.mark.slow
def test_power_conservation_random_schemes(rng):
    for _ in range(50):
        M = int(rng.choice([2, 4]))
        L = int(rng.integers(2, 9))
        h = float(rng.uniform(0.1, 1.3))
        w = float(rng.uniform(0.3, min(2.5, 0.1 + 0.75 * L)))
        sch = lorentzian_scheme(M, h, L, w)
        est = psd(sch, res=128, nt=64)
        assert est.total_power == pytest.approx(1.0, abs=1e-3), (M, h, L, w)
