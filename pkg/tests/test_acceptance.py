"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or on
failure) and asserts the same condition, so the module doubles as a
human-readable report and a hard gate.
"""

import itertools
import time

import numpy as np
import pytest
from scipy.integrate import simpson

from ssbfsk import (DesignSpace, build_trellis, d_min, evaluate_config,
                    evaluate_scheme, modulate, occupancy, pareto_front, psd,
                    run_grid, upper_bound, w_lim)
from ssbfsk.linksim import simulate_ber, transmit_segments, viterbi_detect
from ssbfsk.optimizer import ParetoPoint
from conftest import lorentzian_scheme

CONFIG_A = (2, 0.78, 5, 1.3)
CONFIG_B = (2, 0.65, 5, 1.2)
CONFIG_A_PRIME = (2, 1.04, 12, 0.8)


def _report(criterion: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    assert ok, f"{criterion}: {detail}"


def test_criterion_01_wlim_table():
    t0 = time.time()
    expected = {2: 1.6, 4: 3.2, 6: 4.8, 8: 6.4, 10: 7.9, 12: 9.5}
    got = {L: w_lim(L) for L in expected}
    elapsed = time.time() - t0
    _report("1 width-limit table", got == expected and elapsed < 10.0,
            f"{got} in {elapsed:.1f}s")


def test_criterion_02_table2_spot_checks():
    t0 = time.time()
    a = evaluate_config(CONFIG_A, 0.99)
    b = evaluate_config(CONFIG_B, 0.99)
    elapsed = time.time() - t0
    conds = [
        abs(a.dmin_sq - 2.4) <= 0.02 * 2.4,
        abs(a.btb - 0.906) <= 0.03 * 0.906,
        abs(a.ssb_loss_percent - 1.764) <= 0.2,
        a.N_used <= 15,
        abs(b.dmin_sq - 1.774) <= 0.02 * 1.774,
        abs(b.btb - 0.785) <= 0.03 * 0.785,
        elapsed < 600.0,
    ]
    _report("2 config A/B benchmark row", all(conds),
            f"A: d2={a.dmin_sq:.4f} b99={a.btb:.4f} loss={a.ssb_loss_percent:.3f} "
            f"N={a.N_used}; B: d2={b.dmin_sq:.4f} b99={b.btb:.4f}; {elapsed:.0f}s")


def test_criterion_03_table3_spot_checks():
    ap = evaluate_config(CONFIG_A_PRIME, 0.999)
    bp = evaluate_config((4, 0.33, 2, 0.7), 0.999)
    conds = [
        abs(ap.dmin_sq - 3.346) <= 0.02 * 3.346,
        abs(ap.btb - 1.129) <= 0.03 * 1.129,
        abs(ap.ssb_loss_percent - 0.366) <= 0.1,
        abs(bp.dmin_sq - 1.814) <= 0.02 * 1.814,
        abs(bp.btb - 0.902) <= 0.03 * 0.902,
    ]
    _report("3 config A'/B'(M=4) benchmark row", all(conds),
            f"A': d2={ap.dmin_sq:.4f} b999={ap.btb:.4f} loss={ap.ssb_loss_percent:.3f}; "
            f"B'4: d2={bp.dmin_sq:.4f} b999={bp.btb:.4f}")


def test_criterion_04_integer_index_comparison():
    orig = evaluate_config((2, 1.0, 12, 0.37), 0.999)
    ap = evaluate_config(CONFIG_A_PRIME, 0.999)
    conds = [
        abs(orig.btb - 2.06) <= 0.03 * 2.06,
        abs(orig.dmin_sq - 1.9) <= 0.02 * 1.9,
        abs(orig.ssb_loss_percent - 0.469) <= 0.1,
        ap.btb < orig.btb,
        ap.dmin_sq > orig.dmin_sq,
        ap.ssb_loss_percent < orig.ssb_loss_percent,
    ]
    _report("4 integer-index comparison", all(conds),
            f"orig: b999={orig.btb:.4f} d2={orig.dmin_sq:.4f} "
            f"loss={orig.ssb_loss_percent:.3f}; tuned: b999={ap.btb:.4f} "
            f"d2={ap.dmin_sq:.4f} loss={ap.ssb_loss_percent:.3f}")


def test_criterion_05_distance_anchors(gmsk_scheme):
    high = d_min(lorentzian_scheme(2, 1.61, 5, 1.3), m=3, N_max=30)
    gmsk = d_min(gmsk_scheme)
    gain = 10 * np.log10(2.4 / gmsk.d_squared)
    conds = [high.d_squared > 5.0, abs(gain - 1.36) <= 0.15]
    _report("5 distance anchors", all(conds),
            f"d2(h=1.61)={high.d_squared:.3f} > 5; GMSK gain {gain:.3f} dB vs 1.36+-0.15")


def test_criterion_06_exhaustive_oracle(rng):
    t0 = time.time()
    N = 6
    worst = 0.0
    for _ in range(20):
        h = float(rng.uniform(0.15, 1.2))
        w = float(rng.uniform(0.2, 1.5))
        sch = lorentzian_scheme(2, h, 2, w)
        vals = sch.alphabet_values
        seqs = list(itertools.product(range(2), repeat=N))
        sigs = np.array([modulate(sch, vals[list(s)]) for s in seqs])
        eb = sch.E_s / np.log2(sch.M)
        dt = sch.Ts / sch.sps
        best = np.inf
        for i, si in enumerate(seqs):
            dsq = simpson(np.abs(sigs - sigs[i]) ** 2, dx=dt, axis=1) / (2 * eb)
            mask = np.array([sj[0] != si[0] for sj in seqs])
            best = min(best, dsq[mask].min())
        res = d_min(sch, m=2, N_max=N)
        worst = max(worst, abs(res.d_squared - best))
    elapsed = time.time() - t0
    _report("6 exhaustive-pair oracle", worst < 1e-6 and elapsed < 60.0,
            f"max |search - oracle| = {worst:.2e} over 20 draws in {elapsed:.0f}s")


def _periodogram_rms(params, n_symbols=200_000, seg_symbols=128, seed=123):
    from ssbfsk import CpmScheme, LORENTZIAN, PulseSpec, lorentzian_pulse
    M, h, L, w = params
    sps = 16
    sch16 = CpmScheme(M=M, h=h, pulse=lorentzian_pulse(PulseSpec(LORENTZIAN, L=L, w=w), sps))
    est = psd(lorentzian_scheme(M, h, L, w))
    rng = np.random.default_rng(seed)
    syms = rng.choice(sch16.alphabet_values, size=n_symbols)
    s = modulate(sch16, syms)[:-1]
    nseg = n_symbols // seg_symbols
    npts = seg_symbols * sps
    dt = sch16.Ts / sps
    pxx = (np.abs(np.fft.fft(s[:nseg * npts].reshape(nseg, npts), axis=1)) ** 2).mean(axis=0)
    freqs = np.fft.fftfreq(npts, d=dt)
    order = np.argsort(freqs)
    freqs, pxx = freqs[order], pxx[order] * dt / npts

    # expected boxcar periodogram: analytic PSD blurred by the Fejer kernel
    def kernel(x):
        den = npts * np.sin(np.pi * x * dt) ** 2
        num = np.sin(np.pi * x * npts * dt) ** 2
        peak = np.isclose(np.sin(np.pi * x * dt), 0.0, atol=1e-12)
        return np.where(peak, float(npts), num / np.maximum(den, 1e-300)) * dt

    f = est.freq
    mids = 0.5 * (f[1:] + f[:-1])
    masses = 0.5 * (est.S[1:] + est.S[:-1]) * np.diff(f)
    expected = np.zeros(len(freqs))
    for i in range(0, len(freqs), 256):
        fk = freqs[i:i + 256, None]
        expected[i:i + 256] = (kernel(fk - mids[None, :]) * masses[None, :]).sum(axis=1)
        for fm, pm in est.lines:
            expected[i:i + 256] += pm * kernel(fk[:, 0] - fm)

    occ = occupancy(est, 0.99, M)
    lo, hi = occ.windows[0.99]
    band = (freqs >= lo) & (freqs <= hi)
    a, b = expected[band], pxx[band]
    b = b * np.sum(a) / np.sum(b)
    return float(np.sqrt(np.mean((a - b) ** 2) / np.mean(a ** 2)))


@pytest.mark.slow
def test_criterion_07_psd_cross_validation(rng):
    rms_a = _periodogram_rms(CONFIG_A)
    rms_ap = _periodogram_rms(CONFIG_A_PRIME)
    worst_total = 0.0
    for _ in range(50):
        M = int(rng.choice([2, 4]))
        L = int(rng.integers(2, 9))
        h = float(rng.uniform(0.1, 1.3))
        w = float(rng.uniform(0.3, min(2.5, 0.1 + 0.75 * L)))
        est = psd(lorentzian_scheme(M, h, L, w), res=128, nt=64)
        worst_total = max(worst_total, abs(est.total_power - 1.0))
    _report("7 PSD cross-validation",
            rms_a <= 0.05 and rms_ap <= 0.05 and worst_total <= 1e-3,
            f"periodogram RMS A={rms_a:.3f} A'={rms_ap:.3f} (<=5%); "
            f"worst |power-1| = {worst_total:.2e} over 50 schemes")


def test_criterion_08_weak_index_gap():
    sch = lorentzian_scheme(2, 1.5, 5, 1.3)
    res = d_min(sch, m=3, N_max=30)
    dB, _ = upper_bound(sch, 3)
    _report("8 weak-index gap", res.d_squared < dB - 1e-3,
            f"d_min2={res.d_squared:.4f} < d_B2={dB:.4f} (margin "
            f"{dB - res.d_squared:.4f})")


@pytest.mark.slow
def test_criterion_09_ber(config_a):
    t0 = time.time()
    trellis = build_trellis(config_a)
    rng = np.random.default_rng(99)
    syms = rng.integers(0, 2, 10_000)
    syms[-config_a.L:] = 0
    tx, _ = transmit_segments(trellis, syms)
    clean = np.array_equal(viterbi_detect(trellis, tx), syms)

    dmin_sq = d_min(config_a).d_squared
    pts = simulate_ber(config_a, [3.0, 4.0, 5.0, 6.0, 7.0], max_bits=2_000_000,
                       target_errors=100, seed=7, dmin_sq=dmin_sq)
    below = [p for p in pts if p.ber < 1e-3]
    ratio = below[0].ber / below[0].union_bound if below else np.inf
    elapsed = time.time() - t0
    conds = [clean, bool(below), 1 / 3 <= ratio <= 3.0, elapsed < 1800.0]
    _report("9 MLSD link simulation", all(conds),
            f"noiseless exact={clean}; first BER<1e-3 at "
            f"{below[0].ebn0_db if below else '?'} dB ratio {ratio:.2f} "
            f"(within 3x); {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_10_pareto(rng, tmp_path):
    # front extraction vs the quadratic oracle
    pts = [ParetoPoint(M=2, h=0.5, L=5, w=1.0, dmin_sq=float(d), btb=float(b),
                       ssb_loss_percent=1.0, N_used=10)
           for d, b in zip(rng.uniform(0.1, 6.0, 1000), rng.uniform(0.3, 3.0, 1000))]
    fast = {p.params + (p.dmin_sq, p.btb) for p in pareto_front(pts)}
    slow = {p.params + (p.dmin_sq, p.btb) for p in pts
            if not any((q.f1 > p.f1) and (q.f2 > p.f2) for q in pts)}
    oracle_ok = fast == slow

    # desk-scale sweep with the benchmark tuples included
    t0 = time.time()
    space = DesignSpace.desk()
    space = DesignSpace(h_values=space.h_values, L_values=space.L_values,
                        M_values=space.M_values, w_step=space.w_step,
                        extra_points=(CONFIG_A, CONFIG_B))
    cloud = run_grid(space, checkpoint=str(tmp_path / "desk.csv"))
    elapsed = time.time() - t0
    front = pareto_front(cloud)
    front_params = {p.params for p in front}
    membership = CONFIG_A in front_params and CONFIG_B in front_params
    _report("10 Pareto front",
            oracle_ok and membership and elapsed < 3600.0,
            f"oracle match={oracle_ok}; desk grid {len(cloud)} configs in "
            f"{elapsed / 60:.1f} min; A,B in front={membership} "
            f"(front size {len(front)})")
