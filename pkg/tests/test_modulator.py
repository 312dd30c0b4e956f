import numpy as np
import pytest

from ssbfsk import (BIPOLAR, ConfigError, CpmScheme, GAUSSIAN, LORENTZIAN,
                    NON_NEGATIVE, PulseSpec, StreamingModulator, make_pulse,
                    modulate, phase_trajectory)
from conftest import lorentzian_scheme

TWO_PI = 2.0 * np.pi
FIG1_BITS = [1, 1, 1, 1, 0, 1, 1, 0, 0, 1]


def test_all_zero_symbols_idle_carrier():
    sch = lorentzian_scheme(2, 0.78, 5, 1.3)
    traj = phase_trajectory(sch, [0] * 20)
    assert np.allclose(traj.phi, 0.0, atol=1e-15)
    s = modulate(sch, [0] * 20)
    assert np.allclose(s, np.sqrt(sch.E_s / sch.Ts), atol=1e-15)


def test_unit_index_full_cycles():
    # h=1: every completed one-symbol adds exactly one full cycle
    sch = lorentzian_scheme(2, 1.0, 4, 0.3)
    rng = np.random.default_rng(7)
    bits = rng.integers(0, 2, 40).tolist()
    traj = phase_trajectory(sch, bits + [0] * sch.L)
    cycles = traj.phi[-1] / TWO_PI
    assert cycles == pytest.approx(sum(bits), abs=1e-9)


def test_staircase_phase_matches_bit_pattern():
    sch = lorentzian_scheme(2, 1.0, 4, 0.3)
    traj = phase_trajectory(sch, FIG1_BITS + [0] * sch.L)
    assert (np.diff(traj.phi) >= -1e-12).all()
    assert traj.phi[-1] == pytest.approx(TWO_PI * sum(FIG1_BITS), abs=1e-9)
    # the phase flattens over the run of zero symbols once pulses complete
    sps = sch.sps
    flat = slice((len(FIG1_BITS) + sch.L - 1) * sps, (len(FIG1_BITS) + sch.L) * sps)
    assert np.ptp(traj.phi[flat]) < 1e-9


def test_constant_envelope_and_energy():
    sch = lorentzian_scheme(4, 0.49, 2, 0.7)
    rng = np.random.default_rng(3)
    syms = rng.integers(0, 4, 50)
    s = modulate(sch, syms)
    amp = np.sqrt(sch.E_s / sch.Ts)
    assert np.abs(np.abs(s) / amp - 1.0).max() < 1e-12
    energy = np.trapezoid(np.abs(s) ** 2, dx=sch.Ts / sch.sps)
    assert energy == pytest.approx(50 * sch.E_s, abs=1e-9)


def test_phase_continuity_bound():
    sch = lorentzian_scheme(2, 0.78, 5, 1.3)
    rng = np.random.default_rng(11)
    syms = rng.integers(0, 2, 100)
    traj = phase_trajectory(sch, syms)
    jumps = np.abs(np.diff(traj.phi))
    h_eff = sch.h_eff
    bound = TWO_PI * h_eff * (sch.M - 1) / 64 * sch.pulse.g.max() * sch.Ts
    assert jumps.max() < bound
    assert jumps.max() < np.pi


def test_streaming_concatenation_exact():
    sch = lorentzian_scheme(2, 0.78, 5, 1.3)
    rng = np.random.default_rng(5)
    syms = rng.integers(0, 2, 60).tolist()
    whole = modulate(sch, syms)
    for cuts in ([10, 50], [1, 2, 57], [30, 15, 15], [60]):
        sm = StreamingModulator(sch)
        parts, idx = [], 0
        for c in cuts:
            parts.append(sm.feed(syms[idx:idx + c]))
            idx += c
        got = np.concatenate(parts)
        assert len(got) == len(whole)
        assert np.abs(got - whole).max() == 0.0


def test_streaming_reset():
    sch = lorentzian_scheme(2, 0.5, 3, 0.5)
    sm = StreamingModulator(sch)
    a = sm.feed([1, 0, 1])
    sm.reset()
    b = sm.feed([1, 0, 1])
    assert np.array_equal(a, b)


def test_symbol_validation():
    sch = lorentzian_scheme(2, 0.78, 5, 1.3)
    with pytest.raises(ValueError, match="outside alphabet"):
        phase_trajectory(sch, [0, 1, 2])
    with pytest.raises(ValueError, match="outside alphabet"):
        modulate(sch, [-1])


def test_alphabet_pulse_compatibility():
    lor = make_pulse(PulseSpec(LORENTZIAN, L=4, w=0.3), 64)
    gau = make_pulse(PulseSpec(GAUSSIAN, L=4, bt=0.3), 64)
    assert CpmScheme(M=2, h=1.0, pulse=lor).alphabet == NON_NEGATIVE
    assert CpmScheme(M=2, h=0.5, pulse=gau).alphabet == BIPOLAR
    with pytest.raises(ConfigError):
        CpmScheme(M=2, h=1.0, pulse=lor, alphabet=BIPOLAR)
    with pytest.raises(ConfigError):
        CpmScheme(M=2, h=0.5, pulse=gau, alphabet=NON_NEGATIVE)
    with pytest.raises(ConfigError):
        CpmScheme(M=3, h=1.0, pulse=lor)


@pytest.mark.parametrize("family,M,h", [(GAUSSIAN, 2, 0.5), (LORENTZIAN, 4, 0.78)])
def test_trajectory_matches_direct_phase_sum(family, M, h):
    if family == GAUSSIAN:
        pulse = make_pulse(PulseSpec(GAUSSIAN, L=4, bt=0.3), 64)
    else:
        pulse = make_pulse(PulseSpec(LORENTZIAN, L=4, w=0.7), 64)
    sch = CpmScheme(M=M, h=h, pulse=pulse)
    rng = np.random.default_rng(2)
    syms = rng.choice(sch.alphabet_values, size=12)
    traj = phase_trajectory(sch, syms)
    expected = np.zeros_like(traj.t)
    for i, a in enumerate(syms):
        expected += a * sch.pulse.phi0_at(traj.t - i * sch.Ts)
    expected *= TWO_PI * sch.h_eff
    assert np.abs(traj.phi - expected).max() < 1e-10
