"""Coherent MLSD link simulation over AWGN.

The receiver runs the Viterbi algorithm on the CPM trellis.  With h = p/q in
lowest terms the accumulated phase of completed symbols lives on multiples of
2*pi/q (2*pi/(2q) for the bipolar alphabet), so a state is one phase index
plus the last L-1 symbols; every state has exactly M outgoing and M incoming
branches.  Branch metrics are correlations of the received segment against
the branch's constant-envelope reference segment.

Frames are terminated with L known symbols so decisions near the frame end
stay reliable; terminal symbols are excluded from the error count.  Each SNR
point draws noise from its own counter-based stream, so points are
independent and reproducible regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import distance
from .modulator import NON_NEGATIVE, CpmScheme
from .pulses import ConfigError

MAX_PHASE_DENOMINATOR = 200
DEFAULT_SPS = 16


@dataclass(frozen=True)
class Trellis:
    """State machine plus per-branch reference segments for one scheme."""

    scheme: CpmScheme
    sps: int
    q: int                      # phase denominator (after alphabet scaling)
    phases: np.ndarray          # distinct phase numerators reachable from 0
    n_states: int
    n_hist: int
    next_state: np.ndarray = field(repr=False)   # (n_states, M)
    seg_index: np.ndarray = field(repr=False)    # (n_states, M) -> row of segments
    segments: np.ndarray = field(repr=False)     # (M^L, sps) unit-envelope refs
    state_rot: np.ndarray = field(repr=False)    # per-state phase rotation e^{j theta}
    pred_state: np.ndarray = field(repr=False)   # (n_states, M)
    pred_input: np.ndarray = field(repr=False)   # (n_states, M)


@dataclass(frozen=True)
class BerPoint:
    ebn0_db: float
    bit_errors: int
    bits: int
    ber: float
    union_bound: float


def _rationalize(h: float) -> tuple[int, int]:
    fr = Fraction(h).limit_denominator(MAX_PHASE_DENOMINATOR)
    if abs(float(fr) - h) > 1e-9:
        raise ConfigError(
            f"h={h} is not a ratio with denominator <= {MAX_PHASE_DENOMINATOR}; "
            "pass a rationalizable modulation index")
    return fr.numerator, fr.denominator


def build_trellis(scheme: CpmScheme, sps: int = DEFAULT_SPS) -> Trellis:
    """Enumerate phase states and synthesize branch reference segments."""
    p, q = _rationalize(scheme.h)
    M, L = scheme.M, scheme.L
    vals = scheme.alphabet_values
    # completed-symbol advance in cycles: h_eff * a / 2 = (p/q) * a * scale
    # non-negative alphabet: h*a    -> numerator p*a  (mod q)
    # bipolar alphabet:      h*a/2  -> numerator p*a  (mod 2q)
    den = q if scheme.alphabet == NON_NEGATIVE else 2 * q
    steps = {int(a): (p * int(a)) % den for a in vals}

    reach = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for ph in frontier:
            for a in vals:
                t = (ph + steps[int(a)]) % den
                if t not in reach:
                    reach.add(t)
                    nxt.append(t)
        frontier = nxt
    phases = np.array(sorted(reach))
    phase_pos = {int(ph): i for i, ph in enumerate(phases)}

    n_hist = M ** (L - 1)
    n_states = len(phases) * n_hist
    u = np.arange(sps) / sps * scheme.Ts
    phi0 = scheme.pulse.phi0_at
    # window code digits: base-M, least-significant digit = most recent symbol
    codes = np.arange(M ** L)
    seg_phase = np.zeros((M ** L, sps))
    cc = codes.copy()
    for dshift in range(L):
        seg_phase += vals[cc % M, None] * phi0(u[None, :] + dshift * scheme.Ts)
        cc //= M
    segments = np.exp(1j * 2.0 * np.pi * scheme.h_eff * seg_phase)

    nh2 = M ** (L - 2) if L >= 2 else 1
    next_state = np.zeros((n_states, M), dtype=np.int64)
    seg_index = np.zeros((n_states, M), dtype=np.int64)
    for s in range(n_states):
        ph_i, hist = divmod(s, n_hist)
        for ai in range(M):
            seg_index[s, ai] = ai + hist * M
            if L >= 2:
                oldest = hist // nh2
                new_hist = ai + (hist % nh2) * M
            else:
                oldest = ai
                new_hist = 0
            new_ph = (int(phases[ph_i]) + steps[int(vals[oldest])]) % den
            next_state[s, ai] = phase_pos[new_ph] * n_hist + new_hist
    state_rot = np.exp(2j * np.pi * phases / den)[np.arange(n_states) // n_hist]

    pred_state = np.zeros((n_states, M), dtype=np.int64)
    pred_input = np.zeros((n_states, M), dtype=np.int64)
    fill = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        for ai in range(M):
            ns = next_state[s, ai]
            pred_state[ns, fill[ns]] = s
            pred_input[ns, fill[ns]] = ai
            fill[ns] += 1
    if not (fill == M).all():
        raise ConfigError("trellis is not M-in/M-out regular; unreachable states present")

    return Trellis(scheme=scheme, sps=sps, q=q, phases=phases,
                   n_states=n_states, n_hist=n_hist, next_state=next_state,
                   seg_index=seg_index, segments=segments, state_rot=state_rot,
                   pred_state=pred_state, pred_input=pred_input)


def transmit_segments(trellis: Trellis, symbol_indices: np.ndarray,
                      start_state: int = 0) -> tuple[np.ndarray, int]:
    """Per-symbol signal segments walked along the trellis (unit energy/Ts)."""
    amp = np.sqrt(trellis.scheme.E_s / trellis.scheme.Ts)
    out = np.empty((len(symbol_indices), trellis.sps), dtype=complex)
    s = start_state
    for n, ai in enumerate(symbol_indices):
        out[n] = trellis.state_rot[s] * trellis.segments[trellis.seg_index[s, ai]]
        s = int(trellis.next_state[s, ai])
    return amp * out, s


def viterbi_detect(trellis: Trellis, rx_segments: np.ndarray,
                   start_state: int = 0) -> np.ndarray:
    """Maximum-likelihood sequence detection; returns alphabet indices."""
    ns = trellis.n_states
    n_sym = len(rx_segments)
    metric = np.full(ns, -np.inf)
    metric[start_state] = 0.0
    back = np.zeros((n_sym, ns), dtype=np.int8)
    seg_conj = trellis.segments.conj()
    rot_conj = trellis.state_rot.conj()
    idx = np.arange(ns)
    ps, pi = trellis.pred_state, trellis.pred_input
    for n in range(n_sym):
        corr = seg_conj @ rx_segments[n]
        bm = np.real(rot_conj[:, None] * corr[trellis.seg_index])
        cand = metric[ps] + bm[ps, pi]
        choice = np.argmax(cand, axis=1)
        metric = cand[idx, choice]
        back[n] = choice
    s = int(np.argmax(metric))
    out = np.zeros(n_sym, dtype=np.int64)
    for n in range(n_sym - 1, -1, -1):
        k = back[n, s]
        out[n] = pi[s, k]
        s = int(ps[s, k])
    return out


def _bit_errors(a: np.ndarray, b: np.ndarray, M: int) -> int:
    """Bit errors under the natural binary symbol labeling."""
    x = np.bitwise_xor(a.astype(np.int64), b.astype(np.int64))
    bits = 0
    while x.any():
        bits += int(np.count_nonzero(x & 1))
        x >>= 1
    return bits


def simulate_ber(scheme: CpmScheme, ebn0_db_list, max_bits: int = 1_000_000,
                 target_errors: int = 100, seed: int = 0,
                 sps: int = DEFAULT_SPS, frame_symbols: int = 1000,
                 dmin_sq: float | None = None) -> list[BerPoint]:
    """Monte-Carlo BER of the coherent MLSD receiver, one point per Eb/N0.

    Noise is complex AWGN with per-sample variance N0/dt (N0/2 per real
    dimension) where Eb = Es/log2(M).  Each point stops at ``target_errors``
    bit errors or ``max_bits`` transmitted bits.
    """
    if max_bits < 10_000:
        raise ValueError(f"max_bits must be at least 10^4, got {max_bits}")
    trellis = build_trellis(scheme, sps)
    if dmin_sq is None:
        dmin_sq = distance.d_min(scheme).d_squared
    M, L = scheme.M, scheme.L
    bits_per_sym = int(np.log2(M))
    frame_symbols = max(frame_symbols, 5 * (L + trellis.q))
    dt = scheme.Ts / sps
    points = []
    for pi_, ebn0 in enumerate(ebn0_db_list):
        rng = np.random.Generator(np.random.Philox(key=[int(seed), pi_]))
        eb = scheme.E_s / bits_per_sym
        n0 = eb * 10.0 ** (-ebn0 / 10.0)
        sigma = np.sqrt(n0 / (2.0 * dt))
        errors = 0
        bits = 0
        while errors < target_errors and bits < max_bits:
            syms = rng.integers(0, M, frame_symbols)
            syms[-L:] = 0  # known termination, excluded from accounting
            tx, _ = transmit_segments(trellis, syms)
            noise = sigma * (rng.standard_normal(tx.shape)
                             + 1j * rng.standard_normal(tx.shape))
            dec = viterbi_detect(trellis, tx + noise)
            errors += _bit_errors(dec[:-L], syms[:-L], M)
            bits += (frame_symbols - L) * bits_per_sym
        points.append(BerPoint(ebn0_db=float(ebn0), bit_errors=int(errors),
                               bits=int(bits), ber=errors / bits,
                               union_bound=float(distance.union_bound_pe(dmin_sq, ebn0))))
    return points
