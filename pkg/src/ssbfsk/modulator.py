"""Baseband CPM signal synthesis.

The transmitted signal is s(t) = sqrt(Es/Ts) * exp(j*phi(t)) with

    phi(t) = 2*pi*h_eff * sum_i a_i * phi0(t - i*Ts)

where h_eff doubles the modulation index for the non-negative SSB alphabet
(each completed symbol then advances the phase by 2*pi*h*a_i) and equals h
for the bipolar comparison schemes (advance pi*h*a_i).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pulses import ConfigError, LORENTZIAN, SampledPulse

NON_NEGATIVE = "nonnegative"
BIPOLAR = "bipolar"


@dataclass(frozen=True)
class CpmScheme:
    """Full parameter tuple for one modulation configuration."""

    M: int
    h: float
    pulse: SampledPulse
    E_s: float = 1.0
    alphabet: str = ""

    def __post_init__(self):
        if self.M not in (2, 4, 8):
            raise ConfigError(f"alphabet size M must be 2, 4 or 8, got {self.M}")
        if self.h <= 0:
            raise ConfigError(f"modulation index h must be positive, got {self.h}")
        if self.E_s <= 0:
            raise ConfigError(f"symbol energy must be positive, got {self.E_s}")
        expected = BIPOLAR if self.pulse.conventional_cpm else NON_NEGATIVE
        if not self.alphabet:
            object.__setattr__(self, "alphabet", expected)
        elif self.alphabet != expected:
            raise ConfigError(
                f"alphabet {self.alphabet!r} is incompatible with pulse family "
                f"{self.pulse.spec.family!r}; expected {expected!r}")

    @property
    def h_eff(self) -> float:
        """Effective index applied in the phase law."""
        return self.h if self.alphabet == BIPOLAR else 2.0 * self.h

    @property
    def alphabet_values(self) -> np.ndarray:
        if self.alphabet == NON_NEGATIVE:
            return np.arange(self.M)
        return np.arange(-(self.M - 1), self.M, 2)

    @property
    def Ts(self) -> float:
        return self.pulse.spec.Ts

    @property
    def L(self) -> int:
        return self.pulse.spec.L

    @property
    def sps(self) -> int:
        return self.pulse.samples_per_symbol

    def time_grid(self, n_symbols: int) -> np.ndarray:
        return np.arange(n_symbols * self.sps + 1) * (self.Ts / self.sps)


@dataclass(frozen=True)
class PhaseTrajectory:
    t: np.ndarray
    phi: np.ndarray = field(repr=False)


def _accumulated_phase(values: np.ndarray, n_samples: int, sps: int, L: int,
                       phi0_samples: np.ndarray, h_eff: float,
                       lead_cycles: float = 0.0) -> np.ndarray:
    """Phase samples for a run of symbol values on the uniform grid.

    ``values`` may be any reals (symbol or difference values).  A symbol's
    pulse occupies L intervals; afterwards it contributes a constant half
    cycle.  ``lead_cycles`` adds a constant 2*pi*h_eff*lead_cycles offset
    (used by the streaming modulator for already-completed history).
    """
    N = len(values)
    n = np.arange(n_samples)
    jn, rn = np.divmod(n, sps)
    # completed symbols: i <= jn - L contribute 0.5 each
    csum = np.concatenate([[0.0], np.cumsum(values)])
    done = np.clip(jn - L + 1, 0, N)
    phase_cycles = 0.5 * csum[done] + lead_cycles
    phi = np.zeros(n_samples)
    padded = np.concatenate([np.zeros(L - 1), values, np.zeros(L)])
    # active pulses: symbols jn-d for d = 0..L-1, evaluated at phi0[rn + d*sps]
    for d in range(L):
        idx = jn - d + (L - 1)
        phi += padded[idx] * phi0_samples[rn + d * sps]
    return 2.0 * np.pi * h_eff * (phi + phase_cycles)


def _validate_symbols(scheme: CpmScheme, symbols) -> np.ndarray:
    arr = np.asarray(symbols)
    vals = scheme.alphabet_values
    if arr.size and not np.isin(arr, vals).all():
        bad = arr[~np.isin(arr, vals)][0]
        raise ValueError(f"symbol {bad} outside alphabet {vals.tolist()}")
    return arr.astype(float)


def phase_trajectory(scheme: CpmScheme, symbols) -> PhaseTrajectory:
    """Unwrapped information-carrying phase on the uniform sampling grid."""
    vals = _validate_symbols(scheme, symbols)
    n_samples = len(vals) * scheme.sps + 1
    phi = _accumulated_phase(vals, n_samples, scheme.sps, scheme.L,
                             scheme.pulse.phi0, scheme.h_eff)
    return PhaseTrajectory(scheme.time_grid(len(vals)), phi)


def modulate(scheme: CpmScheme, symbols) -> np.ndarray:
    """Complex baseband signal with constant envelope sqrt(Es/Ts)."""
    traj = phase_trajectory(scheme, symbols)
    return np.sqrt(scheme.E_s / scheme.Ts) * np.exp(1j * traj.phi)


class StreamingModulator:
    """Incremental modulator carrying phase state between blocks.

    Feeding blocks b1 then b2 produces exactly the samples of
    ``modulate(scheme, b1 + b2)`` split at the block boundary.  Instances
    hold mutable state and are confined to one thread at a time.
    """

    def __init__(self, scheme: CpmScheme):
        self.scheme = scheme
        self.reset()

    def reset(self):
        self._tail: list[float] = []
        self._done_cycles = 0.0
        self._emitted_any = False

    def feed(self, symbols) -> np.ndarray:
        sch = self.scheme
        vals = _validate_symbols(sch, symbols)
        if vals.size == 0:
            return np.zeros(0, dtype=complex)
        t = len(self._tail)
        virt = np.concatenate([self._tail, vals])
        n_samples = len(virt) * sch.sps + 1
        phi = _accumulated_phase(virt, n_samples, sch.sps, sch.L,
                                 sch.pulse.phi0, sch.h_eff,
                                 lead_cycles=self._done_cycles)
        start = t * sch.sps + (1 if self._emitted_any else 0)
        out = np.sqrt(sch.E_s / sch.Ts) * np.exp(1j * phi[start:])
        keep = sch.L - 1
        new_hist = list(virt[-keep:]) if keep else []
        dropped = virt[: len(virt) - len(new_hist)]
        self._done_cycles += 0.5 * float(np.sum(dropped))
        self._tail = new_hist
        self._emitted_any = True
        return out
