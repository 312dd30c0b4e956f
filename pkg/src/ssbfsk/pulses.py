"""Frequency pulses and integrated phase responses for CPM waveform synthesis.

Three pulse families are supported:

* ``lorentzian`` -- the SSB-generating pulse g(t) = mu * 2w / ((t - c)^2 + w^2)
  truncated to L symbol intervals and rescaled by the correction factor mu so
  the full 2*pi phase increment survives truncation.
* ``rc`` -- the textbook raised-cosine frequency pulse over L intervals.
* ``gmsk`` -- the Gaussian-filtered rectangular pulse used by GMSK, truncated
  to L intervals and renormalized.

All pulses are stored on the causal support [0, L*Ts] in a single internal
convention: the sampled frequency pulse integrates to 2*pi and the phase
response phi0 rises from 0 to exactly 1/2.  phi0 is always evaluated from a
closed-form antiderivative, never by quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtr

LORENTZIAN = "lorentzian"
RAISED_COSINE = "rc"
GAUSSIAN = "gmsk"

FAMILIES = (LORENTZIAN, RAISED_COSINE, GAUSSIAN)


class ConfigError(ValueError):
    """A parameter combination violates a configuration invariant."""


class ConvergenceError(RuntimeError):
    """A numerical pipeline failed its built-in consistency diagnostic."""


@dataclass(frozen=True)
class PulseSpec:
    """Parameters selecting one frequency pulse.

    ``w`` is only meaningful for the Lorentzian family, ``bt`` only for the
    Gaussian family; both are ignored otherwise.
    """

    family: str
    L: int
    w: float = 0.0
    bt: float = 0.0
    Ts: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown pulse family {self.family!r}; expected one of {FAMILIES}")
        if self.L < 1 or int(self.L) != self.L:
            raise ConfigError(f"L must be a positive integer, got {self.L}")
        if self.Ts <= 0:
            raise ConfigError(f"Ts must be positive, got {self.Ts}")
        if self.family == LORENTZIAN and self.w <= 0:
            raise ConfigError(f"Lorentzian width w must be positive, got {self.w}")
        if self.family == GAUSSIAN and self.bt <= 0:
            raise ConfigError(f"Gaussian bandwidth-time product bt must be positive, got {self.bt}")

    def to_json(self) -> str:
        return json.dumps({"family": self.family, "L": self.L, "w": self.w,
                           "bt": self.bt, "Ts": self.Ts})

    @classmethod
    def from_json(cls, doc: str | dict) -> "PulseSpec":
        d = json.loads(doc) if isinstance(doc, str) else dict(doc)
        allowed = {"family", "L", "w", "bt", "Ts"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"unknown PulseSpec keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class SampledPulse:
    """A discretized frequency pulse with its exact phase response.

    ``g`` and ``phi0`` hold L*samples_per_symbol + 1 samples over [0, L*Ts].
    ``phi0_at`` evaluates the closed-form phase response at arbitrary times
    (0 before the support, 1/2 after it).  ``conventional_cpm`` flags the
    comparison families that use the bipolar alphabet and plain modulation
    index instead of the non-negative alphabet with doubled index.
    """

    spec: PulseSpec
    samples_per_symbol: int
    g: np.ndarray
    phi0: np.ndarray
    mu: float
    phi0_at: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    @property
    def conventional_cpm(self) -> bool:
        return self.spec.family != LORENTZIAN

    @property
    def support(self) -> float:
        return self.spec.L * self.spec.Ts


def correction_factor(L: int, w: float, Ts: float = 1.0) -> float:
    """Scale restoring the full phase increment after truncating the Lorentzian.

    mu(L) = pi / (2 * arctan(L*Ts / (2w))); always > 1 for finite arguments and
    decreasing toward 1 as L*Ts/w grows.
    """
    if L <= 0 or w <= 0 or Ts <= 0:
        raise ValueError(f"correction_factor requires positive arguments, got L={L} w={w} Ts={Ts}")
    return math.pi / (2.0 * math.atan(L * Ts / (2.0 * w)))


def _sample_grid(L: int, sps: int, Ts: float) -> np.ndarray:
    return np.arange(L * sps + 1) * (Ts / sps)


def _check_sps(samples_per_symbol: int):
    if samples_per_symbol < 2:
        raise ConfigError(f"samples_per_symbol must be >= 2, got {samples_per_symbol}")


def _trapezoid_exact(g: np.ndarray, dt: float) -> np.ndarray:
    # the sampled array is the discrete pulse contract: its trapezoidal
    # integral must equal the 2*pi phase increment exactly, so absorb the
    # (tiny) quadrature defect of pointwise sampling into a uniform rescale
    return g * (2.0 * np.pi / np.trapezoid(g, dx=dt))


def lorentzian_pulse(spec: PulseSpec, samples_per_symbol: int = 64) -> SampledPulse:
    """Truncated Lorentzian frequency pulse centered at L*Ts/2.

    The sampled g integrates to 2*pi; phi0 is the arctangent antiderivative
    scaled by 1/(4*pi) and shifted so phi0(0) = 0 and phi0(L*Ts) = 1/2.
    """
    if spec.family != LORENTZIAN:
        raise ValueError(f"lorentzian_pulse called with family {spec.family!r}")
    _check_sps(samples_per_symbol)
    L, w, Ts = spec.L, spec.w, spec.Ts
    c = L * Ts / 2.0
    half_angle = math.atan(c / w)
    mu = correction_factor(L, w, Ts)

    def phi0_at(x):
        x = np.asarray(x, dtype=float)
        inner = (mu / (2.0 * np.pi)) * (np.arctan((x - c) / w) + half_angle)
        return np.where(x <= 0.0, 0.0, np.where(x >= L * Ts, 0.5, inner))

    t = _sample_grid(L, samples_per_symbol, Ts)
    g = _trapezoid_exact(mu * 2.0 * w / ((t - c) ** 2 + w ** 2), Ts / samples_per_symbol)
    return SampledPulse(spec, samples_per_symbol, g, phi0_at(t), mu, phi0_at)


def comparison_pulse(spec: PulseSpec, samples_per_symbol: int = 64) -> SampledPulse:
    """Raised-cosine or Gaussian (GMSK) frequency pulse for baseline schemes.

    Both are normalized so phi0(L*Ts) = 1/2 and carried in the same internal
    scale as the Lorentzian (sampled g integrates to 2*pi); the result is
    flagged ``conventional_cpm`` so downstream modules apply the bipolar
    alphabet and the standard phase law.
    """
    if spec.family == LORENTZIAN:
        raise ValueError("comparison_pulse does not handle the Lorentzian family; "
                         "use lorentzian_pulse")
    _check_sps(samples_per_symbol)
    L, Ts = spec.L, spec.Ts

    if spec.family == RAISED_COSINE:
        mu = 1.0

        def phi0_at(x):
            x = np.asarray(x, dtype=float)
            xc = np.clip(x, 0.0, L * Ts)
            inner = (xc - (L * Ts / (2.0 * np.pi)) * np.sin(2.0 * np.pi * xc / (L * Ts))) / (2.0 * L * Ts)
            return np.where(x <= 0.0, 0.0, np.where(x >= L * Ts, 0.5, inner))

    else:  # GAUSSIAN
        k = 2.0 * np.pi * spec.bt / (math.sqrt(math.log(2.0)) * Ts)
        c = L * Ts / 2.0

        def _anti(x):
            # antiderivative of Q(k x): x*Q(kx) - pdf(kx)/k
            return x * ndtr(-k * x) - np.exp(-0.5 * (k * x) ** 2) / (k * math.sqrt(2.0 * math.pi))

        def _raw(t):
            x = t - c
            return (_anti(x - Ts / 2.0) - _anti(x + Ts / 2.0)) / (2.0 * Ts)

        lo = float(_raw(np.array(0.0)))
        hi = float(_raw(np.array(L * Ts)))
        mu = 0.5 / (hi - lo)  # truncation renormalization, >= 1

        def phi0_at(x):
            x = np.asarray(x, dtype=float)
            inner = (_raw(np.clip(x, 0.0, L * Ts)) - lo) * mu
            return np.where(x <= 0.0, 0.0, np.where(x >= L * Ts, 0.5, inner))

    t = _sample_grid(L, samples_per_symbol, Ts)
    # derive the stored g from the exact phi0 so the 2*pi-integral convention
    # holds for every family: g = 4*pi * dphi0/dt
    if spec.family == RAISED_COSINE:
        g = (4.0 * np.pi) * (1.0 - np.cos(2.0 * np.pi * t / (L * Ts))) / (2.0 * L * Ts)
    else:
        k = 2.0 * np.pi * spec.bt / (math.sqrt(math.log(2.0)) * Ts)
        c = L * Ts / 2.0
        q1 = ndtr(-k * (t - c - Ts / 2.0))
        q2 = ndtr(-k * (t - c + Ts / 2.0))
        g = (4.0 * np.pi) * mu * (q1 - q2) / (2.0 * Ts)
    g = _trapezoid_exact(g, Ts / samples_per_symbol)
    return SampledPulse(spec, samples_per_symbol, g, phi0_at(t), mu, phi0_at)


def make_pulse(spec: PulseSpec, samples_per_symbol: int = 64) -> SampledPulse:
    """Dispatch to the constructor for the requested pulse family."""
    if spec.family == LORENTZIAN:
        return lorentzian_pulse(spec, samples_per_symbol)
    return comparison_pulse(spec, samples_per_symbol)
