"""ssbfsk: analysis and design toolkit for single-sideband CPM waveforms.

The library covers waveform synthesis, minimum-distance error analysis,
numerical power spectral density with sideband metrics, multi-objective
parameter search, and Viterbi-based BER simulation over AWGN.
"""

from .pulses import (ConfigError, ConvergenceError, PulseSpec, SampledPulse,
                     correction_factor, lorentzian_pulse, comparison_pulse,
                     make_pulse, LORENTZIAN, RAISED_COSINE, GAUSSIAN)
from .modulator import (CpmScheme, PhaseTrajectory, StreamingModulator,
                        modulate, phase_trajectory, NON_NEGATIVE, BIPOLAR)
from .distance import (DifferenceSequence, DistanceResult, d_min, d_squared,
                       union_bound_pe, upper_bound)
from .spectrum import (OccupancyReport, PsdEstimate, autocorrelation,
                       characteristic_sum, full_occupancy, occupancy, psd,
                       ssb_loss)
from .optimizer import (DesignSpace, ParetoPoint, evaluate_config,
                        evaluate_scheme, filter_reference, pareto_front,
                        run_grid, w_lim)
from .linksim import BerPoint, Trellis, build_trellis, simulate_ber
from .schemefile import load_scheme, save_scheme, scheme_from_dict, scheme_to_dict

__version__ = "0.1.0"

__all__ = [
    "BIPOLAR", "BerPoint", "ConfigError", "ConvergenceError", "CpmScheme",
    "DesignSpace", "DifferenceSequence", "DistanceResult", "GAUSSIAN",
    "LORENTZIAN", "NON_NEGATIVE", "OccupancyReport", "ParetoPoint",
    "PhaseTrajectory", "PsdEstimate", "PulseSpec", "RAISED_COSINE",
    "SampledPulse", "StreamingModulator", "Trellis", "autocorrelation",
    "build_trellis", "characteristic_sum", "comparison_pulse",
    "correction_factor", "d_min", "d_squared", "evaluate_config",
    "evaluate_scheme", "filter_reference", "full_occupancy", "load_scheme",
    "lorentzian_pulse", "make_pulse", "modulate", "occupancy", "pareto_front",
    "phase_trajectory", "psd", "run_grid", "save_scheme", "scheme_from_dict",
    "scheme_to_dict", "simulate_ber", "ssb_loss", "union_bound_pe",
    "upper_bound", "w_lim",
]
