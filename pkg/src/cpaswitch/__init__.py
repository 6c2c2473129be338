"""Simulator for a two-sided atom-cavity coherent-perfect-absorption switch.

Rates and detunings are in units of the natural linewidth Gamma.
"""

from .errors import (BandwidthUndefinedError, ConfigError, CpaSwitchError,
                     IntegrationFailure, InvalidInputError, NoPeakError,
                     NumericalError, SingularityError, UndefinedEfficiencyError)
from .model import (FieldSolution, SusceptibilityTerms, normalized_spectrum_point,
                    steady_state_fields, susceptibility)
from .params import ControlField, Dressing, DriveInputs, SystemParams
from .polaritons import (CpaReport, PolaritonSet, coupling_matrix, cpa_criterion_residual,
                         locate_cpa_points, polariton_frequencies)
from .spectra import (BandwidthResult, EfficiencyScan, ScanAxis, SpectrumSeries,
                      bandwidth_and_switch_time, efficiency_scan, sweep_spectrum,
                      switching_efficiency_intracavity, switching_efficiency_output,
                      tune_control_to_channel)

__version__ = "0.1.0"
