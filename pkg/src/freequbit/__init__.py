"""Free-electron probing of qubits: couplings, EELS spectra, pump-probe scans."""

__version__ = "0.1.0"

from .coupling import (
    CouplingConstant,
    PhysicalParams,
    coupling_g,
    magnus_order_estimate,
    optimal_velocity,
)
from .electron import ElectronLadderState, disperse, ladder_moment, make_duo, make_pinem, make_unshaped
from .errors import (
    AccuracyError,
    AmbiguousPeaksError,
    ConvergenceError,
    FreeQubitError,
    IndeterminateStateError,
    TruncationError,
    ValidationError,
)
from .qubit import DecayParams, QubitDensityMatrix, apply_rotation, bloch_state, evolve
from .scattering import Spectrum, apply_scattering, average_gain, delta_p, eels_spectrum
from .series import ScanSeries
