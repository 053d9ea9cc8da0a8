"""Dissipation-induced phase transitions at desk scale.

Mean-field phases, Bogoliubov excitations, fluctuation stability and
covariance, and Keldysh response functions for a Kerr parametric
oscillator and an interpolating Dicke--Tavis-Cummings model, plus a
damped-oscillator reference pipeline and a phase-diagram engine.
"""

from .bogoliubov import (
    BogoliubovTransform,
    ExcitationMode,
    QuadraticForm,
    diagonalize_excitations,
    dynamical_matrix,
    particle_hole_metric,
    symplectic_norm,
)
from .idtc import IdtcParams, IdtcState
from .kpo import KpoParams, KpoState
from .numerics import (
    BracketingError,
    ConvergenceError,
    DegenerateInputError,
    NumericsError,
    PoleError,
    StabilityError,
    StabilityReport,
    ValidationError,
    eig,
    newton_multistart,
    roots_polynomial,
    solve_lyapunov,
)
from .oscillator import OscParams
from .phasediag import GridSpec, PhaseDiagram, RegionLabel, classify_point, sweep, trace_boundary
from .response import (
    GreensSet,
    SpectraTable,
    build_spectra,
    fluorescence,
    keldysh_green,
    mode_occupation,
    power_spectrum,
    response_from_jacobian,
    retarded_green,
    spectral_function,
)

__version__ = "0.1.0"
