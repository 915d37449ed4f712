"""Exact evolution of optical continuous-variable states.

Closed-form characteristic-function propagators for parametric drive with
amplitude damping (thermal or squeezed baths) and phase damping, Gaussian
covariance dynamics, purity and two-mode entanglement analytics, and a
truncated Fock-space Lindblad integrator used as a brute-force validator.
"""

from .charfunc import (
    CharFunc,
    chi_grid,
    eval_gaussian_chi,
    evolve_chi_amp_phase,
    evolve_chi_amplification,
    evolve_chi_amplitude_damping,
    evolve_chi_general,
    evolve_chi_phase_damping,
    fock_state_charfunc,
    gaussian_charfunc,
    phase_quadrature_deviation,
)
from .errors import (
    CutoffTooSmallError,
    DegenerateSteadyStateError,
    OverAmplificationError,
    UnphysicalStateError,
    UnsupportedStateError,
)
from .evolution import (
    PropagatorMN,
    SteadyAlphaBeta,
    alpha_beta_residuals,
    block_propagator,
    evolve_gaussian,
    matrix_cosh_sinh,
    one_mode_alpha_beta,
    propagate_mn,
    propagate_mn_equal_damping,
    propagate_mn_numeric,
    propagate_mn_real_eta,
    real_eta_closed_form_two_mode,
    solve_alpha_beta,
    steady_state,
    two_mode_pauli_closed_form,
)
from .fock import (
    FockDensity,
    chi_from_rho,
    displacement_operator,
    gaussian_to_fock,
    integrate,
    lindblad_rhs,
    purity_from_rho,
)
from .metrics import (
    EofResult,
    SeparabilityReport,
    entanglement_threshold,
    eof_saturation,
    eof_symmetric,
    eof_time_curve,
    overamplified_vacuum_inseparable,
    ppt_min_symplectic,
    purity_general,
    purity_one_mode,
    purity_squeezed_thermal_t,
    simon_separability,
    standard_form,
    steady_state_inseparable,
    ultimate_purity,
    ultimate_purity_max,
)
from .states import (
    GaussianState,
    RealCM,
    SystemParams,
    check_physical,
    complex_to_real_cm,
    is_physical,
    make_coherent,
    make_squeezed,
    make_thermal,
    make_two_mode_squeezed_thermal,
    real_to_complex_cm,
    symplectic_form,
    vacuum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
