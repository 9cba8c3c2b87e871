"""Predefined-time controller redesign for perturbed integrator chains."""

from .auxcontrollers import (
    AuxController,
    PolyParams,
    bounded_exp_controller,
    gamma_first_order,
    gamma_fn,
    gamma_pair_second_order,
    linear_controller,
    poly_fixed_time,
    second_order_sliding,
    user_controller,
)
from .errors import ConfigError, DisturbanceBoundError, DomainError, NumericalError
from .gainmatrices import GainBasis, build_basis, feedback_row, k_diag, x_from_z, z_from_x
from .simulator import (
    Disturbance,
    SimConfig,
    Trajectory,
    constant,
    detect_settling,
    energy_at,
    make_pulse,
    simulate,
    sinusoid,
    user_bounded,
    write_csv,
    zero_disturbance,
)
from .synthesis import (
    SynthesizedController,
    TerminalController,
    eval_hybrid,
    eval_phi,
    predicted_settling_bound,
    synthesize,
)
from .timescale import TimeScale, kappa, kappa_max, make_timescale, phi, phi_inv, settling_map

__version__ = "0.1.0"
