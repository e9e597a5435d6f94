"""Floquet / Van Vleck treatment of a strongly driven two-level system, with
weak Ohmic dissipation in the Floquet-Bloch-Redfield framework."""

from .bath_dissipation import (
    BathParams,
    DensityTrajectory,
    PositionCoefficients,
    RateSet,
    analytic_density_evolution,
    bath_N,
    mrwa_tensor,
    numeric_fbr_solve,
    numeric_position_table,
    position_table,
    rates,
)
from .dynamics_analysis import (
    DeviationMap,
    ScenarioConfig,
    SpectrumEstimate,
    Trajectory,
    deviation_map,
    fourier_spectrum,
    run_scenario,
    survival_from_density,
    survival_trajectory,
    time_grid,
)
from .errors import NumericalError, ParameterError
from .floquet_engine import (
    CompositeState,
    FloquetPair,
    TruncationConfig,
    build_floquet_matrix,
    diagonalize_floquet,
    fold_quasienergy,
    solve_doublet,
)
from .special_functions import SystemParams, bessel_j, bessel_zero, dressed_delta
from .vanvleck import (
    ResonanceContext,
    Tier,
    floquet_pair,
    mixing_angle,
    resonance_bias,
    rwa_frequency,
    solve_vanvleck,
    survival_nondissipative,
    vv2_frequency,
)

__version__ = "0.1.0"
