"""Polarization decoherence of single and entangled photon pairs in
fibers with stochastic birefringence.

Closed-form channel results live in the analytic_* modules; the
stochastic_engine module carries the trajectory Monte Carlo used to
validate them; entanglement holds the quadrature-weighted operator
tools (partial transpose, negativity, reductions).
"""

from .core import (
    BellLabel,
    DispersionProfile,
    FiberParameters,
    FrequencyGrid,
    JonesVector,
    PulseEnvelope,
    SinglePhotonDensity,
    TwoPhotonDensity,
    input_single_state,
    input_two_state,
    make_dispersion,
    make_grid,
)
from .stochastic_engine import (
    BirefringenceRealization,
    MCStats,
    TrajectoryConfig,
    backend_name,
    ensemble_single,
    ensemble_two,
    evolve_single,
    sample_realization,
)
from .analytic_single import (
    PurityReport,
    SingleDecayRates,
    decay_rates_single,
    evolve_single_analytic,
    fitted_width,
    intensity_profiles,
    purities,
    purity_numeric,
)
from .analytic_two_separate import (
    DECAY_EIGENVECTORS,
    PolarizationNegativity,
    SeparateDecayRates,
    SeparateNegativityReport,
    assemble_m2,
    chi_factor,
    chi_quadrature,
    critical_length_freq,
    critical_length_pol,
    critical_length_pol_limit,
    decay_rates_separate,
    evolve_separate_bell,
    evolve_separate_bell_pairs,
    evolve_separate_singlet,
    frequency_negativity_grid,
    frequency_negativity_separate,
    negativity_report_separate,
    polarization_density_separate,
    polarization_negativity_separate,
    traced_frequency_kernel,
)
from .analytic_two_common import (
    CommonFiberSpectrum,
    CommonNegativityReport,
    CommonPPTReport,
    anticorrelated_g,
    assemble_mprime,
    block_unitary,
    common_singlet_elements,
    common_singlet_trace,
    common_spectrum,
    critical_length_common,
    evolve_common_singlet,
    evolve_common_singlet_pairs,
    polarization_negativity_common,
    ppt_submatrix_tests,
    traced_common_kernel,
    upsilon_factor,
    upsilon_quadrature,
    v_factors,
    xi_rates,
)
from .entanglement import (
    WeightedOperator,
    apply_factor_unitary,
    from_frequency_kernel,
    from_single_density,
    from_two_density,
    negativity,
    partial_transpose,
    ppt_submatrix,
    reduce,
)

__version__ = "1.0.0"

__all__ = [
    "BellLabel",
    "DispersionProfile",
    "FiberParameters",
    "FrequencyGrid",
    "JonesVector",
    "PulseEnvelope",
    "SinglePhotonDensity",
    "TwoPhotonDensity",
    "input_single_state",
    "input_two_state",
    "make_dispersion",
    "make_grid",
    "BirefringenceRealization",
    "MCStats",
    "TrajectoryConfig",
    "backend_name",
    "ensemble_single",
    "ensemble_two",
    "evolve_single",
    "sample_realization",
    "PurityReport",
    "SingleDecayRates",
    "decay_rates_single",
    "evolve_single_analytic",
    "fitted_width",
    "intensity_profiles",
    "purities",
    "purity_numeric",
    "DECAY_EIGENVECTORS",
    "PolarizationNegativity",
    "SeparateDecayRates",
    "SeparateNegativityReport",
    "assemble_m2",
    "chi_factor",
    "chi_quadrature",
    "critical_length_freq",
    "critical_length_pol",
    "critical_length_pol_limit",
    "decay_rates_separate",
    "evolve_separate_bell",
    "evolve_separate_bell_pairs",
    "evolve_separate_singlet",
    "frequency_negativity_grid",
    "frequency_negativity_separate",
    "negativity_report_separate",
    "polarization_density_separate",
    "polarization_negativity_separate",
    "traced_frequency_kernel",
    "CommonFiberSpectrum",
    "CommonNegativityReport",
    "CommonPPTReport",
    "anticorrelated_g",
    "assemble_mprime",
    "block_unitary",
    "common_singlet_elements",
    "common_singlet_trace",
    "common_spectrum",
    "critical_length_common",
    "evolve_common_singlet",
    "evolve_common_singlet_pairs",
    "polarization_negativity_common",
    "ppt_submatrix_tests",
    "traced_common_kernel",
    "upsilon_factor",
    "upsilon_quadrature",
    "v_factors",
    "xi_rates",
    "WeightedOperator",
    "apply_factor_unitary",
    "from_frequency_kernel",
    "from_single_density",
    "from_two_density",
    "negativity",
    "partial_transpose",
    "ppt_submatrix",
    "reduce",
]
