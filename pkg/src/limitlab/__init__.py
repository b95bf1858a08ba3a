"""
Plancherel-type measure on the components of tensor powers of the spinor
representation of so(2n+1), with its exact values and the limit shape of
random diagrams.
"""
from .weights import (
    ACoordinates,
    AlgebraConfig,
    DynkinLabels,
    EnumerationCapError,
    OrthogonalWeight,
    WeightError,
    acoords_to_dynkin,
    dynkin_to_acoords,
    dynkin_to_orthogonal,
    enumerate_support,
    orthogonal_to_dynkin,
)
from .measure import (
    MeasureValue,
    dimension,
    dimension_by_roots,
    log_probability,
    multiplicity,
    normalization_check,
    oracle_multiplicity,
    plancherel_probability,
)
from .boundary import DiagramBoundary, boundary_from_acoords, sup_distance
from .limitshape import (
    EquilibriumReport,
    LimitShape,
    check_normalization,
    density,
    density_integral_form,
    endpoint,
    equilibrium_residuals,
    shape,
)
from .asymptotics import (
    DeviationFunction,
    FunctionalBreakdown,
    constant_C,
    decompose,
    distance_dQ,
    functional_J,
    linear_term_L,
    log_weight_asymptotic,
    potential_V0,
    quadratic_Q,
)
from .sampler import (
    ChainState,
    SampleReport,
    convergence_experiment,
    exact_sample,
    mcmc_sample,
    mode_search,
)

__version__ = "0.1.0"

__all__ = [
    "DiagramBoundary",
    "boundary_from_acoords",
    "sup_distance",
    "ACoordinates",
    "AlgebraConfig",
    "DynkinLabels",
    "EnumerationCapError",
    "OrthogonalWeight",
    "WeightError",
    "acoords_to_dynkin",
    "dynkin_to_acoords",
    "dynkin_to_orthogonal",
    "enumerate_support",
    "orthogonal_to_dynkin",
    "MeasureValue",
    "dimension",
    "dimension_by_roots",
    "log_probability",
    "multiplicity",
    "normalization_check",
    "oracle_multiplicity",
    "plancherel_probability",
    "EquilibriumReport",
    "LimitShape",
    "check_normalization",
    "density",
    "density_integral_form",
    "endpoint",
    "equilibrium_residuals",
    "shape",
    "DeviationFunction",
    "FunctionalBreakdown",
    "constant_C",
    "decompose",
    "distance_dQ",
    "functional_J",
    "linear_term_L",
    "log_weight_asymptotic",
    "potential_V0",
    "quadratic_Q",
    "ChainState",
    "SampleReport",
    "convergence_experiment",
    "exact_sample",
    "mcmc_sample",
    "mode_search",
]
