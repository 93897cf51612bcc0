"""Vandermonde-space approximation theory: matrices, constants, bounds and oracles."""

from .core import (
    BoundViolation,
    InverseNormBounds,
    Reduction,
    SharpnessInstance,
    SingularValueBounds,
    approximation_lower_bound,
    as_nodes,
    det_ratio,
    elementary_symmetric,
    elementary_symmetric_all,
    eta_lower_bound,
    eta_vector,
    inverse_inf_norm_bound,
    lagrange_inverse,
    lam,
    min_separation,
    min_singular_bound,
    projection_distance,
    reduce_vandermonde,
    row_scales,
    scaled_vandermonde,
    sharpness_construction,
    sharpness_upper_bound,
    stability_eta_bound,
    vandermonde_matrix,
    xi,
    zeta,
)
from .oracles import (
    SearchResult,
    StabilityCheck,
    min_eta_oracle,
    min_eta_search,
    nonlinear_approx_oracle,
    nonlinear_approx_search,
    stability_check,
)
