"""Computational resolution limits for 1-D point-source deconvolution with a sinc kernel."""

from .limits import (
    ConstructionPair,
    LimitReport,
    StabilityBounds,
    compute_s_star,
    construct_number_ambiguity,
    construct_support_ambiguity,
    limit_report,
    number_upper_bound,
    position_error_constant,
    rescale_scene,
    stability_bounds,
    unscale_scene,
    verify_appendix_inequalities,
)
from .model import (
    DiscreteMeasure,
    NoiseSpec,
    ProblemPriors,
    SamplingGrid,
    Scene,
    forward_image,
    generate_noise,
    grid_norm,
    is_admissible,
)
from .multipole import (
    CoefficientVector,
    MultipoleBasis,
    build_basis,
    coefficients,
    limiting_gram,
    limiting_sigma_min,
    sigma_min_curve,
    truncation_residual_bound,
)
from .music import (
    DataMatrix,
    DetectionResult,
    build_data_matrix,
    dadT_sigma_n_bound,
    detect_source_number,
    detection_threshold,
    music_separation_requirement,
    recover_coefficients,
    separation_sweep,
)
from .psf import sinc, sinc_derivative

__version__ = "0.1.0"
