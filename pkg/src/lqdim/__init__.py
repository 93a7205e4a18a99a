"""L^q dimensions of random self-similar measures, their orthogonal
projections, and convolutions of Cantor measures."""

from .cocycle import (
    CocycleSample,
    PhiEstimate,
    bump_kernel,
    check_equivalence,
    check_submultiplicative,
    estimate_phi,
    tau,
    tau_smooth,
    xi_planar,
)
from .convolution import (
    ConvolutionScheme,
    FamilyShape,
    additivity_formula,
    convolution_dimension_sweep,
    crossing_count,
    family_rectangles,
    log_ratio_rational,
    scaling_grid,
    select_scheme,
)
from .dynamics import (
    SkewState,
    birkhoff_average,
    genericity_test,
    lyapunov_constant,
    normalization_level,
    required_depth,
    skew_step,
)
from .errors import InvalidInputError, InvalidWordError, ResourceLimitError
from .formulas import (
    BlockDecomposition,
    decompose_self_similar,
    dq_formula_random,
    dq_limit_entropy,
    hausdorff_formula,
    projection_hausdorff_lower_bound,
    reconstruct_cylinder,
)
from .ifs import (
    CylinderFrame,
    Rule,
    RuleSet,
    Similarity,
    Word,
    check_strong_separation,
    compose_cylinder,
    cylinder_center_and_diameter,
    min_ball_radius,
    ruleset_from_json,
    ruleset_to_json,
)
from .measures import (
    DyadicMeasure,
    OmegaSequence,
    build_measure,
    check_condition_c,
    convolve_measures,
    measure_from_csv,
    measure_to_csv,
    project_measure,
    rebin,
    sample_omega,
)
from .spectrum import (
    SpectrumCurve,
    box_count,
    check_m_equivalence,
    correlation_sum,
    energy_correlation_dimension,
    estimate_dimension,
    holder_box_lower_bound,
    rebin_builder,
)

__version__ = "0.1.0"
