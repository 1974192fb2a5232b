"""Slice regular quaternionic power series: algebra, composition and geometric verifiers."""

from . import kernels
from .errors import (
    HypothesisFailed,
    InputFormatError,
    MathDomainError,
    SliceRegError,
)
from .geocheck import (
    Condition,
    ConditionReport,
    SampleGrid,
    SpiralParams,
    check_condition,
    check_injectivity_slice,
    spiral_curve,
)
from .maps import (
    alexander_op,
    caratheodory_extremal,
    dilation,
    koebe,
    libera_op,
    mobius_series,
    odd_sqrt_transform,
    ratio_transform,
    rotate_conjugate,
    rotation_eval,
)
from .quat import (
    PolarForm,
    Quaternion,
    UnitImaginary,
    embed_slice,
    polar_form,
    qinv,
    qmul,
    unit_imaginary,
)
from .series import (
    Classification,
    SeriesClass,
    Side,
    SliceDecomposition,
    SplitPair,
    TruncatedSeries,
    bullet_compose,
    bullet_inverse,
    classify,
    composition_radius_bound,
    evaluate,
    evaluate_many,
    order,
    representation_formula,
    slice_decomposition,
    slice_derivative,
    split_coefficients,
    star_inverse,
    star_mul,
    star_pow,
)
from .verify import (
    BoundReport,
    CoefficientKind,
    Envelope,
    LaurentTail,
    MNorm,
    NormKind,
    area_complement,
    build_subordinate,
    coefficient_bounds,
    integral_mean_bound,
    koebe_quarter,
    m_norm,
    rogosinski,
    subordination_suite,
    t_transform_bounds,
    verify_envelope,
)

__version__ = "0.1.0"
