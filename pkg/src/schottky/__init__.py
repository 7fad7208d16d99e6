"""Classical Schottky groups: limit sets, dimension estimates, quasi-circles,
a Frechet metric on closed curves, and degenerations of circle families."""

from .moebius import INF, Circle, MapKind, MoebiusMap, apply, classify, compose, derivative, fixed_points, inverse
from .group import MarkedSchottkyGroup, enumerate_words, limit_set_sample, nested_disk, verify_classical
from .dimension import (
    dimension_report,
    estimate_delta_poincare,
    estimate_delta_transfer,
    poincare_diverges_at_one,
    poincare_partial_sums,
)
from .quasicircle import (
    GeneratingCurveSpec,
    PolyCurve,
    build_quasicircle,
    default_generating_curve,
    invariance_residual,
    jordan_check,
    length_comparability,
    linearity_and_angles,
)
from .curvespace import cauchy_diagnostic, frechet_closed, neighborhood_filter
from .singularity import CircleFamily, SingularityKind, first_singularity, gap_profile, singular_curve_probe

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Circle",
    "MapKind",
    "MoebiusMap",
    "apply",
    "classify",
    "compose",
    "derivative",
    "fixed_points",
    "inverse",
    "MarkedSchottkyGroup",
    "enumerate_words",
    "limit_set_sample",
    "nested_disk",
    "verify_classical",
    "dimension_report",
    "estimate_delta_poincare",
    "estimate_delta_transfer",
    "poincare_diverges_at_one",
    "poincare_partial_sums",
    "GeneratingCurveSpec",
    "PolyCurve",
    "build_quasicircle",
    "default_generating_curve",
    "invariance_residual",
    "jordan_check",
    "length_comparability",
    "linearity_and_angles",
    "cauchy_diagnostic",
    "frechet_closed",
    "neighborhood_filter",
    "CircleFamily",
    "SingularityKind",
    "first_singularity",
    "gap_profile",
    "singular_curve_probe",
]
