"""Tight frames with prescribed column norms.

Construction of normalized tight frames hitting a prescribed diagonal,
machine-verifiable connectivity certificates for the frame space, critical
stratum enumeration, fiber exploration on the Grassmannian, and the rank-2
polygon correspondence.
"""

from .builder import build_ntf, doubled_frame, identity_augmented, odd_frame, simplex_frame
from .errors import FrametopError
from .fiber import count_components, descend_to_fiber, exact_fiber_special, fiber_gradient
from .hypersimplex import (
    AdmissibilityVerdict,
    DiagonalTarget,
    classify_admissibility,
    dual_target,
    in_hypersimplex,
    random_hypothesis_targets,
    random_targets,
    satisfies_hypothesis,
    two_value_target,
)
from .linalg import Frame, ProjectionPoint, factor_projection, gram, random_frame, schur_horn
from .paths import (
    ConnectivityCertificate,
    FramePath,
    VerificationReport,
    certify_equal_norm,
    certify_prop_first,
    certify_prop_second,
    certify_target,
    duality_lift,
    numerical_path_search,
    reduction_sequence,
    step1_path,
    switch_path,
    verify_path,
)
from .polygon import Polygon, frame_km_criterion, frame_to_polygon, km_disconnected
from .strata import (
    HeightSpec,
    StratumCandidate,
    enumerate_strata,
    level_codimension,
    solve_levels,
    sort_spec,
    verify_no_codim_one,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityVerdict",
    "ConnectivityCertificate",
    "DiagonalTarget",
    "Frame",
    "FramePath",
    "FrametopError",
    "HeightSpec",
    "Polygon",
    "ProjectionPoint",
    "StratumCandidate",
    "VerificationReport",
    "build_ntf",
    "certify_equal_norm",
    "certify_prop_first",
    "certify_prop_second",
    "certify_target",
    "classify_admissibility",
    "count_components",
    "descend_to_fiber",
    "doubled_frame",
    "dual_target",
    "duality_lift",
    "enumerate_strata",
    "exact_fiber_special",
    "factor_projection",
    "fiber_gradient",
    "frame_km_criterion",
    "frame_to_polygon",
    "gram",
    "identity_augmented",
    "in_hypersimplex",
    "km_disconnected",
    "level_codimension",
    "numerical_path_search",
    "odd_frame",
    "random_frame",
    "random_hypothesis_targets",
    "random_targets",
    "reduction_sequence",
    "satisfies_hypothesis",
    "schur_horn",
    "simplex_frame",
    "solve_levels",
    "sort_spec",
    "step1_path",
    "switch_path",
    "two_value_target",
    "verify_no_codim_one",
    "verify_path",
]
