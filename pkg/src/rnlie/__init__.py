"""Curvature and moment-map machinery for nilpotent Lie algebras.

The package computes Ricci operators of nilpotent metric Lie algebras
and their rank-one solvable extensions, weight polytopes and moment-map
images, linear-programming certificates of Ricci-negative derivations,
trace-normalized cone sections, and degenerations of brackets.
"""

from .brackets import (
    Bracket,
    BasisChange,
    act,
    center,
    direct_sum,
    is_lie,
    lower_central_series,
    nilpotency_step,
    validate_jacobi,
)
from .certify import (
    Infeasible,
    RnWitness,
    SearchFailure,
    SrnCertificate,
    Unknown,
    certify_srn_nice,
    certify_srn_sampled,
    constructive_nonneg,
    necessary_condition,
    search_rn_metric,
)
from .cone import (
    AuditReport,
    ConeSection,
    WeylReport,
    cone_membership,
    cone_section,
    containment_audit,
    weyl_invariance_check,
)
from .corpus import CorpusEntry, corpus, corpus_names
from .curvature import (
    KoszulReport,
    MetricParams,
    RicciBlock,
    extension_bracket,
    is_ricci_negative,
    koszul_oracle,
    ricci_extension,
    ricci_nilpotent,
)
from .degeneration import (
    DegenerationCurve,
    PinchingFailure,
    PinchingResult,
    TrajectoryPoint,
    diagonal_power_curve,
    face_steering_curve,
    heintze_curve,
    heintze_degeneration,
    limit_bracket,
    pinching_transfer,
    trajectory,
)
from .derivations import (
    Torus,
    derivation_space,
    diagonal_torus,
    is_derivation,
    jordan_decompose,
    leibniz_residual,
)
from .errors import NumericalError, PreconditionError
from .io import dumps_algebra, load_algebra, loads_algebra, save_algebra
from .moment import (
    MomentValue,
    NiceBasisReport,
    OrbitSample,
    WeightPolytope,
    closure_faces,
    moment_map,
    nice_basis_check,
    orbit_sample,
    weight_matrix,
    weight_polytope,
    weight_vector,
)

__all__ = [
    "Bracket",
    "BasisChange",
    "act",
    "center",
    "direct_sum",
    "is_lie",
    "lower_central_series",
    "nilpotency_step",
    "validate_jacobi",
    "Infeasible",
    "RnWitness",
    "SearchFailure",
    "SrnCertificate",
    "Unknown",
    "certify_srn_nice",
    "certify_srn_sampled",
    "constructive_nonneg",
    "necessary_condition",
    "search_rn_metric",
    "AuditReport",
    "ConeSection",
    "WeylReport",
    "cone_membership",
    "cone_section",
    "containment_audit",
    "weyl_invariance_check",
    "CorpusEntry",
    "corpus",
    "corpus_names",
    "KoszulReport",
    "MetricParams",
    "RicciBlock",
    "extension_bracket",
    "is_ricci_negative",
    "koszul_oracle",
    "ricci_extension",
    "ricci_nilpotent",
    "DegenerationCurve",
    "PinchingFailure",
    "PinchingResult",
    "TrajectoryPoint",
    "diagonal_power_curve",
    "face_steering_curve",
    "heintze_curve",
    "heintze_degeneration",
    "limit_bracket",
    "pinching_transfer",
    "trajectory",
    "Torus",
    "derivation_space",
    "diagonal_torus",
    "is_derivation",
    "jordan_decompose",
    "leibniz_residual",
    "NumericalError",
    "PreconditionError",
    "dumps_algebra",
    "load_algebra",
    "loads_algebra",
    "save_algebra",
    "MomentValue",
    "NiceBasisReport",
    "OrbitSample",
    "WeightPolytope",
    "closure_faces",
    "moment_map",
    "nice_basis_check",
    "orbit_sample",
    "weight_matrix",
    "weight_polytope",
    "weight_vector",
]

__version__ = "0.1.0"
