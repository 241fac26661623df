"""psskit — positive spanning sets, cosine measures, and k-resilient constructions."""

from .cosine import (
    BasisCertificate,
    CosineResult,
    cosine_measure_generic,
    dedupe_units,
    gamma_u,
)
from .construct import (
    RotationPlan,
    build_pkbasis_blockwise,
    build_pkss_copies,
    build_pkss_global_rotations,
    gen_maximal,
    gen_minimal,
    gen_ospb,
    plane_rotation,
    random_rotation,
    rho,
    rotations_for_block,
    separating_vectors,
)
from .errors import (
    ConstructionError,
    EnumerationLimitError,
    FamilyFormatError,
    InvalidDecompositionError,
    NotPositiveSpanningError,
    PsskitError,
    SingularBasisError,
    SubspaceMembershipError,
)
from .family import (
    DEFAULT_TOLERANCES,
    GramMatrix,
    Subspace,
    Tolerances,
    VectorFamily,
    coordinates,
    dump_family,
    dumps_family,
    family_digest,
    family_from_json_dict,
    gram,
    in_positive_span,
    load_family,
    loads_family,
    normalize,
    span_of,
)
from .kspan import (
    KCosineResult,
    PkssCheck,
    is_pkss,
    is_positive_k_basis,
    is_positively_k_independent,
    k_cosine_measure,
    k_span_equals,
    kth_largest_cosine,
)
from .ospb import (
    OspbBlock,
    OspbDecomposition,
    OspbDetection,
    cosine_measure_ospb,
    detect_ospb,
    validate_decomposition,
)
from .spanning import (
    PssCheck,
    is_critical_vector,
    is_positive_basis,
    is_positively_independent,
    is_pss,
)

__version__ = "0.1.0"

__all__ = [
    "BasisCertificate",
    "ConstructionError",
    "CosineResult",
    "DEFAULT_TOLERANCES",
    "EnumerationLimitError",
    "FamilyFormatError",
    "GramMatrix",
    "InvalidDecompositionError",
    "KCosineResult",
    "NotPositiveSpanningError",
    "OspbBlock",
    "OspbDecomposition",
    "OspbDetection",
    "PkssCheck",
    "PssCheck",
    "PsskitError",
    "RotationPlan",
    "SingularBasisError",
    "Subspace",
    "SubspaceMembershipError",
    "Tolerances",
    "VectorFamily",
    "build_pkbasis_blockwise",
    "build_pkss_copies",
    "build_pkss_global_rotations",
    "coordinates",
    "cosine_measure_generic",
    "dedupe_units",
    "dedupe_units",
    "cosine_measure_ospb",
    "detect_ospb",
    "dump_family",
    "dumps_family",
    "family_digest",
    "family_from_json_dict",
    "gamma_u",
    "gen_maximal",
    "gen_minimal",
    "gen_ospb",
    "plane_rotation",
    "gram",
    "in_positive_span",
    "is_critical_vector",
    "is_pkss",
    "is_positive_basis",
    "is_positive_k_basis",
    "is_positively_independent",
    "is_positively_k_independent",
    "is_pss",
    "k_cosine_measure",
    "k_span_equals",
    "kth_largest_cosine",
    "load_family",
    "loads_family",
    "normalize",
    "random_rotation",
    "rho",
    "rotations_for_block",
    "separating_vectors",
    "span_of",
    "validate_decomposition",
]
