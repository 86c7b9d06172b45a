"""stochmap: linear stochastic maps on finite-dimensional density matrices.

The toolkit represents maps in action form and Choi form, classifies them
(completely positive / positive / neither), computes canonical operator
decompositions with positive and negative parts, parameterizes them through
hyperbolic and trigonometric angles, and realizes them as contractions of
unitary or pseudo-unitary evolution on a system-reservoir product space.
"""

from . import errors, tolerances
from .decomposition import (
    CanonicalDecomposition,
    decompose,
    reconstruct,
    verify_trace_condition,
)
from .dilation import (
    Dilation,
    contract,
    dilate,
    dilation_from_evolution,
    induced_map,
    pseudo_dilate,
    stinespring_dilate,
)
from .linalg import (
    EigenSystem,
    dagger,
    frobenius,
    hermitian_eig,
    partial_trace,
    pseudo_orthonormal_completion,
    tensor,
    unitary_completion,
)
from .maps import (
    BlockPositivityCertificate,
    DynamicalMap,
    MapClassification,
    apply_map,
    check_hermiticity_preserving,
    check_trace_preserving,
    classify,
    convex_combine,
    depolarizing_map,
    from_kraus_action,
    identity_map,
    is_block_positive,
    is_completely_positive,
    maximally_entangled_projector,
    reshuffle,
    tensor_with_identity,
    transpose_map,
    unitary_conjugation_map,
)
from .parameterization import (
    HyperbolicFrame,
    ParameterSet,
    StageRecord,
    extract_isometry_families,
    hyperbolic_frame,
    parameter_count,
    parameterize,
    rebuild_map,
    rebuild_operators,
    reduce_stage,
)
from .sampling import (
    random_cp_map,
    random_hermiticity_preserving_map,
    random_ncp_map,
    random_signed_family,
    random_trace_preserving_map,
    random_unitary,
)
from .states import (
    DensityMatrix,
    ReservoirState,
    mixed_reservoir,
    new_density,
    pure_reservoir,
    random_density,
)

__version__ = "0.1.0"
