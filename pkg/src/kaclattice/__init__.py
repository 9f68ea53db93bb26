"""Finite-dimensional Kac algebra (anti)coactions, Jones towers and
standard-invariant lattices, all at the level of structure constants."""

__version__ = "0.1.0"

from . import config
from ._backend import backend_name
from .errors import *  # noqa: F401,F403
from .algebra import (
    BlockStructure,
    FiniteStarAlgebra,
    SubalgebraEmbedding,
    algebra_from_matrices,
    canonical_trace,
    canonical_weights_exact,
    commutative_algebra,
    conditional_expectation,
    function_of,
    left_regular,
    matrix_algebra,
    multimatrix_algebra,
    opposite_algebra,
    scalars,
    subalgebra_from_basis,
    tensor_algebra,
    wedderburn,
    xi_element,
)
from .kac import (
    FiniteGroupTable,
    GroupAction,
    KacAlgebra,
    crossed_product,
    cyclic_group,
    dihedral_group,
    direct_product,
    function_algebra,
    group_algebra,
    group_from_permutations,
    klein_four_group,
    permutation_action,
    quaternion_group,
    symmetric_group,
    translation_action,
    trivial_action,
    validate_kac,
)
from .corep import (
    Corepresentation,
    conjugate,
    corep_of_coaction,
    decompose_regular,
    diagonal_corepresentation,
    direct_sum,
    endomorphism_algebra,
    fixed_vectors,
    intertwiners,
    isotypic_components,
    pi_u,
    pi_u_expectation,
    tensor_product,
    trivial_corepresentation,
    unitary_conjugate,
)
from .coaction import (
    CoactionMap,
    EigenmatrixResult,
    FixedPointAlgebra,
    SpectralDecomposition,
    averaging,
    averaging_matrix,
    beta_tensor_pi,
    center_basis,
    coaction_of_action,
    def31_views,
    eigenmatrix,
    fixed_point_tensor,
    inner_coaction,
    invariant_center,
    invariant_vectors,
    is_relatively_ergodic,
    kappa_delta,
    regular_coaction,
    spectral,
    t_iota_v,
    transposition,
    trivial_coaction,
)
from .tower import (
    CommutingSquareData,
    InclusionData,
    TowerLevelChain,
    basic_construction,
    diagonal_inclusion,
    extend_anticoaction,
    fixed_point_square,
    inclusion_data,
    integrality_check,
    jones_tower,
    lemma_square_coaction,
    markov_index,
    restrict_coaction,
    scalar_inclusion,
    square_check,
)
from .invariant import (
    InvariantLattice,
    PrincipalGraphData,
    principal_graph,
    r_lattice,
    standard_invariant,
)
from .document import (
    WorkspaceDocument,
    load_document,
    loads_document,
    validate_object,
)
