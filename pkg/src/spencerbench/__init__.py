"""Exact-arithmetic workbench for constraint-coupled Spencer operators,
mirror transformations, and rank-based cohomology over finite-dimensional
Lie algebras."""

from .errors import (
    DegenerateInputError,
    FormatError,
    MismatchError,
    SpencerbenchError,
    ValidationError,
)
from .liealg import (
    AlgebraVector,
    DualVector,
    LieAlgebra,
    LieAutomorphism,
    antisymmetry_residual,
    bracket,
    builtin_algebra,
    builtin_automorphism,
    coadjoint,
    jacobi_residual,
    killing_gram,
    make_automorphism,
    pairing,
    weyl_mirrors,
)
from .linalg import OperatorMatrix
from .symtensor import (
    SymTensor,
    basis_tensor,
    eval_tensor,
    sym_basis,
    sym_product,
)
from .spencer import (
    Identification,
    LeibnizConvention,
    NilpotencyReport,
    classical_prolongation,
    delta_lambda,
    delta_lambda_generator,
    delta_matrix,
    jacobi_form_generator,
    nilpotency_report,
    signed_leibniz_welldefinedness,
)
from .mirror import (
    IntertwiningReport,
    MirrorTransform,
    automorphism_mirror,
    induced_tensor_map,
    intertwining_check,
    mirror_lambda,
    sign_chain_sign,
    sign_mirror,
)
from .cohomology import (
    CohomologyReport,
    DGAModel,
    SpencerComplexInstance,
    build_complex,
    cohomology_report,
    cup_product,
    d_squared_residual,
    kunneth_diagnostic,
    mirror_invariance_check,
    torus_model,
)
from .bundle import (
    GridBundle,
    TransversalityReport,
    cartan_residual,
    compatibility_functional_terms,
    constraint_distribution,
    equivariance_residual,
    grid_bundle,
    transversality_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
