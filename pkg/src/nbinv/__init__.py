"""Constructive inversion of matrices over Banach algebras."""
from .algebra import (
    Algebra,
    Element,
    SpectralReport,
    SymmetryWitness,
    approximate_by_invertibles,
    gelfand_radius,
    neumann_inverse,
    symmetric_witness_check,
)
from .engine import (
    InversionCertificate,
    PivotStrategy,
    invert,
    invert_essentially_triangular,
    invert_hermitian_symmetric,
    invert_two_by_two,
    invert_upper_triangular,
    oracle_invert,
)
from .instances import (
    CircleAlgebra,
    HTKernel,
    ScalarMatrixAlgebra,
    SwapAlgebra,
    UnitizedHTAlgebra,
    WienerAlgebra,
    ht_compose,
    ht_unitized_inverse,
    make_algebra,
    wiener_inverse,
    wiener_mul,
)
from .matrix import (
    GLPair,
    Matrix,
    MatrixAlgebra,
    build_elimination_pair,
    from_scalars,
    identity,
    matrix,
    nest,
    pad_matrix,
    unnest,
)

__version__ = "0.1.0"
