"""Symplectic similarity reduction to Bunse-Gerstner form.

A real 2n x 2n matrix is reduced by similarity with matrices of the group
``[[L, 0], [Y L, L^-T]]`` (``Y`` symmetric) so that its (1,1) block becomes
upper Hessenberg and its (2,1) block upper triangular. For skew-Hamiltonian
input the (2,1) block vanishes and ``Y`` solves the antisymmetric Riccati
matrix equation.
"""
from ._backend import available_backends, set_backend
from .arme import (
    ArmeProblem,
    ArmeSolution,
    HamiltonianReduction,
    ShiftSpec,
    StructureError,
    arme_residual,
    arme_shift,
    arme_solve,
    arme_unshift,
    reduce_hamiltonian,
)
from .matrix import (
    Mat,
    MatrixParseError,
    SingularMatrixError,
    apply_householder,
    frobenius_norm,
    multiply,
    read_matrix,
    transpose,
    write_matrix,
)
from .reduction import (
    ELEMENTARY,
    HOUSEHOLDER,
    BetaUndefinedError,
    BreakdownError,
    GTransform,
    ReductionReport,
    ReductionResult,
    StepFactors,
    accumulate,
    apply_step,
    compute_elementary_w,
    compute_householder_w,
    compute_pivot,
    compute_y_step,
    reduce,
)
from .structure import (
    BlockMat,
    StructureReport,
    classify,
    gen_hamiltonian,
    gen_skew_hamiltonian,
    is_symplectic,
)

__version__ = "0.1.0"
