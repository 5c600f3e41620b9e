"""Antisymmetric Riccati matrix equation (ARME).

For a skew-Hamiltonian ``S`` the equation is

    -Y S12 Y + S22 Y - Y S11 + S21 = 0,   Y symmetric.

Reducing ``S`` with a transform ``[[L, 0], [Y L, L^-T]]`` that zeroes the
(2,1) block makes that ``Y`` a solution with zero first row and column.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .matrix import LUFactor, Mat, SingularMatrixError, frobenius_norm, lu_factor, multiply, transpose
from .reduction import (
    DEFAULT_TOL,
    HOUSEHOLDER,
    BreakdownError,
    GTransform,
    ReductionReport,
    g_similarity,
    reduce,
)
from .structure import DEFAULT_STRUCTURE_TOL, BlockMat, classify, off_diagonal_norm

__all__ = [
    "DEGRADED_THRESHOLD",
    "MIN_RCOND",
    "StructureError",
    "ArmeProblem",
    "ArmeSolution",
    "ShiftSpec",
    "HamiltonianReduction",
    "arme_residual",
    "arme_solve",
    "reduce_hamiltonian",
    "arme_shift",
    "arme_unshift",
]

# relative residual above which a solution is reported as degraded
DEGRADED_THRESHOLD = 1e-6
MIN_RCOND = 1e-12


class StructureError(ValueError):
    """Input lacks the structure an operation requires."""


@dataclass
class ArmeProblem:
    s: BlockMat
    tol: float = DEFAULT_STRUCTURE_TOL

    def __post_init__(self):
        rep = classify(self.s, self.tol)
        if not rep.is_skew_hamiltonian:
            raise StructureError(
                "ARME needs a skew-Hamiltonian matrix "
                f"(deviation {rep.skew_hamiltonian_dev:.3e})"
            )


@dataclass
class ArmeSolution:
    y: Mat
    transform: GTransform
    reduced: BlockMat
    report: ReductionReport
    residual: float
    s21_norm: float
    s22_dev: float
    status: str

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "arme_residual": self.residual,
            "s21_norm": self.s21_norm,
            "s22_minus_s11t_norm": self.s22_dev,
            "report": self.report.to_dict(),
        }


@dataclass
class ShiftSpec:
    """Substitution ``Y = M + N^-T X N^-1`` with ``M`` symmetric, ``N`` nonsingular."""

    m: Mat
    n_mat: Mat
    _lu: LUFactor = field(init=False, repr=False)
    n_inv: Mat = field(init=False, repr=False)

    def __post_init__(self):
        n = self.m.rows
        if self.m.shape != (n, n) or self.n_mat.shape != (n, n):
            raise ValueError("M and N must be square and of equal size")
        if any(self.m[i, j] != self.m[j, i] for i in range(n) for j in range(i + 1, n)):
            raise ValueError("M must be exactly symmetric")
        self._lu = lu_factor(self.n_mat)
        rcond = self._lu.rcond(self.n_mat)
        if not rcond > MIN_RCOND:
            raise SingularMatrixError(f"N is too ill-conditioned (rcond {rcond:.3e})")
        self.n_inv = self._lu.inverse()


def arme_residual(y: Mat, s: BlockMat) -> tuple[Mat, float]:
    """Return ``R = -Y S12 Y + S22 Y - Y S11 + S21`` and ``|R|_F``."""
    if y.shape != (s.n, s.n):
        raise ValueError(f"Y must be {s.n}x{s.n}, got {y.rows}x{y.cols}")
    r = -multiply(multiply(y, s.s12), y) + multiply(s.s22, y) - multiply(y, s.s11) + s.s21
    return r, frobenius_norm(r)


def arme_solve(
    p: ArmeProblem | BlockMat,
    variant: str = HOUSEHOLDER,
    tol: float = DEFAULT_TOL,
    sign: str = "stable",
    passes: int = 1,
) -> ArmeSolution:
    """Solve the ARME by reducing the skew-Hamiltonian matrix.

    The result is checked, not assumed: the residual is recomputed by
    substitution, and the reduced (2,1) block and ``S22' - S11'^T`` are
    measured. Any of them above ``DEGRADED_THRESHOLD * max(1, |S|_F)`` marks
    the solution ``"degraded"``. Raises :class:`BreakdownError` (with the
    partial reduction attached) when a step breaks down.
    """
    if isinstance(p, BlockMat):
        p = ArmeProblem(p)
    s = p.s
    res = reduce(s, variant, tol, sign=sign, passes=passes)
    bd = res.report.breakdown
    if bd is not None:
        raise BreakdownError(bd.step, bd.inner_product, partial=res)
    y = res.transform.y
    _, resid = arme_residual(y, s)
    s21_norm = frobenius_norm(res.reduced.s21)
    s22_dev = frobenius_norm(res.reduced.s22 - transpose(res.reduced.s11))
    bound = DEGRADED_THRESHOLD * max(1.0, s.norm())
    status = "ok" if max(resid, s21_norm, s22_dev) <= bound else "degraded"
    return ArmeSolution(y, res.transform, res.reduced, res.report, resid, s21_norm, s22_dev, status)


@dataclass
class HamiltonianReduction:
    reduced: BlockMat
    transform: GTransform
    report: ReductionReport
    diagonal_dev_21: float
    hessenberg_dev_11: float


def reduce_hamiltonian(
    s: BlockMat,
    variant: str = HOUSEHOLDER,
    tol: float = DEFAULT_TOL,
    sign: str = "stable",
    structure_tol: float = DEFAULT_STRUCTURE_TOL,
) -> HamiltonianReduction:
    """Reduce a Hamiltonian matrix; the reduced (2,1) block comes out diagonal.

    The reduced matrix stays Hamiltonian, so its (2,1) block is symmetric and
    upper triangular at once. ``diagonal_dev_21`` measures how far it is from
    diagonal. A breakdown is recorded in ``report.breakdown``.
    """
    rep = classify(s, structure_tol)
    if not rep.is_hamiltonian:
        raise StructureError(
            f"matrix is not Hamiltonian (deviation {rep.hamiltonian_dev:.3e})"
        )
    res = reduce(s, variant, tol, sign=sign)
    return HamiltonianReduction(
        res.reduced,
        res.transform,
        res.report,
        off_diagonal_norm(res.reduced.s21),
        res.report.s11_below_subdiag_norm,
    )


def arme_shift(s: BlockMat, spec: ShiftSpec, tol: float = DEFAULT_STRUCTURE_TOL) -> BlockMat:
    """Coefficients of the ARME for ``X`` after substituting ``Y = M + N^-T X N^-1``.

    This is the similarity by ``[[N, 0], [M N, N^-T]]``, so the result is again
    skew-Hamiltonian; its (2,1) block is ``N^T R(M) N`` with ``R`` the ARME
    residual.
    """
    if spec.m.rows != s.n:
        raise ValueError(f"shift is for n={spec.m.rows}, matrix has n={s.n}")
    rep = classify(s, tol)
    if not rep.is_skew_hamiltonian:
        raise StructureError(
            "shift needs a skew-Hamiltonian matrix "
            f"(deviation {rep.skew_hamiltonian_dev:.3e})"
        )
    return g_similarity(s, spec.n_mat, spec.n_inv, spec.m)


def arme_unshift(x: Mat, spec: ShiftSpec) -> Mat:
    """Map a solution of the shifted equation back: ``Y = M + N^-T X N^-1``."""
    return spec.m + multiply(multiply(transpose(spec.n_inv), x), spec.n_inv)
