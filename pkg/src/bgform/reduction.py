"""Reduction of a 2n x 2n matrix to Bunse-Gerstner form by symplectic similarity.

Every transformation used here lies in the group

    G = { [[L, 0], [Y L, L^-T]] : Y symmetric },

a subgroup of the symplectic group. Step ``i`` (1-based, ``1 <= i <= n-1``)
makes column ``i`` of the (2,1) block upper triangular with a rank-one
``Y = alpha v v^T`` and column ``i`` of the (1,1) block Hessenberg with ``L``,
which is either a pivoted unit lower triangular factor (elementary variant)
or a Householder reflector (householder variant).

The blocks transform as

    S11' = L^-1 (S11 + S12 Y) L
    S12' = L^-1 S12 L^-T
    S21' = L^T (S21 + S22 Y - Y S11 - Y S12 Y) L
    S22' = L^T (S22 - Y S12) L^-T

and every update is applied as rank-one or reflector updates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .matrix import Mat, as_vector, dot, frobenius_norm, multiply, transpose, vector_norm
from .structure import (
    BlockMat,
    below_diagonal_norm,
    below_subdiagonal_norm,
    is_symplectic,
)

__all__ = [
    "ELEMENTARY",
    "HOUSEHOLDER",
    "VARIANTS",
    "SIGN_CONVENTIONS",
    "DEFAULT_TOL",
    "StepFactors",
    "GTransform",
    "Breakdown",
    "ReductionReport",
    "ReductionResult",
    "BreakdownError",
    "BetaUndefinedError",
    "compute_y_step",
    "compute_pivot",
    "compute_elementary_w",
    "compute_householder_w",
    "apply_step",
    "accumulate",
    "reduce",
    "g_similarity",
    "trace_power_errors",
]

ELEMENTARY = "elementary"
HOUSEHOLDER = "householder"
VARIANTS = (ELEMENTARY, HOUSEHOLDER)
# "stable": s = sign(x_1) |x|; "paper": s = +|x|
SIGN_CONVENTIONS = ("stable", "paper")
DEFAULT_TOL = 1e-13


class BreakdownError(ArithmeticError):
    """The inner product ``sum_j t_ji r_ji`` vanished at ``step``.

    No rank-one ``Y`` can then triangularize column ``step`` of the (2,1)
    block. ``partial`` carries the reduction state when raised by a driver.
    """

    def __init__(self, step: int, inner_product: float, partial=None):
        self.step = step
        self.inner_product = inner_product
        self.partial = partial
        super().__init__(
            f"breakdown at step {step}: inner product sum t_ji*r_ji = {inner_product!r} "
            "is numerically zero"
        )


class BetaUndefinedError(ArithmeticError):
    """The reflector scale ``[2(s^2 + r s)]^(-1/2)`` is not finite."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"Householder scale undefined at step {step} (x close to -|x| e1)")


@dataclass(frozen=True)
class StepFactors:
    """Data for one step ``U_i``.

    ``pivot`` is the 1-based row swapped with row ``step_index + 1`` before the
    step (elementary only). ``alpha is None`` means ``Y_i = 0``. For the
    elementary variant ``w`` holds the multipliers of the unit lower factor;
    for the householder variant it is the unit reflector vector. An all-zero
    ``w`` means the identity.
    """

    step_index: int
    variant: str
    pivot: int | None
    alpha: float | None
    v: tuple[float, ...]
    w: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.v)

    def has_w(self) -> bool:
        return any(x != 0.0 for x in self.w)

    @classmethod
    def identity(cls, n: int, step_index: int, variant: str) -> StepFactors:
        z = (0.0,) * n
        return cls(step_index, variant, None, None, z, z)


@dataclass
class GTransform:
    """Accumulated transform ``U = [[L, 0], [Y L, L^-T]]``.

    ``left`` is ``L`` (``Q`` for the householder variant) and ``left_inv`` its
    inverse, both kept explicitly.
    """

    variant: str
    factors: tuple[StepFactors, ...]
    left: Mat
    left_inv: Mat
    y: Mat

    @property
    def n(self) -> int:
        return self.left.rows

    def assemble_u(self) -> Mat:
        return Mat.from_blocks([
            [self.left, Mat.zeros(self.n)],
            [multiply(self.y, self.left), transpose(self.left_inv)],
        ])

    def apply(self, s: BlockMat) -> BlockMat:
        """Dense ``U^-1 S U``."""
        return g_similarity(s, self.left, self.left_inv, self.y)


@dataclass
class Breakdown:
    step: int
    reason: str
    inner_product: float = math.nan


@dataclass
class ReductionReport:
    steps_completed: int
    s21_below_diag_norm: float
    s11_below_subdiag_norm: float
    symplectic_dev: float
    y_first_rowcol_norm: float
    trace_power_errors: tuple[float, float, float]
    breakdown: Breakdown | None = None

    def to_dict(self) -> dict:
        return {
            "steps_completed": self.steps_completed,
            "s21_below_diag_norm": self.s21_below_diag_norm,
            "s11_below_subdiag_norm": self.s11_below_subdiag_norm,
            "symplectic_dev": self.symplectic_dev,
            "y_first_rowcol_norm": self.y_first_rowcol_norm,
            "trace_power_errors": list(self.trace_power_errors),
            "breakdown": (
                None if self.breakdown is None
                else {"step": self.breakdown.step, "reason": self.breakdown.reason}
            ),
        }


@dataclass
class ReductionResult:
    transform: GTransform
    reduced: BlockMat
    report: ReductionReport
    original: BlockMat = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.report.breakdown is None


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, not {variant!r}")


def _check_step(n: int, i: int) -> None:
    if not 1 <= i <= n - 1:
        raise ValueError(f"step index {i} outside [1, {n - 1}]")


def _scale(m: Mat) -> float:
    return max(1.0, frobenius_norm(m))


def _unit(n: int, k: int) -> list[float]:
    e = [0.0] * n
    e[k] = 1.0
    return e


# step construction --------------------------------------------------------

def compute_y_step(s: BlockMat, i: int, tol: float = DEFAULT_TOL):
    """Rank-one ``Y = alpha v v^T`` that makes column ``i`` of S21 upper triangular.

    Returns ``(alpha, v)``, or ``None`` when the column is already upper
    triangular. Raises :class:`BreakdownError` when ``sum_{j>i} t_ji r_ji``
    is zero to within ``tol * |t| * |r|`` (``t``, ``r`` the sub-columns), a
    test that does not depend on the scale of either block.
    """
    n = s.n
    _check_step(n, i)
    c = i - 1
    t = [s.s21[j, c] for j in range(i, n)]
    r = [s.s11[j, c] for j in range(i, n)]
    scale21 = _scale(s.s21)
    if max(abs(x) for x in t) <= tol * scale21:
        return None
    inner = dot(t, r)
    if abs(inner) <= tol * vector_norm(t) * vector_norm(r):
        raise BreakdownError(i, inner)
    return 1.0 / inner, [0.0] * i + t


def _column_is_hessenberg(s11: Mat, i: int, tol: float) -> bool:
    bound = tol * _scale(s11)
    return all(abs(s11[j, i - 1]) <= bound for j in range(i + 1, s11.rows))


def compute_pivot(s11: Mat, i: int, tol: float = DEFAULT_TOL) -> int | None:
    """1-based row ``k > i`` holding the largest ``|r_ki|``; smallest index on ties.

    ``None`` means every candidate is below tolerance (column already
    Hessenberg).
    """
    n = s11.rows
    _check_step(n, i)
    c = i - 1
    best, best_val = None, -1.0
    for j in range(i, n):
        val = abs(s11[j, c])
        if val > best_val:
            best, best_val = j, val
    if best_val <= tol * _scale(s11):
        return None
    return best + 1


def compute_elementary_w(s11: Mat, i: int, tol: float = DEFAULT_TOL) -> list[float] | None:
    """Gauss multipliers ``w_j = r_ji / r_{i+1,i}`` for ``j >= i+2``.

    Expects the pivot already in place. ``None`` when the column is already
    Hessenberg.
    """
    n = s11.rows
    _check_step(n, i)
    if _column_is_hessenberg(s11, i, tol):
        return None
    c = i - 1
    piv = s11[i, c]
    return [0.0] * (i + 1) + [s11[j, c] / piv for j in range(i + 1, n)]


def compute_householder_w(
    s11: Mat, i: int, tol: float = DEFAULT_TOL, sign: str = "stable"
) -> list[float] | None:
    """Unit reflector vector making column ``i`` of ``Q^T S11 Q`` Hessenberg.

    With ``x = (r_{i+1,i}, ..., r_{n,i})`` and ``s`` its norm (signed like
    ``x_1`` for ``sign="stable"``), ``beta = [2(s^2 + x_1 s)]^(-1/2)`` and
    ``w = beta (x + s e_1)``, so that ``(I - 2 w w^T) x = -s e_1``.
    Returns ``None`` when the column is already Hessenberg; raises
    :class:`BetaUndefinedError` when ``s^2 + x_1 s`` vanishes.
    """
    if sign not in SIGN_CONVENTIONS:
        raise ValueError(f"sign must be one of {SIGN_CONVENTIONS}, not {sign!r}")
    n = s11.rows
    _check_step(n, i)
    if _column_is_hessenberg(s11, i, tol):
        return None
    c = i - 1
    x = [s11[j, c] for j in range(i, n)]
    norm = vector_norm(x)
    s = norm if sign == "paper" else math.copysign(norm, x[0])
    denom = s * s + x[0] * s
    if denom <= tol * s * s:
        raise BetaUndefinedError(i)
    beta = 1.0 / math.sqrt(2.0 * denom)
    return [0.0] * i + [beta * (x[0] + s)] + [beta * xj for xj in x[1:]]


# step application ----------------------------------------------------------

def _permute(s: BlockMat, p: int, k: int) -> None:
    for b in s.blocks():
        b.swap_rows_(p, k)
        b.swap_cols_(p, k)


def _y_update(s: BlockMat, alpha: float, v: Sequence[float]) -> BlockMat:
    v = as_vector(v)
    s12v = s.s12.matvec(v)
    s22v = s.s22.matvec(v)
    vs11 = s.s11.vecmat(v)
    vs12 = s.s12.vecmat(v)
    gamma = dot(v, s12v)
    s11 = s.s11.copy().rank1_update_(alpha, s12v, v)
    s21 = s.s21.copy()
    s21.rank1_update_(alpha, s22v, v)
    s21.rank1_update_(-alpha, v, vs11)
    s21.rank1_update_(-alpha * alpha * gamma, v, v)
    s22 = s.s22.copy().rank1_update_(-alpha, v, vs12)
    return BlockMat(s.n, s11, s.s12.copy(), s21, s22)


def _elementary_update(s: BlockMat, c: int, w: Sequence[float]) -> None:
    """In place similarity by ``diag(L, L^-T)`` with ``L = I + w e_c^T``."""
    w = as_vector(w)
    e = _unit(s.n, c)

    def linv_left(m):   # L^-1 M = M - w (e_c^T M)
        m.rank1_update_(-1.0, w, m.row(c))

    def l_right(m):     # M L = M + (M w) e_c^T
        m.rank1_update_(1.0, m.matvec(w), e)

    def lt_left(m):     # L^T M = M + e_c (w^T M)
        m.rank1_update_(1.0, e, m.vecmat(w))

    def linvt_right(m):  # M L^-T = M - (M e_c) w^T
        m.rank1_update_(-1.0, m.col(c), w)

    linv_left(s.s11)
    l_right(s.s11)
    linv_left(s.s12)
    linvt_right(s.s12)
    lt_left(s.s21)
    l_right(s.s21)
    lt_left(s.s22)
    linvt_right(s.s22)


def _householder_update(s: BlockMat, w: Sequence[float]) -> None:
    """In place similarity by ``diag(Q, Q)`` with ``Q = I - 2 w w^T``."""
    w = as_vector(w)
    for m in s.blocks():
        m.rank1_update_(-2.0, w, m.vecmat(w))
        m.rank1_update_(-2.0, m.matvec(w), w)


def apply_step(s: BlockMat, f: StepFactors) -> BlockMat:
    """Return ``U_i^-1 S U_i`` for the step described by ``f``.

    Applied in order: the row/column swap ``diag(P, P)``, the ``Y`` update,
    then the ``L`` (or ``Q``) similarity. Each is an element of G.
    """
    if f.n != s.n:
        raise ValueError(f"step factors are for n={f.n}, matrix has n={s.n}")
    out = s.copy()
    if f.pivot is not None:
        _permute(out, f.step_index, f.pivot - 1)
    if f.alpha is not None:
        out = _y_update(out, f.alpha, f.v)
    if f.has_w():
        if f.variant == ELEMENTARY:
            _elementary_update(out, f.step_index, f.w)
        else:
            _householder_update(out, f.w)
    return out


# accumulation -------------------------------------------------------------

def accumulate(
    factors: Sequence[StepFactors], n: int | None = None, variant: str | None = None
) -> GTransform:
    """Compose step transforms into ``U = U_1 U_2 ... U_m``.

    Uses ``L <- L L_k`` and ``Y <- Y + L^-T Y_k L^-1`` (old ``L``), so ``Y`` is
    the telescoping sum of congruence-transformed step ``Y_k``. The result is
    symmetrized and its first row and column are set to zero.
    """
    factors = tuple(factors)
    if n is None:
        if not factors:
            raise ValueError("n is required for an empty factor sequence")
        n = factors[0].n
    if variant is None:
        variant = factors[0].variant if factors else HOUSEHOLDER
    left = Mat.identity(n)
    left_inv = Mat.identity(n)
    y = Mat.zeros(n)
    for f in factors:
        if f.n != n:
            raise ValueError("factors disagree on n")
        c = f.step_index
        if f.pivot is not None:
            left.swap_cols_(c, f.pivot - 1)
            left_inv.swap_rows_(c, f.pivot - 1)
        if f.alpha is not None:
            z = left_inv.vecmat(f.v)   # L^-T v
            y.rank1_update_(f.alpha, z, z)
        if f.has_w():
            w = as_vector(f.w)
            if f.variant == ELEMENTARY:
                left.rank1_update_(1.0, left.matvec(w), _unit(n, c))
                left_inv.rank1_update_(-1.0, w, left_inv.row(c))
            else:
                left.rank1_update_(-2.0, left.matvec(w), w)
                left_inv.rank1_update_(-2.0, w, left_inv.vecmat(w))
    _symmetrize_zero_first(y)
    return GTransform(variant, factors, left, left_inv, y)


def _symmetrize_zero_first(y: Mat) -> None:
    n = y.rows
    for i in range(n):
        for j in range(i + 1, n):
            avg = (y[i, j] + y[j, i]) / 2.0
            y[i, j] = avg
            y[j, i] = avg
    for k in range(n):
        y[0, k] = 0.0
        y[k, 0] = 0.0


def g_similarity(s: BlockMat, left: Mat, left_inv: Mat, y: Mat) -> BlockMat:
    """Dense ``U^-1 S U`` for ``U = [[L, 0], [Y L, L^-T]]`` given ``L`` and ``L^-1``."""
    left_inv_t = transpose(left_inv)
    left_t = transpose(left)
    ys11 = multiply(y, s.s11)
    ys12 = multiply(y, s.s12)
    s11 = multiply(multiply(left_inv, s.s11 + multiply(s.s12, y)), left)
    s12 = multiply(multiply(left_inv, s.s12), left_inv_t)
    inner21 = s.s21 + multiply(s.s22, y) - ys11 - multiply(ys12, y)
    s21 = multiply(multiply(left_t, inner21), left)
    s22 = multiply(multiply(left_t, s.s22 - ys12), left_inv_t)
    return BlockMat(s.n, s11, s12, s21, s22)


# driver -------------------------------------------------------------------

def _power_traces(s: Mat) -> tuple[float, float, float]:
    s2 = multiply(s, s)
    s3 = multiply(s2, s)
    return (s.trace(), s2.trace(), s3.trace())


def trace_power_errors(before: BlockMat, after: BlockMat) -> tuple[float, float, float]:
    """``|tr(S'^k) - tr(S^k)| / max(1, |tr(S^k)|)`` for k = 1, 2, 3."""
    t0 = _power_traces(before.to_full())
    t1 = _power_traces(after.to_full())
    return tuple(abs(b - a) / max(1.0, abs(a)) for a, b in zip(t0, t1))


def _make_step(cur: BlockMat, i: int, variant: str, tol: float, sign: str) -> StepFactors:
    n = cur.n
    work = cur
    pivot = None
    if variant == ELEMENTARY and not _column_is_hessenberg(cur.s11, i, tol):
        k = compute_pivot(cur.s11, i, tol)
        if k is not None and k != i + 1:
            pivot = k
            work = cur.copy()
            _permute(work, i, k - 1)
    ystep = compute_y_step(work, i, tol)
    alpha, v = (None, [0.0] * n) if ystep is None else ystep
    # the Y update leaves column i of S11 untouched, so w comes from `work`
    if variant == ELEMENTARY:
        w = compute_elementary_w(work.s11, i, tol)
    else:
        try:
            w = compute_householder_w(work.s11, i, tol, sign)
        except BetaUndefinedError:
            # substitute the reflector sending x to +|x| e1 (no cancellation)
            w = compute_householder_w(work.s11, i, tol, "stable")
    if w is None:
        w = [0.0] * n
    return StepFactors(i, variant, pivot, alpha, tuple(v), tuple(w))


def reduce(
    s: BlockMat,
    variant: str = HOUSEHOLDER,
    tol: float = DEFAULT_TOL,
    sign: str = "stable",
    passes: int = 1,
) -> ReductionResult:
    """Reduce ``s`` to Bunse-Gerstner form.

    Runs steps ``1..n-1``. With ``passes > 1`` each further pass starts from
    ``U^-1 S U`` recomputed densely from the original ``s`` and the transform
    accumulated so far (not from the incrementally updated matrix, whose
    rounding errors a re-run could not remove), and its steps are composed
    onto the transform. A pass in which every step is the identity ends the
    refinement and is dropped. A breakdown stops the run; the partial result
    is returned with ``report.breakdown`` set.
    """
    _check_variant(variant)
    if sign not in SIGN_CONVENTIONS:
        raise ValueError(f"sign must be one of {SIGN_CONVENTIONS}, not {sign!r}")
    if passes < 1:
        raise ValueError("passes must be at least 1")
    n = s.n
    cur = s.copy()
    factors: list[StepFactors] = []
    breakdown = None
    for p in range(passes):
        work = cur if p == 0 else accumulate(factors, n, variant).apply(s)
        new: list[StepFactors] = []
        for i in range(1, n):
            try:
                f = _make_step(work, i, variant, tol, sign)
            except BreakdownError as exc:
                breakdown = Breakdown(step=i, reason=str(exc), inner_product=exc.inner_product)
                break
            work = apply_step(work, f)
            new.append(f)
        if p > 0 and breakdown is None and all(f.alpha is None and not f.has_w() for f in new):
            break   # converged: the pass changes nothing, keep the previous matrix
        cur = work
        factors.extend(new)
        if breakdown is not None:
            break
    transform = accumulate(factors, n, variant)
    report = ReductionReport(
        steps_completed=len(factors),
        s21_below_diag_norm=below_diagonal_norm(cur.s21),
        s11_below_subdiag_norm=below_subdiagonal_norm(cur.s11),
        symplectic_dev=is_symplectic(transform.assemble_u())[1],
        y_first_rowcol_norm=math.sqrt(
            sum(transform.y[0, k] ** 2 + transform.y[k, 0] ** 2 for k in range(n))
        ),
        trace_power_errors=trace_power_errors(s, cur),
        breakdown=breakdown,
    )
    return ReductionResult(transform, cur, report, s)
