"""Block view of 2n x 2n matrices, structure predicates and test generators.

With ``J = [[0, I], [-I, 0]]`` a matrix ``S`` is Hamiltonian when
``J^T S J = -S^T`` and skew-Hamiltonian when ``J^T S J = S^T``. ``J`` is never
formed here; ``J^T S J`` is the block shuffle ``[[S22, -S21], [-S12, S11]]``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .matrix import Mat, frobenius_norm, multiply, transpose

__all__ = [
    "BlockMat",
    "StructureReport",
    "DEFAULT_STRUCTURE_TOL",
    "jtsj",
    "j_matrix",
    "classify",
    "is_symplectic",
    "below_diagonal_norm",
    "below_subdiagonal_norm",
    "off_diagonal_norm",
    "SplitMix64",
    "gen_skew_hamiltonian",
    "gen_hamiltonian",
]

DEFAULT_STRUCTURE_TOL = 1e-10


@dataclass
class BlockMat:
    """A 2n x 2n matrix held as its four n x n blocks."""

    n: int
    s11: Mat
    s12: Mat
    s21: Mat
    s22: Mat

    def __post_init__(self):
        for name in ("s11", "s12", "s21", "s22"):
            b = getattr(self, name)
            if b.shape != (self.n, self.n):
                raise ValueError(f"block {name} is {b.rows}x{b.cols}, expected {self.n}x{self.n}")

    @classmethod
    def from_full(cls, s: Mat) -> BlockMat:
        if s.rows != s.cols:
            raise ValueError(f"matrix must be square, got {s.rows}x{s.cols}")
        if s.rows % 2:
            raise ValueError(f"matrix dimension must be even, got {s.rows}")
        n = s.rows // 2
        return cls(n, s.block(0, 0, n, n), s.block(0, n, n, n),
                   s.block(n, 0, n, n), s.block(n, n, n, n))

    @classmethod
    def from_blocks(cls, s11: Mat, s12: Mat, s21: Mat, s22: Mat) -> BlockMat:
        return cls(s11.rows, s11, s12, s21, s22)

    def to_full(self) -> Mat:
        return Mat.from_blocks([[self.s11, self.s12], [self.s21, self.s22]])

    def copy(self) -> BlockMat:
        return BlockMat(self.n, self.s11.copy(), self.s12.copy(), self.s21.copy(), self.s22.copy())

    def blocks(self) -> tuple[Mat, Mat, Mat, Mat]:
        return (self.s11, self.s12, self.s21, self.s22)

    def norm(self) -> float:
        return math.sqrt(sum(frobenius_norm(b) ** 2 for b in self.blocks()))


@dataclass
class StructureReport:
    hamiltonian_dev: float
    skew_hamiltonian_dev: float
    is_hamiltonian: bool
    is_skew_hamiltonian: bool
    hessenberg_dev_11: float
    upper_triangular_dev_21: float
    diagonal_dev_21: float

    def to_dict(self) -> dict:
        return asdict(self)


def j_matrix(n: int) -> Mat:
    """Dense ``J``; only for checks and oracles."""
    z = Mat.zeros(n)
    return Mat.from_blocks([[z, Mat.identity(n)], [-Mat.identity(n), z]])


def jtsj(s: BlockMat) -> BlockMat:
    return BlockMat(s.n, s.s22.copy(), -s.s21, -s.s12, s.s11.copy())


def below_diagonal_norm(a: Mat, offset: int = 0) -> float:
    """Frobenius norm of the entries ``a[i, j]`` with ``i > j + offset``."""
    acc = 0.0
    for i in range(a.rows):
        for j in range(min(a.cols, max(0, i - offset))):
            acc += a[i, j] ** 2
    return math.sqrt(acc)


def below_subdiagonal_norm(a: Mat) -> float:
    return below_diagonal_norm(a, offset=1)


def off_diagonal_norm(a: Mat) -> float:
    acc = 0.0
    for i in range(a.rows):
        for j in range(a.cols):
            if i != j:
                acc += a[i, j] ** 2
    return math.sqrt(acc)


def _combined_norm(*mats: Mat) -> float:
    return math.sqrt(sum(frobenius_norm(m) ** 2 for m in mats))


def classify(s: BlockMat, tol: float = DEFAULT_STRUCTURE_TOL) -> StructureReport:
    """Structure deviations of ``s``; flags compare against ``tol * max(1, |S|_F)``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    t11, t12, t21, t22 = (transpose(b) for b in s.blocks())
    # J^T S J = [[S22, -S21], [-S12, S11]], compared blockwise with -S^T and S^T
    ham = _combined_norm(s.s22 + t11, t21 - s.s21, t12 - s.s12, s.s11 + t22)
    skew = _combined_norm(s.s22 - t11, -s.s21 - t21, -s.s12 - t12, s.s11 - t22)
    bound = tol * max(1.0, s.norm())
    return StructureReport(
        hamiltonian_dev=ham,
        skew_hamiltonian_dev=skew,
        is_hamiltonian=ham <= bound,
        is_skew_hamiltonian=skew <= bound,
        hessenberg_dev_11=below_subdiagonal_norm(s.s11),
        upper_triangular_dev_21=below_diagonal_norm(s.s21),
        diagonal_dev_21=off_diagonal_norm(s.s21),
    )


def is_symplectic(u: Mat, tol: float = DEFAULT_STRUCTURE_TOL) -> tuple[bool, float]:
    """Return ``(flag, |U^T J U - J|_F)``."""
    if u.rows != u.cols or u.rows % 2:
        raise ValueError(f"symplectic check needs an even square matrix, got {u.rows}x{u.cols}")
    n = u.rows // 2
    # J U swaps the block rows of U and negates the lower half
    ju = Mat(2 * n, 2 * n)
    ju.set_block(0, 0, u.block(n, 0, n, 2 * n))
    ju.set_block(n, 0, -u.block(0, 0, n, 2 * n))
    dev = frobenius_norm(multiply(transpose(u), ju) - j_matrix(n))
    return dev <= tol, dev


# random generators ----------------------------------------------------------

class SplitMix64:
    """SplitMix64 generator.

    Portable and trivially reimplemented elsewhere: state advances by the
    golden-gamma constant and each output is the standard 64-bit finalizer.
    ``uniform()`` maps the top 53 bits to the open interval (0, 1).
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return ((self.next_u64() >> 11) + 0.5) * (1.0 / (1 << 53))


def _uniform_square(rng: SplitMix64, n: int) -> Mat:
    return Mat(n, n, [rng.uniform() for _ in range(n * n)])


def _skew_symmetric(rng: SplitMix64, n: int) -> Mat:
    m = Mat(n, n)
    for i in range(n):
        for j in range(i + 1, n):
            x = rng.uniform()
            m[i, j] = x
            m[j, i] = -x
    return m


def _symmetric(rng: SplitMix64, n: int) -> Mat:
    m = Mat(n, n)
    for i in range(n):
        for j in range(i, n):
            x = rng.uniform()
            m[i, j] = x
            m[j, i] = x
    return m


def gen_skew_hamiltonian(n: int, seed: int) -> BlockMat:
    """Random skew-Hamiltonian matrix.

    Draw order: S11 row-major, then the strict upper triangles of S12 and S21
    row-major. S22 = S11^T; S12 and S21 are skew-symmetric.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = SplitMix64(seed)
    s11 = _uniform_square(rng, n)
    s12 = _skew_symmetric(rng, n)
    s21 = _skew_symmetric(rng, n)
    return BlockMat(n, s11, s12, s21, transpose(s11))


def gen_hamiltonian(n: int, seed: int) -> BlockMat:
    """Random Hamiltonian matrix.

    Draw order: S11 row-major, then the upper triangles (with diagonal) of S12
    and S21 row-major. S22 = -S11^T; S12 and S21 are symmetric.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = SplitMix64(seed)
    s11 = _uniform_square(rng, n)
    s12 = _symmetric(rng, n)
    s21 = _symmetric(rng, n)
    return BlockMat(n, s11, s12, s21, -transpose(s11))
