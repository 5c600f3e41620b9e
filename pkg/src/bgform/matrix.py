"""Dense real matrices on top of the kernel backend.

:class:`Mat` stores entries as a flat row-major ``array('d')``. All arithmetic
goes through the active kernel module (compiled or pure Python), which uses a
fixed left-to-right accumulation order so results are bit-reproducible.
"""
from __future__ import annotations

import math
from array import array
from typing import Iterable, Sequence

from . import _backend

__all__ = [
    "Mat",
    "multiply",
    "transpose",
    "frobenius_norm",
    "apply_householder",
    "LUFactor",
    "lu_factor",
    "SingularMatrixError",
    "MatrixParseError",
    "read_matrix",
    "parse_matrix",
    "write_matrix",
    "format_matrix",
]


def _zeros(size: int) -> array:
    return array("d", bytes(8 * size))


def as_vector(x: Iterable[float]) -> array:
    if isinstance(x, array) and x.typecode == "d":
        return x
    return array("d", x)


class Mat:
    """Dense real ``rows x cols`` matrix."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Iterable[float] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = _zeros(rows * cols)
        else:
            self.data = array("d", data)
            if len(self.data) != rows * cols:
                raise ValueError(
                    f"expected {rows * cols} entries for a {rows}x{cols} matrix, "
                    f"got {len(self.data)}"
                )

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> Mat:
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def identity(cls, n: int) -> Mat:
        m = cls(n, n)
        for i in range(n):
            m.data[i * n + i] = 1.0
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> Mat:
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for r, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError(f"row {r} has {len(row)} entries, expected {ncols}")
            flat.extend(float(x) for x in row)
        return cls(nrows, ncols, flat)

    @classmethod
    def diag(cls, values: Sequence[float]) -> Mat:
        n = len(values)
        m = cls(n, n)
        for i, x in enumerate(values):
            m.data[i * n + i] = float(x)
        return m

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[Mat]]) -> Mat:
        """Assemble a matrix from a grid of conforming blocks."""
        heights = [row[0].rows for row in blocks]
        widths = [b.cols for b in blocks[0]]
        out = cls(sum(heights), sum(widths))
        r0 = 0
        for bi, row in enumerate(blocks):
            c0 = 0
            for bj, b in enumerate(row):
                if b.rows != heights[bi] or b.cols != widths[bj]:
                    raise ValueError("blocks do not conform")
                out.set_block(r0, c0, b)
                c0 += b.cols
            r0 += heights[bi]
        return out

    def copy(self) -> Mat:
        return Mat(self.rows, self.cols, self.data)

    # element access ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> float:
        i, j = idx
        return self.data[i * self.cols + j]

    def __setitem__(self, idx: tuple[int, int], value: float) -> None:
        i, j = idx
        self.data[i * self.cols + j] = value

    def row(self, i: int) -> array:
        return self.data[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> array:
        return self.data[j::self.cols]

    def tolist(self) -> list[list[float]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def block(self, r0: int, c0: int, nrows: int, ncols: int) -> Mat:
        out = Mat(nrows, ncols)
        for i in range(nrows):
            start = (r0 + i) * self.cols + c0
            out.data[i * ncols:(i + 1) * ncols] = self.data[start:start + ncols]
        return out

    def set_block(self, r0: int, c0: int, b: Mat) -> None:
        for i in range(b.rows):
            start = (r0 + i) * self.cols + c0
            self.data[start:start + b.cols] = b.data[i * b.cols:(i + 1) * b.cols]

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in self.data)

    def __repr__(self) -> str:
        return f"Mat({self.rows}x{self.cols}, {self.tolist()!r})"

    # arithmetic -------------------------------------------------------
    def _check_same_shape(self, other: Mat) -> None:
        if self.shape != other.shape:
            raise ValueError(f"dimension mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: Mat) -> Mat:
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, [x + y for x, y in zip(self.data, other.data)])

    def __sub__(self, other: Mat) -> Mat:
        self._check_same_shape(other)
        return Mat(self.rows, self.cols, [x - y for x, y in zip(self.data, other.data)])

    def __neg__(self) -> Mat:
        return Mat(self.rows, self.cols, [-x for x in self.data])

    def __mul__(self, scalar: float) -> Mat:
        return Mat(self.rows, self.cols, [scalar * x for x in self.data])

    __rmul__ = __mul__

    def __matmul__(self, other: Mat) -> Mat:
        return multiply(self, other)

    @property
    def T(self) -> Mat:
        return transpose(self)

    def trace(self) -> float:
        acc = 0.0
        for i in range(min(self.rows, self.cols)):
            acc += self.data[i * self.cols + i]
        return acc

    def matvec(self, x: Sequence[float]) -> array:
        if len(x) != self.cols:
            raise ValueError("dimension mismatch in matvec")
        return _backend.impl.matvec(self.data, self.rows, self.cols, as_vector(x))

    def vecmat(self, x: Sequence[float]) -> array:
        """Return ``x^T A`` as a vector."""
        if len(x) != self.rows:
            raise ValueError("dimension mismatch in vecmat")
        return _backend.impl.vecmat(as_vector(x), self.data, self.rows, self.cols)

    def rank1_update_(self, alpha: float, x: Sequence[float], y: Sequence[float]) -> Mat:
        """In place ``A += alpha x y^T``; returns ``self``."""
        if len(x) != self.rows or len(y) != self.cols:
            raise ValueError("dimension mismatch in rank-one update")
        _backend.impl.rank1_update(
            self.data, self.rows, self.cols, float(alpha), as_vector(x), as_vector(y)
        )
        return self

    def swap_rows_(self, i: int, k: int) -> Mat:
        if i != k:
            c = self.cols
            ri, rk = self.data[i * c:(i + 1) * c], self.data[k * c:(k + 1) * c]
            self.data[i * c:(i + 1) * c] = rk
            self.data[k * c:(k + 1) * c] = ri
        return self

    def swap_cols_(self, j: int, k: int) -> Mat:
        if j != k:
            c = self.cols
            d = self.data
            for r in range(self.rows):
                d[r * c + j], d[r * c + k] = d[r * c + k], d[r * c + j]
        return self


def multiply(a: Mat, b: Mat) -> Mat:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return Mat(a.rows, b.cols, _backend.impl.matmul(a.data, b.data, a.rows, a.cols, b.cols))


def transpose(a: Mat) -> Mat:
    return Mat(a.cols, a.rows, _backend.impl.transpose(a.data, a.rows, a.cols))


def frobenius_norm(a: Mat) -> float:
    return math.sqrt(_backend.impl.sumsq(a.data))


def vector_norm(x: Sequence[float]) -> float:
    return math.sqrt(_backend.impl.sumsq(as_vector(x)))


def dot(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise ValueError("dimension mismatch in dot")
    return _backend.impl.dot(as_vector(x), as_vector(y))


def apply_householder(a: Mat, w: Sequence[float], side: str = "left") -> Mat:
    """Return ``(I - 2 w w^T) a`` (side="left") or ``a (I - 2 w w^T)``.

    ``w`` must have unit norm, or be all zero (the identity reflector). The
    reflector is applied as a rank-one update and never formed.
    """
    w = as_vector(w)
    nrm2 = _backend.impl.sumsq(w)
    if nrm2 != 0.0 and abs(math.sqrt(nrm2) - 1.0) > 1e-14:
        raise ValueError(f"Householder vector must have unit norm, got {math.sqrt(nrm2)!r}")
    out = a.copy()
    if side == "left":
        if len(w) != a.rows:
            raise ValueError("dimension mismatch in left Householder application")
        if nrm2 != 0.0:
            out.rank1_update_(-2.0, w, a.vecmat(w))
    elif side == "right":
        if len(w) != a.cols:
            raise ValueError("dimension mismatch in right Householder application")
        if nrm2 != 0.0:
            out.rank1_update_(-2.0, a.matvec(w), w)
    else:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    return out


# LU with partial pivoting ------------------------------------------------

class SingularMatrixError(ValueError):
    """Raised when a matrix is singular or too ill-conditioned to invert."""


class LUFactor:
    """Row-pivoted factorization ``P A = L U`` of a square matrix."""

    def __init__(self, lu: Mat, perm: list[int]):
        self.lu = lu
        self.perm = perm
        self.n = lu.rows

    def solve_vec(self, b: Sequence[float]) -> list[float]:
        n, d = self.n, self.lu.data
        x = [float(b[p]) for p in self.perm]
        for i in range(n):
            acc = x[i]
            for j in range(i):
                acc -= d[i * n + j] * x[j]
            x[i] = acc
        for i in range(n - 1, -1, -1):
            acc = x[i]
            for j in range(i + 1, n):
                acc -= d[i * n + j] * x[j]
            x[i] = acc / d[i * n + i]
        return x

    def solve_vec_transposed(self, b: Sequence[float]) -> list[float]:
        """Solve ``A^T x = b``."""
        n, d = self.n, self.lu.data
        y = [float(v) for v in b]
        # U^T z = b
        for i in range(n):
            acc = y[i]
            for j in range(i):
                acc -= d[j * n + i] * y[j]
            y[i] = acc / d[i * n + i]
        # L^T u = z
        for i in range(n - 1, -1, -1):
            acc = y[i]
            for j in range(i + 1, n):
                acc -= d[j * n + i] * y[j]
            y[i] = acc
        x = [0.0] * n
        for i, p in enumerate(self.perm):
            x[p] = y[i]
        return x

    def solve(self, b: Mat) -> Mat:
        """Solve ``A X = B``."""
        if b.rows != self.n:
            raise ValueError("dimension mismatch in solve")
        out = Mat(b.rows, b.cols)
        for j in range(b.cols):
            col = self.solve_vec(b.col(j))
            for i in range(b.rows):
                out.data[i * b.cols + j] = col[i]
        return out

    def solve_transposed(self, b: Mat) -> Mat:
        """Solve ``A^T X = B``."""
        if b.rows != self.n:
            raise ValueError("dimension mismatch in solve")
        out = Mat(b.rows, b.cols)
        for j in range(b.cols):
            col = self.solve_vec_transposed(b.col(j))
            for i in range(b.rows):
                out.data[i * b.cols + j] = col[i]
        return out

    def inverse(self) -> Mat:
        return self.solve(Mat.identity(self.n))

    def rcond(self, a: Mat) -> float:
        """Reciprocal 1-norm condition number ``1 / (|A|_1 |A^-1|_1)``.

        Computed exactly from the explicit inverse; the matrices this is used
        on are small.
        """
        inv = self.inverse()
        return 1.0 / (_norm1(a) * _norm1(inv))


def _norm1(a: Mat) -> float:
    return max((sum(abs(x) for x in a.col(j)) for j in range(a.cols)), default=0.0)


def lu_factor(a: Mat) -> LUFactor:
    if a.rows != a.cols:
        raise ValueError("LU factorization needs a square matrix")
    n = a.rows
    lu = a.copy()
    d = lu.data
    perm = list(range(n))
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(d[r * n + k]))
        if d[p * n + k] == 0.0:
            raise SingularMatrixError(f"matrix is singular (zero pivot in column {k})")
        if p != k:
            lu.swap_rows_(p, k)
            perm[p], perm[k] = perm[k], perm[p]
        piv = d[k * n + k]
        for i in range(k + 1, n):
            f = d[i * n + k] / piv
            d[i * n + k] = f
            if f != 0.0:
                for j in range(k + 1, n):
                    d[i * n + j] -= f * d[k * n + j]
    return LUFactor(lu, perm)


# text format ------------------------------------------------------------

class MatrixParseError(ValueError):
    """Malformed matrix text; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def parse_matrix(text: str) -> Mat:
    """Parse the matrix text format.

    The first non-comment line holds ``rows cols``; each following line holds
    one row. Lines starting with ``#`` and blank lines are skipped.
    """
    lines = [
        (num, line.strip())
        for num, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise MatrixParseError("empty input, expected a 'rows cols' header", 1)
    num, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise MatrixParseError(f"header must be 'rows cols', got {header!r}", num)
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise MatrixParseError(f"header must hold two integers, got {header!r}", num) from None
    if rows < 0 or cols < 0:
        raise MatrixParseError("dimensions must be non-negative", num)
    body = lines[1:]
    if len(body) != rows:
        where = body[-1][0] if body else num
        raise MatrixParseError(f"expected {rows} data rows, found {len(body)}", where)
    flat: list[float] = []
    for num, line in body:
        tokens = line.split()
        if len(tokens) != cols:
            raise MatrixParseError(f"expected {cols} values, found {len(tokens)}", num)
        for tok in tokens:
            try:
                x = float(tok)
            except ValueError:
                raise MatrixParseError(f"not a number: {tok!r}", num) from None
            if not math.isfinite(x):
                raise MatrixParseError(f"non-finite value: {tok!r}", num)
            flat.append(x)
    return Mat(rows, cols, flat)


def read_matrix(path) -> Mat:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def format_matrix(a: Mat) -> str:
    lines = [f"{a.rows} {a.cols}"]
    for i in range(a.rows):
        lines.append(" ".join(format(x, ".16e") for x in a.row(i)))
    return "\n".join(lines) + "\n"


def write_matrix(path, a: Mat) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(a))
