"""Independent numpy oracles used by the test suite.

Nothing here calls into the package's arithmetic; conversions only read
entries out of ``Mat`` objects.
"""
from pathlib import Path

import numpy as np

from bgform.matrix import Mat, read_matrix
from bgform.structure import BlockMat

FIXTURES = Path(__file__).parent / "fixtures"


def to_np(m: Mat) -> np.ndarray:
    return np.array(m.data, dtype=float).reshape(m.rows, m.cols)


def from_np(a) -> Mat:
    a = np.asarray(a, dtype=float)
    return Mat(a.shape[0], a.shape[1], a.ravel().tolist())


def block_np(s: BlockMat) -> np.ndarray:
    return to_np(s.to_full())


def block_from_np(a) -> BlockMat:
    return BlockMat.from_full(from_np(a))


def load_fixture(name: str) -> Mat:
    return read_matrix(FIXTURES / name)


def dense_j(n: int) -> np.ndarray:
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [-i, z]])


def g_element(left: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Dense ``[[L, 0], [Y L, L^-T]]``."""
    n = left.shape[0]
    return np.block([[left, np.zeros((n, n))], [y @ left, np.linalg.inv(left).T]])


def dense_step_u(f) -> np.ndarray:
    """Dense U_i for a StepFactors, assembled in the single-matrix form.

    ``L = P L'`` and ``Y = P (alpha v v^T) P^T`` so that
    ``U = diag(P,P) [[I,0],[alpha v v^T, I]] diag(L', L'^-T)``.
    """
    n = f.n
    c = f.step_index
    perm = np.eye(n)
    if f.pivot is not None:
        perm[[c, f.pivot - 1]] = perm[[f.pivot - 1, c]]
    v = np.array(f.v)
    y = np.zeros((n, n)) if f.alpha is None else f.alpha * np.outer(v, v)
    w = np.array(f.w)
    if f.variant == "elementary":
        lbar = np.eye(n)
        lbar[:, c] += w
    else:
        lbar = np.eye(n) - 2.0 * np.outer(w, w)
    return g_element(perm @ lbar, perm @ y @ perm.T)


def dense_similarity(u: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``U^-1 S U`` by a generic linear solve."""
    return np.linalg.solve(u, s @ u)


def arme_residual_np(y, s: np.ndarray) -> np.ndarray:
    n = s.shape[0] // 2
    s11, s12, s21, s22 = s[:n, :n], s[:n, n:], s[n:, :n], s[n:, n:]
    return -y @ s12 @ y + s22 @ y - y @ s11 + s21
