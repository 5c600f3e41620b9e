"""Pure-Python dense kernels.

Every routine mirrors ``_ckernels.pyx`` operation for operation, so both
backends produce bit-identical results. Matrices are flat row-major
``array('d')`` buffers; dimensions are passed explicitly.
"""
from array import array


def matmul(a, b, m, k, n):
    out = array("d", bytes(8 * m * n))
    for i in range(m):
        base = i * k
        for j in range(n):
            acc = 0.0
            for p in range(k):
                acc += a[base + p] * b[p * n + j]
            out[i * n + j] = acc
    return out


def matvec(a, m, n, x):
    out = array("d", bytes(8 * m))
    for i in range(m):
        base = i * n
        acc = 0.0
        for j in range(n):
            acc += a[base + j] * x[j]
        out[i] = acc
    return out


def vecmat(x, a, m, n):
    out = array("d", bytes(8 * n))
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += x[i] * a[i * n + j]
        out[j] = acc
    return out


def rank1_update(a, m, n, alpha, x, y):
    """In place: a += alpha * x y^T."""
    for i in range(m):
        ax = alpha * x[i]
        if ax == 0.0:
            continue
        base = i * n
        for j in range(n):
            a[base + j] += ax * y[j]


def transpose(a, m, n):
    out = array("d", bytes(8 * m * n))
    for i in range(m):
        for j in range(n):
            out[j * m + i] = a[i * n + j]
    return out


def sumsq(a):
    acc = 0.0
    for x in a:
        acc += x * x
    return acc


def dot(x, y):
    acc = 0.0
    for i in range(len(x)):
        acc += x[i] * y[i]
    return acc
