# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dense kernels; same contracts and summation order as _pykernels."""
from cpython.array cimport array, clone

cdef array _dtemplate = array("d")


def matmul(const double[::1] a, const double[::1] b, Py_ssize_t m, Py_ssize_t k, Py_ssize_t n):
    cdef array out = clone(_dtemplate, m * n, True)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, p, base
    cdef double acc
    for i in range(m):
        base = i * k
        for j in range(n):
            acc = 0.0
            for p in range(k):
                acc = acc + a[base + p] * b[p * n + j]
            o[i * n + j] = acc
    return out


def matvec(const double[::1] a, Py_ssize_t m, Py_ssize_t n, const double[::1] x):
    cdef array out = clone(_dtemplate, m, True)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, base
    cdef double acc
    for i in range(m):
        base = i * n
        acc = 0.0
        for j in range(n):
            acc = acc + a[base + j] * x[j]
        o[i] = acc
    return out


def vecmat(const double[::1] x, const double[::1] a, Py_ssize_t m, Py_ssize_t n):
    cdef array out = clone(_dtemplate, n, True)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double acc
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc = acc + x[i] * a[i * n + j]
        o[j] = acc
    return out


def rank1_update(double[::1] a, Py_ssize_t m, Py_ssize_t n, double alpha,
                 const double[::1] x, const double[::1] y):
    cdef Py_ssize_t i, j, base
    cdef double ax
    for i in range(m):
        ax = alpha * x[i]
        if ax == 0.0:
            continue
        base = i * n
        for j in range(n):
            a[base + j] = a[base + j] + ax * y[j]


def transpose(const double[::1] a, Py_ssize_t m, Py_ssize_t n):
    cdef array out = clone(_dtemplate, m * n, True)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    for i in range(m):
        for j in range(n):
            o[j * m + i] = a[i * n + j]
    return out


def sumsq(const double[::1] a):
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(a.shape[0]):
        acc = acc + a[i] * a[i]
    return acc


def dot(const double[::1] x, const double[::1] y):
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(x.shape[0]):
        acc = acc + x[i] * y[i]
    return acc
