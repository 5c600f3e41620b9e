"""The compiled and pure-Python kernels must agree bit for bit."""
from array import array

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bgform import _backend, _pykernels, gen_skew_hamiltonian, reduce

ckernels = pytest.importorskip("bgform._ckernels")

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def buf(draw, size):
    return array("d", draw(st.lists(finite, min_size=size, max_size=size)))


@st.composite
def shapes_and_data(draw):
    m, k, n = (draw(st.integers(1, 6)) for _ in range(3))
    return m, k, n, buf(draw, m * k), buf(draw, k * n), buf(draw, m), buf(draw, k)


@settings(max_examples=100, deadline=None)
@given(shapes_and_data(), finite)
def test_kernels_bit_identical(case, alpha):
    m, k, n, a, b, xm, xk = case
    for fn, args in [
        ("matmul", (a, b, m, k, n)),
        ("matvec", (a, m, k, xk)),
        ("vecmat", (xm, a, m, k)),
        ("transpose", (a, m, k)),
        ("sumsq", (a,)),
        ("dot", (xk, xk)),
    ]:
        assert getattr(ckernels, fn)(*args) == getattr(_pykernels, fn)(*args), fn
    ca, pa = array("d", a), array("d", a)
    ckernels.rank1_update(ca, m, k, alpha, xm, xk)
    _pykernels.rank1_update(pa, m, k, alpha, xm, xk)
    assert ca == pa


@pytest.fixture
def restore_backend():
    prev = _backend.name
    yield
    _backend.set_backend(prev)


def test_full_reduction_identical_across_backends(restore_backend):
    s = gen_skew_hamiltonian(7, 3)
    out = {}
    for name in ("python", "cython"):
        _backend.set_backend(name)
        r = reduce(s, "elementary")
        out[name] = (r.reduced.to_full().tolist(), r.transform.y.tolist())
    assert out["python"] == out["cython"]


def test_unknown_backend_rejected(restore_backend):
    with pytest.raises(ValueError, match="unavailable"):
        _backend.set_backend("fortran")
    assert set(_backend.available_backends()) == {"cython", "python"}
