# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled truncated sparse product; same contract as ``_pykernel.mul_terms``.

Coefficients are int64 with checked arithmetic: any overflow raises
``OverflowError`` and the caller reruns the product in Python.  The
accumulator key is ``(packed monomial << 16) | flat index``, so packed
monomials must fit in 48 bits and flat indices in 16.
"""
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from cython.operator cimport dereference as deref, preincrement as inc

cdef extern from *:
    bint mul_overflow "__builtin_mul_overflow"(int64_t a, int64_t b, int64_t* r) nogil
    bint add_overflow "__builtin_add_overflow"(int64_t a, int64_t b, int64_t* r) nogil

cdef struct Term:
    uint64_t key
    int64_t weight
    int64_t f
    int64_t coef


cdef vector[Term] _load(seq) except *:
    cdef vector[Term] out
    cdef Term t
    out.reserve(len(seq))
    for key, weight, f, coef in seq:
        t.key = key
        t.weight = weight
        t.f = f
        t.coef = coef
        out.push_back(t)
    return out


def mul_terms(a, b, long max_weight, csr):
    """Multiply flattened series ``a`` and ``b`` under the CSR structure table."""
    cdef Py_ssize_t n = csr[0]
    cdef const int64_t[:] row_ptr = csr[1]
    cdef const int32_t[:] col_f = csr[2]
    cdef const int64_t[:] col_c = csr[3]
    cdef const uint8_t[:] beyond = csr[4]

    cdef vector[Term] va = _load(a)
    cdef vector[Term] vb = _load(sorted(b, key=lambda t: t[1]))
    cdef unordered_map[uint64_t, int64_t] acc
    cdef bint truncated = False
    cdef Py_ssize_t i, j, idx, s, e, k
    cdef int64_t room, p, q, cur
    cdef uint64_t key, full
    cdef Term ta, tb
    cdef bint overflow = False

    with nogil:
        for i in range(<Py_ssize_t>va.size()):
            ta = va[i]
            room = max_weight - ta.weight
            for j in range(<Py_ssize_t>vb.size()):
                tb = vb[j]
                if tb.weight > room:
                    truncated = True
                    break
                idx = ta.f * n + tb.f
                s = row_ptr[idx]
                e = row_ptr[idx + 1]
                if s == e:
                    if beyond[idx]:
                        truncated = True
                    continue
                if mul_overflow(ta.coef, tb.coef, &p):
                    overflow = True
                    break
                key = (ta.key + tb.key) << 16
                for k in range(s, e):
                    if mul_overflow(p, col_c[k], &q):
                        overflow = True
                        break
                    full = key | <uint64_t>col_f[k]
                    cur = acc[full]
                    if add_overflow(cur, q, &cur):
                        overflow = True
                        break
                    acc[full] = cur
                if overflow:
                    break
            if overflow:
                break
    if overflow:
        raise OverflowError("int64 overflow in compiled product")

    out = {}
    cdef unordered_map[uint64_t, int64_t].iterator it = acc.begin()
    while it != acc.end():
        if deref(it).second:
            out[(deref(it).first >> 16, deref(it).first & 0xFFFF)] = deref(it).second
        inc(it)
    return out, truncated
