# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; must agree exactly with ``_kernels_py``."""

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM, PyTuple_GET_ITEM
from cpython.ref cimport Py_INCREF


def add_terms(dict a, dict b, int sign=1):
    cdef dict out = dict(a)
    cdef object e, c, v
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = c if sign == 1 else -c
        else:
            v = v + c if sign == 1 else v - c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


cdef inline tuple _add_exp(tuple x, tuple y, Py_ssize_t n):
    cdef tuple t = PyTuple_New(n)
    cdef Py_ssize_t i
    cdef long s
    cdef object o
    for i in range(n):
        s = <long>(<object>PyTuple_GET_ITEM(x, i)) + <long>(<object>PyTuple_GET_ITEM(y, i))
        o = s
        Py_INCREF(o)
        PyTuple_SET_ITEM(t, i, o)
    return t


def mul_terms(dict a, dict b):
    if len(a) < len(b):
        a, b = b, a
    cdef dict out = {}
    cdef tuple ea, eb, e
    cdef object ca, cb, v
    cdef Py_ssize_t n = 0
    cdef list a_items = list(a.items())
    for eb, cb in b.items():
        n = len(eb)
        for ea, ca in a_items:
            e = _add_exp(ea, eb, n)
            v = out.get(e)
            if v is None:
                out[e] = ca * cb
            else:
                out[e] = v + ca * cb
    return {e: v for e, v in out.items() if v}


def bareiss_echelon(list rows, Py_ssize_t ncols):
    cdef Py_ssize_t nrows = len(rows)
    cdef list pivots = []
    cdef Py_ssize_t swaps = 0, k = 0, col, p, i, j
    cdef object prev = 1, piv, f
    cdef list rk, ri
    for col in range(ncols):
        if k == nrows:
            break
        p = k
        while p < nrows and (<list>rows[p])[col] == 0:
            p += 1
        if p == nrows:
            continue
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            swaps += 1
        rk = <list>rows[k]
        piv = rk[col]
        for i in range(k + 1, nrows):
            ri = <list>rows[i]
            f = ri[col]
            if f == 0:
                if piv != prev:
                    for j in range(col + 1, ncols):
                        ri[j] = (ri[j] * piv) // prev
                continue
            for j in range(col + 1, ncols):
                ri[j] = (ri[j] * piv - f * rk[j]) // prev
            ri[col] = 0
        prev = piv
        pivots.append(col)
        k += 1
    return pivots, swaps
