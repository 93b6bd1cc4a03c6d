# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled hot kernels; same API and semantics as ``_kernels_py``."""

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM, PyTuple_GET_ITEM, PyTuple_GET_SIZE
from cpython.ref cimport Py_INCREF, PyObject
from cpython.long cimport PyLong_AsSsize_t, PyLong_FromSsize_t
from libc.stdlib cimport malloc, free


cdef inline Py_ssize_t _at(tuple p, Py_ssize_t i):
    return PyLong_AsSsize_t(<object>PyTuple_GET_ITEM(p, i))


cdef inline tuple _mul(tuple p, tuple q):
    cdef Py_ssize_t n = PyTuple_GET_SIZE(p)
    cdef Py_ssize_t i
    cdef tuple r = PyTuple_New(n)
    cdef object o
    for i in range(n):
        o = <object>PyTuple_GET_ITEM(q, _at(p, i))
        Py_INCREF(o)
        PyTuple_SET_ITEM(r, i, o)
    return r


cdef inline tuple _inv(tuple p):
    cdef Py_ssize_t n = PyTuple_GET_SIZE(p)
    cdef Py_ssize_t i
    cdef tuple r = PyTuple_New(n)
    cdef object o
    for i in range(n):
        o = PyLong_FromSsize_t(i)
        Py_INCREF(o)
        PyTuple_SET_ITEM(r, _at(p, i), o)
    return r


def mul(tuple p, tuple q):
    return _mul(p, q)


def inv(tuple p):
    return _inv(p)


def conj(tuple p, tuple g):
    """``g^-1 p g``: the image of ``p`` under relabelling by ``g``."""
    cdef Py_ssize_t n = PyTuple_GET_SIZE(p)
    cdef Py_ssize_t i
    cdef tuple r = PyTuple_New(n)
    cdef object o
    for i in range(n):
        o = <object>PyTuple_GET_ITEM(g, _at(p, i))
        Py_INCREF(o)
        PyTuple_SET_ITEM(r, _at(g, i), o)
    return r


def is_identity(tuple p):
    cdef Py_ssize_t i
    for i in range(PyTuple_GET_SIZE(p)):
        if _at(p, i) != i:
            return False
    return True


def fixed_count(tuple p):
    cdef Py_ssize_t i, n = 0
    for i in range(PyTuple_GET_SIZE(p)):
        if _at(p, i) == i:
            n += 1
    return n


cdef void _grow(list gens, list orbit, dict trans, dict tinv, Py_ssize_t start):
    cdef Py_ssize_t i = start
    cdef tuple u, s, v
    cdef object z
    while i < len(orbit):
        y = orbit[i]
        u = <tuple>trans[y]
        for s in gens:
            z = <object>PyTuple_GET_ITEM(s, PyLong_AsSsize_t(y))
            if z not in trans:
                v = _mul(u, s)
                trans[z] = v
                tinv[z] = _inv(v)
                orbit.append(z)
        i += 1


def orbit_transversal(gens, point, degree):
    ident = tuple(range(degree))
    trans = {point: ident}
    tinv = {point: ident}
    orbit = [point]
    _grow(list(gens), orbit, trans, tinv, 0)
    return orbit, trans, tinv


def extend_transversal(gens, new_gens, list orbit, dict trans, dict tinv):
    cdef Py_ssize_t old = len(orbit)
    cdef tuple u, s, v
    cdef Py_ssize_t j
    for j in range(old):
        y = orbit[j]
        u = <tuple>trans[y]
        for s in new_gens:
            z = <object>PyTuple_GET_ITEM(s, PyLong_AsSsize_t(y))
            if z not in trans:
                v = _mul(u, s)
                trans[z] = v
                tinv[z] = _inv(v)
                orbit.append(z)
    _grow(list(gens), orbit, trans, tinv, old)


def sift(base, tinvs, tuple g, Py_ssize_t start=0):
    cdef Py_ssize_t k = len(base)
    cdef Py_ssize_t i = start
    cdef object t
    cdef dict ti
    while i < k:
        ti = <dict>tinvs[i]
        t = ti.get(<object>PyTuple_GET_ITEM(g, PyLong_AsSsize_t(base[i])))
        if t is None:
            return g, i
        g = _mul(g, <tuple>t)
        i += 1
    return g, k


def coset_canon(base, orbits_, transs, tuple g):
    cdef Py_ssize_t i, a, v, bval, best, n = PyTuple_GET_SIZE(g)
    cdef list orb
    for i in range(len(base)):
        orb = <list>orbits_[i]
        if len(orb) == 1:
            continue
        best = -1
        bval = n
        for x in orb:
            a = PyLong_AsSsize_t(x)
            v = _at(g, a)
            if v < bval:
                bval = v
                best = a
        if best != PyLong_AsSsize_t(base[i]):
            g = _mul(<tuple>transs[i][best], g)
    return g


def orbits(gens, Py_ssize_t degree):
    cdef Py_ssize_t p, y, z, top
    cdef Py_ssize_t *label = <Py_ssize_t *>malloc(degree * sizeof(Py_ssize_t))
    cdef Py_ssize_t *stack = <Py_ssize_t *>malloc(degree * sizeof(Py_ssize_t))
    cdef list gl = list(gens)
    cdef tuple s
    try:
        for p in range(degree):
            label[p] = -1
        for p in range(degree):
            if label[p] >= 0:
                continue
            label[p] = p
            stack[0] = p
            top = 1
            while top:
                top -= 1
                y = stack[top]
                for s in gl:
                    z = _at(s, y)
                    if label[z] < 0:
                        label[z] = p
                        stack[top] = z
                        top += 1
        return [label[p] for p in range(degree)]
    finally:
        free(label)
        free(stack)
