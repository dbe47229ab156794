# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the swarm update and linear victim scoring.

Every function here has a numpy twin in ``_core_py`` with the same
signature; ``leap.kernels`` picks one at import time.
"""
from libc.math cimport exp
from libc.stdint cimport int64_t

BACKEND = "cython"


def velocity_update(double[::1] v, const int64_t[::1] x, const int64_t[::1] lbest,
                    const int64_t[::1] gbest, double omega, double vmax):
    cdef Py_ssize_t d, n = v.shape[0]
    cdef double pull, val
    cdef double step = vmax * (1.0 - omega)
    for d in range(n):
        pull = (1.0 if lbest[d] == x[d] else -1.0) + (1.0 if gbest[d] == x[d] else -1.0)
        val = omega * v[d] + step * pull
        if val > vmax:
            val = vmax
        elif val < -vmax:
            val = -vmax
        v[d] = val


def adoption_probabilities(const double[::1] v, double[::1] out):
    cdef Py_ssize_t d, n = v.shape[0]
    cdef double top, total = 0.0, p
    if n == 0:
        return
    top = v[0]
    for d in range(1, n):
        if v[d] > top:
            top = v[d]
    for d in range(n):
        out[d] = exp(v[d] - top)
        total += out[d]
    for d in range(n):
        p = n * out[d] / total
        out[d] = 1.0 if p > 1.0 else p


def apply_moves(int64_t[::1] x, const int64_t[::1] target, const double[::1] prob,
                const double[::1] u, Py_ssize_t changed, Py_ssize_t max_changes):
    cdef Py_ssize_t d, n = x.shape[0]
    for d in range(n):
        if x[d] == target[d] or u[d] >= prob[d]:
            continue
        if x[d] == 0:
            if changed + 1 > max_changes:
                continue
            changed += 1
        elif target[d] == 0:
            changed -= 1
        x[d] = target[d]
    return changed


def linear_scores(const double[:, ::1] weights, const int64_t[::1] idx, double[::1] out):
    cdef Py_ssize_t i, k, m = idx.shape[0], c = weights.shape[1]
    cdef int64_t row
    for k in range(c):
        out[k] = 0.0
    for i in range(m):
        row = idx[i]
        if row < 0:
            continue
        for k in range(c):
            out[k] += weights[row, k]


def softmax(const double[::1] scores, double[::1] out):
    cdef Py_ssize_t k, c = scores.shape[0]
    cdef double top, total = 0.0
    if c == 0:
        return
    top = scores[0]
    for k in range(1, c):
        if scores[k] > top:
            top = scores[k]
    for k in range(c):
        out[k] = exp(scores[k] - top)
        total += out[k]
    for k in range(c):
        out[k] /= total
