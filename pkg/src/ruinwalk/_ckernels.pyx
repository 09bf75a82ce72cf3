# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_pykernels``.

Same signatures and semantics; summations use a Neumaier loop instead of
``math.fsum``, so results agree with the Python path to rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, INFINITY, copysign
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

NAME = "compiled"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline double _xlog(double n, double logp) noexcept nogil:
    if n == 0.0:
        return 0.0
    return n * logp


cdef inline void _neumaier(double v, double *total, double *comp) noexcept nogil:
    cdef double s = total[0] + v
    if fabs(total[0]) >= fabs(v):
        comp[0] += (total[0] - s) + v
    else:
        comp[0] += (v - s) + total[0]
    total[0] = s


def ruin_sum(long x, long t, double lpr, double lpl, double lpp, const double[::1] lf):
    cdef long kmax = (t - x) // 2
    cdef long k, rest
    cdef double base = log(<double>x) + lf[t - 1]
    cdef double top = -INFINITY
    cdef double lt, total = 0.0, comp = 0.0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] buf = np.empty(kmax + 1)
    cdef double[::1] logs = buf
    with nogil:
        for k in range(kmax + 1):
            rest = t - x - 2 * k
            lt = (_xlog(k, lpr) + _xlog(x + k, lpl) + _xlog(rest, lpp)
                  + base - lf[x + k] - lf[k] - lf[rest])
            logs[k] = lt
            if lt > top:
                top = lt
        if top != -INFINITY:
            for k in range(kmax + 1):
                _neumaier(exp(logs[k] - top), &total, &comp)
    if top == -INFINITY:
        return 0.0, -INFINITY
    total += comp
    return exp(top) * total, top + log(total)


def hyp_terminating(double a, double b, double c, double z, long n):
    if n == 0 or z == 0.0:
        return 1.0, 0.0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lbuf = np.empty(n + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sbuf = np.empty(n + 1)
    cdef double[::1] logs = lbuf
    cdef double[::1] signs = sbuf
    cdef long j, m = n + 1
    cdef double r, top = 0.0, total = 0.0, comp = 0.0
    with nogil:
        logs[0] = 0.0
        signs[0] = 1.0
        for j in range(n):
            r = (a + j) * (b + j) / ((c + j) * (j + 1.0)) * z
            if r == 0.0:
                m = j + 1
                break
            logs[j + 1] = logs[j] + log(fabs(r))
            signs[j + 1] = signs[j] * (1.0 if r > 0.0 else -1.0)
            if logs[j + 1] > top:
                top = logs[j + 1]
        for j in range(m):
            _neumaier(signs[j] * exp(logs[j] - top), &total, &comp)
    total += comp
    if total == 0.0:
        return 0.0, -INFINITY
    return copysign(1.0, total), top + log(fabs(total))


def dp_run(long x_max, long t_max, double pr, double pl, double pp, grid=None, width=None):
    cdef long full = max(x_max, t_max) + 1
    cdef long w = full if width is None else min(max(<long>width, x_max + 1), full)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.zeros(w + 2)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.zeros(w + 2)
    cdef double[::1] cur = a
    cdef double[::1] nxt = b
    cdef double[::1] tmp
    cdef double[:, :] store
    cdef bint keep = grid is not None
    cdef long t, x, hi
    if keep:
        store = grid
    cur[0] = 1.0
    if keep:
        for x in range(x_max + 1):
            store[x, 0] = cur[x]
    for t in range(t_max):
        hi = min(t + 1, w)
        with nogil:
            nxt[0] = 0.0
            for x in range(1, hi + 1):
                nxt[x] = pr * cur[x + 1] + pl * cur[x - 1] + pp * cur[x]
        tmp = cur
        cur = nxt
        nxt = tmp
        if keep:
            for x in range(x_max + 1):
                store[x, t + 1] = cur[x]
    return np.asarray(cur[: x_max + 1]).copy()


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t step) noexcept nogil:
    return <double>(_mix64(key + (step + 1) * GOLDEN) >> 11) * INV53


def mix64(z):
    return _mix64(<uint64_t>(z & 0xFFFFFFFFFFFFFFFF))


def stream_key(seed, index):
    return _mix64(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF) + (<uint64_t>index + 1) * GOLDEN)


def uniform(key, step):
    return _uniform(<uint64_t>(key & 0xFFFFFFFFFFFFFFFF), <uint64_t>step)


cdef inline int64_t _walk(long x, double pr, double edge, long t_cap, uint64_t key) noexcept nogil:
    cdef long pos = x, j
    cdef double u
    if x == 0:
        return 0
    for j in range(t_cap):
        u = _uniform(key, j)
        if u < pr:
            pos += 1
        elif u < edge:
            pos -= 1
            if pos == 0:
                return j + 1
    return -1


def walk_one(long x, double pr, double pl, long t_cap, key):
    return _walk(x, pr, pr + pl, t_cap, <uint64_t>(key & 0xFFFFFFFFFFFFFFFF))


def simulate_range(long x, double pr, double pl, long t_cap, seed, long start, long stop,
                   int64_t[::1] counts):
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef double edge = pr + pl
    cdef long i
    cdef int64_t hit
    cdef long censored = 0
    with nogil:
        for i in range(start, stop):
            hit = _walk(x, pr, edge, t_cap, _mix64(s + (<uint64_t>i + 1) * GOLDEN))
            if hit < 0:
                censored += 1
            else:
                counts[hit] += 1
    return censored
