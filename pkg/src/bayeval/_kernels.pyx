# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels (Cython backend).

Transliteration of ``bayeval._purekernels``; see that module for the shared
API contract and the algorithm conventions. Must stay bitwise-identical to the
pure backend: same operation order, no FMA contraction (built with
-ffp-contract=off), same libm functions.
"""

from libc.math cimport NAN, log, pow, sqrt
from libc.stdlib cimport free, malloc

ctypedef unsigned long long u64

cdef extern from *:
    """
    #include <stdint.h>
    /* 64x64 -> 128 multiply; requires a compiler with __uint128_t (gcc/clang).
       On MSVC use _umul128; the pure-Python backend covers anything else. */
    static inline uint64_t bk_mulhilo(uint64_t a, uint64_t b, uint64_t *hi) {
        __uint128_t p = (__uint128_t)a * (__uint128_t)b;
        *hi = (uint64_t)(p >> 64);
        return (uint64_t)p;
    }
    """
    u64 bk_mulhilo(u64 a, u64 b, u64 *hi) nogil

BACKEND_KIND = "compiled"

cdef u64 _M0 = 0xD2E7470EE14C6C93
cdef u64 _M1 = 0xCA5A826395121157
cdef u64 _W0 = 0x9E3779B97F4A7C15
cdef u64 _W1 = 0xBB67AE8584CAA73B

cdef double _U53 = 1.0 / 9007199254740992.0  # 2**-53


cdef struct Philox:
    u64 k0
    u64 k1
    u64 c0
    u64 c1
    u64 c2
    u64 c3
    u64 buf[4]
    int pos


cdef void _philox_refill(Philox *s) nogil:
    cdef u64 c0 = s.c0
    cdef u64 c1 = s.c1
    cdef u64 c2 = s.c2
    cdef u64 c3 = s.c3
    cdef u64 k0 = s.k0
    cdef u64 k1 = s.k1
    cdef u64 hi0, hi1, lo0, lo1, t0, t2
    cdef int r
    for r in range(10):
        lo0 = bk_mulhilo(_M0, c0, &hi0)
        lo1 = bk_mulhilo(_M1, c2, &hi1)
        t0 = hi1 ^ c1 ^ k0
        t2 = hi0 ^ c3 ^ k1
        c0 = t0
        c1 = lo1
        c2 = t2
        c3 = lo0
        k0 = k0 + _W0
        k1 = k1 + _W1
    s.buf[0] = c0
    s.buf[1] = c1
    s.buf[2] = c2
    s.buf[3] = c3
    s.pos = 0
    s.c0 += 1
    if s.c0 == 0:
        s.c1 += 1
        if s.c1 == 0:
            s.c2 += 1
            if s.c2 == 0:
                s.c3 += 1


cdef inline u64 _next_u64(Philox *s) nogil:
    if s.pos == 4:
        _philox_refill(s)
    s.pos += 1
    return s.buf[s.pos - 1]


cdef inline double _uniform(Philox *s) nogil:
    return <double>(_next_u64(s) >> 11) * _U53


cdef inline double _uniform_open(Philox *s) nogil:
    return <double>((_next_u64(s) >> 11) + 1) * _U53


cdef double _normal(Philox *s) nogil:
    cdef double u, v, w
    while True:
        u = 2.0 * _uniform(s) - 1.0
        v = 2.0 * _uniform(s) - 1.0
        w = u * u + v * v
        if 0.0 < w < 1.0:
            return u * sqrt(-2.0 * log(w) / w)


cdef double _gamma_large(Philox *s, double shape) nogil:
    cdef double d = shape - 1.0 / 3.0
    cdef double c = 1.0 / sqrt(9.0 * d)
    cdef double x, t, v, u, x2
    while True:
        x = _normal(s)
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = _uniform_open(s)
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v
        if log(u) < 0.5 * x2 + d * (1.0 - v + log(v)):
            return d * v


cdef double _gamma(Philox *s, double shape) nogil:
    cdef double g, u
    if shape < 1.0:
        g = _gamma_large(s, shape + 1.0)
        u = _uniform_open(s)
        return g * pow(u, 1.0 / shape)
    return _gamma_large(s, shape)


cdef void _dirichlet_into(Philox *s, const double *alpha, double *out, int m) nogil:
    # First m-1 components are rounded quotients; the last is 1 - prefix so
    # the sequential float sum is exactly 1.0 (redraw if it would go negative).
    cdef double total, g, prefix, y, last
    cdef int k
    while True:
        total = 0.0
        for k in range(m):
            g = _gamma(s, alpha[k])
            out[k] = g
            total += g
        if total <= 0.0:
            continue
        prefix = 0.0
        for k in range(m - 1):
            y = out[k] / total
            out[k] = y
            prefix += y
        last = 1.0 - prefix
        if last < 0.0:
            continue
        out[m - 1] = last
        return


cdef void _eval_metrics(const double *mu, const double *theta, int m, double *out) nogil:
    cdef double acc = 0.0
    cdef double sum_p = 0.0
    cdef double sum_r = 0.0
    cdef double sum_f = 0.0
    cdef double sum_s = 0.0
    cdef double r, den, p, f, num2, den2, t, sp
    cdef int j, u, v
    for j in range(m):
        acc += mu[j] * theta[j * m + j]
    for j in range(m):
        r = theta[j * m + j]
        den = 0.0
        for u in range(m):
            den += mu[u] * theta[u * m + j]
        if den == 0.0:
            p = NAN
        else:
            p = mu[j] * theta[j * m + j] / den
        if p != p:
            f = NAN
        elif p + r == 0.0:
            f = 0.0
        else:
            f = 2.0 * p * r / (p + r)
        num2 = 0.0
        den2 = 0.0
        for u in range(m):
            if u == j:
                continue
            for v in range(m):
                t = mu[u] * theta[u * m + v]
                den2 += t
                if v != j:
                    num2 += t
        if den2 == 0.0:
            sp = NAN
        else:
            sp = num2 / den2
        out[5 + 4 * j + 0] = p
        out[5 + 4 * j + 1] = r
        out[5 + 4 * j + 2] = f
        out[5 + 4 * j + 3] = sp
        sum_p += p
        sum_r += r
        sum_f += f
        sum_s += sp
    out[0] = acc
    out[1] = sum_f / m
    out[2] = sum_p / m
    out[3] = sum_r / m
    out[4] = sum_s / m


def philox4x64_block(c0, c1, c2, c3, k0, k1):
    """One Philox4x64-10 block: (counter, key) -> four 64-bit words."""
    cdef Philox s
    s.k0 = k0
    s.k1 = k1
    s.c0 = c0
    s.c1 = c1
    s.c2 = c2
    s.c3 = c3
    s.pos = 4
    _philox_refill(&s)
    return (s.buf[0], s.buf[1], s.buf[2], s.buf[3])


cdef class Stream:
    """Stateful Philox4x64-10 variate stream. Single-owner; not thread-safe."""

    cdef Philox st
    cdef readonly unsigned long long seed
    cdef readonly unsigned long long stream_id

    def __init__(self, seed, stream_id=0, block_hi=0, substream_tag=0):
        self.seed = seed
        self.stream_id = stream_id
        self.st.k0 = seed
        self.st.k1 = stream_id
        self.st.c0 = 0
        self.st.c1 = 0
        self.st.c2 = block_hi
        self.st.c3 = substream_tag
        self.st.pos = 4

    def u64(self):
        return _next_u64(&self.st)

    def uniform(self):
        """Next double in [0, 1)."""
        return _uniform(&self.st)

    def _uniform_open(self):
        """Next double in (0, 1]; safe under log()."""
        return _uniform_open(&self.st)

    def normal(self):
        """Standard normal via the polar method (spare variate discarded)."""
        return _normal(&self.st)

    def gamma(self, double shape):
        """Gamma(shape, scale=1) draw; caller guarantees shape > 0."""
        return _gamma(&self.st, shape)

    def dirichlet(self, alpha):
        """Dirichlet draw as a list; sequential float sum is exactly 1.0."""
        cdef int m = len(alpha)
        cdef double *a = <double *>malloc(m * sizeof(double))
        cdef double *o = <double *>malloc(m * sizeof(double))
        if a == NULL or o == NULL:
            free(a)
            free(o)
            raise MemoryError()
        cdef int k
        try:
            for k in range(m):
                a[k] = alpha[k]
            _dirichlet_into(&self.st, a, o, m)
            return [o[k] for k in range(m)]
        finally:
            free(a)
            free(o)

    def fill_uniform(self, double[::1] out):
        cdef Py_ssize_t i, n = out.shape[0]
        with nogil:
            for i in range(n):
                out[i] = _uniform(&self.st)

    def fill_normal(self, double[::1] out):
        cdef Py_ssize_t i, n = out.shape[0]
        with nogil:
            for i in range(n):
                out[i] = _normal(&self.st)

    def fill_gamma(self, double shape, double[::1] out):
        cdef Py_ssize_t i, n = out.shape[0]
        with nogil:
            for i in range(n):
                out[i] = _gamma(&self.st, shape)


def eval_metrics(mu, theta, out):
    """Evaluate all 5 + 4M metric functionals at one (mu, theta) point.

    Same contract as the pure backend: mu length-M, theta M x M rows, out a
    writable length-(5+4M) buffer; undefined entries get NaN.
    """
    cdef int m = len(mu)
    cdef int ncols = 5 + 4 * m
    cdef double *cmu = <double *>malloc(m * sizeof(double))
    cdef double *cth = <double *>malloc(m * m * sizeof(double))
    cdef double *cout = <double *>malloc(ncols * sizeof(double))
    if cmu == NULL or cth == NULL or cout == NULL:
        free(cmu)
        free(cth)
        free(cout)
        raise MemoryError()
    cdef int j, v, c
    try:
        for j in range(m):
            cmu[j] = mu[j]
            row = theta[j]
            for v in range(m):
                cth[j * m + v] = row[v]
        _eval_metrics(cmu, cth, m, cout)
        for c in range(ncols):
            out[c] = cout[c]
    finally:
        free(cmu)
        free(cth)
        free(cout)


def batch_metric_samples(double[::1] mu_alpha, double[:, ::1] theta_alpha,
                         unsigned long long seed, unsigned long long stream_id,
                         Py_ssize_t start, Py_ssize_t stop, double[:, ::1] out):
    """Fill rows [start, stop) of ``out`` with joint posterior metric draws.

    Draw i uses its own counter block (block_hi=i, tag=1), so the result is
    independent of how the index range is split across workers. Releases the
    GIL; disjoint row ranges may be filled from concurrent threads.
    """
    cdef int m = <int>mu_alpha.shape[0]
    cdef int ncols = 5 + 4 * m
    if theta_alpha.shape[0] != m or theta_alpha.shape[1] != m:
        raise ValueError("theta_alpha must be M x M")
    if out.shape[1] != ncols:
        raise ValueError("out must have 5 + 4M columns")
    if start < 0 or stop < start or stop > out.shape[0]:
        raise ValueError("invalid row range")
    cdef double *mu = <double *>malloc(m * sizeof(double))
    cdef double *theta = <double *>malloc(m * m * sizeof(double))
    if mu == NULL or theta == NULL:
        free(mu)
        free(theta)
        raise MemoryError()
    cdef const double *amu = &mu_alpha[0]
    cdef const double *ath = &theta_alpha[0, 0]
    cdef Philox st
    cdef Py_ssize_t i
    cdef int j
    try:
        with nogil:
            for i in range(start, stop):
                st.k0 = seed
                st.k1 = stream_id
                st.c0 = 0
                st.c1 = 0
                st.c2 = <u64>i
                st.c3 = 1
                st.pos = 4
                _dirichlet_into(&st, amu, mu, m)
                for j in range(m):
                    _dirichlet_into(&st, ath + j * m, theta + j * m, m)
                _eval_metrics(mu, theta, m, &out[i, 0])
    finally:
        free(mu)
        free(theta)
