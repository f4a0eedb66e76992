"""Pure-Python sampling kernels (fallback backend).

Reference implementation of the hot kernels; ``bayeval._kernels`` is a Cython
transliteration of this module and must stay bitwise-identical (same operation
order, no fused multiply-adds, same libm calls). The public surface both
backends provide:

    BACKEND_KIND
    philox4x64_block(c0, c1, c2, c3, k0, k1) -> (u64, u64, u64, u64)
    Stream(seed, stream_id, block_hi=0, substream_tag=0)
    eval_metrics(mu, theta, out)
    batch_metric_samples(mu_alpha, theta_alpha, seed, stream_id, start, stop, out)

Conventions baked into both backends:

* Uniform core: Philox4x64-10, key = (seed, stream_id), 256-bit block counter
  starting at (0, 0, block_hi, substream_tag) and incrementing little-endian.
  Sequential streams use tag 0; per-draw substreams use tag 1 with the draw
  index in counter word 2, so they never overlap sequential consumption.
* Doubles from bits: (x >> 11) * 2**-53 in [0, 1); open variant adds 1 before
  scaling, giving (0, 1] so log() is always finite.
* Normals: Marsaglia polar method, second variate discarded.
* Gamma(shape, scale=1): Marsaglia-Tsang squeeze/rejection for shape >= 1;
  shape < 1 boosted via Gamma(shape+1) * U**(1/shape).
* Dirichlet: normalized independent gammas, redrawn if the total underflows
  to 0. The first M-1 components are the rounded quotients and the last is
  1 - (their left-to-right sum), which makes the sequential float sum of the
  draw exactly 1.0 (exact by Sterbenz subtraction for prefix >= 0.5, and
  within 2**-54 of 1 otherwise, which rounds to 1.0). A draw whose last
  component would come out negative (prefix > 1 by accumulated rounding,
  astronomically unlikely) is redrawn.
* Metric sample matrix layout for M classes (5 + 4M columns):
  col 0 accuracy/miF1, 1 macro F1, 2 macro precision, 3 macro recall,
  4 macro specificity, then per class j: 5+4j precision, +1 recall, +2 F1,
  +3 specificity. Undefined values (0/0) are stored as NaN.
"""

from math import log, sqrt

BACKEND_KIND = "pure"

_MASK = (1 << 64) - 1
_M0 = 0xD2E7470EE14C6C93
_M1 = 0xCA5A826395121157
_W0 = 0x9E3779B97F4A7C15
_W1 = 0xBB67AE8584CAA73B

_U53 = 1.0 / 9007199254740992.0  # 2**-53

_NAN = float("nan")


def philox4x64_block(c0, c1, c2, c3, k0, k1):
    """One Philox4x64-10 block: (counter, key) -> four 64-bit words."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> 64
        lo0 = p0 & _MASK
        hi1 = p1 >> 64
        lo1 = p1 & _MASK
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + _W0) & _MASK
        k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


class Stream:
    """Stateful Philox4x64-10 variate stream. Single-owner; not thread-safe."""

    __slots__ = ("seed", "stream_id", "_c0", "_c1", "_c2", "_c3", "_buf", "_pos")

    def __init__(self, seed, stream_id=0, block_hi=0, substream_tag=0):
        self.seed = seed
        self.stream_id = stream_id
        self._c0 = 0
        self._c1 = 0
        self._c2 = block_hi
        self._c3 = substream_tag
        self._buf = (0, 0, 0, 0)
        self._pos = 4

    def _next_u64(self):
        pos = self._pos
        if pos == 4:
            self._buf = philox4x64_block(
                self._c0, self._c1, self._c2, self._c3, self.seed, self.stream_id
            )
            c0 = (self._c0 + 1) & _MASK
            self._c0 = c0
            if c0 == 0:
                c1 = (self._c1 + 1) & _MASK
                self._c1 = c1
                if c1 == 0:
                    c2 = (self._c2 + 1) & _MASK
                    self._c2 = c2
                    if c2 == 0:
                        self._c3 = (self._c3 + 1) & _MASK
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]

    def u64(self):
        return self._next_u64()

    def uniform(self):
        """Next double in [0, 1)."""
        return (self._next_u64() >> 11) * _U53

    def _uniform_open(self):
        """Next double in (0, 1]; safe under log()."""
        return ((self._next_u64() >> 11) + 1) * _U53

    def normal(self):
        """Standard normal via the polar method (spare variate discarded)."""
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * sqrt(-2.0 * log(s) / s)

    def gamma(self, shape):
        """Gamma(shape, scale=1) draw; caller guarantees shape > 0."""
        if shape < 1.0:
            g = self._gamma_large(shape + 1.0)
            u = self._uniform_open()
            return g * u ** (1.0 / shape)
        return self._gamma_large(shape)

    def _gamma_large(self, shape):
        d = shape - 1.0 / 3.0
        c = 1.0 / sqrt(9.0 * d)
        while True:
            x = self.normal()
            t = 1.0 + c * x
            if t <= 0.0:
                continue
            v = t * t * t
            u = self._uniform_open()
            x2 = x * x
            if u < 1.0 - 0.0331 * x2 * x2:
                return d * v
            if log(u) < 0.5 * x2 + d * (1.0 - v + log(v)):
                return d * v

    def dirichlet(self, alpha):
        """Dirichlet draw as a list; sequential float sum is exactly 1.0."""
        m = len(alpha)
        out = [0.0] * m
        self._dirichlet_into([float(a) for a in alpha], out, 0, m)
        return out

    def _dirichlet_into(self, alpha, out, base, m):
        while True:
            total = 0.0
            for k in range(m):
                g = self.gamma(alpha[k])
                out[base + k] = g
                total += g
            if total <= 0.0:
                continue
            prefix = 0.0
            for k in range(m - 1):
                y = out[base + k] / total
                out[base + k] = y
                prefix += y
            last = 1.0 - prefix
            if last < 0.0:
                continue
            out[base + m - 1] = last
            return

    def fill_uniform(self, out):
        for i in range(len(out)):
            out[i] = (self._next_u64() >> 11) * _U53

    def fill_normal(self, out):
        normal = self.normal
        for i in range(len(out)):
            out[i] = normal()

    def fill_gamma(self, shape, out):
        gamma = self.gamma
        shape = float(shape)
        for i in range(len(out)):
            out[i] = gamma(shape)


def _eval_metrics_flat(mu, theta, m, out):
    # theta is row-major, theta[j*m + v] = P(predict v | true j).
    acc = 0.0
    for j in range(m):
        acc += mu[j] * theta[j * m + j]
    sum_p = 0.0
    sum_r = 0.0
    sum_f = 0.0
    sum_s = 0.0
    for j in range(m):
        r = theta[j * m + j]
        den = 0.0
        for u in range(m):
            den += mu[u] * theta[u * m + j]
        if den == 0.0:
            p = _NAN
        else:
            p = mu[j] * theta[j * m + j] / den
        if p != p:
            f = _NAN
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
            s = _NAN
        else:
            s = num2 / den2
        out[5 + 4 * j + 0] = p
        out[5 + 4 * j + 1] = r
        out[5 + 4 * j + 2] = f
        out[5 + 4 * j + 3] = s
        sum_p += p
        sum_r += r
        sum_f += f
        sum_s += s
    out[0] = acc
    out[1] = sum_f / m
    out[2] = sum_p / m
    out[3] = sum_r / m
    out[4] = sum_s / m


def eval_metrics(mu, theta, out):
    """Evaluate all 5 + 4M metric functionals at one (mu, theta) point.

    mu: length-M sequence; theta: M x M nested rows (true class j, predicted
    class v); out: writable length-(5+4M) buffer. Undefined entries get NaN.
    """
    m = len(mu)
    mu_f = [float(x) for x in mu]
    theta_f = [0.0] * (m * m)
    for j in range(m):
        row = theta[j]
        for v in range(m):
            theta_f[j * m + v] = float(row[v])
    row_buf = [0.0] * (5 + 4 * m)
    _eval_metrics_flat(mu_f, theta_f, m, row_buf)
    for c in range(5 + 4 * m):
        out[c] = row_buf[c]


def batch_metric_samples(mu_alpha, theta_alpha, seed, stream_id, start, stop, out):
    """Fill rows [start, stop) of ``out`` with joint posterior metric draws.

    Draw i uses its own counter block (block_hi=i, tag=1), so the result is
    independent of how the index range is split across workers.
    """
    m = len(mu_alpha)
    mu_a = [float(x) for x in mu_alpha]
    th_a = [[float(x) for x in theta_alpha[j]] for j in range(m)]
    ncols = 5 + 4 * m
    mu = [0.0] * m
    theta = [0.0] * (m * m)
    row_buf = [0.0] * ncols
    for i in range(start, stop):
        st = Stream(seed, stream_id, block_hi=i, substream_tag=1)
        st._dirichlet_into(mu_a, mu, 0, m)
        for j in range(m):
            st._dirichlet_into(th_a[j], theta, j * m, m)
        _eval_metrics_flat(mu, theta, m, row_buf)
        for c in range(ncols):
            out[i, c] = row_buf[c]
