"""Seeded random-variate primitives: Philox streams, gamma and Dirichlet draws.

The uniform core is Philox4x64-10, a counter-based generator keyed by
(seed, stream_id); identical keys reproduce identical sequences, and distinct
stream ids are independent by construction, so workers never need to
coordinate. Gamma variates use the Marsaglia-Tsang squeeze/rejection scheme
(shape < 1 boosted through Gamma(shape+1)); Dirichlet draws are normalized
independent gammas. The heavy lifting lives in the backend kernels
(compiled Cython or the pure-Python fallback, selected in
:mod:`bayeval.backend`).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ParameterError

_U64_MAX = (1 << 64) - 1


def _check_u64(name, value):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value <= _U64_MAX:
        raise ParameterError(f"{name} must be in [0, 2**64), got {value}")
    return value


@dataclass(frozen=True)
class DirichletParams:
    """Parameter vector of a Dirichlet distribution; all components > 0."""

    alpha: tuple[float, ...]

    def __post_init__(self):
        try:
            alpha = tuple(float(a) for a in self.alpha)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"alpha must be a sequence of reals: {exc}") from None
        if len(alpha) == 0:
            raise ParameterError("alpha must be non-empty")
        for a in alpha:
            if not math.isfinite(a) or a <= 0.0:
                raise ParameterError(f"alpha components must be finite and > 0, got {a}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def dimension(self):
        return len(self.alpha)

    def as_array(self):
        return np.asarray(self.alpha, dtype=np.float64)


class RandomStream:
    """A deterministic, single-owner variate stream.

    Identified by (seed, stream_id); two streams with equal identity produce
    bitwise-equal sequences for a given algorithm version. Distinct stream ids
    (or substreams of one stream) may be consumed concurrently without
    coordination. A stream is mutable and must not be shared across threads.
    """

    __slots__ = ("_impl", "_is_substream")

    def __init__(self, seed, stream_id=0, *, _block_hi=0, _tag=0):
        _check_u64("seed", seed)
        _check_u64("stream_id", stream_id)
        self._impl = backend.active().Stream(seed, stream_id, _block_hi, _tag)
        self._is_substream = bool(_tag)

    @property
    def seed(self):
        return self._impl.seed

    @property
    def stream_id(self):
        return self._impl.stream_id

    @property
    def is_substream(self):
        return self._is_substream

    def substream(self, index):
        """An independent stream dedicated to one unit of work.

        Substreams occupy counter blocks disjoint from the parent's sequential
        consumption and from each other; they depend only on the parent's
        identity (seed, stream_id) and ``index``, never on how much of the
        parent has been consumed. Nesting is not supported.
        """
        _check_u64("index", index)
        if self._is_substream:
            raise ParameterError("substreams cannot be nested")
        return RandomStream(self.seed, self.stream_id, _block_hi=index, _tag=1)

    def u64(self):
        """Next raw 64-bit word."""
        return self._impl.u64()

    def uniform(self):
        """Next double in [0, 1)."""
        return self._impl.uniform()

    def normal(self):
        """Standard normal draw."""
        return self._impl.normal()

    def gamma(self, shape):
        return sample_gamma(shape, self)

    def dirichlet(self, params):
        return sample_dirichlet(params, self)

    def fill_uniform(self, out):
        self._impl.fill_uniform(_check_buffer(out))

    def fill_normal(self, out):
        self._impl.fill_normal(_check_buffer(out))

    def fill_gamma(self, shape, out):
        _check_shape(shape)
        self._impl.fill_gamma(float(shape), _check_buffer(out))


def _check_buffer(out):
    if not isinstance(out, np.ndarray) or out.dtype != np.float64 or out.ndim != 1:
        raise ParameterError("fill target must be a 1-D float64 numpy array")
    if not out.flags.c_contiguous or not out.flags.writeable:
        raise ParameterError("fill target must be C-contiguous and writable")
    return out


def _check_shape(shape):
    try:
        value = float(shape)
    except (TypeError, ValueError):
        raise ParameterError(f"gamma shape must be a real number, got {shape!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"gamma shape must be finite and > 0, got {value}")
    return value


def sample_gamma(shape, stream):
    """One Gamma(shape, scale=1) draw from the stream."""
    value = _check_shape(shape)
    return stream._impl.gamma(value)


def sample_dirichlet(params, stream):
    """One Dirichlet draw as a float64 array.

    The components are nonnegative and their sequential (left-to-right) float
    sum is exactly 1.0. If every gamma component underflows to zero the draw
    is redone rather than emitting NaN; with shapes below ~1e-6 those redraws
    start to dominate (posterior shapes here are always >= the prior, so this
    only matters for hand-built parameter vectors).
    """
    if not isinstance(params, DirichletParams):
        params = DirichletParams(tuple(params))
    return np.asarray(stream._impl.dirichlet(params.alpha), dtype=np.float64)
