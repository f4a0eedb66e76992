"""The compiled and pure kernels must be interchangeable, bit for bit."""

import numpy as np
import pytest

from bayeval import _purekernels as pure

compiled = pytest.importorskip("bayeval._kernels", reason="compiled backend not built")

# Published known-answer vectors for Philox4x64-10.
KAT_ZERO = (
    0x16554D9ECA36314C,
    0xDB20FE9D672D0FDC,
    0xD7E772CEE186176B,
    0x7E68B68AEC7BA23B,
)
KAT_PI_CTR = (
    0x243F6A8885A308D3,
    0x13198A2E03707344,
    0xA4093822299F31D0,
    0x082EFA98EC4E6C89,
)
KAT_PI_KEY = (0x452821E638D01377, 0xBE5466CF34E90C6C)
KAT_PI_OUT = (
    0xA528F45403E61D95,
    0x38C72DBD566E9788,
    0xA5A1610E72FD18B5,
    0x57BD43B5E52B7FE6,
)


@pytest.mark.parametrize("kernels", [pure, compiled], ids=["pure", "compiled"])
def test_philox_known_answer_vectors(kernels):
    assert kernels.philox4x64_block(0, 0, 0, 0, 0, 0) == KAT_ZERO
    assert kernels.philox4x64_block(*KAT_PI_CTR, *KAT_PI_KEY) == KAT_PI_OUT


def test_philox_matches_numpy_bit_generator():
    # numpy's Philox advances the counter before producing its first block,
    # so its block at counter c equals ours at counter c + 1.
    from numpy.random import Philox

    key = np.array([0x9E3779B97F4A7C15, 0xDEADBEEF], dtype=np.uint64)
    counter = np.array([5, 0, 0, 0], dtype=np.uint64)
    raw = Philox(key=key, counter=counter).random_raw(8)
    ours = pure.philox4x64_block(6, 0, 0, 0, int(key[0]), int(key[1]))
    ours2 = pure.philox4x64_block(7, 0, 0, 0, int(key[0]), int(key[1]))
    assert tuple(int(x) for x in raw[:4]) == ours
    assert tuple(int(x) for x in raw[4:]) == ours2


@pytest.mark.parametrize(
    "method,args",
    [
        ("u64", ()),
        ("uniform", ()),
        ("normal", ()),
        ("gamma", (0.3,)),
        ("gamma", (0.999,)),
        ("gamma", (1.0,)),
        ("gamma", (5.0,)),
        ("gamma", (51.0,)),
    ],
)
def test_stream_parity(method, args):
    sp = pure.Stream(12345, 7)
    sc = compiled.Stream(12345, 7)
    for _ in range(3000):
        assert getattr(sp, method)(*args) == getattr(sc, method)(*args)


@pytest.mark.parametrize("alpha", [(1.0, 1.0, 1.0), (39.0, 8.0, 6.0), (0.4, 2.0, 7.0, 0.1)])
def test_dirichlet_parity(alpha):
    sp = pure.Stream(9, 3)
    sc = compiled.Stream(9, 3)
    for _ in range(1500):
        assert sp.dirichlet(alpha) == sc.dirichlet(alpha)


def test_substream_counter_words_parity():
    sp = pure.Stream(3, 4, 17, 1)
    sc = compiled.Stream(3, 4, 17, 1)
    assert [sp.u64() for _ in range(64)] == [sc.u64() for _ in range(64)]


def test_fill_parity():
    for name, args in (("fill_uniform", ()), ("fill_normal", ()), ("fill_gamma", (2.5,))):
        a = np.empty(5000)
        b = np.empty(5000)
        getattr(pure.Stream(1, 2), name)(*args, a)
        getattr(compiled.Stream(1, 2), name)(*args, b)
        assert np.array_equal(a, b), name


def test_eval_metrics_parity():
    rng = np.random.default_rng(0)
    for _ in range(200):
        m = int(rng.integers(2, 6))
        mu = rng.dirichlet(np.ones(m))
        theta = rng.dirichlet(np.ones(m), size=m)
        out_p = np.empty(5 + 4 * m)
        out_c = np.empty(5 + 4 * m)
        pure.eval_metrics(mu, theta, out_p)
        compiled.eval_metrics(mu, theta, out_c)
        assert np.array_equal(out_p, out_c)


def test_batch_parity_and_chunk_independence():
    mu_alpha = np.array([51.0, 51.0, 51.0])
    theta_alpha = np.array([[39.0, 8.0, 6.0], [9.0, 33.0, 11.0], [3.0, 1.0, 49.0]])
    s = 2500
    whole_p = np.empty((s, 17))
    whole_c = np.empty((s, 17))
    pure.batch_metric_samples(mu_alpha, theta_alpha, 2024, 5, 0, s, whole_p)
    compiled.batch_metric_samples(mu_alpha, theta_alpha, 2024, 5, 0, s, whole_c)
    assert np.array_equal(whole_p, whole_c)

    # Any partition of the row range yields the same matrix.
    chunked = np.empty((s, 17))
    for lo, hi in ((0, 700), (700, 701), (701, 2500)):
        compiled.batch_metric_samples(mu_alpha, theta_alpha, 2024, 5, lo, hi, chunked)
    assert np.array_equal(whole_c, chunked)


def test_batch_rejects_bad_shapes():
    mu_alpha = np.array([1.0, 1.0, 1.0])
    theta_alpha = np.ones((3, 3))
    out = np.empty((10, 17))
    with pytest.raises(ValueError):
        compiled.batch_metric_samples(mu_alpha, theta_alpha, 0, 0, 0, 11, out)
    with pytest.raises(ValueError):
        compiled.batch_metric_samples(mu_alpha, np.ones((3, 2)), 0, 0, 0, 10, out)
    with pytest.raises(ValueError):
        compiled.batch_metric_samples(mu_alpha, theta_alpha, 0, 0, 0, 10, np.empty((10, 16)))
