"""Reproducible random streams.

Every stochastic decision in a run draws from its own stream, keyed by
``(seed, stream_id)``.  Streams are PCG64 generators seeded through
:class:`numpy.random.SeedSequence`, so distinct ids never share state and the
output is bit-stable across platforms.

All draws go through :meth:`RngStream.next_uniform`; Bernoulli trials,
permutations and eviction indices are built on top of it, so the position of a
stream is simply the number of uniforms consumed.
"""
import numpy as np

# purpose tags, combined with a kernel index into a stream id
PERMUTE = 0
SAMPLE_C = 1
SAMPLE_Z = 2
EVICT = 3
DATA = 4

_BLOCK = 1024


class RngStream:
    """Buffered uniform stream for one ``(seed, stream_id)`` pair."""

    __slots__ = ("seed", "stream_id", "_gen", "_buf", "_pos", "drawn")

    def __init__(self, seed, stream_id=0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence([self.seed, self.stream_id])
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf = self._gen.random(_BLOCK).tolist()
        self._pos = 0
        self.drawn = 0

    def next_uniform(self):
        """Next value in [0, 1)."""
        if self._pos == _BLOCK:
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        self.drawn += 1
        return u

    def uniforms(self, n):
        return np.array([self.next_uniform() for _ in range(n)])

    def bernoulli(self, p):
        """1 with probability ``p`` (as ``next_uniform() < p``), else 0."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("Bernoulli probability %r outside [0, 1]" % (p,))
        return 1 if self.next_uniform() < p else 0

    def randbelow(self, n):
        """Uniform integer in ``range(n)``."""
        if n < 1:
            raise ValueError("randbelow needs n >= 1")
        return min(int(self.next_uniform() * n), n - 1)

    def permutation(self, n):
        """Fisher-Yates shuffle of ``range(n)``."""
        if n < 0:
            raise ValueError("permutation length must be >= 0")
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        return np.array(order, dtype=np.int64)

    def normal(self, size):
        """Standard normals by Box-Muller over the uniform stream."""
        size = int(size)
        m = (size + 1) // 2
        u1 = 1.0 - self.uniforms(m)  # (0, 1]
        u2 = self.uniforms(m)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
        return z[:size]

    def __repr__(self):
        return "RngStream(seed=%d, stream_id=%d, drawn=%d)" % (self.seed, self.stream_id, self.drawn)


def new_stream(seed, stream_id=0):
    return RngStream(seed, stream_id)


def stream_id(purpose, kernel=0):
    """Stream id for a (purpose, kernel index) pair."""
    return (int(purpose) << 32) | int(kernel)


def stream_for(seed, purpose, kernel=0):
    return RngStream(seed, stream_id(purpose, kernel))


def next_uniform(s):
    return s.next_uniform()


def bernoulli(s, p):
    return s.bernoulli(p)


def permutation(s, n):
    return s.permutation(n)
