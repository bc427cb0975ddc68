"""Portable seeded PRNG: xoshiro256** with state expanded from the seed by splitmix64.

Every sampling routine in the package draws from this generator rather than
``random`` so that fixtures stay identical across Python versions and across
implementations in other languages. Reference algorithm:
https://prng.di.unimi.it/xoshiro256starstar.c
"""

_MASK = (1 << 64) - 1


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


def splitmix64(state):
    """Return ``(next_state, output)`` for one splitmix64 step."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** generator.

    Negative seeds are reduced modulo 2**64, so ``-1`` and ``2**64 - 1`` give
    the same stream.
    """

    def __init__(self, seed=0):
        sm = int(seed) & _MASK
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    def next_u64(self):
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self):
        """Uniform float in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n):
        """Uniform integer in [0, n) by rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def permutation(self, n):
        """Fisher-Yates shuffle of ``range(n)``, swapping from the top down."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
