"""Primality testing: deterministic Miller-Rabin below 2^64, seeded strong
probable-prime testing above (fixed bases per (seed, n) for reproducibility).
"""

from __future__ import annotations

import random

# deterministic for all n < 3317044064679887385961981 (> 2^64); classical base set
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_DETERMINISTIC_LIMIT = 3317044064679887385961981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

DEFAULT_SPRP_ROUNDS = 40


def _miller_rabin_witness(n: int, a: int) -> bool:
    """True when a witnesses compositeness of odd n > 2."""
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int, *, rounds: int = DEFAULT_SPRP_ROUNDS, seed: int = 0) -> bool:
    """Deterministic below the Miller-Rabin base-set limit, strong probable
    prime with ``rounds`` seed-derived bases above it."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < _DETERMINISTIC_LIMIT:
        return not any(_miller_rabin_witness(n, a) for a in _DETERMINISTIC_BASES
                       if a % n)
    rng = random.Random((seed << 80) ^ (n % (1 << 64)) ^ (n.bit_length() << 64))
    for _ in range(rounds):
        a = rng.randrange(2, min(n - 2, 1 << 62))
        if _miller_rabin_witness(n, a):
            return False
    return True


def primality_evidence(n: int) -> str:
    """Label describing how ``is_prime`` decided n."""
    if n < _DETERMINISTIC_LIMIT:
        return "deterministic-miller-rabin"
    return f"strong-probable-prime-{DEFAULT_SPRP_ROUNDS}"


def next_prime(n: int, *, seed: int = 0) -> int:
    """Smallest prime strictly greater than n."""
    cand = n + 1
    if cand <= 2:
        return 2
    if cand % 2 == 0:
        cand += 1
    while not is_prime(cand, seed=seed):
        cand += 2
    return cand
