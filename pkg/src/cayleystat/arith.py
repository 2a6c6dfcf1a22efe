"""Small arithmetic functions: totient, divisors, Pillai's gcd-sum."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation as ((p, e), ...) by trial division."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n))


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(n))


def totient(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def pillai(n: int) -> int:
    """g(n) = sum over d | n of phi(d) * (n/d); multiplicative with
    g(p^e) = (e+1) p^e - e p^(e-1)."""
    return math.prod((e + 1) * p**e - e * p ** (e - 1) for p, e in factorize(n))


def broughan_bound(n: int) -> float:
    w = omega(n)
    return 27.0 * n * (math.log(n) / w) ** w


def broughan_check(n: int) -> bool:
    """g(n) <= 27 n (log n / omega(n))^omega(n), for n >= 2."""
    if n < 2:
        raise ValueError("bound is stated for n >= 2")
    return pillai(n) <= broughan_bound(n)


def _spf_sieve(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def broughan_sweep(limit: int) -> list[int]:
    """Return every n in [2, limit] that violates the bound (expected: none)."""
    spf = _spf_sieve(limit)
    failures = []
    for n in range(2, limit + 1):
        m, g, w = n, 1, 0
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            g *= (e + 1) * p**e - e * p ** (e - 1)
            w += 1
        if g > 27.0 * n * (math.log(n) / w) ** w:
            failures.append(n)
    return failures
