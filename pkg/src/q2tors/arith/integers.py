"""Integer helpers: primality, factoring with an effort budget, squarefree parts."""
from __future__ import annotations

import functools
import math
import random
from fractions import Fraction

from ..config import limits
from ..errors import FactorizationFailure

_SIEVE_LIMIT = 0
_PRIMES: list[int] = []


def primes_up_to(n: int) -> list[int]:
    """All primes <= n (the sieve is cached and grown on demand)."""
    global _SIEVE_LIMIT, _PRIMES
    if n > _SIEVE_LIMIT:
        size = max(n, 2 * _SIEVE_LIMIT, 1000) + 1
        sieve = bytearray([1]) * size
        sieve[0:2] = b"\x00\x00"
        for p in range(2, math.isqrt(size - 1) + 1):
            if sieve[p]:
                sieve[p * p :: p] = bytearray(len(range(p * p, size, p)))
        _PRIMES = [i for i in range(size) if sieve[i]]
        _SIEVE_LIMIT = size - 1
    if n == _SIEVE_LIMIT:
        return _PRIMES
    import bisect

    return _PRIMES[: bisect.bisect_right(_PRIMES, n)]


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, overwhelmingly reliable above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_square_int(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _brent(n: int, rng: random.Random, max_iter: int) -> int | None:
    """One factor of composite odd n via Brent's cycle variant of rho, or None."""
    spent = 0
    while spent < max_iter:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
            if spent > max_iter:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def _split_off(n: int, p: int, out: dict[int, int]) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    if e:
        out[p] = out.get(p, 0) + e
    return n


@functools.lru_cache(maxsize=65536)
def _factor_cached(n: int, known: tuple[int, ...], trial_bound: int, rho_iter: int, seed: int) -> tuple:
    out: dict[int, int] = {}
    for p in known:
        if p > 1:
            n = _split_off(n, p, out)
    stack = [n]
    pending: list[int] = []
    # cheap pass first: small primes, then decide whether the rest needs work
    for m in stack:
        for p in primes_up_to(1000):
            if p * p > m:
                break
            m = _split_off(m, p, out)
        pending.append(m)
    todo = []
    for m in pending:
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        todo.append(m)
    rng = random.Random(seed)
    deep = []
    for m in todo:
        for p in primes_up_to(trial_bound):
            if p < 1000:
                continue
            if p * p > m:
                break
            m = _split_off(m, p, out)
        if m > 1:
            deep.append(m)
    while deep:
        m = deep.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            deep.extend([r, r])
            continue
        g = _brent(m, rng, rho_iter)
        if g is None:
            raise FactorizationFailure(f"could not split a {m.bit_length()}-bit cofactor")
        deep.extend([g, m // g])
    return tuple(sorted(out.items()))


def factorint(n: int, known_primes=()) -> dict[int, int]:
    """Prime factorization of |n| (n != 0) as {prime: exponent}."""
    if n == 0:
        raise ValueError("cannot factor 0")
    lim = limits()
    known = tuple(sorted({abs(int(p)) for p in known_primes if abs(int(p)) > 1}))
    return dict(_factor_cached(abs(n), known, lim.trial_bound, lim.rho_iterations, lim.seed))


def _squarefree_int(n: int, known: tuple[int, ...]) -> tuple[int, int]:
    """n = m * r**2 with m squarefree (sign kept on m), r > 0."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    m, r = 1, 1
    rest = n
    for p in known:
        if p > 1 and rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            r *= p ** (e // 2)
            if e % 2:
                m *= p
    s = math.isqrt(rest)
    if s * s == rest:
        return sign * m, r * s
    for p, e in factorint(rest).items():
        r *= p ** (e // 2)
        if e % 2:
            m *= p
    return sign * m, r


def squarefree_part(q, known_primes=()) -> tuple[int, Fraction]:
    """Write q = m * t**2 with m a squarefree integer and t > 0 rational."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("squarefree_part of zero")
    known = tuple(sorted({abs(int(p)) for p in known_primes if abs(int(p)) > 1}))
    # m t^2 = a/b = a*b / b^2
    m, r = _squarefree_int(q.numerator * q.denominator, known)
    return m, Fraction(r, q.denominator)


def squarefree_kernel(n: int) -> int:
    """Squarefree part of a nonzero integer, sign included."""
    return _squarefree_int(n, ())[0]


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n)) if abs(n) > 1 else []


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> int:
    """A square root of a modulo an odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r
