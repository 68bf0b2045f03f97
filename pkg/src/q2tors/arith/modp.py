"""Polynomials over F_p as coefficient lists (low degree first), p an odd prime."""
from __future__ import annotations

import random


def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def reduce(a, p: int) -> list[int]:
    return trim([x % p for x in a])


def add(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return trim(out)


def sub(a, b, p):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return trim(out)


def mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([c % p for c in out])


def scale(a, c, p):
    return trim([x * c % p for x in a])


def monic(a, p):
    if not a:
        return a
    return scale(a, pow(a[-1], -1, p), p)


def divmod_(a, b, p):
    if not b:
        raise ZeroDivisionError
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], trim(r)
    inv = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1 - db, -1, -1):
        c = r[i + db] * inv % p
        q[i] = c
        if c:
            for j in range(db + 1):
                r[i + j] = (r[i + j] - c * b[j]) % p
    return trim(q), trim(r[:db])


def rem(a, b, p):
    return divmod_(a, b, p)[1]


def gcd(a, b, p):
    a, b = trim(list(a)), trim(list(b))
    while b:
        a, b = b, rem(a, b, p)
    return monic(a, p)


def ext_gcd(a, b, p):
    """(g, s, t) with s*a + t*b = g monic."""
    r0, r1 = trim(list(a)), trim(list(b))
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return scale(r0, inv, p), scale(s0, inv, p), scale(t0, inv, p)


def derivative(a, p):
    return trim([i * a[i] % p for i in range(1, len(a))])


def powmod(base, e, f, p):
    result = [1]
    base = rem(base, f, p)
    while e:
        if e & 1:
            result = rem(mul(result, base, p), f, p)
        e >>= 1
        if e:
            base = rem(mul(base, base, p), f, p)
    return result


def is_squarefree(f, p) -> bool:
    return len(gcd(f, derivative(f, p), p)) == 1


class Frobenius:
    """The p-th power map on F_p[x]/(f) as a matrix acting on coefficient vectors."""

    def __init__(self, f, p):
        self.f, self.p = f, p
        n = len(f) - 1
        self.n = n
        xp = powmod([0, 1], p, f, p)
        cols = [[1]]
        for _ in range(1, n):
            cols.append(rem(mul(cols[-1], xp, p), f, p))
        self.cols = cols

    def __call__(self, a):
        p, n = self.p, self.n
        out = [0] * n
        for i, c in enumerate(a):
            if c:
                col = self.cols[i]
                for j, y in enumerate(col):
                    out[j] += c * y
        return trim([x % p for x in out])


def distinct_degree(f, p, max_degree=None):
    """[(g_d, d)]: g_d is the product of the degree-d irreducible factors of monic squarefree f."""
    out = []
    frob = Frobenius(f, p)
    h = [0, 1]
    rest = list(f)
    d = 0
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        if max_degree is not None and d > max_degree:
            return out, rest
        h = frob(h)
        g = gcd(rest, sub(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, d))
            rest = divmod_(rest, g, p)[0]
            h = rem(h, rest, p)
            frob = Frobenius(rest, p) if len(rest) > 1 else frob
    if len(rest) > 1:
        if max_degree is None or len(rest) - 1 <= max_degree:
            out.append((rest, len(rest) - 1))
            rest = [1]
    return out, rest


def equal_degree(g, d, p, rng: random.Random):
    """Split monic squarefree g whose irreducible factors all have degree d."""
    n = len(g) - 1
    if n == d:
        return [g]
    frob = Frobenius(g, p)
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        a = trim(a)
        if len(a) < 2:
            continue
        # a^{(p^d - 1)/2} = (a * a^p * ... * a^{p^{d-1}})^{(p-1)/2}
        b, c = a, a
        for _ in range(d - 1):
            c = frob(c)
            b = rem(mul(b, c, p), g, p)
        b = powmod(b, (p - 1) // 2, g, p)
        h = gcd(g, sub(b, [1], p), p)
        if 1 < len(h) < len(g):
            q = divmod_(g, h, p)[0]
            return equal_degree(h, d, p, rng) + equal_degree(monic(q, p), d, p, rng)


def factor_squarefree(f, p, rng: random.Random):
    """Monic irreducible factors of a monic squarefree f over F_p."""
    out = []
    parts, _ = distinct_degree(f, p)
    for g, d in parts:
        out.extend(equal_degree(g, d, p, rng))
    return out


def degree_pattern(f, p) -> list[int]:
    """Sorted degrees of the irreducible factors of a monic squarefree f."""
    parts, _ = distinct_degree(f, p)
    pat = []
    for g, d in parts:
        pat.extend([d] * ((len(g) - 1) // d))
    return sorted(pat)


def small_degree_part(f, p, max_degree=2):
    """Product of the irreducible factors of degree <= max_degree (monic squarefree f)."""
    parts, _ = distinct_degree(f, p, max_degree)
    out = [1]
    for g, d in parts:
        if d <= max_degree:
            out = mul(out, g, p)
    return out, parts
