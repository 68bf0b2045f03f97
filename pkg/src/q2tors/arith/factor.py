"""Factorization of polynomials over Q: modular factoring, Hensel lifting, recombination."""
from __future__ import annotations

import itertools
import logging
import math
import random
from fractions import Fraction

from ..config import limits
from ..errors import SearchBudgetExceeded
from . import modp
from .integers import primes_up_to
from .ratpoly import RatPoly, int_poly_mul

log = logging.getLogger(__name__)


# integer polynomials modulo M -------------------------------------------------
def _mod(a, M):
    return modp.trim([x % M for x in a])


def _mulM(a, b, M):
    return _mod(int_poly_mul(a, b), M)


def _divmod_monic(a, b, M):
    """Division by a monic b modulo M."""
    r = [x % M for x in a]
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], modp.trim(r)
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1 - db, -1, -1):
        c = r[i + db] % M
        q[i] = c
        if c:
            for j in range(db):
                r[i + j] = (r[i + j] - c * b[j]) % M
            r[i + db] = 0
    return modp.trim(q), modp.trim(r[:db])


def _sub(a, b, M):
    n = max(len(a), len(b))
    return _mod([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)], M)


def _add(a, b, M):
    n = max(len(a), len(b))
    return _mod([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], M)


def _hensel_step(f, g, h, s, t, m):
    """Lift f = g*h (h monic), s*g + t*h = 1 from modulus m to m*m."""
    M = m * m
    e = _sub(f, _mulM(g, h, M), M)
    q, r = _divmod_monic(_mulM(s, e, M), h, M)
    g2 = _add(_add(g, _mulM(t, e, M), M), _mulM(q, g, M), M)
    h2 = _add(h, r, M)
    b = _sub(_add(_mulM(s, g2, M), _mulM(t, h2, M), M), [1], M)
    c, d = _divmod_monic(_mulM(s, b, M), h2, M)
    s2 = _sub(s, d, M)
    t2 = _sub(_sub(t, _mulM(t, b, M), M), _mulM(c, g2, M), M)
    return g2, h2, s2, t2


def hensel_lift(f: list[int], factors: list[list[int]], p: int, k: int) -> list[list[int]]:
    """Lift monic factors of f mod p (f = lc * prod) to monic factors mod p**k."""
    target = p**k
    if len(factors) == 1:
        lc_inv = pow(f[-1], -1, target)
        return [_mod([x * lc_inv for x in f], target)]
    mid = len(factors) // 2
    left, right = factors[:mid], factors[mid:]
    g = [f[-1] % p]
    for a in left:
        g = modp.mul(g, a, p)
    h = [1]
    for a in right:
        h = modp.mul(h, a, p)
    _, s, t = modp.ext_gcd(g, h, p)
    m = p
    while m < target:
        g, h, s, t = _hensel_step(f, g, h, s, t, m)
        m = m * m
    g, h = _mod(g, target), _mod(h, target)
    return hensel_lift(g, left, p, k) + hensel_lift(h, right, p, k)


# prime selection --------------------------------------------------------------
def _good_primes(f: list[int], count: int, start: int = 3):
    """Yield odd primes p such that f is squarefree mod p and p ∤ lc."""
    found = 0
    for p in primes_up_to(100_000):
        if p < start:
            continue
        if f[-1] % p == 0:
            continue
        fp = modp.monic(modp.reduce(f, p), p)
        if not modp.is_squarefree(fp, p):
            continue
        yield p, fp
        found += 1
        if found >= count:
            return


def _subset_sums(pattern: list[int]) -> set[int]:
    sums = {0}
    for d in pattern:
        sums |= {s + d for s in sums}
    return sums


def _symm(x: int, M: int) -> int:
    x %= M
    return x - M if x > M // 2 else x


def _int_divides(g: list[int], f: list[int]) -> list[int] | None:
    """Exact quotient f / g over Z, or None."""
    r = list(f)
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return None
    q = [0] * (len(r) - dg)
    lg = g[-1]
    for i in range(len(r) - 1 - dg, -1, -1):
        c, rem = divmod(r[i + dg], lg)
        if rem:
            return None
        q[i] = c
        if c:
            for j in range(dg + 1):
                r[i + j] -= c * g[j]
    if any(r[:dg]):
        return None
    return q


def _primitive(a: list[int]) -> list[int]:
    g = 0
    for x in a:
        g = math.gcd(g, x)
    s = 1 if a[-1] > 0 else -1
    return [s * x // g for x in a]


def factor_squarefree_int(f: list[int], rng: random.Random | None = None) -> list[list[int]]:
    """Irreducible factors over Z of a primitive squarefree integer polynomial."""
    f = _primitive(f)
    n = len(f) - 1
    if n <= 1:
        return [f]
    if f[0] == 0:
        return [[0, 1]] + factor_squarefree_int(f[1:], rng)
    rng = rng or random.Random(limits().seed)
    tries = 3 if n <= 4 else (5 if n <= 30 else 7)
    allowed = set(range(n + 1))
    best = None
    for p, fp in _good_primes(f, tries):
        parts, _ = modp.distinct_degree(fp, p)
        pattern = []
        for g, d in parts:
            pattern.extend([d] * ((len(g) - 1) // d))
        if len(pattern) == 1:
            return [f]
        allowed &= _subset_sums(pattern)
        if best is None or len(pattern) < best[0]:
            best = (len(pattern), p, fp, parts)
        if allowed == {0, n}:
            return [f]
    _, p, fp, parts = best
    mod_factors = []
    for g, d in parts:
        mod_factors.extend(modp.equal_degree(g, d, p, rng))
    mod_factors.sort(key=lambda a: (len(a), a))
    return _recombine(f, mod_factors, p, allowed)


def _recombine(f, mod_factors, p, allowed, pool=None):
    """Zassenhaus recombination; with pool set, only the first pool factors are combined
    and the unmatched remainder is dropped."""
    n = len(f) - 1
    lcf = abs(f[-1])
    norm2 = math.isqrt(sum(x * x for x in f)) + 1
    bound = lcf * (2**n) * norm2
    k = 1
    while p**k <= 2 * bound * lcf:
        k += 1
    M = p**k
    lifted = hensel_lift(f, mod_factors, p, k)
    degs = [len(a) - 1 for a in lifted]
    traces = [a[-2] if len(a) >= 2 else 0 for a in lifted]
    consts = [a[0] for a in lifted]
    complete = pool is None
    idx = list(range(len(lifted) if complete else pool))
    fstar = list(f)
    found = []
    s = 1
    cap = limits().subset_cap
    spent = 0
    while (2 * s <= len(idx)) if complete else (s <= len(idx)):
        hit = None
        for S in itertools.combinations(idx, s):
            d = sum(degs[i] for i in S)
            if d not in allowed or d >= len(fstar) - (1 if complete else 0):
                continue
            spent += 1
            if spent > cap:
                raise SearchBudgetExceeded("recombination subset budget exhausted")
            l = fstar[-1]
            tr = _symm(l * sum(traces[i] for i in S), M)
            if abs(tr) > bound:
                continue
            c = l
            for i in S:
                c = c * consts[i] % M
            c = _symm(c, M)
            if c == 0 or (l * fstar[0]) % c:
                continue
            g = [l % M]
            for i in S:
                g = _mulM(g, lifted[i], M)
            g = _primitive([_symm(x, M) for x in g])
            q = _int_divides(g, fstar)
            if q is None:
                continue
            hit = (S, g, q)
            break
        if hit is None:
            s += 1
            continue
        S, g, q = hit
        found.append(g)
        fstar = _primitive(q)
        idx = [i for i in idx if i not in S]
        if len(fstar) == 1:
            break
    if complete and len(fstar) > 1:
        found.append(fstar)
    return found


def small_pattern_factors(f: list[int], max_degree: int = 2, tries: int = 6) -> list[list[int]]:
    """Irreducible factors of a primitive squarefree f that split into pieces of degree <= max_degree
    modulo a chosen good prime (a superset of the factors with such patterns at every good prime)."""
    f = _primitive(f)
    if len(f) <= 2:
        return [f] if len(f) == 2 else []
    if f[0] == 0:
        return [[0, 1]] + small_pattern_factors(f[1:], max_degree, tries)
    rng = random.Random(limits().seed)
    best = None
    for p, fp in _good_primes(f, tries):
        parts, rest = modp.distinct_degree(fp, p, max_degree)
        count = sum((len(g) - 1) // d for g, d in parts)
        if count == 0:
            return []
        if best is None or count < best[0]:
            best = (count, p, parts, rest)
    _, p, parts, rest = best
    small = []
    for g, d in parts:
        small.extend(modp.equal_degree(g, d, p, rng))
    small.sort(key=lambda a: (len(a), a))
    mods = list(small)
    if len(rest) > 1:
        mods.append(modp.monic(rest, p))
    if len(mods) == 1:
        return [f]
    return _recombine(f, mods, p, set(range(len(f))), pool=len(small))


def factor_poly_Q(f: RatPoly) -> tuple[Fraction, list[tuple[RatPoly, int]]]:
    """Factor f = unit * prod g_i^{e_i} with g_i monic irreducible over Q."""
    if f.degree < 1:
        raise ValueError("factor_poly_Q needs degree >= 1")
    unit = f.lc
    rng = random.Random(limits().seed)
    prim = f.primitive_int()
    if _probably_squarefree(prim):
        parts = [(f.monic(), 1)]
    else:
        parts = f.squarefree_decomposition()
    out = []
    for g, e in parts:
        for h in factor_squarefree_int(g.primitive_int(), rng):
            out.append((RatPoly(h).monic(), e))
    out.sort(key=lambda t: (t[0].degree, t[0].coeffs, t[1]))
    return unit, out


def _probably_squarefree(f: list[int]) -> bool:
    """True only if f is certainly squarefree (squarefree modulo some prime not dividing lc)."""
    for p in (1000003, 1000033, 1000037):
        if f[-1] % p == 0:
            continue
        fp = modp.monic(modp.reduce(f, p), p)
        if len(fp) == len(f) and modp.is_squarefree(fp, p):
            return True
    return False


def irreducible_factors(f: RatPoly) -> list[RatPoly]:
    """Distinct monic irreducible factors."""
    return [g for g, _ in factor_poly_Q(f)[1]]
