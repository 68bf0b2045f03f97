"""Multiquadratic towers Q(sqrt(m1), ..., sqrt(mk)) and their elements.

An element is a coordinate vector over the radical basis b_S = prod_{i in S} sqrt(m_i),
indexed by bitmasks S.  Radicals use the principal branch: sqrt(m) > 0 for m > 0
and sqrt(m) = i*sqrt(|m|) for m < 0.
"""
from __future__ import annotations

import functools
import math
import re
from fractions import Fraction
from typing import Iterable

from .arith.integers import factorint, squarefree_part
from .arith.ratpoly import RatPoly
from .errors import DivisionByZero, ParseError, RadicalNotInTower


def _sort_key(m: int):
    return (0, -m) if m < 0 else (1, m)


def _prime_set(m: int) -> tuple[int, ...]:
    """Prime support of a squarefree integer, with -1 as a pseudo-prime."""
    ps = sorted(factorint(m)) if abs(m) > 1 else []
    return ((-1,) if m < 0 else ()) + tuple(ps)


class MQTower:
    """A multiquadratic field given by canonical squarefree generators."""

    __slots__ = ("gens", "k", "primes", "_pidx", "_vecs", "_pivots", "__weakref__")

    def __init__(self, gens: tuple[int, ...], vecs: list[int], primes: tuple[int, ...], pivots: list[int]):
        self.gens = gens
        self.k = len(gens)
        self.primes = primes
        self._pidx = {p: i for i, p in enumerate(primes)}
        self._vecs = vecs
        self._pivots = pivots

    @property
    def degree(self) -> int:
        return 1 << self.k

    def __repr__(self):
        return f"MQTower({list(self.gens)})"

    def __eq__(self, other):
        return isinstance(other, MQTower) and self.gens == other.gens

    def __hash__(self):
        return hash(("MQTower", self.gens))

    def is_rational(self) -> bool:
        return self.k == 0

    def prefix(self, j: int) -> "MQTower":
        """Subtower generated by the first j generators."""
        return make_tower(self.gens[:j])

    def decompose(self, m: int):
        """For squarefree m, the bitmask U with class(m) = class(b_U), or None."""
        if m == 1:
            return 0
        v = 0
        for p in _prime_set(m):
            i = self._pidx.get(p)
            if i is None:
                return None
            v |= 1 << i
        U = 0
        for j in range(self.k):
            if v >> self._pivots[j] & 1:
                v ^= self._vecs[j]
                U |= 1 << j
        return U if v == 0 else None

    def contains_sqrt(self, m: int) -> bool:
        return self.decompose(squarefree_part(m)[0]) is not None

    def basis_radicand(self, S: int) -> tuple[int, int, int]:
        """b_S = sign * s * sqrt(M) with M squarefree, s > 0 integer; returns (sign, s, M)."""
        return _basis_radicand(self.gens, S)

    def sqrt_in(self, m: int) -> "MQElem":
        """Principal sqrt(m) as an element of this tower."""
        m0, t = squarefree_part(m)
        U = self.decompose(m0)
        if U is None:
            raise RadicalNotInTower(f"sqrt({m}) is not in {self}")
        sign, s, M = self.basis_radicand(U)
        # b_U = sign*s*sqrt(m0)  =>  sqrt(m) = t*sqrt(m0) = t*sign/s * b_U
        c = t * sign / s
        return MQElem.monomial(self, U, c)

    def gen(self, i: int) -> "MQElem":
        return MQElem.monomial(self, 1 << i, 1)

    def one(self) -> "MQElem":
        return MQElem.from_rational(self, 1)

    def zero(self) -> "MQElem":
        return MQElem.from_rational(self, 0)

    def elem(self, coords: Iterable) -> "MQElem":
        return MQElem.from_coords(self, coords)

    def characters(self) -> list["GaloisChar"]:
        return [GaloisChar(self, f) for f in range(self.degree)]

    def fixing(self, sub: "MQTower") -> list["GaloisChar"]:
        """Characters of this tower that act trivially on the subfield sub."""
        return [GaloisChar(self, f) for f in _fixing_flips(self, sub)]

    def contains_tower(self, sub: "MQTower") -> bool:
        return all(self.decompose(m) is not None for m in sub.gens)

    def join(self, *others: "MQTower") -> "MQTower":
        gens = list(self.gens)
        for o in others:
            gens.extend(o.gens)
        return make_tower(gens)

    def adjoin(self, *ms: int) -> "MQTower":
        return make_tower(list(self.gens) + list(ms))


@functools.lru_cache(maxsize=None)
def _basis_radicand(gens: tuple[int, ...], S: int) -> tuple[int, int, int]:
    prod, t = 1, 0
    i = 0
    while S:
        if S & 1:
            prod *= gens[i]
            if gens[i] < 0:
                t += 1
        S >>= 1
        i += 1
    sign = -1 if (t // 2) % 2 else 1
    m, s = squarefree_part(prod)
    return sign, int(s), m


@functools.lru_cache(maxsize=4096)
def _canonical(ints: tuple[int, ...]) -> MQTower:
    rows = []
    all_primes: set[int] = set()
    sets = []
    for n in ints:
        n = int(n)
        if n == 0:
            raise ValueError("tower generators must be nonzero")
        m, _ = squarefree_part(n)
        if m == 1:
            continue
        ps = _prime_set(m)
        sets.append(ps)
        all_primes.update(ps)
    primes = tuple(sorted(all_primes))  # -1 sorts first
    idx = {p: i for i, p in enumerate(primes)}
    for ps in sets:
        v = 0
        for p in ps:
            v |= 1 << idx[p]
        rows.append(v)
    # reduced echelon form with the pivot at the highest prime of each row
    basis: list[int] = []
    for v in rows:
        for b in basis:
            if v >> (b.bit_length() - 1) & 1:
                v ^= b
        if v:
            hb = v.bit_length() - 1
            basis = [b ^ v if b >> hb & 1 else b for b in basis]
            basis.append(v)
    # full reduction
    changed = True
    while changed:
        changed = False
        for i, b in enumerate(basis):
            for j, c in enumerate(basis):
                if i != j and b >> (c.bit_length() - 1) & 1:
                    basis[i] = b ^ c
                    b = basis[i]
                    changed = True
    gens_vecs = []
    for v in basis:
        m = 1
        for i, p in enumerate(primes):
            if v >> i & 1:
                m *= p
        gens_vecs.append((m, v))
    gens_vecs.sort(key=lambda t: _sort_key(t[0]))
    gens = tuple(g for g, _ in gens_vecs)
    vecs = [v for _, v in gens_vecs]
    used = set()
    for v in vecs:
        for i in range(len(primes)):
            if v >> i & 1:
                used.add(primes[i])
    primes2 = tuple(p for p in primes if p in used)
    remap = {primes.index(p): j for j, p in enumerate(primes2)}
    vecs2 = []
    for v in vecs:
        w = 0
        for i, j in remap.items():
            if v >> i & 1:
                w |= 1 << j
        vecs2.append(w)
    pivots = [w.bit_length() - 1 for w in vecs2]
    return MQTower(gens, vecs2, primes2, pivots)


def make_tower(ints: Iterable[int]) -> MQTower:
    """Canonical tower for Q(sqrt(n) : n in ints); squares and dependent inputs drop out."""
    return _canonical(tuple(sorted(int(n) for n in ints)))


QQ = make_tower(())


# ---------------------------------------------------------------------------
# coordinate-vector kernels (integer numerators, shared denominator)

def _vmul(a: list[int], b: list[int], gens: tuple[int, ...], k: int) -> list[int]:
    if k == 0:
        return [a[0] * b[0]]
    if k == 1:
        d = gens[0]
        a0, a1 = a
        b0, b1 = b
        return [a0 * b0 + d * a1 * b1, a0 * b1 + a1 * b0]
    n = 1 << (k - 1)
    a0, a1, b0, b1 = a[:n], a[n:], b[:n], b[n:]
    d = gens[k - 1]
    if not any(a1):
        if not any(b1):
            return _vmul(a0, b0, gens, k - 1) + [0] * n
        return _vmul(a0, b0, gens, k - 1) + _vmul(a0, b1, gens, k - 1)
    if not any(b1):
        return _vmul(a0, b0, gens, k - 1) + _vmul(a1, b0, gens, k - 1)
    if not any(a0) and not any(b0):
        p1 = _vmul(a1, b1, gens, k - 1)
        return [d * x for x in p1] + [0] * n
    p0 = _vmul(a0, b0, gens, k - 1)
    p1 = _vmul(a1, b1, gens, k - 1)
    p2 = _vmul([x + y for x, y in zip(a0, a1)], [x + y for x, y in zip(b0, b1)], gens, k - 1)
    return [x + d * y for x, y in zip(p0, p1)] + [z - x - y for x, y, z in zip(p0, p1, p2)]


def _normalize(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = [-x for x in nums]
        den = -den
    g = den
    for x in nums:
        if g == 1:
            break
        g = math.gcd(g, x)
    if g != 1:
        nums = [x // g for x in nums]
        den //= g
    return tuple(nums), den


class MQElem:
    """Element of a tower: sum_S (nums[S] / den) * b_S."""

    __slots__ = ("tower", "nums", "den", "_key")

    def __init__(self, tower: MQTower, nums, den: int = 1, _normalized: bool = False):
        self.tower = tower
        if _normalized:
            self.nums, self.den = nums, den
        else:
            self.nums, self.den = _normalize(list(nums), den)
        self._key = None

    # constructors -------------------------------------------------------
    @classmethod
    def from_coords(cls, tower: MQTower, coords) -> "MQElem":
        coords = [Fraction(c) for c in coords]
        if len(coords) != tower.degree:
            raise ValueError("coordinate table has the wrong size")
        den = 1
        for c in coords:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls(tower, [int(c * den) for c in coords], den)

    @classmethod
    def from_rational(cls, tower: MQTower, q) -> "MQElem":
        q = Fraction(q)
        nums = [0] * tower.degree
        nums[0] = q.numerator
        return cls(tower, tuple(nums), q.denominator, _normalized=True)

    @classmethod
    def monomial(cls, tower: MQTower, S: int, c) -> "MQElem":
        c = Fraction(c)
        nums = [0] * tower.degree
        nums[S] = c.numerator
        return cls(tower, tuple(nums), c.denominator, _normalized=True)

    # accessors ------------------------------------------------------------
    def coord(self, S: int) -> Fraction:
        return Fraction(self.nums[S], self.den)

    def coords(self) -> list[Fraction]:
        return [Fraction(x, self.den) for x in self.nums]

    def support(self) -> list[int]:
        return [S for S, x in enumerate(self.nums) if x]

    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.nums[0], self.den)

    def __bool__(self):
        return not self.is_zero()

    # tower changes -----------------------------------------------------------
    def to_tower(self, target: MQTower) -> "MQElem":
        if target is self.tower or target == self.tower:
            return self
        conv = _conversion(self.tower, target)
        vals = [Fraction(0)] * target.degree
        for S, x in enumerate(self.nums):
            if x:
                if conv[S] is None:
                    raise RadicalNotInTower(f"element of {self.tower} does not lie in {target}")
                U, c = conv[S]
                vals[U] += c * x
        return MQElem.from_coords(target, vals) * Fraction(1, self.den)

    def support_tower(self) -> MQTower:
        Ms = []
        for S in self.support():
            if S:
                Ms.append(self.tower.basis_radicand(S)[2])
        return make_tower(Ms)

    def shrink(self) -> "MQElem":
        """The same element in the smallest tower containing it."""
        t = self.support_tower()
        return self if t == self.tower else self.to_tower(t)

    def _align(self, other):
        if isinstance(other, MQElem):
            if other.tower is self.tower or other.tower == self.tower:
                return self, other
            t = self.tower.join(other.tower)
            return self.to_tower(t), other.to_tower(t)
        if isinstance(other, (int, Fraction)):
            return self, MQElem.from_rational(self.tower, other)
        return None, None

    # arithmetic ------------------------------------------------------------------
    def __add__(self, other):
        a, b = self._align(other)
        if a is None:
            return NotImplemented
        if a.den == b.den:
            return MQElem(a.tower, [x + y for x, y in zip(a.nums, b.nums)], a.den)
        return MQElem(a.tower, [x * b.den + y * a.den for x, y in zip(a.nums, b.nums)], a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return MQElem(self.tower, tuple(-x for x in self.nums), self.den, _normalized=True)

    def __sub__(self, other):
        a, b = self._align(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return MQElem(self.tower, [x * q.numerator for x in self.nums], self.den * q.denominator)
        a, b = self._align(other)
        if a is None:
            return NotImplemented
        t = a.tower
        prod = _vmul(list(a.nums), list(b.nums), t.gens, t.k)
        return MQElem(t, prod, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, MQElem):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = MQElem.from_rational(self.tower, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "MQElem":
        return invert(self)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.nums[0], self.den) == other
        if not isinstance(other, MQElem):
            return NotImplemented
        if other.tower is self.tower or other.tower == self.tower:
            return self.den == other.den and self.nums == other.nums
        a, b = self._align(other)
        return a.den == b.den and a.nums == b.nums

    def canonical_key(self):
        if self._key is None:
            s = self.shrink()
            self._key = (s.tower.gens, s.nums, s.den)
        return self._key

    def __hash__(self):
        return hash(self.canonical_key())

    def split_last(self) -> tuple["MQElem", "MQElem", int]:
        """(a, b, d) with self = a + b*sqrt(d) over the prefix tower."""
        t = self.tower
        F = t.prefix(t.k - 1)
        n = 1 << (t.k - 1)
        return (MQElem(F, self.nums[:n], self.den), MQElem(F, self.nums[n:], self.den), t.gens[-1])

    def conj_last(self) -> "MQElem":
        n = 1 << (self.tower.k - 1)
        return MQElem(self.tower, self.nums[:n] + tuple(-x for x in self.nums[n:]), self.den, _normalized=True)

    def __repr__(self):
        return f"MQElem({self}; {list(self.tower.gens)})"

    def __str__(self):
        return format_elem(self)


@functools.lru_cache(maxsize=4096)
def _conversion(src: MQTower, dst: MQTower) -> list:
    out = []
    for S in range(src.degree):
        sign, s, M = src.basis_radicand(S)
        U = dst.decompose(M)
        if U is None:
            out.append(None)
            continue
        sign2, s2, _ = dst.basis_radicand(U)
        # b_S = sign*s*sqrt(M), b_U = sign2*s2*sqrt(M)
        out.append((U, Fraction(sign * s * sign2, s2)))
    return out


def lift_pair(xs: Iterable[MQElem]) -> list[MQElem]:
    """Bring several elements into one common tower."""
    xs = list(xs)
    if not xs:
        return xs
    t = xs[0].tower
    if all(x.tower == t for x in xs):
        return xs
    t = t.join(*[x.tower for x in xs[1:]])
    return [x.to_tower(t) for x in xs]


def as_elem(x, tower: MQTower | None = None) -> MQElem:
    if isinstance(x, MQElem):
        return x if tower is None else x.to_tower(tower)
    return MQElem.from_rational(tower or QQ, x)


# ---------------------------------------------------------------------------
# Galois characters

class GaloisChar:
    """The automorphism negating sqrt(m_i) for each bit i set in flips."""

    __slots__ = ("tower", "flips")

    def __init__(self, tower: MQTower, flips: int):
        self.tower = tower
        self.flips = flips

    @classmethod
    def of(cls, tower: MQTower, indices: Iterable[int]) -> "GaloisChar":
        f = 0
        for i in indices:
            f |= 1 << i
        return cls(tower, f)

    def __call__(self, s: MQElem) -> MQElem:
        return apply_char(s, self)

    def __eq__(self, other):
        return isinstance(other, GaloisChar) and self.tower == other.tower and self.flips == other.flips

    def __hash__(self):
        return hash((self.tower, self.flips))

    def __repr__(self):
        return f"GaloisChar({[self.tower.gens[i] for i in range(self.tower.k) if self.flips >> i & 1]})"

    def sign_on(self, m: int) -> int:
        """+1 or -1: the action on sqrt(m), for sqrt(m) in the tower."""
        U = self.tower.decompose(squarefree_part(m)[0])
        if U is None:
            raise RadicalNotInTower(f"sqrt({m}) not in tower")
        return -1 if bin(U & self.flips).count("1") % 2 else 1

    def compose(self, other: "GaloisChar") -> "GaloisChar":
        return GaloisChar(self.tower, self.flips ^ other.flips)

    def extend_to(self, big: MQTower) -> "GaloisChar":
        """Some character of big restricting to this one."""
        eqs = []
        for i, m in enumerate(self.tower.gens):
            U = big.decompose(m)
            if U is None:
                raise RadicalNotInTower(f"{self.tower} not contained in {big}")
            eqs.append((U, self.flips >> i & 1))
        sol = _solve_f2(eqs, big.k)
        if sol is None:
            raise ValueError("inconsistent character extension")
        return GaloisChar(big, sol)

    def restrict_to(self, small: MQTower) -> "GaloisChar":
        f = 0
        for i, m in enumerate(small.gens):
            if self.sign_on(m) == -1:
                f |= 1 << i
        return GaloisChar(small, f)


def _solve_f2(eqs: list[tuple[int, int]], nvars: int) -> int | None:
    """Solve parity(U & x) = b for all (U, b); returns one solution x or None."""
    rows = [(U, b) for U, b in eqs]
    pivots = []
    r = 0
    rows = list(rows)
    for col in range(nvars):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][0] >> col & 1:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][0] >> col & 1:
                rows[i] = (rows[i][0] ^ rows[r][0], rows[i][1] ^ rows[r][1])
        pivots.append(col)
        r += 1
    for U, b in rows[r:]:
        if U == 0 and b:
            return None
    x = 0
    for i, col in enumerate(pivots):
        if rows[i][1]:
            x |= 1 << col
    return x


def _nullspace_f2(rows: list[int], nvars: int) -> list[int]:
    """Basis of {x : parity(U & x) = 0 for all U in rows}."""
    rows = [U for U in rows if U]
    red = []
    pivcols = []
    for U in rows:
        for v, c in zip(red, pivcols):
            if U >> c & 1:
                U ^= v
        if U:
            c = (U & -U).bit_length() - 1
            red = [v ^ U if v >> c & 1 else v for v in red]
            red.append(U)
            pivcols.append(c)
    free = [c for c in range(nvars) if c not in pivcols]
    basis = []
    for fcol in free:
        x = 1 << fcol
        for v, c in zip(red, pivcols):
            if v >> fcol & 1:
                x |= 1 << c
        basis.append(x)
    return basis


def _fixing_flips(big: MQTower, sub: MQTower) -> list[int]:
    rows = []
    for m in sub.gens:
        U = big.decompose(m)
        if U is None:
            raise RadicalNotInTower(f"{sub} not contained in {big}")
        rows.append(U)
    basis = _nullspace_f2(rows, big.k)
    out = [0]
    for b in basis:
        out = out + [x ^ b for x in out]
    return sorted(out)


def apply_char(s: MQElem, chi: GaloisChar) -> MQElem:
    if chi.tower != s.tower:
        if chi.tower.contains_tower(s.tower):
            s = s.to_tower(chi.tower)
        else:
            chi = chi.extend_to(s.tower)
    f = chi.flips
    if f == 0:
        return s
    nums = tuple(-x if bin(S & f).count("1") & 1 else x for S, x in enumerate(s.nums))
    return MQElem(s.tower, nums, s.den, _normalized=True)


# ---------------------------------------------------------------------------
# inversion, squares, square classes, minimal polynomials

def invert(s: MQElem) -> MQElem:
    """1/s via the conjugate on the last generator, recursively."""
    if s.is_zero():
        raise DivisionByZero("inverse of zero")
    t = s.tower
    if t.k == 0:
        q = Fraction(s.den, s.nums[0])
        return MQElem.from_rational(t, q)
    c = s.conj_last()
    n = s * c  # lies in the prefix tower
    a, _, _ = n.split_last()
    inv_a = invert(a).to_tower(t)
    return c * inv_a


def is_square(s: MQElem, K: MQTower | None = None) -> MQElem | None:
    """Some t in K with t^2 = s, or None."""
    if K is not None:
        s = s.to_tower(K)
    if s.is_zero():
        return s
    t = s.tower
    if t.k == 0:
        q = Fraction(s.nums[0], s.den)
        if q < 0:
            return None
        a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if a * a == q.numerator and b * b == q.denominator:
            return MQElem.from_rational(t, Fraction(a, b))
        return None
    a, b, d = s.split_last()
    rad = MQElem.monomial(t, 1 << (t.k - 1), 1)
    if b.is_zero():
        r = is_square(a)
        if r is not None:
            return r.to_tower(t)
        r = is_square(a * Fraction(1, d))
        if r is not None:
            return r.to_tower(t) * rad
        return None
    N = a * a - b * b * d
    w = is_square(N)
    if w is None:
        return None
    for sgn in (1, -1):
        u2 = (a + w * sgn) * Fraction(1, 2)
        u = is_square(u2)
        if u is None or u.is_zero():
            continue
        v = b / (u * 2)
        root = u.to_tower(t) + v.to_tower(t) * rad
        if root * root == s:
            return root
    return None


def sqrt_class(s: MQElem, K: MQTower | None = None, known_primes=()) -> tuple[int, MQElem] | None:
    """(m, t) with s = m t^2, m squarefree and t in K, or None if sqrt(s) is outside Q(2^inf)."""
    if K is not None:
        s = s.to_tower(K)
    if s.is_zero():
        raise ValueError("sqrt_class of zero")
    hints = tuple(known_primes) + tuple(p for p in s.tower.primes if p > 0)
    return _sqrt_class(s, hints)


def _sqrt_class(s: MQElem, hints) -> tuple[int, MQElem] | None:
    t = s.tower
    if t.k == 0:
        m, r = squarefree_part(Fraction(s.nums[0], s.den), hints)
        return m, MQElem.from_rational(t, r)
    a, b, d = s.split_last()
    if b.is_zero():
        r = _sqrt_class(a, hints)
        if r is None:
            return None
        return r[0], r[1].to_tower(t)
    N = a * a - b * b * d
    w = is_square(N)
    if w is None:
        return None
    rad = MQElem.monomial(t, 1 << (t.k - 1), 1)
    for sgn in (1, -1):
        u2 = (a + w * sgn) * Fraction(1, 2)
        if u2.is_zero():
            continue
        r = _sqrt_class(u2, hints)
        if r is None:
            continue
        m, u = r
        v = b / (u * (2 * m))
        root = u.to_tower(t) + v.to_tower(t) * rad
        if root * root * m == s:
            return m, root
    return None


def sqrt_in_q2inf(s: MQElem, K: MQTower | None = None, known_primes=()) -> MQElem | None:
    """An explicit square root of s in a tower, or None if it is not in Q(2^inf)."""
    if K is not None:
        s = s.to_tower(K)
    if s.is_zero():
        return s
    r = sqrt_class(s, known_primes=known_primes)
    if r is None:
        return None
    m, t = r
    big = s.tower.adjoin(m)
    return t.to_tower(big) * big.sqrt_in(m)


def conjugates(s: MQElem) -> list[MQElem]:
    """Distinct Galois conjugates of s (over Q)."""
    sm = s.shrink()
    return [apply_char(sm, chi) for chi in sm.tower.characters()]


def min_poly(s: MQElem, K: MQTower | None = None) -> RatPoly:
    """Minimal polynomial over Q."""
    if K is not None:
        s = s.to_tower(K)
    sm = s.shrink()
    t = sm.tower
    poly = [-sm, MQElem.from_rational(t, 1)]
    for j in range(t.k - 1, -1, -1):
        flip = GaloisChar(t, 1 << j)
        conj = [apply_char(c, flip) for c in poly]
        out = [MQElem.from_rational(t, 0)] * (2 * len(poly) - 1)
        for i, x in enumerate(poly):
            if x.is_zero():
                continue
            for jj, y in enumerate(conj):
                if not y.is_zero():
                    out[i + jj] = out[i + jj] + x * y
        poly = out
    return RatPoly([c.to_rational() for c in poly])


# ---------------------------------------------------------------------------
# literals

_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+)(?:\s*/\s*(\d+))?\s*(?:\*\s*sqrt\s*\(\s*(-?\d+)\s*\))?|sqrt\s*\(\s*(-?\d+)\s*\))\s*"
)


def parse_elem(text: str, line: int = 0, col0: int = 0) -> MQElem:
    """Parse `3/2 + 1/2*sqrt(17)` style literals into a tower element."""
    pos = 0
    terms = []
    src = text
    if not src.strip():
        raise ParseError("empty element literal", line, col0 + 1)
    first = True
    while pos < len(src):
        m = _TERM.match(src, pos)
        if not m or m.end() == pos or (not first and m.group(1) is None):
            raise ParseError(f"bad element literal {text!r}", line, col0 + pos + 1)
        sign = -1 if m.group(1) == "-" else 1
        if m.group(5) is not None:
            coef, rad = Fraction(1), int(m.group(5))
        else:
            if m.group(2) is None:
                raise ParseError(f"bad element literal {text!r}", line, col0 + pos + 1)
            den = int(m.group(3)) if m.group(3) else 1
            if den == 0:
                raise ParseError("zero denominator", line, col0 + pos + 1)
            coef = Fraction(int(m.group(2)), den)
            rad = int(m.group(4)) if m.group(4) is not None else 1
        if rad == 0:
            raise ParseError("sqrt(0) is not allowed", line, col0 + pos + 1)
        terms.append((sign * coef, rad))
        pos = m.end()
        first = False
    tower = make_tower([r for _, r in terms if r != 1])
    acc = MQElem.from_rational(tower, 0)
    for c, r in terms:
        acc = acc + (tower.sqrt_in(r) * c if r != 1 else MQElem.from_rational(tower, c))
    return acc


def format_elem(s: MQElem) -> str:
    """Literal in the corpus grammar; round-trips through parse_elem."""
    parts = []
    for S in range(s.tower.degree):
        x = s.nums[S]
        if not x:
            continue
        c = Fraction(x, s.den)
        if S == 0:
            parts.append((c, 1))
        else:
            sign, r, M = s.tower.basis_radicand(S)
            parts.append((c * sign * r, M))
    if not parts:
        return "0"
    out = []
    for i, (c, M) in enumerate(parts):
        neg = c < 0
        a = abs(c)
        body = str(a) if M == 1 else (f"sqrt({M})" if a == 1 else f"{a}*sqrt({M})")
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
