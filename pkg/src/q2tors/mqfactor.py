"""Polynomials over towers, norm-based factoring, and roots inside Q(2^inf)."""
from __future__ import annotations

import dataclasses
import functools
import logging
from fractions import Fraction
from typing import Iterable

from .arith import modp
from .arith.factor import factor_poly_Q, small_pattern_factors
from .arith.integers import factorint, legendre, primes_up_to
from .arith.ratpoly import RatPoly, poly_disc
from .config import limits
from .errors import SearchBudgetExceeded
from .mqfield import QQ, MQElem, MQTower, GaloisChar, apply_char, invert, make_tower

log = logging.getLogger(__name__)


class TowerPoly:
    """Polynomial with coefficients in one tower; coeffs[i] multiplies x**i."""

    __slots__ = ("tower", "coeffs")

    def __init__(self, tower: MQTower, coeffs: Iterable):
        cs = []
        for c in coeffs:
            if isinstance(c, MQElem):
                cs.append(c.to_tower(tower))
            else:
                cs.append(MQElem.from_rational(tower, c))
        while cs and cs[-1].is_zero():
            cs.pop()
        self.tower = tower
        self.coeffs = cs

    @classmethod
    def from_ratpoly(cls, f: RatPoly, tower: MQTower = QQ) -> "TowerPoly":
        return cls(tower, list(f.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> MQElem:
        return self.coeffs[-1]

    def to_tower(self, t: MQTower) -> "TowerPoly":
        return TowerPoly(t, [c.to_tower(t) for c in self.coeffs])

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.coeffs)

    def to_ratpoly(self) -> RatPoly:
        return RatPoly([c.to_rational() for c in self.coeffs])

    def __repr__(self):
        return f"TowerPoly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(f"({c})" + (f"*{mon}" if mon else ""))
        return " + ".join(terms)

    def __eq__(self, other):
        if not isinstance(other, TowerPoly):
            return NotImplemented
        if self.degree != other.degree:
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def _align(self, other: "TowerPoly"):
        if other.tower == self.tower:
            return self, other
        t = self.tower.join(other.tower)
        return self.to_tower(t), other.to_tower(t)

    def __add__(self, other):
        a, b = self._align(other)
        n = max(len(a.coeffs), len(b.coeffs))
        z = MQElem.from_rational(a.tower, 0)
        return TowerPoly(a.tower, [(a.coeffs[i] if i < len(a.coeffs) else z) + (b.coeffs[i] if i < len(b.coeffs) else z) for i in range(n)])

    def __neg__(self):
        return TowerPoly(self.tower, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, MQElem)):
            return TowerPoly(self.tower if not isinstance(other, MQElem) else self.tower.join(other.tower),
                             [c * other for c in self.coeffs])
        a, b = self._align(other)
        if a.is_zero() or b.is_zero():
            return TowerPoly(a.tower, [])
        z = MQElem.from_rational(a.tower, 0)
        out = [z] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(b.coeffs):
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y
        return TowerPoly(a.tower, out)

    def __divmod__(self, other: "TowerPoly"):
        a, b = self._align(other)
        if b.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(a.coeffs)
        db = b.degree
        if len(r) - 1 < db:
            return TowerPoly(a.tower, []), a
        inv = invert(b.lc)
        bq = [c * inv for c in b.coeffs]  # monic divisor
        q = [MQElem.from_rational(a.tower, 0)] * (len(r) - db)
        for i in range(len(r) - 1 - db, -1, -1):
            c = r[i + db]
            if c.is_zero():
                continue
            q[i] = c * inv
            for j in range(db):
                if not bq[j].is_zero():
                    r[i + j] = r[i + j] - c * bq[j]
            r[i + db] = MQElem.from_rational(a.tower, 0)
        return TowerPoly(a.tower, q), TowerPoly(a.tower, r[:db])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self) -> "TowerPoly":
        inv = invert(self.lc)
        return TowerPoly(self.tower, [c * inv for c in self.coeffs])

    def derivative(self) -> "TowerPoly":
        return TowerPoly(self.tower, [c * i for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        if not self.coeffs:
            return MQElem.from_rational(self.tower, 0)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def shift(self, c: MQElem) -> "TowerPoly":
        """f(x + c)."""
        t = self.tower.join(c.tower) if isinstance(c, MQElem) else self.tower
        f = self.to_tower(t)
        c = c.to_tower(t) if isinstance(c, MQElem) else MQElem.from_rational(t, c)
        # Horner in the polynomial ring
        acc = TowerPoly(t, [])
        lin = TowerPoly(t, [c, MQElem.from_rational(t, 1)])
        for a in reversed(f.coeffs):
            acc = acc * lin + TowerPoly(t, [a])
        return acc

    def apply_char(self, chi: GaloisChar) -> "TowerPoly":
        return TowerPoly(self.tower, [apply_char(c, chi) for c in self.coeffs])

    def norm(self) -> RatPoly:
        """N_{K/Q}(f) via successive relative norms over the last generator."""
        f = self
        while f.tower.k:
            t = f.tower
            conj = TowerPoly(t, [c.conj_last() for c in f.coeffs])
            prod = f * conj
            sub = t.prefix(t.k - 1)
            f = TowerPoly(sub, [c.split_last()[0] for c in prod.coeffs])
        return RatPoly([c.to_rational() for c in f.coeffs])

    @staticmethod
    def gcd(f: "TowerPoly", g: "TowerPoly") -> "TowerPoly":
        a, b = f._align(g)
        while not b.is_zero():
            a, b = b, a % b
            if not b.is_zero():
                b = b.monic()
        return a.monic() if not a.is_zero() else a


def _as_towerpoly(f, tower: MQTower | None = None) -> TowerPoly:
    if isinstance(f, TowerPoly):
        return f if tower is None else f.to_tower(tower)
    return TowerPoly.from_ratpoly(f, tower or QQ)


def primitive_element(K: MQTower) -> MQElem:
    """sqrt(m1) + ... + sqrt(mk)."""
    th = MQElem.from_rational(K, 0)
    for i in range(K.k):
        th = th + K.gen(i)
    return th


def _shifts():
    yield 0
    c = 1
    while True:
        yield c
        yield -c
        c += 1


def _is_squarefree_rat(N: RatPoly) -> bool:
    prim = N.primitive_int()
    for p in (1000003, 1000033, 1000037, 1000039):
        if prim[-1] % p == 0:
            continue
        fp = modp.monic(modp.reduce(prim, p), p)
        if len(fp) == len(prim) and modp.is_squarefree(fp, p):
            return True
    return N.is_squarefree()


def squarefree_decomposition_tower(f: TowerPoly) -> list[tuple[TowerPoly, int]]:
    f = f.monic()
    out = []
    a = TowerPoly.gcd(f, f.derivative())
    b = f // a
    c = (f.derivative() // a) - b.derivative()
    i = 1
    while b.degree > 0:
        a = TowerPoly.gcd(b, c)
        b2 = b // a
        if a.degree > 0:
            out.append((a, i))
        c = (c // a) - b2.derivative()
        b = b2
        i += 1
    return out


def factor_over_tower(f, K: MQTower | None = None) -> list[tuple[TowerPoly, int]]:
    """Monic irreducible factors of f over K with multiplicities (Trager's norm method)."""
    f = _as_towerpoly(f, K)
    K = f.tower
    if f.degree < 1:
        raise ValueError("factor_over_tower needs degree >= 1")
    if K.k == 0:
        _, fac = factor_poly_Q(f.to_ratpoly())
        return [(TowerPoly.from_ratpoly(g), e) for g, e in fac]
    out = []
    for part, e in squarefree_decomposition_tower(f):
        for g in _trager(part):
            out.append((g, e))
    out.sort(key=lambda t: (t[0].degree, str(t[0])))
    return out


def _trager(f: TowerPoly, theta: MQElem | None = None) -> list[TowerPoly]:
    K = f.tower
    if f.degree == 1:
        return [f.monic()]
    theta = primitive_element(K) if theta is None else theta
    for c in _shifts():
        g = f.shift(theta * (-c)) if c else f
        N = g.norm()
        if not _is_squarefree_rat(N):
            continue
        _, fac = factor_poly_Q(N)
        if len(fac) == 1:
            return [f.monic()]
        out = []
        rest = g
        for Ni, _ in fac:
            h = TowerPoly.gcd(rest, TowerPoly.from_ratpoly(Ni, K))
            if h.degree > 0:
                out.append(h.shift(theta * c) if c else h)
                rest = rest // h
        return [h.monic() for h in out]
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# roots in Q(2^inf)

@dataclasses.dataclass(frozen=True)
class RootOrbit:
    """The roots of one irreducible rational factor, all lying in a tower."""

    minpoly: RatPoly
    tower: MQTower
    roots: tuple[MQElem, ...]


def _mod_pattern(prim: list[int], p: int):
    fp = modp.monic(modp.reduce(prim, p), p)
    if len(fp) != len(prim) or not modp.is_squarefree(fp, p):
        return None
    return modp.degree_pattern(fp, p)


def _power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _quick_reject(prim: list[int], checks: int = 12) -> bool:
    """True when a reduction shows the root field is not multiquadratic."""
    seen = 0
    for p in primes_up_to(5000):
        if p < 3 or prim[-1] % p == 0:
            continue
        pat = _mod_pattern(prim, p)
        if pat is None:
            continue
        if pat[-1] > 2 or pat[0] != pat[-1]:
            return True
        seen += 1
        if seen >= checks:
            return False
    return False


def _candidate_primes(h: RatPoly, hint_primes) -> list[int]:
    if hint_primes is not None:
        ps = {abs(int(p)) for p in hint_primes if abs(int(p)) > 1}
        ps.add(2)
        return sorted(ps)
    d = poly_disc(h)
    ps = set(factorint(d.numerator)) | set(factorint(d.denominator)) if d != 0 else set()
    ps |= set(factorint(h.primitive_int()[-1])) if abs(h.primitive_int()[-1]) > 1 else set()
    ps.add(2)
    return sorted(ps)


def _class_space(h: RatPoly, e: int, primes: list[int]) -> list[int] | None:
    """Squarefree generators of the multiquadratic field Q(root of h), or None.

    The field is cut out inside the span of -1 and the candidate primes by the
    Legendre conditions at primes where h splits completely.
    """
    basis_elems = [-1] + primes
    n = len(basis_elems)
    if (1 << n) > limits().candidate_cap:
        raise SearchBudgetExceeded(f"{1 << n} candidate radicals exceed the cap {limits().candidate_cap}")
    prim = h.primitive_int()
    # kernel maintained as a list of basis bitmasks over basis_elems
    space = [1 << i for i in range(n)]
    nonsplit_rows = []
    scanned = 0
    bad = set(primes)
    for ell in primes_up_to(200_000):
        if ell < 3 or ell in bad or prim[-1] % ell == 0:
            continue
        pat = _mod_pattern(prim, ell)
        if pat is None:
            continue
        scanned += 1
        if pat[-1] > 2 or pat[0] != pat[-1]:
            return None
        row = 0
        for i, m in enumerate(basis_elems):
            if legendre(m, ell) == -1:
                row |= 1 << i
        if pat[-1] == 1:
            space = _restrict_space(space, row)
            if len(space) < e:
                return None
        else:
            nonsplit_rows.append(row)
        if len(space) == e and scanned >= 8:
            break
        if scanned > 4000:
            raise SearchBudgetExceeded("Chebotarev scan did not isolate the root field")
    if len(space) != e:
        return None
    for row in nonsplit_rows:
        if all(bin(v & row).count("1") % 2 == 0 for v in space):
            return None
    gens = []
    for v in space:
        m = 1
        for i, b in enumerate(basis_elems):
            if v >> i & 1:
                m *= b
        gens.append(m)
    return gens


def _restrict_space(space: list[int], row: int) -> list[int]:
    """Subspace of span(space) orthogonal to row."""
    odd = [v for v in space if bin(v & row).count("1") % 2]
    even = [v for v in space if not bin(v & row).count("1") % 2]
    if not odd:
        return space
    pivot = odd[0]
    return even + [v ^ pivot for v in odd[1:]]


def _split_chain(h: RatPoly, gens: list[int]) -> MQElem | None:
    """One root of h in Q(sqrt(gens)), found by successive quadratic Trager splits."""
    g = TowerPoly.from_ratpoly(h.monic())
    used: list[int] = []
    for w in gens:
        T = make_tower(used + [w])
        if T.k == len(used):
            continue
        g = g.to_tower(T)
        rad = T.sqrt_in(w)
        factor = None
        for c in _shifts():
            if c == 0:
                continue
            G = g.shift(rad * (-c))
            N = G.norm()
            if not _is_squarefree_rat(N):
                continue
            _, fac = factor_poly_Q(N)
            fac = [q for q, _ in fac]
            if len(fac) < 2:
                return None
            phi = TowerPoly.gcd(G, TowerPoly.from_ratpoly(fac[0], T))
            if phi.degree < 1 or phi.degree >= G.degree:
                return None
            factor = phi.shift(rad * c)
            break
        g = factor
        used.append(w)
        if g.degree == 1:
            break
    if g.degree != 1:
        return None
    g = g.monic()
    return -g.coeffs[0]


def _orbit_of_irreducible(h: RatPoly, hint_primes) -> RootOrbit | None:
    h = h.monic()
    n = h.degree
    if n == 1:
        r = MQElem.from_rational(QQ, -h.coeffs[0])
        return RootOrbit(h, QQ, (r,))
    if not _power_of_two(n):
        return None
    prim = h.primitive_int()
    if _quick_reject(prim):
        return None
    e = n.bit_length() - 1
    gens = _class_space(h, e, _candidate_primes(h, hint_primes))
    if gens is None:
        return None
    alpha = _split_chain(h, gens)
    if alpha is None:
        log.warning("root field of %s predicted multiquadratic but did not split", h)
        return None
    alpha = alpha.shrink()
    T = alpha.tower
    roots = tuple(apply_char(alpha, chi) for chi in T.characters())
    assert all(h(r).is_zero() for r in roots[:1])
    return RootOrbit(h, T, roots)


@functools.lru_cache(maxsize=2048)
def _orbits_cached(coeffs: tuple, hint: tuple | None) -> tuple[RootOrbit, ...]:
    f = _squarefree_rat(RatPoly(coeffs))
    out = []
    for g in small_pattern_factors(f.primitive_int()):
        o = _orbit_of_irreducible(RatPoly(g).monic(), hint)
        if o is not None:
            out.append(o)
    out.sort(key=lambda o: (o.minpoly.degree, o.minpoly.coeffs))
    return tuple(out)


def root_orbits(f: RatPoly, hint_primes=None) -> list[RootOrbit]:
    """For each irreducible factor of f with all roots in Q(2^inf): its roots and tower."""
    if f.degree < 1:
        return []
    hint = None if hint_primes is None else tuple(sorted({abs(int(p)) for p in hint_primes if abs(int(p)) > 1}))
    return list(_orbits_cached(f.monic().coeffs, hint))


def roots_in_Q2inf(f, base: MQTower | None = None, hint_primes=None):
    """(F, roots): all roots of f lying in Q(2^inf) and a tower F containing them; None if there are none."""
    if isinstance(f, TowerPoly) and not f.is_rational():
        K = f.tower if base is None else base.join(f.tower)
        f = f.to_tower(K)
        N = f.norm()
        N = _squarefree_rat(N)
        cands = []
        for o in root_orbits(N, hint_primes):
            for r in o.roots:
                T = K.join(r.tower)
                if f.to_tower(T)(r.to_tower(T)).is_zero():
                    cands.append(r)
        if not cands:
            return None
        F = K.join(*[r.tower for r in cands])
        return F, _dedup([r.to_tower(F) for r in cands])
    if isinstance(f, TowerPoly):
        f = f.to_ratpoly()
    K = base or QQ
    if f.degree < 1:
        return None
    f = _squarefree_rat(f)
    roots = []
    for o in root_orbits(f, hint_primes):
        roots.extend(o.roots)
    if not roots:
        return None
    F = K.join(*[r.tower for r in roots])
    return F, [r.to_tower(F) for r in roots]


def _squarefree_rat(f: RatPoly) -> RatPoly:
    if _is_squarefree_rat(f):
        return f
    g = RatPoly.gcd(f, f.derivative())
    return f.exact_div(g)


def _dedup(xs):
    seen, out = set(), []
    for x in xs:
        key = x.canonical_key()
        if key not in seen:
            seen.add(key)
            out.append(x)
    return out
