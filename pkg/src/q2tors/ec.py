"""Weierstrass curves over towers, points, division polynomials, twists, Knapp halving."""
from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Sequence

from .arith.ratpoly import RatPoly
from .errors import ExcludedJInvariant, NonRationalJ, RadicalNotInTower, SingularCurve
from .mqfactor import TowerPoly, roots_in_Q2inf
from .mqfield import QQ, MQElem, MQTower, as_elem, is_square, lift_pair, sqrt_class


class Curve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over a tower."""

    __slots__ = ("tower", "a", "_cache", "__weakref__")

    def __init__(self, ainvs: Sequence, tower: MQTower | None = None):
        vals = [as_elem(c) if not isinstance(c, MQElem) else c for c in ainvs]
        if len(vals) != 5:
            raise ValueError("need five a-invariants")
        t = tower or QQ
        for v in vals:
            t = t.join(v.tower) if not t.contains_tower(v.tower) else t
        self.tower = t
        self.a = tuple(v.to_tower(t) for v in vals)
        self._cache = {}
        if self.discriminant().is_zero():
            raise SingularCurve("discriminant vanishes")

    @classmethod
    def short(cls, A, B, tower: MQTower | None = None) -> "Curve":
        return cls([0, 0, 0, A, B], tower)

    # invariants -------------------------------------------------------------
    @property
    def a1(self): return self.a[0]
    @property
    def a2(self): return self.a[1]
    @property
    def a3(self): return self.a[2]
    @property
    def a4(self): return self.a[3]
    @property
    def a6(self): return self.a[4]

    def is_short(self) -> bool:
        return self.a1.is_zero() and self.a2.is_zero() and self.a3.is_zero()

    @property
    def A(self) -> MQElem:
        if not self.is_short():
            raise ValueError("not a short model")
        return self.a4

    @property
    def B(self) -> MQElem:
        if not self.is_short():
            raise ValueError("not a short model")
        return self.a6

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a
        b2 = a1 * a1 + a2 * 4
        b4 = a4 * 2 + a1 * a3
        b6 = a3 * a3 + a6 * 4
        b8 = a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def c_invariants(self):
        b2, b4, b6, _ = self.b_invariants()
        c4 = b2 * b2 - b4 * 24
        c6 = -(b2 * b2 * b2) + b2 * b4 * 36 - b6 * 216
        return c4, c6

    def discriminant(self) -> MQElem:
        b2, b4, b6, b8 = self.b_invariants()
        return -(b2 * b2 * b8) - b4 * b4 * b4 * 8 - b6 * b6 * 27 + b2 * b4 * b6 * 9

    def j_invariant(self) -> MQElem:
        if "j" not in self._cache:
            c4, _ = self.c_invariants()
            self._cache["j"] = c4 * c4 * c4 / self.discriminant()
        return self._cache["j"]

    def __repr__(self):
        return f"Curve([{', '.join(str(c) for c in self.a)}] over {list(self.tower.gens)})"

    def __eq__(self, other):
        return isinstance(other, Curve) and self.tower == other.tower and all(x == y for x, y in zip(self.a, other.a))

    def __hash__(self):
        return hash((self.tower, tuple(c.canonical_key() for c in self.a)))

    def coeffs_in(self, t: MQTower):
        key = ("coeffs", t.gens)
        if key not in self._cache:
            self._cache[key] = tuple(c.to_tower(t) for c in self.a)
        return self._cache[key]

    def rhs(self, x: MQElem) -> MQElem:
        """x^3 + a2 x^2 + a4 x + a6 (for short models this is y^2)."""
        _, a2, _, a4, a6 = self.coeffs_in(x.tower)
        return ((x + a2) * x + a4) * x + a6

    def contains(self, x: MQElem, y: MQElem) -> bool:
        x, y = lift_pair([x, y])
        x, y = _into(self, x, y)
        a1, a2, a3, a4, a6 = self.coeffs_in(x.tower)
        return (y * y + a1 * x * y + a3 * y) == (((x + a2) * x + a4) * x + a6)

    def point(self, x, y) -> "Point":
        x, y = lift_pair([as_elem(x), as_elem(y)])
        x, y = _into(self, x, y)
        if not self.contains(x, y):
            raise ValueError("point is not on the curve")
        return Point(self, x, y)

    def zero(self) -> "Point":
        return Point(self, None, None)

    def two_division_cubic(self):
        """The cubic whose roots are the x-coordinates of the 2-torsion (short model or general)."""
        b2, b4, b6, _ = self.b_invariants()
        if self.is_short():
            coeffs = [self.a6, self.a4, as_elem(0, self.tower), as_elem(1, self.tower)]
        else:
            coeffs = [b6, b4 * 2, b2, as_elem(4, self.tower)]
        return _poly(self.tower, coeffs)


def _into(E: Curve, *xs: MQElem):
    """Coordinates in a tower that also contains the curve's field."""
    t = xs[0].tower
    if not t.contains_tower(E.tower):
        t = t.join(E.tower)
    return tuple(x.to_tower(t) for x in xs)


def _poly(tower: MQTower, coeffs):
    if tower.k == 0:
        return RatPoly([c.to_rational() for c in coeffs])
    return TowerPoly(tower, coeffs)


class Point:
    """A point on a Curve with coordinates in some tower; x is None for infinity."""

    __slots__ = ("curve", "x", "y", "_key")

    def __init__(self, curve: Curve, x: MQElem | None, y: MQElem | None):
        self.curve = curve
        self.x = x
        self.y = y
        self._key = None

    def is_zero(self) -> bool:
        return self.x is None

    @property
    def tower(self) -> MQTower:
        return self.curve.tower if self.x is None else self.x.tower

    def __repr__(self):
        if self.x is None:
            return "Point(O)"
        return f"Point({self.x}, {self.y})"

    def key(self):
        if self._key is None:
            if self.x is None:
                self._key = ("O",)
            else:
                self._key = (self.x.canonical_key(), self.y.canonical_key())
        return self._key

    def __eq__(self, other):
        return isinstance(other, Point) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def shrink(self) -> "Point":
        if self.x is None:
            return self
        t = self.x.support_tower().join(self.y.support_tower(), self.curve.tower)
        return Point(self.curve, self.x.to_tower(t), self.y.to_tower(t))

    def field_tower(self) -> MQTower:
        """Q(x, y) as a tower (the curve's tower is not included)."""
        if self.x is None:
            return QQ
        return self.x.support_tower().join(self.y.support_tower())

    def to_tower(self, t: MQTower) -> "Point":
        if self.x is None:
            return self
        return Point(self.curve, self.x.to_tower(t), self.y.to_tower(t))

    def __neg__(self):
        if self.x is None:
            return self
        a1, _, a3, _, _ = self.curve.coeffs_in(self.x.tower)
        return Point(self.curve, self.x, -self.y - a1 * self.x - a3)

    def __add__(self, other: "Point") -> "Point":
        return add_points(self, other)

    def __sub__(self, other):
        return add_points(self, -other)

    def __rmul__(self, n: int):
        return scalar_mul(self, n)

    def __mul__(self, n: int):
        return scalar_mul(self, n)

    def apply_char(self, chi) -> "Point":
        from .mqfield import apply_char

        if self.x is None:
            return self
        return Point(self.curve, apply_char(self.x, chi), apply_char(self.y, chi))

    def order(self, bound: int = 10_000) -> int:
        Q = self
        for n in range(1, bound + 1):
            if Q.is_zero():
                return n
            Q = Q + self
        raise ValueError("point has no small order")


def add_points(P: Point, Q: Point) -> Point:
    E = P.curve
    if P.is_zero():
        return Q
    if Q.is_zero():
        return P
    x1, y1, x2, y2 = lift_pair([P.x, P.y, Q.x, Q.y])
    a1, a2, a3, a4, a6 = E.coeffs_in(x1.tower)
    if x1 == x2:
        if (y1 + y2 + a1 * x2 + a3).is_zero():
            return E.zero()
        den = y1 * 2 + a1 * x1 + a3
        lam = (x1 * x1 * 3 + a2 * x1 * 2 + a4 - a1 * y1) / den
        nu = (-(x1 * x1 * x1) + a4 * x1 + a6 * 2 - a3 * y1) / den
    else:
        inv = (x2 - x1).inverse()
        lam = (y2 - y1) * inv
        nu = (y1 * x2 - y2 * x1) * inv
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return Point(E, x3, y3)


def scalar_mul(P: Point, n: int) -> Point:
    if n < 0:
        return scalar_mul(-P, -n)
    R = P.curve.zero()
    base = P
    while n:
        if n & 1:
            R = R + base
        n >>= 1
        if n:
            base = base + base
    return R


# ---------------------------------------------------------------------------
# models and twists

@dataclasses.dataclass(frozen=True)
class ModelChange:
    """x_short = x + r, y_short = y + s*x + t."""

    r: MQElem
    s: MQElem
    t: MQElem

    def to_short(self, P: Point, short: Curve) -> Point:
        if P.is_zero():
            return short.zero()
        x, y = P.x, P.y
        r, s, t = (c.to_tower(x.tower) for c in (self.r, self.s, self.t))
        return Point(short, x + r, y + s * x + t)

    def from_short(self, P: Point, original: Curve) -> Point:
        if P.is_zero():
            return original.zero()
        X, Y = P.x, P.y
        r, s, t = (c.to_tower(X.tower) for c in (self.r, self.s, self.t))
        x = X - r
        return Point(original, x, Y - s * x - t)


def normalize_model(ainvs, tower: MQTower | None = None) -> tuple[Curve, ModelChange]:
    E = ainvs if isinstance(ainvs, Curve) else Curve(ainvs, tower)
    t = E.tower
    if E.is_short():
        z = as_elem(0, t)
        return E, ModelChange(z, z, z)
    b2, _, _, _ = E.b_invariants()
    c4, c6 = E.c_invariants()
    short = Curve.short(-c4 / 48, -c6 / 864, t)
    return short, ModelChange(b2 / 12, E.a1 / 2, E.a3 / 2)


def canonical_rational_model(j) -> Curve:
    j = as_elem(j)
    if not j.is_rational():
        raise NonRationalJ("j is not rational")
    jq = j.to_rational()
    if jq in (0, 1728):
        raise ExcludedJInvariant(f"j = {jq} is excluded")
    return Curve.short(Fraction(-27) * jq / (jq - 1728), Fraction(54) * jq / (jq - 1728))


@dataclasses.dataclass(frozen=True)
class TwistData:
    D: MQElem
    A1: Fraction
    B1: Fraction

    def rational_model(self) -> Curve:
        return Curve.short(self.A1, self.B1)


def twist_param(E: Curve) -> TwistData:
    if not E.is_short():
        raise ValueError("twist_param needs a short model")
    j = E.j_invariant()
    if not j.is_rational():
        raise NonRationalJ("j-invariant is not rational")
    jq = j.to_rational()
    if jq in (0, 1728):
        raise ExcludedJInvariant(f"j = {jq} is excluded")
    A1 = Fraction(-27) * jq / (jq - 1728)
    B1 = Fraction(54) * jq / (jq - 1728)
    D = E.A * B1 / (E.B * A1)
    return TwistData(D, A1, B1)


def twist_curve(E: Curve, d) -> Curve:
    if not E.is_short():
        raise ValueError("twist_curve needs a short model")
    d = as_elem(d)
    t = E.tower.join(d.tower)
    d = d.to_tower(t)
    return Curve.short(E.A.to_tower(t) * d * d, E.B.to_tower(t) * d * d * d, t)


def twist_iso_apply(P: Point, tw: TwistData, F: MQTower | None = None, target: Curve | None = None) -> Point:
    """(x, y) -> (x D, y D sqrt(D)) from E onto E' = E^D."""
    target = target or tw.rational_model()
    if P.is_zero():
        return target.zero()
    F = F or P.tower
    F = F.join(P.tower, tw.D.tower)
    if P.y.is_zero():  # 2-torsion needs no radical
        return target.point(P.x.to_tower(F) * tw.D.to_tower(F), P.y.to_tower(F))
    r = is_square(tw.D.to_tower(F))
    if r is None:
        raise RadicalNotInTower("sqrt(D) is not in the given tower")
    x, y, D = P.x.to_tower(F), P.y.to_tower(F), tw.D.to_tower(F)
    return target.point(x * D, y * D * r)


# ---------------------------------------------------------------------------
# division polynomials (short models)

def _ring(E: Curve):
    t = E.tower
    if t.k == 0:
        A, B = E.A.to_rational(), E.B.to_rational()
        mk = lambda cs: RatPoly(cs)
        return mk, A, B
    mk = lambda cs: TowerPoly(t, cs)
    return mk, E.A, E.B


def division_poly(E: Curve, n: int):
    """f_n: psi_n for odd n, psi_n / psi_2 for even n (a polynomial in x alone)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not E.is_short():
        raise ValueError("division polynomials need a short model")
    cache = E._cache.setdefault("divpoly", {})
    if n in cache:
        return cache[n]
    mk, A, B = _ring(E)
    if n == 0:
        f = mk([])
    elif n in (1, 2):
        f = mk([1])
    elif n == 3:
        f = mk([-A * A, B * 12, A * 6, 0, 3])
    elif n == 4:
        f = mk([-(A * A * A) - B * B * 8, -(A * B * 4), -(A * A * 5), B * 20, A * 5, 0, 1]) * 2
    else:
        m = n // 2
        R = mk([B * 4, A * 4, 0, 4])
        fm = [division_poly(E, i) for i in range(m - 2, m + 3)]
        f_m2, f_m1, f_m, f_p1, f_p2 = fm
        if n % 2:
            if m % 2 == 0:
                f = R * R * f_p2 * f_m * f_m * f_m - f_m1 * f_p1 * f_p1 * f_p1
            else:
                f = f_p2 * f_m * f_m * f_m - R * R * f_m1 * f_p1 * f_p1 * f_p1
        else:
            f = f_m * (f_p2 * f_m1 * f_m1 - f_m2 * f_p1 * f_p1)
    cache[n] = f
    return f


def x_division_poly(E: Curve, n: int):
    """Squarefree polynomial whose roots are x(P) for P in E[n], P != O."""
    f = division_poly(E, n)
    if n % 2 == 0:
        mk, A, B = _ring(E)
        f = f * mk([B, A, 0, 1])
    return f


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _mobius(n):
    res, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


def primitive_division_poly(E: Curve, n: int):
    """Monic polynomial whose roots are x(P) for P of exact order n."""
    cache = E._cache.setdefault("primdiv", {})
    if n in cache:
        return cache[n]
    if n == 1:
        mk, _, _ = _ring(E)
        return mk([1])
    num = None
    den = None
    for d in _divisors(n):
        mu = _mobius(n // d)
        if d == 1 or mu == 0:
            continue
        g = x_division_poly(E, d)
        if mu == 1:
            num = g if num is None else num * g
        else:
            den = g if den is None else den * g
    f = num if den is None else _exact_div(num, den)
    f = f.monic()
    cache[n] = f
    return f


def _exact_div(a, b):
    q, r = divmod(a, b)
    if not r.is_zero():
        raise ArithmeticError("inexact division of division polynomials")
    return q


def multiplication_by_p_x(E: Curve, p: int):
    """(phi, psi_sq): x([p]P) = phi(x)/psi_sq(x), both polynomials in x."""
    mk, A, B = _ring(E)
    R = mk([B * 4, A * 4, 0, 4])  # (2y)^2
    f_m1, f_m, f_p1 = (division_poly(E, p + i) for i in (-1, 0, 1))
    xpoly = mk([0, 1])
    if p % 2:
        psq = f_m * f_m
        phi = xpoly * psq - R * f_m1 * f_p1
    else:
        psq = R * f_m * f_m
        phi = xpoly * psq - f_m1 * f_p1
    return phi, psq


# ---------------------------------------------------------------------------
# 2-torsion and halving

def two_torsion_roots(E: Curve, hint_primes=None) -> list[MQElem]:
    """x-coordinates of the 2-torsion points lying over Q(2^inf) (short model)."""
    cub = E.two_division_cubic()
    res = roots_in_Q2inf(cub, E.tower, hint_primes)
    if res is None:
        return []
    return [r.shrink() for r in res[1]]


@dataclasses.dataclass(frozen=True)
class HalfCandidate:
    x: MQElem | None
    status: str  # "in-tower", "needs", "not-in-Q(2^inf)"
    radicals: tuple[int, ...]
    tower: MQTower | None


def knapp_halve(E: Curve, P: Point, roots: Sequence[MQElem] | None = None, known_primes=()) -> list[HalfCandidate]:
    """Candidate x-coordinates of the halves of P (short model with full 2-torsion)."""
    if P.is_zero():
        raise ValueError("P must be nonzero")
    if roots is None:
        roots = two_torsion_roots(E)
    if len(roots) != 3:
        raise ValueError("the 2-torsion must be fully available")
    xs = lift_pair([P.x] + list(roots))
    x, e1, e2, e3 = _into(E, *xs)
    F = x.tower
    rads = []
    ms = []
    for e in (e1, e2, e3):
        d = x - e
        if d.is_zero():
            rads.append((1, d))
            continue
        c = sqrt_class(d, F, known_primes)
        if c is None:
            return [HalfCandidate(None, "not-in-Q(2^inf)", (), None)]
        rads.append(c)
        if c[0] != 1:
            ms.append(c[0])
    F2 = F.adjoin(*ms) if ms else F
    r = [t.to_tower(F2) * (F2.sqrt_in(m) if m != 1 else 1) for m, t in rads]
    xx = x.to_tower(F2)
    seen = []
    out = []
    status = "in-tower" if F2 == F else "needs"
    for s1, s2, s3 in ((1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1)):
        a, b, c = r[0] * s1, r[1] * s2, r[2] * s3
        xp = xx + a * b + a * c + b * c
        if any(xp == z for z in seen):
            continue
        seen.append(xp)
        out.append(HalfCandidate(xp, status, tuple(sorted(set(ms))), F2))
    return out


def halve_point(E: Curve, P: Point, roots: Sequence[MQElem] | None = None, known_primes=()) -> list[Point]:
    """All Q with 2Q = P over Q(2^inf) (empty when P is not halvable there)."""
    cands = knapp_halve(E, P, roots, known_primes)
    if cands and cands[0].x is None:
        return []
    out = []
    for c in cands:
        y2 = E.rhs(c.x.to_tower(c.tower.join(E.tower)))
        y = is_square(y2)
        if y is None:
            raise ArithmeticError("Knapp candidate without y-coordinate in its tower")
        for yy in (y, -y) if not y.is_zero() else (y,):
            Q = Point(E, c.x.to_tower(y.tower), yy)
            if (Q + Q) == P:
                out.append(Q.shrink())
    return out
