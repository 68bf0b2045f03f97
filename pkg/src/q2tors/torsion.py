"""Torsion of elliptic curves over Q(2^inf): p-primary parts, structure, certificates, bound checks."""
from __future__ import annotations

import dataclasses
import logging
import math

from .arith.integers import factorint
from .arith.ratpoly import RatPoly
from .ec import (
    Curve,
    Point,
    halve_point,
    multiplication_by_p_x,
    normalize_model,
    primitive_division_poly,
    twist_curve,
    twist_param,
    x_division_poly,
)
from .errors import ExcludedJInvariant, FactorizationFailure, NonRationalJ, NotOdd, NotPrimeOrder, SquareTwist
from .mqfactor import TowerPoly, roots_in_Q2inf
from .mqfield import QQ, MQElem, MQTower, as_elem, is_square, min_poly, sqrt_class, sqrt_in_q2inf

log = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# classification data

MAIN_LIST = frozenset(
    [(1, n) for n in (1, 3, 5, 7, 9, 13, 15)]
    + [(2, 2 * n) for n in (1, 2, 3, 4, 5, 6, 8)]
    + [(3, 3)]
    + [(4, 4 * n) for n in (1, 2, 3, 4)]
    + [(2 * n, 2 * n) for n in (3, 4, 6)]
    + [(6, 12)]
)

FUJITA_LIST = frozenset(
    [(1, n) for n in (1, 3, 5, 7, 9, 15)]
    + [(2, 2 * n) for n in (1, 2, 3, 4, 5, 6, 8)]
    + [(3, 3)]
    + [(4, 4 * n) for n in (1, 2, 3, 4)]
    + [(2 * n, 2 * n) for n in (3, 4)]
)

DEGREE_TABLE = {
    2: (1, 2, 3),
    3: (1, 2, 3, 4, 6, 8),
    5: (1, 2, 4, 5, 8, 10, 16, 20, 24),
    7: (1, 2, 3, 6, 7, 9, 12, 14, 18, 21, 24, 36, 42, 48),
    11: (5, 10, 20, 40, 55, 80, 100, 110, 120),
    13: (3, 4, 6, 12, 24, 39, 48, 52, 72, 78, 96, 144, 156, 168),
    37: (12, 36, 72, 444, 1296, 1332, 1368),
}

MAZUR_ISOGENIES = frozenset(list(range(1, 20)) + [21, 25, 27, 37, 43, 67, 163])

FULL_TORSION_LEVELS = (1, 2, 3, 4, 6, 8, 12)

# exponent caps: one level beyond each claimed bound where affordable
LEVEL_CAPS = {2: 5, 3: 3, 5: 2, 7: 2, 11: 1, 13: 1}
DEFAULT_PRIMES = (2, 3, 5, 7, 13)
VERIFY_PRIMES = (2, 3, 5, 7, 11, 13)


def group_label(inv) -> str:
    d1, d2 = inv
    if d2 == 1:
        return "{O}"
    if d1 == 1:
        return f"Z/{d2}"
    return f"Z/{d1}+Z/{d2}"


# ---------------------------------------------------------------------------
# setup

class Setup:
    """A short model over K plus the rational model data used to locate x-coordinates."""

    __slots__ = ("E", "K", "tw", "E1", "hints", "original", "change")

    def __init__(self, E: Curve, original: Curve | None = None, change=None):
        if not E.is_short():
            original = original or E
            E, change = normalize_model(E)
        self.E = E
        self.K = E.tower
        self.original = original
        self.change = change
        self.tw = None
        self.E1 = None
        try:
            self.tw = twist_param(E)
            self.E1 = self.tw.rational_model()
        except (NonRationalJ, ExcludedJInvariant):
            pass
        self.hints = self._hint_primes()

    @classmethod
    def of(cls, E) -> "Setup":
        if isinstance(E, Setup):
            return E
        return cls(E)

    def _hint_primes(self):
        """Primes where the relevant division fields can ramify (None when unknown)."""
        if self.E1 is None:
            return None
        A, B = self.E1.A.to_rational(), self.E1.B.to_rational()
        disc = -16 * (4 * A**3 + 27 * B**2)
        ps = {2, 3}
        try:
            for q in (disc, A, B):
                for n in (q.numerator, q.denominator):
                    if n:
                        ps.update(factorint(abs(n)).keys())
            for m in self.K.gens:
                ps.update(factorint(abs(m)).keys())
        except FactorizationFailure:
            return None
        return tuple(sorted(p for p in ps if p > 1))

    def known_primes(self, p: int):
        return tuple(sorted(set(self.hints or ()) | {p} | set(q for q in self.K.primes if q > 0)))

    @property
    def rational(self) -> bool:
        return self.K.k == 0


def _points_over(S: Setup, xs, p: int) -> list[Point]:
    """Points (x, +-y) of S.E with y in Q(2^inf), for the given x-coordinates."""
    out = []
    for x in xs:
        if not x.tower.contains_tower(S.K):
            x = x.to_tower(x.tower.join(S.K))
        y2 = S.E.rhs(x)
        if y2.is_zero():
            out.append(Point(S.E, x, y2))
            continue
        y = sqrt_in_q2inf(y2, known_primes=S.known_primes(p))
        if y is None:
            continue
        xx = x.to_tower(y.tower)
        out.append(Point(S.E, xx, y).shrink())
        out.append(Point(S.E, xx, -y).shrink())
    return out


def _x_roots_rational(f: RatPoly, S: Setup) -> list[MQElem]:
    res = roots_in_Q2inf(f, None, S.hints)
    if res is None:
        return []
    return [r.shrink() for r in res[1]]


def _level_one_xs(S: Setup, n: int) -> list[MQElem]:
    """x-coordinates over Q(2^inf) of the points of exact order n on S.E."""
    if S.tw is not None:
        D = S.tw.D
        return [(x1.to_tower(x1.tower.join(D.tower)) / D).shrink() for x1 in _x_roots_rational(primitive_division_poly(S.E1, n), S)]
    f = primitive_division_poly(S.E, n)
    res = roots_in_Q2inf(f, S.K)
    return [] if res is None else [r.shrink() for r in res[1]]


def _preimage_xs(S: Setup, P: Point, p: int) -> list[MQElem]:
    """x-coordinates over Q(2^inf) of Q with [p]Q equal to P or one of its Galois conjugates."""
    if S.tw is not None:
        D = S.tw.D
        x1 = (P.x * D.to_tower(P.x.tower)).shrink()
        mu = min_poly(x1)
        phi, psq = multiplication_by_p_x(S.E1, p)
        r = mu.degree
        N = RatPoly([0])
        phipow = RatPoly([1])
        psqpows = [RatPoly([1])]
        for _ in range(r):
            psqpows.append(psqpows[-1] * psq)
        for j in range(r + 1):
            c = mu.coeffs[j]
            if c:
                N = N + phipow * psqpows[r - j] * RatPoly([c])
            phipow = phipow * phi
        return [(x.to_tower(x.tower.join(D.tower)) / D).shrink() for x in _x_roots_rational(N, S)]
    phi, psq = multiplication_by_p_x(S.E, p)
    T = P.x.tower.join(S.K)
    xP = P.x.to_tower(T)
    phiT = phi if isinstance(phi, TowerPoly) else TowerPoly.from_ratpoly(phi, T)
    psqT = psq if isinstance(psq, TowerPoly) else TowerPoly.from_ratpoly(psq, T)
    h = phiT.to_tower(T) - psqT.to_tower(T) * TowerPoly(T, [xP])
    res = roots_in_Q2inf(h, T)
    return [] if res is None else [r.shrink() for r in res[1]]


# ---------------------------------------------------------------------------
# finite abelian p-groups of points

def span(points, base=None) -> dict:
    """Closure of points under addition (they must generate a finite group)."""
    elems = dict(base) if base else {}
    if not elems:
        O = None
        for P in points:
            O = P.curve.zero()
            break
        if O is None:
            return {}
        elems[O.key()] = O
    gens = list(points)
    frontier = list(elems.values())
    while frontier:
        nxt = []
        for Q in frontier:
            for g in gens:
                R = Q + g
                k = R.key()
                if k not in elems:
                    R = R.shrink()
                    elems[k] = R
                    nxt.append(R)
        frontier = nxt
    return elems


def point_order(P: Point, bound: int = 4096) -> int:
    Q = P
    for n in range(1, bound + 1):
        if Q.is_zero():
            return n
        Q = Q + P
    raise ValueError("order exceeds bound")


def _vp(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@dataclasses.dataclass
class PPart:
    p: int
    exponents: tuple[int, int]  # (a, b) with a <= b
    generators: list[Point]  # [P1, P2] of orders p^a, p^b (omitting trivial ones)
    counts: list[int]  # |G[p^k]| for k = 1..levels computed
    complete: bool  # False if the top computed level still had new points
    elements: dict

    @property
    def invariants(self) -> tuple[int, int]:
        return self.p ** self.exponents[0], self.p ** self.exponents[1]


def _structure_from_counts(p: int, counts: list[int]) -> tuple[int, int]:
    a = b = 0
    prev = 0
    for c in counts:
        s = round(math.log(c, p))
        inc = s - prev
        if inc >= 1:
            b += 1
        if inc >= 2:
            a += 1
        prev = s
    return a, b


def _basis(p: int, elems: dict, a: int, b: int):
    """Return generators P1 (order p^a), P2 (order p^b) with <P1> + <P2> direct."""
    if b == 0:
        return []
    orders = {k: point_order(P, p ** b) for k, P in elems.items()}
    P2 = next(P for k, P in sorted(elems.items(), key=lambda kv: str(kv[0])) if orders[k] == p**b)
    if a == 0:
        return [P2]
    cyc = span([P2])
    for k, P in sorted(elems.items(), key=lambda kv: str(kv[0])):
        if orders[k] != p**a:
            continue
        bottom = P * (p ** (a - 1))
        if bottom.key() not in cyc:
            return [P, P2]
    raise ArithmeticError("no complementary generator found")


def p_primary(E, p: int, max_level: int | None = None) -> PPart:
    """E(Q(2^inf))[p^inf] truncated at order p^max_level."""
    S = Setup.of(E)
    if max_level is None:
        max_level = LEVEL_CAPS.get(p, 1)
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    E = S.E
    O = E.zero()
    if p == 2:
        roots = [x for x in _level_one_xs(S, 2)]
        pts = [Point(E, x, x.tower.zero()) for x in roots]
    else:
        roots = None
        pts = _points_over(S, _level_one_xs(S, p), p)
    G = span(pts, {O.key(): O})
    counts = [len(G)]
    exact = [P for P in G.values() if not P.is_zero()]
    complete = True
    level = 1
    while exact and level < max_level:
        if p == 2 and len(G) < 4:
            break
        new = _ascend(S, p, G, exact, roots)
        if not new:
            break
        G2 = span(new, G)
        level += 1
        exact = [P for k, P in G2.items() if k not in G]
        G = G2
        counts.append(len(G))
    else:
        if exact and level >= max_level:
            complete = False
    a, b = _structure_from_counts(p, counts)
    gens = _basis(p, G, a, b)
    return PPart(p, (a, b), gens, counts, complete or not exact, G)


def _ascend(S: Setup, p: int, G: dict, exact: list[Point], roots) -> list[Point]:
    """Points Q over Q(2^inf) with [p]Q among the current exact-order points."""
    found: list[Point] = []
    span_now = dict(G)
    divisible = set()
    blocked = set()
    for P in sorted(exact, key=lambda P: (P.field_tower().degree, str(P.key()))):
        k = P.key()
        if k in divisible or k in blocked:
            continue
        if p == 2:
            halves = halve_point(S.E, P, roots, S.known_primes(2))
            qs = halves
        else:
            qs = []
            for x in _preimage_xs(S, P, p):
                qs.extend(_points_over(S, [x], p))
        if not qs:
            for a in range(1, p):
                blocked.add((P * a).key())
            continue
        found.extend(qs)
        span_now = span(qs, span_now)
        for Q in span_now.values():
            divisible.add((Q * p).key())
    return found


# ---------------------------------------------------------------------------
# full torsion

@dataclasses.dataclass
class TorsionStructure:
    invariants: tuple[int, int]
    generators: list[Point]
    tower: MQTower
    parts: dict
    complete: bool

    def order(self) -> int:
        return self.invariants[0] * self.invariants[1]


@dataclasses.dataclass
class TorsionReport:
    curve: Curve
    structure: TorsionStructure
    fujita: bool | None
    main: bool | None
    setup: Setup


def full_torsion(E, primes=None, verify: bool = False, levels: dict | None = None) -> TorsionReport:
    S = Setup.of(E)
    if primes is None:
        primes = VERIFY_PRIMES if verify else DEFAULT_PRIMES
    caps = dict(LEVEL_CAPS)
    if levels:
        caps.update(levels)
    parts = {}
    for p in primes:
        parts[p] = p_primary(S, p, caps.get(p, 1))
    d1 = d2 = 1
    g1 = S.E.zero()
    g2 = S.E.zero()
    complete = True
    for p, part in parts.items():
        i1, i2 = part.invariants
        d1 *= i1
        d2 *= i2
        complete &= part.complete
        if len(part.generators) == 2:
            g1 = g1 + part.generators[0]
            g2 = g2 + part.generators[1]
        elif len(part.generators) == 1:
            g2 = g2 + part.generators[0]
    gens = [P.shrink() for P in (g1, g2) if not P.is_zero()]
    tower = S.K.join(*[P.field_tower() for P in gens]) if gens else S.K
    st = TorsionStructure((d1, d2), gens, tower, parts, complete)
    fujita = main = None
    if S.tw is not None:
        main = (d1, d2) in MAIN_LIST
        if S.rational:
            fujita = (d1, d2) in FUJITA_LIST
    return TorsionReport(S.E, st, fujita, main, S)


# ---------------------------------------------------------------------------
# isogeny certificates

@dataclasses.dataclass
class IsogenyCertificate:
    order: int
    generator: Point
    action: dict  # character flips -> a with sigma(P) = aP

    def mazur_ok(self) -> bool:
        return self.order in MAZUR_ISOGENIES


def _stable_action(P: Point, K: MQTower, n: int):
    mult = {}
    Q = P.curve.zero()
    for a in range(n):
        mult[Q.key()] = a
        Q = Q + P
    T = P.field_tower().join(K)
    PT = P.to_tower(T)
    action = {}
    for chi in T.fixing(K):
        s = PT.apply_char(chi)
        a = mult.get(s.key())
        if a is None:
            return None
        action[chi.flips] = a
    return action


def invariant_cyclic_subgroups(report: TorsionReport) -> list[IsogenyCertificate]:
    """One certificate per maximal character-stable cyclic subgroup."""
    K = report.setup.K
    per_prime = []
    for p, part in report.structure.parts.items():
        cyclic = {}
        for P in part.elements.values():
            if P.is_zero():
                continue
            n = point_order(P)
            sub = frozenset(span([P]).keys())
            if sub in cyclic:
                continue
            act = _stable_action(P, K, n)
            if act is not None:
                cyclic[sub] = (n, P, act)
        maximal = [v for s, v in cyclic.items() if not any(s < t for t in cyclic)]
        if maximal:
            maximal.sort(key=lambda v: (-v[0], str(v[1].key())))
            per_prime.append(maximal)
    certs = []
    if not per_prime:
        O = report.curve.zero()
        return [IsogenyCertificate(1, O, {0: 0})]

    def combine(i, n, P, acts):
        if i == len(per_prime):
            certs.append(IsogenyCertificate(n, P.shrink(), _merge_actions(acts, n)))
            return
        for m, Q, act in per_prime[i]:
            combine(i + 1, n * m, P + Q, acts + [(m, act)])

    combine(0, 1, report.curve.zero(), [])
    certs.sort(key=lambda c: (-c.order, str(c.generator.key())))
    return certs


def _merge_actions(acts, n):
    """Combine per-prime multipliers by CRT on the characters they share."""
    merged = {}
    keys = set()
    for _, act in acts:
        keys |= set(act)
    for k in sorted(keys):
        residues = [(a_map.get(k, 1), m) for m, a_map in acts]
        x, mod = 0, 1
        for r, m in residues:
            while x % m != r % m:
                x += mod
            mod *= m
        merged[k] = x % max(n, 1)
    return merged


# ---------------------------------------------------------------------------
# definition degree

@dataclasses.dataclass
class DegreeCheck:
    p: int
    degree: int
    in_table: bool | None
    stable: bool
    divides_phi: bool | None
    lemma_p_minus_1: bool | None

    def ok(self) -> bool:
        return all(v is not False for v in (self.in_table, self.divides_phi, self.lemma_p_minus_1))


def definition_degree(P: Point, rational_p_torsion: bool | None = None, full_p_torsion: bool | None = None) -> DegreeCheck:
    if P.is_zero():
        raise NotPrimeOrder("the point at infinity has no prime order")
    n = point_order(P)
    if n < 2 or any(n % q == 0 for q in range(2, int(math.isqrt(n)) + 1)):
        raise NotPrimeOrder(f"point has order {n}")
    if P.curve.tower.k != 0:
        raise ValueError("definition_degree needs a curve over Q")
    d = P.field_tower().degree
    row = DEGREE_TABLE.get(n)
    in_table = None if row is None else d in row
    stable = _stable_action(P, QQ, n) is not None
    divides_phi = (n - 1) % d == 0 if stable else None
    lemma = None
    # needs [K:Q] prime to p; towers have 2-power degree, so only odd p qualifies
    if rational_p_torsion and full_p_torsion and d > 1 and n % 2:
        lemma = (n - 1) % d == 0
    return DegreeCheck(n, d, in_table, stable, divides_phi, lemma)


def two_torsion_degrees(E: Curve) -> list[int]:
    """Degrees of the fields of definition of the 2-torsion points of a curve over Q."""
    from .arith.factor import irreducible_factors

    S = Setup.of(E)
    cub = S.E.two_division_cubic()
    cub = cub if isinstance(cub, RatPoly) else cub.to_ratpoly()
    out = []
    for g in irreducible_factors(cub):
        out.extend([g.degree] * g.degree)
    return out


def degree_checks(report: TorsionReport) -> list[DegreeCheck]:
    """definition_degree for every prime-order point found (curves over Q)."""
    out = []
    if not report.setup.rational:
        return out
    for p, part in report.structure.parts.items():
        pts = [P for P in part.elements.values() if not P.is_zero() and (P * p).is_zero()]
        rational = any(P.field_tower().k == 0 for P in pts)
        full = len(pts) == p * p - 1
        for P in pts:
            out.append(definition_degree(P, rational, full))
    return out


# ---------------------------------------------------------------------------
# torsion over a fixed tower and the twist decomposition

def torsion_over_field(E: Curve, L: MQTower, n: int) -> tuple[tuple[int, int], dict]:
    """E(L)[n] (E short over a subfield of L) as invariants and element dictionary."""
    S = Setup.of(E)
    E = S.E
    if not L.contains_tower(E.tower):
        L = L.join(E.tower)
    f = x_division_poly(E, n)
    res = roots_in_Q2inf(f, E.tower)
    pts = []
    if res is not None:
        for x in res[1]:
            try:
                xl = x.to_tower(L)
            except Exception:
                continue
            y2 = E.rhs(xl)
            y = is_square(y2)
            if y is None:
                continue
            pts.append(Point(E, xl, y))
            if not y.is_zero():
                pts.append(Point(E, xl, -y))
    G = span(pts, {E.zero().key(): E.zero()})
    return invariants_of(G), G


def invariants_of(G: dict) -> tuple[int, int]:
    """Invariant factors of a finite abelian group of points with at most two generators."""
    orders = [point_order(P) for P in G.values()]
    total = len(G)
    d1 = d2 = 1
    for p in sorted({q for q in factorint(total)} if total > 1 else []):
        counts = []
        k = 1
        while True:
            c = sum(1 for o in orders if (p**k) % o == 0)
            counts.append(c)
            if c == p ** _vp(total, p):
                break
            k += 1
        a, b = _structure_from_counts(p, counts)
        d1 *= p**a
        d2 *= p**b
    if d1 * d2 != total:
        raise ArithmeticError("group needs more than two generators")
    return d1, d2


def _combine_invariants(*invs) -> tuple:
    """Invariant factors of a direct sum of cyclic groups (as a sorted tuple, length >= 2)."""
    cyc = [n for inv in invs for n in inv if n > 1]
    ps = sorted({p for n in cyc for p in factorint(n)})
    cols = []
    for p in ps:
        cols.append(sorted((p ** _vp(n, p) for n in cyc), reverse=True))
    width = max([len(c) for c in cols] + [2])
    out = [1] * width
    for c in cols:
        for i, q in enumerate(c):
            out[i] *= q
    return tuple(sorted(out))


@dataclasses.dataclass
class TwistDecomposition:
    n: int
    d: MQElem
    L: MQTower
    over_L: tuple[int, int]
    over_K: tuple[int, int]
    twist_K: tuple[int, int]
    orders_ok: bool
    invariants_ok: bool

    def ok(self) -> bool:
        return self.orders_ok and self.invariants_ok


def twist_decomposition_check(E: Curve, d, n: int) -> TwistDecomposition:
    if n % 2 == 0:
        raise NotOdd("n must be odd")
    S = Setup.of(E)
    E = S.E
    K = E.tower
    d = as_elem(d).to_tower(K.join(as_elem(d).tower))
    if is_square(d) is not None:
        raise SquareTwist("d is a square in K")
    cls_ = sqrt_class(d)
    if cls_ is None:
        raise ValueError("K(sqrt(d)) is not multiquadratic")
    m, t = cls_
    L = d.tower.adjoin(m)
    if L.degree == d.tower.degree:
        raise SquareTwist("d is a square in K")
    inv_L, _ = torsion_over_field(E, L, n)
    inv_K, _ = torsion_over_field(E, d.tower, n)
    Ed = twist_curve(E, d)
    inv_T, _ = torsion_over_field(Ed, d.tower, n)
    orders_ok = inv_L[0] * inv_L[1] == inv_K[0] * inv_K[1] * inv_T[0] * inv_T[1]
    invariants_ok = _combine_invariants(inv_L) == _combine_invariants(inv_K, inv_T)
    return TwistDecomposition(n, d, L, inv_L, inv_K, inv_T, orders_ok, invariants_ok)


# ---------------------------------------------------------------------------
# torsion bounds

@dataclasses.dataclass
class BoundCheck:
    claim: str
    passed: bool
    detail: str = ""


def verify_bounds(report: TorsionReport) -> list[BoundCheck]:
    st = report.structure
    d1, d2 = st.invariants
    parts = st.parts
    out = []

    def exponent(p):
        return parts[p].exponents[1] if p in parts else 0

    if 2 in parts:
        out.append(BoundCheck("no point of order 32", exponent(2) < 5, _witness(parts[2], 5)))
    if 5 in parts:
        out.append(BoundCheck("no point of order 25", exponent(5) < 2, _witness(parts[5], 2)))
    out.append(BoundCheck("no point of order 24", d2 % 24 != 0))
    big = [p for p in parts if p not in (2, 3, 5, 7, 13) and exponent(p) > 0]
    out.append(BoundCheck("torsion primes are <= 7 or 13", not big, ",".join(map(str, big))))
    if 13 in parts:
        out.append(BoundCheck("13-torsion forces Z/13", d2 % 13 != 0 or (d1, d2) == (1, 13)))
    full = BoundCheck("full n-torsion has n in {1,2,3,4,6,8,12}", d1 in FULL_TORSION_LEVELS)
    out.append(full)
    if d1 > 1:
        T = _full_torsion_tower(st)
        need = []
        if d1 % 3 == 0:
            need.append(-3)
        if d1 % 4 == 0:
            need.append(-1)
        if d1 % 8 == 0:
            need.append(2)
        miss = [m for m in need if not T.contains_sqrt(m)]
        out.append(BoundCheck(f"field of E[{d1}] contains the {d1}-th roots of unity", not miss, f"tower {list(T.gens)}"))
    return out


def _witness(part: PPart, k: int) -> str:
    if part.exponents[1] >= k:
        P = part.generators[-1]
        return f"x={P.x}, y={P.y}"
    return ""


def _full_torsion_tower(st: TorsionStructure) -> MQTower:
    d1, d2 = st.invariants
    gens = st.generators
    if len(gens) < 2:
        return QQ
    P1, P2 = gens
    B = P2 * (d2 // d1)
    return P1.field_tower().join(B.field_tower())
