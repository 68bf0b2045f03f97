"""A small permutation group engine for exhaustive checks on 2-groups."""
from __future__ import annotations

import dataclasses
import math
import re
from typing import Iterable, Sequence

from .errors import ParseError, TooLarge, UnlabeledQuotient

MAX_ORDER = 2**10

Perm = tuple  # images of 0..n-1


def perm_from_cycles(text: str, degree: int) -> Perm:
    """Parse cycle notation such as `(1 2 3)(4 5)` on points 1..degree."""
    img = list(range(degree))
    text = text.strip()
    if text in ("", "()", "e", "id"):
        return tuple(img)
    for m in re.finditer(r"\(([^()]*)\)|(\S)", text):
        if m.group(2) is not None:
            raise ParseError(f"unexpected {m.group(2)!r} in cycle notation", 0, m.start() + 1)
        pts = [int(t) for t in m.group(1).replace(",", " ").split()]
        if any(p < 1 or p > degree for p in pts):
            raise ParseError(f"point out of range 1..{degree}", 0, m.start() + 1)
        if len(set(pts)) != len(pts):
            raise ParseError("repeated point in a cycle", 0, m.start() + 1)
        # compose this cycle after the ones already read (left-to-right product)
        cyc = list(range(degree))
        for a, b in zip(pts, pts[1:] + pts[:1]):
            cyc[a - 1] = b - 1
        img = [cyc[i] for i in img]
    return tuple(img)


def compose(p: Perm, q: Perm) -> Perm:
    """p*q: apply q first, then p."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


class PermGroup:
    """A finite permutation group with a fully enumerated element list."""

    __slots__ = ("degree", "gens", "elements", "_index", "_table", "_inv")

    def __init__(self, degree: int, gens: Sequence[Perm], elements: list[Perm]):
        self.degree = degree
        self.gens = list(gens)
        self.elements = elements
        self._index = {g: i for i, g in enumerate(elements)}
        self._table = None
        self._inv = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def identity(self) -> int:
        return self._index[tuple(range(self.degree))]

    def index(self, p: Perm) -> int:
        return self._index[p]

    def table(self):
        if self._table is None:
            els = self.elements
            idx = self._index
            self._table = [[idx[compose(a, b)] for b in els] for a in els]
            e = self.identity()
            self._inv = [row.index(e) for row in self._table]
        return self._table

    def inv(self, i: int) -> int:
        self.table()
        return self._inv[i]

    def mul(self, i: int, j: int) -> int:
        return self.table()[i][j]

    def gen_indices(self) -> list[int]:
        return [self._index[g] for g in self.gens]

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self.order})"


def closure(gens: Iterable[Perm], degree: int | None = None, cap: int = MAX_ORDER) -> PermGroup:
    gens = [tuple(g) for g in gens]
    if degree is None:
        if not gens:
            raise ValueError("need a degree or at least one generator")
        degree = len(gens[0])
    if any(len(g) != degree or sorted(g) != list(range(degree)) for g in gens):
        raise ValueError("generators must be permutations of one degree")
    e = tuple(range(degree))
    seen = {e}
    order = [e]
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
                    if len(order) > cap:
                        raise TooLarge(f"group order exceeds {cap}")
        frontier = nxt
    return PermGroup(degree, gens, order)


# ---------------------------------------------------------------------------
# subgroups (as frozensets of element indices)

def generated(G: PermGroup, gens: Iterable[int], base: frozenset | None = None) -> frozenset:
    """Subgroup generated by the given elements (and an optional subgroup)."""
    e = G.identity()
    elems = set(base) if base else {e}
    gens = list(gens) + (list(base) if base else [])
    frontier = list(elems)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(g, x)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(elems)


def element_order(G: PermGroup, i: int) -> int:
    e = G.identity()
    n, x = 1, i
    while x != e:
        x = G.mul(x, i)
        n += 1
    return n


def subgroups(G: PermGroup) -> list[frozenset]:
    """All subgroups, found as joins of cyclic subgroups."""
    cyclic = {generated(G, [i]) for i in range(G.order)}
    found = set(cyclic)
    frontier = list(cyclic)
    cyc = sorted(cyclic, key=len)
    while frontier:
        nxt = []
        for H in frontier:
            for C in cyc:
                if C <= H:
                    continue
                J = generated(G, C, H)
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return sorted(found, key=lambda H: (len(H), sorted(H)))


def is_normal(G: PermGroup, H: frozenset) -> bool:
    for g in G.gen_indices():
        gi = G.inv(g)
        for h in H:
            if G.mul(G.mul(g, h), gi) not in H:
                return False
    return True


def normal_subgroups(G: PermGroup) -> list[frozenset]:
    return [H for H in subgroups(G) if is_normal(G, H)]


def center(G: PermGroup) -> frozenset:
    gens = G.gen_indices()
    return frozenset(z for z in range(G.order) if all(G.mul(z, g) == G.mul(g, z) for g in gens))


def commutator(G: PermGroup) -> frozenset:
    comms = set()
    for a in range(G.order):
        for b in range(G.order):
            comms.add(G.mul(G.mul(G.inv(a), G.inv(b)), G.mul(a, b)))
    return generated(G, comms)


def is_abelian(G: PermGroup) -> bool:
    gens = G.gen_indices()
    return all(G.mul(a, b) == G.mul(b, a) for a in gens for b in gens)


@dataclasses.dataclass(frozen=True)
class QuotientInfo:
    order: int
    exponent: int
    abelian: bool
    census: tuple  # sorted (element order, count)


def quotient_info(G: PermGroup, N: frozenset) -> QuotientInfo:
    if not is_normal(G, N):
        raise ValueError("not a normal subgroup")
    if G.order % len(N):
        raise ArithmeticError("Lagrange violated")
    reps = []
    seen = set()
    for g in range(G.order):
        if g in seen:
            continue
        coset = frozenset(G.mul(g, n) for n in N)
        seen |= coset
        reps.append(g)
    orders = {}
    for g in reps:
        k, x = 1, g
        while x not in N:
            x = G.mul(x, g)
            k += 1
        orders[k] = orders.get(k, 0) + 1
    exponent = math.lcm(*orders) if orders else 1
    gens = G.gen_indices()
    abelian = all(G.mul(G.mul(G.inv(a), G.inv(b)), G.mul(a, b)) in N for a in gens for b in gens)
    return QuotientInfo(len(reps), exponent, abelian, tuple(sorted(orders.items())))


def quotient_type(G: PermGroup, N: frozenset) -> str:
    q = quotient_info(G, N)
    inv = dict(q.census).get(2, 0)
    if q.order == 1:
        return "C1"
    if q.order == 2:
        return "C2"
    if q.order == 4:
        return "C4" if q.exponent == 4 else "C2^2"
    if q.order == 8:
        if q.abelian:
            return {8: "C8", 4: "C2xC4", 2: "C2^3"}[q.exponent]
        return "D4" if inv == 5 else "Q8"
    raise UnlabeledQuotient(f"quotient of order {q.order} is outside the label table")


def _is_elementary(q: QuotientInfo) -> bool:
    return q.exponent <= 2


# ---------------------------------------------------------------------------
# lemma checks

@dataclasses.dataclass
class LemmaReport:
    lemma: str
    group: str
    order: int
    instances: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def _c4_quotients(G: PermGroup, normals):
    out = []
    for H in normals:
        if len(H) * 4 == G.order:
            q = quotient_info(G, H)
            if q.exponent == 4:
                out.append(H)
    return out


def verify_lemma_abelian(G: PermGroup, name: str = "", normals=None) -> LemmaReport:
    """Normal H1 of order 2 with G/H1 of exponent 2 and normal H2 with G/H2 cyclic of order 4 force G abelian."""
    normals = normals if normals is not None else normal_subgroups(G)
    h1s = [H for H in normals if len(H) == 2 and _is_elementary(quotient_info(G, H))]
    h2s = _c4_quotients(G, normals)
    abelian = is_abelian(G)
    failures = []
    count = 0
    for H1 in h1s:
        for H2 in h2s:
            count += 1
            if not abelian:
                failures.append((sorted(H1), sorted(H2)))
    return LemmaReport("abelian", name, G.order, count, failures)


def verify_lemma_normal(G: PermGroup, name: str = "", normals=None) -> LemmaReport:
    """For |G| = 2^n: normal H1 with G/H1 elementary of order 2^(n-2) and H2 with G/H2 cyclic of order 4
    force every subgroup of H1 to be normal."""
    n = G.order.bit_length() - 1
    if G.order != 1 << n or n < 2:
        raise ValueError("verify_lemma_normal needs |G| = 2^n with n >= 2")
    normals = normals if normals is not None else normal_subgroups(G)
    h1s = [H for H in normals if len(H) == 4 and _is_elementary(quotient_info(G, H))]
    h2s = _c4_quotients(G, normals)
    failures = []
    count = 0
    if h1s and h2s:
        subs = subgroups(G)
        for H1 in h1s:
            inside = [S for S in subs if S <= H1]
            for H2 in h2s:
                count += 1
                bad = [sorted(S) for S in inside if not is_normal(G, S)]
                if bad:
                    failures.append((sorted(H1), sorted(H2), bad))
    return LemmaReport("normal", name, G.order, count, failures)


def self_checks(G: PermGroup) -> list[str]:
    """Engine consistency: |G| divides n!, Lagrange for every subgroup, quotient orders multiply."""
    problems = []
    if math.factorial(G.degree) % G.order:
        problems.append("order does not divide n!")
    for H in subgroups(G):
        if G.order % len(H):
            problems.append(f"Lagrange fails for a subgroup of order {len(H)}")
        if is_normal(G, H) and quotient_info(G, H).order * len(H) != G.order:
            problems.append("quotient order mismatch")
    return problems


# ---------------------------------------------------------------------------
# corpus file

@dataclasses.dataclass
class GroupRecord:
    name: str
    degree: int
    generators: list[Perm]
    line: int

    def group(self) -> PermGroup:
        return closure(self.generators, self.degree)


def parse_groups(text: str) -> list[GroupRecord]:
    """Records `name; degree; cycles[, cycles...]`; `#` starts a comment."""
    out = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(";")]
        if len(fields) != 3:
            raise ParseError("expected `name; degree; generators`", ln, 1)
        name, deg, gens = fields
        try:
            degree = int(deg)
        except ValueError:
            raise ParseError(f"bad degree {deg!r}", ln, raw.index(deg) + 1) from None
        perms = []
        col = raw.index(gens) if gens else 0
        starts = [0] + [m.end() for m in re.finditer(r"\s*,\s*(?=\()", gens)]
        ends = [m.start() for m in re.finditer(r"\s*,\s*(?=\()", gens)] + [len(gens)]
        for a, b in zip(starts, ends):
            try:
                perms.append(perm_from_cycles(gens[a:b], degree))
            except ParseError as e:
                raise ParseError(str(e).split(": ", 1)[-1], ln, col + a + e.column) from None
        out.append(GroupRecord(name, degree, perms, ln))
    return out
