from __future__ import annotations

import itertools

import pytest

from q2tors.corpus import bundled
from q2tors.errors import ParseError, TooLarge, UnlabeledQuotient
from q2tors.grouplab import (
    center,
    closure,
    commutator,
    element_order,
    generated,
    is_abelian,
    is_normal,
    normal_subgroups,
    parse_groups,
    perm_from_cycles,
    quotient_info,
    quotient_type,
    self_checks,
    subgroups,
    verify_lemma_abelian,
    verify_lemma_normal,
)


def group(*cycles, degree):
    return closure([perm_from_cycles(c, degree) for c in cycles], degree)


def corpus():
    return {r.name: r for r in parse_groups(bundled("groups.txt"))}


def brute_subgroups(G):
    """Every subset containing the identity and closed under the product (small groups only)."""
    e = G.identity()
    rest = [i for i in range(G.order) if i != e]
    out = set()
    for r in range(len(rest) + 1):
        if G.order % (r + 1):
            continue
        for combo in itertools.combinations(rest, r):
            H = frozenset(combo) | {e}
            if all(G.mul(a, b) in H for a in H for b in H):
                out.add(H)
    return out


# parsing and closure --------------------------------------------------------------

def test_perm_from_cycles():
    assert perm_from_cycles("(1 2 3)", 4) == (1, 2, 0, 3)
    assert perm_from_cycles("()", 3) == (0, 1, 2)
    # left-to-right product: (1 2) then (2 3)
    assert perm_from_cycles("(1 2)(2 3)", 3) == perm_from_cycles("(1 3 2)", 3)
    with pytest.raises(ParseError):
        perm_from_cycles("(1 5)", 4)
    with pytest.raises(ParseError):
        perm_from_cycles("(1 1)", 4)


def test_closure_cap():
    with pytest.raises(TooLarge):
        group("(1 2 3 4 5 6 7)", "(1 2)", degree=7)
    with pytest.raises(ValueError):
        closure([(0, 0, 1)])


# D4, Klein four, Q8 -------------------------------------------------------------

def test_d4_from_square_symmetries():
    G = group("(1 2 3 4)", "(1 3)", degree=4)
    assert G.order == 8 and not is_abelian(G)
    assert len(normal_subgroups(G)) == 6
    assert len(subgroups(G)) == 10
    Z = center(G)
    assert len(Z) == 2 and commutator(G) == Z
    assert quotient_type(G, Z) == "C2^2"


def test_klein_four():
    V = group("(1 2)(3 4)", "(1 3)(2 4)", degree=4)
    assert V.order == 4 and is_abelian(V)
    assert all(element_order(V, i) <= 2 for i in range(4))
    assert len(subgroups(V)) == 5


def test_q8():
    G = corpus()["Q8"].group()
    assert G.order == 8 and not is_abelian(G)
    assert sum(1 for i in range(8) if element_order(G, i) == 2) == 1
    assert len(normal_subgroups(G)) == len(subgroups(G)) == 6


def test_quotient_types():
    C8 = corpus()["C8"].group()
    g = C8.gen_indices()[0]
    N2 = generated(C8, [C8.mul(C8.mul(g, g), C8.mul(g, g))])
    assert len(N2) == 2 and quotient_type(C8, N2) == "C4"
    assert quotient_type(C8, frozenset(range(8))) == "C1"
    assert quotient_type(C8, frozenset([C8.identity()])) == "C8"
    G = corpus()["C2^4"].group()
    with pytest.raises(UnlabeledQuotient):
        quotient_type(G, frozenset([G.identity()]))


def test_quotient_rejects_non_normal():
    G = group("(1 2 3 4)", "(1 3)", degree=4)
    H = next(H for H in subgroups(G) if not is_normal(G, H))
    with pytest.raises(ValueError):
        quotient_info(G, H)


# subgroup enumeration vs brute force --------------------------------------------

@pytest.mark.parametrize("name", ["D4", "Q8", "C4xC2", "C2^3", "M4(2)", "Q16"])
def test_subgroups_match_brute_force(name):
    G = corpus()[name].group()
    assert set(subgroups(G)) == brute_subgroups(G)


# lemma examples -------------------------------------------------------------------

def test_lemma_abelian_c4xc2_non_vacuous():
    r = verify_lemma_abelian(corpus()["C4xC2"].group(), "C4xC2")
    assert r.instances == 2 and r.ok


@pytest.mark.parametrize("name", ["D4", "Q8"])
def test_lemma_abelian_vacuous_on_nonabelian_order_8(name):
    r = verify_lemma_abelian(corpus()[name].group(), name)
    assert r.instances == 0 and r.ok


def test_lemma_normal_c4xc4():
    r = verify_lemma_normal(corpus()["C4xC4"].group(), "C4xC4")
    assert r.instances == 6 and r.ok


def test_lemma_normal_m42_explicit_pair():
    G = corpus()["M4(2)"].group()
    a, b = G.gen_indices()
    a2 = G.mul(a, a)
    a4 = G.mul(a2, a2)
    H1 = generated(G, [a2])
    H2 = generated(G, [a4, b])
    assert len(H1) == 4 and quotient_type(G, H1) == "C2^2"
    assert len(H2) == 4 and quotient_type(G, H2) == "C4"
    assert all(is_normal(G, S) for S in subgroups(G) if S <= H1)
    r = verify_lemma_normal(G, "M4(2)")
    assert r.instances == 2 and r.ok


def test_lemma_normal_needs_2_power():
    G = group("(1 2 3)", degree=3)
    with pytest.raises(ValueError):
        verify_lemma_normal(G)


# the configured corpus -------------------------------------------------------------

def test_corpus_zero_counterexamples_and_non_vacuous():
    recs = parse_groups(bundled("groups.txt"))
    orders = [r.group().order for r in recs]
    assert orders.count(8) == 5 and orders.count(16) == 14 and orders.count(32) >= 1
    inst_a = inst_n = 0
    for r in recs:
        G = r.group()
        normals = normal_subgroups(G)
        ra = verify_lemma_abelian(G, r.name, normals)
        rn = verify_lemma_normal(G, r.name, normals)
        assert ra.ok and rn.ok
        inst_a += ra.instances
        inst_n += rn.instances
    assert inst_a > 0 and inst_n > 0


@pytest.mark.parametrize("name", ["D4", "C4:C4", "D4oC4", "SD16"])
def test_self_checks_clean(name):
    assert self_checks(corpus()[name].group()) == []


def test_parse_groups_errors():
    with pytest.raises(ParseError) as ei:
        parse_groups("C2; 2; (1 2)\nbad line\n")
    assert ei.value.line == 2
    with pytest.raises(ParseError) as ei:
        parse_groups("# c\nX; 4; (1 2), (1 9)\n")
    assert ei.value.line == 2 and ei.value.column > 8
    with pytest.raises(ParseError):
        parse_groups("X; four; (1 2)")
