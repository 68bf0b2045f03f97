from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from q2tors import config
from q2tors.arith import RatPoly, factor_poly_Q, factorint, poly_disc, squarefree_part
from q2tors.arith.factor import small_pattern_factors
from q2tors.arith.integers import is_probable_prime, squarefree_kernel
from q2tors.errors import FactorizationFailure

X = sympy.Symbol("x")


def to_sympy(f: RatPoly):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(f.coeffs)], X)


def from_sympy(p) -> RatPoly:
    return RatPoly([Fraction(int(c.p), int(c.q)) for c in reversed(sympy.Poly(p, X).all_coeffs())])


def product(unit, factors):
    out = RatPoly([unit])
    for g, e in factors:
        out = out * g**e
    return out


# squarefree part -------------------------------------------------------------

@pytest.mark.parametrize("q,m,t", [(8, 2, 2), (-12, -3, 2), (Fraction(45, 4), 5, Fraction(3, 2)), (1, 1, 1), (-1, -1, 1)])
def test_squarefree_examples(q, m, t):
    assert squarefree_part(q) == (m, t)


def test_squarefree_zero_rejected():
    with pytest.raises(ValueError):
        squarefree_part(0)


@settings(max_examples=300, deadline=None)
@given(st.fractions(min_value=-10**12, max_value=10**12, max_denominator=10**9).filter(lambda q: q != 0))
def test_squarefree_round_trip(q):
    m, t = squarefree_part(q)
    assert m * t * t == q and t > 0
    assert sympy.factorint(abs(m)) == {p: 1 for p in sympy.factorint(abs(m))}


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=10**15))
def test_factorint_matches_sympy(n):
    assert factorint(n) == sympy.factorint(n)


def test_primality_against_sympy():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randrange(2, 10**18)
        assert is_probable_prime(n) == sympy.isprime(n)


def test_factorization_budget_is_explicit():
    n = 1000000000039 * 1000000000061
    with config.using(trial_bound=100, rho_iterations=5):
        with pytest.raises(FactorizationFailure):
            squarefree_kernel(n)


# discriminant ----------------------------------------------------------------

@pytest.mark.parametrize("coeffs,disc", [((-2, 0, 1), 8), ((0, -1, 0, 1), 4), ((1, 0, 1), -4)])
def test_disc_examples(coeffs, disc):
    assert poly_disc(RatPoly(coeffs)) == disc


def test_disc_matches_sympy_and_gcd():
    rng = random.Random(11)
    for _ in range(150):
        d = rng.randint(2, 7)
        f = RatPoly([rng.randint(-20, 20) for _ in range(d)] + [rng.choice([1, -1, 2, 3])])
        if rng.random() < 0.3:
            g = RatPoly([rng.randint(-3, 3), 1])
            f = f * g * g
        D = poly_disc(f)
        assert D == Fraction(sympy.discriminant(to_sympy(f).as_expr(), X))
        assert (D == 0) == (RatPoly.gcd(f, f.derivative()).degree > 0)


# factorization over Q --------------------------------------------------------

def test_factor_examples():
    unit, fac = factor_poly_Q(RatPoly([-1, 0, 0, 0, 1]))
    assert unit == 1 and sorted(str(g) for g, _ in fac) == sorted(["x - 1", "x + 1", "x^2 + 1"])
    unit, fac = factor_poly_Q(RatPoly([0, 12, 0, 0, 3]))
    assert unit == 3 and sorted(g.coeffs for g, _ in fac) == sorted([(0, 1), (4, 0, 0, 1)])
    unit, fac = factor_poly_Q(RatPoly([1, 0, -10, 0, 1]))
    assert len(fac) == 1 and fac[0][0].degree == 4


def _random_poly(rng, deg, height):
    return RatPoly([rng.randint(-height, height) for _ in range(deg)] + [rng.randint(1, height)])


def test_factor_soundness_1000_random():
    rng = random.Random(20240601)
    for i in range(1000):
        if i % 2:
            f = _random_poly(rng, rng.randint(1, 20), 10**6)
        else:
            f = RatPoly([rng.randint(1, 5)])
            while f.degree < 1 or (f.degree < 20 and rng.random() < 0.7):
                g = _random_poly(rng, rng.randint(1, 5), 30)
                if f.degree + g.degree > 20:
                    break
                f = f * g
        unit, fac = factor_poly_Q(f)
        assert product(unit, fac) == f
        assert all(g.lc == 1 for g, _ in fac)


def test_factor_against_sympy():
    rng = random.Random(5)
    for _ in range(120):
        f = RatPoly([1])
        for _ in range(rng.randint(1, 4)):
            f = f * _random_poly(rng, rng.randint(1, 4), 9) ** rng.randint(1, 2)
        _, fac = factor_poly_Q(f)
        ours = sorted((g.coeffs, e) for g, e in fac)
        _, theirs = sympy.factor_list(to_sympy(f).as_expr(), X)
        ref = sorted((from_sympy(p).monic().coeffs, e) for p, e in theirs if sympy.Poly(p, X).degree() > 0)
        assert ours == ref


def test_small_factors_irreducible_brute_force():
    """Degree <= 4 factors: no rational root; quartics have no monic integer quadratic split."""
    rng = random.Random(8)
    for _ in range(60):
        f = _random_poly(rng, 4, 6) * _random_poly(rng, 3, 6)
        for g, _ in factor_poly_Q(f)[1]:
            if g.degree > 4 or g.degree < 2:
                continue
            roots = to_sympy(g).ground_roots()
            assert not roots
            if g.degree == 4 and all(c.denominator == 1 for c in g.coeffs):
                c0 = int(g.coeffs[0])
                for b in sympy.divisors(abs(c0)):
                    for bb in (b, -b):
                        for a in range(-40, 41):
                            assert not (g % RatPoly([bb, a, 1])).is_zero()


def test_small_pattern_factors_keep_only_candidate_factors():
    # (x^2 - 2)(x^2 + 1)(x^3 - 2): the cubic can never split into degree <= 2 pieces everywhere
    f = RatPoly([-2, 0, 1]) * RatPoly([1, 0, 1]) * RatPoly([-2, 0, 0, 1])
    got = sorted(RatPoly(g).monic().coeffs for g in small_pattern_factors(f.primitive_int()))
    assert got == sorted([(-2, 0, 1), (1, 0, 1)])
    # the fifth cyclotomic polynomial stays irreducible modulo 2, so it is dropped outright
    assert small_pattern_factors(RatPoly([1, 1, 1, 1, 1]).primitive_int()) == []
