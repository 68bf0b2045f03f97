"""Dense univariate polynomials over Q."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


class RatPoly:
    """Immutable polynomial; coeffs[i] is the coefficient of x**i."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        c = [x if type(x) is Fraction else Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def x(cls) -> "RatPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "RatPoly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots) -> "RatPoly":
        f = cls((1,))
        for r in roots:
            f = f * cls((-Fraction(r), 1))
        return f

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RatPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        return f"RatPoly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mon and abs(c) == 1:
                s = mon
            else:
                s = f"{abs(c)}" + (f"*{mon}" if mon else "")
            parts.append(("-" if c < 0 else "+", s))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "RatPoly":
        if isinstance(other, RatPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return RatPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return RatPoly([a[i] + b[i] for i in range(len(b))] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RatPoly([c * other for c in self.coeffs])
        if not isinstance(other, RatPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        num_a, den_a = self.integer_numerators()
        num_b, den_b = other.integer_numerators()
        prod = int_poly_mul(num_a, num_b)
        d = den_a * den_b
        return RatPoly([Fraction(c, d) for c in prod])

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result, base = RatPoly((1,)), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db = other.degree
        inv = 1 / other.lc
        bq = other.coeffs
        if len(r) - 1 < db:
            return RatPoly(), self
        q = [Fraction(0)] * (len(r) - db)
        for i in range(len(r) - 1 - db, -1, -1):
            c = r[i + db] * inv
            q[i] = c
            if c:
                for j in range(db + 1):
                    r[i + j] -= c * bq[j]
        return RatPoly(q), RatPoly(r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "RatPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def __call__(self, x):
        """Horner evaluation; x may be any ring element supporting * and +."""
        if not self.coeffs:
            return Fraction(0) * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        if not isinstance(acc, (int, Fraction)) or isinstance(x, (int, Fraction)):
            return acc
        return x * 0 + acc

    # derived operations -----------------------------------------------------
    def derivative(self) -> "RatPoly":
        return RatPoly([i * self.coeffs[i] for i in range(1, len(self.coeffs))])

    def monic(self) -> "RatPoly":
        if not self.coeffs:
            return self
        return self * (1 / self.lc)

    def compose(self, g: "RatPoly") -> "RatPoly":
        acc = RatPoly()
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def shift(self, c) -> "RatPoly":
        """f(x + c)."""
        return self.compose(RatPoly((c, 1)))

    def scale_var(self, lam) -> "RatPoly":
        """f(lam * x)."""
        lam = Fraction(lam)
        out, p = [], Fraction(1)
        for a in self.coeffs:
            out.append(a * p)
            p *= lam
        return RatPoly(out)

    def integer_numerators(self) -> tuple[list[int], int]:
        """(nums, d) with self = nums / d, d > 0 the lcm of denominators."""
        d = 1
        for c in self.coeffs:
            if c.denominator != 1:
                d = _lcm(d, c.denominator)
        return [int(c * d) for c in self.coeffs], d

    def content(self) -> Fraction:
        """Positive rational c with self / c primitive integral."""
        if not self.coeffs:
            return Fraction(0)
        nums, d = self.integer_numerators()
        g = 0
        for a in nums:
            g = math.gcd(g, a)
        return Fraction(g, d)

    def primitive_int(self) -> list[int]:
        """Primitive integer coefficient list with positive leading coefficient."""
        nums, _ = self.integer_numerators()
        g = 0
        for a in nums:
            g = math.gcd(g, a)
        s = 1 if nums[-1] > 0 else -1
        return [s * a // g for a in nums]

    @staticmethod
    def gcd(f: "RatPoly", g: "RatPoly") -> "RatPoly":
        """Monic gcd (the zero polynomial when both inputs vanish)."""
        a, b = f, g
        while not b.is_zero():
            a, b = b, a % b
            if b.degree > 0:
                b = RatPoly([c for c in b.primitive_int()]) if b.coeffs else b
        return a.monic()

    def is_squarefree(self) -> bool:
        return RatPoly.gcd(self, self.derivative()).degree == 0

    def squarefree_decomposition(self) -> list[tuple["RatPoly", int]]:
        """Yun's algorithm: monic squarefree coprime factors with multiplicities."""
        f = self.monic()
        out = []
        d = f.derivative()
        a = RatPoly.gcd(f, d)
        b = f.exact_div(a)
        c = d.exact_div(a) - b.derivative()
        i = 1
        while b.degree > 0:
            a = RatPoly.gcd(b, c)
            b2 = b.exact_div(a)
            if a.degree > 0:
                out.append((a, i))
            c = c.exact_div(a) - b2.derivative()
            b = b2
            i += 1
        return out


def int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of integer coefficient lists via Kronecker substitution."""
    if not a or not b:
        return []
    if len(a) < 8 or len(b) < 8:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    bound = ma * mb * min(len(a), len(b))
    k = bound.bit_length() + 2
    def pack(v):
        n = 0
        for x in reversed(v):
            n = (n << k) + x
        return n
    prod = pack(a) * pack(b)
    out = []
    mask = (1 << k) - 1
    half = 1 << (k - 1)
    for _ in range(len(a) + len(b) - 1):
        low = prod & mask
        prod >>= k
        if low >= half:
            low -= 1 << k
            prod += 1
        out.append(low)
    return out


def resultant(f: RatPoly, g: RatPoly) -> Fraction:
    """Res(f, g) by the Euclidean recurrence over Q."""
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    res = Fraction(1)
    a, b = f, g
    while True:
        m, n = a.degree, b.degree
        if n == 0:
            return res * b.lc ** m
        r = a % b
        if r.is_zero():
            return Fraction(0)
        if (m * n) % 2:
            res = -res
        res *= b.lc ** (m - r.degree)
        a, b = b, r


def poly_disc(f: RatPoly) -> Fraction:
    """Discriminant (-1)^{n(n-1)/2} Res(f, f') / lc(f)."""
    n = f.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lc
