"""Exact arithmetic in real quadratic fields Q(sqrt d).

Elements are pairs of rationals (p, q) standing for p + q*sqrt(d).  The two
real embeddings send sqrt(d) to +sqrt(d) and -sqrt(d); they are numbered 1 and
2.  Fractional ideals are only supported for fields of narrow class number one,
where every ideal has a totally positive generator.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from numbers import Rational
from typing import Iterator

import mpmath


class UnsupportedFieldError(ValueError):
    pass


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def _sign_of_sqrt_combo(p: Fraction, q: Fraction, d: int) -> int:
    """Sign of p + q*sqrt(d), decided exactly."""
    if q == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return (q > 0) - (q < 0)
    if (p > 0) == (q > 0):
        return 1 if p > 0 else -1
    # opposite signs: compare p^2 with q^2 d
    lhs, rhs = p * p, q * q * d
    if lhs == rhs:
        return 0
    dominant = p if lhs > rhs else q
    return 1 if dominant > 0 else -1


class QuadElem:
    """Exact element p + q*sqrt(d); immutable."""

    __slots__ = ("d", "p", "q")

    def __init__(self, d: int, p=0, q=0):
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "p", Fraction(p))
        object.__setattr__(self, "q", Fraction(q))

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    def _coerce(self, other) -> QuadElem | None:
        if isinstance(other, QuadElem):
            if other.d != self.d:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Rational)):
            return QuadElem(self.d, other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.d, self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.d, -self.p, -self.q)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.d, self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, QuadElem):
            return QuadElem(self.d, self.p * other, self.q * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.d, self.p * o.p + self.d * self.q * o.q, self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def conj(self) -> QuadElem:
        return QuadElem(self.d, self.p, -self.q)

    def norm(self) -> Fraction:
        return self.p * self.p - self.d * self.q * self.q

    def trace(self) -> Fraction:
        return 2 * self.p

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElem(self.d, self.p / n, -self.q / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, QuadElem):
            return QuadElem(self.d, self.p / other, self.q / other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = QuadElem(self.d, 1, 0)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, float) else None
        if o is None:
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.d, self.p, self.q))

    def __bool__(self):
        return bool(self.p) or bool(self.q)

    def is_rational(self) -> bool:
        return self.q == 0

    def sign(self, which: int) -> int:
        """Exact sign under embedding 1 or 2."""
        q = self.q if which == 1 else -self.q
        return _sign_of_sqrt_combo(self.p, q, self.d)

    def __repr__(self):
        if self.q == 0:
            return f"QuadElem({self.p})"
        return f"QuadElem({self.p} + {self.q}*sqrt({self.d}))"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        sgn = "+" if self.q > 0 else "-"
        q = abs(self.q)
        qs = "" if q == 1 else f"{q}*"
        if self.p == 0:
            return f"{'-' if self.q < 0 else ''}{qs}sqrt({self.d})"
        return f"{self.p} {sgn} {qs}sqrt({self.d})"


def compare_embedded(a: QuadElem, b: QuadElem, which: int = 1) -> int:
    """Exact comparison of iota_which(a) with iota_which(b)."""
    return (a - b).sign(which)


def is_totally_positive(e: QuadElem) -> bool:
    if not e:
        raise ValueError("zero is neither totally positive nor negative")
    return e.sign(1) > 0 and e.sign(2) > 0


def embed(e: QuadElem, which: int, prec: int) -> mpmath.mpf:
    """iota_which(e) correctly rounded to ``prec`` bits."""
    if which not in (1, 2):
        raise ValueError("embedding index must be 1 or 2")
    with mpmath.workprec(prec + 32):
        root = mpmath.sqrt(e.d)
        if which == 2:
            root = -root
        val = mpmath.mpf(e.p.numerator) / e.p.denominator + mpmath.mpf(e.q.numerator) / e.q.denominator * root
    with mpmath.workprec(prec):
        return +val


# ------------------------------------------------------------ class numbers


def _reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """Primitive reduced indefinite forms (a, b, c) of discriminant disc."""
    r = isqrt(disc)
    forms = []
    for b in range(1, r + 1):
        if (b - disc) % 2:
            continue
        prod = (disc - b * b) // 4  # equals -a*c > 0
        if prod <= 0:
            continue
        for a_abs in range(1, prod + 1):
            if prod % a_abs:
                continue
            # sqrt(D) - b < 2|a| < sqrt(D) + b, with strictness handled by integers
            two_a = 2 * a_abs
            if not (_lt_sqrt_plus(disc, -b, two_a) and _gt_sqrt_plus(disc, b, two_a)):
                continue
            c_abs = prod // a_abs
            for sa in (1, -1):
                a, c = sa * a_abs, -sa * c_abs
                if gcd(gcd(a_abs, b), c_abs) == 1:
                    forms.append((a, b, c))
    return forms


def _lt_sqrt_plus(disc: int, t: int, v: int) -> bool:
    """sqrt(disc) + t < v, exactly (disc not a square)."""
    w = v - t
    return w > 0 and w * w > disc


def _gt_sqrt_plus(disc: int, t: int, v: int) -> bool:
    """sqrt(disc) + t > v."""
    w = v - t
    return w < 0 or w * w < disc


def _rho(form: tuple[int, int, int], disc: int) -> tuple[int, int, int]:
    a, b, c = form
    m = 2 * abs(c)
    r = isqrt(disc)
    # b' = -b mod 2|c| with sqrt(D) - 2|c| < b' < sqrt(D)
    b2 = (-b) % m
    # shift into the window; r < sqrt(D) < r+1 so b' <= r works for the top
    b2 += ((r - b2) // m) * m
    while not _gt_sqrt_plus(disc, 0, b2):
        b2 -= m
    c2 = (b2 * b2 - disc) // (4 * c)
    return (c, b2, c2)


def narrow_class_number(disc: int) -> int:
    """Number of SL2(Z)-classes of primitive forms of discriminant disc > 0."""
    forms = set(_reduced_forms(disc))
    seen: set = set()
    cycles = 0
    for f in sorted(forms):
        if f in seen:
            continue
        cycles += 1
        g = f
        while g not in seen:
            seen.add(g)
            g = _rho(g, disc)
    return cycles


# ------------------------------------------------------------------ fields


def _cf_convergents(d: int, P: int, Q: int) -> Iterator[tuple[int, int]]:
    """Convergents of (P + sqrt d)/Q; requires Q | d - P^2."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = _floor_quadratic(P, Q, d)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield h1, k1
        P = a * Q - P
        Q = (d - P * P) // Q


def _floor_quadratic(P: int, Q: int, d: int) -> int:
    r = isqrt(d)
    guess = (P + r) // Q if Q > 0 else (P + r + 1) // Q
    # correct by exact comparison of (P + sqrt d)/Q against guess and guess + 1
    while _sign_of_sqrt_combo(Fraction(P - guess * Q), Fraction(1), d) * (1 if Q > 0 else -1) < 0:
        guess -= 1
    while _sign_of_sqrt_combo(Fraction(P - (guess + 1) * Q), Fraction(1), d) * (1 if Q > 0 else -1) >= 0:
        guess += 1
    return guess


class QuadField:
    """Real quadratic field of narrow class number one."""

    def __init__(self, d: int, check_narrow: bool = True):
        if not is_squarefree(d) or d < 2:
            raise ValueError(f"d = {d} must be a squarefree integer > 1")
        self.d = d
        self.disc = d if d % 4 == 1 else 4 * d
        self.omega = QuadElem(d, Fraction(1, 2), Fraction(1, 2)) if d % 4 == 1 else QuadElem(d, 0, 1)
        self.fundamental_unit = self._fundamental_unit()
        self.unit_norm = int(self.fundamental_unit.norm())
        self.totally_positive_unit = self.fundamental_unit if self.unit_norm == 1 else self.fundamental_unit ** 2
        self.narrow_class_number = narrow_class_number(self.disc)
        self._log_unit_cache: dict = {}
        if check_narrow and self.narrow_class_number != 1:
            raise UnsupportedFieldError(
                f"Q(sqrt {d}) has narrow class number {self.narrow_class_number}; only 1 is supported")

    def __repr__(self):
        return f"QuadField({self.d})"

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadField", self.d))

    def elem(self, p=0, q=0) -> QuadElem:
        return QuadElem(self.d, p, q)

    def from_omega(self, x: int, y: int) -> QuadElem:
        return self.elem(x) + self.omega * y

    def to_omega(self, e: QuadElem) -> tuple[Fraction, Fraction]:
        """Coordinates of e in the basis (1, omega)."""
        if self.d % 4 == 1:
            return e.p - e.q, 2 * e.q
        return e.p, e.q

    def is_integral(self, e: QuadElem) -> bool:
        x, y = self.to_omega(e)
        return x.denominator == 1 and y.denominator == 1

    def omega_coords(self, e: QuadElem) -> tuple[int, int]:
        x, y = self.to_omega(e)
        if x.denominator != 1 or y.denominator != 1:
            raise ValueError(f"{e} is not integral")
        return int(x), int(y)

    def _fundamental_unit(self) -> QuadElem:
        d = self.d
        if d % 4 == 1:
            # x + y*omega is a unit iff x/y approximates -omega' = (sqrt d - 1)/2
            conv = _cf_convergents(d, -1, 2)
        else:
            conv = _cf_convergents(d, 0, 1)
        for x, y in conv:
            if y <= 0:
                continue
            u = self.from_omega(x, y) if d % 4 == 1 else self.elem(x, y)
            if abs(u.norm()) == 1 and u.sign(1) > 0 and compare_embedded(u, self.elem(1)) > 0:
                return u
        raise AssertionError("unreachable")

    def log_unit(self, which: int, prec: int) -> mpmath.mpf:
        """log iota_which of the totally positive fundamental unit."""
        key = (which, prec)
        cache = self._log_unit_cache
        if key not in cache:
            with mpmath.workprec(prec + 16):
                val = mpmath.log(embed(self.totally_positive_unit, which, prec + 16))
            with mpmath.workprec(prec):
                cache[key] = +val
        return cache[key]

    def make_totally_positive(self, g: QuadElem) -> QuadElem:
        """Multiply by a unit so that the result is totally positive."""
        if not g:
            raise ValueError("zero generator")
        for u in (self.elem(1), self.elem(-1), self.fundamental_unit, -self.fundamental_unit):
            h = g * u
            if is_totally_positive(h):
                return h
        raise UnsupportedFieldError("no totally positive generator; narrow class number is not one")

    def canonical_generator(self, g: QuadElem) -> QuadElem:
        """Totally positive associate of g balancing its two embeddings.

        Among g * eps_plus^k pick the k minimising |log iota_1 - log iota_2|,
        ties going to the smaller k.  Decided exactly through the ratio
        g / g' compared against 1.
        """
        g = self.make_totally_positive(g)
        eps = self.totally_positive_unit
        eps2 = eps * eps

        def badness_cmp(h1: QuadElem, h2: QuadElem) -> int:
            # compare max(t, 1/t) for t = h/h' at embedding 1; all positive
            t1, t2 = h1 / h1.conj(), h2 / h2.conj()
            m1 = t1 if compare_embedded(t1, self.elem(1)) >= 0 else t1.inverse()
            m2 = t2 if compare_embedded(t2, self.elem(1)) >= 0 else t2.inverse()
            return compare_embedded(m1, m2)

        h = g
        # ratio g/g' scales by eps^2 per step; walk downhill
        while True:
            down, up = h * eps.inverse(), h * eps
            if badness_cmp(down, h) <= 0:
                h = down  # ties favour the smaller exponent
                continue
            if badness_cmp(up, h) < 0:
                h = up
                continue
            return h

    def ideal(self, g) -> QuadIdeal:
        if not isinstance(g, QuadElem):
            g = self.elem(g)
        return QuadIdeal(self, g)

    def unit_ideal(self) -> QuadIdeal:
        return self.ideal(1)


class QuadIdeal:
    """Fractional ideal (g) held by its canonical totally positive generator."""

    __slots__ = ("field", "generator")

    def __init__(self, field: QuadField, g: QuadElem):
        if not g:
            raise ValueError("zero ideal")
        self.field = field
        self.generator = field.canonical_generator(g)

    def __eq__(self, other):
        return isinstance(other, QuadIdeal) and self.field == other.field and self.generator == other.generator

    def __hash__(self):
        return hash(("QuadIdeal", self.field.d, self.generator))

    def __mul__(self, other):
        if isinstance(other, QuadIdeal):
            return QuadIdeal(self.field, self.generator * other.generator)
        if isinstance(other, (QuadElem, int, Fraction)):
            return QuadIdeal(self.field, self.generator * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> QuadIdeal:
        return QuadIdeal(self.field, self.generator.inverse())

    def norm(self) -> Fraction:
        return abs(self.generator.norm())

    def is_integral(self) -> bool:
        return self.field.is_integral(self.generator)

    def contains(self, z: QuadElem) -> bool:
        return self.field.is_integral(z / self.generator)

    def divides(self, other: QuadIdeal) -> bool:
        """self | other, i.e. other is contained in self."""
        return self.contains(other.generator)

    def __repr__(self):
        return f"({self.generator})"


def make_field(d: int) -> QuadField:
    return QuadField(d)


def log_iota(a: QuadIdeal, which: int, prec: int) -> mpmath.mpf:
    """log of iota_which applied to the canonical totally positive generator."""
    with mpmath.workprec(prec + 16):
        val = mpmath.log(embed(a.generator, which, prec + 16))
    with mpmath.workprec(prec):
        return +val


def lattice_index(vectors: list[tuple[int, int]]) -> int:
    """Index in Z^2 of the lattice spanned by integer vectors (0 if degenerate)."""
    g = 0
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            (a, b), (c, e) = vectors[i], vectors[j]
            g = gcd(g, a * e - b * c)
    return g


def hnf2(v1: tuple[int, int], v2: tuple[int, int]) -> tuple[int, int, int]:
    """Basis {(A, 0), (B, C)} of the full-rank lattice spanned by v1, v2.

    Returns (A, B, C) with A, C > 0 and 0 <= B < A.
    """
    (x1, y1), (x2, y2) = v1, v2
    if y1 == 0 and y2 == 0:
        raise ValueError("degenerate lattice")
    c, s, t = _xgcd(y1, y2)
    bx = s * x1 + t * x2
    ax = (y2 // c) * x1 - (y1 // c) * x2
    a = abs(ax)
    if a == 0:
        raise ValueError("degenerate lattice")
    return a, bx % a, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
