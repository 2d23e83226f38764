"""Exact rational kernel: Bernoulli polynomials and formal multiple zeta values.

The formal multiple zeta value of a point ``1 - m`` is the rational function

    (-1)^r (m-1)! * sum_{|l| = m+r-1} prod_i B_{l_i}(x_i) a_i^(l_i - 1) / l_i!

of the parameters ``a`` (nonzero) and ``x``.  Evaluation is generic over any
exact field whose elements support ``+``, ``*`` and ``/`` together with rational
scalars, so the same code serves plain :class:`fractions.Fraction` inputs and
real quadratic field elements.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Any, Iterator, Sequence

DEFAULT_MAX_INDEX = 64

IDENTITY_NAMES = ("ABZ1", "ABZ2", "ABZ3", "ABZ4", "ABZ5", "ABZ6", "ABZ7", "PRP")


class CapacityError(ValueError):
    """Requested Bernoulli index is beyond the configured cache bound."""


class ResampleSignal(ZeroDivisionError):
    """Randomly drawn arguments hit a forbidden zero; draw again."""


class BernoulliCache:
    """Bernoulli numbers B_0..B_max with the convention B_1 = -1/2."""

    def __init__(self, max_index: int = DEFAULT_MAX_INDEX):
        if max_index < 1:
            raise ValueError("max_index must be positive")
        self.max_index = max_index
        table = [Fraction(1)]
        for n in range(1, max_index + 1):
            # sum_{k<=n} C(n+1, k) B_k = 0
            acc = sum(comb(n + 1, k) * table[k] for k in range(n))
            table.append(-acc / (n + 1))
        self.table: tuple[Fraction, ...] = tuple(table)

    def number(self, l: int) -> Fraction:
        if l < 0:
            raise ValueError("negative Bernoulli index")
        if l > self.max_index:
            raise CapacityError(f"Bernoulli index {l} exceeds cache bound {self.max_index}")
        return self.table[l]

    def poly(self, l: int, x) -> Any:
        """B_l(x) = sum_k C(l, k) B_k x^(l-k)."""
        if l > self.max_index:
            raise CapacityError(f"Bernoulli index {l} exceeds cache bound {self.max_index}")
        # Horner in x with coefficients C(l, k) B_k for descending powers
        acc = Fraction(0)
        for k in range(l + 1):
            acc = acc * x + comb(l, k) * self.table[k]
        return acc


_DEFAULT_CACHE = BernoulliCache()


def bernoulli_number(l: int, cache: BernoulliCache | None = None) -> Fraction:
    return (cache or _DEFAULT_CACHE).number(l)


def bernoulli_poly(l: int, x, cache: BernoulliCache | None = None):
    """Exact B_l(x); B_1(x) = x - 1/2."""
    if l < 0:
        raise ValueError("negative Bernoulli index")
    return (cache or _DEFAULT_CACHE).poly(l, Fraction(x) if isinstance(x, int) else x)


@dataclass(frozen=True)
class FmlArgs:
    """Arguments of a formal zeta value at the point 1 - m."""

    m: int
    a: tuple = ()
    x: tuple = ()

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if len(self.a) != len(self.x):
            raise ValueError("a and x must have equal length")
        if any(ai == 0 for ai in self.a):
            raise ValueError("a must not contain zero entries")


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _int_power(a, e: int):
    if e >= 0:
        return a ** e
    return 1 / (a ** (-e))


def zeta_fml(m: int, a: Sequence = (), x: Sequence = (), cache: BernoulliCache | None = None):
    """Formal multiple zeta value at 1 - m with parameters ``a`` and ``x``.

    With an empty parameter vector the only admissible index tuple is the
    empty one, present exactly when m = 1; the value is then 1, else 0.
    """
    args = FmlArgs(m, tuple(a), tuple(x))
    cache = cache or _DEFAULT_CACHE
    r = len(args.a)
    total = m + r - 1
    if r == 0:
        return Fraction(1) if m == 1 else Fraction(0)
    bern = [[bernoulli_poly(l, xi, cache) / factorial(l) for l in range(total + 1)] for xi in args.x]
    pows = [{} for _ in range(r)]
    acc: Any = Fraction(0)
    for ls in compositions(total, r):
        term: Any = Fraction(1)
        for i, l in enumerate(ls):
            b = bern[i][l]
            if b == 0:
                term = None
                break
            p = pows[i].get(l)
            if p is None:
                p = pows[i][l] = _int_power(args.a[i], l - 1)
            term = term * b * p if not isinstance(term, Fraction) else p * (term * b)
        if term is not None:
            acc = acc + term
    sign = -1 if r % 2 else 1
    return acc * (sign * factorial(m - 1))


def zeta_fml_args(args: FmlArgs, cache: BernoulliCache | None = None):
    return zeta_fml(args.m, args.a, args.x, cache)


# ---------------------------------------------------------------- identities


def _z(m, a, x):
    return zeta_fml(m, a, x)


def _abz1(m, a, x):
    lhs = _z(m, a, x)
    rhs = -_z(m, (-a[0],) + tuple(a[1:]), (1 - x[0],) + tuple(x[1:]))
    return lhs == rhs


def _abz2(m, a, x):
    rest_a, rest_x = tuple(a[1:]), tuple(x[1:])
    lhs = _z(m, a, (Fraction(0),) + rest_x)
    rhs = _z(m, a, (Fraction(1),) + rest_x) + _z(m, rest_a, rest_x)
    return lhs == rhs


def _abz3(m, a, x, n):
    # splitting the first summation index modulo n shifts x_1 to (x_1 + h)/n
    lhs = _z(m, a, x)
    na = (n * a[0],) + tuple(a[1:])
    rhs = sum((_z(m, na, ((x[0] + h) / n,) + tuple(x[1:])) for h in range(n)), Fraction(0))
    return lhs == rhs


def _abz4(m, a, x):
    a1, a2, ar = a[0], a[1], tuple(a[2:])
    x1, x2, xr = x[0], x[1], tuple(x[2:])
    rhs = _z(m, (a1, a1 + a2) + ar, (x1 - x2 + 1, x2) + xr) + _z(m, (a1 + a2, a2) + ar, (x1, x2 - x1) + xr)
    return _z(m, a, x) == rhs


def _abz5(m, a, x):
    a1, a2, ar = a[0], a[1], tuple(a[2:])
    x1, x2, xr = x[0], x[1], tuple(x[2:])
    rhs = _z(m, (a1, a1 + a2) + ar, (x1 - x2, x2) + xr) + _z(m, (a1 + a2, a2) + ar, (x1, x2 - x1 + 1) + xr)
    return _z(m, a, x) == rhs


def _abz6(m, a, x):
    a1, a2, ar = a[0], a[1], tuple(a[2:])
    t, xr = x[0], tuple(x[2:])
    lhs = _z(m, a, (t, t) + xr)
    rhs = (_z(m, (a1, a1 + a2) + ar, (Fraction(1), t) + xr)
           + _z(m, (a1 + a2, a2) + ar, (t, Fraction(1)) + xr)
           + _z(m, (a1 + a2,) + ar, (t,) + xr))
    return lhs == rhs


def _abz7(m, a, x):
    xr = tuple(x[1:])
    one = (Fraction(1),) + xr
    total = _z(m, a, one) + _z(m, (-a[0],) + tuple(a[1:]), one) + _z(m, tuple(a[1:]), xr)
    return total == 0


def prp_sides(a, a2, b, b2):
    """Both sides of the product-difference expansion, exactly.

    Raises ResampleSignal when some a_i/a_j - a'_i/a'_j vanishes.
    """
    t = len(a)
    lhs = Fraction(1)
    rhs_prod = Fraction(1)
    for i in range(t):
        lhs *= a[i] * b[i]
        rhs_prod *= a2[i] * b2[i]
    lhs = lhs - rhs_prod
    rhs = Fraction(0)
    for i in range(t):
        num = Fraction(1)
        for j in range(t):
            num *= a[i] * b[j] - a2[i] * b2[j]
        den = Fraction(1)
        for j in range(t):
            if j == i:
                continue
            d = a[i] / a[j] - a2[i] / a2[j]
            if d == 0:
                raise ResampleSignal("vanishing denominator")
            den *= d
        rhs += num / den
    return lhs, rhs


def _prp(a, a2, b, b2):
    lhs, rhs = prp_sides(a, a2, b, b2)
    return lhs == rhs


def check_identity(name: str, args: dict) -> bool:
    """Evaluate both sides of a named identity exactly and compare."""
    if name == "PRP":
        return _prp(args["a"], args["a2"], args["b"], args["b2"])
    m, a, x = args["m"], tuple(args["a"]), tuple(args["x"])
    if name == "ABZ1":
        return _abz1(m, a, x)
    if name == "ABZ2":
        return _abz2(m, a, x)
    if name == "ABZ3":
        return _abz3(m, a, x, args["n"])
    if name == "ABZ4":
        return _abz4(m, a, x)
    if name == "ABZ5":
        return _abz5(m, a, x)
    if name == "ABZ6":
        return _abz6(m, a, x)
    if name == "ABZ7":
        return _abz7(m, a, x)
    raise ValueError(f"unknown identity {name!r}")


# ------------------------------------------------------------ random inputs


@dataclass
class IdentitySampler:
    """Seeded generator of exact random arguments for the identity suite."""

    seed: int = 20240601
    bound: int = 100
    max_m: int = 3
    max_r: int = 3
    rng: random.Random = field(init=False)

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    def rational(self, nonzero: bool = False) -> Fraction:
        while True:
            q = Fraction(self.rng.randint(-self.bound, self.bound), self.rng.randint(1, self.bound))
            if q or not nonzero:
                return q

    def draw(self, name: str) -> dict:
        rng = self.rng
        if name == "PRP":
            t = rng.randint(1, 4)
            vec = lambda: tuple(self.rational(nonzero=True) for _ in range(t))
            return {"a": vec(), "a2": vec(), "b": vec(), "b2": vec()}
        min_r = 2 if name in ("ABZ4", "ABZ5", "ABZ6") else 1
        r = rng.randint(min_r, self.max_r)
        m = rng.randint(1, self.max_m)
        a = [self.rational(nonzero=True) for _ in range(r)]
        if name in ("ABZ4", "ABZ5", "ABZ6"):
            while a[0] + a[1] == 0:
                a[1] = self.rational(nonzero=True)
        x = [self.rational() for _ in range(r)]
        if name == "ABZ6":
            x[1] = x[0]
        out = {"m": m, "a": tuple(a), "x": tuple(x)}
        if name == "ABZ3":
            out["n"] = rng.randint(1, 5)
        return out


def run_identity_suite(name: str, count: int = 1000, seed: int = 20240601) -> tuple[int, int]:
    """Check ``count`` random instances; returns (passed, total)."""
    sampler = IdentitySampler(seed=seed)
    passed = total = 0
    while total < count:
        args = sampler.draw(name)
        try:
            ok = check_identity(name, args)
        except ResampleSignal:
            continue
        total += 1
        passed += bool(ok)
    return passed, total
