"""Hurwitz zeta, log-gamma and Barnes double zeta derivatives at high precision.

Reals are mpmath ``mpf`` values; every routine takes an explicit ``prec`` in
bits, works internally with guard bits and returns a value rounded to
``prec``.  Only elementary mpmath operations are used here (exp, log,
arithmetic, Bernoulli numbers); the special-function evaluations are our own
Euler-Maclaurin sums, so mpmath's ``zeta``/``loggamma`` can serve as an
independent oracle in tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
from mpmath import mpf

from .exactnum import zeta_fml

GUARD_BITS = 40


class AccuracyError(ArithmeticError):
    """Requested precision cannot be met within the parameter caps."""


class PoleError(ValueError):
    pass


@dataclass(frozen=True)
class BigReal:
    """A binary float tagged with the precision it is valid to."""

    value: mpf
    prec: int

    def __post_init__(self):
        if self.prec < 64:
            raise ValueError("prec must be at least 64 bits")

    def _combine(self, other, op):
        if isinstance(other, BigReal):
            p = min(self.prec, other.prec)
            o = other.value
        else:
            p, o = self.prec, other
        with mpmath.workprec(p):
            return BigReal(+op(self.value, o), p)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return BigReal(-self.value, self.prec)

    def __float__(self):
        return float(self.value)

    def digits(self) -> int:
        return int(self.prec * math.log10(2))

    def to_string(self) -> str:
        return mpmath.nstr(self.value, max(self.digits() - 2, 15), strip_zeros=False)


@dataclass(frozen=True)
class EMParams:
    """Direct-summation count N and number of Bernoulli correction terms J."""

    N: int
    J: int

    def __post_init__(self):
        if self.N < 0 or self.J < 1:
            raise ValueError("invalid Euler-Maclaurin parameters")


def _to_mpf(x) -> mpf:
    if isinstance(x, BigReal):
        return x.value
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


# index -> (precision, B_index); entries are kept at the highest precision
# requested so far and rounded down on demand
_BERN_FLOAT: dict = {}


def _bern(k2: int, prec: int) -> mpf:
    hit = _BERN_FLOAT.get(k2)
    if hit is None or hit[0] < prec:
        with mpmath.workprec(prec + 64):
            hit = (prec + 64, mpmath.bernoulli(k2))
        _BERN_FLOAT[k2] = hit
    return hit[1]


@lru_cache(maxsize=4096)
def _fact(n: int) -> int:
    return math.factorial(n)


def _bern_over_fact(k2: int, prec: int) -> mpf:
    """B_{2k} / (2k)! at the given precision."""
    with mpmath.workprec(prec):
        return _bern(k2, prec) / _fact(k2)


def em_params(s: float, x: float, prec: int) -> EMParams:
    """Shift so that w = x + N clears the Bernoulli growth for this precision."""
    target = 0.12 * prec + abs(s) + 10
    n = max(0, math.ceil(target - x))
    return EMParams(N=n, J=max(1, int(0.6 * (x + n) * math.pi) + 2))


def hurwitz(s, x, deriv: int = 0, prec: int = 128, params: EMParams | None = None) -> mpf:
    """zeta_H(s, x) or its s-derivative, by Euler-Maclaurin summation."""
    if deriv not in (0, 1):
        raise ValueError("deriv must be 0 or 1")
    wp = prec + GUARD_BITS
    with mpmath.workprec(wp):
        s = _to_mpf(s)
        x = _to_mpf(x)
        if x <= 0:
            raise ValueError("x must be positive")
        if abs(s - 1) < mpf(2) ** (-prec // 2):
            raise PoleError("s too close to the pole at 1")
        p = params or em_params(float(s), float(x), wp)
        total = mpf(0)
        if deriv and s == 0:
            # sum of -log(x+n) is minus the log of one product
            prod = mpf(1)
            for n in range(p.N):
                prod *= x + n
            total = -mpmath.log(prod)
        else:
            for n in range(p.N):
                y = x + n
                t = mpmath.power(y, -s)
                total += -mpmath.log(y) * t if deriv else t
        w = x + p.N
        logw = mpmath.log(w)
        ws = mpmath.power(w, -s)
        lead = w * ws / (s - 1)
        if deriv:
            total += -logw * lead - w * ws / (s - 1) ** 2 - logw * ws / 2
        else:
            total += lead + ws / 2
        eps = mpf(2) ** (-wp)
        # (s)_{2k-1} and its s-derivative carried together
        poch, dpoch = s, mpf(1)
        wpow = ws / w  # w^{-s-1}
        winv2 = 1 / (w * w)
        prev = None
        for k in range(1, 10 * p.J + 50):
            c = _bern_over_fact(2 * k, wp)
            term = c * poch * wpow
            if deriv:
                term = c * (dpoch * wpow - logw * poch * wpow)
            total += term
            mag = abs(term)
            if mag < eps * (abs(total) + 1):
                break
            if prev is not None and mag > prev and k > 4:
                raise AccuracyError("Euler-Maclaurin tail diverged; raise N")
            prev = mag
            a, b = s + 2 * k - 1, s + 2 * k
            dpoch = dpoch * a * b + poch * (a + b)
            poch = poch * a * b
            wpow *= winv2
        else:
            raise AccuracyError("Euler-Maclaurin term cap reached")
    with mpmath.workprec(prec):
        return +total


def log_gamma(x, prec: int = 128) -> mpf:
    """log Gamma(x) for x > 0, as zeta_H'(0, x) + log(2 pi)/2."""
    wp = prec + 10
    with mpmath.workprec(wp):
        v = hurwitz(0, x, deriv=1, prec=wp) + mpmath.log(2 * mpmath.pi) / 2
    with mpmath.workprec(prec):
        return +v


def digamma(x, prec: int = 128) -> mpf:
    wp = prec + GUARD_BITS
    with mpmath.workprec(wp):
        x = _to_mpf(x)
        if x <= 0:
            raise ValueError("x must be positive")
        n = max(0, math.ceil(0.12 * wp + 10 - float(x)))
        total = mpf(0)
        for i in range(n):
            total -= 1 / (x + i)
        w = x + n
        total += mpmath.log(w) - 1 / (2 * w)
        winv2 = 1 / (w * w)
        wk = winv2
        eps = mpf(2) ** (-wp)
        for k in range(1, 4 * wp):
            term = _bern(2 * k, wp) / (2 * k) * wk
            total -= term
            if abs(term) < eps:
                break
            wk *= winv2
    with mpmath.workprec(prec):
        return +total


def barnes_zeta_value(m: int, a: Sequence, x: Sequence) -> Fraction:
    """Exact zeta(1 - m, a, x) for positive a; identical to the formal value."""
    if any(Fraction(ai) <= 0 for ai in a):
        raise ValueError("a must be positive")
    return zeta_fml(m, tuple(Fraction(ai) for ai in a), tuple(Fraction(xi) for xi in x))


def _barnes1_deriv0(a: mpf, z: mpf, prec: int) -> mpf:
    """d/ds at 0 of sum_m (z + m a)^(-s)."""
    with mpmath.workprec(prec):
        t = z / a
        return (t - mpf(1) / 2) * mpmath.log(a) + log_gamma(t, prec) - mpmath.log(2 * mpmath.pi) / 2


def _fixed(x: mpf, bits: int) -> int:
    return int(mpmath.nint(mpmath.ldexp(x, bits)))


def _odd_hurwitz_scaled(u: mpf, jmax: int, prec: int) -> list:
    """[u^j * zeta_H(j, u) for odd j = 3, 5, ..., jmax].

    The scaled values are O(1), so the shared summation pass runs in
    fixed-point integers with ``prec`` + 64 fractional bits.
    """
    js = list(range(3, jmax + 1, 2))
    if not js:
        return []
    pbits = prec * math.log(2) + 10
    # the EM remainder for zeta_H(j, w) bottoms out near
    # (2 pi w / j)^j exp(j - 2 pi w) relative; the worst case is j = jmax
    big = jmax + pbits
    while big - jmax - jmax * math.log(big / jmax) < pbits:
        big *= 1.1
    n = max(0, math.ceil(big / (2 * math.pi) + 2 - float(u)))
    fb = prec + 64
    one = 1 << fb
    with mpmath.workprec(fb + 32):
        qs = [_fixed(u / (u + i), fb) for i in range(n)]
        w = u + n
        vf = _fixed(u / w, fb)
        wf = _fixed(w, fb)
        winv = _fixed(1 / w, fb)
        rho = []
        for k in range(1, int(big) + 8):
            ratio = _bern(2 * k + 2, fb + 32) / (_bern(2 * k, fb + 32) * (2 * k + 1) * (2 * k + 2) * w * w)
            rho.append(_fixed(ratio, fb))
    acc = [0] * len(js)
    for q in qs:
        q2 = q * q >> fb
        p = q * q2 >> fb
        for t in range(len(js)):
            if not p:
                break
            acc[t] += p
            p = p * q2 >> fb
    v2 = vf * vf >> fb
    vj = vf * v2 >> fb
    for t, j in enumerate(js):
        bracket = one // 2 + wf // (j - 1)
        term = j * winv // 12
        prev = abs(term) + 1
        k = 1
        while abs(term) > 1 << 60:
            if abs(term) > prev:
                raise AccuracyError("odd Hurwitz table did not converge")
            bracket += term
            prev = abs(term)
            term = (term * rho[k - 1] >> fb) * ((j + 2 * k - 1) * (j + 2 * k))
            k += 1
        acc[t] += vj * bracket >> fb
        vj = vj * v2 >> fb
    return [mpmath.ldexp(mpf(a), -fb) for a in acc]


def _tail_terms(t: float, prec: int) -> int:
    """Bernoulli terms needed in the tail, where t = u / r = (z + M a2) / a2.

    Term k is roughly (2k)! / (2 pi t)^(2k); stop once it is below 2^-prec,
    or at the asymptotic minimum k ~ pi t.
    """
    target = -prec * math.log(2)
    x = 2 * math.pi * t
    for k in range(2, int(math.pi * t) + 12):
        if math.lgamma(2 * k + 1) - 2 * k * math.log(x) < target:
            return k + 2
    return int(math.pi * t) + 12


def _barnes2_deriv0(a1: mpf, a2: mpf, z: mpf, prec: int) -> mpf:
    """d/ds at 0 of sum_{m1,m2} (z + m1 a1 + m2 a2)^(-s), shift-and-tail."""
    wp = prec + GUARD_BITS
    with mpmath.workprec(wp):
        pbits = wp * math.log(2)
        r = a2 / a1
        shift = max(0, math.ceil((pbits + 10) / (2 * math.pi) - float(z / a2)))
        wp2 = wp + max(0, int(math.log2(shift + 1))) + 8
    with mpmath.workprec(wp2):
        head = mpf(0)
        for m in range(shift):
            head += _barnes1_deriv0(a1, z + m * a2, wp2)
        u = (z + shift * a2) / a1
        la = mpmath.log(a1)
        zm1 = -(u * u - u + mpf(1) / 6) / 2  # zeta_H(-1, u) = -B_2(u)/2
        dzm1 = hurwitz(-1, u, deriv=1, prec=wp2)
        tail = (a1 / a2) * (la * zm1 - dzm1 - zm1)
        z0 = mpf(1) / 2 - u
        dz0 = hurwitz(0, u, deriv=1, prec=wp2)
        tail += (-la * z0 + dz0) / 2
        tail += (r / 12) * (-digamma(u, wp2) - la)
        kmax = _tail_terms(float(u / r), wp2)
        table = _odd_hurwitz_scaled(u, 2 * kmax - 1, wp2)
        eps = mpf(2) ** (-wp2)
        ratio = r / u
        rpow = ratio ** 3
        r2 = ratio * ratio
        prev = None
        for k in range(2, kmax + 1):
            term = _bern(2 * k, wp2) * rpow * table[k - 2] / (2 * k * (2 * k - 1))
            tail += term
            mag = abs(term)
            if mag < eps:
                break
            if prev is not None and mag > prev and k > 4:
                raise AccuracyError("double-gamma tail reached its asymptotic floor")
            prev = mag
            rpow *= r2
        total = head + tail
    with mpmath.workprec(prec):
        return +total


def barnes_deriv0(a: Sequence, x: Sequence, prec: int = 128, canonical_order: bool = True) -> mpf:
    """zeta'(0, a, x.a) for one or two positive periods a and x_i in (0, 1].

    ``canonical_order`` puts the smaller period first; passing False keeps the
    given order, which the swap-symmetry tests use as a second route.
    """
    if len(a) != len(x) or not 1 <= len(a) <= 2:
        raise ValueError("need one or two periods with matching x")
    wp = prec + GUARD_BITS
    with mpmath.workprec(wp):
        av = [_to_mpf(ai) for ai in a]
        xv = [_to_mpf(xi) for xi in x]
        if any(ai <= 0 for ai in av):
            raise ValueError("periods must be positive")
        z = sum((xi * ai for xi, ai in zip(xv, av)), mpf(0))
        if z <= 0:
            raise ValueError("z must be positive")
        if len(av) == 1:
            out = _barnes1_deriv0(av[0], z, wp)
        else:
            a1, a2 = av
            if canonical_order and a2 < a1:
                a1, a2 = a2, a1
            out = _barnes2_deriv0(a1, a2, z, wp)
    with mpmath.workprec(prec):
        return +out


def log_double_gamma(z, a1, a2, prec: int = 128) -> mpf:
    """log Gamma(z, (a1, a2)) for a bare z > 0, without the (a, x) pairing."""
    wp = prec + GUARD_BITS
    with mpmath.workprec(wp):
        a1, a2, z = _to_mpf(a1), _to_mpf(a2), _to_mpf(z)
        if a2 < a1:
            a1, a2 = a2, a1
        out = _barnes2_deriv0(a1, a2, z, wp)
    with mpmath.workprec(prec):
        return +out
