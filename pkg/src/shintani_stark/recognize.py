"""Lattice reduction and algebraicity recognition.

LLL runs in exact integer arithmetic (the integral variant that tracks
Gram-Schmidt data as scaled integers), so the Lovasz condition is decided
without rounding.  Recognition results are three-valued: a relation was
found, none exists within the bounds, or the precision is too low to tell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import mpf

FOUND = "found"
NONE = "none"
INCONCLUSIVE = "inconclusive"


class DependentBasisError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    basis: tuple

    def __post_init__(self):
        b = tuple(tuple(int(x) for x in v) for v in self.basis)
        object.__setattr__(self, "basis", b)
        if b and len({len(v) for v in b}) != 1:
            raise ValueError("basis vectors must have equal length")

    def __len__(self):
        return len(self.basis)


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def lll(lat: Lattice, delta: Fraction = Fraction(3, 4)) -> Lattice:
    """delta-LLL reduction with integer Gram-Schmidt bookkeeping."""
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    b = [list(v) for v in lat.basis]
    n = len(b)
    if n == 0:
        return lat
    # d[i] = prod_{j<i} |b*_j|^2 (d[0] = 1); lam[i][j] = d[j+1] * mu_ij
    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]

    def gs_row(k: int):
        for j in range(k + 1):
            u = _dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise DependentBasisError("basis vectors are linearly dependent")
                d[k + 1] = u

    def red(k: int, l: int):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k: int):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k + 1]
        d[k] = B

    gs_row(0)
    k, kmax = 1, 0
    num, den = delta.numerator, delta.denominator
    while k < n:
        if k > kmax:
            kmax = k
            gs_row(k)
        red(k, k - 1)
        # Lovasz: d_{k+1} d_{k-1} >= (delta d_k^2 - lam^2) scaled to integers
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return Lattice(tuple(tuple(v) for v in b))


def gram_schmidt(lat: Lattice) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Exact squared norms |b*_i|^2 and coefficients mu_ij."""
    b = lat.basis
    n = len(b)
    star: list[list[Fraction]] = []
    norms: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in b[i]]
        for j in range(i):
            mu[i][j] = sum(Fraction(x) * y for x, y in zip(b[i], star[j])) / norms[j]
            v = [a - mu[i][j] * c for a, c in zip(v, star[j])]
        star.append(v)
        norms.append(sum(x * x for x in v))
    return norms, mu


def is_lll_reduced(lat: Lattice, delta: Fraction = Fraction(3, 4)) -> bool:
    norms, mu = gram_schmidt(lat)
    n = len(norms)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    return all(norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1] for k in range(1, n))


# --------------------------------------------------------- integer relations


@dataclass(frozen=True)
class RelationResult:
    status: str
    relation: tuple | None = None
    residual: mpf | None = None

    @property
    def found(self) -> bool:
        return self.status == FOUND


def _normalize_sign(v: Sequence[int]) -> tuple:
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def integer_relation(xs: Sequence, max_coeff: int, prec: int) -> RelationResult:
    """Small m with sum m_i x_i ~ 0, via LLL on the standard embedding lattice."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two numbers")
    if prec < 128:
        raise ValueError("prec must be at least 128 bits")
    # a relation with coefficients below H among n reals is only
    # meaningful if prec comfortably exceeds n log2 H
    needed = n * math.log2(max(max_coeff, 2)) + 32
    with mpmath.workprec(prec + 20):
        vals = [mpf(x) for x in xs]
        scale_bits = prec - 16
        col = [int(mpmath.nint(mpmath.ldexp(v, scale_bits))) for v in vals]
        basis = []
        for i in range(n):
            row = [0] * n + [col[i]]
            row[i] = 1
            basis.append(tuple(row))
        red = lll(Lattice(tuple(basis)), Fraction(99, 100))
        tol = mpf(2) ** (-(prec // 2))
        best = None
        for v in red.basis:
            m = v[:n]
            if not any(m) or max(abs(x) for x in m) > max_coeff:
                continue
            res = abs(mpmath.fsum(mi * xi for mi, xi in zip(m, vals)))
            scale = max(abs(x) for x in vals) or mpf(1)
            if res < tol * scale:
                if best is None or max(map(abs, m)) < max(map(abs, best[0])):
                    best = (_normalize_sign(m), res)
        if best is not None:
            # a short vector is only evidence of a true relation when the
            # precision exceeds what its own height could fit by chance
            if prec >= n * math.log2(max(max(map(abs, best[0])), 2)) + 32:
                return RelationResult(FOUND, best[0], best[1])
            return RelationResult(INCONCLUSIVE)
    if prec < needed:
        return RelationResult(INCONCLUSIVE)
    return RelationResult(NONE)


@dataclass(frozen=True)
class AlgdepResult:
    poly: tuple
    residual: mpf
    height: int
    verified_prec: int

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def constant_term(self) -> int:
        return self.poly[0]

    def leading(self) -> int:
        return self.poly[-1]

    def is_unit_poly(self) -> bool:
        """Monic up to sign with constant term +-1."""
        return abs(self.poly[-1]) == 1 and abs(self.poly[0]) == 1


@dataclass(frozen=True)
class AlgdepOutcome:
    status: str
    result: AlgdepResult | None = None
    trace: tuple = ()


def _poly_eval(coeffs: Sequence[int], x: mpf) -> mpf:
    acc = mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _content_reduce(coeffs: Sequence[int]) -> tuple:
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    if g > 1:
        coeffs = [c // g for c in coeffs]
    if coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def algdep(x, max_deg: int, max_height: int, prec: int,
           recompute: Callable[[int], mpf] | None = None) -> AlgdepOutcome:
    """Lowest-degree integer polynomial vanishing at x within the bounds.

    ``recompute(bits)`` re-evaluates x at a higher precision; a candidate is
    accepted only if it still vanishes at twice the search precision.
    """
    trace = []
    any_inconclusive = False
    with mpmath.workprec(prec + 20):
        xv = mpf(x)
        for deg in range(1, max_deg + 1):
            powers = [xv ** k for k in range(deg + 1)]
            rel = integer_relation(powers, max_height, prec)
            trace.append((deg, rel.status))
            if rel.status == INCONCLUSIVE:
                any_inconclusive = True
                continue
            if not rel.found:
                continue
            coeffs = list(rel.relation)
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
            if len(coeffs) < 2:
                continue
            coeffs = _content_reduce(coeffs)
            vprec = 2 * prec
            if recompute is not None:
                with mpmath.workprec(vprec + 20):
                    xh = mpf(recompute(vprec))
                    resid = abs(_poly_eval(coeffs, xh))
            else:
                vprec = prec
                resid = abs(_poly_eval(coeffs, xv))
            height = max(abs(c) for c in coeffs)
            bound = mpf(2) ** (-0.9 * vprec) * height * len(coeffs) * max(mpf(1), abs(xv)) ** (len(coeffs) - 1)
            if resid < bound:
                return AlgdepOutcome(FOUND, AlgdepResult(coeffs, resid, height, vprec), tuple(trace))
            trace.append((deg, "rejected-on-verification"))
    return AlgdepOutcome(INCONCLUSIVE if any_inconclusive else NONE, None, tuple(trace))


def rational_reconstruct(x, max_den: int) -> Fraction | None:
    """Convergent p/q of x with q <= max_den and |x - p/q| < 1/(2 q max_den)."""
    xv = mpf(x)
    best = None
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    rem = xv
    for _ in range(200):
        a = int(mpmath.floor(rem))
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_den:
            break
        cand = Fraction(h1, k1)
        if abs(xv - mpf(h1) / k1) < mpf(1) / (2 * k1 * max_den):
            best = cand
            break
        frac = rem - a
        if frac == 0:
            break
        rem = 1 / frac
    return best
