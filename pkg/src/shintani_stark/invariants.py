"""G, W, V and X invariants of ray classes for real quadratic fields.

X(c, iota) = G + W + V is computed from a cone decomposition D, an integral
ideal a_c and the R-sets of each cone.  G sums log double gamma values, W is
a rational multiple of log_iota(a_c m), V is a combination of formal zeta
values at s = -1 weighted by logs of embedding ratios.  All rational parts
are evaluated exactly in F and embedded at the end.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath
from mpmath import mpf

from .barnes import barnes_deriv0
from .cones import Cone, ConeSet, RSetEntry, r_set, shintani_domain
from .exactnum import zeta_fml
from .qfield import QuadElem, QuadField, QuadIdeal, embed, log_iota
from .rayclass import RayClass, RayClassGroup
from .recognize import rational_reconstruct

DEFAULT_MAX_DEN = 10 ** 4


class DegenerateBasisError(ValueError):
    pass


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class ClassContext:
    group: RayClassGroup
    c: RayClass
    a_c: QuadIdeal
    D: ConeSet
    paired_place: int | None = None  # n for the {c, c_n c} variant

    @property
    def field(self) -> QuadField:
        return self.group.field

    def target_classes(self) -> list[RayClass]:
        if self.paired_place is None:
            return [self.c]
        return [self.c, self.group.conjugation_class(self.paired_place) * self.c]

    def scaled_ideal(self) -> QuadIdeal:
        """a_c times the finite part of the modulus."""
        return self.a_c * self.group.modulus.m_ideal

    def entries(self) -> list[tuple[Cone, RSetEntry]]:
        out = []
        classes = self.target_classes()
        for cone in self.D:
            for e in r_set(self.group, classes, self.a_c, cone):
                out.append((cone, e))
        return out

    def digest(self) -> str:
        text = "|".join(self.D.describe()) + "#" + str(self.a_c.generator)
        if self.paired_place is not None:
            text += f"#paired{self.paired_place}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def make_context(group: RayClassGroup, c: RayClass, a_c: QuadIdeal | None = None,
                 D: ConeSet | None = None, paired_place: int | None = None) -> ClassContext:
    F = group.field
    a_c = a_c or F.unit_ideal()
    if not a_c.is_integral():
        raise ValueError("a_c must be integral")
    return ClassContext(group, c, a_c, D or shintani_domain(F), paired_place)


@dataclass(frozen=True)
class XValue:
    g: mpf
    w: mpf
    v: mpf
    x: mpf
    iota: int
    prec: int
    context_hash: str


def _embed_exact(e, which: int, prec: int) -> mpf:
    if isinstance(e, QuadElem):
        return embed(e, which, prec)
    with mpmath.workprec(prec):
        return mpf(e.numerator) / e.denominator


def _check_iota(ctx: ClassContext, iota: int):
    if iota not in (1, 2):
        raise ValueError("iota must be 1 or 2")
    if ctx.paired_place is not None and iota == ctx.paired_place:
        raise EmbeddingError("the paired variant is defined only away from the paired place")


def g_invariant(ctx: ClassContext, iota: int, prec: int) -> mpf:
    """Sum of log double gamma values over all cones and R-set points."""
    _check_iota(ctx, iota)
    wp = prec + 20
    with mpmath.workprec(wp):
        total = mpf(0)
        for cone, e in ctx.entries():
            periods = [_embed_exact(v, iota, wp) for v in cone.basis]
            if any(p <= 0 for p in periods):
                raise EmbeddingError("cone is not positive at this embedding")
            total += barnes_deriv0(periods, e.x, wp)
    with mpmath.workprec(prec):
        return +total


def zeta0_sum(ctx: ClassContext):
    """Exact sum of zeta(0, v, x) over the cones; an element of F."""
    total = Fraction(0)
    for cone, e in ctx.entries():
        total = total + zeta_fml(1, cone.basis, e.x)
    return total


def zeta0_exact(ctx: ClassContext) -> Fraction:
    """zeta(0, c), which is rational when D is a Shintani domain."""
    s = zeta0_sum(ctx)
    if isinstance(s, QuadElem):
        if s.q != 0:
            raise ValueError("partial zeta value at 0 is not rational; is D a Shintani domain?")
        return s.p
    return Fraction(s)


def w_invariant(ctx: ClassContext, iota: int, prec: int) -> mpf:
    _check_iota(ctx, iota)
    wp = prec + 20
    with mpmath.workprec(wp):
        z = _embed_exact(zeta0_sum(ctx), iota, wp)
        out = -log_iota(ctx.scaled_ideal(), iota, wp) * z
    with mpmath.workprec(prec):
        return +out


def v_term(basis: tuple, x: tuple, iota: int, prec: int) -> mpf:
    """The n = 2 formal V contribution of one cone point.

    The general weights -1/n and 1/n^2 over the pairs (1, k) and (i, k)
    collapse at n = 2 to a single -1/4 times the (iota, other) term.
    """
    r = len(basis)
    if r == 1:
        return mpf(0)
    other = 3 - iota
    wp = prec + 20
    with mpmath.workprec(wp):
        total = mpf(0)
        for p in range(r):
            vp = basis[p]
            args, xs = [], []
            for q in range(r):
                if q == p:
                    continue
                w = basis[q] / vp
                diff = w - w.conj()
                if not diff:
                    raise DegenerateBasisError("coincident embedding ratios")
                args.append(diff)
                xs.append(x[q])
            zf = zeta_fml(2, tuple(args), tuple(xs))
            ratio = embed(vp, iota, wp) / embed(vp, other, wp)
            total += _embed_exact(zf, iota, wp) * mpmath.log(abs(ratio))
        out = -total / 4
    with mpmath.workprec(prec):
        return +out


def v_invariant(ctx: ClassContext, iota: int, prec: int) -> mpf:
    _check_iota(ctx, iota)
    wp = prec + 20
    with mpmath.workprec(wp):
        total = mpf(0)
        for cone, e in ctx.entries():
            total += v_term(cone.basis, e.x, iota, wp)
    with mpmath.workprec(prec):
        return +total


def x_invariant(ctx: ClassContext, iota: int, prec: int) -> XValue:
    wp = prec + 20
    with mpmath.workprec(wp):
        g = g_invariant(ctx, iota, wp)
        w = w_invariant(ctx, iota, wp)
        v = v_invariant(ctx, iota, wp)
        x = g + w + v
    with mpmath.workprec(prec):
        return XValue(+g, +w, +v, +x, iota, prec, ctx.digest())


def x_fml(ctx: ClassContext, iota: int, prec: int) -> mpf:
    """G + W + V over the paired R-sets, for cones positive at ``iota``."""
    if ctx.paired_place is None:
        raise ValueError("x_fml needs a paired context")
    return x_invariant(ctx, iota, prec).x


def zeta_deriv0(ctx: ClassContext, prec: int) -> mpf:
    """zeta'(0, c) as the sum of X over both embeddings."""
    if ctx.paired_place is not None:
        raise ValueError("zeta'(0, c) needs an unpaired Shintani domain context")
    wp = prec + 10
    with mpmath.workprec(wp):
        s = x_invariant(ctx, 1, wp).x + x_invariant(ctx, 2, wp).x
    with mpmath.workprec(prec):
        return +s


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class UnitExponentCheck:
    """L = q log iota(eps_plus) with q rational, up to ``residual``."""

    q: Fraction | None
    residual: mpf | None
    value: mpf
    iota: int
    prec: int

    def passes(self, tol: mpf) -> bool:
        return self.q is not None and self.residual is not None and self.residual < tol


def unit_exponent(value: mpf, field: QuadField, iota: int, prec: int,
                  max_den: int = DEFAULT_MAX_DEN) -> UnitExponentCheck:
    with mpmath.workprec(prec + 20):
        lu = field.log_unit(iota, prec + 20)
        q = rational_reconstruct(value / lu, max_den)
        residual = None if q is None else abs(value - mpf(q.numerator) / q.denominator * lu)
    return UnitExponentCheck(q, residual, value, iota, prec)


def verify_theorem_main(group: RayClassGroup, c: RayClass, i: int, j: int, prec: int,
                        a_c: QuadIdeal | None = None, D: ConeSet | None = None,
                        max_den: int = DEFAULT_MAX_DEN) -> UnitExponentCheck:
    """X(c, iota_i) + X(c_j c, iota_i) against rational multiples of log iota_i(eps_plus)."""
    if i == j:
        raise ValueError("need i != j")
    cj = group.conjugation_class(j)
    wp = prec + 20
    with mpmath.workprec(wp):
        x1 = x_invariant(make_context(group, c, a_c, D), i, wp).x
        x2 = x_invariant(make_context(group, cj * c, a_c, D), i, wp).x
        total = x1 + x2
    return unit_exponent(total, group.field, i, prec, max_den)


def verify_replace2(group: RayClassGroup, c: RayClass, first: tuple, second: tuple, prec: int,
                    max_den: int = DEFAULT_MAX_DEN) -> tuple[UnitExponentCheck, UnitExponentCheck]:
    """X differences between two (D, a_c) choices, at both embeddings.

    The differences should be q log iota(eps_plus) with the same q at both
    places, which in particular leaves zeta'(0, c) unchanged.
    """
    (D1, a1), (D2, a2) = first, second
    wp = prec + 20
    out = []
    for iota in (1, 2):
        with mpmath.workprec(wp):
            d = (x_invariant(make_context(group, c, a2, D2), iota, wp).x
                 - x_invariant(make_context(group, c, a1, D1), iota, wp).x)
        out.append(unit_exponent(d, group.field, iota, prec, max_den))
    return out[0], out[1]
