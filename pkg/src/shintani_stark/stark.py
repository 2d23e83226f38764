"""Partial zeta sums over Galois cosets, Stark units and the g_K exponent.

The Galois side is input data: a subgroup H of the ray class group stands
for the classes fixing K, and the cosets of H stand for Gal(K/F).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath
from mpmath import mpf

from .barnes import log_gamma
from .invariants import make_context, x_invariant, zeta0_exact, zeta_deriv0
from .qfield import QuadField, make_field
from .rayclass import (Character, Modulus, RayClass, RayClassGroup, characters, make_modulus,
                       ray_class_group)


class NotCMError(ValueError):
    pass


class VanishingLValueError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CongruenceData:
    group: RayClassGroup
    subgroup: tuple
    coset_labels: dict

    def __post_init__(self):
        idx = {c.index for c in self.subgroup}
        g = self.group
        if g.identity.index not in idx:
            raise ValueError("subgroup must contain the identity")
        if any(g.mul_table[a][b] not in idx for a in idx for b in idx):
            raise ValueError("subgroup is not closed under multiplication")
        seen = [c.index for coset in self.coset_labels.values() for c in coset]
        if sorted(seen) != list(range(len(g))):
            raise ValueError("cosets must partition the group")

    def coset(self, label: str) -> tuple:
        try:
            return self.coset_labels[label]
        except KeyError:
            raise ValueError(f"unknown coset label {label!r}; have {sorted(self.coset_labels)}") from None

    def label_of(self, c: RayClass) -> str:
        for label, coset in self.coset_labels.items():
            if c in coset:
                return label
        raise ValueError("class not in any coset")

    @property
    def degree(self) -> int:
        return len(self.coset_labels)

    def complex_conjugation(self) -> RayClass | None:
        """Class of an element = 1 mod m negative at the first place only.

        Its image in Gal(K/F) is complex conjugation when K is CM.
        """
        g = self.group
        if set(g.places) != {1, 2}:
            return None
        return g.conjugation_class(1)

    def is_cm(self) -> bool:
        """Both places ramify and their conjugations agree modulo the subgroup."""
        g = self.group
        rho = self.complex_conjugation()
        if rho is None or rho in self.subgroup:
            return False
        return g.conjugation_class(2) * rho.inverse() in self.subgroup


def congruence_data(group: RayClassGroup, subgroup) -> CongruenceData:
    """Cosets of ``subgroup`` labelled "id" and by their first class otherwise."""
    sub = tuple(sorted({group.classes[i] if isinstance(i, int) else i for i in subgroup},
                       key=lambda c: c.index))
    labels: dict = {}
    done: set = set()
    for c in group.classes:
        if c.index in done:
            continue
        coset = tuple(sorted({c * h for h in sub}, key=lambda x: x.index))
        done.update(x.index for x in coset)
        labels["id" if group.identity in coset else c.label] = coset
    return CongruenceData(group, sub, labels)


# ---------------------------------------------------------- zeta sums


def partial_zeta_deriv0(cd: CongruenceData, label: str, prec: int) -> mpf:
    """Sum of zeta'(0, c) over the coset with this label."""
    wp = prec + 10
    with mpmath.workprec(wp):
        total = mpf(0)
        for c in cd.coset(label):
            total += zeta_deriv0(make_context(cd.group, c), wp)
    with mpmath.workprec(prec):
        return +total


def stark_unit(cd: CongruenceData, label: str, prec: int) -> mpf:
    log_value = partial_zeta_deriv0(cd, label, prec + 10)
    with mpmath.workprec(prec):
        return mpmath.exp(log_value)


# ------------------------------------------------------ cyclotomic values


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Integer coefficients of Phi_n, constant term first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_divexact(a: list, b: list) -> list:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        coef = a[i + len(b) - 1] // b[-1]
        q[i] = coef
        for j, bj in enumerate(b):
            a[i + j] -= coef * bj
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return q


@dataclass(frozen=True)
class CycloValue:
    """sum coeffs[k] zeta^k in Q(zeta), zeta = exp(2 pi i / order), reduced mod Phi_order."""

    order: int
    coeffs: tuple

    @classmethod
    def from_powers(cls, order: int, weights: dict) -> CycloValue:
        vec = [Fraction(0)] * order
        for k, w in weights.items():
            vec[k % order] += Fraction(w)
        phi = cyclotomic_poly(order)
        deg = len(phi) - 1
        for i in range(len(vec) - 1, deg - 1, -1):
            c = vec[i]
            if c:
                for j, pj in enumerate(phi):
                    vec[i - deg + j] -= c * pj
        return cls(order, tuple(vec[:deg]))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_complex(self, prec: int) -> mpmath.mpc:
        with mpmath.workprec(prec + 10):
            z = mpmath.expjpi(mpf(2) / self.order)
            acc = mpmath.mpc(0)
            for c in reversed(self.coeffs):
                acc = acc * z + mpf(c.numerator) / c.denominator
        return acc

    def __str__(self):
        terms = [f"{c}*z^{k}" if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


def L0(chi: Character, g: RayClassGroup | None = None) -> CycloValue:
    """L(0, chi) = sum chi(c) zeta(0, c), exactly."""
    g = g or chi.group
    weights: dict = {}
    for c in g.classes:
        k = chi.exponents[c.index]
        weights[k] = weights.get(k, Fraction(0)) + zeta0_exact(make_context(g, c))
    return CycloValue.from_powers(chi.order, weights)


# ----------------------------------------------------------------- g_K


def _modulus_key(M: Modulus):
    return (M.m_ideal, M.infinite_places)


def projection(big: RayClassGroup, small: RayClassGroup) -> tuple:
    """Index map C_f -> C_f' for f' | f, through class representatives."""
    return tuple(small.class_of_element(e).index for e in big.representatives)


def primitive_character(chi: Character) -> tuple[Character, RayClassGroup]:
    """chi as a character of the ray class group of its own conductor."""
    g = chi.group
    f = chi.conductor
    if f is None or _modulus_key(f) == _modulus_key(g.modulus):
        return chi, g
    small = ray_class_group(g.field, f)
    proj = projection(g, small)
    expo = [None] * len(small)
    for i, j in enumerate(proj):
        if expo[j] is None:
            expo[j] = chi.exponents[i]
        elif expo[j] != chi.exponents[i]:
            raise ValueError("character does not factor through its conductor")
    return Character(tuple(expo), chi.order, small, f), small


def odd_quotient_characters(cd: CongruenceData) -> list[Character]:
    """Totally odd characters of C_f trivial on the subgroup."""
    out = []
    for chi in characters(cd.group):
        if any(chi.exponents[h.index] % chi.order for h in cd.subgroup):
            continue
        if chi.is_totally_odd():
            out.append(chi)
    return out


@dataclass(frozen=True)
class GkExponent:
    """g_K(id, tau) = pi^pi_power * exp(value)."""

    value: mpmath.mpc
    pi_power: Fraction
    label: str
    prec: int

    def real_value(self, tol: mpf | None = None) -> mpf:
        tol = tol if tol is not None else mpf(2) ** (-int(0.8 * self.prec))
        if abs(self.value.imag) > tol * max(1, abs(self.value.real)):
            raise ArithmeticError("imaginary part did not cancel")
        return self.value.real


def mu(cd: CongruenceData, label: str) -> int:
    coset = cd.coset(label)
    if cd.group.identity in coset:
        return 1
    rho = cd.complex_conjugation()
    return -1 if rho is not None and rho in coset else 0


def gk_exponent(label: str, cd: CongruenceData, prec: int) -> GkExponent:
    if not cd.is_cm():
        raise NotCMError("complex conjugation lies in the subgroup; K is not CM")
    tau = cd.coset(label)[0]
    wp = prec + 20
    x_cache: dict = {}
    with mpmath.workprec(wp):
        total = mpmath.mpc(0)
        for chi in odd_quotient_characters(cd):
            prim, small = primitive_character(chi)
            l0 = L0(prim, small)
            if l0.is_zero():
                raise VanishingLValueError("L(0, chi) vanishes for a totally odd character")
            inner = mpmath.mpc(0)
            for c in small.classes:
                key = (_modulus_key(small.modulus), c.index)
                if key not in x_cache:
                    x_cache[key] = x_invariant(make_context(small, c), 1, wp).x
                inner += prim.value(c, wp) * x_cache[key]
            total += chi.value(tau, wp) / l0.to_complex(wp) * inner
        total /= cd.degree
    with mpmath.workprec(prec):
        return GkExponent(+total, Fraction(-mu(cd, label), 2), label, prec)


# -------------------------------------------------------- example data


def kronecker(D: int, a: int) -> int:
    """Kronecker symbol (D/a) for a > 0."""
    if a <= 0:
        raise ValueError("a must be positive")
    if gcd(D, a) != 1:
        return 0
    result = 1
    while a % 2 == 0:
        a //= 2
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D/a) for odd a
    n = D % a
    while n:
        while n % 2 == 0:
            n //= 2
            if a % 8 in (3, 5):
                result = -result
        n, a = a, n
        if n % 4 == 3 and a % 4 == 3:
            result = -result
        n %= a
    return result if a == 1 else 0


def example_psi(a: int) -> int:
    """Character of Q(sqrt(-5)) modulo 20."""
    return kronecker(-20, a)


def example_constant_G(prec: int) -> mpf:
    """Gamma(1/4)/Gamma(3/4) * prod Gamma(a/20)^(psi(a)/4)."""
    if prec < 128:
        raise ValueError("prec must be at least 128 bits")
    wp = prec + 20
    with mpmath.workprec(wp):
        lg = log_gamma(Fraction(1, 4), wp) - log_gamma(Fraction(3, 4), wp)
        for a in range(1, 20):
            s = example_psi(a)
            if s:
                lg += s * log_gamma(Fraction(a, 20), wp) / 4
        out = mpmath.exp(lg)
    with mpmath.workprec(prec):
        return +out


@dataclass(frozen=True)
class ExamplePreset:
    field: QuadField
    modulus: Modulus
    group: RayClassGroup


@lru_cache(maxsize=1)
def example_preset() -> ExamplePreset:
    """Q(sqrt 5), modulus (4) with both infinite places, classes c1..c4."""
    F = make_field(5)
    f = make_modulus(F, F.elem(4), (1, 2))
    reps = [F.elem(1), F.elem(3), F.elem(4, 1), F.elem(6, 1)]
    return ExamplePreset(F, f, ray_class_group(F, f, reps))


def example_stark_data() -> CongruenceData:
    """K = F(sqrt(eps)), fixed by {c1, c3}."""
    g = example_preset().group
    return congruence_data(g, [0, 2])


def example_cm_data() -> CongruenceData:
    """The CM quadratic extension cut out by the totally odd character: H = {c1, c2}."""
    g = example_preset().group
    return congruence_data(g, [0, 1])
