"""Open simplicial cones over O, Shintani domains and lattice-point sets.

All geometry is exact: a point lies in C(v_1, ..., v_r) iff its coordinates in
the basis v are rational and strictly positive.  For a one-dimensional cone
this means z is a positive rational multiple of v_1.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

from .qfield import QuadElem, QuadField, QuadIdeal, hnf2
from .rayclass import Modulus, RayClass, RayClassGroup, find_nu


class DegenerateConeError(ValueError):
    pass


def _det(v1: QuadElem, v2: QuadElem) -> Fraction:
    return v1.p * v2.q - v2.p * v1.q


@dataclass(frozen=True)
class Cone:
    basis: tuple

    def __post_init__(self):
        b = tuple(self.basis)
        object.__setattr__(self, "basis", b)
        if not 1 <= len(b) <= 2:
            raise DegenerateConeError("cones over a quadratic field have dimension 1 or 2")
        if any(not v for v in b):
            raise DegenerateConeError("zero basis vector")
        if len(b) == 2 and _det(*b) == 0:
            raise DegenerateConeError("basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, z: QuadElem) -> tuple[Fraction, ...] | None:
        """Coordinates of z in the basis, or None if z is off the span."""
        if self.dim == 1:
            t = z / self.basis[0]
            return (t.p,) if t.q == 0 else None
        v1, v2 = self.basis
        det = _det(v1, v2)
        t1 = (z.p * v2.q - v2.p * z.q) / det
        t2 = (v1.p * z.q - z.p * v1.q) / det
        return (t1, t2)

    def contains(self, z: QuadElem) -> bool:
        t = self.coords(z)
        return t is not None and all(ti > 0 for ti in t)

    def scale(self, alpha: QuadElem) -> Cone:
        return Cone(tuple(alpha * v for v in self.basis))

    def point(self, x: Sequence) -> QuadElem:
        """sum x_i v_i."""
        out = self.basis[0] * Fraction(x[0])
        for xi, v in zip(x[1:], self.basis[1:]):
            out = out + v * Fraction(xi)
        return out

    def __str__(self):
        return "C(" + ", ".join(str(v) for v in self.basis) + ")"


@dataclass(frozen=True)
class ConeSet:
    cones: tuple
    weights: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "cones", tuple(self.cones))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(self.weights))
            if len(self.weights) != len(self.cones):
                raise ValueError("one weight per cone")

    def __iter__(self):
        return iter(self.cones)

    def __len__(self):
        return len(self.cones)

    def weight(self, j: int) -> int:
        return 1 if self.weights is None else self.weights[j]

    def count(self, z: QuadElem) -> int:
        return sum(self.weight(j) for j, c in enumerate(self.cones) if c.contains(z))

    def scale(self, alpha: QuadElem) -> ConeSet:
        return ConeSet(tuple(c.scale(alpha) for c in self.cones), self.weights)

    def replace(self, j: int, pieces: Iterable[Cone]) -> ConeSet:
        """Swap cone j for a decomposition of it."""
        cones = list(self.cones)
        cones[j:j + 1] = list(pieces)
        return ConeSet(tuple(cones))

    def is_disjoint_on(self, points: Iterable[QuadElem]) -> bool:
        return all(sum(c.contains(z) for c in self.cones) <= 1 for z in points)

    def describe(self) -> list[str]:
        return [str(c) for c in self.cones]


def multiplicity(z: QuadElem, sets: Sequence[tuple[ConeSet, int]]) -> int:
    """Weighted number of cones containing z."""
    if not z:
        raise ValueError("z must be nonzero")
    return sum(w * cs.count(z) for cs, w in sets)


def shintani_domain(field: QuadField) -> ConeSet:
    """C(1) and C(1, eps_plus): one ray and one open sector."""
    one = field.elem(1)
    return ConeSet((Cone((one,)), Cone((one, field.totally_positive_unit))))


def domain_translate(field: QuadField, z: QuadElem, D: ConeSet, search: int = 64) -> list[tuple[int, int]]:
    """All (k, j) with eps_plus^-k z in cone j of D, for |k| <= search."""
    eps = field.totally_positive_unit
    inv = eps.inverse()
    hits = []
    for k in range(-search, search + 1):
        w = z * (inv ** k if k >= 0 else eps ** (-k))
        for j, c in enumerate(D.cones):
            if c.contains(w):
                hits.append((k, j))
    return hits


# ----------------------------------------------------------- refinements


def refine(cone: Cone, case: str, param=None) -> ConeSet:
    """Re-describe the same open cone.

    I   -- permute the basis (param: permutation tuple, default swap)
    II  -- scale one generator by a positive integer (param: (index, n))
    III -- split a 2-cone along v1 + v2
    """
    b = cone.basis
    if case == "I":
        perm = param if param is not None else tuple(reversed(range(cone.dim)))
        if sorted(perm) != list(range(cone.dim)):
            raise ValueError("invalid permutation")
        return ConeSet((Cone(tuple(b[i] for i in perm)),))
    if case == "II":
        idx, n = param if isinstance(param, tuple) else (0, param)
        if not isinstance(n, int) or n < 1:
            raise ValueError("case II needs a positive integer")
        nb = list(b)
        nb[idx] = nb[idx] * n
        return ConeSet((Cone(tuple(nb)),))
    if case == "III":
        if cone.dim != 2:
            raise ValueError("case III needs a 2-dimensional cone")
        v1, v2 = b
        s = v1 + v2
        return ConeSet((Cone((v1, s)), Cone((s, v2)), Cone((s,))))
    raise ValueError(f"unknown refinement case {case!r}")


def refine_set(D: ConeSet, j: int, case: str, param=None) -> ConeSet:
    return D.replace(j, refine(D.cones[j], case, param).cones)


# ------------------------------------------------------------------ R-sets


@dataclass(frozen=True)
class RSetEntry:
    x: tuple

    def __post_init__(self):
        if any(not 0 < xi <= 1 for xi in self.x):
            raise ValueError("R-set coordinates lie in (0, 1]")


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def lattice_points(cone: Cone, g: QuadElem) -> list[tuple[Fraction, ...]]:
    """All x in (0,1]^r with sum x_i v_i in g^-1 O."""
    F_d = g.d
    if cone.dim == 1:
        gv = g * cone.basis[0]
        a, b = _omega_int_coords(gv)
        e = gcd(a, b)
        return [(Fraction(k, e),) for k in range(1, e + 1)]
    ginv = g.inverse()
    omega = _omega(F_d)
    gens = [cone.coords(ginv), cone.coords(ginv * omega)]
    den = 1
    for vec in gens:
        for t in vec:
            den = _lcm(den, t.denominator)
    iv = [tuple(int(t * den) for t in vec) for vec in gens]
    A, B, C = hnf2(iv[0], iv[1])
    if den % A or den % C:
        raise DegenerateConeError("cone generators are not in the lattice")
    pts = set()
    for j in range(den // C):
        y = j * C
        for i in range(den // A):
            x = (j * B + i * A) % den
            pts.add((x, y))
    out = []
    for x, y in sorted(pts):
        out.append((Fraction(x, den) if x else Fraction(1), Fraction(y, den) if y else Fraction(1)))
    return sorted(out)


def _omega(d: int) -> QuadElem:
    if d % 4 == 1:
        return QuadElem(d, Fraction(1, 2), Fraction(1, 2))
    return QuadElem(d, 0, 1)


def _omega_int_coords(e: QuadElem) -> tuple[int, int]:
    if e.d % 4 == 1:
        y = 2 * e.q
        x = e.p - e.q
    else:
        x, y = e.p, e.q
    if x.denominator != 1 or y.denominator != 1:
        raise DegenerateConeError("element is not integral")
    return int(x), int(y)


def r_set(group: RayClassGroup, classes: Iterable[RayClass], a_c: QuadIdeal, cone: Cone) -> list[RSetEntry]:
    """x in (0,1]^r with z = x.v in (a_c m)^-1 and (z a_c m) in one of ``classes``."""
    wanted = {c.index for c in classes}
    g = (a_c * group.modulus.m_ideal).generator
    out = []
    for x in lattice_points(cone, g):
        zg = cone.point(x) * g
        if not group.coprime(zg):
            continue
        if group.class_of_element(zg).index in wanted:
            out.append(RSetEntry(x))
    return out


def r_set_for(group: RayClassGroup, c: RayClass, a_c: QuadIdeal, cone: Cone,
              pair_with_conjugate: int | None = None) -> list[RSetEntry]:
    """Unpaired R(c) or, with an infinite place index n, the paired R({c, c_n c})."""
    classes = [c]
    if pair_with_conjugate is not None:
        classes.append(group.conjugation_class(pair_with_conjugate) * c)
    return r_set(group, classes, a_c, cone)


# ----------------------------------------------------------- key lemma


def keylemma_nu(field: QuadField) -> QuadElem:
    """sqrt(d) - floor(sqrt(d)): in O, positive at the first place only."""
    return field.elem(-isqrt(field.d), 1)


@dataclass(frozen=True)
class KeyLemmaData:
    D: ConeSet
    nu: QuadElem
    X1: ConeSet
    eps1: QuadElem

    def sides(self) -> tuple[list, list]:
        left = [(self.D, 1), (self.D.scale(self.nu), 1), (self.X1.scale(self.eps1), 1)]
        right = [(self.X1, 1)]
        return left, right

    def check_point(self, z: QuadElem) -> bool:
        left, right = self.sides()
        return multiplicity(z, left) == multiplicity(z, right)


def keylemma_construct(field: QuadField, f: Modulus | None = None) -> KeyLemmaData:
    """The n = 2 decomposition with X_1 the closed sector between 1 and nu.

    Both boundary rays belong to X_1: ray 1 is matched by D, ray nu by nu D,
    and eps_plus X_1 fills the rest including its own two rays.
    """
    nu = keylemma_nu(field)
    one = field.elem(1)
    X1 = ConeSet((Cone((one,)), Cone((one, nu)), Cone((nu,))))
    return KeyLemmaData(shintani_domain(field), nu, X1, field.totally_positive_unit)


# ---------------------------------------------------------------- sampling


def sample_points(field: QuadField, count: int, seed: int, half_plane: bool = True,
                  bound: int = 50, special: Sequence[QuadElem] = ()) -> list[QuadElem]:
    """Rational points with positive first embedding (or totally positive).

    A third of the points are forced onto rays through ``special`` so the
    boundary cases are exercised.
    """
    rng = random.Random(seed)
    pts: list[QuadElem] = []
    while len(pts) < count:
        if special and rng.random() < 1 / 3:
            base = rng.choice(list(special))
            z = base * Fraction(rng.randint(1, bound), rng.randint(1, bound))
        else:
            p = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            q = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            z = field.elem(p, q)
        if not z or z.sign(1) <= 0:
            continue
        if not half_plane and z.sign(2) <= 0:
            continue
        pts.append(z)
    return pts
