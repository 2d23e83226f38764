"""Ray class groups of real quadratic fields with narrow class number one.

With every ideal principal, the ray class group modulo m * (infinite places S)
is the quotient of (O/m)^* x {+-1}^S by the image of the global units.  A class
is stored as an index into the parent group; characters carry exact exponents
k/ord so that orthogonality can be tested without rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, combinations, product
from math import gcd, isqrt
from typing import Iterable, Sequence

import mpmath

from .qfield import QuadElem, QuadField, QuadIdeal, hnf2, is_totally_positive, lattice_index


class RayClassError(ValueError):
    pass


@dataclass(frozen=True)
class Modulus:
    m_ideal: QuadIdeal
    infinite_places: frozenset = frozenset()

    def __post_init__(self):
        if not self.m_ideal.is_integral():
            raise RayClassError("modulus ideal must be integral")
        object.__setattr__(self, "infinite_places", frozenset(self.infinite_places))
        if not self.infinite_places <= {1, 2}:
            raise RayClassError("infinite places must be a subset of {1, 2}")

    @property
    def field(self) -> QuadField:
        return self.m_ideal.field

    def describe(self) -> str:
        inf = "".join(f"*inf{i}" for i in sorted(self.infinite_places))
        return f"({self.m_ideal.generator}){inf}"

    def divides(self, other: Modulus) -> bool:
        return self.m_ideal.divides(other.m_ideal) and self.infinite_places <= other.infinite_places


def make_modulus(field: QuadField, generator, infinite_places: Iterable[int] = ()) -> Modulus:
    g = generator if isinstance(generator, QuadElem) else field.elem(generator)
    return Modulus(field.ideal(g), frozenset(infinite_places))


class Residues:
    """Arithmetic in O / (g) through the Hermite basis of the ideal lattice."""

    def __init__(self, field: QuadField, g: QuadElem):
        self.field = field
        self.g = g
        v1 = field.omega_coords(g)
        v2 = field.omega_coords(g * field.omega)
        self.A, self.B, self.C = hnf2(v1, v2)
        self.size = self.A * self.C
        self.lattice_gens = [v1, v2]

    def reduce_coords(self, x: int, y: int) -> tuple[int, int]:
        k = y // self.C
        x -= k * self.B
        y -= k * self.C
        return x % self.A, y

    def reduce(self, e: QuadElem) -> tuple[int, int]:
        """Residue of e, which must be integral or have denominator prime to g."""
        x, y = self.field.to_omega(e)
        den = x.denominator * y.denominator // gcd(x.denominator, y.denominator)
        if den == 1:
            return self.reduce_coords(int(x), int(y))
        inv = self.inverse_of_integer(den)
        num = self.reduce_coords(int(x * den), int(y * den))
        return self.mul(num, inv)

    def inverse_of_integer(self, k: int) -> tuple[int, int]:
        if gcd(k, self.size) != 1:
            raise RayClassError(f"denominator {k} not coprime to the modulus")
        return self.reduce_coords(pow(k, -1, self.size), 0)

    def element(self, r: tuple[int, int]) -> QuadElem:
        return self.field.from_omega(*r)

    def mul(self, r: tuple[int, int], s: tuple[int, int]) -> tuple[int, int]:
        return self.reduce(self.element(r) * self.element(s))

    def is_unit(self, r: tuple[int, int]) -> bool:
        e = self.element(r)
        vecs = list(self.lattice_gens)
        vecs.append(self.field.omega_coords(e))
        vecs.append(self.field.omega_coords(e * self.field.omega))
        return lattice_index(vecs) == 1

    def all_residues(self) -> list[tuple[int, int]]:
        return [(x, y) for y in range(self.C) for x in range(self.A)]

    def contains(self, e: QuadElem) -> bool:
        return self.field.is_integral(e / self.g)


def _signs(e: QuadElem, places: Sequence[int]) -> tuple[int, ...]:
    out = []
    for i in places:
        s = e.sign(i)
        if s == 0:
            raise RayClassError("zero has no sign")
        out.append(s)
    return tuple(out)


@dataclass(frozen=True)
class RayClass:
    index: int
    group: "RayClassGroup" = field(compare=False, repr=False, hash=False)

    def __mul__(self, other: RayClass) -> RayClass:
        return self.group.classes[self.group.mul_table[self.index][other.index]]

    def inverse(self) -> RayClass:
        return self.group.classes[self.group.inverse_table[self.index]]

    def __pow__(self, e: int) -> RayClass:
        out = self.group.identity
        base = self if e >= 0 else self.inverse()
        for _ in range(abs(e)):
            out = out * base
        return out

    @property
    def label(self) -> str:
        return f"c{self.index + 1}"


class RayClassGroup:
    """C_f as (O/m)^* x signs modulo the image of the units."""

    def __init__(self, field: QuadField, modulus: Modulus, preferred: Sequence[QuadElem] = ()):
        self.field = field
        self.modulus = modulus
        self.places = tuple(sorted(modulus.infinite_places))
        self.res = Residues(field, modulus.m_ideal.generator)
        unit_res = [r for r in self.res.all_residues() if self.res.is_unit(r)]
        self.unit_residues = unit_res
        keys = [(r, s) for r in unit_res for s in product((1, -1), repeat=len(self.places))]
        gens = [self._key(field.elem(-1)), self._key(field.fundamental_unit)]
        image = {self._key(field.elem(1))}
        frontier = list(image)
        while frontier:
            nxt = []
            for k in frontier:
                for g in gens:
                    h = self._key_mul(k, g)
                    if h not in image:
                        image.add(h)
                        nxt.append(h)
            frontier = nxt
        self.unit_image = frozenset(image)
        coset_of: dict = {}
        cosets: list[frozenset] = []
        for k in keys:
            if k in coset_of:
                continue
            coset = frozenset(self._key_mul(k, u) for u in image)
            for member in coset:
                coset_of[member] = len(cosets)
            cosets.append(coset)
        # order classes: preferred generators first, then a height scan
        reps: list[QuadElem | None] = [None] * len(cosets)
        order: list[int] = []
        for e in chain(preferred, self._scan_generators(len(cosets))):
            k = self._key(e)
            c = coset_of[k]
            if reps[c] is None:
                reps[c] = e
                order.append(c)
            if len(order) == len(cosets):
                break
        position = {c: i for i, c in enumerate(order)}
        self._coset_index = {k: position[c] for k, c in coset_of.items()}
        self.representatives: tuple[QuadElem, ...] = tuple(reps[c] for c in order)
        self.classes = tuple(RayClass(i, self) for i in range(len(order)))
        n = len(order)
        rep_keys = [self._key(e) for e in self.representatives]
        self.mul_table = tuple(
            tuple(self._coset_index[self._key_mul(rep_keys[i], rep_keys[j])] for j in range(n)) for i in range(n))
        ident = self._coset_index[self._key(field.elem(1))]
        self.identity = self.classes[ident]
        self.inverse_table = tuple(next(j for j in range(n) if self.mul_table[i][j] == ident) for i in range(n))

    def __len__(self):
        return len(self.classes)

    def order(self) -> int:
        return len(self.classes)

    def _key(self, e: QuadElem):
        r = self.res.reduce(e)
        if not self.res.is_unit(r):
            raise RayClassError(f"{e} is not coprime to the modulus")
        return r, _signs(e, self.places)

    def _key_mul(self, k1, k2):
        return self.res.mul(k1[0], k2[0]), tuple(a * b for a, b in zip(k1[1], k2[1]))

    def _scan_generators(self, need: int):
        """Totally positive integral elements coprime to m by increasing norm."""
        F = self.field
        bound = 4
        seen = set()
        while True:
            cands = []
            for y in range(-bound, bound + 1):
                for x in range(-bound, bound + 1):
                    e = F.from_omega(x, y)
                    if not e or not is_totally_positive(e):
                        continue
                    if (x, y) in seen:
                        continue
                    cands.append((abs(e.norm()), max(abs(x), abs(y)), x, y, e))
            cands.sort(key=lambda t: t[:4])
            for *_, x, y, e in cands:
                seen.add((x, y))
                if self.res.is_unit(self.res.reduce(e)):
                    yield e
            bound *= 2

    def class_of_element(self, e: QuadElem) -> RayClass:
        """Class of the principal ideal (e); e must be coprime to m."""
        return self.classes[self._coset_index[self._key(e)]]

    def class_of(self, a: QuadIdeal | QuadElem) -> RayClass:
        g = a.generator if isinstance(a, QuadIdeal) else a
        return self.class_of_element(g)

    def coprime(self, e: QuadElem) -> bool:
        try:
            self._key(e)
        except RayClassError:
            return False
        return True

    def exponent(self) -> int:
        e = 1
        for c in self.classes:
            o = self.element_order(c)
            e = e * o // gcd(e, o)
        return e

    def element_order(self, c: RayClass) -> int:
        k, cur = 1, c
        while cur != self.identity:
            cur = cur * c
            k += 1
        return k

    def conjugation_class(self, i: int) -> RayClass:
        nu = find_nu(self.field, self.modulus, i)
        return self.class_of_element(nu)

    def check_axioms(self) -> bool:
        n = len(self)
        t = self.mul_table
        idx = self.identity.index
        for a in range(n):
            if t[a][idx] != a:
                return False
            for b in range(n):
                if t[a][b] != t[b][a]:
                    return False
                for c in range(n):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        return False
        return all(t[a][self.inverse_table[a]] == idx for a in range(n))


def ray_class_group(field: QuadField, f: Modulus, preferred: Sequence[QuadElem] = ()) -> RayClassGroup:
    return RayClassGroup(field, f, preferred)


def class_of(g: RayClassGroup, a) -> RayClass:
    return g.class_of(a)


def _small_elements(field: QuadField, height: int):
    for h in range(0, height + 1):
        for y in range(-h, h + 1):
            for x in range(-h, h + 1):
                if max(abs(x), abs(y)) == h:
                    yield field.from_omega(x, y)


def find_nu(field: QuadField, f: Modulus, i: int, max_height: int = 200) -> QuadElem:
    """nu = 1 mod m, negative at embedding i, positive at the other one."""
    if i not in f.infinite_places:
        raise RayClassError(f"infinite place {i} does not divide the modulus")
    g = f.m_ideal.generator
    other = 2 if i == 1 else 1
    for mu in _small_elements(field, max_height):
        nu = 1 + g * mu
        if nu.sign(i) < 0 and nu.sign(other) > 0:
            return nu
    raise RayClassError("search bound exceeded; enlarge max_height")


# --------------------------------------------------------------- characters


@dataclass(frozen=True)
class Character:
    """chi(c) = exp(2 pi i * exponents[c] / order)."""

    exponents: tuple
    order: int
    group: RayClassGroup = field(compare=False, repr=False, hash=False)
    conductor: Modulus | None = field(default=None, compare=False)

    def exponent(self, c: RayClass) -> Fraction:
        return Fraction(self.exponents[c.index], self.order)

    def value(self, c: RayClass, prec: int = 53) -> mpmath.mpc:
        with mpmath.workprec(prec + 10):
            v = mpmath.expjpi(2 * mpmath.mpf(self.exponents[c.index]) / self.order)
        return v

    def is_trivial(self) -> bool:
        return all(k == 0 for k in self.exponents)

    def is_totally_odd(self) -> bool:
        g = self.group
        if len(g.places) < 2:
            return False
        for i in (1, 2):
            c = g.conjugation_class(i)
            if Fraction(self.exponents[c.index], self.order) != Fraction(1, 2):
                return False
        return True

    def conj(self) -> Character:
        return Character(tuple((-k) % self.order for k in self.exponents), self.order, self.group, self.conductor)


def _generators(g: RayClassGroup) -> list[RayClass]:
    gens: list[RayClass] = []
    span = {g.identity.index}
    for c in g.classes:
        if c.index in span:
            continue
        gens.append(c)
        new = set(span)
        frontier = set(span)
        while frontier:
            nxt = set()
            for a in frontier:
                for h in gens:
                    b = g.mul_table[a][h.index]
                    if b not in new:
                        new.add(b)
                        nxt.add(b)
            frontier = nxt
        span = new
    return gens


def characters(g: RayClassGroup) -> list[Character]:
    """All characters, each with its conductor computed."""
    e = g.exponent()
    gens = _generators(g)
    orders = [g.element_order(h) for h in gens]
    # express every class as a word in the generators
    words = {g.identity.index: (0,) * len(gens)}
    frontier = [g.identity.index]
    while frontier:
        nxt = []
        for a in frontier:
            for t, h in enumerate(gens):
                b = g.mul_table[a][h.index]
                if b not in words:
                    w = list(words[a])
                    w[t] += 1
                    words[b] = tuple(w)
                    nxt.append(b)
        frontier = nxt
    found = []
    seen = set()
    choices = [[k for k in range(e) if (k * o) % e == 0] for o in orders]
    for vals in product(*choices):
        expo = tuple(sum(v * w for v, w in zip(vals, words[c.index])) % e for c in g.classes)
        ok = all(
            (expo[a] + expo[b]) % e == expo[g.mul_table[a][b]] for a in range(len(g)) for b in range(len(g)))
        if ok and expo not in seen:
            seen.add(expo)
            found.append(expo)
    found.sort(key=lambda ex: (Fraction(0) if not any(ex) else Fraction(1), ex))
    out = []
    for expo in found:
        chi = Character(expo, e, g)
        out.append(Character(expo, e, g, conductor(chi)))
    return out


def odd_characters(g: RayClassGroup) -> list[Character]:
    return [chi for chi in characters(g) if chi.is_totally_odd()]


def ideal_divisors(field: QuadField, m: QuadIdeal) -> list[QuadIdeal]:
    """All integral ideals dividing m, found by a bounded generator search."""
    n = int(m.norm())
    eps = field.totally_positive_unit
    # a balanced generator of norm N has both embeddings below sqrt(N * eps1)
    root = mpmath.sqrt(n * (abs(eps.p) + abs(eps.q) * mpmath.sqrt(field.d))) + 2
    bound = int(root) + 2
    found = {}
    for y in range(-2 * bound, 2 * bound + 1):
        for x in range(-2 * bound, 2 * bound + 1):
            e = field.from_omega(x, y)
            if not e:
                continue
            nm = abs(int(e.norm()))
            if n % nm:
                continue
            if not field.is_integral(m.generator / e):
                continue
            ideal = field.ideal(e)
            found[ideal] = ideal
    return sorted(found.values(), key=lambda a: (a.norm(), str(a.generator)))


def conductor(chi: Character) -> Modulus:
    """Smallest modulus dividing f through which chi factors."""
    g = chi.group
    F = g.field
    f = g.modulus
    candidates = []
    for m2 in ideal_divisors(F, f.m_ideal):
        for k in range(len(f.infinite_places) + 1):
            for S in combinations(sorted(f.infinite_places), k):
                candidates.append(Modulus(m2, frozenset(S)))
    candidates.sort(key=lambda M: (M.m_ideal.norm(), len(M.infinite_places), sorted(M.infinite_places)))
    for M in candidates:
        if _factors_through(chi, M):
            return M
    return f


def _factors_through(chi: Character, M: Modulus) -> bool:
    g = chi.group
    F = g.field
    res = g.res
    sub = Residues(F, M.m_ideal.generator)
    one = sub.reduce(F.elem(1))
    free_places = [i for i in g.places if i not in M.infinite_places]
    for r in g.unit_residues:
        e = res.element(r)
        if sub.reduce(e) != one:
            continue
        for signs in product((1, -1), repeat=len(g.places)):
            if any(s < 0 and p not in free_places for s, p in zip(signs, g.places)):
                continue
            c = g._coset_index[(r, signs)]
            if chi.exponents[c] % chi.order:
                return False
    return True
