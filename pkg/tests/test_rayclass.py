from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from shintani_stark.qfield import is_totally_positive, make_field
from shintani_stark.rayclass import (Modulus, RayClassError, characters, class_of, conductor, find_nu,
                                     ideal_divisors, make_modulus, odd_characters, ray_class_group)
from shintani_stark.stark import CycloValue


def test_example_group_order(group):
    assert len(group) == 4
    assert group.check_axioms()
    assert [c.label for c in group.classes] == ["c1", "c2", "c3", "c4"]


def test_trivial_modulus_gives_trivial_group(F):
    g = ray_class_group(F, make_modulus(F, F.elem(1), (1, 2)))
    assert len(g) == 1
    chars = characters(g)
    assert len(chars) == 1 and chars[0].is_trivial()


def test_class_of_examples(F, group):
    assert class_of(group, F.ideal(1)) == group.identity
    assert class_of(group, F.ideal(3)) != group.identity
    assert class_of(group, F.ideal(F.elem(6, 1))) == group.classes[3]
    assert class_of(group, F.ideal(F.elem(4, 1))) == group.classes[2]
    assert class_of(group, F.ideal(9)) == group.classes[1] ** 2


def test_class_of_rejects_non_coprime(F, group):
    with pytest.raises(RayClassError):
        class_of(group, F.ideal(2))


def test_representatives_coprime(group):
    for rep in group.representatives:
        assert group.coprime(rep)
        assert is_totally_positive(rep)


coprime_elems = st.builds(lambda x, y: (x, y), st.integers(-25, 25), st.integers(-25, 25))


@given(coprime_elems, coprime_elems)
def test_class_of_is_homomorphism(group, F, u, v):
    a, b = F.from_omega(*u), F.from_omega(*v)
    if not (group.coprime(a) and group.coprime(b)):
        return
    assert group.class_of_element(a * b) == group.class_of_element(a) * group.class_of_element(b)


@pytest.mark.parametrize("i", [1, 2])
def test_find_nu(F, group, i):
    nu = find_nu(F, group.modulus, i)
    other = 3 - i
    assert nu.sign(i) < 0 < nu.sign(other)
    assert F.is_integral((nu - 1) / 4)
    c = group.conjugation_class(i)
    assert c * c == group.identity


def test_find_nu_trivial_finite_part(F):
    f = make_modulus(F, F.elem(1), (1, 2))
    nu = find_nu(F, f, 1)
    assert nu.sign(1) < 0 < nu.sign(2)


def test_find_nu_requires_place(F):
    with pytest.raises(RayClassError):
        find_nu(F, make_modulus(F, F.elem(4), (1,)), 2)


def test_conjugation_classes_of_example(group):
    assert group.conjugation_class(1) == group.classes[2]
    assert group.conjugation_class(2) == group.classes[3]


def test_example_characters(group):
    chars = characters(group)
    assert len(chars) == 4
    table = {chi.exponents: chi.conductor.describe() for chi in chars}
    assert table == {
        (0, 0, 0, 0): "(1)",
        (0, 0, 1, 1): "(4)*inf1*inf2",
        (0, 1, 0, 1): "(4)*inf2",
        (0, 1, 1, 0): "(4)*inf1",
    }
    odd = odd_characters(group)
    assert [chi.exponents for chi in odd] == [(0, 0, 1, 1)]
    for chi in chars:
        expected = all(chi.exponent(group.conjugation_class(i)) == Fraction(1, 2) for i in (1, 2))
        assert chi.is_totally_odd() == expected


def test_characters_multiplicative(group):
    for chi in characters(group):
        for a, b in product(group.classes, repeat=2):
            assert (chi.exponents[a.index] + chi.exponents[b.index]) % chi.order == chi.exponents[(a * b).index]


def test_character_orthogonality_exact(group):
    chars = characters(group)
    n = len(group)
    for chi, psi in product(chars, repeat=2):
        e = chi.order
        weights = {}
        for c in group.classes:
            k = (chi.exponents[c.index] - psi.exponents[c.index]) % e
            weights[k] = weights.get(k, 0) + 1
        val = CycloValue.from_powers(e, weights)
        expected = CycloValue.from_powers(e, {0: n if chi == psi else 0})
        assert val == expected


def test_conductor_of_trivial_character(group):
    triv = characters(group)[0]
    assert triv.is_trivial()
    M = conductor(triv)
    assert M.m_ideal.generator == 1 and not M.infinite_places


def test_ideal_divisors_of_four(F):
    divs = ideal_divisors(F, F.ideal(4))
    # 2 is inert in Q(sqrt 5): divisors are (1), (2), (4)
    assert [d.norm() for d in divs] == [1, 4, 16]


@pytest.mark.parametrize("d,gen,places", [(2, 3, (1, 2)), (13, 3, (1, 2)), (5, 5, (2,)), (2, 7, ())])
def test_other_groups_satisfy_axioms(d, gen, places):
    K = make_field(d)
    g = ray_class_group(K, make_modulus(K, K.elem(gen), places))
    assert g.check_axioms()
    chars = characters(g)
    assert len(chars) == len(g)


def test_modulus_divides(F):
    big = make_modulus(F, F.elem(4), (1, 2))
    small = make_modulus(F, F.elem(2), (2,))
    assert small.divides(big)
    assert not big.divides(small)
