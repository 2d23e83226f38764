from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shintani_stark.cones import (Cone, ConeSet, DegenerateConeError, KeyLemmaData, RSetEntry, domain_translate,
                                  keylemma_construct, keylemma_nu, lattice_points, multiplicity, r_set, r_set_for,
                                  refine, refine_set, sample_points, shintani_domain)
from shintani_stark.qfield import is_totally_positive, make_field

Fr = Fraction
# (c, cone index) -> R-set, enumerated once for the order-4 example group with a_c = (1)
FROZEN_R = {
    ("c1", 0): [(Fr(1, 4),)],
    ("c1", 1): [(Fr(1, 4), Fr(1)), (Fr(3, 4), Fr(3, 4)), (Fr(1), Fr(1, 4))],
    ("c2", 0): [(Fr(3, 4),)],
    ("c2", 1): [(Fr(1, 4), Fr(1, 4)), (Fr(3, 4), Fr(1)), (Fr(1), Fr(3, 4))],
    ("c3", 0): [],
    ("c3", 1): [(Fr(1, 4), Fr(1, 2)), (Fr(1, 4), Fr(3, 4)), (Fr(1, 2), Fr(3, 4))],
    ("c4", 0): [],
    ("c4", 1): [(Fr(1, 2), Fr(1, 4)), (Fr(3, 4), Fr(1, 4)), (Fr(3, 4), Fr(1, 2))],
}

rats = st.fractions(min_value=-40, max_value=40, max_denominator=40)


def test_shintani_domain_examples(F):
    assert shintani_domain(F).describe() == ["C(1)", "C(1, 3/2 + 1/2*sqrt(5))"]
    F2 = make_field(2)
    assert shintani_domain(F2).describe() == ["C(1)", "C(1, 3 + 2*sqrt(2))"]


def test_multiplicity_examples(F):
    D = shintani_domain(F)
    one_cone = ConeSet((Cone((F.elem(1),)),))
    assert multiplicity(F.elem(1, 1), [(one_cone, 1)]) == 0
    assert multiplicity(F.elem(3), [(one_cone, 1)]) == 1
    assert multiplicity(F.elem(1) + F.totally_positive_unit, [(ConeSet((D.cones[1],)), 1)]) == 1
    with pytest.raises(ValueError):
        multiplicity(F.elem(0), [(D, 1)])


def test_degenerate_cones(F):
    with pytest.raises(DegenerateConeError):
        Cone((F.elem(1), F.elem(2)))
    with pytest.raises(DegenerateConeError):
        Cone((F.elem(0),))


@given(rats, rats)
def test_fundamental_domain(F, p, q):
    z = F.elem(p, q)
    if not z or not is_totally_positive(z):
        return
    hits = domain_translate(F, z, shintani_domain(F))
    assert len(hits) == 1


def test_translates_leave_domain(F):
    D = shintani_domain(F)
    eps = F.totally_positive_unit
    for z in sample_points(F, 300, seed=11, half_plane=False):
        if D.count(z):
            assert D.count(z * eps) == 0


@pytest.mark.parametrize("case,param", [("I", None), ("II", (0, 3)), ("II", (1, 2)), ("III", None)])
def test_refine_preserves_points(F, case, param):
    cone = shintani_domain(F).cones[1]
    pieces = refine(cone, case, param)
    base = ConeSet((cone,))
    special = [F.elem(1), F.totally_positive_unit, F.elem(1) + F.totally_positive_unit]
    for z in sample_points(F, 400, seed=5, special=special):
        assert base.count(z) == pieces.count(z)


def test_refine_one_dimensional(F):
    assert refine(Cone((F.elem(1),)), "II", 2).describe() == ["C(2)"]
    with pytest.raises(ValueError):
        refine(Cone((F.elem(1),)), "III")
    with pytest.raises(ValueError):
        refine(Cone((F.elem(1),)), "IV")


def test_refine_set_replaces_in_place(F):
    D = shintani_domain(F)
    D2 = refine_set(D, 1, "III")
    assert len(D2) == 4 and D2.cones[0] == D.cones[0]


def test_rset_entry_bounds():
    with pytest.raises(ValueError):
        RSetEntry((Fr(0),))
    with pytest.raises(ValueError):
        RSetEntry((Fr(3, 2),))


@pytest.mark.parametrize("key", sorted(FROZEN_R))
def test_frozen_r_sets(F, group, key):
    label, j = key
    c = next(c for c in group.classes if c.label == label)
    cone = shintani_domain(F).cones[j]
    got = [e.x for e in r_set(group, [c], F.unit_ideal(), cone)]
    assert got == FROZEN_R[key]


def test_paired_r_sets_are_unions(F, group):
    D = shintani_domain(F)
    for c in group.classes:
        partner = group.conjugation_class(2) * c
        for j, cone in enumerate(D):
            paired = {e.x for e in r_set_for(group, c, F.unit_ideal(), cone, pair_with_conjugate=2)}
            assert paired == set(FROZEN_R[(c.label, j)]) | set(FROZEN_R[(partner.label, j)])


def test_r_set_membership_predicate(F, group):
    a_c = F.ideal(3)
    g = (a_c * group.modulus.m_ideal).generator
    cone = shintani_domain(F).cones[1]
    for c in group.classes:
        for e in r_set(group, [c], a_c, cone):
            z = cone.point(e.x)
            assert (a_c * group.modulus.m_ideal).inverse().contains(z)
            assert group.class_of_element(z * g) == c


def test_r_set_partition_against_brute_force(F, group):
    # every lattice point of (a_c m)^-1 in the cone with class c is x + n for some x in R(c)
    cone = shintani_domain(F).cones[1]
    v1, v2 = cone.basis
    g = group.modulus.m_ideal.generator
    for c in group.classes:
        R = {e.x for e in r_set(group, [c], F.unit_ideal(), cone)}
        for i in range(1, 20):
            for j in range(1, 20):
                x1, x2 = Fr(i, 4), Fr(j, 4)
                z = v1 * x1 + v2 * x2
                if not F.is_integral(z * g) or not group.coprime(z * g):
                    continue
                in_class = group.class_of_element(z * g) == c
                frac = tuple(t - (t.numerator - 1) // t.denominator for t in (x1, x2))
                assert in_class == (frac in R)


def test_lattice_points_one_dimensional(F):
    pts = lattice_points(Cone((F.elem(1),)), F.elem(4))
    assert pts == [(Fr(1, 4),), (Fr(1, 2),), (Fr(3, 4),), (Fr(1),)]


def test_keylemma_nu(F):
    nu = keylemma_nu(F)
    assert nu == F.elem(-2, 1)
    assert nu.sign(1) > 0 > nu.sign(2)


def test_keylemma_construction(F, group):
    data = keylemma_construct(F, group.modulus)
    assert is_totally_positive(data.eps1)
    special = [F.elem(1), data.nu, data.eps1, data.eps1 * data.nu, F.elem(1) + data.nu]
    pts = sample_points(F, 1000, seed=20240601, special=special)
    assert all(data.check_point(z) for z in pts)


@pytest.mark.parametrize("d", [2, 13, 17, 29])
def test_keylemma_other_fields(d):
    K = make_field(d)
    data = keylemma_construct(K)
    assert data.nu.sign(1) > 0 > data.nu.sign(2)
    special = [K.elem(1), data.nu, data.eps1]
    assert all(data.check_point(z) for z in sample_points(K, 300, seed=d, special=special))


def test_keylemma_needs_closed_sector(F):
    # with only the open sector between 1 and nu, boundary rays are miscounted
    data = keylemma_construct(F)
    open_x1 = ConeSet((Cone((F.elem(1), data.nu)),))
    bad = KeyLemmaData(data.D, data.nu, open_x1, data.eps1)
    pts = sample_points(F, 300, seed=3, special=[F.elem(1), data.nu])
    assert any(not bad.check_point(z) for z in pts)


def test_sample_points_half_plane(F):
    for z in sample_points(F, 100, seed=1):
        assert z.sign(1) > 0
    for z in sample_points(F, 100, seed=1, half_plane=False):
        assert is_totally_positive(z)
