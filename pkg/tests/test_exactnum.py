from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from shintani_stark.exactnum import (IDENTITY_NAMES, BernoulliCache, CapacityError, FmlArgs, IdentitySampler,
                                     ResampleSignal, bernoulli_number, bernoulli_poly, check_identity,
                                     compositions, prp_sides, run_identity_suite, zeta_fml, zeta_fml_args)
from shintani_stark.qfield import make_field

F = Fraction

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=30)
nonzero = rationals.filter(lambda q: q != 0)


def test_bernoulli_poly_examples():
    assert bernoulli_poly(0, F(7, 3)) == 1
    assert bernoulli_poly(1, F(1, 2)) == 0
    assert bernoulli_poly(2, 0) == F(1, 6)


def test_bernoulli_table_conventions():
    assert bernoulli_number(0) == 1
    assert bernoulli_number(1) == F(-1, 2)
    assert all(bernoulli_number(k) == 0 for k in range(3, 64, 2))
    assert bernoulli_number(12) == F(-691, 2730)


def test_bernoulli_capacity():
    with pytest.raises(CapacityError):
        bernoulli_poly(65, F(1, 3))
    small = BernoulliCache(8)
    with pytest.raises(CapacityError):
        small.number(9)


@given(rationals, st.integers(min_value=1, max_value=20))
def test_bernoulli_difference_equation(x, l):
    # B_l(x + 1) - B_l(x) = l x^(l-1)
    assert bernoulli_poly(l, x + 1) - bernoulli_poly(l, x) == l * x ** (l - 1)


def test_zeta_fml_examples():
    assert zeta_fml(1, (F(2),), (F(1),)) == F(-1, 2)
    assert zeta_fml(2, (), ()) == 0
    assert zeta_fml(1, (), ()) == 1


def test_zeta_fml_riemann_oracle():
    val = zeta_fml(2, (F(1),), (F(1),))
    assert val == F(-1, 12)
    with mpmath.workprec(100):
        assert abs(mpmath.zeta(-1) - mpmath.mpf(val.numerator) / val.denominator) < mpmath.mpf(10) ** -25


def test_zeta_fml_args_wrapper():
    assert zeta_fml_args(FmlArgs(1, (F(2),), (F(1),))) == F(-1, 2)
    with pytest.raises(ValueError):
        FmlArgs(1, (F(0),), (F(1),))
    with pytest.raises(ValueError):
        FmlArgs(0)


def test_compositions_count():
    assert len(list(compositions(4, 3))) == 15
    assert list(compositions(0, 0)) == [()]
    assert list(compositions(1, 0)) == []


@given(st.integers(1, 3), st.lists(st.tuples(nonzero, rationals), min_size=1, max_size=3), st.randoms())
def test_zeta_fml_permutation_symmetry(m, pairs, rnd):
    a, x = zip(*pairs)
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    a2, x2 = zip(*shuffled)
    assert zeta_fml(m, a, x) == zeta_fml(m, a2, x2)


@given(st.integers(1, 4), nonzero, rationals)
def test_zeta_fml_one_dimensional_closed_form(m, a, x):
    # r = 1: -a^(m-1) B_m(x) / m
    assert zeta_fml(m, (a,), (x,)) == -a ** (m - 1) * bernoulli_poly(m, x) / m


@given(st.integers(1, 3), st.lists(st.tuples(nonzero, rationals), min_size=1, max_size=2))
def test_zeta_fml_generic_over_quadratic_field(m, pairs):
    K = make_field(5)
    a, x = zip(*pairs)
    lifted = zeta_fml(m, tuple(K.elem(ai) for ai in a), x)
    assert lifted == K.elem(zeta_fml(m, a, x))


def test_identity_examples():
    assert check_identity("ABZ1", {"m": 2, "a": (F(3), F(2)), "x": (F(1, 4), F(1, 2))})
    assert check_identity("PRP", {"a": (F(2),), "a2": (F(3),), "b": (F(5),), "b2": (F(7),)})
    assert check_identity("ABZ3", {"m": 1, "a": (F(1), F(1)), "x": (F(1, 2), F(1, 2)), "n": 3})


def test_abz3_printed_shift_is_not_an_identity():
    # shifting x_1 by h without dividing by n breaks the multiplication formula
    a, x, n = (F(1), F(1)), (F(1, 2), F(1, 2)), 3
    lhs = zeta_fml(1, a, x)
    wrong = sum(zeta_fml(1, (n * a[0], a[1]), (x[0] + h, x[1])) for h in range(n))
    assert lhs == F(-1, 12)
    assert wrong == F(85, 12)


def test_prp_resample_signal():
    with pytest.raises(ResampleSignal):
        prp_sides((F(1), F(2)), (F(1), F(2)), (F(1), F(1)), (F(1), F(1)))


@pytest.mark.parametrize("name", IDENTITY_NAMES)
def test_identity_suite_sample(name):
    passed, total = run_identity_suite(name, count=150, seed=7)
    assert passed == total == 150


def test_sampler_is_seeded():
    a = IdentitySampler(seed=3)
    b = IdentitySampler(seed=3)
    assert [a.draw("ABZ4") for _ in range(5)] == [b.draw("ABZ4") for _ in range(5)]


@given(st.integers(1, 3), nonzero, nonzero, rationals, rationals)
def test_abz4_two_dimensional(m, a1, a2, x1, x2):
    if a1 + a2 == 0:
        return
    assert check_identity("ABZ4", {"m": m, "a": (a1, a2), "x": (x1, x2)})
    assert check_identity("ABZ5", {"m": m, "a": (a1, a2), "x": (x1, x2)})


def test_unknown_identity():
    with pytest.raises(ValueError):
        check_identity("ABZ9", {"m": 1, "a": (), "x": ()})
