from fractions import Fraction

from supnil.laurent import LaurentPoly


def test_zero_trimming():
    p = LaurentPoly({3: 1, 5: 0})
    assert p.coeffs == {3: Fraction(1)}
    assert not LaurentPoly([(2, Fraction(1, 2)), (2, Fraction(-1, 2))])


def test_arithmetic_exact():
    p = LaurentPoly({-2: Fraction(1, 3), 0: 2})
    q = LaurentPoly({-2: Fraction(-1, 3), 1: 5})
    s = p + q
    assert s.coeffs == {0: Fraction(2), 1: Fraction(5)}
    prod = p * q
    assert prod.coeffs[-4] == Fraction(-1, 9)
    assert prod.coeffs[-1] == Fraction(5, 3)
    assert prod.coeffs[-2] == Fraction(-2, 3)


def test_derivative_and_shift():
    p = LaurentPoly({-3: 2, 0: 7, 4: 1})
    d = p.derivative()
    assert d.coeffs == {-4: Fraction(-6), 3: Fraction(4)}
    assert p.shift(2).coeffs == {-1: Fraction(2), 2: Fraction(7), 6: Fraction(1)}


def test_reciprocal_substitution_involution():
    p = LaurentPoly({-5: 3, 2: Fraction(1, 7)})
    assert p.reciprocal_substitution().reciprocal_substitution() == p
    assert p.reciprocal_substitution().coeffs == {5: Fraction(3), -2: Fraction(1, 7)}


def test_restrict_and_bounds():
    p = LaurentPoly({-3: 1, -1: 2, 0: 3, 4: 5})
    assert p.restrict(lo=0).coeffs == {0: Fraction(3), 4: Fraction(5)}
    assert p.restrict(lo=-1, hi=0).coeffs == {-1: Fraction(2), 0: Fraction(3)}
    assert p.min_exp() == -3 and p.max_exp() == 4
    assert not p.is_polynomial()
    assert p.restrict(lo=0).is_polynomial()


def test_content_normalized():
    p = LaurentPoly({0: Fraction(2, 3), 2: Fraction(-4, 3)})
    norm, content = p.content_normalized()
    assert norm * content == p
    assert norm.coeffs[norm.max_exp()] > 0


def test_str_round_readable():
    assert str(LaurentPoly()) == "0"
    assert "z^-2" in str(LaurentPoly({-2: 1}))
