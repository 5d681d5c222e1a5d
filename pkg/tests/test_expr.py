import pytest

from supnil.derivations import BASE
from supnil.expr import (
    ExprError,
    format_derivation,
    format_function,
    parse_derivation,
    parse_function,
)
from supnil.laurent import LaurentPoly

NAMES = ["theta1", "theta2", "theta3", "eta1", "eta2", "eta3", "eta4"]


def test_parse_mixed_term():
    d = parse_derivation(
        "(3/2)z^-2*eta1*eta3*eta4*d(theta1) + z^4*theta1*eta1*d(z)", NAMES
    )
    eta_mask = (1 << 3) | (1 << 5) | (1 << 6)
    th_mask = 1 | (1 << 3)
    assert d.terms[(eta_mask, 0)] == LaurentPoly({-2: "3/2"})
    assert d.terms[(th_mask, BASE)] == LaurentPoly({4: 1})


def test_whitespace_insensitive():
    a = parse_derivation("z^2 * theta1 * d(z)   -  eta1*eta2 * d(eta3)", NAMES)
    b = parse_derivation("z^2*theta1*d(z)-eta1*eta2*d(eta3)", NAMES)
    assert a == b


def test_parenthesized_sums_distribute():
    a = parse_derivation("(z^-2*eta1 + z^-8*eta2)*eta3*eta4*d(theta1)", NAMES)
    b = parse_derivation(
        "z^-2*eta1*eta3*eta4*d(theta1) + z^-8*eta2*eta3*eta4*d(theta1)", NAMES
    )
    assert a == b


def test_sign_collection():
    f = parse_function("eta2*eta1", NAMES)
    g = parse_function("-eta1*eta2", NAMES)
    assert f == g


def test_repeated_generator_vanishes():
    assert not parse_function("eta1*z*eta1", NAMES)


def test_rational_literals():
    f = parse_function("1/2*z^-1 + (3/4)*z", NAMES)
    assert f.terms[0] == LaurentPoly({-1: "1/2", 1: "3/4"})


def test_errors_are_precise():
    with pytest.raises(ExprError, match="unknown generator"):
        parse_function("xi1", NAMES)
    with pytest.raises(ExprError, match="unknown direction"):
        parse_derivation("d(xi9)", NAMES)
    with pytest.raises(ExprError, match="direction"):
        parse_derivation("d(z)*z", NAMES)
    with pytest.raises(ExprError, match="no direction"):
        parse_derivation("z^2*theta1", NAMES)
    with pytest.raises(ExprError, match="cannot contain"):
        parse_function("z*d(z)", NAMES)
    with pytest.raises(ExprError, match="integer exponent"):
        parse_function("z^(1/2)", NAMES)


def test_format_parse_round_trip(names, fields):
    for x in fields[::97]:
        text = format_derivation(x, names)
        assert parse_derivation(text, names) == x


def test_format_function_round_trip():
    f = parse_function("(3/2)*z^-2*eta1 - theta2*eta3 + 5", NAMES)
    assert parse_function(format_function(f, NAMES), NAMES) == f


def test_u1_chart_variable():
    d = parse_derivation("w^3*theta1*d(w)", NAMES, base_var="w")
    assert format_derivation(d, NAMES, base_var="w") == "w^3*theta1*d(w)"
