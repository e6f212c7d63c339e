from fractions import Fraction

import pytest
from hypothesis import given

from strategies import RING, laurent_polys
from supersplit.coeffring import (ContextError, LaurentPoly, LaurentRing, NotAUnitError, render_terms,
                                  ring_arith, unit_invert)


def test_rendering_keeps_coefficients():
    x = RING.var("x")
    assert str(x) == "1*x"
    assert str(RING.zero()) == "0"
    assert str(-x ** -1 + RING.const(Fraction(1, 2))) == "-1*x^-1 + 1/2"


def test_render_terms_signs():
    assert render_terms([(Fraction(2), ["x"]), (Fraction(-1), [])]) == "2*x - 1"
    assert render_terms([]) == "0"


def test_negative_exponent_needs_invertible():
    ring = LaurentRing(("x", "y"))
    with pytest.raises(ContextError):
        LaurentPoly(ring, {(-1, 0): 1})


def test_mixed_rings_are_rejected():
    other = LaurentRing(("u",))
    with pytest.raises(ContextError):
        RING.var("x") + other.var("u")


def test_unit_invert_monomial():
    m = RING.monomial((-2, 1), Fraction(3, 4)).with_ring(RING)
    with pytest.raises(NotAUnitError):
        unit_invert(m)
    m = RING.monomial((-2, 0), Fraction(3, 4))
    assert m * unit_invert(m) == RING.one()


def test_sum_is_not_a_unit():
    with pytest.raises(NotAUnitError):
        unit_invert(RING.one() + RING.var("x"))


def test_ring_arith_matches_operators():
    x, y = RING.var("x"), RING.var("y")
    assert ring_arith(x, y, "add") == x + y
    assert ring_arith(x, y, "mul") == x * y
    assert ring_arith(x, None, "neg") == -x


@given(laurent_polys(), laurent_polys(), laurent_polys())
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == RING.zero()


@given(laurent_polys(), laurent_polys())
def test_derivative_is_a_derivation(a, b):
    for v in RING.variables:
        assert (a * b).derivative(v) == a.derivative(v) * b + a * b.derivative(v)


@given(laurent_polys())
def test_compose_with_identity(a):
    assert a.compose([RING.var(v) for v in RING.variables], RING) == a
