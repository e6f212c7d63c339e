from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import chart, elements
from supersplit.atlas import is_split_presentation, split_model_of
from supersplit.builders import (affine_chart, fix_aff2, fix_aff2_twisted, fix_ns2, fix_s2, flat_connections,
                                 p1_weights11_deformed, twisted_connection)
from supersplit.connection import ChristoffelData, transport_connection
from supersplit.grassmann import SuperElement
from supersplit.koszul import (LiftError, LiftFamily, alternating_factorial_constant, check_projectors,
                               coordinate_test_functions, euler_cocycle, euler_differential, koszul_iterate,
                               koszul_split, odd_projector_product, projector, splitting_operator, staged_lift,
                               zero_projector_product)
from supersplit.svector import VectorField, euler_field

S2 = chart(2, invertible=False)
S3 = chart(3, invertible=False)


def theta12_dx(sig, coeff=None):
    c = coeff if coeff is not None else SuperElement.one(sig)
    t1, t2 = (SuperElement.coordinate(sig, z) for z in sig.odd_names[:2])
    return (c * t1 * t2) * VectorField.partial(sig, sig.even_names[0])


def test_euler_differential_verdicts():
    assert euler_differential(fix_s2()).verdict == "SPLIT"
    rep = euler_differential(fix_ns2())
    assert rep.verdict == "NONSPLIT"
    assert str(rep.cocycle[(0, 1)]) == "2*x^-1*t1*t2*d/dx"
    assert [(s.degree, s.verdict, s.route) for s in rep.stages] == [(2, "UNSOLVABLE", "laurent")]
    assert euler_differential(p1_weights11_deformed()).verdict == "SPLIT"


def test_lift_below_first_stage_is_an_error():
    a = fix_ns2()
    fam = {alpha: VectorField.partial(sig, sig.odd_names[0]) for alpha, sig in a.charts.items()}
    with pytest.raises(LiftError):
        staged_lift(a, fam, 2)


def test_euler_cocycle_on_split_model_vanishes():
    assert euler_cocycle(fix_s2()).is_zero()


def test_koszul_flat_and_twisted():
    a = affine_chart(2)
    sig = a.charts[0]
    flat = koszul_iterate(a, flat_connections(a))
    assert flat.fields[0] == euler_field(sig)
    twisted = koszul_iterate(a, {0: twisted_connection(sig)})
    h = twisted.fields[0]
    assert h == euler_field(sig) - theta12_dx(sig).scale(2)
    assert not twisted.residuals[0]
    assert str(h) == "-2*t1*t2*d/dx + 1*t1*d/dt1 + 1*t2*d/dt2"


def test_koszul_split_on_twisted_gluing():
    a = fix_aff2_twisted()
    g1 = ChristoffelData.flat(a.charts[1])
    conn = {1: g1, 0: transport_connection(g1, a.transition(0, 1))}
    k, s = koszul_split(a, conn)
    assert str(s.changes[0].images["x"]) == "1*x + 1*x*t1*t2"
    assert is_split_presentation(s.atlas)
    assert all(s.euler_in_new.values())
    assert all(c.passed for c in s.projector_checks.values())


def test_koszul_split_on_fix_aff2_is_a_fixed_point():
    a = fix_aff2()
    _, s = koszul_split(a, flat_connections(a))
    assert split_model_of(s.atlas) == s.atlas
    assert s.atlas == a


def test_uniqueness_across_starting_lifts():
    a = affine_chart(3)
    sig = a.charts[0]
    conn = {0: twisted_connection(sig)}
    x = SuperElement.coordinate(sig, "x")
    starts = [None, LiftFamily(2, {0: euler_field(sig) + theta12_dx(sig, x + 3)})]
    results = [koszul_iterate(a, conn, start).fields[0] for start in starts]
    assert results[0] == results[1]


def test_start_must_have_euler_initial_form():
    a = affine_chart(2)
    with pytest.raises(LiftError):
        koszul_iterate(a, flat_connections(a), LiftFamily(2, {0: euler_field(a.charts[0]).scale(2)}))


def test_connection_must_be_global():
    a = fix_aff2_twisted()
    with pytest.raises(LiftError):
        koszul_iterate(a, flat_connections(a))


def koszul_field(q):
    a = affine_chart(q)
    return koszul_iterate(a, {0: twisted_connection(a.charts[0])}).fields[0]


@pytest.mark.parametrize("q", [1, 2, 3])
def test_projector_algebra(q):
    sig = affine_chart(q).charts[0]
    h = koszul_field(q) if q >= 2 else euler_field(sig)
    assert check_projectors(h, q, coordinate_test_functions(sig)).passed


@given(elements(S3, 4))
def test_splitting_operator_on_initial_forms(f):
    h = koszul_field(3).with_signature(S3)
    if not f:
        return
    d = f.jadic_degree()
    for m in range(4):
        g = splitting_operator(h, m, f)
        assert g.graded_part(d) == f.initial_form().scale(m - d)


@given(elements(S3, 4))
def test_product_formulas_match_projectors(f):
    h = koszul_field(3).with_signature(S3)
    assert zero_projector_product(h, f, 3) == projector(h, 0, 3)(f)


def test_odd_projector_normalization():
    q = 3
    h = koszul_field(q)
    sig = h.signature
    t1 = SuperElement.coordinate(sig, "t1")
    assert factorial(q - 1) == 2
    assert alternating_factorial_constant(q) == 5
    assert odd_projector_product(h, t1, q) == t1
    assert odd_projector_product(h, t1, q) == projector(h, 1, q)(t1)
    wrong = odd_projector_product(h, t1, q, alternating_factorial_constant(q))
    assert wrong == t1.scale(Fraction(2, 5))
    assert alternating_factorial_constant(2) == factorial(1)
