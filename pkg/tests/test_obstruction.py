import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import chart, fields
from supersplit.builders import derham_shear, fix_cot, fix_ns2, fix_s2, p1_weights11_deformed
from supersplit.grassmann import SuperElement
from supersplit.obstruction import (EULER_CONSTANT, ChartAutomorphism, comparison_automorphism,
                                    euler_obstruction_compare, exp_derivation, jacobian_obstruction,
                                    log_automorphism, obstruction_verdict, primary_obstruction)
from supersplit.svector import VectorField

S3 = chart(3, invertible=False)


def even_fields_of_degree(m):
    return fields(S3, 0, 3).map(lambda v: v.above(m))


def test_obstruction_golden():
    eta = primary_obstruction(fix_ns2())
    assert str(eta[(0, 1)]) == "-1*x^-1*t1*t2*d/dx"
    verdict, res = obstruction_verdict(eta)
    assert verdict == "NONTRIVIAL" and res.route == "laurent"
    assert primary_obstruction(fix_s2()).is_zero()
    assert obstruction_verdict(primary_obstruction(p1_weights11_deformed()))[0] == "TRIVIAL"


@pytest.mark.parametrize("build", [fix_ns2, fix_s2, fix_cot, p1_weights11_deformed])
def test_two_routes_agree(build):
    a = build()
    assert primary_obstruction(a) == jacobian_obstruction(a)


def test_comparison_is_in_level_two():
    a = fix_ns2()
    c = comparison_automorphism(a, 0, 1)
    assert c.in_level(2) and not c.in_level(3)
    assert c.level_of() == 2


def test_log_of_a_shear():
    sig = S3
    x, t1, t2 = (SuperElement.coordinate(sig, z) for z in ("x", "t1", "t2"))
    g = ChartAutomorphism(sig, {"x": x + x * t1 * t2})
    assert str(log_automorphism(g)) == "1*x*t1*t2*d/dx"


def test_exp_of_derham_shear_on_cotangent_chart():
    sig = fix_cot().transition(0, 1).source_signature
    x1 = SuperElement.coordinate(sig, "x1")
    g = exp_derivation(derham_shear(sig, [x1.invert(), SuperElement.zero(sig)]))
    assert str(g.images["x2"]) == "1*x2 + 1*x1^-1*t1*t2"
    assert g.images["x1"] == x1
    assert g.images["t1"] == SuperElement.coordinate(sig, "t1")


@given(st.integers(1, 3).flatmap(lambda m: st.tuples(st.just(m), even_fields_of_degree(m))))
def test_exp_log_roundtrip_and_levels(data):
    m, v = data
    g = exp_derivation(v)
    assert log_automorphism(g) == v
    assert exp_derivation(log_automorphism(g)) == g
    assert g.in_level(m)
    if v:
        assert g.level_of() == v.filtration_degree()
    else:
        assert g == ChartAutomorphism.identity(S3)


@settings(max_examples=30)
@given(even_fields_of_degree(1), even_fields_of_degree(2))
def test_group_law_on_levels(u, v):
    g, h = exp_derivation(u), exp_derivation(v)
    gh = g.compose(h)
    assert gh.in_level(1)
    if not u:
        assert gh == h


def test_exp_rejects_odd_or_degree_zero():
    with pytest.raises(ValueError):
        exp_derivation(VectorField.partial(S3, "t1"))
    with pytest.raises(ValueError):
        exp_derivation(VectorField.partial(S3, "x"))


def test_euler_comparison_constant():
    rep = euler_obstruction_compare(fix_ns2())
    assert rep.passed and rep.constant == EULER_CONSTANT == -2
    rep = euler_obstruction_compare(fix_s2())
    assert rep.passed and rep.constant is None
