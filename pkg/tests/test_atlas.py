import pytest

from supersplit.atlas import (Atlas, AtlasError, TransitionMap, reduced_data, require_valid, split_model_of,
                              validate_atlas)
from supersplit.builders import (affine_chart, fix_cot, fix_ns2, fix_s2, p1_family, projective_reduced)
from supersplit.grassmann import ParityError, SuperElement
from supersplit.linalg import format_matrix


def test_fix_s2_validates():
    assert validate_atlas(fix_s2()).passed


def test_fix_ns2_inverse():
    t = fix_ns2().transition(0, 1)
    inv = t.inverse
    assert str(inv.images["x"]) == "1*y^-1 + 1*y^-3*e1*e2"
    for z in t.source_signature.names:
        assert t.pullback(inv.images[z]) == SuperElement.coordinate(t.source_signature, z)
    for z in t.target_signature.names:
        assert inv.pullback(t.images[z]) == SuperElement.coordinate(inv.source_signature, z)


def test_transition_either_direction():
    a = fix_ns2()
    assert a.transition(1, 0) is a.transition(0, 1).inverse


def test_parity_failure_is_reported():
    a = fix_ns2()
    t = a.transition(0, 1)
    images = dict(t.images)
    images["e1"] = SuperElement.coordinate(t.source_signature, "x")
    bad = a.with_transitions([TransitionMap(0, 1, t.source_signature, t.target_signature, images)])
    report = validate_atlas(bad)
    assert not report.passed
    assert [c.name for c in report.failures()] == ["parity 0-1"]
    assert "FAIL parity 0-1" in report.render()
    with pytest.raises(AtlasError):
        require_valid(bad)


def test_split_model():
    assert split_model_of(fix_ns2()) == fix_s2()
    assert split_model_of(fix_s2()) == fix_s2()
    c = affine_chart(2)
    assert split_model_of(c) == c


def test_reduced_data():
    red, mats = reduced_data(fix_ns2())
    assert str(red.transition(0, 1).images["y"]) == "1*x^-1"
    assert format_matrix(mats[(0, 1)]) == "[1*x^-2, 0; 0, 1*x^-2]"
    red_s, mats_s = reduced_data(fix_s2())
    assert red == red_s and mats == mats_s


def test_reduced_data_of_cotangent_is_jacobian():
    red, mats = reduced_data(fix_cot())
    assert red == projective_reduced(2).with_transitions(red.transitions.values())
    assert format_matrix(mats[(0, 1)]) == "[-1*x1^-2, 0; -1*x1^-2*x2, 1*x1^-1]"


def test_triple_cocycle_on_p2():
    a = fix_cot()
    for tri in a.triples():
        for z in a.charts[tri[2]].names:
            f = SuperElement.coordinate(a.charts[tri[2]], z)
            direct = a.transition(tri[0], tri[2]).pullback(f)
            via = a.compose(*tri, f)
            assert via == direct.with_signature(via.signature)


def test_parity_violating_deformation():
    with pytest.raises(ParityError):
        p1_family((2, 2), {(0,): (1, -3)})


def test_unknown_chart():
    s = affine_chart(1).charts[0]
    t = TransitionMap(0, 5, s, s, {z: SuperElement.coordinate(s, z) for z in s.names})
    with pytest.raises(AtlasError):
        Atlas({0: s}, [t])


def test_framing_adapted_requires_invertible_odd_matrix():
    a = fix_s2()
    t = a.transition(0, 1)
    sig = t.source_signature
    images = dict(t.images)
    images["e2"] = SuperElement.coordinate(sig, "t1") * SuperElement.coordinate(sig, "x") ** -2
    bad = a.with_transitions([TransitionMap(0, 1, sig, t.target_signature, images)])
    names = [c.name for c in validate_atlas(bad).failures()]
    assert "framing-adapted 0-1" in names
