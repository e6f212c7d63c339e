from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supersplit.atlas import split_model_of
from supersplit.builders import (fix_cot, fix_s2, line_bundle, log_ratio_generator, omega_coboundary,
                                 projective_reduced)
from supersplit.cech import (Cochain0, Cochain1, FieldModel, Grading, NotACocycleError, class_equal, coboundary,
                             cocycle_check, cocycle_defects, compare_classes, degree_window, find_proportionality,
                             h1_dimension, h1_gap_basis, is_trivial, laurent_profile, solve_coboundary)
from supersplit.grassmann import SuperElement

S2_MODEL = FieldModel(fix_s2(), 2)
SIG = S2_MODEL.pair_signature(0, 1)
SLOT = ("x", (0, 1))


def monomial_cocycle(j: int, coeff=1) -> Cochain1:
    return Cochain1(S2_MODEL, {(0, 1): S2_MODEL.element(SIG, SLOT, (j,), Fraction(coeff))})


def test_degree_two_model_on_fix_s2():
    assert laurent_profile(S2_MODEL) is not None
    assert h1_dimension(S2_MODEL) == 1
    assert [str(c[(0, 1)]) for c in h1_gap_basis(S2_MODEL)] == ["1*x^-1*t1*t2*d/dx"]
    assert Grading(S2_MODEL).rank == 3
    assert Grading(S2_MODEL).definite(0)


def test_x_inverse_is_the_gap():
    for route in ("laurent", "graded"):
        res = solve_coboundary(monomial_cocycle(-1), route=route)
        assert res.verdict == "UNSOLVABLE"
    res = solve_coboundary(monomial_cocycle(-1), window=(-6, 6), route="window")
    assert res.verdict == "UNDECIDED" and res.window == (-6, 6)


def test_regular_monomials_are_coboundaries():
    res = solve_coboundary(monomial_cocycle(1))
    assert str(res.cochain[0]) == "-1*x*t1*t2*d/dx"
    for j in (-2, -3):
        res = solve_coboundary(monomial_cocycle(j))
        assert res.solved and not res.cochain[0]
        assert coboundary(res.cochain) == monomial_cocycle(j)


@settings(max_examples=25)
@given(st.lists(st.tuples(st.integers(-4, 3), st.integers(-3, 3)), max_size=4))
def test_routes_agree(terms):
    c = Cochain1(S2_MODEL, {(0, 1): S2_MODEL.zero(SIG)})
    for j, k in terms:
        c = c + monomial_cocycle(j, k)
    verdicts = {}
    for route in ("laurent", "graded", "window"):
        res = solve_coboundary(c, window=(-8, 8), route=route)
        verdicts[route] = res.solved
        if res.solved:
            assert coboundary(res.cochain) == c
    assert verdicts["laurent"] == verdicts["graded"]
    if verdicts["laurent"]:
        assert verdicts["window"]


@pytest.mark.parametrize("n", range(-4, 3))
def test_line_bundle_cohomology(n):
    model = line_bundle(n)
    assert h1_dimension(model) == max(0, -n - 1)
    for c in h1_gap_basis(model):
        assert solve_coboundary(c, route="graded").verdict == "UNSOLVABLE"


def test_form_generator_on_p2():
    red = projective_reduced(2)
    w = log_ratio_generator(red)
    assert cocycle_check(w)
    res = solve_coboundary(w)
    assert res.verdict == "UNSOLVABLE" and res.route == "graded"
    assert is_trivial(w) == "NONTRIVIAL"


@settings(max_examples=15)
@given(st.integers(-2, 2), st.integers(0, 2), st.integers(-3, 3))
def test_coboundaries_solve_on_p2(a, b, k):
    red = projective_reduced(2)
    sig = red.charts[0]
    x1, x2 = (SuperElement.coordinate(sig, z) for z in sig.even_names)
    ds = omega_coboundary(red, {0: {"x2": (x1 ** max(a, 0) * x2 ** b).scale(k)}})
    res = solve_coboundary(ds)
    assert res.solved and coboundary(res.cochain) == ds
    w = log_ratio_generator(red)
    assert class_equal(w + ds, w)
    prop = find_proportionality(w.scale(3) + ds, w)
    assert prop.constants == [3]


def test_non_cocycle_is_rejected():
    red = projective_reduced(2)
    w = log_ratio_generator(red)
    bad = Cochain1(w.model, {**w.entries, (1, 2): w.model.zero(red.transition(1, 2).source_signature)})
    assert cocycle_defects(bad) == [(0, 1, 2)]
    with pytest.raises(NotACocycleError):
        solve_coboundary(bad)


def test_compare_classes_on_split_model():
    a = fix_cot()
    model = FieldModel(split_model_of(a), 2, even_only=True)
    zero = Cochain1(model, {k: model.zero(a.transition(*k).source_signature) for k in a.pairs()})
    cmp = compare_classes(zero, zero)
    assert cmp.verdict == "EQUAL"


def test_degree_window_env():
    assert degree_window({}) == (-12, 12)
    assert degree_window({"SUPERSPLIT_WINDOW": "5"}) == (-5, 5)
    assert degree_window({"SUPERSPLIT_WINDOW": "-3,7"}) == (-3, 7)
    with pytest.raises(ValueError):
        degree_window({"SUPERSPLIT_WINDOW": "wide"})
    with pytest.raises(ValueError):
        degree_window({"SUPERSPLIT_WINDOW": "4,1"})


def test_zero_cochain_has_zero_coboundary():
    model = FieldModel(fix_s2(), 0)
    c0 = Cochain0(model, {alpha: model.zero(sig) for alpha, sig in fix_s2().charts.items()})
    assert coboundary(c0).is_zero()
