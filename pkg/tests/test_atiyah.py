import pytest

from supersplit.atiyah import (OBSTRUCTION_CONSTANT, affine_atiyah, affine_atiyah_restricted, atiyah_verdict,
                               bundle_atiyah, check_constructed_connection, connection_from_trivial_class,
                               dual_matrices, dualize_endo, dw_verify, initial_form_defects, line_bundle_matrices,
                               tangent_matrices)
from supersplit.builders import fix_aff2, fix_aff2_twisted, fix_ns2, fix_s2, reduced_p1
from supersplit.cech import compare_classes
from supersplit.connection import check_global
from supersplit.obstruction import primary_obstruction


def test_tangent_atiyah_of_p1():
    red = reduced_p1()
    at = bundle_atiyah(red, tangent_matrices(red))
    assert str(at[(0, 1)]) == "[0, 0, 0]: -2*x^-1"
    assert atiyah_verdict(at) == "NONTRIVIAL"


@pytest.mark.parametrize("n", range(-3, 4))
def test_line_bundle_atiyah(n):
    red = reduced_p1()
    at = bundle_atiyah(red, line_bundle_matrices(red, n))
    assert atiyah_verdict(at) == ("TRIVIAL" if n == 0 else "NONTRIVIAL")


@pytest.mark.parametrize("build", [fix_aff2, fix_aff2_twisted])
def test_vanishing_class_gives_a_global_connection(build):
    a = build()
    assert atiyah_verdict(affine_atiyah(a)) == "TRIVIAL"
    conn, ok = check_constructed_connection(a)
    assert ok
    assert check_global(conn, a).passed


def test_no_connection_on_p1_superspace():
    assert connection_from_trivial_class(fix_s2()) is None


def test_decomposition_on_split_fixture():
    rep = dw_verify(fix_s2())
    assert rep.passed and rep.obstruction_zero
    assert "decomposition: PASS" in rep.render()


def test_decomposition_on_nonsplit_fixture():
    rep = dw_verify(fix_ns2())
    assert rep.passed and not rep.obstruction_zero
    assert rep.constant == OBSTRUCTION_CONSTANT == -1
    assert str(rep.blocks.obstruction[(0, 1)]) == "1*x^-1*t1*t2*d/dx"
    eta = primary_obstruction(fix_ns2())
    assert compare_classes(rep.blocks.obstruction, eta.scale(-1)).equal


def test_mixed_block_is_the_odd_bundle_class():
    blocks = affine_atiyah_restricted(fix_ns2())
    red = blocks.reduced
    dual = bundle_atiyah(red, dual_matrices(blocks.odd_matrices, red))
    assert compare_classes(blocks.mixed, dualize_endo(dual, blocks.mixed.model)).equal
    assert str(blocks.evev[(0, 1)]) == "[0, 0, 0]: -2*x^-1"


def test_initial_form_relation():
    assert initial_form_defects(fix_ns2()) == []
    assert initial_form_defects(fix_s2()) == []
