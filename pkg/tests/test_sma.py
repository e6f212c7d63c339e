from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supersplit.builders import (ALL_FIXTURES, affine_chart, fix_aff2, fix_aff2_twisted, fix_cot, fix_ns2,
                                 form_model, golden_documents, log_ratio_generator, projective_reduced)
from supersplit.cech import FieldModel
from supersplit.grassmann import ChartSignature
from supersplit.sma import (MAX_EXPONENT, ParseError, parse_atlas, parse_document, parse_expression, render_atlas,
                            render_document, roundtrip)

GOLDEN = Path(__file__).parent / "golden"

CONTEXTS = {
    "p2_omega.sma": lambda: projective_reduced(2),
    "c12_twisted_connection.sma": lambda: affine_chart(2),
    "c13_twisted_connection.sma": lambda: affine_chart(3),
    "fix_aff2_twisted_connection.sma": fix_aff2_twisted,
    "fix_aff2_connection.sma": fix_aff2,
}

NS2 = (GOLDEN / "fix_ns2.sma").read_text()


def golden_files():
    return sorted(p.name for p in GOLDEN.glob("*.sma"))


def test_golden_corpus_is_current():
    assert golden_files() == sorted(golden_documents())
    for name, text in golden_documents().items():
        assert (GOLDEN / name).read_text() == text, name


@pytest.mark.parametrize("name", golden_files())
def test_golden_roundtrip_is_byte_identical(name):
    raw = (GOLDEN / name).read_bytes()
    context = CONTEXTS[name]() if name in CONTEXTS else None
    assert roundtrip(raw, context).encode() == raw


@pytest.mark.parametrize("name", sorted(ALL_FIXTURES))
def test_parsed_atlas_equals_builder(name):
    a = ALL_FIXTURES[name]()
    assert parse_atlas((GOLDEN / f"{name}.sma").read_text()) == a


def test_header_forms_are_equivalent():
    alt = NS2.replace("[overlap 0 1]", "[overlap (0 1)]").replace("[chart 0]", "[chart (0)]")
    assert render_atlas(parse_atlas(alt)) == NS2


def test_comments_and_division():
    text = NS2.replace("y = 1*x^-1 + 1*x^-3*t1*t2", "y = 1/x + t1*t2/x^3  # inverse coordinate")
    assert text != NS2
    text = "# leading comment\n" + text
    assert parse_atlas(text) == fix_ns2()


def test_omega_cochain():
    red = projective_reduced(2)
    doc = parse_document((GOLDEN / "p2_omega.sma").read_text(), red)
    assert doc.cochain(form_model(red)) == log_ratio_generator(red)


def test_field_cochain_single_pair_block():
    a = fix_ns2()
    doc = parse_document("[cocycle (0 1)]\nentry = 2*x^-1*t1*t2*d/dx\n", a)
    c = doc.cochain(FieldModel(a, 2))
    assert str(c[(0, 1)]) == "2*x^-1*t1*t2*d/dx"


def test_cochain_kind_mismatch():
    red = projective_reduced(2)
    doc = parse_document("[cocycle]\nentry 0 1 = d/dx1\n", red)
    with pytest.raises(ParseError, match="d\\(x\\) tokens"):
        doc.cochain(form_model(red))


def test_empty_input_has_no_charts():
    for text in ("", "\n\n", "# nothing\n"):
        with pytest.raises(ParseError, match="no charts"):
            parse_atlas(text)


def test_parity_error_points_at_its_line():
    bad = NS2.replace("e1 = 1*x^-2*t1", "e1 = x")
    line = bad.splitlines().index("e1 = x") + 1
    with pytest.raises(ParseError) as exc:
        parse_atlas(bad)
    assert exc.value.line == line
    assert "parity: e1 is odd but its image is not odd" in str(exc.value)


def test_unknown_block_lists_expected_headers():
    with pytest.raises(ParseError) as exc:
        parse_atlas("[charts 0]\neven x\n")
    err = exc.value
    assert (err.line, err.column) == (1, 2)
    assert {"chart", "overlap", "cocycle"} <= err.expected


def test_unexpected_character_position():
    sig = ChartSignature(("x",), ("t1", "t2"))
    with pytest.raises(ParseError) as exc:
        parse_expression("x + $", sig, line=7)
    assert (exc.value.line, exc.value.column) == (7, 5)


def test_limits():
    sig = ChartSignature(("x",), (), frozenset({"x"}))
    assert str(parse_expression(f"x^{MAX_EXPONENT}", sig)) == f"1*x^{MAX_EXPONENT}"
    with pytest.raises(ParseError, match="exceeds"):
        parse_expression(f"x^{MAX_EXPONENT + 1}", sig)
    with pytest.raises(ParseError):
        parse_expression("(" * 500 + "x" + ")" * 500, sig)


def test_invalid_utf8_is_a_parse_error():
    with pytest.raises(ParseError, match="UTF-8") as exc:
        parse_document(b"[meta]\nname = \xff\n")
    assert exc.value.line == 2


def test_overlaps_run_from_lower_to_higher_chart():
    text = NS2.replace("[overlap 0 1]", "[overlap 1 0]")
    with pytest.raises(ParseError, match="lower chart id"):
        parse_atlas(text)


def test_rendering_is_canonical():
    a = fix_cot()
    text = render_atlas(a)
    assert text.endswith("\n") and not text.endswith("\n\n")
    assert "\n\n[chart 0]\n" in text
    assert render_atlas(parse_atlas(text)) == text
    assert render_document(include_atlas=False) == ""


@settings(max_examples=300)
@given(st.binary(max_size=200))
def test_parser_is_total_on_bytes(data):
    try:
        parse_document(data)
    except ParseError:
        pass


@settings(max_examples=300)
@given(st.text(alphabet="[]() =+-*/^#\nxyet12dchartoverlapevenodd", max_size=120))
def test_parser_is_total_on_near_miss_text(text):
    try:
        parse_document(NS2 + text)
    except ParseError:
        pass
