import io
from pathlib import Path

import pytest

from supersplit.builders import fix_cot, golden_documents
from supersplit.cli import EXIT_INPUT, EXIT_OK, EXIT_UNDECIDED, EXIT_VERDICT, main
from supersplit.sma import parse_atlas, render_atlas

GOLDEN = Path(__file__).parent / "golden"

# P^{1|3} whose odd gluing matrix forces every even weight to zero, so the
# cohomology solver falls back to the degree window.
WINDOW_ONLY = """\
[chart 0]
even x
odd t1 t2 t3

[chart 1]
even y
odd e1 e2 e3

[overlap 0 1]
invertible x
y = 1*x^-1 + 1*x^-3*t1*t3
e1 = 1*x^-2*t1 + 1*x^-1*t1 + 1*x^-1*t2
e2 = 1*x^-2*t1 + 1*x^-2*t2
e3 = 1*x^-2*t3
"""


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def golden(name):
    return GOLDEN / name


@pytest.fixture
def window_only(tmp_path):
    path = tmp_path / "window_only.sma"
    path.write_text(WINDOW_ONLY)
    return path


def test_validate():
    code, out = run("validate", golden("fix_ns2.sma"))
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "RESULT PASS"


def test_validate_failure_is_an_input_error(tmp_path):
    bad = golden("fix_ns2.sma").read_text().replace("e2 = 1*x^-2*t2", "e2 = 1*x^-2*t1")
    path = tmp_path / "bad.sma"
    path.write_text(bad)
    code, out = run("validate", path)
    assert code == EXIT_INPUT
    assert "FAIL" in out


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.sma"
    path.write_text("[chart 0]\neven x\n[overlap 0 1]\n")
    assert run("validate", path)[0] == EXIT_INPUT
    assert "broken.sma:" in capsys.readouterr().err


def test_missing_file_and_bad_usage():
    assert run("validate", "/nonexistent/file.sma")[0] == EXIT_INPUT
    assert run("no-such-command")[0] == EXIT_INPUT
    assert run()[0] == EXIT_INPUT


def test_split_model():
    code, out = run("split-model", golden("fix_ns2.sma"))
    assert code == EXIT_OK
    assert "y = 1*x^-1\n" in out
    assert parse_atlas(out).transitions == parse_atlas(golden("fix_s2.sma").read_text()).transitions


def test_euler_differential_exit_codes():
    code, out = run("euler-differential", golden("fix_ns2.sma"))
    assert code == EXIT_VERDICT
    assert "2*x^-1*t1*t2*d/dx" in out and "verdict: NONSPLIT" in out
    code, out = run("euler-differential", golden("fix_s2.sma"))
    assert code == EXIT_OK and "verdict: SPLIT" in out


def test_obstruction_and_compare():
    code, out = run("obstruction", "--compare", golden("fix_ns2.sma"))
    assert code == EXIT_VERDICT
    assert "-1*x^-1*t1*t2*d/dx" in out
    assert "jacobian route: AGREES" in out
    assert "class: NONTRIVIAL (laurent)" in out
    assert "constant: -2" in out and "result: PASS" in out
    code, out = run("obstruction", golden("fix_s2.sma"))
    assert code == EXIT_OK and "class: TRIVIAL" in out


def test_atiyah():
    code, out = run("atiyah", "--decompose", golden("fix_ns2.sma"))
    assert code == EXIT_OK
    assert "obstruction constant: -1" in out and "decomposition: PASS" in out
    code, out = run("atiyah", golden("fix_aff2_twisted.sma"))
    assert code == EXIT_OK
    assert "constructed global connection: PASS" in out
    assert "[connection 0]" in out
    assert run("atiyah", golden("fix_s2.sma"))[0] == EXIT_VERDICT


def test_undecided_prints_the_window(window_only, monkeypatch):
    for argv in (["euler-differential"], ["obstruction"], ["check"]):
        code, out = run(*argv, window_only)
        assert code == EXIT_UNDECIDED, argv
        assert "window: [-12, 12]" in out
    monkeypatch.setenv("SUPERSPLIT_WINDOW", "-2,1")
    for argv in (["obstruction"], ["atiyah"]):
        code, out = run(*argv, window_only)
        assert code == EXIT_UNDECIDED and "window: [-2, 1]" in out
    monkeypatch.setenv("SUPERSPLIT_WINDOW", "junk")
    assert run("obstruction", window_only)[0] == EXIT_INPUT


def test_koszul_split_with_connection_file():
    code, out = run("koszul-split", golden("fix_aff2_twisted.sma"),
                    "--connection", golden("fix_aff2_twisted_connection.sma"))
    assert code == EXIT_OK
    assert "# chart 0: new x = 1*x + 1*x*t1*t2" in out
    assert "# chart 0: projectors PASS" in out
    body = out.split("\n\n# certificate")[0] + "\n"
    atlas = parse_atlas(body)
    assert str(atlas.transition(0, 1).images["y"]) == "1*x"


def test_koszul_split_rejects_a_nonglobal_connection():
    code, _ = run("koszul-split", golden("fix_aff2_twisted.sma"), "--connection", golden("fix_aff2_connection.sma"))
    assert code == EXIT_INPUT


def test_cotangent_with_omega_file():
    code, out = run("cotangent", "--base", golden("p2.sma"), "--omega", golden("p2_omega.sma"))
    assert code == EXIT_OK
    built = parse_atlas(out)
    ref = fix_cot()
    assert built.transitions == ref.transitions
    code, out = run("cotangent", "--base", golden("p2.sma"))
    assert parse_atlas(out).transitions == parse_atlas(golden("fix_cot0.sma").read_text()).transitions


def test_cotangent_needs_an_even_base():
    assert run("cotangent", "--base", golden("fix_s2.sma"))[0] == EXIT_INPUT


@pytest.mark.parametrize("name", ["fix_cot.sma", "fix_ns2.sma", "fix_s2.sma", "p1_11_deformed.sma"])
def test_check_passes_on_fixtures(name):
    code, out = run("check", golden(name))
    assert code == EXIT_OK, out
    assert out.splitlines()[-1] == "RESULT PASS"


def test_fixtures_command(tmp_path):
    code, out = run("fixtures", tmp_path)
    assert code == EXIT_OK
    written = {Path(line).name for line in out.splitlines()}
    assert written == set(golden_documents())
    for name in written:
        assert (tmp_path / name).read_text() == golden(name).read_text()


def test_split_model_output_round_trips():
    _, out = run("split-model", golden("fix_cot.sma"))
    assert render_atlas(parse_atlas(out)) == out
