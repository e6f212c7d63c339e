"""Command line interface.

Exit codes: 0 when every asserted property holds, 1 for a NONSPLIT or
NONTRIVIAL verdict (or a failed decomposition or comparison), 2 for input
errors, 3 for UNDECIDED verdicts (the degree window is printed).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Sequence

from .atlas import Atlas, AtlasError, reduced_data, split_model_of, validate_atlas
from .atiyah import affine_atiyah, atiyah_verdict, check_constructed_connection, dw_verify, initial_form_defects
from .builders import cotangent_build, golden_documents, de_rham_lift_check, form_model, is_cotangent_type
from .cech import degree_window
from .coeffring import ContextError
from .grassmann import ParityError, SuperElement
from .koszul import LiftError, euler_differential, koszul_split
from .obstruction import euler_obstruction_compare, jacobian_obstruction, obstruction_verdict, primary_obstruction
from .sma import ParseError, load, render_atlas, render_document
from .svector import derham_field, euler_field, super_bracket

EXIT_OK, EXIT_VERDICT, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2, 3

_VERDICT_CODES = {"SPLIT": EXIT_OK, "TRIVIAL": EXIT_OK, "NONSPLIT": EXIT_VERDICT, "NONTRIVIAL": EXIT_VERDICT,
                  "UNDECIDED": EXIT_UNDECIDED}


class InputError(Exception):
    pass


def _load_atlas(path: str) -> Atlas:
    doc = load(path)
    report = validate_atlas(doc.atlas)
    if not report.passed:
        raise InputError(f"{path}: atlas does not validate\n{report.render()}")
    return doc.atlas


def _window_line(w: tuple[int, int]) -> str:
    return f"window: [{w[0]}, {w[1]}]"


def cmd_validate(args, out) -> int:
    doc = load(args.file)
    report = validate_atlas(doc.atlas)
    print(report.render(), file=out)
    return EXIT_OK if report.passed else EXIT_INPUT


def cmd_split_model(args, out) -> int:
    a = _load_atlas(args.file)
    out.write(render_atlas(split_model_of(a)))
    return EXIT_OK


def cmd_euler_differential(args, out) -> int:
    a = _load_atlas(args.file)
    w = degree_window()
    rep = euler_differential(a, w)
    print(rep.render(), file=out)
    if rep.verdict == "UNDECIDED" and rep.window is None:
        print(_window_line(w), file=out)
    return _VERDICT_CODES[rep.verdict]


def cmd_obstruction(args, out) -> int:
    a = _load_atlas(args.file)
    w = degree_window()
    eta = primary_obstruction(a)
    print("primary obstruction:", file=out)
    print("\n".join("  " + s for s in eta.render().splitlines()), file=out)
    agree = eta == jacobian_obstruction(a)
    print("jacobian route: " + ("AGREES" if agree else "DIFFERS"), file=out)
    verdict, res = obstruction_verdict(eta, w)
    print(f"class: {verdict} ({res.route})", file=out)
    if verdict == "UNDECIDED":
        print(_window_line(res.window or w), file=out)
    code = _VERDICT_CODES[verdict]
    if args.compare:
        cmp = euler_obstruction_compare(a, w)
        print(cmp.render(), file=out)
        if cmp.passed is None:
            print(_window_line(w), file=out)
            code = max(code, EXIT_UNDECIDED)
        elif not cmp.passed:
            code = max(code, EXIT_VERDICT)
    if not agree:
        code = max(code, EXIT_VERDICT)
    return code


def cmd_atiyah(args, out) -> int:
    a = _load_atlas(args.file)
    w = degree_window()
    if args.decompose:
        rep = dw_verify(a, w)
        print(rep.render(), file=out)
        if rep.passed is None:
            print(_window_line(w), file=out)
            return EXIT_UNDECIDED
        return EXIT_OK if rep.passed else EXIT_VERDICT
    c = affine_atiyah(a)
    print("affine atiyah cocycle:", file=out)
    print("\n".join("  " + s for s in c.render().splitlines()), file=out)
    verdict = atiyah_verdict(c, w)
    print(f"class: {verdict}", file=out)
    if verdict == "TRIVIAL":
        conn, ok = check_constructed_connection(a, w)
        print("constructed global connection: " + ("PASS" if ok else "FAIL"), file=out)
        out.write(render_document(a, conn, include_atlas=False))
        if not ok:
            return EXIT_VERDICT
    if verdict == "UNDECIDED":
        print(_window_line(w), file=out)
    return _VERDICT_CODES[verdict]


def cmd_koszul_split(args, out) -> int:
    a = _load_atlas(args.file)
    conn = load(args.connection, a).connections
    missing = [alpha for alpha in a.charts if alpha not in conn]
    if missing:
        raise InputError(f"{args.connection}: no connection for chart {missing[0]}")
    k, s = koszul_split(a, conn)
    out.write(render_atlas(s.atlas))
    print("", file=out)
    print("# certificate", file=out)
    for line in k.render().splitlines() + s.render().splitlines():
        print("# " + line, file=out)
    return EXIT_OK


def cmd_cotangent(args, out) -> int:
    base = _load_atlas(args.base)
    if base.q:
        raise InputError(f"{args.base}: the base atlas must be purely even")
    omega = None
    if args.omega:
        omega = load(args.omega, base).cochain(form_model(base))
    try:
        a = cotangent_build(base, omega)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out.write(render_atlas(a))
    return EXIT_OK


def cmd_check(args, out) -> int:
    a = _load_atlas(args.file)
    w = degree_window()
    results: list[tuple[str, bool | None]] = []
    results.append(("validate", validate_atlas(a).passed))
    split = split_model_of(a)
    results.append(("split model idempotent", split_model_of(split) == split))
    ra, ma = reduced_data(a)
    rs, ms = reduced_data(split)
    results.append(("framing invariance", ra == rs and ma == ms))
    ok = all(euler_field(sig).apply(SuperElement.coordinate(sig, z)) == SuperElement.coordinate(sig, z).scale(int(sig.is_odd(z)))
             for sig in a.charts.values() for z in sig.names)
    results.append(("euler grading on coordinates", ok))
    results.append(("initial-form relation", not initial_form_defects(a)))
    rep = euler_differential(a, w)
    results.append((f"euler differential verdict {rep.verdict}", None if rep.verdict == "UNDECIDED" else True))
    if a.q >= 2:
        cmp = euler_obstruction_compare(a, w)
        results.append(("euler class equals -2 times the obstruction", cmp.passed))
        results.append(("obstruction routes agree", primary_obstruction(a) == jacobian_obstruction(a)))
    if is_cotangent_type(a) and a.q:
        results.append(("de Rham field lifts", de_rham_lift_check(a).passed))
        results.append(("[d, d] = 0", all(not super_bracket(derham_field(s), derham_field(s)) for s in a.charts.values())))
    for name, passed in results:
        print({True: "PASS", False: "FAIL", None: "UNDECIDED"}[passed] + " " + name, file=out)
    if any(p is False for _, p in results):
        print("RESULT FAIL", file=out)
        return EXIT_VERDICT
    if any(p is None for _, p in results):
        print("RESULT UNDECIDED", file=out)
        print(_window_line(w), file=out)
        return EXIT_UNDECIDED
    print("RESULT PASS", file=out)
    return EXIT_OK


def cmd_fixtures(args, out) -> int:
    os.makedirs(args.directory, exist_ok=True)
    for name, text in golden_documents().items():
        path = os.path.join(args.directory, name)
        with open(path, "w") as fh:
            fh.write(text)
        print(path, file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supersplit", description="Splitting and obstruction computations for supermanifold atlases.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str, file_arg: bool = True) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        if file_arg:
            sp.add_argument("file")
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "validate an atlas (exit 2 if a check fails)")
    add("split-model", cmd_split_model, "print the split model")
    add("euler-differential", cmd_euler_differential, "Euler differential and splitting verdict")
    sp = add("obstruction", cmd_obstruction, "primary obstruction and its class")
    sp.add_argument("--compare", action="store_true", help="compare with the degree-2 Euler class")
    sp = add("atiyah", cmd_atiyah, "affine Atiyah class")
    sp.add_argument("--decompose", action="store_true", help="verify the three-block decomposition")
    sp = add("koszul-split", cmd_koszul_split, "split coordinates from a global even connection")
    sp.add_argument("--connection", required=True)
    sp = add("cotangent", cmd_cotangent, "build a cotangent-type atlas from a 1-form cocycle", file_arg=False)
    sp.add_argument("--base", required=True)
    sp.add_argument("--omega")
    add("check", cmd_check, "run the invariant suite")
    sp = add("fixtures", cmd_fixtures, "write the fixture corpus", file_arg=False)
    sp.add_argument("directory")
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except ParseError as exc:
        path = getattr(args, "file", None) or ""
        print(f"{path}:{exc.render()}" if path else exc.render(), file=sys.stderr)
        return EXIT_INPUT
    except (InputError, OSError, AtlasError, LiftError, ContextError, ParityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
