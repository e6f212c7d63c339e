"""The SMA text format for atlases, connections and 1-cochains.

A document is a sequence of blocks::

    [meta]
    name = FIX-NS2

    [chart 0]
    even x
    odd t1 t2

    [overlap 0 1]
    invertible x
    y = 1*x^-1 + 1*x^-3*t1*t2
    e1 = 1*x^-2*t1
    e2 = 1*x^-2*t2

    [connection 0]
    gamma t1 t2 x = -1

    [cocycle]
    entry 0 1 = 2*x^-1*t1*t2*d/dx

Block arguments may also be written in parentheses, ``[overlap (0 1)]``.
A ``[cocycle (0 1)]`` block takes ``entry = ...`` lines.  Expressions use
integers, ``+ - * / ^``, parentheses, coordinate names, ``d/dz`` for the
coordinate field of ``z`` and ``d(x)`` for the differential of ``x``.
Text after ``#`` is a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .atlas import Atlas, TransitionMap
from .cech import BundleModel, BundleValue, Cochain1, FieldModel, SheafModel
from .coeffring import render_terms
from .connection import ChristoffelData
from .grassmann import ChartSignature, SuperElement
from .svector import VectorField

MAX_EXPONENT = 64
MAX_NESTING = 200

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9]*")
_INT = re.compile(r"[0-9]+")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected: frozenset[str] = frozenset(),
                 section: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        self.section = section
        super().__init__(self.render())

    def render(self) -> str:
        where = f"{self.line}:{self.column}: " if self.line else ""
        out = where + self.message
        if self.section:
            out += f" (in {self.section})"
        if self.expected:
            out += "; expected one of: " + ", ".join(sorted(self.expected))
        return out


# -- lexing -------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, vec, form, end
    text: str
    column: int


def tokenize(text: str, line: int, offset: int = 0) -> list[Token]:
    """Split an expression into tokens; ``offset`` is added to columns."""
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        col = offset + i + 1
        if ch in " \t":
            i += 1
            continue
        if text.startswith("d/d", i) and _NAME.match(text, i + 3):
            m = _NAME.match(text, i + 3)
            out.append(Token("vec", m.group(), col))
            i = m.end()
            continue
        if text.startswith("d(", i):
            m = _NAME.match(text, i + 2)
            if not m or not text.startswith(")", m.end()):
                raise ParseError("malformed differential", line, col, frozenset({"d(name)"}))
            out.append(Token("form", m.group(), col))
            i = m.end() + 1
            continue
        m = _NAME.match(text, i)
        if m:
            out.append(Token("name", m.group(), col))
            i = m.end()
            continue
        m = _INT.match(text, i)
        if m:
            out.append(Token("num", m.group(), col))
            i = m.end()
            continue
        if ch in "+-*/^()":
            out.append(Token("op", ch, col))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col,
                         frozenset({"number", "name", "operator", "parenthesis"}))
    out.append(Token("end", "", offset + len(text) + 1))
    return out


# -- expressions ----------------------------------------------------------------------

class Linear:
    """A combination sum_z f_z * basis(z) of coordinate fields or differentials."""

    def __init__(self, kind: str, coeffs: Mapping[str, SuperElement]):
        self.kind = kind
        self.coeffs = {k: v for k, v in coeffs.items() if v}

    def combine(self, other: Linear, sign: int) -> Linear:
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v.scale(sign) if k in out else v.scale(sign)
        return Linear(self.kind, out)

    def left_mul(self, f: SuperElement) -> Linear:
        return Linear(self.kind, {k: f * v for k, v in self.coeffs.items()})


_VALUE_START = frozenset({"number", "name", "(", "d/dz", "d(x)", "-", "+"})


class ExprParser:
    def __init__(self, tokens: list[Token], sig: ChartSignature, line: int):
        self.tokens = tokens
        self.pos = 0
        self.sig = sig
        self.line = line
        self.depth = 0

    def error(self, message: str, tok: Token, expected=frozenset()) -> ParseError:
        return ParseError(message, self.line, tok.column, expected)

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def parse(self):
        value = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}", self.tok, frozenset({"+", "-", "*", "/", "^", "end of line"}))
        return value

    def expr(self):
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.tok.text == "-" else 1
            self.pos += 1
        start = self.tok
        value = self._neg(self.term(), start) if sign < 0 else self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok
            self.pos += 1
            rhs = self.term()
            value = self._add(value, rhs, 1 if op.text == "+" else -1, op)
        return value

    def term(self):
        value = self.power()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok
            self.pos += 1
            rhs = self.power()
            value = self._mul(value, rhs, op) if op.text == "*" else self._div(value, rhs, op)
        return value

    def power(self):
        start = self.tok
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.pos += 1
            sign = 1
            if self.tok.kind == "op" and self.tok.text in "+-":
                sign = -1 if self.tok.text == "-" else 1
                self.pos += 1
            if self.tok.kind != "num":
                raise self.error("exponent must be an integer", self.tok, frozenset({"integer"}))
            n = sign * int(self.tok.text)
            if abs(n) > MAX_EXPONENT:
                raise self.error(f"exponent {n} exceeds {MAX_EXPONENT}", self.tok)
            self.pos += 1
            if isinstance(base, Linear):
                raise self.error("fields and differentials cannot be raised to a power", start)
            try:
                return base ** n
            except Exception as exc:
                raise self.error(f"cannot raise to the power {n}: {exc}", start) from None
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return SuperElement.scalar(self.sig, int(tok.text))
        if tok.kind == "name":
            if tok.text not in self.sig.names:
                raise self.error(f"undeclared variable {tok.text}", tok)
            self.pos += 1
            return SuperElement.coordinate(self.sig, tok.text)
        if tok.kind in ("vec", "form"):
            if tok.text not in self.sig.names:
                raise self.error(f"undeclared variable {tok.text}", tok)
            if tok.kind == "form" and self.sig.is_odd(tok.text):
                raise self.error(f"differentials are only allowed for even coordinates, got {tok.text}", tok)
            self.pos += 1
            return Linear(tok.kind, {tok.text: SuperElement.one(self.sig)})
        if tok.kind == "op" and tok.text == "(":
            self.depth += 1
            if self.depth > MAX_NESTING:
                raise self.error("parentheses nested too deeply", tok)
            self.pos += 1
            value = self.expr()
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                raise self.error("unbalanced parenthesis", self.tok, frozenset({")"}))
            self.pos += 1
            self.depth -= 1
            return value
        raise self.error("expected a value" if tok.kind == "end" else f"unexpected {tok.text!r}", tok, _VALUE_START)

    def _neg(self, v, tok):
        return v.left_mul(SuperElement.scalar(self.sig, -1)) if isinstance(v, Linear) else -v

    def _add(self, a, b, sign, tok):
        la, lb = isinstance(a, Linear), isinstance(b, Linear)
        if la and lb:
            if a.kind != b.kind:
                raise self.error("cannot mix coordinate fields and differentials", tok)
            return a.combine(b, sign)
        if la or lb:
            raise self.error("cannot add a function to a field or differential", tok)
        return a + b if sign > 0 else a - b

    def _mul(self, a, b, tok):
        if isinstance(a, Linear):
            raise self.error("a field or differential must be the last factor", tok)
        if isinstance(b, Linear):
            return b.left_mul(a)
        return a * b

    def _div(self, a, b, tok):
        if isinstance(a, Linear) or isinstance(b, Linear):
            raise self.error("cannot divide fields or differentials", tok)
        try:
            return a * b.invert()
        except Exception as exc:
            raise self.error(f"cannot divide: {exc}", tok) from None


def parse_expression(text: str, sig: ChartSignature, line: int = 1, offset: int = 0):
    """A SuperElement, or a Linear for expressions with d/dz or d(x) tokens."""
    return ExprParser(tokenize(text, line, offset), sig, line).parse()


# -- documents ---------------------------------------------------------------------------

@dataclass
class Line:
    number: int
    text: str
    indent: int


@dataclass
class Block:
    kind: str
    args: tuple[int, ...]
    line: int
    lines: list[Line] = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"[{self.kind}{''.join(' ' + str(a) for a in self.args)}] at line {self.line}"


@dataclass
class SmaDocument:
    atlas: Atlas | None
    connections: dict[int, ChristoffelData]
    cocycle: dict[tuple[int, int], object]
    meta: dict[str, str]

    def cochain(self, model: SheafModel) -> Cochain1:
        """Convert parsed cocycle entries into values of ``model``."""
        entries = {}
        for key in model.atlas.pairs():
            sig = model.atlas.transition(*key).source_signature
            raw = self.cocycle.get(key)
            entries[key] = _convert(raw, model, sig, key)
        return Cochain1(model, entries)


def _convert(raw, model: SheafModel, sig: ChartSignature, key) -> object:
    if raw is None or (isinstance(raw, SuperElement) and not raw):
        return model.zero(sig)
    if not isinstance(raw, Linear):
        raise ParseError(f"entry {key[0]} {key[1]} is a function, not a field or form")
    if isinstance(model, FieldModel):
        if raw.kind != "vec":
            raise ParseError(f"entry {key[0]} {key[1]} must use d/dz tokens")
        return VectorField(sig, {z: f.with_signature(sig) for z, f in raw.coeffs.items()})
    if isinstance(model, BundleModel) and model.kind == "form":
        if raw.kind != "form":
            raise ParseError(f"entry {key[0]} {key[1]} must use d(x) tokens")
        return BundleValue(sig, {(sig.even_names.index(x),): f for x, f in raw.coeffs.items()})
    raise ParseError("cocycles of this kind cannot be read from SMA files")


_HEADER = re.compile(r"^\[\s*([A-Za-z]+)\s*(?:\(\s*([0-9 \t]*)\)|([0-9 \t]*))\s*\]$")
_BLOCK_ARITY = {"meta": (0,), "chart": (1,), "overlap": (2,), "connection": (1,), "cocycle": (0, 2)}


def split_blocks(text: str) -> list[Block]:
    blocks: list[Block] = []
    for number, raw in enumerate(text.split("\n"), start=1):
        body = raw.split("#", 1)[0].rstrip(" \t\r")
        stripped = body.lstrip(" \t")
        if not stripped:
            continue
        indent = len(body) - len(stripped)
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise ParseError("malformed block header", number, indent + 1, frozenset({"[name]", "[name i]", "[name i j]"}))
            kind = m.group(1)
            if kind not in _BLOCK_ARITY:
                raise ParseError(f"unknown block {kind!r}", number, indent + 2, frozenset(_BLOCK_ARITY))
            args = tuple(int(a) for a in (m.group(2) or m.group(3) or "").split())
            if len(args) not in _BLOCK_ARITY[kind]:
                raise ParseError(f"block {kind} takes {' or '.join(map(str, _BLOCK_ARITY[kind]))} arguments",
                                 number, indent + 1)
            blocks.append(Block(kind, args, number))
            continue
        if not blocks:
            raise ParseError("content before the first block", number, indent + 1, frozenset({"["}))
        blocks[-1].lines.append(Line(number, stripped, indent))
    return blocks


def _words(line: Line) -> list[tuple[str, int]]:
    return [(m.group(), line.indent + m.start() + 1) for m in re.finditer(r"\S+", line.text)]


def _parse_chart(block: Block) -> ChartSignature:
    fields: dict[str, list[str]] = {}
    for line in block.lines:
        words = _words(line)
        key, col = words[0]
        if key not in ("even", "odd", "invertible"):
            raise ParseError(f"unknown chart field {key!r}", line.number, col, frozenset({"even", "odd", "invertible"}),
                             block.label)
        if key in fields:
            raise ParseError(f"duplicate {key} line", line.number, col, section=block.label)
        for w, c in words[1:]:
            if not _NAME.fullmatch(w):
                raise ParseError(f"bad coordinate name {w!r}", line.number, c, frozenset({"name"}), block.label)
        fields[key] = [w for w, _ in words[1:]]
    even, odd = fields.get("even", []), fields.get("odd", [])
    names = even + odd
    if len(set(names)) != len(names):
        raise ParseError("coordinate names repeat", block.line, 1, section=block.label)
    inv = fields.get("invertible", [])
    bad = [z for z in inv if z not in even]
    if bad:
        raise ParseError(f"only even coordinates can be invertible, got {bad[0]}", block.line, 1, section=block.label)
    return ChartSignature(tuple(even), tuple(odd), frozenset(inv))


def _assignment(line: Line, block: Block) -> tuple[list[tuple[str, int]], str, int]:
    """Split ``lhs words = expression``; returns lhs words, rhs text and its column offset."""
    if "=" not in line.text:
        raise ParseError("expected an assignment", line.number, line.indent + len(line.text) + 1, frozenset({"="}),
                         block.label)
    lhs, rhs = line.text.split("=", 1)
    offset = line.indent + len(lhs) + 1
    return [(m.group(), line.indent + m.start() + 1) for m in re.finditer(r"\S+", lhs)], rhs, offset


def _parse_overlap(block: Block, charts: Mapping[int, ChartSignature]) -> TransitionMap:
    a, b = block.args
    for c in (a, b):
        if c not in charts:
            raise ParseError(f"unknown chart {c}", block.line, 1, section=block.label)
    if a >= b:
        raise ParseError("overlaps are written from the lower chart id to the higher one", block.line, 1,
                         section=block.label)
    src, tgt = charts[a], charts[b]
    invertible: list[str] = []
    exprs = []
    for line in block.lines:
        words = _words(line)
        if words[0][0] == "invertible":
            for w, c in words[1:]:
                if w not in src.even_names:
                    raise ParseError(f"{w} is not an even coordinate of chart {a}", line.number, c, section=block.label)
                invertible.append(w)
            continue
        exprs.append(line)
    sig = src.with_invertible(invertible)
    images = {}
    for line in exprs:
        lhs, rhs, offset = _assignment(line, block)
        if len(lhs) != 1:
            raise ParseError("expected a single target coordinate", line.number, line.indent + 1,
                             frozenset(tgt.names), block.label)
        z, col = lhs[0]
        if z not in tgt.names:
            raise ParseError(f"{z} is not a coordinate of chart {b}", line.number, col, frozenset(tgt.names), block.label)
        if z in images:
            raise ParseError(f"duplicate image for {z}", line.number, col, section=block.label)
        f = parse_expression(rhs, sig, line.number, offset)
        if isinstance(f, Linear):
            raise ParseError("transition images are functions", line.number, offset + 1, section=block.label)
        if tgt.is_odd(z) and not f.is_odd():
            raise ParseError(f"parity: {z} is odd but its image is not odd", line.number, col, section=block.label)
        if not tgt.is_odd(z) and not f.is_even():
            raise ParseError(f"parity: {z} is even but its image is not even", line.number, col, section=block.label)
        images[z] = f
    missing = [z for z in tgt.names if z not in images]
    if missing:
        raise ParseError(f"no image for {missing[0]}", block.line, 1, section=block.label)
    return TransitionMap.build(a, b, src, tgt, images, invertible)


def _parse_connection(block: Block, charts: Mapping[int, ChartSignature]) -> ChristoffelData:
    (alpha,) = block.args
    if alpha not in charts:
        raise ParseError(f"unknown chart {alpha}", block.line, 1, section=block.label)
    sig = charts[alpha]
    entries = {}
    for line in block.lines:
        lhs, rhs, offset = _assignment(line, block)
        if len(lhs) != 4 or lhs[0][0] != "gamma":
            raise ParseError("expected gamma A B C = expression", line.number, line.indent + 1, frozenset({"gamma"}),
                             block.label)
        idx = []
        for w, c in lhs[1:]:
            if w not in sig.names:
                raise ParseError(f"undeclared variable {w}", line.number, c, frozenset(sig.names), block.label)
            idx.append(w)
        f = parse_expression(rhs, sig, line.number, offset)
        if isinstance(f, Linear):
            raise ParseError("connection entries are functions", line.number, offset + 1, section=block.label)
        key = tuple(idx)
        if key in entries:
            raise ParseError("duplicate gamma entry", line.number, line.indent + 1, section=block.label)
        entries[key] = f
    conn = ChristoffelData.from_entries(sig, entries)
    defects = conn.defects()
    if defects:
        raise ParseError(defects[0], block.line, 1, section=block.label)
    return conn


def _parse_cocycle(block: Block, atlas: Atlas, out: dict) -> None:
    for line in block.lines:
        lhs, rhs, offset = _assignment(line, block)
        if not lhs or lhs[0][0] != "entry":
            raise ParseError("expected entry", line.number, line.indent + 1, frozenset({"entry"}), block.label)
        if len(lhs) == 3:
            try:
                key = (int(lhs[1][0]), int(lhs[2][0]))
            except ValueError:
                raise ParseError("entry indices must be integers", line.number, lhs[1][1], section=block.label) from None
            if block.args and key != block.args:
                raise ParseError("entry indices differ from the block's", line.number, lhs[1][1], section=block.label)
        elif len(lhs) == 1 and block.args:
            key = block.args
        else:
            raise ParseError("expected entry i j = expression", line.number, line.indent + 1, section=block.label)
        if key not in atlas.transitions:
            raise ParseError(f"no overlap {key[0]} {key[1]}", line.number, line.indent + 1, section=block.label)
        if key in out:
            raise ParseError(f"duplicate entry {key[0]} {key[1]}", line.number, line.indent + 1, section=block.label)
        sig = atlas.transition(*key).source_signature
        out[key] = parse_expression(rhs, sig, line.number, offset)


def _parse_meta(block: Block, meta: dict[str, str]) -> None:
    for line in block.lines:
        if "=" not in line.text:
            raise ParseError("expected key = value", line.number, line.indent + 1, frozenset({"="}), block.label)
        key, value = (s.strip() for s in line.text.split("=", 1))
        if not _NAME.fullmatch(key.replace("-", "").replace("_", "")):
            raise ParseError(f"bad meta key {key!r}", line.number, line.indent + 1, section=block.label)
        meta[key] = value


def parse_document(text: str | bytes, context: Atlas | None = None) -> SmaDocument:
    """Parse a document; raises ParseError and nothing else."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            before = bytes(text)[:exc.start]
            line = before.count(b"\n") + 1
            raise ParseError("input is not valid UTF-8", line, exc.start - (before.rfind(b"\n") + 1) + 1) from None
    try:
        return _parse_document(text, context)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(f"{type(exc).__name__}: {exc}") from None


def _parse_document(text: str, context: Atlas | None) -> SmaDocument:
    blocks = split_blocks(text)
    meta: dict[str, str] = {}
    charts: dict[int, ChartSignature] = {}
    for b in blocks:
        if b.kind == "meta":
            _parse_meta(b, meta)
        elif b.kind == "chart":
            if b.args[0] in charts:
                raise ParseError(f"chart {b.args[0]} declared twice", b.line, 1)
            charts[b.args[0]] = _parse_chart(b)
    atlas = None
    if charts:
        dims = {(s.p, s.q) for s in charts.values()}
        if len(dims) > 1:
            raise ParseError("charts have different dimensions", blocks[0].line, 1)
        transitions = {}
        for b in blocks:
            if b.kind == "overlap":
                if b.args in transitions:
                    raise ParseError(f"overlap {b.args[0]} {b.args[1]} declared twice", b.line, 1)
                transitions[b.args] = _parse_overlap(b, charts)
        name = meta.pop("name", "")
        atlas = Atlas(charts, transitions.values(), name=name, meta=meta)
        meta = dict(atlas.meta)
    elif context is not None:
        atlas = context
    elif any(b.kind in ("overlap", "connection", "cocycle") for b in blocks) or not blocks:
        raise ParseError("no charts")
    connections: dict[int, ChristoffelData] = {}
    cocycle: dict[tuple[int, int], object] = {}
    for b in blocks:
        if b.kind == "connection":
            if b.args[0] in connections:
                raise ParseError(f"connection {b.args[0]} declared twice", b.line, 1)
            connections[b.args[0]] = _parse_connection(b, atlas.charts)
        elif b.kind == "cocycle":
            _parse_cocycle(b, atlas, cocycle)
        elif b.kind == "overlap" and not charts:
            raise ParseError("overlaps need chart blocks", b.line, 1)
    return SmaDocument(atlas, connections, cocycle, meta)


def parse_atlas(text: str | bytes) -> Atlas:
    doc = parse_document(text)
    if doc.atlas is None:
        raise ParseError("no charts")
    return doc.atlas


def load(path, context: Atlas | None = None) -> SmaDocument:
    with open(path, "rb") as fh:
        return parse_document(fh.read(), context)


# -- rendering ---------------------------------------------------------------------------

def _chart_lines(sig: ChartSignature) -> list[str]:
    lines = ["even" + "".join(" " + z for z in sig.even_names)]
    if sig.odd_names:
        lines.append("odd" + "".join(" " + z for z in sig.odd_names))
    inv = [z for z in sig.even_names if z in sig.invertible]
    if inv:
        lines.append("invertible " + " ".join(inv))
    return lines


def render_form(v: BundleValue) -> str:
    sig = v.signature
    terms = []
    for (mu,), f in sorted(v.components.items()):
        for o, e, c in f.sorted_terms():
            terms.append((c, f.term_factors(o, e) + [f"d({sig.even_names[mu]})"]))
    return render_terms(terms)


def render_value(v) -> str:
    if isinstance(v, BundleValue):
        return render_form(v)
    return str(v)


def render_document(atlas: Atlas | None = None, connections: Mapping[int, ChristoffelData] | None = None,
                    cocycle: Cochain1 | None = None, meta: Mapping[str, str] | None = None,
                    include_atlas: bool = True) -> str:
    blocks: list[list[str]] = []
    info = {}
    if atlas is not None and include_atlas:
        if atlas.name:
            info["name"] = atlas.name
        info.update(atlas.meta)
    info.update(meta or {})
    if info:
        blocks.append(["[meta]"] + [f"{k} = {v}" for k, v in info.items()])
    if atlas is not None and include_atlas:
        for alpha, sig in atlas.charts.items():
            blocks.append([f"[chart {alpha}]"] + _chart_lines(sig))
        for (a, b), t in atlas.transitions.items():
            lines = [f"[overlap {a} {b}]"]
            extra = [z for z in t.source_signature.even_names
                     if z in t.source_signature.invertible and z not in atlas.charts[a].invertible]
            if extra:
                lines.append("invertible " + " ".join(extra))
            lines += [f"{z} = {t.images[z]}" for z in t.target_signature.names]
            blocks.append(lines)
    for alpha, conn in sorted((connections or {}).items()):
        sig = conn.signature
        order = {z: i for i, z in enumerate(sig.names)}
        lines = [f"[connection {alpha}]"]
        for key in sorted(conn.components, key=lambda k: tuple(order[z] for z in k)):
            g = conn.components[key]
            if g:
                lines.append(f"gamma {key[0]} {key[1]} {key[2]} = {g}")
        blocks.append(lines)
    if cocycle is not None:
        lines = ["[cocycle]"]
        for (a, b), v in sorted(cocycle.entries.items()):
            lines.append(f"entry {a} {b} = {render_value(v)}")
        blocks.append(lines)
    return "\n\n".join("\n".join(b) for b in blocks) + "\n" if blocks else ""


def render_atlas(a: Atlas) -> str:
    return render_document(a)


def roundtrip(text: str | bytes, context: Atlas | None = None) -> str:
    """Parse and re-render a document, keeping its connections and cocycle entries.

    A document without charts is read against ``context`` and re-rendered without them.
    """
    doc = parse_document(text, context)
    own = doc.atlas is not context
    out = render_document(doc.atlas, doc.connections, meta=None if own else doc.meta, include_atlas=own)
    if doc.cocycle:
        if out:
            out += "\n"
        lines = ["[cocycle]"]
        for (a, b), v in sorted(doc.cocycle.items()):
            lines.append(f"entry {a} {b} = {_render_raw(v, doc.atlas.transition(a, b).source_signature)}")
        out += "\n".join(lines) + "\n"
    return out


def _render_raw(v, sig: ChartSignature) -> str:
    if isinstance(v, Linear):
        if v.kind == "vec":
            return str(VectorField(sig, v.coeffs))
        return render_form(BundleValue(sig, {(sig.even_names.index(x),): f for x, f in v.coeffs.items()}))
    return str(v)
