"""Atlases of charts glued by even transition maps.

A transition ``(a, b)`` stores the images of chart ``b``'s coordinates as
functions on chart ``a`` restricted to the overlap.  The overlap's function
ring is chart ``a``'s ring with a few even coordinates inverted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .coeffring import ContextError, LaurentPoly, LaurentRing, NotAUnitError
from .grassmann import ChartSignature, ParityError, SuperElement
from .linalg import PolyMatrix, poly_inverse, rational_inverse


class AtlasError(ValueError):
    """Raised for structurally invalid atlases."""


def identity_images(sig: ChartSignature) -> dict[str, SuperElement]:
    return {z: SuperElement.coordinate(sig, z) for z in sig.names}


def promote_images(images: Mapping[str, SuperElement], sig: ChartSignature) -> dict[str, SuperElement]:
    return {z: f.with_signature(sig) for z, f in images.items()}


def odd_linear_matrix(images: Mapping[str, SuperElement], target_odd: tuple[str, ...],
                      source: ChartSignature) -> PolyMatrix:
    """Rows are target odd coordinates, columns source odd coordinates."""
    return [[images[name].coefficient((j,)) for j in range(source.q)] for name in target_odd]


@dataclass(frozen=True)
class ReducedMonomialMap:
    """The body map y_v = c_v * x^{E_v}, assumed unimodular."""

    coeffs: tuple[Fraction, ...]
    exponents: tuple[tuple[int, ...], ...]


class TransitionMap:
    """Pullback of chart ``target`` coordinates to chart ``source`` on an overlap."""

    def __init__(self, source: int, target: int, source_signature: ChartSignature,
                 target_signature: ChartSignature, images: Mapping[str, SuperElement]):
        self.source = source
        self.target = target
        self.source_signature = source_signature
        self.target_signature = target_signature
        missing = set(target_signature.names) - set(images)
        if missing:
            raise AtlasError(f"transition {source}->{target} lacks images for {sorted(missing)}")
        extra = set(images) - set(target_signature.names)
        if extra:
            raise AtlasError(f"transition {source}->{target} has images for unknown {sorted(extra)}")
        self.images = {z: images[z].with_signature(source_signature) for z in target_signature.names}
        self._inverse: TransitionMap | None = None

    @classmethod
    def build(cls, source: int, target: int, source_chart: ChartSignature, target_chart: ChartSignature,
              images: Mapping[str, SuperElement], overlap_invertibles: Iterable[str] = ()) -> TransitionMap:
        """Create a transition; target coordinates with unit body become invertible."""
        ssig = source_chart.with_invertible(overlap_invertibles)
        imgs = {z: f.with_signature(ssig) for z, f in images.items()}
        units = [z for z in target_chart.even_names if z in imgs and imgs[z].body().is_unit()]
        tsig = target_chart.with_invertible(units)
        return cls(source, target, ssig, tsig, imgs)

    @property
    def overlap_invertibles(self) -> frozenset[str]:
        return self.source_signature.invertible

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionMap):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and self.images == other.images

    def __repr__(self) -> str:
        body = ", ".join(f"{z} = {f}" for z, f in self.images.items())
        return f"TransitionMap({self.source}->{self.target}: {body})"

    # -- evaluation --------------------------------------------------------
    def pullback(self, f: SuperElement, domain: ChartSignature | None = None) -> SuperElement:
        """Express a target-chart function in source-chart coordinates."""
        domain = domain or self.source_signature
        imgs = self.images if domain == self.source_signature else promote_images(self.images, domain)
        return f.substitute(imgs, domain)

    def parity_ok(self) -> bool:
        return all(
            (f.is_odd() if self.target_signature.is_odd(z) else f.is_even())
            for z, f in self.images.items()
        )

    def odd_matrix(self) -> PolyMatrix:
        return odd_linear_matrix(self.images, self.target_signature.odd_names, self.source_signature)

    def body_images(self) -> dict[str, LaurentPoly]:
        return {z: self.images[z].body() for z in self.target_signature.even_names}

    def reduced_monomial(self) -> ReducedMonomialMap:
        coeffs, exps = [], []
        for z in self.target_signature.even_names:
            b = self.images[z].body()
            if not b.is_monomial():
                raise AtlasError(f"body of {z} = {b} is not a monomial; only monomial reduced maps are supported")
            ((e, c),) = b.items()
            coeffs.append(c)
            exps.append(e)
        return ReducedMonomialMap(tuple(coeffs), tuple(exps))

    # -- inversion ---------------------------------------------------------
    @property
    def inverse(self) -> TransitionMap:
        if self._inverse is None:
            self._inverse = self._compute_inverse()
            self._inverse._inverse = self
        return self._inverse

    def set_inverse(self, other: TransitionMap) -> None:
        """Install an explicitly supplied inverse after verifying it."""
        if not _composes_to_identity(self, other) or not _composes_to_identity(other, self):
            raise AtlasError(f"supplied inverse of {self.source}->{self.target} is not an inverse")
        self._inverse = other
        other._inverse = self

    def _compute_inverse(self) -> TransitionMap:
        if not self.parity_ok():
            raise ParityError(f"transition {self.source}->{self.target} is not even")
        src, tgt = self.source_signature, self.target_signature
        p, q = src.p, src.q
        if tgt.p != p or tgt.q != q:
            raise AtlasError("charts of different dimensions")
        # reduced inverse x = prod (y / c)^{E^-1}
        red = self.reduced_monomial()
        einv = rational_inverse([[Fraction(e) for e in row] for row in red.exponents]) if p else []
        if einv is None or any(v.denominator != 1 for row in einv for v in row):
            raise AtlasError(f"reduced map of {self.source}->{self.target} is not invertible by monomials")
        ys = [SuperElement.coordinate(tgt, y) for y in tgt.even_names]
        reduced_inv: dict[str, SuperElement] = {}
        for mu, x in enumerate(src.even_names):
            term = SuperElement.one(tgt)
            for nu in range(p):
                k = int(einv[mu][nu])
                if k:
                    try:
                        term = term * (ys[nu].scale(1 / red.coeffs[nu]) ** k)
                    except NotAUnitError:
                        raise AtlasError(f"{tgt.even_names[nu]} must be invertible to invert {self}") from None
            reduced_inv[x] = term
        # odd linear part, inverted over the source ring then moved to target coordinates
        m = self.odd_matrix()
        try:
            minv_src = poly_inverse(m, src.ring)
        except NotAUnitError:
            raise AtlasError(f"odd linear part of {self.source}->{self.target} is not invertible") from None
        red_src = ChartSignature(src.even_names, (), src.invertible)
        red_tgt = ChartSignature(tgt.even_names, (), tgt.invertible)
        red_images = {x: reduced_inv[x].graded_part(0) for x in src.even_names}
        red_images = {x: SuperElement(red_tgt, dict(f.items())) for x, f in red_images.items()}

        def to_target(poly: LaurentPoly) -> SuperElement:
            g = SuperElement.from_poly(red_src, poly).substitute(red_images, red_tgt)
            return SuperElement(tgt, dict(g.items()))

        minv = [[to_target(c) for c in row] for row in minv_src]
        etas = [SuperElement.coordinate(tgt, e) for e in tgt.odd_names]
        guess: dict[str, SuperElement] = dict(reduced_inv)
        for j, t in enumerate(src.odd_names):
            acc = SuperElement.zero(tgt)
            for i in range(q):
                acc = acc + minv[j][i] * etas[i]
            guess[t] = acc
        # Jacobian of the reduced inverse for the even correction
        jac = {x: [reduced_inv[x].derivative(y) for y in tgt.even_names] for x in src.even_names}
        for _ in range(2 * q + 3):
            err = {z: self.images[z].substitute(guess, tgt) - SuperElement.coordinate(tgt, z) for z in tgt.names}
            if all(e.is_zero() for e in err.values()):
                return TransitionMap(self.target, self.source, tgt, src, guess)
            new = {}
            for x in src.even_names:
                corr = SuperElement.zero(tgt)
                for nu, y in enumerate(tgt.even_names):
                    corr = corr + jac[x][nu] * err[y]
                new[x] = guess[x] - corr
            for j, t in enumerate(src.odd_names):
                corr = SuperElement.zero(tgt)
                for i, e in enumerate(tgt.odd_names):
                    corr = corr + minv[j][i] * err[e]
                new[t] = guess[t] - corr
            guess = new
        raise AtlasError(f"inverse of {self.source}->{self.target} did not converge")


def _composes_to_identity(first: TransitionMap, second: TransitionMap) -> bool:
    """``first`` then ``second`` pulls back every coordinate to itself."""
    sig = first.source_signature
    for z in sig.names:
        back = second.images[z].substitute(first.images, sig)
        if back != SuperElement.coordinate(sig, z):
            return False
    return True


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, passed, detail))

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def render(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else "")
                 for c in self.checks]
        lines.append("RESULT " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


class Atlas:
    """Charts with common dimension (p|q) and transitions stored for a < b."""

    def __init__(self, charts: Mapping[int, ChartSignature], transitions: Iterable[TransitionMap] = (),
                 name: str = "", meta: Mapping[str, str] | None = None):
        self.charts = dict(sorted(charts.items()))
        dims = {(s.p, s.q) for s in self.charts.values()}
        if len(dims) > 1:
            raise AtlasError(f"charts have different dimensions {sorted(dims)}")
        if not self.charts:
            raise AtlasError("no charts")
        self.name = name
        self.meta = dict(meta or {})
        self.transitions: dict[tuple[int, int], TransitionMap] = {}
        for t in transitions:
            if t.source == t.target:
                raise AtlasError("a chart cannot be glued to itself")
            if t.source not in self.charts or t.target not in self.charts:
                raise AtlasError(f"transition {t.source}->{t.target} refers to an unknown chart")
            if t.source > t.target:
                t = t.inverse
            key = (t.source, t.target)
            if key in self.transitions:
                raise AtlasError(f"transition {key} declared twice")
            self.transitions[key] = t

    @property
    def dims(self) -> tuple[int, int]:
        s = next(iter(self.charts.values()))
        return s.p, s.q

    @property
    def p(self) -> int:
        return self.dims[0]

    @property
    def q(self) -> int:
        return self.dims[1]

    def chart_ids(self) -> list[int]:
        return list(self.charts)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.transitions)

    def triples(self) -> list[tuple[int, int, int]]:
        ids = self.chart_ids()
        return [t for t in combinations(ids, 3)
                if all(pair in self.transitions for pair in combinations(t, 2))]

    def transition(self, a: int, b: int) -> TransitionMap:
        """Pullback of chart b coordinates to chart a, in either stored direction."""
        if (a, b) in self.transitions:
            return self.transitions[(a, b)]
        if (b, a) in self.transitions:
            return self.transitions[(b, a)].inverse
        raise AtlasError(f"charts {a} and {b} do not overlap")

    def overlap_signature(self, a: int, b: int) -> ChartSignature:
        return self.transition(a, b).source_signature

    def triple_signature(self, a: int, others: Iterable[int]) -> ChartSignature:
        sig = self.charts[a]
        for b in others:
            if b != a:
                sig = sig.with_invertible(self.transition(a, b).source_signature.invertible)
        return sig

    def compose(self, a: int, b: int, c: int, f: SuperElement) -> SuperElement:
        """Pull a chart-c function back to chart a through chart b."""
        sig_b = self.triple_signature(b, (a, c))
        sig_a = self.triple_signature(a, (b, c))
        mid = self.transition(b, c).pullback(f.with_signature(self.transition(b, c).target_signature), sig_b)
        return self.transition(a, b).pullback(mid, sig_a)

    # -- derived atlases ---------------------------------------------------
    def with_transitions(self, transitions: Iterable[TransitionMap], name: str | None = None) -> Atlas:
        return Atlas(self.charts, transitions, self.name if name is None else name, self.meta)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Atlas):
            return NotImplemented
        return (self.charts == other.charts and self.transitions.keys() == other.transitions.keys()
                and all(self.transitions[k] == other.transitions[k] for k in self.transitions))

    def __repr__(self) -> str:
        return f"Atlas({self.name or 'unnamed'}, charts={self.chart_ids()}, dims={self.dims})"


def validate_atlas(a: Atlas) -> ValidationReport:
    report = ValidationReport()
    inverse_ok: dict[tuple[int, int], bool] = {}
    for key in a.pairs():
        t = a.transitions[key]
        label = f"{key[0]}-{key[1]}"
        parity = t.parity_ok()
        bad = [z for z, f in t.images.items() if not (f.is_odd() if t.target_signature.is_odd(z) else f.is_even())]
        report.add(f"parity {label}", parity, "" if parity else f"wrong parity for {', '.join(bad)}")
        if not parity:
            inverse_ok[key] = False
            continue
        try:
            t.reduced_monomial()
            body_ok, detail = True, ""
        except AtlasError as exc:
            body_ok, detail = False, str(exc)
        report.add(f"invertible body {label}", body_ok, detail)
        try:
            inv = t.inverse
            ok = _composes_to_identity(t, inv) and _composes_to_identity(inv, t)
            report.add(f"inverse {label}", ok)
        except (AtlasError, NotAUnitError, ContextError, ParityError) as exc:
            ok = False
            report.add(f"inverse {label}", False, str(exc))
        inverse_ok[key] = ok
        # split modulo J^2: even images have no odd-degree-1 part (parity) and
        # odd images start with an invertible linear part
        try:
            poly_inverse(t.odd_matrix(), t.source_signature.ring)
            adapted = True
        except NotAUnitError:
            adapted = False
        report.add(f"framing-adapted {label}", adapted)
    for tri in a.triples():
        if not all(inverse_ok.get(pair, False) for pair in combinations(tri, 2)):
            report.add(f"cocycle {tri[0]}-{tri[1]}-{tri[2]}", False, "a pair failed earlier checks")
            continue
        ok = cocycle_holds(a, *tri)
        report.add(f"cocycle {tri[0]}-{tri[1]}-{tri[2]}", ok)
    return report


def cocycle_holds(a: Atlas, alpha: int, beta: int, gamma: int) -> bool:
    sig = a.triple_signature(alpha, (beta, gamma))
    direct = promote_images(a.transition(alpha, gamma).images, sig)
    for z in a.charts[gamma].names:
        via = a.compose(alpha, beta, gamma, SuperElement.coordinate(a.transition(beta, gamma).target_signature, z))
        if via != direct[z]:
            return False
    return True


def require_valid(a: Atlas) -> None:
    report = validate_atlas(a)
    if not report.passed:
        raise AtlasError("atlas failed validation: " + "; ".join(f"{c.name} {c.detail}".strip() for c in report.failures()))


def split_transition(t: TransitionMap) -> TransitionMap:
    images = {}
    for z, f in t.images.items():
        images[z] = f.graded_part(1) if t.target_signature.is_odd(z) else f.graded_part(0)
    return TransitionMap(t.source, t.target, t.source_signature, t.target_signature, images)


def split_model_of(a: Atlas) -> Atlas:
    require_valid(a)
    return a.with_transitions([split_transition(t) for t in a.transitions.values()])


def is_split_presentation(a: Atlas) -> bool:
    """All even images are theta-free and all odd images theta-linear."""
    return all(t == split_transition(t) for t in a.transitions.values())


def reduced_data(a: Atlas) -> tuple[Atlas, dict[tuple[int, int], PolyMatrix]]:
    require_valid(a)
    charts = {i: s.reduced() for i, s in a.charts.items()}
    reduced, matrices = [], {}
    for key, t in a.transitions.items():
        src = t.source_signature.reduced()
        tgt = t.target_signature.reduced()
        images = {z: SuperElement.from_poly(src, t.images[z].body()) for z in tgt.names}
        reduced.append(TransitionMap(t.source, t.target, src, tgt, images))
        matrices[key] = t.odd_matrix()
    return Atlas(charts, reduced, a.name + "-reduced" if a.name else "", a.meta), matrices


def jacobian_matrix(t: TransitionMap) -> PolyMatrix:
    """d(body of target even coordinate) / d(source even coordinate)."""
    return [[t.images[y].body().derivative(x) for x in t.source_signature.even_names]
            for y in t.target_signature.even_names]


def chart_ring(a: Atlas, alpha: int) -> LaurentRing:
    return a.charts[alpha].ring
