"""Even affine connections given by Christoffel symbols in a chart.

``gamma[(A, B, C)]`` is the d/dC component of nabla_{d/dA} d/dB.  With
left coefficients the covariant derivative is

    nabla_u v = sum_B u(v^B) d/dB
              + sum_{A,B,C} (-1)^{|A||v^B|} u^A v^B gamma[A,B,C] d/dC

which satisfies nabla_{fu} v = f nabla_u v and the graded Leibniz rule
nabla_u (g v) = u(g) v + (-1)^{|u||g|} g nabla_u v.
"""

from __future__ import annotations

from typing import Mapping

from .atlas import Atlas, TransitionMap, ValidationReport
from .coeffring import ContextError
from .grassmann import ChartSignature, SuperElement
from .svector import VectorField, pushforward, super_bracket

Index = tuple[str, str, str]


class SymmetricTensor:
    """A (2,1)-tensor stored by components ``T[(A, B, C)]`` over a chart."""

    def __init__(self, signature: ChartSignature, components: Mapping[Index, SuperElement] | None = None):
        self.signature = signature
        names = set(signature.names)
        comps = {}
        for key, value in (components or {}).items():
            if not set(key) <= names:
                raise ContextError(f"unknown coordinates in {key}")
            value = value.with_signature(signature)
            if value:
                comps[tuple(key)] = value
        self.components = comps

    def __getitem__(self, key: Index) -> SuperElement:
        return self.components.get(tuple(key), SuperElement.zero(self.signature))

    def items(self):
        return sorted(self.components.items(), key=lambda kv: tuple(self.signature.names.index(n) for n in kv[0]))

    def is_zero(self) -> bool:
        return not self.components

    def parity(self, name: str) -> int:
        return int(self.signature.is_odd(name))

    def evaluate(self, u: VectorField, v: VectorField) -> VectorField:
        """sum (-1)^{|A||v^B|} u^A v^B T[A,B,C] d/dC."""
        sig = self.signature
        u = u.with_signature(sig)
        v = v.with_signature(sig)
        comps = {c: SuperElement.zero(sig) for c in sig.names}
        for (a, b, c), t in self.components.items():
            ua = u.component(a)
            vb = v.component(b)
            if not ua or not vb:
                continue
            if self.parity(a):
                vb = vb.even_part() - vb.odd_part()
            comps[c] = comps[c] + ua * vb * t
        return VectorField(sig, comps)

    def with_signature(self, sig: ChartSignature) -> SymmetricTensor:
        return type(self)(sig, self.components)

    def __sub__(self, other: SymmetricTensor) -> SymmetricTensor:
        keys = set(self.components) | set(other.components)
        return SymmetricTensor(self.signature, {k: self[k] - other[k].with_signature(self.signature) for k in keys})

    def __add__(self, other: SymmetricTensor) -> SymmetricTensor:
        keys = set(self.components) | set(other.components)
        return SymmetricTensor(self.signature, {k: self[k] + other[k].with_signature(self.signature) for k in keys})

    def __neg__(self) -> SymmetricTensor:
        return SymmetricTensor(self.signature, {k: -v for k, v in self.components.items()})

    def scale(self, c) -> SymmetricTensor:
        return SymmetricTensor(self.signature, {k: v.scale(c) for k, v in self.components.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, SymmetricTensor):
            return self.signature.names == other.signature.names and self.components == other.components
        return NotImplemented

    def symmetry_defects(self) -> list[Index]:
        """Index triples where T[A,B,C] != (-1)^{|A||B|} T[B,A,C]."""
        bad = []
        for a in self.signature.names:
            for b in self.signature.names:
                for c in self.signature.names:
                    sign = -1 if self.parity(a) and self.parity(b) else 1
                    if self[(a, b, c)] != self[(b, a, c)].scale(sign):
                        bad.append((a, b, c))
        return bad

    def parity_defects(self) -> list[Index]:
        bad = []
        for (a, b, c), g in self.components.items():
            want = (self.parity(a) + self.parity(b) + self.parity(c)) % 2
            if g.parity() != want:
                bad.append((a, b, c))
        return bad

    def render(self) -> str:
        return "\n".join(f"{a} {b} {c} = {g}" for (a, b, c), g in self.items()) or "0"

    def __str__(self) -> str:
        return ", ".join(f"[{a} {b} {c}]: {g}" for (a, b, c), g in self.items()) or "0"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.render()})"


class ChristoffelData(SymmetricTensor):
    """Christoffel symbols of an even affine connection on one chart."""

    @classmethod
    def flat(cls, sig: ChartSignature) -> ChristoffelData:
        return cls(sig, {})

    @classmethod
    def from_entries(cls, sig: ChartSignature, entries: Mapping[Index, SuperElement]) -> ChristoffelData:
        """Fill in entries implied by graded symmetry when only one order is given."""
        comps = dict(entries)
        for (a, b, c), g in entries.items():
            if (b, a, c) not in entries:
                sign = -1 if sig.is_odd(a) and sig.is_odd(b) else 1
                comps[(b, a, c)] = g.scale(sign)
        return cls(sig, comps)

    def with_signature(self, sig: ChartSignature) -> ChristoffelData:
        return ChristoffelData(sig, self.components)

    def defects(self) -> list[str]:
        out = [f"parity of gamma {a} {b} {c}" for a, b, c in self.parity_defects()]
        out += [f"symmetry of gamma {a} {b} {c}" for a, b, c in self.symmetry_defects()]
        return out

    def is_valid(self) -> bool:
        return not self.defects()

    def covariant_derivative(self, u: VectorField, v: VectorField) -> VectorField:
        sig = self.signature.with_invertible(u.signature.invertible | v.signature.invertible)
        gamma = self.with_signature(sig) if sig != self.signature else self
        u = u.with_signature(sig)
        v = v.with_signature(sig)
        comps = [u.apply(vb) for vb in v.components]
        return VectorField(sig, comps) + gamma.evaluate(u, v)

    def torsion(self, u: VectorField, v: VectorField) -> VectorField:
        pu, pv = u.parity(), v.parity()
        if pu is None or pv is None:
            total = VectorField.zero(self.signature)
            for a in (u.even_part(), u.odd_part()):
                for b in (v.even_part(), v.odd_part()):
                    if a and b:
                        total = total + self.torsion(a, b)
            return total
        sign = -1 if pu and pv else 1
        return super_bracket(u, v) - self.covariant_derivative(u, v) + self.covariant_derivative(v, u).scale(sign)


def covariant_derivative(n: ChristoffelData, u: VectorField, v: VectorField) -> VectorField:
    return n.covariant_derivative(u, v)


def torsion(n: ChristoffelData, u: VectorField, v: VectorField) -> VectorField:
    return n.torsion(u, v)


def transport_connection(gamma_target: ChristoffelData, t: TransitionMap,
                         domain: ChartSignature | None = None) -> ChristoffelData:
    """Express the connection of chart ``t.target`` in chart ``t.source`` coordinates."""
    domain = domain or t.source_signature
    inv = t.inverse
    tsig = inv.source_signature.with_invertible(gamma_target.signature.invertible)
    gamma = gamma_target.with_signature(tsig)
    frame = {z: pushforward(VectorField.partial(domain, z), inv, tsig) for z in domain.names}
    comps = {}
    for a in domain.names:
        for b in domain.names:
            w = gamma.covariant_derivative(frame[a], frame[b])
            back = pushforward(w, t, domain)
            for c, g in zip(domain.names, back.components):
                if g:
                    comps[(a, b, c)] = g
    return ChristoffelData(domain, comps)


def inhomogeneous_term(t: TransitionMap, domain: ChartSignature | None = None) -> ChristoffelData:
    """The flat connection of chart ``t.target`` expressed in chart ``t.source``."""
    tgt = t.inverse.source_signature
    return transport_connection(ChristoffelData.flat(tgt), t, domain)


def connection_difference(n1: ChristoffelData, n2: ChristoffelData) -> SymmetricTensor:
    if n1.signature.names != n2.signature.names:
        raise ContextError("connections on different charts")
    sig = n1.signature.with_invertible(n2.signature.invertible)
    diff = n1.with_signature(sig) - n2.with_signature(sig)
    return SymmetricTensor(sig, diff.components)


def check_global(conn: Mapping[int, ChristoffelData], a: Atlas) -> ValidationReport:
    report = ValidationReport()
    for alpha in a.chart_ids():
        n = conn.get(alpha)
        if n is None:
            report.add(f"chart {alpha} connection", False, "missing")
            continue
        defects = n.defects()
        report.add(f"chart {alpha} evenness and symmetry", not defects, "; ".join(defects))
    if not report.passed:
        return report
    for alpha, beta in a.pairs():
        t = a.transition(alpha, beta)
        moved = transport_connection(conn[beta], t)
        here = conn[alpha].with_signature(t.source_signature)
        diff = connection_difference(moved, here)
        detail = "" if diff.is_zero() else f"{len(diff.components)} components differ"
        report.add(f"compatibility {alpha}-{beta}", diff.is_zero(), detail)
    return report


def frame_torsion(n: ChristoffelData) -> dict[tuple[str, str], VectorField]:
    sig = n.signature
    out = {}
    for a in sig.names:
        for b in sig.names:
            tor = n.torsion(VectorField.partial(sig, a), VectorField.partial(sig, b))
            if tor:
                out[(a, b)] = tor
    return out


def _pushed_frame(t: TransitionMap, tsig: ChartSignature, domain: ChartSignature) -> dict[str, VectorField]:
    cache = t.__dict__.setdefault("_frame_cache", {})
    key = (tsig, domain)
    if key not in cache:
        cache[key] = {z: pushforward(VectorField.partial(domain, z), t.inverse, tsig) for z in domain.names}
    return cache[key]


def transport_tensor(tensor: SymmetricTensor, t: TransitionMap, domain: ChartSignature | None = None) -> SymmetricTensor:
    """Tensorial change of chart: no inhomogeneous term."""
    domain = domain or t.source_signature
    inv = t.inverse
    tsig = inv.source_signature.with_invertible(tensor.signature.invertible)
    tens = SymmetricTensor(tsig, tensor.components)
    frame = _pushed_frame(t, tsig, domain)
    comps = {}
    for a in domain.names:
        for b in domain.names:
            back = pushforward(tens.evaluate(frame[a], frame[b]), t, domain)
            for c, g in zip(domain.names, back.components):
                if g:
                    comps[(a, b, c)] = g
    return SymmetricTensor(domain, comps)
