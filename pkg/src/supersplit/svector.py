"""Vector fields on a chart: derivations of its Grassmann algebra."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .atlas import TransitionMap
from .coeffring import ContextError, Scalar, render_terms
from .grassmann import ChartSignature, DegreeError, SuperElement


class VectorField:
    """``sum_z component[z] * d/dz`` over the coordinates z of a chart."""

    __slots__ = ("signature", "components", "_hash")

    def __init__(self, signature: ChartSignature, components: Mapping[str, SuperElement] | Sequence[SuperElement] = ()):
        self.signature = signature
        self._hash = None
        if isinstance(components, Mapping):
            unknown = set(components) - set(signature.names)
            if unknown:
                raise ContextError(f"unknown coordinates {sorted(unknown)}")
            comps = tuple(components.get(z, SuperElement.zero(signature)) for z in signature.names)
        else:
            comps = tuple(components) or tuple(SuperElement.zero(signature) for _ in signature.names)
            if len(comps) != len(signature.names):
                raise ContextError("wrong number of components")
        self.components = tuple(c if c.signature == signature else c.with_signature(signature) for c in comps)

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, sig: ChartSignature) -> VectorField:
        return cls(sig)

    @classmethod
    def partial(cls, sig: ChartSignature, name: str, coeff: SuperElement | Scalar = 1) -> VectorField:
        if not isinstance(coeff, SuperElement):
            coeff = SuperElement.scalar(sig, coeff)
        return cls(sig, {name: coeff})

    # -- inspection ---------------------------------------------------------
    def component(self, name: str) -> SuperElement:
        return self.components[self.signature.names.index(name)]

    @property
    def even_components(self) -> tuple[SuperElement, ...]:
        return self.components[: self.signature.p]

    @property
    def odd_components(self) -> tuple[SuperElement, ...]:
        return self.components[self.signature.p:]

    def as_dict(self) -> dict[str, SuperElement]:
        return dict(zip(self.signature.names, self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _parity_part(self, parity: int) -> VectorField:
        p = self.signature.p
        comps = [c.even_part() if (k >= p) == bool(parity) else c.odd_part() for k, c in enumerate(self.components)]
        return VectorField(self.signature, comps)

    def even_part(self) -> VectorField:
        return self._parity_part(0)

    def odd_part(self) -> VectorField:
        return self._parity_part(1)

    def parity(self) -> int | None:
        """0 for even (including zero), 1 for odd, None for mixed."""
        if self.odd_part().is_zero():
            return 0
        if self.even_part().is_zero():
            return 1
        return None

    def is_even(self) -> bool:
        return self.parity() == 0

    def is_odd(self) -> bool:
        return self.parity() == 1

    # -- filtration ---------------------------------------------------------
    def _shift(self, k: int) -> int:
        return 1 if k >= self.signature.p else 0

    def degrees(self) -> set[int]:
        out = set()
        for k, c in enumerate(self.components):
            for (odd, _), _ in c.items():
                out.add(len(odd) - self._shift(k))
        return out

    def filtration_degree(self) -> int:
        degs = self.degrees()
        if not degs:
            raise DegreeError("the zero field has no filtration degree")
        return min(degs)

    def graded_part(self, m: int) -> VectorField:
        return VectorField(self.signature,
                           [c.graded_part(m + self._shift(k)) for k, c in enumerate(self.components)])

    def above(self, m: int) -> VectorField:
        """The part lying in filtration degree m and higher."""
        return VectorField(self.signature, [c.above(m + self._shift(k)) for k, c in enumerate(self.components)])

    def truncate(self, m: int) -> VectorField:
        """The class modulo filtration degree m."""
        return self - self.above(m)

    def in_filtration(self, m: int) -> bool:
        return self.above(m) == self

    def initial_form(self) -> VectorField:
        return self.graded_part(self.filtration_degree())

    def is_algebraic_part(self) -> bool:
        return all(c.is_zero() for c in self.even_components)

    # -- context ------------------------------------------------------------
    def with_signature(self, sig: ChartSignature) -> VectorField:
        if sig == self.signature:
            return self
        return VectorField(sig, [c.with_signature(sig) for c in self.components])

    def _check(self, other: VectorField) -> None:
        if other.signature != self.signature:
            raise ContextError(f"vector fields on different charts: {self.signature} vs {other.signature}")

    # -- module structure ---------------------------------------------------
    def __add__(self, other: VectorField) -> VectorField:
        if not isinstance(other, VectorField):
            return NotImplemented
        self._check(other)
        return VectorField(self.signature, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: VectorField) -> VectorField:
        if not isinstance(other, VectorField):
            return NotImplemented
        self._check(other)
        return VectorField(self.signature, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> VectorField:
        return VectorField(self.signature, [-c for c in self.components])

    def scale(self, c: Scalar) -> VectorField:
        return VectorField(self.signature, [x.scale(c) for x in self.components])

    def __rmul__(self, f):
        """Left multiplication by a scalar or a function."""
        if isinstance(f, (int, Fraction)) and not isinstance(f, bool):
            return self.scale(f)
        if isinstance(f, SuperElement):
            return VectorField(self.signature, [f.with_signature(self.signature) * c for c in self.components])
        return NotImplemented

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
            return self.scale(c)
        return NotImplemented

    # -- action -------------------------------------------------------------
    def apply(self, f: SuperElement) -> SuperElement:
        """Derivation action sum_z component[z] * df/dz."""
        if f.signature != self.signature:
            if f.signature.names != self.signature.names:
                raise ContextError("function and vector field live on different charts")
            sig = self.signature.with_invertible(f.signature.invertible)
            return self.with_signature(sig).apply(f.with_signature(sig))
        total = SuperElement.zero(self.signature)
        for z, c in zip(self.signature.names, self.components):
            if c:
                d = f.derivative(z)
                if d:
                    total = total + c * d
        return total

    def __call__(self, f: SuperElement) -> SuperElement:
        return self.apply(f)

    # -- comparison and display ---------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, VectorField):
            return self.signature.names == other.signature.names and self.components == other.components
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.signature.names, self.components))
        return self._hash

    def sorted_terms(self) -> list[tuple[Fraction, list[str]]]:
        out = []
        for z, c in zip(self.signature.names, self.components):
            for odd, exps, coeff in c.sorted_terms():
                out.append((coeff, c.term_factors(odd, exps) + [f"d/d{z}"]))
        return out

    def __str__(self) -> str:
        return render_terms(self.sorted_terms())

    def __repr__(self) -> str:
        return f"VectorField({self})"


@dataclass
class FilterData:
    degree: int
    graded_parts: dict[int, VectorField]
    algebraic_flags: dict[int, bool]

    @property
    def initial_form(self) -> VectorField:
        return self.graded_parts[self.degree]


def apply(v: VectorField, f: SuperElement) -> SuperElement:
    return v.apply(f)


def super_bracket(u: VectorField, v: VectorField) -> VectorField:
    """Graded commutator, decomposing mixed fields into parity parts."""
    u._check(v)
    pu, pv = u.parity(), v.parity()
    if pu is None or pv is None:
        total = VectorField.zero(u.signature)
        for a in (u.even_part(), u.odd_part()):
            for b in (v.even_part(), v.odd_part()):
                if a and b:
                    total = total + super_bracket(a, b)
        return total
    sign = -1 if pu and pv else 1
    comps = []
    for z, uz, vz in zip(u.signature.names, u.components, v.components):
        comps.append(u.apply(vz) - v.apply(uz).scale(sign))
    return VectorField(u.signature, comps)


def lie_bracket(u: VectorField, v: VectorField) -> VectorField:
    return super_bracket(u, v)


def filtration_data(v: VectorField) -> FilterData:
    degs = sorted(v.degrees())
    if not degs:
        raise DegreeError("the zero field has no filtration degree")
    parts = {m: v.graded_part(m) for m in degs}
    flags = {m: part.is_algebraic_part() for m, part in parts.items()}
    return FilterData(degs[0], parts, flags)


def pushforward(v: VectorField, t: TransitionMap, domain: ChartSignature | None = None) -> VectorField:
    """Re-express a field on ``t.target`` in the coordinates of ``t.source``.

    ``domain`` may enlarge the source signature by further invertibles, as
    on triple overlaps.
    """
    domain = domain or t.source_signature
    inv = t.inverse
    vsig = v.signature
    if vsig.names != t.target_signature.names:
        raise ContextError("field does not live on the transition's target chart")
    if not t.target_signature.invertible <= vsig.invertible:
        vsig = vsig.with_invertible(t.target_signature.invertible)
        v = v.with_signature(vsig)
    comps = {}
    for z in t.source_signature.names:
        g = inv.images[z].with_signature(vsig)
        comps[z] = t.pullback(v.apply(g), domain)
    return VectorField(domain, comps)


def canonical_field(sig: ChartSignature, kind: str) -> VectorField:
    """The Euler field sum t_i d/dt_i or the de Rham field sum t_mu d/dx_mu."""
    if kind == "euler":
        return VectorField(sig, {t: SuperElement.coordinate(sig, t) for t in sig.odd_names})
    if kind == "derham":
        if sig.p != sig.q:
            raise ContextError("the de Rham field needs as many odd as even coordinates")
        return VectorField(sig, {x: SuperElement.coordinate(sig, t) for x, t in zip(sig.even_names, sig.odd_names)})
    raise ValueError(f"unknown canonical field {kind!r}")


def euler_field(sig: ChartSignature) -> VectorField:
    return canonical_field(sig, "euler")


def derham_field(sig: ChartSignature) -> VectorField:
    return canonical_field(sig, "derham")


def coordinate_frame(sig: ChartSignature) -> list[VectorField]:
    return [VectorField.partial(sig, z) for z in sig.names]


def linear_combination(fields: Iterable[VectorField], coeffs: Iterable[SuperElement]) -> VectorField:
    fields = list(fields)
    total = VectorField.zero(fields[0].signature)
    for f, c in zip(fields, coeffs):
        total = total + c * f
    return total
