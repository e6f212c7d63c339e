"""Grassmann algebras over Laurent polynomials: the functions on a chart.

A ``SuperElement`` is a finite sum of terms ``c * x^e * t_{i1} ... t_{ik}``
with ``i1 < ... < ik``.  Odd generators anticommute and square to zero.
Odd derivatives are left derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from operator import add
from typing import Iterable, Mapping, Sequence

from .coeffring import (
    ContextError,
    Exponent,
    LaurentPoly,
    LaurentRing,
    NotAUnitError,
    Scalar,
    as_rational,
    monomial_factors,
    render_terms,
)

OddSet = tuple[int, ...]


class ParityError(ValueError):
    """Raised when an element has the wrong parity for an operation."""


class DegreeError(ValueError):
    """Raised when a filtration degree is requested for zero."""


@dataclass(frozen=True)
class ChartSignature:
    """Coordinate names of a chart, plus the even names that are invertible."""

    even_names: tuple[str, ...]
    odd_names: tuple[str, ...]
    invertible: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "even_names", tuple(self.even_names))
        object.__setattr__(self, "odd_names", tuple(self.odd_names))
        object.__setattr__(self, "invertible", frozenset(self.invertible))
        names = self.even_names + self.odd_names
        if len(set(names)) != len(names):
            raise ContextError(f"repeated coordinate names in {names}")
        if not self.invertible <= set(self.even_names):
            raise ContextError("only even coordinates can be invertible")

    @property
    def p(self) -> int:
        return len(self.even_names)

    @property
    def q(self) -> int:
        return len(self.odd_names)

    @property
    def names(self) -> tuple[str, ...]:
        return self.even_names + self.odd_names

    @cached_property
    def ring(self) -> LaurentRing:
        return LaurentRing(self.even_names, self.invertible)

    def is_odd(self, name: str) -> bool:
        if name in self.odd_names:
            return True
        if name in self.even_names:
            return False
        raise ContextError(f"unknown coordinate {name!r}")

    def with_invertible(self, names: Iterable[str]) -> ChartSignature:
        extra = frozenset(names)
        if extra <= self.invertible:
            return self
        return ChartSignature(self.even_names, self.odd_names, self.invertible | extra)

    def reduced(self) -> ChartSignature:
        return ChartSignature(self.even_names, (), self.invertible)


def _merge_sign(a: OddSet, b: OddSet) -> int:
    """Sign of sorting the concatenation ``a + b`` (both ascending, disjoint)."""
    swaps = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        swaps += j
    return -1 if swaps & 1 else 1


def _qmul(a: Fraction, b: Fraction) -> Fraction:
    # integral fast path; Fraction.__mul__ renormalizes through gcd every time
    if a.denominator == 1 and b.denominator == 1:
        return Fraction(a.numerator * b.numerator)
    return a * b


def _mask(odd: OddSet) -> int:
    m = 0
    for i in odd:
        m |= 1 << i
    return m


def _merge(a: OddSet, b: OddSet) -> OddSet:
    return tuple(sorted(a + b))


class SuperElement:
    """An immutable element of the Grassmann algebra of a chart."""

    __slots__ = ("signature", "_terms", "_hash")

    def __init__(self, signature: ChartSignature, terms: Mapping[tuple[OddSet, Exponent], Scalar] = None,
                 *, _trusted: bool = False):
        self.signature = signature
        self._hash = None
        if _trusted:
            self._terms = terms
            return
        ring = signature.ring
        clean: dict[tuple[OddSet, Exponent], Fraction] = {}
        for (odd, exps), c in (terms or {}).items():
            c = as_rational(c)
            if not c:
                continue
            if any(i < 0 or i >= signature.q for i in odd):
                raise ContextError(f"odd index out of range in {odd}")
            if len(set(odd)) != len(odd):
                continue
            order = tuple(sorted(odd))
            sign = _permutation_sign(odd)
            exps = tuple(exps)
            if len(exps) != signature.p or not ring.allows(exps):
                raise ContextError(f"exponent {exps} not allowed in {ring}")
            key = (order, exps)
            v = clean.get(key, 0) + sign * c
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self._terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, sig: ChartSignature) -> SuperElement:
        return cls(sig, {}, _trusted=True)

    @classmethod
    def scalar(cls, sig: ChartSignature, c: Scalar) -> SuperElement:
        c = as_rational(c)
        return cls(sig, {((), (0,) * sig.p): c} if c else {}, _trusted=True)

    @classmethod
    def one(cls, sig: ChartSignature) -> SuperElement:
        return cls.scalar(sig, 1)

    @classmethod
    def coordinate(cls, sig: ChartSignature, name: str) -> SuperElement:
        if sig.is_odd(name):
            return cls(sig, {((sig.odd_names.index(name),), (0,) * sig.p): 1})
        exps = [0] * sig.p
        exps[sig.even_names.index(name)] = 1
        return cls(sig, {((), tuple(exps)): 1})

    @classmethod
    def from_poly(cls, sig: ChartSignature, poly: LaurentPoly, odd: OddSet = ()) -> SuperElement:
        if poly.variables != sig.even_names:
            raise ContextError("polynomial variables differ from the chart's even names")
        return cls(sig, {(tuple(odd), e): c for e, c in poly.items()})

    @classmethod
    def from_parts(cls, sig: ChartSignature, parts: Mapping[OddSet, LaurentPoly]) -> SuperElement:
        out = cls.zero(sig)
        for odd, poly in parts.items():
            out = out + cls.from_poly(sig, poly, odd)
        return out

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[OddSet, LaurentPoly]:
        """Map from odd-index subset to its Laurent coefficient."""
        grouped: dict[OddSet, dict[Exponent, Fraction]] = {}
        for (odd, exps), c in self._terms.items():
            grouped.setdefault(odd, {})[exps] = c
        ring = self.signature.ring
        return {odd: LaurentPoly(ring, grouped[odd], _trusted=True)
                for odd in sorted(grouped, key=lambda s: (len(s), s))}

    def items(self):
        return self._terms.items()

    def coefficient(self, odd: OddSet) -> LaurentPoly:
        ring = self.signature.ring
        return LaurentPoly(ring, {e: c for (o, e), c in self._terms.items() if o == tuple(odd)}, _trusted=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_even(self) -> bool:
        return all(len(o) % 2 == 0 for o, _ in self._terms)

    def is_odd(self) -> bool:
        return all(len(o) % 2 == 1 for o, _ in self._terms)

    def parity(self) -> int | None:
        """0 for even (including zero), 1 for odd, None for mixed."""
        if self.is_even():
            return 0
        if self.is_odd():
            return 1
        return None

    def parity_class(self) -> str:
        return {0: "even", 1: "odd", None: "mixed"}[self.parity()]

    def even_part(self) -> SuperElement:
        return self._filter(lambda o: len(o) % 2 == 0)

    def odd_part(self) -> SuperElement:
        return self._filter(lambda o: len(o) % 2 == 1)

    def _filter(self, keep) -> SuperElement:
        return SuperElement(self.signature, {k: c for k, c in self._terms.items() if keep(k[0])}, _trusted=True)

    def body(self) -> LaurentPoly:
        return self.coefficient(())

    # -- filtration ---------------------------------------------------------
    def jadic_degree(self) -> int:
        if not self._terms:
            raise DegreeError("the zero element has no filtration degree")
        return min(len(o) for o, _ in self._terms)

    def graded_part(self, m: int) -> SuperElement:
        return self._filter(lambda o: len(o) == m)

    def truncate(self, m: int) -> SuperElement:
        """The class modulo J^m: terms with fewer than m odd factors."""
        return self._filter(lambda o: len(o) < m)

    def above(self, m: int) -> SuperElement:
        return self._filter(lambda o: len(o) >= m)

    def initial_form(self) -> SuperElement:
        return self.graded_part(self.jadic_degree())

    def jadic_data(self) -> tuple[int, dict[int, SuperElement]]:
        degree = self.jadic_degree()
        parts = {m: self.graded_part(m) for m in sorted({len(o) for o, _ in self._terms})}
        return degree, parts

    def in_power(self, m: int) -> bool:
        """True when the element lies in J^m."""
        return all(len(o) >= m for o, _ in self._terms)

    # -- context ------------------------------------------------------------
    def with_signature(self, sig: ChartSignature) -> SuperElement:
        if sig is self.signature or sig == self.signature:
            return self
        if sig.even_names != self.signature.even_names or sig.odd_names != self.signature.odd_names:
            raise ContextError("cannot move an element between charts with different coordinates")
        ring = sig.ring
        for _, exps in self._terms:
            if not ring.allows(exps):
                raise ContextError(f"{self} is not regular on {sig}")
        return SuperElement(sig, self._terms, _trusted=True)

    def _check(self, other: SuperElement) -> None:
        if other.signature is not self.signature and other.signature != self.signature:
            raise ContextError(f"signature mismatch: {self.signature} vs {other.signature}")

    def _coerce(self, other) -> SuperElement | None:
        if isinstance(other, SuperElement):
            self._check(other)
            return other
        if isinstance(other, LaurentPoly):
            return SuperElement.from_poly(self.signature, other.with_ring(self.signature.ring))
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return SuperElement.scalar(self.signature, other)
        return None

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SuperElement(self.signature, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> SuperElement:
        return SuperElement(self.signature, {k: -c for k, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def scale(self, c: Scalar) -> SuperElement:
        c = as_rational(c)
        if not c:
            return SuperElement.zero(self.signature)
        return SuperElement(self.signature, {k: v * c for k, v in self._terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[tuple[OddSet, Exponent], Fraction] = {}
        right = [(o2, e2, c2, _mask(o2)) for (o2, e2), c2 in other._terms.items()]
        for (o1, e1), c1 in self._terms.items():
            m1 = _mask(o1)
            for o2, e2, c2, m2 in right:
                if m1 & m2:
                    continue
                c = _qmul(c1, c2)
                if o1 and o2:
                    if _merge_sign(o1, o2) < 0:
                        c = -c
                    odd = _merge(o1, o2)
                else:
                    odd = o1 or o2
                key = (odd, tuple(map(add, e1, e2)))
                v = out.get(key, 0) + c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return SuperElement(self.signature, out, _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self

    def __pow__(self, n: int) -> SuperElement:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        result = SuperElement.one(self.signature)
        for _ in range(n):
            result = result * self
        return result

    def invert(self) -> SuperElement:
        """Inverse of an even element whose body is a monomial unit."""
        if not self.is_even():
            raise ParityError(f"only even elements can be inverted, got {self}")
        body = self.body()
        if not body.is_unit():
            raise NotAUnitError(f"body {body} of {self} is not a monomial unit")
        binv = SuperElement.from_poly(self.signature, body.unit_invert())
        nil = self * binv - 1
        total = SuperElement.one(self.signature)
        power = SuperElement.one(self.signature)
        for _ in range(self.signature.q // 2):
            power = power * (-nil)
            if not power:
                break
            total = total + power
        return binv * total

    # -- calculus -----------------------------------------------------------
    def derivative(self, name: str) -> SuperElement:
        """Partial derivative; for odd coordinates this is the left derivative."""
        sig = self.signature
        out: dict[tuple[OddSet, Exponent], Fraction] = {}
        if sig.is_odd(name):
            j = sig.odd_names.index(name)
            for (odd, exps), c in self._terms.items():
                if j in odd:
                    pos = odd.index(j)
                    key = (odd[:pos] + odd[pos + 1:], exps)
                    out[key] = out.get(key, 0) + (-c if pos % 2 else c)
        else:
            k = sig.even_names.index(name)
            for (odd, exps), c in self._terms.items():
                if exps[k]:
                    e = list(exps)
                    e[k] -= 1
                    key = (odd, tuple(e))
                    out[key] = out.get(key, 0) + c * exps[k]
        return SuperElement(sig, {k: v for k, v in out.items() if v}, _trusted=True)

    def substitute(self, images: Mapping[str, SuperElement], target: ChartSignature | None = None) -> SuperElement:
        """Algebra-homomorphic evaluation: replace each coordinate by its image.

        Coordinates missing from ``images`` map to the same-named coordinate
        of ``target``.  Negative exponents invert the corresponding image.
        """
        sig = self.signature
        if target is None:
            target = next(iter(images.values())).signature if images else sig
        even_img: list[SuperElement] = []
        for name in sig.even_names:
            img = images.get(name)
            if img is None:
                img = SuperElement.coordinate(target, name)
            img = img.with_signature(target) if img.signature != target else img
            if not img.is_even():
                raise ParityError(f"image of even coordinate {name} is not even: {img}")
            even_img.append(img)
        odd_img: list[SuperElement] = []
        for name in sig.odd_names:
            img = images.get(name)
            if img is None:
                img = SuperElement.coordinate(target, name)
            img = img.with_signature(target) if img.signature != target else img
            if not img.is_odd():
                raise ParityError(f"image of odd coordinate {name} is not odd: {img}")
            odd_img.append(img)

        powers: dict[tuple[int, int], SuperElement] = {}

        def power(i: int, e: int) -> SuperElement:
            key = (i, e)
            if key not in powers:
                if e < 0:
                    powers[key] = power(i, -1) ** (-e) if e != -1 else even_img[i].invert()
                elif e == 1:
                    powers[key] = even_img[i]
                else:
                    powers[key] = power(i, e - 1) * even_img[i]
            return powers[key]

        monomials: dict[Exponent, SuperElement | None] = {}

        def monomial(exps: Exponent) -> SuperElement | None:
            if exps not in monomials:
                term = None
                for i, e in enumerate(exps):
                    if e:
                        try:
                            term = power(i, e) if term is None else term * power(i, e)
                        except NotAUnitError as exc:
                            raise NotAUnitError(f"cannot invert the image of {sig.even_names[i]}: {exc}") from exc
                monomials[exps] = term
            return monomials[exps]

        total = SuperElement.zero(target)
        odd_products: dict[OddSet, SuperElement] = {(): SuperElement.one(target)}
        grouped: dict[OddSet, list[tuple[Exponent, Fraction]]] = {}
        for (odd, exps), c in self._terms.items():
            grouped.setdefault(odd, []).append((exps, c))
        for odd, terms in grouped.items():
            if odd not in odd_products:
                prod = SuperElement.one(target)
                for i in odd:
                    prod = prod * odd_img[i]
                odd_products[odd] = prod
            oprod = odd_products[odd]
            if not oprod:
                continue
            coeff = SuperElement.zero(target)
            for exps, c in terms:
                term = monomial(exps)
                coeff = coeff + (SuperElement.scalar(target, c) if term is None else term.scale(c))
            total = total + coeff * oprod
        return total

    def set_odd_to_zero(self) -> SuperElement:
        return self.graded_part(0)

    # -- comparison and display ---------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, SuperElement):
            return (self.signature.names == other.signature.names) and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                return not self._terms
            return self._terms == {((), (0,) * self.signature.p): other}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.signature.names, frozenset(self._terms.items())))
        return self._hash

    def sorted_terms(self) -> list[tuple[OddSet, Exponent, Fraction]]:
        return sorted(((o, e, c) for (o, e), c in self._terms.items()), key=lambda t: (len(t[0]), t[0], t[1]))

    def term_factors(self, odd: OddSet, exps: Exponent) -> list[str]:
        sig = self.signature
        return monomial_factors(sig.even_names, exps) + [sig.odd_names[i] for i in odd]

    def __str__(self) -> str:
        return render_terms([(c, self.term_factors(o, e)) for o, e, c in self.sorted_terms()])

    def __repr__(self) -> str:
        return f"SuperElement({self})"


def _permutation_sign(seq: Sequence[int]) -> int:
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def odd_monomial(sig: ChartSignature, odd: Sequence[int], coeff: LaurentPoly | Scalar = 1) -> SuperElement:
    """``coeff * t_{odd[0]} * t_{odd[1]} * ...`` in the given order."""
    if isinstance(coeff, LaurentPoly):
        return SuperElement.from_poly(sig, coeff, tuple(odd))
    return SuperElement(sig, {(tuple(odd), (0,) * sig.p): coeff})


def super_mul(f: SuperElement, g: SuperElement) -> SuperElement:
    f._check(g)
    return f * g


def partial_derivative(f: SuperElement, coord: str) -> SuperElement:
    return f.derivative(coord)


def substitute(f: SuperElement, images: Mapping[str, SuperElement], target: ChartSignature | None = None) -> SuperElement:
    return f.substitute(images, target)


def invert(f: SuperElement) -> SuperElement:
    return f.invert()


def jadic_data(f: SuperElement) -> tuple[int, dict[int, SuperElement]]:
    return f.jadic_data()


def monomial_basis(sig: ChartSignature, exponents: Iterable[Exponent]) -> list[SuperElement]:
    """All ``x^e * t_I`` for the given exponents and every odd subset I."""
    from itertools import combinations

    subsets = [s for k in range(sig.q + 1) for s in combinations(range(sig.q), k)]
    return [SuperElement(sig, {(s, tuple(e)): 1}, _trusted=True) for e in exponents for s in subsets]
